#include "meatcut/trajectory.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "meatcut/error.hpp"

namespace meatcut {

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  const auto old_precision = out.precision(17);
  for (const auto& w : trajectory) {
    out << w.t << ' ' << w.x << ' ' << w.y << ' ' << w.z << ' ' << w.phi << '\n';
  }
  out.precision(old_precision);
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    TimedWaypoint w;
    if (!(row >> w.t >> w.x >> w.y >> w.z >> w.phi)) {
      throw Error(Errc::Parse, "trajectory line " + std::to_string(line_no) + ": expected 't x y z phi'");
    }
    std::string extra;
    if (row >> extra) {
      throw Error(Errc::Parse, "trajectory line " + std::to_string(line_no) + ": trailing field '" + extra + "'");
    }
    result.push_back(w);
  }
  return result;
}

}  // namespace meatcut
