#include "meatcut/contact/sensor.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "meatcut/error.hpp"

namespace meatcut::contact {

std::string_view to_string(CutType type) {
  switch (type) {
    case CutType::Slicing: return "slicing";
    case CutType::Trimming: return "trimming";
    case CutType::Cubing: return "cubing";
  }
  return "unknown";
}

CutType cut_type_from_string(std::string_view name) {
  for (CutType t : kCutTypes) {
    if (to_string(t) == name) return t;
  }
  throw Error(Errc::Parse, "unknown cut type '" + std::string(name) + "'");
}

namespace {

constexpr std::string_view kHeader = "t_ms,proximity,ax,ay,az,gx,gy,gz,mx,my,mz,contact";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(Errc code, const std::string& source, std::size_t line, const std::string& what) {
  throw Error(code, source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    fail(Errc::Parse, source, line, "bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

Replicate read_replicate(std::istream& in, const std::string& source) {
  Replicate rep;
  bool have_id = false, have_type = false, have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, colon));
      const std::string_view value = trim(body.substr(colon + 1));
      if (key == "id") {
        rep.id = std::string(value);
        have_id = true;
      } else if (key == "cut_type") {
        try {
          rep.cut_type = cut_type_from_string(value);
        } catch (const Error& e) {
          fail(Errc::Parse, source, line_no, e.what());
        }
        have_type = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != kHeader) fail(Errc::Parse, source, line_no, "expected header '" + std::string(kHeader) + "'");
      have_header = true;
      continue;
    }
    std::array<double, kFeatureCount + 2> cols{};
    std::size_t n = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      if (n == cols.size()) fail(Errc::Parse, source, line_no, "too many columns");
      cols[n++] = parse_number(rest.substr(0, comma), source, line_no);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (n != cols.size()) fail(Errc::Parse, source, line_no, "expected 12 columns, got " + std::to_string(n));
    SensorSample s;
    s.t_ms = cols[0];
    for (std::size_t f = 0; f < kFeatureCount; ++f) s.features[f] = cols[f + 1];
    if (cols.back() != 0.0 && cols.back() != 1.0) fail(Errc::Parse, source, line_no, "contact must be 0 or 1");
    s.contact = static_cast<int>(cols.back());
    if (!rep.samples.empty() && !(s.t_ms > rep.samples.back().t_ms)) {
      fail(Errc::Integrity, source, line_no, "timestamps must strictly increase");
    }
    rep.samples.push_back(s);
  }
  if (!have_id || !have_type) throw Error(Errc::Parse, source + ": missing '# id:' or '# cut_type:' preamble");
  if (!have_header) throw Error(Errc::Parse, source + ": missing column header");
  return rep;
}

void write_replicate(std::ostream& out, const Replicate& replicate) {
  out << "# id: " << replicate.id << "\n# cut_type: " << to_string(replicate.cut_type) << '\n' << kHeader << '\n';
  out << std::setprecision(17);
  for (const SensorSample& s : replicate.samples) {
    out << s.t_ms;
    for (double f : s.features) out << ',' << f;
    out << ',' << s.contact << '\n';
  }
}

std::vector<Replicate> ingest_replicates(std::span<const std::filesystem::path> files) {
  std::vector<Replicate> out;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    out.push_back(read_replicate(in, path.string()));
  }
  return out;
}

}  // namespace meatcut::contact
