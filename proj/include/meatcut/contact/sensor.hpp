#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meatcut::contact {

inline constexpr std::size_t kFeatureCount = 10;
using Features = std::array<double, kFeatureCount>;

/// Column names in file order, proximity first.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "proximity", "ax", "ay", "az", "gx", "gy", "gz", "mx", "my", "mz"};

enum class CutType { Slicing, Trimming, Cubing };
inline constexpr std::array<CutType, 3> kCutTypes = {CutType::Slicing, CutType::Trimming, CutType::Cubing};

std::string_view to_string(CutType type);
CutType cut_type_from_string(std::string_view name);

struct SensorSample {
  double t_ms = 0.0;
  Features features{};
  int contact = 0;  ///< ground-truth button, 0 or 1
};

/// One recorded cutting action.
struct Replicate {
  std::string id;
  CutType cut_type = CutType::Slicing;
  std::vector<SensorSample> samples;
};

// CSV with a '#' preamble carrying "# id: <id>" and "# cut_type: <type>",
// then the header "t_ms,proximity,ax,ay,az,gx,gy,gz,mx,my,mz,contact".
// Parse errors name the source and line; timestamps that do not strictly
// increase raise Errc::Integrity.
Replicate read_replicate(std::istream& in, const std::string& source = "<stream>");
void write_replicate(std::ostream& out, const Replicate& replicate);

std::vector<Replicate> ingest_replicates(std::span<const std::filesystem::path> files);

}  // namespace meatcut::contact
