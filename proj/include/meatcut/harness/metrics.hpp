#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "json.hpp"

#include "meatcut/harness/config.hpp"
#include "meatcut/harness/pipeline.hpp"

namespace meatcut::harness {

/// Summary statistics; variance is the population variance. All zero when
/// n == 0.
struct Stats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Stats summarize(std::span<const double> values);

/// Fraction of values inside the closed band; 0 for no values.
double fraction_within(std::span<const double> values, std::pair<double, double> band);

struct ConsistencyReport {
  Stats slice_thickness_cm;
  Stats slice_weight_g;
  Stats cube_length_cm;
  Stats cube_width_cm;
  Stats cube_weight_g;
  double slice_weight_fraction = 0.0;  ///< slices inside the weight band
  double cube_side_fraction = 0.0;     ///< cubes with both sides inside the side band
};

ConsistencyReport consistency_report(std::span<const PieceRecord> slices, std::span<const PieceRecord> cubes,
                                     const PipelineConfig& pipeline);
/// Same, from a persisted pipeline run log (bands from its config snapshot).
ConsistencyReport consistency_from_runlog(const nlohmann::json& runlog);

struct TrimAccuracy {
  Stats fat_thickness_removed_cm;
  Stats meat_thickness_removed_cm;
  Stats meat_weight_removed_g;
  Stats fat_weight_removed_g;
  double fat_left_cm2 = 0.0;  ///< summed over cuts
};

TrimAccuracy trim_accuracy(std::span<const TrimRecord> cuts);
/// Same, from the "trims" of a persisted run log.
TrimAccuracy trim_accuracy_from_runlog(const nlohmann::json& runlog);

void to_json(nlohmann::json& j, const PieceRecord& r);
void from_json(const nlohmann::json& j, PieceRecord& r);
void to_json(nlohmann::json& j, const TrimRecord& r);
void from_json(const nlohmann::json& j, TrimRecord& r);
void to_json(nlohmann::json& j, const Stats& s);
void to_json(nlohmann::json& j, const ConsistencyReport& r);
void to_json(nlohmann::json& j, const TrimAccuracy& r);

}  // namespace meatcut::harness
