#include "meatcut/harness/metrics.hpp"

#include <algorithm>
#include <vector>

#include "meatcut/error.hpp"

namespace meatcut::harness {

using nlohmann::json;

Stats summarize(std::span<const double> values) {
  Stats s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(s.n);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double fraction_within(std::span<const double> values, std::pair<double, double> band) {
  if (values.empty()) return 0.0;
  const auto inside = std::count_if(values.begin(), values.end(),
                                    [&](double v) { return v >= band.first && v <= band.second; });
  return static_cast<double>(inside) / static_cast<double>(values.size());
}

namespace {

template <class R, class F>
std::vector<double> column(std::span<const R> rows, F&& f) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const R& r : rows) out.push_back(f(r));
  return out;
}

}  // namespace

ConsistencyReport consistency_report(std::span<const PieceRecord> slices, std::span<const PieceRecord> cubes,
                                     const PipelineConfig& pipeline) {
  ConsistencyReport r;
  const auto weights = column(slices, [](const PieceRecord& p) { return p.weight_g; });
  r.slice_thickness_cm = summarize(column(slices, [](const PieceRecord& p) { return p.length_cm; }));
  r.slice_weight_g = summarize(weights);
  r.slice_weight_fraction = fraction_within(weights, pipeline.slice_weight_band_g);
  r.cube_length_cm = summarize(column(cubes, [](const PieceRecord& p) { return p.length_cm; }));
  r.cube_width_cm = summarize(column(cubes, [](const PieceRecord& p) { return p.width_cm; }));
  r.cube_weight_g = summarize(column(cubes, [](const PieceRecord& p) { return p.weight_g; }));
  if (!cubes.empty()) {
    const auto [lo, hi] = pipeline.cube_side_band_cm;
    const auto ok = std::count_if(cubes.begin(), cubes.end(), [&](const PieceRecord& p) {
      return p.length_cm >= lo && p.length_cm <= hi && p.width_cm >= lo && p.width_cm <= hi;
    });
    r.cube_side_fraction = static_cast<double>(ok) / static_cast<double>(cubes.size());
  }
  return r;
}

ConsistencyReport consistency_from_runlog(const json& runlog) {
  try {
    const Config config = config_from_json(runlog.at("config"));
    const json& results = runlog.at("results");
    const auto slices = results.at("slices").get<std::vector<PieceRecord>>();
    const auto cubes = results.at("cubes").get<std::vector<PieceRecord>>();
    return consistency_report(std::span<const PieceRecord>(slices), std::span<const PieceRecord>(cubes), config.pipeline);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("run log: ") + e.what());
  }
}

TrimAccuracy trim_accuracy(std::span<const TrimRecord> cuts) {
  TrimAccuracy a;
  a.fat_thickness_removed_cm = summarize(column(cuts, [](const TrimRecord& t) { return t.fat_thickness_removed_cm; }));
  a.meat_thickness_removed_cm =
      summarize(column(cuts, [](const TrimRecord& t) { return t.meat_thickness_removed_cm; }));
  a.meat_weight_removed_g = summarize(column(cuts, [](const TrimRecord& t) { return t.meat_weight_removed_g; }));
  a.fat_weight_removed_g = summarize(column(cuts, [](const TrimRecord& t) { return t.fat_weight_removed_g; }));
  for (const TrimRecord& t : cuts) a.fat_left_cm2 += t.fat_left_cm2;
  return a;
}

TrimAccuracy trim_accuracy_from_runlog(const json& runlog) {
  try {
    const auto cuts = runlog.at("results").at("trims").get<std::vector<TrimRecord>>();
    return trim_accuracy(std::span<const TrimRecord>(cuts));
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("run log: ") + e.what());
  }
}

void to_json(json& j, const PieceRecord& r) {
  j = {{"area_cm2", r.area_cm2},   {"meat_area_cm2", r.meat_area_cm2}, {"fat_area_cm2", r.fat_area_cm2},
       {"length_cm", r.length_cm}, {"width_cm", r.width_cm},           {"weight_g", r.weight_g}};
}

void from_json(const json& j, PieceRecord& r) {
  j.at("area_cm2").get_to(r.area_cm2);
  j.at("meat_area_cm2").get_to(r.meat_area_cm2);
  j.at("fat_area_cm2").get_to(r.fat_area_cm2);
  j.at("length_cm").get_to(r.length_cm);
  j.at("width_cm").get_to(r.width_cm);
  j.at("weight_g").get_to(r.weight_g);
}

void to_json(json& j, const TrimRecord& r) {
  j = {{"mode", r.mode},
       {"fat_removed_cm2", r.fat_removed_cm2},
       {"meat_removed_cm2", r.meat_removed_cm2},
       {"fat_left_cm2", r.fat_left_cm2},
       {"cut_length_cm", r.cut_length_cm},
       {"fat_thickness_removed_cm", r.fat_thickness_removed_cm},
       {"meat_thickness_removed_cm", r.meat_thickness_removed_cm},
       {"meat_weight_removed_g", r.meat_weight_removed_g},
       {"fat_weight_removed_g", r.fat_weight_removed_g}};
}

void from_json(const json& j, TrimRecord& r) {
  j.at("mode").get_to(r.mode);
  j.at("fat_removed_cm2").get_to(r.fat_removed_cm2);
  j.at("meat_removed_cm2").get_to(r.meat_removed_cm2);
  j.at("fat_left_cm2").get_to(r.fat_left_cm2);
  j.at("cut_length_cm").get_to(r.cut_length_cm);
  j.at("fat_thickness_removed_cm").get_to(r.fat_thickness_removed_cm);
  j.at("meat_thickness_removed_cm").get_to(r.meat_thickness_removed_cm);
  j.at("meat_weight_removed_g").get_to(r.meat_weight_removed_g);
  j.at("fat_weight_removed_g").get_to(r.fat_weight_removed_g);
}

void to_json(json& j, const Stats& s) {
  j = {{"n", s.n}, {"mean", s.mean}, {"variance", s.variance}, {"min", s.min}, {"max", s.max}};
}

void to_json(json& j, const ConsistencyReport& r) {
  j = {{"slice_thickness_cm", r.slice_thickness_cm},
       {"slice_weight_g", r.slice_weight_g},
       {"cube_length_cm", r.cube_length_cm},
       {"cube_width_cm", r.cube_width_cm},
       {"cube_weight_g", r.cube_weight_g},
       {"slice_weight_fraction", r.slice_weight_fraction},
       {"cube_side_fraction", r.cube_side_fraction}};
}

void to_json(json& j, const TrimAccuracy& r) {
  j = {{"fat_thickness_removed_cm", r.fat_thickness_removed_cm},
       {"meat_thickness_removed_cm", r.meat_thickness_removed_cm},
       {"meat_weight_removed_g", r.meat_weight_removed_g},
       {"fat_weight_removed_g", r.fat_weight_removed_g},
       {"fat_left_cm2", r.fat_left_cm2}};
}

}  // namespace meatcut::harness
