#include "meatcut/harness/config.hpp"

#include <fstream>
#include <set>

#include "meatcut/error.hpp"

namespace meatcut::harness {

using nlohmann::json;

namespace {

json rgb(vision::Rgb c) { return json::array({c.r, c.g, c.b}); }

vision::Rgb rgb_from(const json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 3) throw Error(Errc::Parse, "color needs 3 channels");
  for (int c : v) {
    if (c < 0 || c > 255) throw Error(Errc::Parse, "color channel outside [0, 255]");
  }
  return {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

// Reads known keys of one section and rejects the rest.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      node_ = &root.at(name);
      if (!node_->is_object()) throw Error(Errc::Parse, std::string("config section '") + name + "' must be an object");
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    if (!node_ || !node_->contains(key)) return;
    seen_.insert(key);
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(Errc::Parse, name_ + "." + key + ": " + e.what());
    }
  }

  template <class F>
  void get_with(const char* key, F&& convert) {
    if (!node_ || !node_->contains(key)) return;
    seen_.insert(key);
    try {
      convert(node_->at(key));
    } catch (const json::exception& e) {
      throw Error(Errc::Parse, name_ + "." + key + ": " + e.what());
    } catch (const Error& e) {
      throw Error(Errc::Parse, name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    if (!node_) return;
    for (const auto& item : node_->items()) {
      if (!seen_.count(item.key())) throw Error(Errc::Parse, "unknown config key '" + name_ + "." + item.key() + "'");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

const char* defat_name(DefatMode m) { return m == DefatMode::Trim ? "trim" : "point_to_point"; }

}  // namespace

void Config::validate() const {
  region.validate();
  segmentation.colors.validate();
  motion.validate();
  controller.validate();
  plant.validate();
  if (camera.width <= 0 || camera.height <= 0) throw Error(Errc::InvalidArgument, "camera image must be non-empty");
  if (camera.params.theta1 <= 0.0 || camera.params.theta2 <= 0.0) {
    throw Error(Errc::InvalidArgument, "camera scales must be positive");
  }
  vision::Scene probe(camera.width, camera.height, {}, camera.board);
  probe.validate();
  if (pipeline.n_slices < 2) throw Error(Errc::InvalidArgument, "pipeline needs at least 2 slices");
  if (!(pipeline.cube_side > 0.0)) throw Error(Errc::InvalidArgument, "cube side must be positive");
  if (pipeline.trajectory_decimation < 1) throw Error(Errc::InvalidArgument, "decimation must be >= 1");
  if (render.marker_size_px < 1) throw Error(Errc::InvalidArgument, "marker size must be >= 1 px");
  if (contact.n_trees < 1 || contact.probe_trees < 1 || contact.mtry_candidates.empty()) {
    throw Error(Errc::InvalidArgument, "contact forest settings are out of range");
  }
  if (!(contact.train_fraction > 0.0 && contact.train_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "contact train fraction must lie in (0, 1)");
  }
}

json to_json(const Config& c) {
  json j;
  j["seed"] = c.seed;
  j["run_dir"] = c.run_dir.string();
  j["workspace"] = {{"x_min", c.region.x_min}, {"x_max", c.region.x_max}, {"y_min", c.region.y_min},
                    {"y_max", c.region.y_max}, {"z_min", c.region.z_min}, {"z_max", c.region.z_max}};
  const auto& p = c.camera.params;
  j["camera"] = {{"theta0", p.theta0},
                 {"theta1", p.theta1},
                 {"theta2", p.theta2},
                 {"theta3", p.theta3},
                 {"theta4", p.theta4},
                 {"width", c.camera.width},
                 {"height", c.camera.height},
                 {"board", {c.camera.board.x, c.camera.board.y, c.camera.board.width, c.camera.board.height}}};
  j["render"] = {{"meat", rgb(c.render.meat)},     {"fat", rgb(c.render.fat)},
                 {"marker", rgb(c.render.marker)}, {"board", rgb(c.render.board)},
                 {"exterior", rgb(c.render.exterior)}, {"jitter", c.render.jitter},
                 {"marker_size_px", c.render.marker_size_px}};
  const auto& col = c.segmentation.colors;
  j["vision"] = {{"meat_lo", rgb(col.meat.lo)},     {"meat_hi", rgb(col.meat.hi)},
                 {"fat_lo", rgb(col.fat.lo)},       {"fat_hi", rgb(col.fat.hi)},
                 {"marker_lo", rgb(col.marker.lo)}, {"marker_hi", rgb(col.marker.hi)},
                 {"marker_min_area", c.segmentation.marker_min_area}};
  j["motion"] = {{"z_travel", c.motion.z_travel},
                 {"z_cut_depth", c.motion.z_cut_depth},
                 {"period", c.motion.period},
                 {"pause_spacing", c.motion.pause_spacing},
                 {"travel_speed", c.motion.travel_speed},
                 {"samples_per_period", c.motion.samples_per_period}};
  j["controller"] = {{"gain", c.controller.gain},
                     {"rate", c.controller.rate},
                     {"waypoint_tolerance", c.controller.waypoint_tolerance},
                     {"waypoint_timeout", c.controller.waypoint_timeout}};
  j["plant"] = {{"kind", c.plant.kind == control::PlantKind::Ideal ? "ideal" : "lagged"},
                {"lag_tau", c.plant.lag_tau},
                {"command_noise_sigma", c.plant.command_noise_sigma},
                {"seed", c.plant.seed}};
  const auto& pl = c.pipeline;
  j["pipeline"] = {{"n_slices", pl.n_slices},
                   {"min_slice_width", pl.min_slice_width},
                   {"defat", defat_name(pl.defat)},
                   {"squish_bound_px", pl.squish_bound_px},
                   {"interface_tol_px", pl.interface_tol_px},
                   {"cube_side", pl.cube_side},
                   {"marker_push", pl.marker_push},
                   {"min_fat_area_px", pl.min_fat_area_px},
                   {"slice_weight_band_g", {pl.slice_weight_band_g.first, pl.slice_weight_band_g.second}},
                   {"cube_side_band_cm", {pl.cube_side_band_cm.first, pl.cube_side_band_cm.second}},
                   {"trajectory_decimation", pl.trajectory_decimation}};
  j["contact"] = {{"n_trees", c.contact.n_trees},
                  {"mtry_candidates", c.contact.mtry_candidates},
                  {"probe_trees", c.contact.probe_trees},
                  {"train_fraction", c.contact.train_fraction},
                  {"global_standardization", c.contact.global_standardization}};
  j["service"] = {{"host", c.service.host}, {"port", c.service.port}};
  return j;
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::Parse, "config must be a JSON object");
  static const std::set<std::string> kSections = {"seed",   "run_dir", "workspace", "camera",   "render", "vision",
                                                  "motion", "controller", "plant",  "pipeline", "contact", "service"};
  for (const auto& item : j.items()) {
    if (!kSections.count(item.key())) throw Error(Errc::Parse, "unknown config section '" + item.key() + "'");
  }
  Config c;
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("run_dir")) c.run_dir = j.at("run_dir").get<std::string>();
  {
    Section s(j, "workspace");
    s.get("x_min", c.region.x_min);
    s.get("x_max", c.region.x_max);
    s.get("y_min", c.region.y_min);
    s.get("y_max", c.region.y_max);
    s.get("z_min", c.region.z_min);
    s.get("z_max", c.region.z_max);
    s.finish();
  }
  {
    Section s(j, "camera");
    s.get("theta0", c.camera.params.theta0);
    s.get("theta1", c.camera.params.theta1);
    s.get("theta2", c.camera.params.theta2);
    s.get("theta3", c.camera.params.theta3);
    s.get("theta4", c.camera.params.theta4);
    s.get("width", c.camera.width);
    s.get("height", c.camera.height);
    s.get_with("board", [&](const json& v) {
      const auto r = v.get<std::vector<int>>();
      if (r.size() != 4) throw Error(Errc::Parse, "board needs [x, y, width, height]");
      c.camera.board = {r[0], r[1], r[2], r[3]};
    });
    s.finish();
  }
  {
    Section s(j, "render");
    s.get_with("meat", [&](const json& v) { c.render.meat = rgb_from(v); });
    s.get_with("fat", [&](const json& v) { c.render.fat = rgb_from(v); });
    s.get_with("marker", [&](const json& v) { c.render.marker = rgb_from(v); });
    s.get_with("board", [&](const json& v) { c.render.board = rgb_from(v); });
    s.get_with("exterior", [&](const json& v) { c.render.exterior = rgb_from(v); });
    s.get("jitter", c.render.jitter);
    s.get("marker_size_px", c.render.marker_size_px);
    s.finish();
  }
  {
    Section s(j, "vision");
    auto& col = c.segmentation.colors;
    s.get_with("meat_lo", [&](const json& v) { col.meat.lo = rgb_from(v); });
    s.get_with("meat_hi", [&](const json& v) { col.meat.hi = rgb_from(v); });
    s.get_with("fat_lo", [&](const json& v) { col.fat.lo = rgb_from(v); });
    s.get_with("fat_hi", [&](const json& v) { col.fat.hi = rgb_from(v); });
    s.get_with("marker_lo", [&](const json& v) { col.marker.lo = rgb_from(v); });
    s.get_with("marker_hi", [&](const json& v) { col.marker.hi = rgb_from(v); });
    s.get("marker_min_area", c.segmentation.marker_min_area);
    s.finish();
  }
  {
    Section s(j, "motion");
    s.get("z_travel", c.motion.z_travel);
    s.get("z_cut_depth", c.motion.z_cut_depth);
    s.get("period", c.motion.period);
    s.get("pause_spacing", c.motion.pause_spacing);
    s.get("travel_speed", c.motion.travel_speed);
    s.get("samples_per_period", c.motion.samples_per_period);
    s.finish();
  }
  {
    Section s(j, "controller");
    s.get("gain", c.controller.gain);
    s.get("rate", c.controller.rate);
    s.get("waypoint_tolerance", c.controller.waypoint_tolerance);
    s.get("waypoint_timeout", c.controller.waypoint_timeout);
    s.finish();
  }
  {
    Section s(j, "plant");
    s.get_with("kind", [&](const json& v) {
      const auto k = v.get<std::string>();
      if (k == "ideal") {
        c.plant.kind = control::PlantKind::Ideal;
      } else if (k == "lagged") {
        c.plant.kind = control::PlantKind::Lagged;
      } else {
        throw Error(Errc::Parse, "plant kind must be 'ideal' or 'lagged'");
      }
    });
    s.get("lag_tau", c.plant.lag_tau);
    s.get("command_noise_sigma", c.plant.command_noise_sigma);
    s.get("seed", c.plant.seed);
    s.finish();
  }
  {
    Section s(j, "pipeline");
    auto& pl = c.pipeline;
    s.get("n_slices", pl.n_slices);
    s.get("min_slice_width", pl.min_slice_width);
    s.get_with("defat", [&](const json& v) {
      const auto m = v.get<std::string>();
      if (m == "trim") {
        pl.defat = DefatMode::Trim;
      } else if (m == "point_to_point") {
        pl.defat = DefatMode::PointToPoint;
      } else {
        throw Error(Errc::Parse, "defat must be 'trim' or 'point_to_point'");
      }
    });
    s.get("squish_bound_px", pl.squish_bound_px);
    s.get("interface_tol_px", pl.interface_tol_px);
    s.get("cube_side", pl.cube_side);
    s.get("marker_push", pl.marker_push);
    s.get("min_fat_area_px", pl.min_fat_area_px);
    s.get("slice_weight_band_g", pl.slice_weight_band_g);
    s.get("cube_side_band_cm", pl.cube_side_band_cm);
    s.get("trajectory_decimation", pl.trajectory_decimation);
    s.finish();
  }
  {
    Section s(j, "contact");
    s.get("n_trees", c.contact.n_trees);
    s.get("mtry_candidates", c.contact.mtry_candidates);
    s.get("probe_trees", c.contact.probe_trees);
    s.get("train_fraction", c.contact.train_fraction);
    s.get("global_standardization", c.contact.global_standardization);
    s.finish();
  }
  {
    Section s(j, "service");
    s.get("host", c.service.host);
    s.get("port", c.service.port);
    s.finish();
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Parse, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace meatcut::harness
