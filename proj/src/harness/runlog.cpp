#include "meatcut/harness/runlog.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "meatcut/error.hpp"
#include "meatcut/harness/metrics.hpp"

namespace meatcut::harness {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const planner::CutPlan& plan) {
  json lines = json::array();
  for (const Polyline2& line : plan.polylines) {
    json pts = json::array();
    for (Vec2 p : line) pts.push_back({p.x, p.y});
    lines.push_back(std::move(pts));
  }
  return {{"task", planner::to_string(plan.task)}, {"polylines", std::move(lines)}};
}

json to_json(const Trajectory& trajectory) {
  json out = json::array();
  for (const TimedWaypoint& w : trajectory) out.push_back({w.t, w.x, w.y, w.z, w.phi});
  return out;
}

namespace {

json tracking_summary(const control::TrackingReport& r) {
  return {{"mean_error", r.mean_error},
          {"max_error", r.max_error},
          {"mean_heading_error", r.mean_heading_error},
          {"held_steps", r.held_steps},
          {"waypoints", r.reached.size()}};
}

StageRecord decimated_stage(std::string name, int piece, const CutExecution& ex, int decimation) {
  StageRecord r{std::move(name), piece, ex.plan, ex.tracking};
  r.tracking.executed = decimate(ex.tracking.executed, decimation);
  r.tracking.reference.clear();
  return r;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

json to_json(const StageRecord& stage) {
  return {{"stage", stage.stage},
          {"piece", stage.piece},
          {"plan", to_json(stage.plan)},
          {"tracking", tracking_summary(stage.tracking)},
          {"executed", to_json(stage.tracking.executed)}};
}

json pipeline_results(const PipelineResult& r) {
  json discards = json::array();
  for (const Piece& p : r.discards) discards.push_back(describe_piece(p, r.spec));
  json tracking = json::array();
  for (const StageRecord& s : r.stages) {
    json t = tracking_summary(s.tracking);
    t["stage"] = s.stage;
    t["piece"] = s.piece;
    tracking.push_back(std::move(t));
  }
  const Conservation& c = r.conservation;
  return {{"slices", r.slice_records},
          {"cubes", r.cube_records},
          {"trims", r.trims},
          {"discards", std::move(discards)},
          {"tracking", std::move(tracking)},
          {"conservation",
           {{"meat_parent_cm2", c.meat_parent_cm2},
            {"fat_parent_cm2", c.fat_parent_cm2},
            {"meat_sum_cm2", c.meat_sum_cm2},
            {"fat_sum_cm2", c.fat_sum_cm2},
            {"dropped_cm2", c.dropped_cm2},
            {"meat_rel_error", c.meat_rel_error},
            {"fat_rel_error", c.fat_rel_error}}},
          {"trim_accuracy", trim_accuracy(std::span<const TrimRecord>(r.trims))}};
}

json pipeline_runlog(const PipelineResult& result, const Config& config) {
  json stages = json::array();
  for (const StageRecord& s : result.stages) stages.push_back(to_json(s));
  json results = pipeline_results(result);
  results["consistency"] = consistency_report(std::span<const PieceRecord>(result.slice_records),
                                              std::span<const PieceRecord>(result.cube_records), config.pipeline);
  return {{"format", kRunLogFormat},
          {"kind", "pipeline"},
          {"seed", config.seed},
          {"config", to_json(config)},
          {"spec", to_json(result.spec)},
          {"snapshots", {"initial.ppm", "final.ppm"}},
          {"stages", std::move(stages)},
          {"results", std::move(results)}};
}

InteractiveState replay_cuts(const MeatSpec& spec, const Config& config, std::span<const MarkerPairPx> cuts) {
  InteractiveState state;
  state.piece = build_piece(spec);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    DefatOutcome out = point_to_point_cut(state.piece, cuts[k].a, cuts[k].b, spec, config, config.seed + k);
    state.piece = out.cut.kept;
    state.trims.push_back(out.cut.record);
    state.outcomes.push_back(std::move(out));
  }
  return state;
}

json interactive_results(const InteractiveState& state, const MeatSpec& spec) {
  json tracking = json::array();
  for (const DefatOutcome& o : state.outcomes) tracking.push_back(tracking_summary(o.execution.tracking));
  return {{"trims", state.trims},
          {"piece", describe_piece(state.piece, spec)},
          {"tracking", std::move(tracking)},
          {"trim_accuracy", trim_accuracy(std::span<const TrimRecord>(state.trims))}};
}

json interactive_runlog(const InteractiveState& state, const MeatSpec& spec, const Config& config,
                        std::span<const MarkerPairPx> cuts, int decimation) {
  json cut_list = json::array();
  for (const MarkerPairPx& c : cuts) cut_list.push_back({{c.a.x, c.a.y}, {c.b.x, c.b.y}});
  json stages = json::array();
  for (std::size_t k = 0; k < state.outcomes.size(); ++k) {
    stages.push_back(to_json(decimated_stage("defat", static_cast<int>(k), state.outcomes[k].execution, decimation)));
  }
  return {{"format", kRunLogFormat},
          {"kind", "interactive"},
          {"seed", config.seed},
          {"config", to_json(config)},
          {"spec", to_json(spec)},
          {"cuts", std::move(cut_list)},
          {"snapshots", {"before.ppm", "after.ppm"}},
          {"stages", std::move(stages)},
          {"results", interactive_results(state, spec)}};
}

ReplayCheck replay(const json& runlog) {
  json recomputed;
  try {
    if (runlog.value("format", std::string()) != kRunLogFormat) throw Error(Errc::Parse, "not a run log");
    const Config config = config_from_json(runlog.at("config"));
    const MeatSpec spec = meat_spec_from_json(runlog.at("spec"));
    const std::string kind = runlog.at("kind").get<std::string>();
    if (kind == "pipeline") {
      const PipelineResult r = run_pipeline(spec, config);
      recomputed = pipeline_runlog(r, config).at("results");
    } else if (kind == "interactive") {
      std::vector<MarkerPairPx> cuts;
      for (const json& c : runlog.at("cuts")) {
        cuts.push_back({{c.at(0).at(0).get<double>(), c.at(0).at(1).get<double>()},
                        {c.at(1).at(0).get<double>(), c.at(1).at(1).get<double>()}});
      }
      recomputed = interactive_results(replay_cuts(spec, config, cuts), spec);
    } else {
      throw Error(Errc::Parse, "unknown run kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("run log: ") + e.what());
  }
  const json& stored = runlog.at("results");
  return {stored == recomputed, json::diff(stored, recomputed)};
}

bool valid_run_id(std::string_view id) {
  if (id.size() != 10 || id.substr(0, 4) != "run-") return false;
  for (char c : id.substr(4)) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

std::string RunStore::persist(json runlog, std::span<const Snapshot> snapshots) {
  const std::lock_guard lock(mutex_);
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(Errc::Io, "cannot create run directory " + root_.string() + ": " + ec.message());

  int next = 1;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (valid_run_id(name)) next = std::max(next, std::stoi(name.substr(4)) + 1);
  }
  std::string id;
  for (;; ++next) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run-%06d", next);
    id = buf;
    if (fs::create_directory(root_ / id, ec)) break;
    if (ec) throw Error(Errc::Io, "cannot create " + (root_ / id).string() + ": " + ec.message());
  }

  runlog["id"] = id;
  runlog["created"] = utc_now();
  const fs::path dir = root_ / id;
  for (const Snapshot& s : snapshots) {
    std::ofstream out(dir / (s.name + ".ppm"), std::ios::binary);
    vision::write_ppm(out, *s.scene);
    if (!out) throw Error(Errc::Io, "failed writing snapshot " + s.name);
  }
  std::ofstream out(dir / "runlog.json");
  out << runlog.dump(1) << '\n';
  if (!out) throw Error(Errc::Io, "failed writing run log " + id);
  return id;
}

json RunStore::load(std::string_view id) const {
  if (!valid_run_id(id)) throw Error(Errc::InvalidArgument, "malformed run id '" + std::string(id) + "'");
  const std::lock_guard lock(mutex_);
  std::ifstream in(root_ / std::string(id) / "runlog.json");
  if (!in) throw Error(Errc::Io, "no run '" + std::string(id) + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, "run " + std::string(id) + ": " + e.what());
  }
}

std::vector<std::string> RunStore::list() const {
  const std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::exists(root_, ec)) return ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (valid_run_id(name)) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace meatcut::harness
