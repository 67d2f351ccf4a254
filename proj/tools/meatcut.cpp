// Command-line front end: one subcommand per pipeline step.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "meatcut/calib.hpp"
#include "meatcut/contact/experiment.hpp"
#include "meatcut/contact/synth.hpp"
#include "meatcut/control.hpp"
#include "meatcut/error.hpp"
#include "meatcut/harness/config.hpp"
#include "meatcut/harness/metrics.hpp"
#include "meatcut/harness/pipeline.hpp"
#include "meatcut/harness/runlog.hpp"
#include "meatcut/harness/scene_gen.hpp"
#include "meatcut/harness/service.hpp"
#include "meatcut/planner.hpp"
#include "meatcut/vision.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace meatcut;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

harness::Config load(const Globals& g) {
  harness::Config c = g.config_path.empty() ? harness::Config{} : harness::load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (!g.out.empty()) c.run_dir = g.out;
  c.validate();
  return c;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  return in;
}

// Writes to <out>/<name> when --out is set, stdout otherwise.
void emit(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::create_directories(g.out);
  const fs::path path = fs::path(g.out) / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
}

harness::MeatSpec load_spec(const std::string& path, bool chop, std::uint64_t seed) {
  if (!path.empty()) {
    auto in = open_in(path);
    try {
      return harness::meat_spec_from_json(json::parse(in, nullptr, true, true));
    } catch (const json::exception& e) {
      throw Error(Errc::Parse, path + ": " + e.what());
    }
  }
  return chop ? harness::random_chop(seed) : harness::random_loin(seed);
}

vision::Scene load_scene(const std::string& path, const harness::Config& config, const std::string& spec_path,
                         bool chop) {
  if (!path.empty()) {
    auto in = open_in(path, std::ios::binary);
    return vision::read_ppm(in);
  }
  return harness::generate_scene(load_spec(spec_path, chop, config.seed), config).scene;
}

std::vector<contact::Replicate> load_replicates(const std::vector<std::string>& files, bool synthetic,
                                                std::uint64_t seed, bool drift) {
  if (synthetic || files.empty()) {
    contact::CorpusSpec spec;
    spec.seed = seed;
    if (!drift) spec.drift = {};
    return contact::synth_corpus(spec);
  }
  std::vector<fs::path> paths(files.begin(), files.end());
  return contact::ingest_replicates(paths);
}

contact::Dataset pool(const std::vector<contact::Replicate>& reps) {
  contact::Dataset all;
  for (std::uint32_t i = 0; i < reps.size(); ++i) {
    for (std::uint32_t j = 0; j < reps[i].samples.size(); ++j) all.push(reps[i].samples[j], {i, j});
  }
  return all;
}

json plan_json(const planner::CutPlan& plan) { return harness::to_json(plan); }

void print_consistency(const harness::ConsistencyReport& r) {
  std::printf("slices: n=%zu thickness %.2f cm (var %.3g), weight %.1f g (var %.3g), in weight band %.0f%%\n",
              r.slice_thickness_cm.n, r.slice_thickness_cm.mean, r.slice_thickness_cm.variance,
              r.slice_weight_g.mean, r.slice_weight_g.variance, 100.0 * r.slice_weight_fraction);
  std::printf("cubes:  n=%zu length %.2f cm, width %.2f cm, weight %.1f g, both sides in band %.0f%%\n",
              r.cube_length_cm.n, r.cube_length_cm.mean, r.cube_width_cm.mean, r.cube_weight_g.mean,
              100.0 * r.cube_side_fraction);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated robotic meat cutting toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--out", g.out, "Output directory");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Fit the camera-to-robot transform to marker pairs");
  std::string markers_path;
  calibrate->add_option("markers", markers_path, "Marker table: rx ry cx cy per line")->required();

  // segment
  auto* segment = app.add_subcommand("segment", "Segment a scene raster");
  std::string scene_path, spec_path;
  bool chop = false;
  for (auto* sub : {segment}) {
    sub->add_option("--scene", scene_path, "PPM raster; a scene is generated when absent");
    sub->add_option("--spec", spec_path, "Meat spec JSON for a generated scene");
    sub->add_flag("--chop", chop, "Generate a chop instead of a loin");
  }

  // plan
  auto* plan = app.add_subcommand("plan", "Plan a cut and lift it to timed knife poses");
  std::string task = "slice";
  std::vector<double> p2p;
  plan->add_option("--task", task, "slice | trim | cube | point_to_point")
      ->check(CLI::IsMember({"slice", "trim", "cube", "point_to_point"}));
  plan->add_option("--scene", scene_path, "PPM raster; a scene is generated when absent");
  plan->add_option("--spec", spec_path, "Meat spec JSON for a generated scene");
  plan->add_flag("--chop", chop, "Generate a chop instead of a loin");
  plan->add_option("--markers", p2p, "x1 y1 x2 y2 in pixels (point_to_point)")->expected(4);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Track a trajectory with the simulated controller");
  std::string trajectory_path;
  simulate->add_option("trajectory", trajectory_path, "Waypoints: t x y z phi per line")->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Slice, de-fat and cube a generated loin; persist the run");
  std::string replay_id;
  pipeline->add_option("--spec", spec_path, "Meat spec JSON; a random loin otherwise");
  pipeline->add_option("--replay", replay_id, "Re-run a stored run and compare its results");

  // contact-train / contact-eval
  auto* ctrain = app.add_subcommand("contact-train", "Train the contact forest on sensor replicates");
  auto* ceval = app.add_subcommand("contact-eval", "Evaluate contact detection");
  std::vector<std::string> data_files;
  bool synthetic = false, no_drift = false, approaching = false;
  std::string model_path = "contact-forest.txt";
  std::string protocol = "SWT";
  for (auto* sub : {ctrain, ceval}) {
    sub->add_option("data", data_files, "Replicate CSV files; synthetic corpus when absent");
    sub->add_flag("--synthetic", synthetic, "Use the synthetic corpus");
    sub->add_flag("--no-drift", no_drift, "Synthetic corpus without per-replicate drift");
    sub->add_flag("--approaching", approaching, "Target contact within the next 10-100 ms");
  }
  ctrain->add_option("--model", model_path, "Where to save the forest");
  ceval->add_option("--model", model_path, "Saved forest; without it the protocol experiment runs");
  ceval->add_option("--protocol", protocol, "SWT | RWT | SAT")->check(CLI::IsMember({"SWT", "RWT", "SAT"}));
  bool use_model = false;
  ceval->add_flag("--use-model", use_model, "Evaluate the saved forest on all given data");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Listen address (config default)");
  serve->add_option("--port", port, "Port (config default)");
  serve->add_option("--spec", spec_path, "Meat spec JSON; a random chop otherwise");

  auto* demo = app.add_subcommand("demo", "End-to-end run on a generated loin plus a trim vs point-to-point chop");

  CLI11_PARSE(app, argc, argv);

  try {
    const harness::Config config = load(g);

    if (*calibrate) {
      auto in = open_in(markers_path);
      const auto pairs = calib::read_marker_pairs(in);
      std::ostringstream out;
      calib::write_params(out, calib::fit_calibration(pairs));
      emit(g, "calibration.txt", out.str());
    } else if (*segment) {
      const vision::Scene scene = load_scene(scene_path, config, spec_path, chop);
      emit(g, "segmentation.json", vision::to_json(vision::segment_scene(scene, config.segmentation)).dump(1));
    } else if (*plan) {
      const vision::Scene scene = load_scene(scene_path, config, spec_path, chop || task != "slice");
      const auto seg = vision::segment_scene(scene, config.segmentation);
      const auto& params = config.camera.params;
      const auto outline = planner::outline_in_robot_frame(seg.meat_contour, params);
      planner::CutPlan cut;
      switch (planner::task_from_string(task)) {
        case planner::Task::Slice:
          cut = planner::plan_slices(outline, config.pipeline.n_slices, config.pipeline.min_slice_width);
          break;
        case planner::Task::Cube:
          cut = planner::plan_cubes(outline, config.pipeline.cube_side);
          break;
        case planner::Task::Trim: {
          std::vector<Vec2> iface;
          for (auto p : vision::fat_meat_interface(seg, config.pipeline.interface_tol_px)) {
            iface.push_back(vision::pixel_center(p));
          }
          cut = planner::plan_trim(iface, config.pipeline.squish_bound_px, params);
          break;
        }
        case planner::Task::PointToPoint:
          if (p2p.size() != 4) throw Error(Errc::InvalidArgument, "point_to_point needs --markers x1 y1 x2 y2");
          cut = planner::plan_point_to_point(calib::pixel_to_robot(params, {p2p[0], p2p[1]}),
                                             calib::pixel_to_robot(params, {p2p[2], p2p[3]}));
          break;
      }
      const auto lifted = planner::lift_to_3d(cut, config.motion, config.region);
      std::ostringstream traj;
      write_trajectory(traj, lifted.waypoints);
      emit(g, "plan.json", plan_json(cut).dump(1));
      emit(g, "plan.traj", traj.str());
    } else if (*simulate) {
      auto in = open_in(trajectory_path);
      const Trajectory traj = read_trajectory(in);
      const auto report = control::simulate_tracking(traj, config.controller, config.plant, config.region);
      std::ostringstream out;
      write_trajectory(out, harness::decimate(report.executed, config.pipeline.trajectory_decimation));
      std::fprintf(stderr, "mean error %.3f mm, max %.3f mm, held steps %zu\n", 1e3 * report.mean_error,
                   1e3 * report.max_error, report.held_steps);
      emit(g, "executed.traj", out.str());
    } else if (*pipeline) {
      harness::RunStore store(config.run_dir);
      if (!replay_id.empty()) {
        const auto check = harness::replay(store.load(replay_id));
        std::printf("%s: %s\n", replay_id.c_str(), check.identical ? "replay identical" : "replay differs");
        if (!check.identical) std::printf("%s\n", check.diff.dump(1).c_str());
        return check.identical ? 0 : 1;
      }
      const auto spec = load_spec(spec_path, false, config.seed);
      const auto result = harness::run_pipeline(spec, config);
      const harness::Snapshot snaps[] = {{"initial", &result.initial_scene}, {"final", &result.final_scene}};
      const std::string id = store.persist(harness::pipeline_runlog(result, config), snaps);
      std::printf("run %s in %s\n", id.c_str(), config.run_dir.string().c_str());
      print_consistency(harness::consistency_report(std::span<const harness::PieceRecord>(result.slice_records),
                                                    std::span<const harness::PieceRecord>(result.cube_records),
                                                    config.pipeline));
      const auto acc = harness::trim_accuracy(std::span<const harness::TrimRecord>(result.trims));
      std::printf("trims:  n=%zu meat removed %.2f g, fat thickness removed %.2f cm\n", acc.meat_weight_removed_g.n,
                  acc.meat_weight_removed_g.mean, acc.fat_thickness_removed_cm.mean);
      std::printf("conservation: meat %.2e, fat %.2e relative\n", result.conservation.meat_rel_error,
                  result.conservation.fat_rel_error);
    } else if (*ctrain) {
      auto reps = load_replicates(data_files, synthetic, config.seed, !no_drift);
      if (approaching) {
        for (auto& r : reps) r = contact::label_approaching(r);
      }
      const auto clean =
          contact::preprocess(reps, {config.contact.global_standardization, contact::PreprocessOptions{}.outlier_sd});
      const contact::Dataset all = pool(clean);
      const auto tuning =
          contact::tune_mtry(all, config.contact.mtry_candidates, config.seed, config.contact.probe_trees);
      const auto model = contact::train_forest(all, {config.contact.n_trees, tuning.best, config.seed, 0});
      std::ostringstream out;
      contact::save_forest(out, model);
      const fs::path path = g.out.empty() ? fs::path(model_path) : fs::path(g.out) / model_path;
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      std::ofstream file(path);
      file << out.str();
      if (!file) throw Error(Errc::Io, "cannot write " + path.string());
      std::printf("trained %d trees on %zu samples, mtry %d, OOB error %.2f%%; saved %s\n", config.contact.n_trees,
                  all.size(), tuning.best, 100.0 * model.oob_error, path.string().c_str());
    } else if (*ceval) {
      auto reps = load_replicates(data_files, synthetic, config.seed, !no_drift);
      const contact::PreprocessOptions pre{config.contact.global_standardization, 5.0};
      std::vector<contact::ReportRow> rows;
      if (use_model) {
        auto in = open_in(model_path);
        const auto model = contact::load_forest(in);
        if (approaching) {
          for (auto& r : reps) r = contact::label_approaching(r);
        }
        rows.push_back({"model", "all", contact::evaluate(model, pool(contact::preprocess(reps, pre)))});
      } else {
        contact::ExperimentOptions opts;
        opts.split = {contact::split_kind_from_string(protocol), config.contact.train_fraction, config.seed};
        opts.forest = {config.contact.n_trees, 5, config.seed, 0};
        opts.mtry_candidates = config.contact.mtry_candidates;
        opts.probe_trees = config.contact.probe_trees;
        opts.preprocess = pre;
        opts.approaching = approaching;
        rows = contact::run_experiment(reps, opts).rows(approaching ? protocol + " approaching" : protocol);
      }
      std::ostringstream out;
      contact::write_report(out, rows);
      emit(g, "contact-report.csv", out.str());
    } else if (*serve) {
      harness::Config c = config;
      if (!host.empty()) c.service.host = host;
      if (port >= 0) c.service.port = port;
      std::optional<harness::MeatSpec> spec;
      if (!spec_path.empty()) spec = load_spec(spec_path, true, c.seed);
      harness::Service service(c, spec);
      const int bound = service.bind(c.service.host, c.service.port);
      std::printf("listening on http://%s:%d\n", c.service.host.c_str(), bound);
      std::fflush(stdout);
      service.run();
    } else if (*demo) {
      harness::RunStore store(config.run_dir);
      const auto result = harness::run_pipeline(harness::random_loin(config.seed), config);
      const harness::Snapshot snaps[] = {{"initial", &result.initial_scene}, {"final", &result.final_scene}};
      const std::string id = store.persist(harness::pipeline_runlog(result, config), snaps);
      std::printf("pipeline run %s: %zu slices, %zu cubes, %zu trimmings\n", id.c_str(), result.slices.size(),
                  result.cubes.size(), result.discards.size());
      print_consistency(harness::consistency_report(std::span<const harness::PieceRecord>(result.slice_records),
                                                    std::span<const harness::PieceRecord>(result.cube_records),
                                                    config.pipeline));
      const auto chop = harness::random_chop(config.seed);
      const auto piece = harness::build_piece(chop);
      for (auto mode : {harness::DefatMode::Trim, harness::DefatMode::PointToPoint}) {
        const auto d = harness::defat_piece(piece, mode, chop, config, config.seed);
        std::printf("chop %-14s meat removed %6.2f g, fat left %.2f cm^2\n", d.cut.record.mode.c_str(),
                    d.cut.record.meat_weight_removed_g, d.cut.record.fat_left_cm2);
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
