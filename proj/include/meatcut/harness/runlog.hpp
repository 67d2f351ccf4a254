#pragma once

#include <filesystem>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "meatcut/harness/config.hpp"
#include "meatcut/harness/pipeline.hpp"

namespace meatcut::harness {

// Run logs are JSON documents. Every log carries "kind", "config", "spec",
// "seed", "stages" and "results"; the store adds "id" and "created".
inline constexpr std::string_view kRunLogFormat = "meatcut-runlog 1";

nlohmann::json to_json(const planner::CutPlan& plan);
nlohmann::json to_json(const Trajectory& trajectory);
nlohmann::json to_json(const StageRecord& stage);

/// Deterministic part of a pipeline run, compared on replay.
nlohmann::json pipeline_results(const PipelineResult& result);
nlohmann::json pipeline_runlog(const PipelineResult& result, const Config& config);

/// One operator point-to-point cut, markers in pixels.
struct MarkerPairPx {
  Vec2 a;
  Vec2 b;
};

/// State of an interactive de-fatting session after a sequence of cuts.
struct InteractiveState {
  Piece piece;
  std::vector<TrimRecord> trims;
  std::vector<DefatOutcome> outcomes;
};

/// Applies the cuts in order to the spec's piece. Render seeds derive from
/// config.seed and the cut index.
InteractiveState replay_cuts(const MeatSpec& spec, const Config& config, std::span<const MarkerPairPx> cuts);

nlohmann::json interactive_results(const InteractiveState& state, const MeatSpec& spec);
nlohmann::json interactive_runlog(const InteractiveState& state, const MeatSpec& spec, const Config& config,
                                  std::span<const MarkerPairPx> cuts, int decimation);

struct ReplayCheck {
  bool identical = false;
  nlohmann::json diff;  ///< JSON patch from the stored to the recomputed results
};

/// Re-runs a stored log from its config snapshot, spec and cuts and compares
/// the "results" sections. Throws Errc::Parse for a malformed log.
ReplayCheck replay(const nlohmann::json& runlog);

struct Snapshot {
  std::string name;  ///< file stem, e.g. "initial"
  const vision::Scene* scene;
};

/// Append-only directory of runs: <root>/run-NNNNNN/runlog.json plus PPM
/// snapshots. Existing runs are never rewritten. Safe to share between
/// threads.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  /// Assigns the next id, stamps "id" and "created", writes everything.
  std::string persist(nlohmann::json runlog, std::span<const Snapshot> snapshots = {});

  /// Throws Errc::InvalidArgument for a malformed id and Errc::Io when the
  /// run does not exist.
  nlohmann::json load(std::string_view id) const;
  std::vector<std::string> list() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

bool valid_run_id(std::string_view id);

}  // namespace meatcut::harness
