#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meatcut/contact/evaluate.hpp"
#include "meatcut/contact/forest.hpp"
#include "meatcut/contact/preprocess.hpp"
#include "meatcut/contact/sensor.hpp"
#include "meatcut/contact/split.hpp"

namespace meatcut::contact {

struct ExperimentOptions {
  SplitScheme split;
  ForestParams forest;
  /// When set, mtry is tuned per part on out-of-bag error with `probe_trees`.
  std::optional<std::vector<int>> mtry_candidates;
  int probe_trees = 100;
  PreprocessOptions preprocess;
  /// Relabel each replicate with label_approaching (on raw readings, before
  /// preprocessing) so the target is "contact within 10-100 ms".
  bool approaching = false;
};

struct PartResult {
  std::string label;
  int mtry = 0;
  double oob_error = 0.0;
  ConfusionStats stats;
};

struct ExperimentResult {
  std::vector<PartResult> parts;
  ConfusionStats pooled;  ///< summed over parts
  PreprocessReport preprocess;

  /// One row per part plus an "all" row when there are several parts.
  std::vector<ReportRow> rows(const std::string& data_label) const;
};

/// Label (optionally), preprocess, split, train and test.
ExperimentResult run_experiment(std::span<const Replicate> raw, const ExperimentOptions& options);

}  // namespace meatcut::contact
