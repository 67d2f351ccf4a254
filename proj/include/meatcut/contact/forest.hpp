#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "meatcut/contact/split.hpp"

namespace meatcut::contact {

struct ForestParams {
  int n_trees = 500;
  int mtry = 5;  ///< features tried per split
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 picks the hardware concurrency
};

/// A split node sends x[feature] <= threshold left. A leaf has feature -1 and
/// keeps the bootstrap-weighted class counts of its samples.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> counts{};

  bool leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< root first
  int predict(const Features& x) const;
};

struct ForestModel {
  ForestParams params;
  std::vector<DecisionTree> trees;
  std::size_t train_size = 0;
  double oob_error = 0.0;  ///< over training rows with at least one out-of-bag tree

  std::array<int, 2> votes(const Features& x) const;
  /// Majority vote; a tie goes to class 0.
  int predict(const Features& x) const;
};

/// Breiman random forest: each tree grows on a bootstrap resample of the
/// training rows, tries `mtry` random features per node, splits on Gini
/// impurity, and grows until nodes are pure or cannot be split. Per-tree seeds
/// derive from params.seed, so the model does not depend on the thread count.
/// Throws Errc::DegenerateModel when the training labels have one class and
/// Errc::InvalidArgument on empty data or out-of-range parameters.
ForestModel train_forest(const Dataset& train, const ForestParams& params);

struct MtryTuning {
  int best = 0;
  std::vector<std::pair<int, double>> oob_by_mtry;
};

/// Picks the candidate with the lowest out-of-bag error of a probe forest;
/// ties go to the smaller mtry. Single-class data scores 0 for every candidate.
MtryTuning tune_mtry(const Dataset& train, std::span<const int> candidates, std::uint64_t seed, int probe_trees = 100);
MtryTuning tune_mtry(const Dataset& train, std::uint64_t seed);  ///< candidates 2..8

// Versioned text format; thresholds are written as hex floats so a reloaded
// model predicts bit-identically.
void save_forest(std::ostream& out, const ForestModel& model);
ForestModel load_forest(std::istream& in);

}  // namespace meatcut::contact
