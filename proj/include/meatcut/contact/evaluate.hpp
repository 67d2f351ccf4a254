#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "meatcut/contact/forest.hpp"
#include "meatcut/contact/split.hpp"

namespace meatcut::contact {

struct ConfusionStats {
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t true_positives = 0;
  std::uint64_t true_negatives = 0;

  std::uint64_t total() const { return false_positives + false_negatives + true_positives + true_negatives; }
  /// (FP + FN) / total; zero for an empty table.
  double error_rate() const;
  void add(int truth, int predicted);
};

/// Error rate from the published cells alone: (fp + fn) / total.
double error_rate(std::uint64_t false_positives, std::uint64_t false_negatives, std::uint64_t total);

/// Throws Errc::EmptyInput on an empty test set.
ConfusionStats evaluate(const ForestModel& model, const Dataset& test);

struct ReportRow {
  std::string data;    ///< protocol, e.g. "SWT"
  std::string action;  ///< cut type or "all"
  ConfusionStats stats;
};

/// Fixed-width table with the columns Data, Action, False Positives,
/// False Negatives, Total Occurrences, Error Rate (percent, two decimals).
void write_report(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace meatcut::contact
