#include "meatcut/contact/evaluate.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "meatcut/error.hpp"

namespace meatcut::contact {

double error_rate(std::uint64_t false_positives, std::uint64_t false_negatives, std::uint64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(false_positives + false_negatives) / static_cast<double>(total);
}

double ConfusionStats::error_rate() const {
  return contact::error_rate(false_positives, false_negatives, total());
}

void ConfusionStats::add(int truth, int predicted) {
  if (truth == 1) {
    ++(predicted == 1 ? true_positives : false_negatives);
  } else {
    ++(predicted == 1 ? false_positives : true_negatives);
  }
}

ConfusionStats evaluate(const ForestModel& model, const Dataset& test) {
  if (test.empty()) throw Error(Errc::EmptyInput, "test set is empty");
  ConfusionStats s;
  for (std::size_t i = 0; i < test.size(); ++i) s.add(test.y[i], model.predict(test.x[i]));
  return s;
}

void write_report(std::ostream& out, std::span<const ReportRow> rows) {
  out << std::left << std::setw(8) << "Data" << std::setw(10) << "Action" << std::right << std::setw(16)
      << "False Positives" << std::setw(16) << "False Negatives" << std::setw(19) << "Total Occurrences"
      << std::setw(12) << "Error Rate" << '\n';
  for (const ReportRow& r : rows) {
    std::ostringstream pct;
    pct << std::fixed << std::setprecision(2) << 100.0 * r.stats.error_rate() << '%';
    out << std::left << std::setw(8) << r.data << std::setw(10) << r.action << std::right << std::setw(16)
        << r.stats.false_positives << std::setw(16) << r.stats.false_negatives << std::setw(19) << r.stats.total()
        << std::setw(12) << pct.str() << '\n';
  }
}

}  // namespace meatcut::contact
