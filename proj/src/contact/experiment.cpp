#include "meatcut/contact/experiment.hpp"

namespace meatcut::contact {

std::vector<ReportRow> ExperimentResult::rows(const std::string& data_label) const {
  std::vector<ReportRow> out;
  for (const PartResult& p : parts) out.push_back({data_label, p.label, p.stats});
  if (parts.size() > 1) out.push_back({data_label, "all", pooled});
  return out;
}

ExperimentResult run_experiment(std::span<const Replicate> raw, const ExperimentOptions& options) {
  std::vector<Replicate> labeled;
  if (options.approaching) {
    labeled.reserve(raw.size());
    for (const Replicate& r : raw) labeled.push_back(label_approaching(r));
    raw = labeled;
  }
  ExperimentResult result;
  const std::vector<Replicate> clean = preprocess(raw, options.preprocess, &result.preprocess);

  for (SplitPart& part : build_split(clean, options.split)) {
    ForestParams params = options.forest;
    if (options.mtry_candidates) {
      params.mtry = tune_mtry(part.train, *options.mtry_candidates, params.seed, options.probe_trees).best;
    }
    const ForestModel model = train_forest(part.train, params);
    PartResult r{part.label, params.mtry, model.oob_error, evaluate(model, part.test)};
    result.pooled.false_positives += r.stats.false_positives;
    result.pooled.false_negatives += r.stats.false_negatives;
    result.pooled.true_positives += r.stats.true_positives;
    result.pooled.true_negatives += r.stats.true_negatives;
    result.parts.push_back(std::move(r));
  }
  return result;
}

}  // namespace meatcut::contact
