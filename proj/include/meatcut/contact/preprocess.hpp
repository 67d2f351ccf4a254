#pragma once

#include <span>
#include <string>
#include <vector>

#include "meatcut/contact/sensor.hpp"

namespace meatcut::contact {

struct PreprocessOptions {
  /// Standardize with statistics pooled over all replicates instead of per
  /// replicate.
  bool global = false;
  double outlier_sd = 5.0;
};

struct PreprocessReport {
  std::vector<std::size_t> removed;  ///< per replicate, in input order
  std::size_t removed_total = 0;
  std::vector<std::string> warnings;
};

/// Centers each feature and divides by its sample SD (n-1), then drops every
/// sample with some |z| above `outlier_sd`. A zero-variance feature keeps
/// scale 1 and adds a warning. Throws Errc::EmptyInput without samples.
std::vector<Replicate> preprocess(std::span<const Replicate> replicates, const PreprocessOptions& options = {},
                                  PreprocessReport* report = nullptr);

/// Relabels for the approaching-contact task: a sample at t is positive iff
/// some contact onset (0 -> 1 transition) happens at t_on with
/// t_on - t in [lo_ms, hi_ms]. In-contact samples are dropped.
Replicate label_approaching(const Replicate& replicate, double lo_ms = 10.0, double hi_ms = 100.0);

}  // namespace meatcut::contact
