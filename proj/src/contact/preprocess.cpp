#include "meatcut/contact/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "meatcut/error.hpp"

namespace meatcut::contact {

namespace {

struct Moments {
  Features mean{};
  Features scale{};
};

Moments moments(std::span<const Replicate* const> group, const std::string& label, std::vector<std::string>& warnings) {
  Moments m;
  std::size_t n = 0;
  for (const Replicate* r : group) {
    for (const SensorSample& s : r->samples) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) m.mean[f] += s.features[f];
      ++n;
    }
  }
  if (n == 0) throw Error(Errc::EmptyInput, "no samples to standardize in " + label);
  for (double& v : m.mean) v /= static_cast<double>(n);
  Features ss{};
  for (const Replicate* r : group) {
    for (const SensorSample& s : r->samples) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const double d = s.features[f] - m.mean[f];
        ss[f] += d * d;
      }
    }
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const double sd = n > 1 ? std::sqrt(ss[f] / static_cast<double>(n - 1)) : 0.0;
    if (sd > 0.0) {
      m.scale[f] = sd;
    } else {
      m.scale[f] = 1.0;
      warnings.push_back(label + ": feature " + std::string(kFeatureNames[f]) + " has zero variance; left unscaled");
    }
  }
  return m;
}

}  // namespace

std::vector<Replicate> preprocess(std::span<const Replicate> replicates, const PreprocessOptions& options,
                                  PreprocessReport* report) {
  if (replicates.empty()) throw Error(Errc::EmptyInput, "no replicates to preprocess");
  PreprocessReport local;
  PreprocessReport& rep = report ? *report : local;
  rep = {};

  std::vector<Moments> stats;
  if (options.global) {
    std::vector<const Replicate*> all;
    for (const Replicate& r : replicates) all.push_back(&r);
    stats.assign(replicates.size(), moments(all, "all replicates", rep.warnings));
  } else {
    for (const Replicate& r : replicates) {
      const Replicate* one[] = {&r};
      stats.push_back(moments(one, "replicate " + r.id, rep.warnings));
    }
  }

  std::vector<Replicate> out;
  out.reserve(replicates.size());
  for (std::size_t i = 0; i < replicates.size(); ++i) {
    const Replicate& r = replicates[i];
    Replicate z{r.id, r.cut_type, {}};
    z.samples.reserve(r.samples.size());
    std::size_t dropped = 0;
    for (const SensorSample& s : r.samples) {
      SensorSample t = s;
      bool outlier = false;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        t.features[f] = (s.features[f] - stats[i].mean[f]) / stats[i].scale[f];
        outlier = outlier || std::abs(t.features[f]) > options.outlier_sd;
      }
      if (outlier) {
        ++dropped;
      } else {
        z.samples.push_back(t);
      }
    }
    rep.removed.push_back(dropped);
    rep.removed_total += dropped;
    out.push_back(std::move(z));
  }
  return out;
}

Replicate label_approaching(const Replicate& replicate, double lo_ms, double hi_ms) {
  std::vector<double> onsets;
  for (std::size_t i = 1; i < replicate.samples.size(); ++i) {
    if (replicate.samples[i - 1].contact == 0 && replicate.samples[i].contact == 1) {
      onsets.push_back(replicate.samples[i].t_ms);
    }
  }
  Replicate out{replicate.id, replicate.cut_type, {}};
  for (const SensorSample& s : replicate.samples) {
    if (s.contact == 1) continue;
    // First onset not before t + lo; onsets are sorted.
    auto it = std::lower_bound(onsets.begin(), onsets.end(), s.t_ms + lo_ms);
    SensorSample t = s;
    t.contact = (it != onsets.end() && *it - s.t_ms <= hi_ms) ? 1 : 0;
    out.samples.push_back(t);
  }
  return out;
}

}  // namespace meatcut::contact
