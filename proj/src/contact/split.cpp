#include "meatcut/contact/split.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "meatcut/error.hpp"

namespace meatcut::contact {

void Dataset::push(const SensorSample& s, SampleRef ref) {
  x.push_back(s.features);
  y.push_back(s.contact);
  refs.push_back(ref);
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::SWT: return "SWT";
    case SplitKind::RWT: return "RWT";
    case SplitKind::SAT: return "SAT";
  }
  return "unknown";
}

SplitKind split_kind_from_string(std::string_view name) {
  for (SplitKind k : {SplitKind::SWT, SplitKind::RWT, SplitKind::SAT}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::InvalidArgument, "unknown split kind '" + std::string(name) + "'");
}

namespace {

std::size_t train_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

SplitPart sample_split(std::span<const Replicate> reps, const std::vector<std::uint32_t>& members, std::string label,
                       double fraction, std::mt19937_64& rng) {
  std::vector<SampleRef> refs;
  for (std::uint32_t r : members) {
    for (std::uint32_t s = 0; s < reps[r].samples.size(); ++s) refs.push_back({r, s});
  }
  std::shuffle(refs.begin(), refs.end(), rng);
  const std::size_t n_train = train_count(refs.size(), fraction);
  SplitPart part;
  part.label = std::move(label);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    Dataset& d = i < n_train ? part.train : part.test;
    d.push(reps[refs[i].replicate].samples[refs[i].sample], refs[i]);
  }
  return part;
}

}  // namespace

std::vector<SplitPart> build_split(std::span<const Replicate> replicates, const SplitScheme& scheme) {
  if (!(scheme.train_fraction > 0.0 && scheme.train_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(scheme.seed);
  std::vector<SplitPart> parts;

  if (scheme.kind == SplitKind::SAT) {
    std::vector<std::uint32_t> all(replicates.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    parts.push_back(sample_split(replicates, all, "all", scheme.train_fraction, rng));
    return parts;
  }

  for (CutType type : kCutTypes) {
    std::vector<std::uint32_t> members;
    for (std::uint32_t i = 0; i < replicates.size(); ++i) {
      if (replicates[i].cut_type == type) members.push_back(i);
    }
    if (members.empty()) continue;
    const std::string label(to_string(type));
    if (scheme.kind == SplitKind::SWT) {
      parts.push_back(sample_split(replicates, members, label, scheme.train_fraction, rng));
      continue;
    }
    if (members.size() < 2) {
      throw Error(Errc::InfeasibleSplit, "RWT needs at least 2 " + label + " replicates, found " +
                                             std::to_string(members.size()));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_train = std::clamp<std::size_t>(train_count(members.size(), scheme.train_fraction), 1,
                                                        members.size() - 1);
    SplitPart part;
    part.label = label;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::uint32_t r = members[k];
      const bool train = k < n_train;
      (train ? part.train_replicates : part.test_replicates).push_back(replicates[r].id);
      Dataset& d = train ? part.train : part.test;
      for (std::uint32_t s = 0; s < replicates[r].samples.size(); ++s) d.push(replicates[r].samples[s], {r, s});
    }
    parts.push_back(std::move(part));
  }
  if (parts.empty()) throw Error(Errc::EmptyInput, "no replicates to split");
  return parts;
}

}  // namespace meatcut::contact
