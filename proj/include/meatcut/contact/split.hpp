#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meatcut/contact/sensor.hpp"

namespace meatcut::contact {

/// Row provenance: index of the replicate in the input span and of the sample
/// within it.
struct SampleRef {
  std::uint32_t replicate = 0;
  std::uint32_t sample = 0;
  friend auto operator<=>(const SampleRef&, const SampleRef&) = default;
};

struct Dataset {
  std::vector<Features> x;
  std::vector<int> y;
  std::vector<SampleRef> refs;

  std::size_t size() const { return y.size(); }
  bool empty() const { return y.empty(); }
  void push(const SensorSample& s, SampleRef ref);
};

enum class SplitKind { SWT, RWT, SAT };

std::string_view to_string(SplitKind kind);
SplitKind split_kind_from_string(std::string_view name);

struct SplitScheme {
  SplitKind kind = SplitKind::SWT;
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
};

struct SplitPart {
  std::string label;  ///< cut type name, or "all" for SAT
  Dataset train;
  Dataset test;
  std::vector<std::string> train_replicates;  ///< RWT only
  std::vector<std::string> test_replicates;   ///< RWT only
};

/// SWT: per cut type, pooled samples shuffled and split. SAT: every sample
/// pooled, one part. RWT: per cut type, whole replicates assigned, with
/// round(f*n) clamped to [1, n-1] for training. Throws Errc::InfeasibleSplit
/// when an RWT cut type has fewer than 2 replicates, Errc::InvalidArgument for
/// a fraction outside (0, 1).
std::vector<SplitPart> build_split(std::span<const Replicate> replicates, const SplitScheme& scheme);

}  // namespace meatcut::contact
