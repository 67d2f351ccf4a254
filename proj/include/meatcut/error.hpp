#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meatcut {

enum class Errc {
  InsufficientData,
  RankDeficient,
  NoConvergence,
  EmptyInput,
  InvalidArgument,
  SafetyViolation,
  NoMeat,
  AmbiguousMarkers,
  NoInterface,
  InfeasiblePlan,
  DegenerateCut,
  InsufficientPoints,
  Stall,
  Alignment,
  Parse,
  Integrity,
  InfeasibleSplit,
  DegenerateModel,
  Spec,
  Geometry,
  Io,
};

std::string_view to_string(Errc code);

/// Base for every failure raised by the toolkit. `code()` identifies the
/// failure class so callers (CLI, HTTP service) can map it without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace meatcut
