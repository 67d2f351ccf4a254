#pragma once

#include <span>
#include <vector>

#include "meatcut/geometry.hpp"

namespace meatcut::planner {

/// Index-synchronized deviation of point `j` from the segment joining points
/// `a` and `c` (a < j < c): distance to the point reached by linear
/// interpolation at parameter (j - a) / (c - a).
double synchronized_distance(std::span<const Vec2> points, std::size_t a, std::size_t j, std::size_t c);

/// SQUISH-E simplification under an error bound.
///
/// Removes the lowest-priority interior point while that priority is at most
/// `bound`. A point's priority is its synchronized distance to its current
/// neighbours plus the largest priority among points already removed next to
/// it, so every removed point stays within `bound` of the output. Ties go to
/// the lower index. Endpoints are always kept. Returns indices into `points`.
std::vector<std::size_t> squish_e_indices(std::span<const Vec2> points, double bound);

Polyline2 squish_e(std::span<const Vec2> points, double bound);

}  // namespace meatcut::planner
