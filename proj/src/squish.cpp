#include "meatcut/squish.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "meatcut/error.hpp"

namespace meatcut::planner {

double synchronized_distance(std::span<const Vec2> points, std::size_t a, std::size_t j, std::size_t c) {
  const double t = static_cast<double>(j - a) / static_cast<double>(c - a);
  const Vec2 expected = points[a] + t * (points[c] - points[a]);
  return distance(points[j], expected);
}

std::vector<std::size_t> squish_e_indices(std::span<const Vec2> points, double bound) {
  if (!(bound >= 0.0)) throw Error(Errc::InvalidArgument, "squish bound must be non-negative");
  const std::size_t n = points.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (n <= 2) return all;

  std::vector<std::size_t> prev(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = i == 0 ? 0 : i - 1;
    next[i] = i + 1;
  }
  std::vector<double> carried(n, 0.0);
  std::vector<double> priority(n, 0.0);
  std::set<std::pair<double, std::size_t>> queue;
  auto refresh = [&](std::size_t i) {
    if (i == 0 || i == n - 1) return;
    queue.erase({priority[i], i});
    priority[i] = carried[i] + synchronized_distance(points, prev[i], i, next[i]);
    queue.insert({priority[i], i});
  };
  for (std::size_t i = 1; i + 1 < n; ++i) refresh(i);

  std::vector<bool> alive(n, true);
  while (!queue.empty() && queue.begin()->first <= bound) {
    const auto [p, j] = *queue.begin();
    queue.erase(queue.begin());
    alive[j] = false;
    const std::size_t a = prev[j];
    const std::size_t c = next[j];
    next[a] = c;
    prev[c] = a;
    carried[a] = std::max(carried[a], p);
    carried[c] = std::max(carried[c], p);
    refresh(a);
    refresh(c);
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) kept.push_back(i);
  }
  return kept;
}

Polyline2 squish_e(std::span<const Vec2> points, double bound) {
  Polyline2 out;
  for (std::size_t i : squish_e_indices(points, bound)) out.push_back(points[i]);
  return out;
}

}  // namespace meatcut::planner
