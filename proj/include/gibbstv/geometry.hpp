#ifndef GIBBSTV_GEOMETRY_HPP
#define GIBBSTV_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/matching.hpp"
#include "gibbstv/point_config.hpp"
#include "gibbstv/quadrature.hpp"
#include "gibbstv/window.hpp"

namespace gibbstv {

/// Largest configuration size accepted by the exact d1 assignment.
inline constexpr std::size_t kD1MaxPoints = 64;

/// Normalized matching metric on configurations: 1 if the cardinalities
/// differ, otherwise the optimal assignment of min(d(x_i, y_sigma(i)), 1)
/// divided by the common cardinality.
inline double d1_distance(const Window& w, const PointConfig& xi, const PointConfig& eta) {
  const std::size_t n = xi.size();
  if (n != eta.size()) return 1.0;
  if (n == 0) return 0.0;
  if (n > kD1MaxPoints)
    throw ParameterError("d1_distance: configurations larger than 64 points");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = std::min(w.dist(xi.points[i], eta.points[j]), 1.0);
  return min_assignment_cost(cost, static_cast<int>(n)) / static_cast<double>(n);
}

}  // namespace gibbstv

#endif
