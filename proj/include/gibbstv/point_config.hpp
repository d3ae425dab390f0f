#ifndef GIBBSTV_POINT_CONFIG_HPP
#define GIBBSTV_POINT_CONFIG_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "gibbstv/window.hpp"

namespace gibbstv {

/// Finite point configuration. Points are compared bit-exactly; shared
/// points of two configurations are expected to carry identical coordinates.
struct PointConfig {
  std::vector<Point> points;

  PointConfig() = default;
  explicit PointConfig(std::vector<Point> pts) : points(std::move(pts)) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  PointConfig with(const Point& x) const {
    PointConfig out = *this;
    out.points.push_back(x);
    return out;
  }

  void add(const Point& x) { points.push_back(x); }

  void remove_at(std::size_t i) {
    points[i] = std::move(points.back());
    points.pop_back();
  }
};

inline bool same_point(const Point& a, const Point& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

/// Total variation norm ||xi - eta||: number of points of either multiset
/// that are unmatched in the other. Exact coordinate equality.
inline int symdiff_norm(const PointConfig& xi, const PointConfig& eta) {
  std::vector<bool> used(eta.size(), false);
  int only_xi = 0;
  for (const auto& p : xi.points) {
    bool found = false;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      if (!used[j] && same_point(p, eta.points[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) ++only_xi;
  }
  int only_eta = 0;
  for (std::size_t j = 0; j < eta.size(); ++j)
    if (!used[j]) ++only_eta;
  return only_xi + only_eta;
}

}  // namespace gibbstv

#endif
