#ifndef GIBBSTV_STATISTICS_HPP
#define GIBBSTV_STATISTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/point_config.hpp"
#include "gibbstv/window.hpp"

namespace gibbstv {

/// A [0,1]-valued configuration statistic. Any such statistic induces a
/// lower estimate of d_TV via |E f(Xi) - E f(H)|; the d2 family additionally
/// requires f to be 1-Lipschitz in the matching metric d1.
struct Statistic {
  std::string name;
  std::function<double(const PointConfig&)> eval;
};

namespace detail {

inline double min_pairwise_dist(const Window& w, const PointConfig& cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j)
      best = std::min(best, w.dist(cfg.points[i], cfg.points[j]));
  return best;
}

/// Registration check: every statistic must map into [0,1] on probe configs.
inline void check_unit_range(const Window& w, const std::vector<Statistic>& stats) {
  std::vector<PointConfig> probes;
  probes.emplace_back();
  PointConfig a;
  a.add(w.center());
  probes.push_back(a);
  PointConfig b = a;
  Point q = w.lower;
  for (int i = 0; i < w.dim; ++i) q[i] += 0.25 * w.edge(i);
  b.add(q);
  b.add(w.center());  // duplicate location exercises zero distances
  probes.push_back(b);
  for (const auto& s : stats)
    for (const auto& p : probes) {
      double v = s.eval(p);
      if (!(v >= 0.0 && v <= 1.0))
        throw ParameterError("statistic '" + s.name + "' leaves [0,1]");
    }
}

}  // namespace detail

/// Total-variation statistic family: count indicators up to a cap, vacancy
/// indicators of the 2^D quadrant boxes, and min-pairwise-distance threshold
/// indicators on the given grid. (The count-law TV itself is evaluated by
/// the estimator as the supremum over count events.)
inline std::vector<Statistic> make_tv_statistics(const Window& w, int count_cap,
                                                 std::vector<double> minpd_grid) {
  std::vector<Statistic> out;
  for (int j = 0; j <= count_cap; ++j)
    out.push_back({"count_eq_" + std::to_string(j),
                   [j](const PointConfig& c) {
                     return c.size() == static_cast<std::size_t>(j) ? 1.0 : 0.0;
                   }});
  const std::size_t quads = std::size_t{1} << w.dim;
  for (std::size_t mask = 0; mask < quads; ++mask) {
    Box b;
    b.lo.resize(w.dim);
    b.hi.resize(w.dim);
    for (int i = 0; i < w.dim; ++i) {
      double mid = 0.5 * (w.lower[i] + w.upper[i]);
      b.lo[i] = (mask >> i) & 1 ? mid : w.lower[i];
      b.hi[i] = (mask >> i) & 1 ? w.upper[i] : mid;
    }
    out.push_back({"quadrant_vacant_" + std::to_string(mask),
                   [b, dim = w.dim](const PointConfig& c) {
                     for (const auto& p : c.points) {
                       bool inside = true;
                       for (int i = 0; i < dim; ++i)
                         if (p[i] < b.lo[i] || p[i] > b.hi[i]) inside = false;
                       if (inside) return 0.0;
                     }
                     return 1.0;
                   }});
  }
  for (double t : minpd_grid)
    out.push_back({"minpd_le_" + std::to_string(t), [w, t](const PointConfig& c) {
                     return detail::min_pairwise_dist(w, c) <= t ? 1.0 : 0.0;
                   }});
  detail::check_unit_range(w, out);
  return out;
}

/// d1-Lipschitz [0,1]-valued family for Wasserstein (d2) lower estimates:
/// count indicators, point-averaged anchor kernels (1/n) sum clamp(1-d(x,a)),
/// and pair-averaged proximity kernels scaled so the d1-Lipschitz constant
/// stays at most 1.
inline std::vector<Statistic> make_d2_statistics(const Window& w, int count_cap,
                                                 std::vector<double> pair_scales) {
  std::vector<Statistic> out;
  for (int j = 0; j <= count_cap; ++j)
    out.push_back({"count_eq_" + std::to_string(j),
                   [j](const PointConfig& c) {
                     return c.size() == static_cast<std::size_t>(j) ? 1.0 : 0.0;
                   }});
  std::vector<Point> anchors{w.center(), w.lower};
  {
    Point q = w.lower;
    for (int i = 0; i < w.dim; ++i) q[i] += 0.75 * w.edge(i);
    anchors.push_back(q);
  }
  for (std::size_t a = 0; a < anchors.size(); ++a)
    out.push_back({"anchor_kernel_" + std::to_string(a),
                   [w, anchor = anchors[a]](const PointConfig& c) {
                     if (c.empty()) return 0.0;
                     double s = 0.0;
                     for (const auto& p : c.points)
                       s += std::max(0.0, 1.0 - w.dist(p, anchor));
                     return s / static_cast<double>(c.size());
                   }});
  for (double t : pair_scales) {
    if (!(t > 0 && t <= 1)) throw ParameterError("pair scale must lie in (0,1]");
    out.push_back({"pair_proximity_" + std::to_string(t),
                   [w, t](const PointConfig& c) {
                     const std::size_t n = c.size();
                     if (n < 2) return 0.0;
                     double s = 0.0;
                     for (std::size_t i = 0; i < n; ++i)
                       for (std::size_t j = i + 1; j < n; ++j)
                         s += std::max(0.0,
                                       1.0 - w.dist(c.points[i], c.points[j]) / t);
                     // mean over pairs, scaled by t/2 to keep the d1-Lipschitz
                     // constant at most one
                     return 0.5 * t * (2.0 * s / (n * (n - 1)));
                   }});
  }
  detail::check_unit_range(w, out);
  return out;
}

}  // namespace gibbstv

#endif
