#ifndef GIBBSTV_AK_EVENT_HPP
#define GIBBSTV_AK_EVENT_HPP

#include <cstddef>
#include <vector>

#include "gibbstv/miniball.hpp"
#include "gibbstv/point_config.hpp"
#include "gibbstv/window.hpp"

namespace gibbstv {

/// Subset-enumeration cap for the exact A_k test; beyond it a conservative
/// covering test is used (may reject configurations that are actually in A_k,
/// never the other way around).
inline constexpr long kAkSubsetCap = 10'000;

inline const Point& deref_point(const Point& p) { return p; }
inline const Point& deref_point(const Point* p) { return *p; }

namespace detail {

/// Lift points near `anchor` into the chart of R^D where the anchor lives:
/// each coordinate is shifted by a window period so it is the nearest image.
/// Valid for clusters of diameter below half the shortest edge, which is the
/// regime in which the A_k test is meaningful.
inline Point lift_to_chart(const Window& w, const Point& anchor, const Point& p) {
  if (!w.torus) return p;
  Point out = p;
  for (int i = 0; i < w.dim; ++i) {
    double L = w.edge(i);
    double d = p[i] - anchor[i];
    if (d > 0.5 * L)
      out[i] -= L;
    else if (d < -0.5 * L)
      out[i] += L;
  }
  return out;
}

/// Does some (k+1)-subset of `cluster` (Euclidean, already lifted) with
/// pairwise distances <= delta fit in a closed ball of radius delta/2?
/// `cluster` must contain the candidate point at index 0 and all its
/// delta-neighbours. Enumerates cliques of size k+1 containing index 0.
inline bool cluster_violates(const std::vector<Point>& cluster, int dim, int k,
                             double delta, long* budget) {
  const std::size_t n = cluster.size();
  if (n < static_cast<std::size_t>(k) + 1) return false;
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        double df = cluster[i][d] - cluster[j][d];
        s += df * df;
      }
      adj[i][j] = adj[j][i] = (s <= delta * delta);
    }
  // depth-first enumeration of (k+1)-cliques containing the anchor index 0
  std::vector<std::size_t> chosen{0};
  std::vector<Point> sub;
  bool violates = false;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (violates) return;
    if (chosen.size() == static_cast<std::size_t>(k) + 1) {
      if (--(*budget) < 0) {
        violates = true;  // conservative: treat as violation
        return;
      }
      sub.clear();
      for (auto idx : chosen) sub.push_back(cluster[idx]);
      if (miniball_radius(sub, dim) <= 0.5 * delta * (1 + 1e-12)) violates = true;
      return;
    }
    for (std::size_t cand = start; cand < n && !violates; ++cand) {
      bool ok = true;
      for (auto idx : chosen)
        if (!adj[idx][cand]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      chosen.push_back(cand);
      self(self, cand + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 1);
  return violates;
}

}  // namespace detail

/// Would the configuration consisting of `pts` plus `x` still lie in
///   A_k = { xi : every closed ball of radius delta/2 holds <= k points }?
/// Assumes `pts` itself is in A_k, so any violation must involve x.
/// Exact for k = 1; for k >= 2 exact via smallest-enclosing-ball radii of
/// (k+1)-cliques up to the subset cap, conservative beyond it.
template <typename PtRange>
bool ak_admits_point(const Window& w, const PtRange& pts, const Point& x, int k,
                     double delta) {
  std::vector<Point> cluster{x};
  for (const auto& pref : pts) {
    const Point& p = deref_point(pref);
    if (w.dist_sq(p, x) <= delta * delta) cluster.push_back(detail::lift_to_chart(w, x, p));
  }
  if (cluster.size() <= static_cast<std::size_t>(k)) return true;
  if (k == 1) return cluster.size() <= 1;
  long budget = kAkSubsetCap;
  return !detail::cluster_violates(cluster, w.dim, k, delta, &budget);
}

/// Full membership test for a point range (no admissibility assumption).
/// Quick acceptance: if every point has at most k-1 delta-neighbours, no
/// delta/2 ball can hold k+1 points; only suspicious points need the exact
/// clique/miniball treatment.
template <typename PtRange>
bool in_ak_range(const Window& w, const PtRange& pts, int k, double delta) {
  std::vector<const Point*> all;
  for (const auto& pr : pts) all.push_back(&deref_point(pr));
  const std::size_t n = all.size();
  if (n <= static_cast<std::size_t>(k)) return true;
  std::vector<const Point*> rest;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t neighbours = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && w.dist_sq(*all[i], *all[j]) <= delta * delta) ++neighbours;
    if (neighbours + 1 <= static_cast<std::size_t>(k)) continue;
    rest.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest.push_back(all[j]);
    if (!ak_admits_point(w, rest, *all[i], k, delta)) return false;
  }
  return true;
}

/// Full membership test xi in A_k (no admissibility assumption).
inline bool in_ak(const Window& w, const std::vector<Point>& pts, int k, double delta) {
  return in_ak_range(w, pts, k, delta);
}

}  // namespace gibbstv

#endif
