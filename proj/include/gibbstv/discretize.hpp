#ifndef GIBBSTV_DISCRETIZE_HPP
#define GIBBSTV_DISCRETIZE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "gibbstv/bounds.hpp"
#include "gibbstv/errors.hpp"
#include "gibbstv/model.hpp"
#include "gibbstv/rng.hpp"

namespace gibbstv {

/// Regular grid partition of the window: n_per_dim^dim congruent cells with
/// centers at the cell midpoints. r_V is the cell half-diagonal, the largest
/// distance from any point of a cell to its center.
struct Partition {
  Window window;
  int n_per_dim = 1;
  double r_V = 0.0;

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (int i = 0; i < window.dim; ++i) n *= static_cast<std::size_t>(n_per_dim);
    return n;
  }

  double cell_volume() const { return window.volume() / static_cast<double>(cell_count()); }

  Point center(std::size_t idx) const {
    Point c(window.dim);
    for (int i = window.dim - 1; i >= 0; --i) {
      std::size_t coord = idx % n_per_dim;
      idx /= n_per_dim;
      c[i] = window.lower[i] + (coord + 0.5) * window.edge(i) / n_per_dim;
    }
    return c;
  }

  Box cell_box(std::size_t idx) const {
    Box b;
    b.lo.resize(window.dim);
    b.hi.resize(window.dim);
    for (int i = window.dim - 1; i >= 0; --i) {
      std::size_t coord = idx % n_per_dim;
      idx /= n_per_dim;
      b.lo[i] = window.lower[i] + coord * window.edge(i) / n_per_dim;
      b.hi[i] = window.lower[i] + (coord + 1) * window.edge(i) / n_per_dim;
    }
    return b;
  }

  std::size_t locate(const Point& p) const {
    std::size_t idx = 0;
    for (int i = 0; i < window.dim; ++i) {
      double t = (p[i] - window.lower[i]) / window.edge(i) * n_per_dim;
      long c = static_cast<long>(std::floor(t));
      c = std::max(0L, std::min(c, static_cast<long>(n_per_dim) - 1));
      idx = idx * n_per_dim + static_cast<std::size_t>(c);
    }
    return idx;
  }
};

inline Partition build_grid_partition(const Window& w, int n_per_dim) {
  if (n_per_dim < 1) throw ParameterError("build_grid_partition: n_per_dim must be >= 1");
  Partition p;
  p.window = w;
  p.n_per_dim = n_per_dim;
  double s = 0.0;
  for (int i = 0; i < w.dim; ++i) {
    double half = 0.5 * w.edge(i) / n_per_dim;
    s += half * half;
  }
  p.r_V = std::sqrt(s);
  return p;
}

/// Lattice configuration: point count per cell index.
using LatticeConfig = std::vector<int>;

/// t(xi): each point replaced by its cell center (counts per center).
inline LatticeConfig project(const Partition& p, const PointConfig& xi) {
  LatticeConfig counts(p.cell_count(), 0);
  for (const auto& pt : xi.points) ++counts[p.locate(pt)];
  return counts;
}

/// Each lattice point replaced by an independent uniform draw in its cell.
inline PointConfig randomize(const Partition& p, const LatticeConfig& counts,
                             std::uint64_t seed) {
  CounterRng rng(seed);
  PointConfig out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    Box b = p.cell_box(i);
    for (int c = 0; c < counts[i]; ++c) {
      Point x(p.window.dim);
      for (int d = 0; d < p.window.dim; ++d) x[d] = rng.uniform(b.lo[d], b.hi[d]);
      out.add(std::move(x));
    }
  }
  return out;
}

/// Lattice configuration as a point configuration at the cell centers.
inline PointConfig lattice_points(const Partition& p, const LatticeConfig& counts) {
  PointConfig out;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (int c = 0; c < counts[i]; ++c) out.add(p.center(i));
  return out;
}

/// Equilibrium samples of the discrete analogon Xi_Lambda of an inhibitory
/// constant-activity model: the finite-state SBDP with birth rate
/// lambda(y_i | xi) alpha(V_i) at vacant sites and unit per-capita deaths
/// (at most one point per cell, the Bernoulli convention), realized by
/// thinning against beta alpha(V_i).
inline std::vector<LatticeConfig> sample_lattice_equilibrium(const Partition& p,
                                                             const Model& m, double burn_in,
                                                             long n, double spacing,
                                                             std::uint64_t seed) {
  if (!m.beta.is_constant())
    throw ParameterError("sample_lattice_equilibrium: constant beta required");
  if (!(is_pip_family(m) && is_inhibitory(m)) && m.kind() != ModelKind::Poisson)
    throw ParameterError("sample_lattice_equilibrium: inhibitory PIP required");
  const double beta = m.beta.constant;
  const std::size_t cells = p.cell_count();
  const double birth_rate = beta * p.window.volume();
  CounterRng rng(seed);

  std::vector<char> occ(cells, 0);
  std::vector<std::size_t> occupied;          // site indices
  std::vector<Point> centers;                 // centers of occupied sites (parallel)
  std::vector<const Point*> view;
  std::vector<LatticeConfig> out;
  if (n <= 0) return out;

  double t = 0.0;
  double next_sample = burn_in;
  long taken = 0;
  auto snapshot = [&]() {
    LatticeConfig cfg(cells, 0);
    for (auto i : occupied) cfg[i] = 1;
    return cfg;
  };
  while (taken < n) {
    double rate = birth_rate + static_cast<double>(occupied.size());
    double dt = rng.exponential(rate);
    while (taken < n && t + dt > next_sample) {
      out.push_back(snapshot());
      ++taken;
      next_sample += spacing;
    }
    if (taken >= n) break;
    t += dt;
    if (rng.uniform() < birth_rate / rate) {
      std::size_t site = rng.uniform_index(cells);
      if (occ[site]) continue;  // the Bernoulli convention kills multi-points
      Point y = p.center(site);
      view.clear();
      for (const auto& c : centers) view.push_back(&c);
      double lam = cond_intensity_range(m, y, view, view.size());
      if (rng.uniform() < lam / beta) {
        occ[site] = 1;
        occupied.push_back(site);
        centers.push_back(std::move(y));
      }
    } else if (!occupied.empty()) {
      std::size_t j = rng.uniform_index(occupied.size());
      occ[occupied[j]] = 0;
      occupied[j] = occupied.back();
      occupied.pop_back();
      centers[j] = std::move(centers.back());
      centers.pop_back();
    }
  }
  return out;
}

/// d_2 bound between the discrete analogon Xi_Lambda and the continuous Xi:
///   r_V + c1(lambda) E|Xi_U| beta sup_y int |phi(t(x),t(y)) - phi(x,y)| dx,
/// with the sup-integral in closed form for Strauss interactions and via
/// 2 L alpha(X) r_V for Lipschitz interactions.
inline BoundReport d2_bound_discrete(const Model& m, const Partition& p, IntensityMode mode,
                                     const McInputs& mc = {},
                                     const std::vector<LatticeConfig>* lattice_samples =
                                         nullptr) {
  if (!m.beta.is_constant())
    throw ParameterError("d2_bound_discrete: constant beta required");
  bool inhib = (is_pip_family(m) && is_inhibitory(m)) || m.kind() == ModelKind::Poisson;
  if (!inhib) throw ParameterError("d2_bound_discrete: inhibitory PIP required");

  BoundReport rep;
  rep.theorem_id = "d2_discrete";
  rep.intensity_mode = to_string(mode);
  rep.stein = stein_params_for(m);
  const double beta = m.beta.constant;
  const double rv = p.r_V;
  const Window& w = m.window;

  double sup_integral;
  if (m.kind() == ModelKind::Strauss) {
    const auto& pr = m.as<StraussParams>();
    // phi(t(x), t(y)) and phi(x, y) differ only in the annulus
    // A(y, R - 2 r_V, R + 2 r_V), and there at most by (1 - gamma)
    double outer = detail::sup_ball_measure(w, pr.R + 2.0 * rv);
    double inner = detail::sup_ball_measure(w, std::max(pr.R - 2.0 * rv, 0.0));
    double annulus = outer - inner;
    double euclid = 4.0 * unit_ball_volume(w.dim) * w.dim *
                    std::pow(pr.R + 2.0 * rv, w.dim - 1) * rv;
    rep.intermediates["annulus_measure"] = annulus;
    rep.intermediates["annulus_euclid_bound"] = euclid;
    sup_integral = (1.0 - pr.gamma) * std::min(annulus, euclid);
  } else if (m.kind() == ModelKind::GenericPip &&
             m.as<GenericPipParams>().lipschitz_L >= 0.0) {
    double L = m.as<GenericPipParams>().lipschitz_L;
    sup_integral = 2.0 * L * w.volume() * rv;
    rep.intermediates["lipschitz_L"] = L;
  } else if (m.kind() == ModelKind::Poisson) {
    sup_integral = 0.0;
  } else {
    throw ParameterError(
        "d2_bound_discrete: interaction must be Strauss-type or Lipschitz with supplied L");
  }

  double count_used;
  if (mode == IntensityMode::MonteCarlo && lattice_samples && !lattice_samples->empty()) {
    double s = 0, s2 = 0;
    for (const auto& cfg : *lattice_samples) {
      double cnt = 0;
      for (int c : cfg) cnt += c;
      s += cnt;
      s2 += cnt * cnt;
    }
    double mean = s / lattice_samples->size();
    double se = std::sqrt(std::max(s2 / lattice_samples->size() - mean * mean, 0.0) /
                          lattice_samples->size());
    count_used = mean + 3.0 * se;
    rep.intermediates["E_count_mean"] = mean;
    rep.intermediates["E_count_se"] = se;
  } else {
    count_used = beta * w.volume();
    (void)mc;
  }

  rep.intermediates["r_V"] = rv;
  rep.intermediates["sup_integral"] = sup_integral;
  rep.intermediates["E_count_used"] = count_used;
  rep.finish(rv + rep.stein.c1 * count_used * beta * sup_integral);
  return rep;
}

}  // namespace gibbstv

#endif
