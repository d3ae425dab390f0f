#ifndef GIBBSTV_MODEL_HPP
#define GIBBSTV_MODEL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gibbstv/ak_event.hpp"
#include "gibbstv/errors.hpp"
#include "gibbstv/point_config.hpp"
#include "gibbstv/quadrature.hpp"
#include "gibbstv/window.hpp"

namespace gibbstv {

/// Activity beta(x): constant, or tabulated on a regular grid of node values
/// with multilinear interpolation.
struct TabulatedField {
  int n_per_dim = 0;                // grid cells per dimension; nodes = n+1
  std::vector<double> node_values;  // (n_per_dim+1)^dim values, row-major

  double at(const Window& w, const Point& x) const {
    const int n = n_per_dim;
    const int d = w.dim;
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int i = 0; i < d; ++i) {
      double t = (x[i] - w.lower[i]) / w.edge(i) * n;
      int b = static_cast<int>(std::floor(t));
      b = std::max(0, std::min(b, n - 1));
      base[i] = b;
      frac[i] = std::min(std::max(t - b, 0.0), 1.0);
    }
    double acc = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      double wgt = 1.0;
      std::size_t idx = 0;
      for (int i = 0; i < d; ++i) {
        bool up = mask & (std::size_t{1} << i);
        wgt *= up ? frac[i] : 1.0 - frac[i];
        idx = idx * (n + 1) + (base[i] + (up ? 1 : 0));
      }
      acc += wgt * node_values[idx];
    }
    return acc;
  }

  double max_value() const {
    double m = node_values[0];
    for (double v : node_values) m = std::max(m, v);
    return m;
  }
};

struct Activity {
  double constant = 1.0;
  std::shared_ptr<const TabulatedField> field;  // non-null overrides constant

  double operator()(const Window& w, const Point& x) const {
    return field ? field->at(w, x) : constant;
  }
  bool is_constant() const { return field == nullptr; }
  double sup() const { return field ? field->max_value() : constant; }

  /// Exact integral over the window (trapezoid rule is exact for
  /// multilinear interpolants).
  double integral(const Window& w) const {
    if (!field) return constant * w.volume();
    const int n = field->n_per_dim;
    const int d = w.dim;
    double total = 0.0;
    std::vector<int> idx(d, 0);
    while (true) {
      double wgt = 1.0;
      for (int i = 0; i < d; ++i)
        if (idx[i] == 0 || idx[i] == n) wgt *= 0.5;
      std::size_t flat = 0;
      for (int i = 0; i < d; ++i) flat = flat * (n + 1) + idx[i];
      total += wgt * field->node_values[flat];
      int i = 0;
      while (i < d && ++idx[i] > n) idx[i++] = 0;
      if (i == d) break;
    }
    return total * w.volume() / std::pow(static_cast<double>(n), d);
  }
};

/// Ruelle stability data (RS): u~(xi) <= c* prod psi*(x_i).
struct RuelleInfo {
  double c_star = 0.0;
  double psi_star = -1.0;  // constant psi*; negative = not provided
  bool provided() const { return psi_star >= 0.0; }
};

/// (UB)/(RC)/(IR) constants of a pairwise interaction.
struct InteractionConstants {
  double C = 1.0;      // (UB) upper bound on phi
  double delta = 0.0;  // (RC) repulsion radius
  double gamma = 1.0;  // (RC) bound on phi inside delta
  double r = 0.0;      // (IR) inner range: phi <= 1 for d <= r
  double R = 0.0;      // (IR) outer range: phi <= 1 for d >  R
};

struct PoissonParams {};

struct StraussParams {
  double gamma;  // in [0,1]
  double R;
};

struct HardCoreStraussParams {
  double delta;  // hard core radius: phi = 0 on [0, delta]
  double gamma;  // on (delta, R]
  double R;
};

struct BiScaleStraussParams {
  double gamma;  // on [0, r]
  double r;
  double R;
  double C;  // on (r, R]
};

struct GenericPipParams {
  std::function<double(double)> phi;  // radial interaction, distances in window metric
  InteractionConstants cons;
  double lipschitz_L = -1.0;  // optional Lipschitz constant of phi
};

struct AreaInteractionParams {
  double gamma;  // in (0,1]
  double R;      // interaction diameter: discs of radius R/2
  double area_rel_tol = 1e-6;
};

struct LennardJonesParams {
  double b;    // inverse temperature
  double rho;  // decay exponent, > dim
  double r;    // inner range of condition (1)
  double R;    // outer range of condition (1)
  double M;    // lower bound: V >= -M
  std::function<double(double)> V;  // empty: classical (R/s)^12 - (R/s)^6
};

class Model;

struct ConditionedParams {
  std::shared_ptr<const Model> base;
  int k = 1;
  double delta = 0.0;
  double envelope_mult = 1.0;  // M_k from Lemma-style bounds
  double gamma_delta = 1.0;    // sup of base phi on [0, delta]
};

using ModelParams =
    std::variant<PoissonParams, StraussParams, HardCoreStraussParams, BiScaleStraussParams,
                 GenericPipParams, AreaInteractionParams, LennardJonesParams,
                 ConditionedParams>;

enum class ModelKind {
  Poisson,
  Strauss,
  HardCoreStrauss,
  BiScaleStrauss,
  GenericPip,
  AreaInteraction,
  LennardJones,
  Conditioned
};

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Poisson: return "poisson";
    case ModelKind::Strauss: return "strauss";
    case ModelKind::HardCoreStrauss: return "hardcore_strauss";
    case ModelKind::BiScaleStrauss: return "bi_scale_strauss";
    case ModelKind::GenericPip: return "pip";
    case ModelKind::AreaInteraction: return "area_interaction";
    case ModelKind::LennardJones: return "lennard_jones";
    case ModelKind::Conditioned: return "conditioned";
  }
  return "?";
}

/// Classical 12-6 pair potential with range parameter R.
inline double lj_classical_potential(double R, double s) {
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  double t = std::pow(R / s, 6.0);
  return t * t - t;
}

class Model {
 public:
  Window window;
  Activity beta;
  ModelParams params;
  RuelleInfo ruelle;

  ModelKind kind() const { return static_cast<ModelKind>(params.index()); }

  template <typename T>
  const T& as() const {
    return std::get<T>(params);
  }

  static Model poisson(Window w, double beta_const) {
    return make(std::move(w), beta_const, PoissonParams{});
  }

  static Model strauss(Window w, double beta_const, double gamma, double R) {
    if (gamma < 0 || gamma > 1) throw ParameterError("strauss: gamma must lie in [0,1]");
    if (R <= 0) throw ParameterError("strauss: R must be positive");
    return make(std::move(w), beta_const, StraussParams{gamma, R});
  }

  static Model hardcore_strauss(Window w, double beta_const, double delta, double gamma,
                                double R) {
    if (delta <= 0 || R < delta) throw ParameterError("hardcore_strauss: need 0 < delta <= R");
    if (gamma < 0 || gamma > 1)
      throw ParameterError("hardcore_strauss: gamma must lie in [0,1]");
    return make(std::move(w), beta_const, HardCoreStraussParams{delta, gamma, R});
  }

  static Model bi_scale_strauss(Window w, double beta_const, double gamma, double r, double R,
                                double C, RuelleInfo ru = {}) {
    if (gamma < 0 || gamma > 1)
      throw ParameterError("bi_scale_strauss: gamma must lie in [0,1]");
    if (!(0 < r && r < R)) throw ParameterError("bi_scale_strauss: need 0 < r < R");
    if (C < 0) throw ParameterError("bi_scale_strauss: C must be nonnegative");
    Model m = make(std::move(w), beta_const, BiScaleStraussParams{gamma, r, R, C});
    m.ruelle = ru;
    return m;
  }

  static Model generic_pip(Window w, double beta_const, std::function<double(double)> phi,
                           InteractionConstants cons, double lipschitz_L = -1.0,
                           RuelleInfo ru = {}) {
    Model m = make(std::move(w), beta_const,
                   GenericPipParams{std::move(phi), cons, lipschitz_L});
    m.ruelle = ru;
    return m;
  }

  static Model area_interaction(Window w, double beta_const, double gamma, double R,
                                double area_rel_tol = 1e-6) {
    if (!(gamma > 0 && gamma <= 1))
      throw ParameterError("area_interaction: gamma must lie in (0,1]");
    if (R <= 0) throw ParameterError("area_interaction: R must be positive");
    if (w.torus)
      throw ParameterError("area_interaction: torus windows are not supported");
    return make(std::move(w), beta_const, AreaInteractionParams{gamma, R, area_rel_tol});
  }

  static Model lennard_jones_classical(Window w, double beta_const, double b, double R) {
    if (b <= 0 || R <= 0) throw ParameterError("lennard_jones: need b > 0 and R > 0");
    // V_R >= -1/4, r = R, rho = 6 (valid for dim 3)
    return make(std::move(w), beta_const,
                LennardJonesParams{b, 6.0, R, R, 0.25, std::function<double(double)>{}});
  }

  static Model lennard_jones(Window w, double beta_const, double b, double rho, double r,
                             double R, double M, std::function<double(double)> V) {
    if (r > R) throw ParameterError("lennard_jones: need r <= R");
    return make(std::move(w), beta_const, LennardJonesParams{b, rho, r, R, M, std::move(V)});
  }

  static Model with_tabulated_beta(Model m, TabulatedField f) {
    m.beta.field = std::make_shared<TabulatedField>(std::move(f));
    return m;
  }

 private:
  static Model make(Window w, double beta_const, ModelParams p) {
    if (beta_const < 0) throw ParameterError("model: beta must be nonnegative");
    Model m;
    m.window = std::move(w);
    m.beta.constant = beta_const;
    m.params = std::move(p);
    return m;
  }
};

// ---------------------------------------------------------------------------
// pairwise interaction access

inline bool is_pip_family(const Model& m) {
  switch (m.kind()) {
    case ModelKind::Strauss:
    case ModelKind::HardCoreStrauss:
    case ModelKind::BiScaleStrauss:
    case ModelKind::GenericPip:
    case ModelKind::LennardJones:
      return true;
    default:
      return false;
  }
}

/// Radial interaction value phi(d). Poisson reads as phi == 1.
inline double pair_phi(const Model& m, double d) {
  switch (m.kind()) {
    case ModelKind::Poisson:
      return 1.0;
    case ModelKind::Strauss: {
      const auto& p = m.as<StraussParams>();
      return d <= p.R ? p.gamma : 1.0;
    }
    case ModelKind::HardCoreStrauss: {
      const auto& p = m.as<HardCoreStraussParams>();
      if (d <= p.delta) return 0.0;
      return d <= p.R ? p.gamma : 1.0;
    }
    case ModelKind::BiScaleStrauss: {
      const auto& p = m.as<BiScaleStraussParams>();
      if (d <= p.r) return p.gamma;
      return d <= p.R ? p.C : 1.0;
    }
    case ModelKind::GenericPip:
      return m.as<GenericPipParams>().phi(d);
    case ModelKind::LennardJones: {
      const auto& p = m.as<LennardJonesParams>();
      double v = p.V ? p.V(d) : lj_classical_potential(p.R, d);
      if (std::isinf(v)) return 0.0;
      return std::exp(-p.b * v);
    }
    case ModelKind::Conditioned:
      return pair_phi(*m.as<ConditionedParams>().base, d);
    default:
      throw ParameterError("pair_phi: model has no pairwise interaction");
  }
}

/// (UB)/(RC)/(IR) constants per kind.
inline InteractionConstants pip_constants(const Model& m) {
  switch (m.kind()) {
    case ModelKind::Strauss: {
      const auto& p = m.as<StraussParams>();
      return {1.0, p.R, p.gamma, p.R, p.R};
    }
    case ModelKind::HardCoreStrauss: {
      const auto& p = m.as<HardCoreStraussParams>();
      return {1.0, p.delta, 0.0, p.R, p.R};
    }
    case ModelKind::BiScaleStrauss: {
      const auto& p = m.as<BiScaleStraussParams>();
      return {std::max(p.C, 1.0), p.r, p.gamma, p.r, p.R};
    }
    case ModelKind::GenericPip:
      return m.as<GenericPipParams>().cons;
    case ModelKind::LennardJones: {
      const auto& p = m.as<LennardJonesParams>();
      // gamma at the repulsion radius r: phi <= exp(-b r^-rho)
      return {std::exp(p.b * p.M), p.r, std::exp(-p.b * std::pow(p.r, -p.rho)), p.r, p.R};
    }
    case ModelKind::Conditioned:
      return pip_constants(*m.as<ConditionedParams>().base);
    default:
      throw ParameterError("pip_constants: not a pairwise interaction model");
  }
}

/// Hard core radius (0 when none): phi vanishes on [0, delta].
inline double hard_core_radius(const Model& m) {
  switch (m.kind()) {
    case ModelKind::Strauss: {
      const auto& p = m.as<StraussParams>();
      return p.gamma == 0.0 ? p.R : 0.0;
    }
    case ModelKind::HardCoreStrauss:
      return m.as<HardCoreStraussParams>().delta;
    case ModelKind::BiScaleStrauss: {
      const auto& p = m.as<BiScaleStraussParams>();
      return p.gamma == 0.0 ? p.r : 0.0;
    }
    case ModelKind::GenericPip: {
      const auto& c = m.as<GenericPipParams>().cons;
      return c.gamma == 0.0 ? c.delta : 0.0;
    }
    case ModelKind::Conditioned:
      return hard_core_radius(*m.as<ConditionedParams>().base);
    default:
      return 0.0;
  }
}

inline bool is_inhibitory(const Model& m) {
  switch (m.kind()) {
    case ModelKind::Poisson:
    case ModelKind::Strauss:
    case ModelKind::HardCoreStrauss:
      return true;
    case ModelKind::BiScaleStrauss:
      return m.as<BiScaleStraussParams>().C <= 1.0;
    case ModelKind::GenericPip:
      return m.as<GenericPipParams>().cons.C <= 1.0;
    case ModelKind::LennardJones:
      return false;
    case ModelKind::AreaInteraction:
      return false;
    case ModelKind::Conditioned:
      return is_inhibitory(*m.as<ConditionedParams>().base);
  }
  return false;
}

// ---------------------------------------------------------------------------
// area-interaction geometry

namespace detail {

/// |B(x, rad) \ union_y B(y, rad)| with balls of R^dim (no window clipping,
/// no torus wrap), by cell classification. Points of `others` farther than
/// 2*rad from x cannot intersect B(x, rad) and are skipped.
template <typename PtRange>
double uncovered_ball_area(const Window& w, const Point& x, double rad,
                           const PtRange& others, double abs_tol) {
  std::vector<const Point*> near;
  for (const auto& pr : others) {
    const Point& p = deref_point(pr);
    double s = 0.0;
    for (int i = 0; i < w.dim; ++i) {
      double d = p[i] - x[i];
      s += d * d;
    }
    if (s < 4.0 * rad * rad) near.push_back(&p);
  }
  const double full = unit_ball_volume(w.dim) * std::pow(rad, w.dim);
  if (near.empty()) return full;

  Box bbox;
  bbox.lo.resize(w.dim);
  bbox.hi.resize(w.dim);
  for (int i = 0; i < w.dim; ++i) {
    bbox.lo[i] = x[i] - rad;
    bbox.hi[i] = x[i] + rad;
  }
  auto euclid_bounds = [&](const Box& cell, const Point& c, double* lo, double* hi) {
    double slo = 0.0, shi = 0.0;
    for (int i = 0; i < w.dim; ++i) {
      double below = c[i] - cell.hi[i];
      double above = cell.lo[i] - c[i];
      double dlo = std::max({below, above, 0.0});
      double dhi = std::max(cell.hi[i] - c[i], c[i] - cell.lo[i]);
      slo += dlo * dlo;
      shi += dhi * dhi;
    }
    *lo = std::sqrt(slo);
    *hi = std::sqrt(shi);
  };
  auto classify = [&](const Box& cell) {
    double lo, hi;
    euclid_bounds(cell, x, &lo, &hi);
    if (lo > rad) return FracClass{CellClass::Outside, 0.0};  // outside B(x, rad)
    double frac = hi <= rad ? 1.0
                            : std::min(1.0, std::max(0.0, (rad - lo) / (hi - lo + 1e-300)));
    bool cut = hi > rad;
    for (const Point* p : near) {
      double plo, phi_;
      euclid_bounds(cell, *p, &plo, &phi_);
      if (phi_ <= rad) return FracClass{CellClass::Outside, 0.0};  // fully covered
      if (plo <= rad) {
        cut = true;
        frac *= std::min(1.0, std::max(0.0, (phi_ - rad) / (phi_ - plo + 1e-300)));
      }
    }
    if (!cut) return FracClass{CellClass::Inside, 1.0};
    return FracClass{CellClass::Ambiguous, frac};
  };
  return measure_classified_smooth(bbox, classify, abs_tol);
}

/// |union_y B(y, rad)| with balls of R^dim, by cell classification over the
/// union's bounding box.
inline double union_ball_area(const Window& w, const std::vector<Point>& pts, double rad,
                              double abs_tol) {
  if (pts.empty()) return 0.0;
  Box bbox;
  bbox.lo = pts[0];
  bbox.hi = pts[0];
  for (const auto& p : pts)
    for (int i = 0; i < w.dim; ++i) {
      bbox.lo[i] = std::min(bbox.lo[i], p[i] - rad);
      bbox.hi[i] = std::max(bbox.hi[i], p[i] + rad);
    }
  auto classify = [&](const Box& cell) {
    double miss = 1.0;  // estimated fraction covered by no ball
    bool any_touch = false;
    for (const auto& p : pts) {
      double slo = 0.0, shi = 0.0;
      for (int i = 0; i < w.dim; ++i) {
        double below = p[i] - cell.hi[i];
        double above = cell.lo[i] - p[i];
        double dlo = std::max({below, above, 0.0});
        double dhi = std::max(cell.hi[i] - p[i], p[i] - cell.lo[i]);
        slo += dlo * dlo;
        shi += dhi * dhi;
      }
      double lo = std::sqrt(slo), hi = std::sqrt(shi);
      if (hi <= rad) return FracClass{CellClass::Inside, 1.0};
      if (lo <= rad) {
        any_touch = true;
        miss *= std::min(1.0, std::max(0.0, (hi - rad) / (hi - lo + 1e-300)));
      }
    }
    if (!any_touch) return FracClass{CellClass::Outside, 0.0};
    return FracClass{CellClass::Ambiguous, 1.0 - miss};
  };
  return measure_classified_smooth(bbox, classify, abs_tol);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conditional intensity, density, envelope

/// lambda(x | xi) for a range of points (Point values or pointers).
template <typename PtRange>
double cond_intensity_range(const Model& m, const Point& x, const PtRange& pts,
                            std::size_t count) {
  switch (m.kind()) {
    case ModelKind::Poisson:
      return m.beta(m.window, x);
    case ModelKind::AreaInteraction: {
      const auto& p = m.as<AreaInteractionParams>();
      const double rad = 0.5 * p.R;
      const double full = unit_ball_volume(m.window.dim) * std::pow(rad, m.window.dim);
      double unc = detail::uncovered_ball_area(m.window, x, rad, pts,
                                               p.area_rel_tol * full);
      return m.beta(m.window, x) * std::pow(p.gamma, -unc);
    }
    case ModelKind::Conditioned: {
      // lambda_A(x|xi) = lambda(x|xi) 1{xi + d_x in A_k}: a violation either
      // involves x or sits inside xi already
      const auto& c = m.as<ConditionedParams>();
      if (!ak_admits_point(m.window, pts, x, c.k, c.delta)) return 0.0;
      if (!in_ak_range(m.window, pts, c.k, c.delta)) return 0.0;
      return cond_intensity_range(*c.base, x, pts, count);
    }
    default: {
      // pairwise interaction family
      const double b = m.beta(m.window, x);
      if (b == 0.0) return 0.0;
      // 0/0 = 0 convention: u~(xi) = 0 forces lambda = 0; for these radial
      // families only a hard core can zero the density
      double hc = hard_core_radius(m);
      if (hc > 0.0) {
        std::vector<const Point*> all;
        for (const auto& pr : pts) all.push_back(&deref_point(pr));
        for (std::size_t i = 0; i < all.size(); ++i)
          for (std::size_t j = i + 1; j < all.size(); ++j)
            if (m.window.dist_sq(*all[i], *all[j]) <= hc * hc) return 0.0;
      }
      if (count <= 32) {
        double prod = 1.0;
        for (const auto& pr : pts) {
          double f = pair_phi(m, m.window.dist(x, deref_point(pr)));
          if (f == 0.0) return 0.0;
          prod *= f;
        }
        return b * prod;
      }
      double logsum = 0.0;  // log-space for long products
      for (const auto& pr : pts) {
        double f = pair_phi(m, m.window.dist(x, deref_point(pr)));
        if (f == 0.0) return 0.0;
        logsum += std::log(f);
      }
      return b * std::exp(logsum);
    }
  }
}

inline double cond_intensity(const Model& m, const Point& x, const PointConfig& xi) {
  return cond_intensity_range(m, x, xi.points, xi.size());
}

/// Unnormalized hereditary density u~(xi).
inline double unnormalized_density(const Model& m, const PointConfig& xi) {
  const std::size_t n = xi.size();
  switch (m.kind()) {
    case ModelKind::Poisson: {
      double prod = 1.0;
      for (const auto& p : xi.points) prod *= m.beta(m.window, p);
      return prod;
    }
    case ModelKind::AreaInteraction: {
      const auto& p = m.as<AreaInteractionParams>();
      const double rad = 0.5 * p.R;
      const double full = unit_ball_volume(m.window.dim) * std::pow(rad, m.window.dim);
      double area = detail::union_ball_area(m.window, xi.points, rad,
                                            p.area_rel_tol * full * std::max<double>(n, 1));
      double prod = 1.0;
      for (const auto& q : xi.points) prod *= m.beta(m.window, q);
      return prod * std::pow(p.gamma, -area);
    }
    case ModelKind::Conditioned: {
      const auto& c = m.as<ConditionedParams>();
      if (!in_ak(m.window, xi.points, c.k, c.delta)) return 0.0;
      return unnormalized_density(*c.base, xi);
    }
    default: {
      bool log_space = n > 32;
      double prod = 1.0, logsum = 0.0;
      for (const auto& p : xi.points) {
        double b = m.beta(m.window, p);
        if (b == 0.0) return 0.0;
        if (log_space)
          logsum += std::log(b);
        else
          prod *= b;
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double f = pair_phi(m, m.window.dist(xi.points[i], xi.points[j]));
          if (f == 0.0) return 0.0;
          if (log_space)
            logsum += std::log(f);
          else
            prod *= f;
        }
      return log_space ? std::exp(logsum) : prod;
    }
  }
}

/// Exponent bound used в Lemma-style envelopes: maximal number of points of
/// an A_k configuration in the annulus A(x, r, R), bounded by m*k with
///   m = alpha_D D^{D/2} ((R/delta+1)^D - (r/delta-1)^D) 1{r < R}.
inline double ak_annulus_count_bound(int dim, double delta, double r, double R) {
  if (!(r < R)) return 0.0;
  double lo = std::max(r / delta - 1.0, 0.0);
  return unit_ball_volume(dim) * std::pow(static_cast<double>(dim), 0.5 * dim) *
         (std::pow(R / delta + 1.0, dim) - std::pow(lo, dim));
}

/// M_k = exp(b k (m M + alpha_D D/(rho-D) (sqrt(D)/delta)^D
///              (R-delta)^{D-1} / (R-2 delta)^{rho-1}))  [Lennard-Jones kinds]
inline double lj_envelope_mult(int dim, const LennardJonesParams& p, int k, double delta) {
  double m = ak_annulus_count_bound(dim, delta, p.r, p.R);
  double tail = unit_ball_volume(dim) * dim / (p.rho - dim) *
                std::pow(std::sqrt(static_cast<double>(dim)) / delta, dim) *
                std::pow(p.R - delta, dim - 1) / std::pow(p.R - 2.0 * delta, p.rho - 1.0);
  return std::exp(p.b * k * (m * p.M + tail));
}

/// Constant factor psi*(x) / beta(x) of the local-stability envelope.
inline double envelope_multiplier(const Model& m) {
  switch (m.kind()) {
    case ModelKind::Poisson:
    case ModelKind::Strauss:
    case ModelKind::HardCoreStrauss:
      return 1.0;
    case ModelKind::BiScaleStrauss:
      if (m.as<BiScaleStraussParams>().C <= 1.0) return 1.0;
      throw StabilityError(
          "bi-scale Strauss with C > 1 has no finite envelope; use restrict_to_Ak");
    case ModelKind::GenericPip:
      if (m.as<GenericPipParams>().cons.C <= 1.0) return 1.0;
      throw StabilityError("non-inhibitory PIP has no finite envelope; use restrict_to_Ak");
    case ModelKind::AreaInteraction: {
      const auto& p = m.as<AreaInteractionParams>();
      double full = unit_ball_volume(m.window.dim) * std::pow(0.5 * p.R, m.window.dim);
      return std::pow(p.gamma, -full);
    }
    case ModelKind::LennardJones:
      throw StabilityError(
          "Lennard-Jones processes have no finite envelope; use restrict_to_Ak");
    case ModelKind::Conditioned:
      return m.as<ConditionedParams>().envelope_mult;
  }
  throw ParameterError("envelope: unknown kind");
}

/// Local-stability envelope psi*(x) >= sup_xi lambda(x | xi).
inline double envelope(const Model& m, const Point& x) {
  return m.beta(m.window, x) * envelope_multiplier(m);
}

inline double envelope_sup(const Model& m) {
  return m.beta.sup() * envelope_multiplier(m);
}

/// Conditioning on A_k (at most k points in every ball of radius delta/2).
inline Model restrict_to_Ak(const Model& m, int k, double delta) {
  if (k < 1) throw ParameterError("restrict_to_Ak: k must be >= 1");
  if (delta <= 0) throw ParameterError("restrict_to_Ak: delta must be positive");
  double mult = 1.0;
  double gamma_delta = 1.0;
  switch (m.kind()) {
    case ModelKind::Poisson:
      mult = 1.0;
      gamma_delta = 1.0;
      break;
    case ModelKind::LennardJones: {
      const auto& p = m.as<LennardJonesParams>();
      if (delta > p.r || delta >= 0.5 * p.R)
        throw ParameterError("restrict_to_Ak: Lennard-Jones requires delta <= r and delta < R/2");
      mult = lj_envelope_mult(m.window.dim, p, k, delta);
      gamma_delta = std::exp(-p.b * std::pow(delta, -p.rho));
      break;
    }
    case ModelKind::Strauss:
    case ModelKind::HardCoreStrauss:
    case ModelKind::BiScaleStrauss:
    case ModelKind::GenericPip: {
      auto cons = pip_constants(m);
      if (delta > cons.r)
        throw ParameterError("restrict_to_Ak: delta must not exceed the inner range r");
      double mk = ak_annulus_count_bound(m.window.dim, delta, cons.r, cons.R) * k;
      mult = std::pow(std::max(cons.C, 1.0), mk);
      gamma_delta = delta <= cons.delta ? cons.gamma : pair_phi(m, delta);
      // piecewise-constant kinds: phi on [0,delta] is bounded by its value at delta
      // and at 0+; take the max of sampled plateau values
      gamma_delta = std::max(gamma_delta, pair_phi(m, 0.5 * delta));
      break;
    }
    case ModelKind::AreaInteraction:
    case ModelKind::Conditioned:
      throw ParameterError("restrict_to_Ak: base model must be Poisson, a PIP, or Lennard-Jones");
  }
  Model out;
  out.window = m.window;
  out.beta = m.beta;
  out.ruelle = m.ruelle;
  out.params = ConditionedParams{std::make_shared<Model>(m), k, delta, mult, gamma_delta};
  return out;
}

// ---------------------------------------------------------------------------
// validation

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> violations;
  void fail(std::string msg) {
    pass = false;
    violations.push_back(std::move(msg));
  }
};

/// Grid-sampled validation of the stability/interaction conditions. The
/// paper's conditions quantify over all of X; a user-supplied phi violating
/// them strictly between grid points is not caught here.
inline ValidationReport validate(const Model& m) {
  ValidationReport rep;
  if (m.beta.sup() < 0) rep.fail("beta must be nonnegative");
  switch (m.kind()) {
    case ModelKind::Poisson:
      break;
    case ModelKind::Strauss: {
      const auto& p = m.as<StraussParams>();
      if (p.gamma < 0 || p.gamma > 1) rep.fail("strauss: gamma outside [0,1]");
      if (p.R <= 0) rep.fail("strauss: R <= 0");
      break;
    }
    case ModelKind::HardCoreStrauss: {
      const auto& p = m.as<HardCoreStraussParams>();
      if (p.gamma < 0 || p.gamma > 1) rep.fail("hardcore_strauss: gamma outside [0,1]");
      if (!(0 < p.delta && p.delta <= p.R)) rep.fail("hardcore_strauss: need 0 < delta <= R");
      break;
    }
    case ModelKind::BiScaleStrauss: {
      const auto& p = m.as<BiScaleStraussParams>();
      if (p.gamma < 0 || p.gamma > 1) rep.fail("bi_scale_strauss: gamma outside [0,1]");
      if (!(0 < p.r && p.r < p.R)) rep.fail("bi_scale_strauss: need 0 < r < R");
      if (p.C > 1.0 && p.gamma > 0.0) {
        // Ruelle criterion of Example msstrauss: C <= gamma^(-1/(2m))
        double mm = unit_ball_volume(m.window.dim) *
                    std::pow(static_cast<double>(m.window.dim), 0.5 * m.window.dim) *
                    std::pow(p.R / p.r + 1.0, m.window.dim);
        double cap = std::pow(p.gamma, -1.0 / (2.0 * mm));
        if (p.C > cap)
          rep.fail("bi_scale_strauss: Ruelle criterion C <= gamma^(-1/(2m)) violated");
      }
      break;
    }
    case ModelKind::GenericPip: {
      const auto& p = m.as<GenericPipParams>();
      const auto& c = p.cons;
      if (!(c.delta <= c.r && c.r <= c.R)) rep.fail("pip: need delta <= r <= R");
      if (c.gamma < 0 || c.gamma > 1) rep.fail("pip: gamma outside [0,1]");
      const double dmax = m.window.diameter();
      for (int i = 0; i <= 200; ++i) {
        double d = dmax * i / 200.0;
        double v = p.phi(d);
        if (v < 0) rep.fail("pip: phi < 0 at d=" + std::to_string(d));
        if (v > c.C * (1 + 1e-12)) rep.fail("pip: phi > C at d=" + std::to_string(d));
        if (d <= c.delta && v > c.gamma * (1 + 1e-12))
          rep.fail("pip: phi > gamma inside delta at d=" + std::to_string(d));
        if ((d <= c.r || d > c.R) && v > 1 + 1e-12)
          rep.fail("pip: phi > 1 inside r or beyond R at d=" + std::to_string(d));
        if (!rep.pass && rep.violations.size() > 8) break;
      }
      break;
    }
    case ModelKind::AreaInteraction: {
      const auto& p = m.as<AreaInteractionParams>();
      if (!(p.gamma > 0 && p.gamma <= 1)) rep.fail("area_interaction: gamma outside (0,1]");
      if (p.R <= 0) rep.fail("area_interaction: R <= 0");
      break;
    }
    case ModelKind::LennardJones: {
      const auto& p = m.as<LennardJonesParams>();
      if (p.rho <= m.window.dim) rep.fail("lennard_jones: need rho > dim");
      if (p.r > p.R) rep.fail("lennard_jones: need r <= R");
      const double dmax = m.window.diameter();
      for (int i = 1; i <= 200; ++i) {
        double d = dmax * i / 200.0;
        double v = p.V ? p.V(d) : lj_classical_potential(p.R, d);
        if (v < -p.M - 1e-12) {
          rep.fail("lennard_jones: V < -M at d=" + std::to_string(d));
          break;
        }
      }
      break;
    }
    case ModelKind::Conditioned: {
      const auto& c = m.as<ConditionedParams>();
      if (c.k < 1) rep.fail("conditioned: k < 1");
      if (c.delta <= 0) rep.fail("conditioned: delta <= 0");
      auto base_rep = validate(*c.base);
      for (auto& v : base_rep.violations) rep.fail("base: " + v);
      break;
    }
  }
  // symmetry of the radial interaction is structural; for generic phi check
  // a few sampled pairs through the metric
  return rep;
}

}  // namespace gibbstv

#endif
