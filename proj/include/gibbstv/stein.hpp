#ifndef GIBBSTV_STEIN_HPP
#define GIBBSTV_STEIN_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/model.hpp"
#include "gibbstv/rng.hpp"

namespace gibbstv {

inline constexpr double kNStarInfinity = std::numeric_limits<double>::infinity();

struct SteinParams {
  double eps = 0.0;
  double c = 0.0;
  double nstar = 1.0;  // kNStarInfinity for the eps-only regime
  double c1 = 1.0;
  double truncation_error = 0.0;
};

namespace detail {

/// sup over y on a refining deterministic grid, until relatively stable.
template <typename F>
double grid_sup(const Window& w, const F& f, double rel_tol = 1e-4, int max_level = 6) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int level = 2; level <= max_level; ++level) {
    int n = 1 << level;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(w.dim, 0);
    while (true) {
      Point y(w.dim);
      for (int i = 0; i < w.dim; ++i)
        y[i] = w.lower[i] + (idx[i] + 0.5) * w.edge(i) / n;
      best = std::max(best, f(y));
      int i = 0;
      while (i < w.dim && ++idx[i] == n) idx[i++] = 0;
      if (i == w.dim) break;
    }
    if (prev > -std::numeric_limits<double>::infinity() &&
        std::fabs(best - prev) <= rel_tol * std::max(std::fabs(best), 1e-12))
      return best;
    prev = best;
  }
  return prev;
}

/// Largest measure a ball of radius rho can cut out of the window.
inline double sup_ball_measure(const Window& w, double rho) {
  if (rho <= 0) return 0.0;
  if (w.torus) return ball_measure(w, w.center(), rho, 1e-9 * w.volume() + 1e-12);
  if (2.0 * rho <= w.min_edge())
    return unit_ball_volume(w.dim) * std::pow(rho, w.dim);
  return grid_sup(w, [&](const Point& y) { return ball_measure(w, y, rho, 1e-6); });
}

/// Radial integral  surface(D) * int_a^b f(s) s^{D-1} ds  by adaptive 1-D
/// midpoint refinement (f bounded, piecewise smooth).
template <typename F>
double radial_integral(int dim, const F& f, double a, double b, double tol) {
  Box seg{Point{a}, Point{b}};
  auto g = [&](const Point& s) { return f(s[0]) * std::pow(s[0], dim - 1); };
  double surface = dim * unit_ball_volume(dim);
  return surface * integrate_box(g, seg, tol / surface).value;
}

}  // namespace detail

/// eps = sup_{||xi-eta||=1} int |lambda(x|xi) - lambda(x|eta)| dalpha(x),
/// via the model-specific closed forms.
inline double stein_eps(const Model& h) {
  switch (h.kind()) {
    case ModelKind::Poisson:
      return 0.0;
    case ModelKind::Strauss: {
      const auto& p = h.as<StraussParams>();
      return h.beta.sup() * (1.0 - p.gamma) * detail::sup_ball_measure(h.window, p.R);
    }
    case ModelKind::HardCoreStrauss: {
      const auto& p = h.as<HardCoreStraussParams>();
      double inner = detail::sup_ball_measure(h.window, p.delta);
      double outer = detail::sup_ball_measure(h.window, p.R);
      return h.beta.sup() * (inner + (1.0 - p.gamma) * (outer - inner));
    }
    case ModelKind::BiScaleStrauss: {
      const auto& p = h.as<BiScaleStraussParams>();
      if (p.C > 1.0)
        throw StabilityError("stein_eps: non-inhibitory PIP; use restrict_to_Ak first");
      double br = detail::sup_ball_measure(h.window, p.r);
      double bR = detail::sup_ball_measure(h.window, p.R);
      return h.beta.sup() * ((1.0 - p.gamma) * br + (1.0 - p.C) * (bR - br));
    }
    case ModelKind::GenericPip: {
      const auto& p = h.as<GenericPipParams>();
      if (p.cons.C > 1.0)
        throw StabilityError("stein_eps: non-inhibitory PIP; use restrict_to_Ak first");
      if (h.beta.is_constant()) {
        // isotropic phi: integral over the largest ball the window allows
        double beta = h.beta.constant;
        double dmax = h.window.diameter();
        return beta * detail::radial_integral(
                          h.window.dim, [&](double s) { return 1.0 - p.phi(s); }, 0.0,
                          dmax, 1e-8);
      }
      return detail::grid_sup(h.window, [&](const Point& y) {
        auto f = [&](const Point& x) {
          return h.beta(h.window, x) * (1.0 - pair_phi(h, h.window.dist(x, y)));
        };
        return integrate_window(h.window, f, 1e-6).value;
      });
    }
    case ModelKind::Conditioned: {
      const auto& c = h.as<ConditionedParams>();
      const Model& base = *c.base;
      double Mk = c.envelope_mult;
      double betas = base.beta.sup();
      double ball_delta = detail::sup_ball_measure(h.window, c.delta);
      double outside;  // sup_y int_{X \ B(y,delta)} beta |phi - 1|
      switch (base.kind()) {
        case ModelKind::Poisson:
          outside = 0.0;
          break;
        case ModelKind::Strauss: {
          const auto& p = base.as<StraussParams>();
          outside = betas * (1.0 - p.gamma) *
                    (detail::sup_ball_measure(h.window, p.R) - ball_delta);
          break;
        }
        case ModelKind::HardCoreStrauss: {
          const auto& p = base.as<HardCoreStraussParams>();
          double bd = detail::sup_ball_measure(h.window, p.delta);
          double bR = detail::sup_ball_measure(h.window, p.R);
          outside = betas * ((std::max(bd - ball_delta, 0.0)) +
                             (1.0 - p.gamma) * (bR - std::max(bd, ball_delta)));
          break;
        }
        case ModelKind::BiScaleStrauss: {
          const auto& p = base.as<BiScaleStraussParams>();
          double br = detail::sup_ball_measure(h.window, p.r);
          double bR = detail::sup_ball_measure(h.window, p.R);
          outside = betas * ((1.0 - p.gamma) * std::max(br - ball_delta, 0.0) +
                             std::fabs(p.C - 1.0) * (bR - std::max(br, ball_delta)));
          break;
        }
        case ModelKind::LennardJones: {
          const auto& p = base.as<LennardJonesParams>();
          auto absdiff = [&](double s) { return std::fabs(pair_phi(base, s) - 1.0); };
          double smax = std::max(h.window.diameter(), 20.0 * p.R);
          // |phi - 1| <= b |V| e^{bM} <= b e^{bM} (R/s)^rho beyond smax
          const int D = h.window.dim;
          double tail = D * unit_ball_volume(D) * p.b * std::exp(p.b * p.M) *
                        std::pow(p.R, p.rho) * std::pow(smax, D - p.rho) / (p.rho - D);
          outside = betas * (detail::radial_integral(D, absdiff, c.delta, smax, 1e-8) +
                             tail);
          break;
        }
        case ModelKind::GenericPip: {
          auto absdiff = [&](double s) { return std::fabs(pair_phi(base, s) - 1.0); };
          outside = betas * detail::radial_integral(h.window.dim, absdiff, c.delta,
                                                    h.window.diameter(), 1e-8);
          break;
        }
        default:
          throw ParameterError("stein_eps: unsupported conditioned base");
      }
      return Mk * (outside + betas * ball_delta);
    }
    default:
      throw StabilityError("stein_eps: no closed form for this model kind");
  }
}

/// n*-independent bound on c = sup_{||xi-eta||>=n*} int |Delta lambda| dalpha.
inline double stein_c(const Model& h) {
  switch (h.kind()) {
    case ModelKind::Poisson:
      return 0.0;  // lambda is configuration-free
    case ModelKind::Strauss:
    case ModelKind::HardCoreStrauss:
      return h.beta.integral(h.window);
    case ModelKind::BiScaleStrauss:
      if (h.as<BiScaleStraussParams>().C > 1.0)
        throw StabilityError("stein_c: non-inhibitory PIP; use restrict_to_Ak first");
      return h.beta.integral(h.window);
    case ModelKind::GenericPip:
      if (h.as<GenericPipParams>().cons.C > 1.0)
        throw StabilityError("stein_c: non-inhibitory PIP; use restrict_to_Ak first");
      return h.beta.integral(h.window);
    case ModelKind::Conditioned: {
      const auto& c = h.as<ConditionedParams>();
      return c.envelope_mult * c.base->beta.integral(h.window);
    }
    default:
      throw StabilityError("stein_c: no closed form for this model kind");
  }
}

/// n* = ceil(c/eps) (optimal when the bound on c does not depend on n*);
/// 1 when eps = 0 or c = 0. The eps-only regime n* = infinity is selected
/// explicitly by passing kNStarInfinity to c1_upper.
inline double choose_nstar(double eps, double c) {
  if (eps < 0 || c < 0) throw ParameterError("choose_nstar: negative input");
  if (eps == 0.0 || c == 0.0) return 1.0;
  return std::ceil(c / eps);
}

/// Evaluate the Stein-factor series bound e_1 at (eps, c, n*).
///   e1 = eps^(n*-1) sum_{i>=0} c^i/prod_{k=0}^{i}(n*+k) (1 + c/(n*+i))
///        + (1+eps)/eps sum_{i=1}^{n*-1} eps^(n*-i)/(n*-i),
/// with n* = infinity giving (1+eps)/eps log(1/(1-eps)). Limits at eps = 0
/// and/or c = 0 are taken analytically. Geometric tail bounds for truncated
/// series are added to the result and recorded in truncation_error, so the
/// returned c1 is always a valid upper bound.
inline SteinParams c1_upper(double eps, double c, double nstar, double tol = 1e-12) {
  if (!(tol > 0)) throw ParameterError("c1_upper: tol must be positive");
  if (eps < 0 || c < 0) throw ParameterError("c1_upper: negative input");
  SteinParams out;
  out.eps = eps;
  out.c = c;
  out.nstar = nstar;

  if (std::isinf(nstar)) {
    if (eps >= 1.0)
      throw DivergenceError("c1_upper: n* = infinity requires eps < 1");
    // exact closed form; limit 1 at eps = 0
    out.c1 = eps == 0.0 ? 1.0 : (1.0 + eps) / eps * std::log1p(eps / (1.0 - eps));
    return out;
  }
  if (!(nstar >= 1.0) || nstar != std::floor(nstar))
    throw ParameterError("c1_upper: n* must be a positive integer or infinity");
  const long n = static_cast<long>(nstar);

  if (eps == 0.0 && (c == 0.0 || n >= 2)) {
    // Poisson-like case: the exact limit of the series is 1
    out.c1 = 1.0;
    return out;
  }

  // a_{n*} = sum_i c^i / prod_{k=0..i} (n*+k) * (1 + c/(n*+i)); at c = 0 the
  // i = 0 term gives 1/n* exactly
  const long cap = 10'000;
  double p = 1.0 / static_cast<double>(n);
  double a = p * (1.0 + c / static_cast<double>(n));
  double trunc_a = 0.0;
  for (long i = 1; i <= cap; ++i) {
    p *= c / static_cast<double>(n + i);
    double term = p * (1.0 + c / static_cast<double>(n + i));
    a += term;
    if (term < tol * a) {
      double q = c / static_cast<double>(n + i + 1);
      if (q < 1.0) trunc_a = term * q / (1.0 - q) * (1.0 + c / static_cast<double>(n + i));
      break;
    }
    if (i == cap) {
      double q = c / static_cast<double>(n + i + 1);
      if (q >= 1.0)
        throw DivergenceError("c1_upper: series cap reached before geometric decay");
      trunc_a = term * q / (1.0 - q);
    }
  }
  a += trunc_a;

  // first summand eps^(n*-1) a_{n*}; eps^(n*-1) may underflow harmlessly
  double first = (n == 1) ? a : std::pow(eps, static_cast<double>(n - 1)) * a;

  // second summand (1+eps)/eps sum_{j=1}^{n*-1} eps^j / j
  double second = 0.0;
  double trunc_s = 0.0;
  if (n >= 2) {
    double epow = eps;
    for (long j = 1; j <= n - 1; ++j) {
      double term = epow / static_cast<double>(j);
      second += term;
      epow *= eps;
      if (eps < 1.0 && term < tol * second && j < n - 1) {
        trunc_s = epow / (static_cast<double>(j + 1) * (1.0 - eps));
        break;
      }
    }
    second += trunc_s;
    second *= (1.0 + eps) / eps;
    trunc_s *= (1.0 + eps) / eps;
  }

  out.c1 = first + second;
  out.truncation_error = trunc_a * (n == 1 ? 1.0 : std::pow(eps, static_cast<double>(n - 1))) +
                         trunc_s;
  return out;
}

/// Evaluate c1 at both admissible n* choices (ceil(c/eps), and infinity when
/// eps < 1) and keep the smaller bound.
inline SteinParams c1_best(double eps, double c, double tol = 1e-12) {
  SteinParams best = c1_upper(eps, c, choose_nstar(eps, c), tol);
  if (eps < 1.0) {
    SteinParams alt = c1_upper(eps, c, kNStarInfinity, tol);
    if (alt.c1 < best.c1) best = alt;
  }
  return best;
}

inline SteinParams stein_params_for(const Model& h, double tol = 1e-12) {
  double eps = stein_eps(h);
  double c = stein_c(h);
  return c1_best(eps, c, tol);
}

struct OracleResult {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo estimate of e_1 via the dominating pure-jump chain: holding
/// rate n at level n, jump down with probability 1/(1+eps) below n* and
/// 1/(1+c/n) from n* upwards. Mean absorption time at 0, started at 1.
inline OracleResult e1_mc_oracle(double eps, double c, long nstar, long reps,
                                 std::uint64_t seed) {
  if (reps < 1) throw ParameterError("e1_mc_oracle: reps must be >= 1");
  if (nstar < 1) throw ParameterError("e1_mc_oracle: n* must be >= 1");
  const long level_cap = 1'000'000;
  CounterRng root(seed);
  double sum = 0.0, sumsq = 0.0;
  for (long rep = 0; rep < reps; ++rep) {
    CounterRng rng = root.stream(static_cast<std::uint64_t>(rep));
    long n = 1;
    double t = 0.0;
    while (n > 0) {
      t += rng.exponential(static_cast<double>(n));
      double pdown = n < nstar ? 1.0 / (1.0 + eps) : 1.0 / (1.0 + c / static_cast<double>(n));
      n += rng.uniform() < pdown ? -1 : 1;
      if (n > level_cap)
        throw ExplosionError("e1_mc_oracle: level cap exceeded (eps >= 1 regime?)");
    }
    sum += t;
    sumsq += t * t;
  }
  OracleResult res;
  res.mean = sum / static_cast<double>(reps);
  double var = std::max(sumsq / reps - res.mean * res.mean, 0.0);
  res.stderr_ = std::sqrt(var / static_cast<double>(reps));
  return res;
}

}  // namespace gibbstv

#endif
