#ifndef GIBBSTV_BOUNDS_HPP
#define GIBBSTV_BOUNDS_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/model.hpp"
#include "gibbstv/quadrature.hpp"
#include "gibbstv/rng.hpp"
#include "gibbstv/stein.hpp"

namespace gibbstv {

enum class IntensityMode { Envelope, MonteCarlo };

inline const char* to_string(IntensityMode m) {
  return m == IntensityMode::Envelope ? "envelope" : "monte_carlo";
}

/// Evaluated theorem bound with every intermediate constant on record.
/// Bounds above one are reported verbatim and only flagged as vacuous.
struct BoundReport {
  std::string theorem_id;
  double bound = 0.0;
  SteinParams stein;
  std::map<std::string, double> intermediates;
  std::string intensity_mode = "envelope";
  std::vector<std::string> notes;
  bool vacuous = false;

  void finish(double b) {
    bound = b;
    vacuous = b > 1.0;
  }
};

/// Optional Monte Carlo inputs shared by the bound evaluators.
struct McInputs {
  const std::vector<PointConfig>* xi_samples = nullptr;  // equilibrium of Xi (or Xi_Ak)
  const std::vector<PointConfig>* h_samples = nullptr;   // equilibrium of H (or H_Ak)
  std::optional<double> moment_xi;     // E |Xi| C^{k |Xi|} override
  std::optional<double> moment_h;      // E |H| C^{k |H|} override
  std::optional<double> cstar_star;    // Ruelle c**
};

namespace detail {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_count(const std::vector<PointConfig>& samples) {
  MeanSe out;
  if (samples.empty()) return out;
  double s = 0, s2 = 0;
  for (const auto& c : samples) {
    double n = static_cast<double>(c.size());
    s += n;
    s2 += n * n;
  }
  out.mean = s / samples.size();
  out.se = std::sqrt(std::max(s2 / samples.size() - out.mean * out.mean, 0.0) /
                     samples.size());
  return out;
}

inline void require_constant_beta(const Model& a, const Model& b, const char* who) {
  if (!a.beta.is_constant() || !b.beta.is_constant())
    throw ParameterError(std::string(who) + ": requires constant activities");
  if (a.beta.constant != b.beta.constant)
    throw ParameterError(std::string(who) + ": the theorem assumes a common activity beta");
}

inline const Model& base_of(const Model& m) {
  return m.kind() == ModelKind::Conditioned ? *m.as<ConditionedParams>().base : m;
}

/// Analytic bound on int_{s > smax} |phi_a - phi_b| over R^dim for pairs
/// involving Lennard-Jones interactions: beyond smax the potentials satisfy
/// |V| <= (R/s)^rho, so |phi - 1| <= b |V| e^{b M}.
inline double lj_radial_tail(int dim, const Model& a, const Model& b, double smax) {
  auto one_tail = [&](const Model& m) {
    if (m.kind() != ModelKind::LennardJones) return 0.0;
    const auto& p = m.as<LennardJonesParams>();
    if (p.rho <= dim) return std::numeric_limits<double>::infinity();
    double amp = p.b * std::exp(p.b * p.M) * std::pow(p.R, p.rho);
    // int_{smax}^inf s^{dim-1-rho} ds times the sphere area
    return dim * unit_ball_volume(dim) * amp * std::pow(smax, dim - p.rho) /
           (p.rho - dim);
  };
  return one_tail(a) + one_tail(b);
}

/// sup_y int_X beta(x) |phi_1(x,y) - phi_2(x,y)| dx for two radial
/// interactions with common constant beta. Exact ball measures for the
/// piecewise-constant families, radial quadrature otherwise.
inline double sup_interaction_l1(const Model& xi, const Model& h) {
  const Model& a = base_of(xi);
  const Model& b = base_of(h);
  const Window& w = a.window;
  const double beta = a.beta.constant;

  auto ball = [&](double rho) { return detail::sup_ball_measure(w, rho); };

  auto ka = a.kind(), kb = b.kind();
  auto is_strauss_like = [](ModelKind k) {
    return k == ModelKind::Strauss || k == ModelKind::HardCoreStrauss ||
           k == ModelKind::Poisson;
  };
  if (is_strauss_like(ka) && is_strauss_like(kb)) {
    // piecewise-constant radial phis: integrate |phi_a - phi_b| over the
    // breakpoint annuli exactly
    std::vector<double> radii{0.0};
    auto push = [&](double r) {
      if (r > 0) radii.push_back(r);
    };
    if (ka == ModelKind::Strauss) push(a.as<StraussParams>().R);
    if (ka == ModelKind::HardCoreStrauss) {
      push(a.as<HardCoreStraussParams>().delta);
      push(a.as<HardCoreStraussParams>().R);
    }
    if (kb == ModelKind::Strauss) push(b.as<StraussParams>().R);
    if (kb == ModelKind::HardCoreStrauss) {
      push(b.as<HardCoreStraussParams>().delta);
      push(b.as<HardCoreStraussParams>().R);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
      double mid = 0.5 * (radii[i] + radii[i + 1]);
      double diff = std::fabs(pair_phi(a, mid) - pair_phi(b, mid));
      if (diff > 0) total += diff * (ball(radii[i + 1]) - ball(radii[i]));
    }
    return beta * total;
  }
  if (ka == ModelKind::BiScaleStrauss && kb == ModelKind::BiScaleStrauss) {
    const auto& pa = a.as<BiScaleStraussParams>();
    const auto& pb = b.as<BiScaleStraussParams>();
    if (pa.r == pb.r && pa.R == pb.R) {
      return beta * (std::fabs(pa.gamma - pb.gamma) * ball(pa.r) +
                     std::fabs(pa.C - pb.C) * (ball(pa.R) - ball(pa.r)));
    }
  }
  // radial quadrature fallback (upper bound on non-torus windows)
  auto diff = [&](double s) { return std::fabs(pair_phi(a, s) - pair_phi(b, s)); };
  double smax = w.diameter();
  double tail = 0.0;
  if (ka == ModelKind::LennardJones && kb == ModelKind::LennardJones) {
    const auto& pa = a.as<LennardJonesParams>();
    const auto& pb = b.as<LennardJonesParams>();
    if (!pa.V && !pb.V && pa.b == pb.b && pa.R == pb.R) return 0.0;  // identical
  }
  if (ka == ModelKind::LennardJones || kb == ModelKind::LennardJones) {
    double Ra = ka == ModelKind::LennardJones ? a.as<LennardJonesParams>().R : 0.0;
    double Rb = kb == ModelKind::LennardJones ? b.as<LennardJonesParams>().R : 0.0;
    smax = std::max({smax, 20.0 * Ra, 20.0 * Rb});
    tail = lj_radial_tail(w.dim, a, b, smax);
  }
  return beta * (detail::radial_integral(w.dim, diff, 0.0, smax, 1e-8) + tail);
}

}  // namespace detail

/// E(|Xi| C^{k |Xi|}) <= c** C^k alpha(psi*) exp(C^k alpha(psi*) - alpha(X)),
/// from Ruelle stability. c** is a required user input.
inline double moment_bound_ruelle(const Model& m, int k, double cstar_star) {
  if (k < 0) throw ParameterError("moment_bound_ruelle: k must be >= 0");
  if (!m.ruelle.provided())
    throw ParameterError("moment_bound_ruelle: model carries no Ruelle (c*, psi*) constants");
  const Model& base = detail::base_of(m);
  double C = 1.0;
  if (is_pip_family(base)) C = std::max(pip_constants(base).C, 1.0);
  double alpha_psi = m.ruelle.psi_star * m.window.volume();
  double Ck = std::pow(C, k);
  return cstar_star * Ck * alpha_psi * std::exp(Ck * alpha_psi - m.window.volume());
}

/// d_TV(L(Xi), L(H)) <= c1(lambda) int E|nu(x|Xi) - lambda(x|Xi)| dalpha(x)
/// (the master bound). Poisson targets use the closed-form route; otherwise
/// the integral is estimated over supplied equilibrium samples of Xi.
inline BoundReport tv_bound_main(const Model& xi, const Model& h,
                                 const std::vector<PointConfig>* xi_samples = nullptr,
                                 double tol = 1e-6) {
  BoundReport rep;
  rep.theorem_id = "tv_main";

  if (h.kind() == ModelKind::Poisson) {
    rep.stein = SteinParams{};  // eps = 0, c1 = 1 exactly
    rep.stein.c1 = 1.0;
    double dbeta;
    if (xi.beta.is_constant() && h.beta.is_constant())
      dbeta = std::fabs(xi.beta.constant - h.beta.constant) * xi.window.volume();
    else
      dbeta = integrate_window(
                  xi.window,
                  [&](const Point& x) {
                    return std::fabs(xi.beta(xi.window, x) - h.beta(h.window, x));
                  },
                  tol)
                  .value;
    rep.intermediates["beta_l1"] = dbeta;
    if (xi.kind() == ModelKind::Poisson) {
      rep.intensity_mode = "envelope";
      rep.finish(dbeta);
      return rep;
    }
    if (is_pip_family(xi) && is_inhibitory(xi)) {
      // E|Xi| sup_y int beta (1 - phi_1(x,y)) dx, with E|Xi| <= beta |X|
      double inner = stein_eps(xi);
      detail::MeanSe cnt;
      double count_used;
      if (xi_samples && !xi_samples->empty()) {
        cnt = detail::mean_count(*xi_samples);
        count_used = cnt.mean + 3.0 * cnt.se;
        rep.intensity_mode = "monte_carlo";
        rep.intermediates["E_count_mean"] = cnt.mean;
        rep.intermediates["E_count_se"] = cnt.se;
      } else {
        count_used = xi.beta.integral(xi.window);
        rep.intensity_mode = "envelope";
      }
      rep.intermediates["sup_phi_l1"] = inner;
      rep.intermediates["E_count_used"] = count_used;
      rep.finish(dbeta + count_used * inner);
      return rep;
    }
    throw ParameterError("tv_bound_main: no analytic majorant for this Xi against a "
                         "Poisson target; supply samples via a specialized bound");
  }

  rep.stein = stein_params_for(h);
  if (!xi_samples || xi_samples->empty())
    throw ParameterError(
        "tv_bound_main: equilibrium samples of Xi are required for a non-Poisson target");
  rep.intensity_mode = "monte_carlo";
  // stratified jittered-midpoint integration in x: unbiased per sample, so
  // the cross-sample standard error accounts for the quadrature noise too
  const Window& w = xi.window;
  int cells = std::max(2, static_cast<int>(std::lround(std::pow(256.0, 1.0 / w.dim))));
  CounterRng qrng(0x9a3f17b2c4d5ULL);
  double s = 0, s2 = 0;
  for (const auto& cfg : *xi_samples) {
    double gi = 0.0;
    std::vector<int> idx(w.dim, 0);
    while (true) {
      Point x(w.dim);
      for (int i = 0; i < w.dim; ++i)
        x[i] = w.lower[i] + (idx[i] + qrng.uniform()) * w.edge(i) / cells;
      gi += std::fabs(cond_intensity(xi, x, cfg) - cond_intensity(h, x, cfg));
      int i = 0;
      while (i < w.dim && ++idx[i] == cells) idx[i++] = 0;
      if (i == w.dim) break;
    }
    gi *= w.volume() / std::pow(static_cast<double>(cells), w.dim);
    s += gi;
    s2 += gi * gi;
  }
  double n = static_cast<double>(xi_samples->size());
  double mean = s / n;
  double se = std::sqrt(std::max(s2 / n - mean * mean, 0.0) / n);
  rep.intermediates["integral_mean"] = mean;
  rep.intermediates["integral_se"] = se;
  rep.intermediates["estimate"] = rep.stein.c1 * mean;
  rep.intermediates["estimate_se"] = rep.stein.c1 * se;
  rep.finish(rep.stein.c1 * (mean + 3.0 * se));
  return rep;
}

/// Inhibitory PIP pair with common beta:
/// d_TV <= c1(lambda) E|Xi| sup_y int beta |phi_1 - phi_2| dx.
inline BoundReport tv_bound_inhibitory_pip(const Model& xi, const Model& h,
                                           IntensityMode mode, const McInputs& mc = {}) {
  bool xi_ok = xi.kind() == ModelKind::Poisson || (is_pip_family(xi) && is_inhibitory(xi));
  bool h_ok = h.kind() == ModelKind::Poisson || (is_pip_family(h) && is_inhibitory(h));
  if (!xi_ok || !h_ok)
    throw ParameterError("tv_bound_inhibitory_pip: both models must be inhibitory PIPs");
  detail::require_constant_beta(xi, h, "tv_bound_inhibitory_pip");

  BoundReport rep;
  rep.theorem_id = "tv_inhibitory_pip";
  rep.intensity_mode = to_string(mode);
  rep.stein = stein_params_for(h);

  double supJ = detail::sup_interaction_l1(xi, h);
  rep.intermediates["sup_phi_l1"] = supJ;

  double count_used;
  if (mode == IntensityMode::MonteCarlo) {
    if (!mc.xi_samples || mc.xi_samples->empty())
      throw ParameterError("tv_bound_inhibitory_pip: monte_carlo mode needs xi samples");
    auto cnt = detail::mean_count(*mc.xi_samples);
    count_used = cnt.mean + 3.0 * cnt.se;
    rep.intermediates["E_count_mean"] = cnt.mean;
    rep.intermediates["E_count_se"] = cnt.se;
  } else {
    count_used = xi.beta.integral(xi.window);  // nu <= beta
  }
  rep.intermediates["E_count_used"] = count_used;
  rep.finish(rep.stein.c1 * count_used * supJ);
  return rep;
}

/// General (possibly non-inhibitory) PIP pair sharing (UB)/(RC)/(IR)
/// constants: A_k-conditioned main term plus the P(not in A_k) tail.
inline BoundReport tv_bound_general_pip(const Model& xi, const Model& h, int k, double delta,
                                        IntensityMode mode, const McInputs& mc = {}) {
  if (!is_pip_family(xi) || !is_pip_family(h))
    throw ParameterError("tv_bound_general_pip: both models must be PIPs");
  detail::require_constant_beta(xi, h, "tv_bound_general_pip");
  auto ca = pip_constants(xi);
  auto cb = pip_constants(h);
  const bool msstrauss = xi.kind() == ModelKind::BiScaleStrauss &&
                         h.kind() == ModelKind::BiScaleStrauss &&
                         xi.as<BiScaleStraussParams>().gamma == h.as<BiScaleStraussParams>().gamma &&
                         ca.r == cb.r && ca.R == cb.R;
  if (!msstrauss &&
      (ca.delta != cb.delta || ca.gamma != cb.gamma || ca.r != cb.r || ca.R != cb.R ||
       ca.C != cb.C))
    throw ParameterError("tv_bound_general_pip: the theorem assumes shared interaction "
                         "constants (bi-scale pairs may differ in C only)");

  BoundReport rep;
  rep.theorem_id = msstrauss ? "tv_general_pip_bi_scale" : "tv_general_pip";
  rep.intensity_mode = to_string(mode);

  // Stein factor from the conditioned target H_{A_k}
  Model cond_h = restrict_to_Ak(h, k, delta);
  rep.stein = stein_params_for(cond_h);

  // envelope multiplier of the conditioned Xi (the larger C in the bi-scale case)
  Model cond_xi = restrict_to_Ak(xi, k, delta);
  double Mk = cond_xi.as<ConditionedParams>().envelope_mult;
  double supJ = detail::sup_interaction_l1(xi, h);

  const double beta = xi.beta.constant;
  double count_used;
  if (mode == IntensityMode::MonteCarlo && mc.xi_samples && !mc.xi_samples->empty()) {
    auto cnt = detail::mean_count(*mc.xi_samples);
    count_used = cnt.mean + 3.0 * cnt.se;
    rep.intermediates["E_count_mean"] = cnt.mean;
    rep.intermediates["E_count_se"] = cnt.se;
  } else {
    if (mode == IntensityMode::MonteCarlo)
      rep.notes.push_back("monte_carlo mode without samples: envelope count used");
    count_used = beta * Mk * xi.window.volume();
  }
  double first = rep.stein.c1 * Mk * count_used * supJ;

  // tail: gamma^{k(k+1)/2} B_delta^k / ((k+1)! C^k) * (moments)
  double gamma_shared = std::min(ca.gamma, cb.gamma);
  double C_shared = std::max({ca.C, cb.C, 1.0});
  double B_delta = beta * detail::sup_ball_measure(xi.window, delta);
  double lgfact = std::lgamma(static_cast<double>(k) + 2.0);
  double prefac = std::pow(gamma_shared, 0.5 * k * (k + 1)) * std::pow(B_delta, k) /
                  std::exp(lgfact) / std::pow(C_shared, k);

  auto moment_for = [&](const Model& m, const std::optional<double>& override_val,
                        const std::vector<PointConfig>* samples, const char* tag) {
    if (override_val) return *override_val;
    if (samples && !samples->empty()) {
      double s = 0;
      for (const auto& cfg : *samples)
        s += cfg.size() * std::pow(C_shared, static_cast<double>(k) * cfg.size());
      rep.notes.push_back(std::string(tag) +
                          ": moment from A_k-conditioned samples (approximation)");
      return s / samples->size();
    }
    if (mc.cstar_star) return moment_bound_ruelle(m, k, *mc.cstar_star);
    throw ParameterError(
        "tv_bound_general_pip: tail moments need samples, overrides, or cstar_star");
  };
  double mom_xi = moment_for(xi, mc.moment_xi, mc.xi_samples, "xi");
  double mom_h = moment_for(h, mc.moment_h, mc.h_samples, "h");
  double tail = prefac * (mom_xi + mom_h);

  rep.intermediates["P_notin_Ak_xi"] = prefac * mom_xi;
  rep.intermediates["P_notin_Ak_h"] = prefac * mom_h;
  rep.intermediates["k"] = k;
  rep.intermediates["delta"] = delta;
  rep.intermediates["m"] = ak_annulus_count_bound(xi.window.dim, delta, ca.r, ca.R);
  rep.intermediates["M_k"] = Mk;
  rep.intermediates["B_delta"] = B_delta;
  rep.intermediates["sup_phi_l1"] = supJ;
  rep.intermediates["E_count_used"] = count_used;
  rep.intermediates["moment_xi"] = mom_xi;
  rep.intermediates["moment_h"] = mom_h;
  rep.intermediates["tail"] = tail;
  rep.intermediates["first_term"] = first;
  rep.finish(first + tail);
  return rep;
}

/// Sweep k (and optionally delta) and keep the smallest bound; the theorem
/// holds for every k, so the minimum is itself a valid bound.
inline BoundReport tv_bound_general_pip_sweep(const Model& xi, const Model& h,
                                              const std::vector<int>& ks,
                                              const std::vector<double>& deltas,
                                              IntensityMode mode, const McInputs& mc = {},
                                              std::vector<BoundReport>* all = nullptr) {
  std::optional<BoundReport> best;
  for (int k : ks)
    for (double d : deltas) {
      auto rep = tv_bound_general_pip(xi, h, k, d, mode, mc);
      if (all) all->push_back(rep);
      if (!best || rep.bound < best->bound) best = rep;
    }
  if (!best) throw ParameterError("tv_bound_general_pip_sweep: empty sweep");
  best->notes.push_back("minimum over sweep");
  return *best;
}

/// Hard-core PIP pair with a common hard core radius delta: no tail term,
/// M_1 from the k=1 conditioning (L(Xi) = L(Xi_{A_1})).
inline BoundReport tv_bound_hardcore_pip(const Model& xi, const Model& h, IntensityMode mode,
                                         const McInputs& mc = {}) {
  double da = hard_core_radius(xi);
  double db = hard_core_radius(h);
  if (da <= 0 || db <= 0 || da != db)
    throw ParameterError("tv_bound_hardcore_pip: both models need the same hard core radius");
  detail::require_constant_beta(xi, h, "tv_bound_hardcore_pip");

  BoundReport rep;
  rep.theorem_id = "tv_hardcore_pip";
  rep.intensity_mode = to_string(mode);

  Model cond_h = restrict_to_Ak(h, 1, da);
  rep.stein = stein_params_for(cond_h);
  auto cons = pip_constants(xi);
  double m1 = ak_annulus_count_bound(xi.window.dim, da, cons.r, cons.R);
  double M1 = std::pow(std::max({cons.C, pip_constants(h).C, 1.0}), m1);
  double supJ = detail::sup_interaction_l1(xi, h);

  double count_used;
  if (mode == IntensityMode::MonteCarlo && mc.xi_samples && !mc.xi_samples->empty()) {
    auto cnt = detail::mean_count(*mc.xi_samples);
    count_used = cnt.mean + 3.0 * cnt.se;
    rep.intermediates["E_count_mean"] = cnt.mean;
    rep.intermediates["E_count_se"] = cnt.se;
  } else {
    count_used = xi.beta.constant * M1 * xi.window.volume();
  }
  rep.intermediates["m"] = m1;
  rep.intermediates["M_1"] = M1;
  rep.intermediates["sup_phi_l1"] = supJ;
  rep.intermediates["E_count_used"] = count_used;
  rep.finish(rep.stein.c1 * M1 * count_used * supJ);
  return rep;
}

/// L(delta) of the classical Lennard-Jones tail bound:
/// (1/4) delta^-6 - 4 pi sqrt(3) (R-delta)^2 / (delta^3 (R-2 delta)^5).
/// Positive for reasonably small delta.
inline double lj_classical_L(double R, double delta) {
  return 0.25 * std::pow(delta, -6.0) -
         4.0 * M_PI * std::sqrt(3.0) * std::pow(R - delta, 2) /
             (std::pow(delta, 3) * std::pow(R - 2.0 * delta, 5));
}

/// Classical Lennard-Jones pair (dim 3, rho = 6, r = R, shared beta).
inline BoundReport tv_bound_lennard_jones(const Model& xi, const Model& h, int k,
                                          double delta, const McInputs& mc = {}) {
  if (xi.kind() != ModelKind::LennardJones || h.kind() != ModelKind::LennardJones)
    throw ParameterError("tv_bound_lennard_jones: both models must be Lennard-Jones");
  const auto& pa = xi.as<LennardJonesParams>();
  const auto& pb = h.as<LennardJonesParams>();
  if (pa.V || pb.V || xi.window.dim != 3)
    throw ParameterError("tv_bound_lennard_jones: classical 12-6 potentials in dim 3 only");
  detail::require_constant_beta(xi, h, "tv_bound_lennard_jones");
  if (!(delta > 0 && delta < 0.5 * std::min(pa.R, pb.R) && delta <= std::min(pa.r, pb.r)))
    throw ParameterError("tv_bound_lennard_jones: need delta <= r and delta < min(R1,R2)/2");

  auto exp_arg = [&](double b, double R) {
    return b * k * 4.0 * M_PI * std::sqrt(3.0) * std::pow(R - delta, 2) /
           (std::pow(delta, 3) * std::pow(R - 2.0 * delta, 5));
  };
  double L1 = lj_classical_L(pa.R, delta), L2 = lj_classical_L(pb.R, delta);
  if (L1 <= 0 || L2 <= 0)
    throw ParameterError(
        "tv_bound_lennard_jones: L_i(delta) must be positive; choose a smaller delta");

  BoundReport rep;
  rep.theorem_id = "tv_lennard_jones";
  const double beta = xi.beta.constant;
  const double vol = xi.window.volume();

  double Mk2 = std::exp(exp_arg(pb.b, pb.R));
  double nu_mult = std::exp(exp_arg(pa.b, pa.R));
  if (!std::isfinite(Mk2) || !std::isfinite(nu_mult))
    throw ParameterError(
        "tv_bound_lennard_jones: envelope multiplier overflows at this (k, delta); "
        "the bound is astronomically large, increase delta or R");

  // Stein factor from the conditioned target
  Model cond_h = restrict_to_Ak(h, k, delta);
  rep.stein = stein_params_for(cond_h);
  double S = detail::sup_interaction_l1(xi, h);  // beta * int |phi1 - phi2|

  double count_used;
  if (mc.xi_samples && !mc.xi_samples->empty()) {
    auto cnt = detail::mean_count(*mc.xi_samples);
    count_used = cnt.mean + 3.0 * cnt.se;
    rep.intensity_mode = "monte_carlo";
    rep.intermediates["E_count_mean"] = cnt.mean;
    rep.intermediates["E_count_se"] = cnt.se;
  } else {
    count_used = beta * nu_mult * vol;  // crude bound on nu_{A_k}
    rep.intensity_mode = "envelope";
  }
  double first = rep.stein.c1 * Mk2 * count_used * S;

  // tail sum over j > k of B_delta^{j-1} (e^{-j^2 b1 L1} + e^{-j^2 b2 L2}) / j!
  double B_delta = beta * unit_ball_volume(3) * std::pow(delta, 3);
  double tail = 0.0;
  for (int j = k + 1; j <= k + 1000; ++j) {
    double lw = -std::lgamma(j + 1.0) + (j - 1) * std::log(std::max(B_delta, 1e-300));
    double term = std::exp(lw - j * static_cast<double>(j) * pa.b * L1) +
                  std::exp(lw - j * static_cast<double>(j) * pb.b * L2);
    tail += term;
    if (term < 1e-30 * std::max(tail, 1e-300)) break;
  }
  tail *= beta * vol;
  rep.notes.push_back("tail truncated at relative 1e-30");

  rep.intermediates["k"] = k;
  rep.intermediates["delta"] = delta;
  rep.intermediates["L_1"] = L1;
  rep.intermediates["L_2"] = L2;
  rep.intermediates["M_k"] = Mk2;
  rep.intermediates["nu_envelope_mult"] = nu_mult;
  rep.intermediates["B_delta"] = B_delta;
  rep.intermediates["phi_l1"] = S;
  rep.intermediates["E_count_used"] = count_used;
  rep.intermediates["first_term"] = first;
  rep.intermediates["tail"] = tail;
  rep.finish(first + tail);
  return rep;
}

// ---------------------------------------------------------------------------
// area interaction vs hard core

namespace detail {

/// volume of {x in B(0,rho): x_1 >= t0}
inline double ball_cap_volume(int dim, double rho, double t0) {
  if (t0 >= rho) return 0.0;
  if (t0 <= -rho) return unit_ball_volume(dim) * std::pow(rho, dim);
  if (dim == 1) return rho - t0;
  auto f = [&](const Point& t) {
    return std::pow(std::max(rho * rho - t[0] * t[0], 0.0), 0.5 * (dim - 1));
  };
  double scale = unit_ball_volume(dim - 1);
  return scale *
         integrate_box(f, Box{Point{t0}, Point{rho}}, 1e-10 * std::pow(rho, dim) + 1e-15)
             .value;
}

/// overlap |B(0,rho) cap B(s e_1, rho)| of two equal balls at distance s;
/// closed forms for dim <= 3, cap-integral quadrature beyond
inline double equal_ball_lens(int dim, double rho, double s) {
  if (s >= 2.0 * rho) return 0.0;
  switch (dim) {
    case 1:
      return 2.0 * rho - s;
    case 2:
      return 2.0 * rho * rho * std::acos(0.5 * s / rho) -
             0.5 * s * std::sqrt(4.0 * rho * rho - s * s);
    case 3:
      if (s == 0.0) return unit_ball_volume(3) * rho * rho * rho;
      return M_PI * std::pow(2.0 * rho - s, 2) * (s * s + 4.0 * s * rho) / (12.0 * s);
    default:
      return 2.0 * ball_cap_volume(dim, rho, 0.5 * s);
  }
}

}  // namespace detail

/// I_D(R, gamma) = int_{B(0,R)} gamma^{|B(x,R/2) cap B(0,R/2)|} dx, by radial
/// quadrature with the exact two-ball overlap volume.
inline double area_overlap_integral(int dim, double R, double gamma) {
  if (gamma == 1.0) return unit_ball_volume(dim) * std::pow(R, dim);
  auto f = [&](double s) {
    return std::pow(gamma, detail::equal_ball_lens(dim, 0.5 * R, s));
  };
  return detail::radial_integral(dim, f, 0.0, R, 1e-8 * std::pow(R, dim));
}

/// Closed upper bound 2 alpha_D D R^{D-1} log(gamma^{-alpha_D})^{-1/D}.
inline double area_overlap_closed_bound(int dim, double R, double gamma) {
  if (gamma >= 1.0) return std::numeric_limits<double>::infinity();
  double ad = unit_ball_volume(dim);
  return 2.0 * ad * dim * std::pow(R, dim - 1) *
         std::pow(-ad * std::log(gamma), -1.0 / dim);
}

/// Rate of convergence of the area-interaction process to the hard-core
/// Strauss process: c1 (|beta gamma^{-alpha_D (R/2)^D} - beta_0| |X|
///                      + beta gamma^{-alpha_D (R/2)^D} E|Xi| I_D(R, gamma)).
inline BoundReport tv_bound_area_vs_hardcore(const Window& w, double beta, double gamma,
                                             double R, double beta0,
                                             std::optional<double> mean_xi = {}) {
  if (!(gamma > 0 && gamma <= 1))
    throw ParameterError("tv_bound_area_vs_hardcore: gamma must lie in (0,1]");
  BoundReport rep;
  rep.theorem_id = "tv_area_vs_hardcore";

  const int D = w.dim;
  double v = unit_ball_volume(D) * std::pow(0.5 * R, D);
  double act = beta * std::pow(gamma, -v);
  double ID = area_overlap_integral(D, R, gamma);
  double ID_closed = area_overlap_closed_bound(D, R, gamma);

  double count_used;
  if (mean_xi) {
    count_used = *mean_xi;
    rep.intensity_mode = "monte_carlo";
  } else {
    count_used = act * w.volume();
    rep.intensity_mode = "envelope";
  }

  // Stein factor of the hard-core Strauss target
  auto target = Model::strauss(w, beta0, 0.0, R);
  rep.stein = stein_params_for(target);

  rep.intermediates["calibrated_activity"] = act;
  rep.intermediates["ball_volume_half_R"] = v;
  rep.intermediates["I_D"] = ID;
  rep.intermediates["I_D_closed_bound"] = ID_closed;
  rep.intermediates["E_count_used"] = count_used;
  rep.intermediates["activity_term"] = std::fabs(act - beta0) * w.volume();
  rep.finish(rep.stein.c1 * (std::fabs(act - beta0) * w.volume() + act * count_used * ID));
  return rep;
}

struct AreaLowerBound {
  double value = 0.0;
  double kappa = 0.0;
  double i_d = 0.0;
  double eroded_volume = 0.0;
};

/// Sharpness: d_TV >= kappa I_D(R, gamma) with
/// kappa = e^{-beta_0 |X|} beta_0^2 |X^(-R_0)| / 2, assuming the calibration
/// beta gamma^{-alpha_D (R/2)^D} = beta_0 and R <= R_0.
inline AreaLowerBound tv_lower_area(const Window& w, double beta0, double gamma, double R,
                                    double R0) {
  if (R > R0) throw ParameterError("tv_lower_area: requires R <= R0");
  AreaLowerBound out;
  out.eroded_volume = 1.0;
  for (int i = 0; i < w.dim; ++i)
    out.eroded_volume *= std::max(w.edge(i) - 2.0 * R0, 0.0);
  if (out.eroded_volume <= 0.0)
    throw ParameterError("tv_lower_area: window too small, |X^(-R0)| = 0");
  out.kappa = std::exp(-beta0 * w.volume()) * beta0 * beta0 * out.eroded_volume / 2.0;
  out.i_d = area_overlap_integral(w.dim, R, gamma);
  out.value = out.kappa * out.i_d;
  return out;
}

}  // namespace gibbstv

#endif
