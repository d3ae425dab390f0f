#ifndef GIBBSTV_HARNESS_HPP
#define GIBBSTV_HARNESS_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbstv/bounds.hpp"
#include "gibbstv/discretize.hpp"
#include "gibbstv/sbdp.hpp"
#include "gibbstv/statistics.hpp"

namespace gibbstv {

struct McOptions {
  long reps = 2000;
  double burn_in = 15.0;
  double spacing = 1.0;
  std::uint64_t seed = 1;
  double tol = 1e-6;
};

struct TvLowerResult {
  double lower = 0.0;
  double se = 0.0;
  std::string best_statistic;
};

/// sup over a finite statistic family of |mean_A f - mean_B f|, which lower
/// bounds d_TV up to noise. The count-law TV (sup over count events) is one
/// family member. The reported se is the worst-case binomial bound widened
/// Bonferroni-style by sqrt(family size).
inline TvLowerResult empirical_discrepancy(const std::vector<PointConfig>& a,
                                           const std::vector<PointConfig>& b,
                                           const std::vector<Statistic>& stats,
                                           bool include_count_tv) {
  if (a.empty() || b.empty()) throw ParameterError("empirical_discrepancy: empty samples");
  TvLowerResult out;
  for (const auto& s : stats) {
    double ma = 0, mb = 0;
    for (const auto& c : a) ma += s.eval(c);
    for (const auto& c : b) mb += s.eval(c);
    ma /= a.size();
    mb /= b.size();
    double d = std::fabs(ma - mb);
    if (d > out.lower) {
      out.lower = d;
      out.best_statistic = s.name;
    }
  }
  double family = static_cast<double>(stats.size());
  if (include_count_tv) {
    std::map<std::size_t, double> pa, pb;
    for (const auto& c : a) pa[c.size()] += 1.0 / a.size();
    for (const auto& c : b) pb[c.size()] += 1.0 / b.size();
    double tv = 0.0;
    for (const auto& [k, v] : pa) tv += std::fabs(v - (pb.count(k) ? pb.at(k) : 0.0));
    for (const auto& [k, v] : pb)
      if (!pa.count(k)) tv += v;
    tv *= 0.5;
    if (tv > out.lower) {
      out.lower = tv;
      out.best_statistic = "count_law_tv";
    }
    family += 1.0;
  }
  double base_se = std::sqrt(0.25 / a.size() + 0.25 / b.size());
  out.se = std::sqrt(family) * base_se;
  return out;
}

/// Empirical lower estimate of d_TV(L(a), L(b)) from fresh equilibrium samples.
inline TvLowerResult empirical_tv_lower(const Model& a, const Model& b,
                                        const std::vector<Statistic>& stats, long n,
                                        std::uint64_t seed, double burn_in = 15.0,
                                        double spacing = 1.0) {
  CounterRng root(seed);
  auto sa = sample_equilibrium(a, burn_in, n, spacing, root.stream(1).next_u64());
  auto sb = sample_equilibrium(b, burn_in, n, spacing, root.stream(2).next_u64());
  return empirical_discrepancy(sa, sb, stats, true);
}

struct GnzResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double se = 0.0;
};

/// Georgii-Nguyen-Zessin residual: E sum_x h(x, Xi - d_x) minus
/// int E h(x, Xi) lambda(x|Xi) dalpha(x), estimated pairwise per equilibrium
/// sample. The x-integral uses stratified jittered-midpoint quadrature, so it
/// is unbiased and its noise is carried by the paired standard error.
template <typename H>
GnzResult gnz_residual(const Model& m, const H& h, long n, std::uint64_t seed,
                       double burn_in = 15.0, double spacing = 1.0,
                       int strata_per_dim = 12) {
  CounterRng root(seed);
  auto samples = sample_equilibrium(m, burn_in, n, spacing, root.stream(1).next_u64());
  CounterRng qrng = root.stream(2);
  const Window& w = m.window;
  double s_l = 0, s_r = 0;
  std::vector<double> diffs;
  diffs.reserve(samples.size());
  PointConfig reduced;
  for (const auto& cfg : samples) {
    double lhs_i = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      reduced = cfg;
      reduced.remove_at(i);
      lhs_i += h(cfg.points[i], reduced);
    }
    double rhs_i = 0.0;
    std::vector<int> idx(w.dim, 0);
    while (true) {
      Point x(w.dim);
      for (int i = 0; i < w.dim; ++i)
        x[i] = w.lower[i] + (idx[i] + qrng.uniform()) * w.edge(i) / strata_per_dim;
      rhs_i += h(x, cfg) * cond_intensity(m, x, cfg);
      int i = 0;
      while (i < w.dim && ++idx[i] == strata_per_dim) idx[i++] = 0;
      if (i == w.dim) break;
    }
    rhs_i *= w.volume() / std::pow(static_cast<double>(strata_per_dim), w.dim);
    s_l += lhs_i;
    s_r += rhs_i;
    diffs.push_back(lhs_i - rhs_i);
  }
  GnzResult out;
  double nn = static_cast<double>(diffs.size());
  out.lhs = s_l / nn;
  out.rhs = s_r / nn;
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= nn;
  out.residual = mean;
  // batch means: trajectory samples are autocorrelated at finite spacing
  long nb = std::max<long>(10, std::min<long>(50, diffs.size() / 20));
  long bs = diffs.size() / nb;
  double bvar = 0.0;
  for (long b = 0; b < nb; ++b) {
    double bm = 0.0;
    for (long i = b * bs; i < (b + 1) * bs; ++i) bm += diffs[i];
    bm /= bs;
    bvar += (bm - mean) * (bm - mean);
  }
  bvar /= std::max<long>(nb - 1, 1);
  out.se = std::sqrt(bvar / nb);
  return out;
}

// ---------------------------------------------------------------------------
// scenario-level verification

enum class TheoremId {
  Main,
  InhibitoryPip,
  GeneralPip,
  HardcorePip,
  LennardJones,
  AreaVsHardcore
};

inline const char* to_string(TheoremId t) {
  switch (t) {
    case TheoremId::Main: return "main";
    case TheoremId::InhibitoryPip: return "inhibitory_pip";
    case TheoremId::GeneralPip: return "general_pip";
    case TheoremId::HardcorePip: return "hardcore_pip";
    case TheoremId::LennardJones: return "lennard_jones";
    case TheoremId::AreaVsHardcore: return "area_vs_hardcore";
  }
  return "?";
}

struct Scenario {
  std::string name = "scenario";
  std::string task = "verify";  // bound | simulate | couple | discretize | verify
  std::optional<Model> xi;
  std::optional<Model> h;
  TheoremId theorem = TheoremId::Main;
  IntensityMode mode = IntensityMode::Envelope;
  McOptions mc;
  int k = 1;
  double delta = 0.0;
  std::vector<int> k_sweep;
  std::vector<double> delta_sweep;
  int n_per_dim = 10;
  std::vector<int> n_sweep;
  double horizon = 10.0;
  std::optional<double> beta0;     // area task: hard-core target activity
  std::optional<double> R0;        // area task: erosion radius
  std::optional<double> cstar_star;
  std::optional<double> moment_xi, moment_h;
  bool couple_check = false;
  std::vector<double> minpd_grid{0.01, 0.02, 0.03, 0.05, 0.08, 0.12};
  int count_cap = 40;
};

struct GnzEntry {
  std::string model;
  std::string statistic;
  double lhs, rhs, residual, se;
};

struct VerifyReport {
  std::string scenario_name;
  BoundReport theoretical;
  double empirical_lower = 0.0;
  double empirical_se = 0.0;
  std::string best_statistic;
  bool ordering_ok = true;
  std::vector<GnzEntry> gnz;
  std::optional<double> coupling_mean, coupling_se, coupling_bound;
  std::optional<double> area_lower;  // sandwich lower bound, when applicable
  std::vector<std::string> notes;
};

namespace detail {

/// The two processes that get simulated for the empirical comparison (the
/// A_k-conditioned versions when the theorem itself conditions).
struct SimulablePair {
  Model xi;
  Model h;
  bool conditioned = false;
};

inline SimulablePair simulable_pair(const Scenario& s) {
  switch (s.theorem) {
    case TheoremId::GeneralPip:
    case TheoremId::LennardJones: {
      int k = s.k;
      double d = s.delta;
      return {restrict_to_Ak(*s.xi, k, d), restrict_to_Ak(*s.h, k, d), true};
    }
    default:
      return {*s.xi, *s.h, false};
  }
}

}  // namespace detail

/// Evaluate the scenario's theorem bound.
inline BoundReport scenario_bound(const Scenario& s,
                                  const std::vector<PointConfig>* xi_samples = nullptr,
                                  const std::vector<PointConfig>* h_samples = nullptr) {
  McInputs mc;
  mc.xi_samples = xi_samples;
  mc.h_samples = h_samples;
  mc.cstar_star = s.cstar_star;
  mc.moment_xi = s.moment_xi;
  mc.moment_h = s.moment_h;
  switch (s.theorem) {
    case TheoremId::Main:
      return tv_bound_main(*s.xi, *s.h, xi_samples, s.mc.tol);
    case TheoremId::InhibitoryPip:
      return tv_bound_inhibitory_pip(*s.xi, *s.h, s.mode, mc);
    case TheoremId::GeneralPip:
      if (!s.k_sweep.empty())
        return tv_bound_general_pip_sweep(
            *s.xi, *s.h, s.k_sweep,
            s.delta_sweep.empty() ? std::vector<double>{s.delta} : s.delta_sweep, s.mode,
            mc);
      return tv_bound_general_pip(*s.xi, *s.h, s.k, s.delta, s.mode, mc);
    case TheoremId::HardcorePip:
      return tv_bound_hardcore_pip(*s.xi, *s.h, s.mode, mc);
    case TheoremId::LennardJones:
      return tv_bound_lennard_jones(*s.xi, *s.h, s.k, s.delta, mc);
    case TheoremId::AreaVsHardcore: {
      const auto& area = s.xi->as<AreaInteractionParams>();
      std::optional<double> mean_count;
      if (xi_samples && !xi_samples->empty())
        mean_count = detail::mean_count(*xi_samples).mean;
      return tv_bound_area_vs_hardcore(s.xi->window, s.xi->beta.constant, area.gamma,
                                       area.R, *s.beta0, mean_count);
    }
  }
  throw ParameterError("scenario_bound: unknown theorem");
}

/// Full verification: theorem bound, empirical TV lower estimate, GNZ
/// residuals for both models, optional coupling-time check, and the ordering
/// flag empirical_lower - 3 se <= bound.
inline VerifyReport verify_bounds_report(const Scenario& s) {
  if (!s.xi || !s.h) throw ParameterError("verify: scenario needs both models");
  VerifyReport rep;
  rep.scenario_name = s.name;
  CounterRng root(s.mc.seed);

  auto pair = detail::simulable_pair(s);
  auto xi_samples = sample_equilibrium(pair.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                       root.stream(11).next_u64());
  auto h_samples = sample_equilibrium(pair.h, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                      root.stream(12).next_u64());

  rep.theoretical = scenario_bound(
      s, s.mode == IntensityMode::MonteCarlo ? &xi_samples : nullptr,
      s.mode == IntensityMode::MonteCarlo ? &h_samples : nullptr);
  if (pair.conditioned)
    rep.notes.push_back("empirical comparison uses the A_k-conditioned processes");

  auto stats = make_tv_statistics(pair.xi.window, s.count_cap, s.minpd_grid);
  auto emp = empirical_discrepancy(xi_samples, h_samples, stats, true);
  rep.empirical_lower = emp.lower;
  rep.empirical_se = emp.se;
  rep.best_statistic = emp.best_statistic;
  rep.ordering_ok = emp.lower - 3.0 * emp.se <= rep.theoretical.bound;

  // GNZ residuals with h == 1 for both models
  auto ones = [](const Point&, const PointConfig&) { return 1.0; };
  long gnz_n = std::min<long>(s.mc.reps, 2000);
  auto g1 = gnz_residual(pair.xi, ones, gnz_n, root.stream(21).next_u64(), s.mc.burn_in,
                         s.mc.spacing);
  rep.gnz.push_back({"xi", "h=1", g1.lhs, g1.rhs, g1.residual, g1.se});
  auto g2 = gnz_residual(pair.h, ones, gnz_n, root.stream(22).next_u64(), s.mc.burn_in,
                         s.mc.spacing);
  rep.gnz.push_back({"h", "h=1", g2.lhs, g2.rhs, g2.residual, g2.se});

  if (s.couple_check) {
    auto starts = sample_equilibrium(pair.h, s.mc.burn_in, 1, s.mc.spacing,
                                     root.stream(31).next_u64());
    PointConfig xi0 = starts[0];
    CounterRng pos = root.stream(32);
    Point extra(pair.h.window.dim);
    for (int i = 0; i < pair.h.window.dim; ++i)
      extra[i] = pos.uniform(pair.h.window.lower[i], pair.h.window.upper[i]);
    auto mt = mean_coupling_time(pair.h, xi0, xi0.with(extra), s.mc.reps,
                                 root.stream(33).next_u64());
    rep.coupling_mean = mt.mean;
    rep.coupling_se = mt.stderr_;
    auto sp = stein_params_for(pair.h);
    rep.coupling_bound = sp.c1;
    if (mt.flagged) rep.notes.push_back("coupling timeouts above 1%");
  }

  if (s.theorem == TheoremId::AreaVsHardcore && s.beta0 && s.R0) {
    const auto& area = s.xi->as<AreaInteractionParams>();
    rep.area_lower = tv_lower_area(s.xi->window, *s.beta0, area.gamma, area.R, *s.R0).value;
  }
  return rep;
}

}  // namespace gibbstv

#endif
