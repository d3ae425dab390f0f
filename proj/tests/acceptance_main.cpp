// Acceptance suite: runs every shipped verification criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gibbstv/gibbstv.hpp"

#ifndef GIBBSTV_SCENARIO_DIR
#define GIBBSTV_SCENARIO_DIR "scenarios"
#endif

using namespace gibbstv;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s  (%s; %.1fs)\n", ok ? "PASS" : "FAIL", idx,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

PointConfig random_config(const Window& w, std::size_t n, CounterRng& rng) {
  PointConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(w.dim);
    for (int d = 0; d < w.dim; ++d) p[d] = rng.uniform(w.lower[d], w.upper[d]);
    cfg.add(p);
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Stein-factor exact cases

void criterion1() {
  Timer t;
  bool ok = true;
  std::ostringstream d;
  ok &= c1_upper(0.0, 0.0, 1).c1 == 1.0;
  ok &= c1_upper(0.0, 5.0, 2).c1 == 1.0;
  ok &= std::fabs(c1_upper(0.0, 2.0, kNStarInfinity).c1 - 1.0) <= 1e-12;
  double v = c1_upper(0.5, 3.0, kNStarInfinity).c1;
  ok &= std::fabs(v - 3.0 * std::log(2.0)) <= 1e-10;
  d << "c1(eps=0)=1 exactly, c1(0.5,inf)=" << v << " vs 3 ln 2";
  report(1, "Stein-factor exact cases", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 2. series vs oracle on the grid

void criterion2() {
  Timer t;
  bool ok = true;
  std::ostringstream d;
  double anchor = c1_upper(0.4, 1.0, 1).c1;
  if (std::fabs(anchor - 3.0361840) > 1e-6) {
    ok = false;
    d << "anchor mismatch " << anchor << "; ";
  }
  int cells = 0;
  double worst = 0.0;
  std::uint64_t seed = 424242;
  for (double eps : {0.0, 0.3, 0.7}) {
    for (double c : {0.5, 1.0, 5.0}) {
      std::set<long> nstars{1, 2, static_cast<long>(choose_nstar(eps, c))};
      for (long nstar : nstars) {
        auto series = c1_upper(eps, c, static_cast<double>(nstar));
        auto mc = e1_mc_oracle(eps, c, nstar, 100000, seed++);
        double gap = std::fabs(mc.mean - series.c1);
        double allow = 3.0 * mc.stderr_ + series.truncation_error + 1e-9;
        worst = std::max(worst, gap / std::max(allow, 1e-300));
        if (gap > allow) {
          ok = false;
          d << "(" << eps << "," << c << "," << nstar << "): |" << mc.mean << "-"
            << series.c1 << "| > " << allow << "; ";
        }
        ++cells;
      }
    }
  }
  d << cells << " grid cells, worst gap/allowance " << worst;
  report(2, "series vs dominating-chain oracle", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 3. coupling marginal correctness

void criterion3() {
  Timer t;
  Window w = Window::unit(2, true);
  auto m = Model::poisson(w, 10.0);
  const int n = 30000;  // above the stated 1e4: the plug-in TV estimator has a
                        // noise floor of about 0.021 at 1e4 samples, right at
                        // the threshold; more samples keep the criterion sharp
  std::vector<int> via_coupling, direct;
  via_coupling.reserve(n);
  direct.reserve(n);
  CounterRng seeder(777001);
  for (int i = 0; i < n; ++i) {
    auto pair = couple_simulate(m, PointConfig(), PointConfig({{0.5, 0.5}}), 12.0,
                                seeder.next_u64());
    via_coupling.push_back(static_cast<int>(pair.first.size()));
  }
  for (int i = 0; i < n; ++i)
    direct.push_back(
        static_cast<int>(simulate(m, PointConfig(), 12.0, seeder.next_u64()).config.size()));
  std::map<int, double> pa, pb;
  for (int c : via_coupling) pa[c] += 1.0 / n;
  for (int c : direct) pb[c] += 1.0 / n;
  double tv = 0.0;
  for (const auto& [k, v] : pa) tv += std::fabs(v - (pb.count(k) ? pb.at(k) : 0.0));
  for (const auto& [k, v] : pb)
    if (!pa.count(k)) tv += v;
  tv *= 0.5;
  std::ostringstream d;
  d << "two-sample count TV = " << tv << " at " << n << " samples each";
  report(3, "coupling marginal correctness", tv < 0.02, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 4. coupling-time bound

void criterion4() {
  Timer t;
  Window w = Window::unit(2, true);
  bool ok = true;
  std::ostringstream d;

  auto strauss = Model::strauss(w, 50.0, 0.9, 0.05);
  auto sp = stein_params_for(strauss);
  auto starts = sample_equilibrium(strauss, 20.0, 1, 1.0, 31415);
  PointConfig xi = starts[0];
  PointConfig eta = xi.with({0.37, 0.41});
  auto mt = mean_coupling_time(strauss, xi, eta, 10000, 2718281);
  bool strauss_ok = mt.timeout_fraction == 0.0 && mt.mean <= sp.c1 + 3.0 * mt.stderr_;
  d << "strauss mean tau " << mt.mean << " (se " << mt.stderr_ << ") vs c1 " << sp.c1;
  ok &= strauss_ok;

  auto pois = Model::poisson(w, 10.0);
  CounterRng seeder(5550123);
  double sum = 0.0, sumsq = 0.0;
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    auto rec = couple(pois, PointConfig(), PointConfig({{0.25, 0.75}}), seeder.next_u64());
    sum += rec.tau;
    sumsq += rec.tau * rec.tau;
  }
  double mean = sum / reps;
  double se = std::sqrt(std::max(sumsq / reps - mean * mean, 0.0) / reps);
  bool pois_ok = std::fabs(mean - 1.0) <= 3.0 * se;
  d << "; poisson control mean " << mean << " (se " << se << ")";
  ok &= pois_ok;
  report(4, "coupling-time bound", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 5. bound ordering over the shipped scenario suite

void criterion5() {
  Timer t;
  bool ok = true;
  std::ostringstream d;
  const std::string dir = GIBBSTV_SCENARIO_DIR;
  const std::vector<std::string> files{
      "strauss_pair_gamma.json", "strauss_pair_range.json", "poisson_vs_hardcore.json",
      "bi_scale_pair.json",      "lennard_jones_pair.json", "area_vs_hardcore.json"};
  for (const auto& f : files) {
    Scenario s = load_scenario(dir + "/" + f);
    auto rep = verify_bounds_report(s);
    bool this_ok = rep.ordering_ok;
    if (s.name == "poisson_vs_hardcore") {
      double expect = 10.0 * 10.0 * unit_ball_volume(2) * std::pow(0.02, 2);
      bool exact = std::fabs(rep.theoretical.bound - expect) <= 1e-12 * expect;
      this_ok = this_ok && exact;
      d << "[hc bound " << rep.theoretical.bound << (exact ? " == " : " != ")
        << "beta^2 alpha_D r^D] ";
    }
    if (s.name == "area_vs_hardcore" && rep.area_lower)
      this_ok = this_ok && *rep.area_lower <= rep.theoretical.bound;
    if (!this_ok) {
      ok = false;
      d << s.name << " FAILED (lower " << rep.empirical_lower << " - 3*" << rep.empirical_se
        << " vs bound " << rep.theoretical.bound << "); ";
    } else {
      d << s.name << " ok; ";
    }
  }
  report(5, "bound ordering on the scenario suite", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 6. area-interaction sandwich

void criterion6() {
  Timer t;
  Window w = Window::unit(2, false);
  bool ok = true;
  std::ostringstream d;
  const double beta0 = 2.0, R = 0.1;
  for (double gamma : {0.9, 0.5, 0.1, 0.01}) {
    double v = unit_ball_volume(2) * std::pow(0.5 * R, 2);
    double beta = beta0 * std::pow(gamma, v);  // calibrated activity
    auto up = tv_bound_area_vs_hardcore(w, beta, gamma, R, beta0);
    auto lo = tv_lower_area(w, beta0, gamma, R, 0.2);
    double id = up.intermediates.at("I_D");
    double closed = up.intermediates.at("I_D_closed_bound");
    if (!(lo.value <= up.bound) || !(id <= closed)) {
      ok = false;
      d << "gamma=" << gamma << " sandwich violated; ";
    }
  }
  double anchor = area_overlap_closed_bound(2, R, 0.01);
  bool anchor_ok = std::fabs(anchor - 0.33046) <= 1e-3;
  ok &= anchor_ok;
  d << "closed bound anchor " << anchor << " (target 0.33046)";
  report(6, "area-interaction sandwich", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 7. GNZ residuals

void criterion7() {
  Timer t;
  Window w = Window::unit(2, true);
  bool ok = true;
  std::ostringstream d;
  auto ones = [](const Point&, const PointConfig&) { return 1.0; };
  auto vacancy = [&w](const Point& x, const PointConfig& cfg) {
    for (const auto& p : cfg.points)
      if (w.dist(x, p) <= 0.1) return 0.0;
    return 1.0;
  };
  std::vector<std::pair<std::string, Model>> models;
  models.emplace_back("poisson", Model::poisson(w, 10.0));
  models.emplace_back("strauss", Model::strauss(w, 20.0, 0.5, 0.08));
  std::uint64_t seed = 90210;
  for (const auto& [name, m] : models) {
    auto g1 = gnz_residual(m, ones, 10000, seed++);
    auto g2 = gnz_residual(m, vacancy, 10000, seed++);
    bool ok1 = std::fabs(g1.residual) <= 3.0 * g1.se;
    bool ok2 = std::fabs(g2.residual) <= 3.0 * g2.se;
    ok &= ok1 && ok2;
    d << name << " h=1: " << g1.residual << "+-" << g1.se << ", ball: " << g2.residual
      << "+-" << g2.se << "; ";
  }
  report(7, "GNZ residuals", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 8. discretization rate

void criterion8() {
  Timer t;
  Window w = Window::unit(2, true);
  auto m = Model::strauss(w, 3.0, 0.9, 0.3);
  auto d2_stats = make_d2_statistics(w, 12, {0.1, 0.3});
  bool ok = true;
  std::ostringstream d;
  std::vector<double> lx, ly;
  CounterRng root(606060);
  for (int n : {5, 10, 20, 40}) {
    auto p = build_grid_partition(w, n);
    auto rep = d2_bound_discrete(m, p, IntensityMode::Envelope);
    lx.push_back(std::log(p.r_V));
    ly.push_back(std::log(rep.bound - p.r_V));
    auto lat = sample_lattice_equilibrium(p, m, 15.0, 2000, 1.0, root.stream(n).next_u64());
    std::vector<PointConfig> lat_pts;
    lat_pts.reserve(lat.size());
    for (const auto& cfg : lat) lat_pts.push_back(lattice_points(p, cfg));
    auto cont = sample_equilibrium(m, 15.0, 2000, 1.0, root.stream(1000 + n).next_u64());
    auto emp = empirical_discrepancy(lat_pts, cont, d2_stats, false);
    if (emp.lower > rep.bound) {
      ok = false;
      d << "n=" << n << ": empirical d2 " << emp.lower << " > bound " << rep.bound << "; ";
    }
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  double slope = sxy / sxx;
  bool slope_ok = std::fabs(slope - 1.0) <= 0.15;
  ok &= slope_ok;
  d << "log-log slope " << slope;
  report(8, "discretization rate", ok, d.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 9. hereditarity and consistency property suites

void criterion9() {
  Timer t;
  Window w2t = Window::unit(2, true);
  Window w2 = Window::unit(2, false);
  Window w3 = Window::unit(3, false);
  bool ok = true;
  std::ostringstream d;

  struct Entry {
    std::string name;
    Model model;
    double rel_tol;
    int reps;
  };
  std::vector<Entry> entries;
  entries.push_back({"poisson", Model::poisson(w2t, 10.0), 1e-10, 1000});
  entries.push_back({"strauss", Model::strauss(w2t, 20.0, 0.5, 0.1), 1e-10, 1000});
  entries.push_back(
      {"hardcore_strauss", Model::hardcore_strauss(w2t, 20.0, 0.05, 0.6, 0.1), 1e-10, 1000});
  entries.push_back(
      {"bi_scale_strauss", Model::bi_scale_strauss(w2t, 10.0, 0.5, 0.05, 0.1, 1.01), 1e-10,
       1000});
  entries.push_back(
      {"conditioned",
       restrict_to_Ak(Model::bi_scale_strauss(w2t, 10.0, 0.5, 0.05, 0.1, 1.01), 2, 0.05),
       1e-10, 1000});
  entries.push_back({"lennard_jones", Model::lennard_jones_classical(w3, 1.0, 0.5, 0.2),
                     1e-10, 1000});
  entries.push_back({"area_interaction", Model::area_interaction(w2, 2.0, 0.5, 0.2, 1e-4),
                     5e-3, 1000});

  CounterRng rng(112358);
  for (const auto& e : entries) {
    const Window& w = e.model.window;
    long consistency_bad = 0, hereditarity_bad = 0;
    for (int rep = 0; rep < e.reps; ++rep) {
      auto eta = random_config(w, 1 + rng.uniform_index(5), rng);
      PointConfig xi;
      for (const auto& p : eta.points)
        if (rng.uniform() < 0.6) xi.add(p);
      double u_xi = unnormalized_density(e.model, xi);
      double u_eta = unnormalized_density(e.model, eta);
      if (u_xi == 0.0 && u_eta != 0.0) ++hereditarity_bad;
      Point x(w.dim);
      for (int i = 0; i < w.dim; ++i) x[i] = rng.uniform(w.lower[i], w.upper[i]);
      if (u_xi > 0.0) {
        double lhs = cond_intensity(e.model, x, xi) * u_xi;
        double rhs = unnormalized_density(e.model, xi.with(x));
        double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
        if (std::fabs(lhs - rhs) > e.rel_tol * scale) ++consistency_bad;
      }
    }
    if (consistency_bad > 0 || hereditarity_bad > 0) {
      ok = false;
      d << e.name << ": " << consistency_bad << " consistency, " << hereditarity_bad
        << " hereditarity violations; ";
    }
  }
  if (ok) d << "all kinds pass at 1000 configurations each";
  report(9, "hereditarity and consistency suites", ok, d.str(), t.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures;
}
