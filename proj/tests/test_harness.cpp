#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "gibbstv/harness.hpp"

using namespace gibbstv;

namespace {

double poisson_pmf(double lambda, int k) {
  return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

// brute-force oracle: TV between two Poisson count laws
double poisson_tv(double l1, double l2) {
  double tv = 0.0;
  for (int k = 0; k < 200; ++k) tv += std::fabs(poisson_pmf(l1, k) - poisson_pmf(l2, k));
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("statistic families stay in [0,1]", "[harness]") {
  Window w = Window::unit(2, true);
  auto tv = make_tv_statistics(w, 20, {0.02, 0.05});
  auto d2 = make_d2_statistics(w, 20, {0.1, 0.3});
  CounterRng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    PointConfig cfg;
    for (std::size_t i = 0; i < rng.uniform_index(8); ++i)
      cfg.add({rng.uniform(), rng.uniform()});
    for (const auto& s : tv) {
      double v = s.eval(cfg);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (const auto& s : d2) {
      double v = s.eval(cfg);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK_THROWS_AS(make_d2_statistics(w, 5, {2.0}), ParameterError);
}

TEST_CASE("empirical_tv_lower vanishes for identical models", "[harness]") {
  Window w = Window::unit(2, true);
  auto m = Model::strauss(w, 20.0, 0.7, 0.05);
  auto stats = make_tv_statistics(w, 30, {0.02, 0.05});
  auto res = empirical_tv_lower(m, m, stats, 1500, 42);
  CHECK(res.lower <= 3.0 * res.se);
}

TEST_CASE("empirical_tv_lower recovers the Poisson count-law TV", "[harness]") {
  Window w = Window::unit(2, true);
  auto a = Model::poisson(w, 10.0);
  auto b = Model::poisson(w, 12.0);
  auto stats = make_tv_statistics(w, 35, {0.02});
  auto res = empirical_tv_lower(a, b, stats, 4000, 7);
  double oracle = poisson_tv(10.0, 12.0);
  CHECK(std::fabs(res.lower - oracle) < 0.06);
  CHECK(res.lower > 0.15);
}

TEST_CASE("empirical lower stays under the hard-core bound", "[harness]") {
  Window w = Window::unit(2, true);
  auto pois = Model::poisson(w, 10.0);
  auto hc = Model::strauss(w, 10.0, 0.0, 0.02);
  auto stats = make_tv_statistics(w, 35, {0.01, 0.02, 0.03});
  auto res = empirical_tv_lower(pois, hc, stats, 3000, 11);
  double bound = 100.0 * unit_ball_volume(2) * 4e-4;
  CHECK(res.lower - 3.0 * res.se <= bound);
  // the min-pairwise-distance indicator is the discriminating statistic here
  CHECK(res.lower > 0.02);
}

TEST_CASE("GNZ residuals", "[harness]") {
  Window w = Window::unit(2, true);
  auto ones = [](const Point&, const PointConfig&) { return 1.0; };

  auto pois = Model::poisson(w, 10.0);
  auto g = gnz_residual(pois, ones, 1500, 5);
  CHECK(g.rhs == Catch::Approx(10.0).epsilon(1e-12));  // lambda is constant
  CHECK(std::fabs(g.residual) <= 3.0 * g.se);

  auto strauss = Model::strauss(w, 20.0, 0.5, 0.08);
  auto g2 = gnz_residual(strauss, ones, 1500, 6);
  CHECK(std::fabs(g2.residual) <= 3.0 * g2.se);

  // local vacancy indicator h(x, xi) = 1{xi(B(x, r)) = 0}
  auto vac = [&w](const Point& x, const PointConfig& cfg) {
    for (const auto& p : cfg.points)
      if (w.dist(x, p) <= 0.1) return 0.0;
    return 1.0;
  };
  auto g3 = gnz_residual(strauss, vac, 1500, 8);
  CHECK(std::fabs(g3.residual) <= 3.0 * g3.se);
}

TEST_CASE("verify_bounds_report on an identical-models scenario", "[harness]") {
  Window w = Window::unit(2, true);
  Scenario s;
  s.name = "identical";
  s.theorem = TheoremId::InhibitoryPip;
  s.xi = Model::strauss(w, 20.0, 0.8, 0.05);
  s.h = Model::strauss(w, 20.0, 0.8, 0.05);
  s.mc.reps = 1000;
  s.mc.seed = 9;
  auto rep = verify_bounds_report(s);
  CHECK(rep.theoretical.bound == 0.0);
  CHECK(rep.empirical_lower <= 3.0 * rep.empirical_se);
  CHECK(rep.ordering_ok);
  CHECK(rep.gnz.size() == 2);
  for (const auto& g : rep.gnz) CHECK(std::fabs(g.residual) <= 3.5 * g.se);
}

TEST_CASE("verify_bounds_report on a Strauss pair with coupling check", "[harness]") {
  Window w = Window::unit(2, true);
  Scenario s;
  s.name = "strauss_pair";
  s.theorem = TheoremId::InhibitoryPip;
  s.xi = Model::strauss(w, 20.0, 0.8, 0.05);
  s.h = Model::strauss(w, 20.0, 0.9, 0.05);
  s.mc.reps = 1200;
  s.mc.seed = 10;
  s.couple_check = true;
  auto rep = verify_bounds_report(s);
  CHECK(rep.ordering_ok);
  REQUIRE(rep.coupling_mean.has_value());
  CHECK(*rep.coupling_mean <= *rep.coupling_bound + 3.0 * *rep.coupling_se);

  // determinism: identical scenario, identical numbers
  auto rep2 = verify_bounds_report(s);
  CHECK(rep2.theoretical.bound == rep.theoretical.bound);
  CHECK(rep2.empirical_lower == rep.empirical_lower);
  CHECK(rep2.gnz[0].residual == rep.gnz[0].residual);
}

TEST_CASE("scenario bound sweeps general pip k", "[harness]") {
  Window w = Window::unit(2, true);
  Scenario s;
  s.theorem = TheoremId::GeneralPip;
  s.xi = Model::bi_scale_strauss(w, 5.0, 0.5, 0.05, 0.1, 1.01);
  s.h = Model::bi_scale_strauss(w, 5.0, 0.5, 0.05, 0.1, 1.005);
  s.k = 1;
  s.delta = 0.05;
  s.k_sweep = {1, 2};
  s.moment_xi = 10.0;
  s.moment_h = 10.0;
  auto rep = scenario_bound(s);
  bool noted = false;
  for (const auto& n : rep.notes) noted |= n.find("sweep") != std::string::npos;
  CHECK(noted);
}
