#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "gibbstv/stein.hpp"

using namespace gibbstv;

namespace {

// Independent oracle for the n*=1 chain value (e^c-1)/c + int_0^c (e^s-1)/s ds,
// the integral evaluated by Simpson refinement.
double tint_value(double c) {
  auto g = [](double s) { return s == 0.0 ? 1.0 : std::expm1(s) / s; };
  int n = 8;
  double prev = 0.0;
  for (int iter = 0; iter < 20; ++iter) {
    double h = c / n;
    double sum = g(0.0) + g(c);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
    double integral = sum * h / 3.0;
    if (iter > 2 && std::fabs(integral - prev) < 1e-13 * std::max(integral, 1.0))
      return std::expm1(c) / c + integral;
    prev = integral;
    n *= 2;
  }
  return std::expm1(c) / c + prev;
}

}  // namespace

TEST_CASE("stein_eps closed forms", "[stein]") {
  Window w = Window::unit(2, true);
  CHECK(stein_eps(Model::poisson(w, 10.0)) == 0.0);
  CHECK(stein_eps(Model::strauss(w, 50.0, 0.5, 0.1)) ==
        Catch::Approx(50.0 * 0.5 * M_PI * 0.01).epsilon(1e-10));
  // phi == 1 recovers the Poisson case
  CHECK(stein_eps(Model::strauss(w, 50.0, 1.0, 0.1)) == Catch::Approx(0.0).margin(1e-15));

  // conditioned bi-scale Strauss matches the closed form
  // eps = alpha_D beta C^(mk) (r^D + (C-1)(R^D - r^D)) with delta = r
  double beta = 5.0, gamma = 0.5, r = 0.05, R = 0.1, C = 1.01;
  auto cond = restrict_to_Ak(Model::bi_scale_strauss(w, beta, gamma, r, R, C), 1, r);
  double m = unit_ball_volume(2) * 2.0 * std::pow(R / r + 1.0, 2);
  double expect =
      unit_ball_volume(2) * beta * std::pow(C, m) * (r * r + (C - 1.0) * (R * R - r * r));
  CHECK(stein_eps(cond) == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("stein_c closed forms", "[stein]") {
  Window w = Window::unit(2, true);
  CHECK(stein_c(Model::poisson(w, 10.0)) == 0.0);
  CHECK(stein_c(Model::strauss(w, 50.0, 0.5, 0.1)) == Catch::Approx(50.0).epsilon(1e-12));
  auto cond = restrict_to_Ak(Model::bi_scale_strauss(w, 5.0, 0.5, 0.05, 0.1, 1.01), 1, 0.05);
  double m = unit_ball_volume(2) * 2.0 * std::pow(3.0, 2);
  CHECK(stein_c(cond) == Catch::Approx(5.0 * std::pow(1.01, m)).epsilon(1e-10));
  Window w3 = Window::unit(3, false);
  CHECK_THROWS_AS(stein_c(Model::lennard_jones_classical(w3, 1.0, 1.0, 0.1)),
                  StabilityError);
}

TEST_CASE("choose_nstar", "[stein]") {
  CHECK(choose_nstar(0.5, 10.0) == 20.0);
  CHECK(choose_nstar(0.0, 3.0) == 1.0);
  CHECK(choose_nstar(0.7, 0.0) == 1.0);
  CHECK(choose_nstar(0.3, 1.0) == 4.0);
}

TEST_CASE("c1_upper exact cases", "[stein]") {
  // eps = 0 (Poisson regime): exactly 1
  CHECK(c1_upper(0.0, 0.0, 1).c1 == 1.0);
  CHECK(c1_upper(0.0, 5.0, 2).c1 == 1.0);
  CHECK(c1_upper(0.0, 2.0, kNStarInfinity).c1 == 1.0);

  // eps-only regime: (1+eps)/eps log(1/(1-eps))
  CHECK(c1_upper(0.5, 7.0, kNStarInfinity).c1 ==
        Catch::Approx(3.0 * std::log(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(c1_upper(1.0, 1.0, kNStarInfinity), DivergenceError);

  // n* = 1 chain: anchor value and quadrature oracle
  double v = c1_upper(0.3, 1.0, 1).c1;
  CHECK(v == Catch::Approx(3.0361840).margin(1e-6));
  CHECK(v == Catch::Approx(tint_value(1.0)).epsilon(1e-11));
  CHECK(c1_upper(0.9, 1.0, 1).c1 == Catch::Approx(v).epsilon(1e-12));  // eps-free
  CHECK(c1_upper(0.3, 5.0, 1).c1 == Catch::Approx(tint_value(5.0)).epsilon(1e-10));

  // c = 0: a_{n*} = 1/n*
  auto p = c1_upper(0.5, 0.0, 3);
  double expect = std::pow(0.5, 2) / 3.0 + 3.0 * (0.5 + 0.25 / 2.0);
  CHECK(p.c1 == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("c1_upper limit continuity", "[stein]") {
  // eps -> 0+ approaches the eps = 0 value for n* >= 2
  double near0 = c1_upper(1e-9, 2.0, 5).c1;
  CHECK(near0 == Catch::Approx(1.0).margin(1e-6));
  // c -> 0+ approaches the c = 0 value
  double nearc = c1_upper(0.4, 1e-12, 4).c1;
  double at0 = c1_upper(0.4, 0.0, 4).c1;
  CHECK(nearc == Catch::Approx(at0).epsilon(1e-9));
}

TEST_CASE("c1_upper monotone in eps and c", "[stein]") {
  for (double c : {0.5, 1.0, 5.0}) {
    double prev = 0.0;
    for (double eps : {0.05, 0.2, 0.4, 0.6, 0.8}) {
      double v = c1_upper(eps, c, 4).c1;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
  for (double eps : {0.2, 0.6}) {
    double prev = 0.0;
    for (double c : {0.1, 0.5, 1.0, 2.0, 8.0}) {
      double v = c1_upper(eps, c, 4).c1;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
  // c1 >= 1 always
  for (double eps : {0.0, 0.3, 0.9})
    for (double c : {0.0, 1.0, 10.0})
      for (double n : {1.0, 2.0, 7.0}) CHECK(c1_upper(eps, c, n).c1 >= 1.0 - 1e-12);
}

TEST_CASE("ceil(c/eps) is optimal among neighbouring n*", "[stein]") {
  for (double eps : {0.1, 0.3, 0.7}) {
    for (double c : {0.5, 1.0, 5.0, 20.0}) {
      double nopt = choose_nstar(eps, c);
      double best = c1_upper(eps, c, nopt).c1;
      for (double d : {-2.0, -1.0, 1.0, 2.0}) {
        double n = nopt + d;
        if (n < 1) continue;
        CHECK(best <= c1_upper(eps, c, n).c1 * (1 + 1e-10));
      }
    }
  }
}

TEST_CASE("oracle matches trivial cases", "[stein]") {
  auto res = e1_mc_oracle(0.0, 0.0, 1, 20000, 42);
  CHECK(std::fabs(res.mean - 1.0) <= 3.0 * res.stderr_);
  CHECK(res.stderr_ < 0.02);
}

TEST_CASE("oracle agrees with the series on a small grid", "[stein]") {
  // smaller replica counts here; the acceptance suite runs the full grid
  for (double eps : {0.0, 0.3}) {
    for (double c : {0.5, 1.0}) {
      for (long nstar : {1L, 2L}) {
        auto series = c1_upper(eps, c, static_cast<double>(nstar));
        auto mc = e1_mc_oracle(eps, c, nstar, 20000, 7);
        INFO("eps=" << eps << " c=" << c << " nstar=" << nstar);
        CHECK(std::fabs(mc.mean - series.c1) <=
              3.0 * mc.stderr_ + series.truncation_error + 1e-9);
      }
    }
  }
}

TEST_CASE("oracle matches the series at a larger anchor", "[stein]") {
  // eps = 0.5, c = 10, n* = ceil(c/eps) = 20
  auto series = c1_upper(0.5, 10.0, 20.0);
  auto mc = e1_mc_oracle(0.5, 10.0, 20, 100000, 13);
  CHECK(std::fabs(mc.mean - series.c1) <= 3.0 * mc.stderr_ + series.truncation_error);
}

TEST_CASE("oracle explosion guard", "[stein]") {
  CHECK_THROWS_AS(e1_mc_oracle(80.0, 1e7, 1, 1, 3), ExplosionError);
}

TEST_CASE("stein params from a model", "[stein]") {
  Window w = Window::unit(2, true);
  auto h = Model::strauss(w, 50.0, 0.9, 0.05);
  auto sp = stein_params_for(h);
  double eps = 50.0 * 0.1 * M_PI * 0.0025;
  CHECK(sp.eps == Catch::Approx(eps).epsilon(1e-9));
  CHECK(sp.c == Catch::Approx(50.0).epsilon(1e-12));
  double closed = (1 + eps) / eps * std::log(1.0 / (1.0 - eps));
  CHECK(sp.c1 <= closed * (1 + 1e-9));
  CHECK(sp.c1 >= 1.0);
}