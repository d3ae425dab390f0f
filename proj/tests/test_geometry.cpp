#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gibbstv/geometry.hpp"
#include "gibbstv/rng.hpp"

using namespace gibbstv;

namespace {

PointConfig random_config(const Window& w, std::size_t n, CounterRng& rng) {
  PointConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(w.dim);
    for (int d = 0; d < w.dim; ++d) p[d] = rng.uniform(w.lower[d], w.upper[d]);
    cfg.add(p);
  }
  return cfg;
}

// Independent oracle: midpoint-grid count of a ball's indicator.
double grid_ball_measure(const Window& w, const Point& c, double r, int n_per_dim) {
  double cell = 1.0;
  for (int d = 0; d < w.dim; ++d) cell *= w.edge(d) / n_per_dim;
  long count = 0;
  std::vector<int> idx(w.dim, 0);
  while (true) {
    Point p(w.dim);
    for (int d = 0; d < w.dim; ++d)
      p[d] = w.lower[d] + (idx[d] + 0.5) * w.edge(d) / n_per_dim;
    if (w.dist(p, c) <= r) ++count;
    int d = 0;
    while (d < w.dim && ++idx[d] == n_per_dim) idx[d++] = 0;
    if (d == w.dim) break;
  }
  return count * cell;
}

// Brute-force optimal assignment for small n.
double brute_assignment(const std::vector<double>& cost, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += cost[i * n + perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("ball_measure closed forms and quadrature", "[geometry]") {
  Window torus = Window::unit(2, true);
  CHECK(ball_measure(torus, {0.5, 0.5}, 0.1) == Catch::Approx(M_PI * 0.01).epsilon(1e-12));
  // translation invariance on the torus: wrapped ball at the corner
  CHECK(ball_measure(torus, {0.0, 0.0}, 0.1) == Catch::Approx(M_PI * 0.01).epsilon(1e-12));
  CHECK(ball_measure(torus, {0.3, 0.9}, 0.0) == 0.0);

  Window plain = Window::unit(2, false);
  double oracle = grid_ball_measure(plain, {0.0, 0.0}, 0.1, 2000);
  double got = ball_measure(plain, {0.0, 0.0}, 0.1, 1e-7);
  CHECK(got == Catch::Approx(0.25 * M_PI * 0.01).margin(1e-6));
  CHECK(got == Catch::Approx(oracle).margin(2e-5));
  CHECK(ball_measure(plain, {0.5, 0.5}, 0.1) == Catch::Approx(M_PI * 0.01).epsilon(1e-12));
  // ball covering the whole window
  CHECK(ball_measure(plain, {0.5, 0.5}, 2.0) == 1.0);
}

TEST_CASE("ball_measure is monotone in r", "[geometry]") {
  Window w = Window::unit(2, true);
  double prev = 0.0;
  for (double r : {0.05, 0.2, 0.4, 0.6, 0.9}) {
    double m = ball_measure(w, {0.25, 0.75}, r, 1e-5);
    CHECK(m >= prev - 1e-12);
    prev = m;
  }
  CHECK(prev <= w.volume() + 1e-12);
}

TEST_CASE("torus ball equals alpha_D r^D below the wrap threshold", "[geometry]") {
  Window w3({0, 0, 0}, {1, 2, 1.5}, true);
  double r = 0.45;
  CHECK(ball_measure(w3, {0.1, 1.9, 0.2}, r) ==
        Catch::Approx(unit_ball_volume(3) * std::pow(r, 3)).epsilon(1e-12));
}

TEST_CASE("wrapped ball beyond the closed-form regime", "[geometry]") {
  // r > min_edge/2: the wrapped ball overlaps its own images
  Window w = Window::unit(2, true);
  Point c{0.2, 0.7};
  double r = 0.583;
  double smooth = ball_measure(w, c, r, 1e-7);
  double grid = grid_ball_measure(w, c, r, 2000);
  CHECK(smooth == Catch::Approx(grid).margin(5e-4));
  // certified classification agrees with the smooth refinement
  auto classify = [&](const Box& cell) {
    double lo, hi;
    w.cell_dist_bounds(cell, c, &lo, &hi);
    if (hi <= r) return CellClass::Inside;
    if (lo > r) return CellClass::Outside;
    return CellClass::Ambiguous;
  };
  double certified = measure_classified(w.as_box(), classify, 1e-4);
  CHECK(smooth == Catch::Approx(certified).margin(2e-4));
}

TEST_CASE("torus cell distance bounds are sound", "[geometry]") {
  Window w({0, 0}, {1.0, 2.0}, true);
  CounterRng rng(314);
  for (int rep = 0; rep < 300; ++rep) {
    Box cell;
    cell.lo = {rng.uniform(0.0, 0.9), rng.uniform(0.0, 1.8)};
    cell.hi = {cell.lo[0] + rng.uniform(0.01, 0.1), cell.lo[1] + rng.uniform(0.01, 0.2)};
    Point c{rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0)};
    double lo, hi;
    w.cell_dist_bounds(cell, c, &lo, &hi);
    for (int probe = 0; probe < 20; ++probe) {
      Point x{rng.uniform(cell.lo[0], cell.hi[0]), rng.uniform(cell.lo[1], cell.hi[1])};
      double d = w.dist(x, c);
      CHECK(d >= lo - 1e-12);
      CHECK(d <= hi + 1e-12);
    }
  }
}

TEST_CASE("symdiff_norm basics", "[geometry]") {
  PointConfig a({{0.1, 0.1}, {0.2, 0.2}});
  PointConfig b({{0.2, 0.2}, {0.3, 0.3}});
  CHECK(symdiff_norm(a, b) == 2);
  CHECK(symdiff_norm(a, a) == 0);
  CHECK(symdiff_norm(PointConfig({{0.5, 0.5}}), PointConfig()) == 1);
  // multiset semantics: duplicated coordinates count with multiplicity
  PointConfig dup({{0.1, 0.1}, {0.1, 0.1}});
  CHECK(symdiff_norm(dup, a) == 2);
}

TEST_CASE("symdiff_norm is a metric on random configs", "[geometry]") {
  Window w = Window::unit(2);
  CounterRng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    auto x = random_config(w, rng.uniform_index(5), rng);
    auto y = random_config(w, rng.uniform_index(5), rng);
    auto z = random_config(w, rng.uniform_index(5), rng);
    CHECK(symdiff_norm(x, y) == symdiff_norm(y, x));
    CHECK(symdiff_norm(x, z) <= symdiff_norm(x, y) + symdiff_norm(y, z));
    CHECK(symdiff_norm(x, x) == 0);
    if (symdiff_norm(x, y) == 0) {
      CHECK(x.size() == y.size());
    }
  }
}

TEST_CASE("d1_distance examples", "[geometry]") {
  Window w = Window::unit(2);
  CHECK(d1_distance(w, PointConfig({{0.1, 0.1}}), PointConfig({{0.1, 0.1}, {0.2, 0.2}})) == 1.0);
  CHECK(d1_distance(w, PointConfig({{0.0, 0.0}}), PointConfig({{0.3, 0.0}})) ==
        Catch::Approx(0.3).epsilon(1e-12));
  PointConfig p({{0.0, 0.0}, {1.0, 0.0}});
  PointConfig q({{1.0, 0.0}, {0.0, 0.0}});
  CHECK(d1_distance(w, p, q) == 0.0);
  CHECK(d1_distance(w, PointConfig(), PointConfig()) == 0.0);
}

TEST_CASE("d1_distance agrees with brute-force assignment", "[geometry]") {
  Window w = Window::unit(2);
  CounterRng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    std::size_t n = 1 + rng.uniform_index(6);
    auto x = random_config(w, n, rng);
    auto y = random_config(w, n, rng);
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        cost[i * n + j] = std::min(w.dist(x.points[i], y.points[j]), 1.0);
    double expected = brute_assignment(cost, static_cast<int>(n)) / n;
    CHECK(d1_distance(w, x, y) == Catch::Approx(expected).margin(1e-12));
    CHECK(d1_distance(w, x, y) == Catch::Approx(d1_distance(w, y, x)).margin(1e-12));
    double v = d1_distance(w, x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("d1_distance permutation invariance and size cap", "[geometry]") {
  Window w = Window::unit(2);
  CounterRng rng(11);
  auto x = random_config(w, 8, rng);
  auto y = random_config(w, 8, rng);
  auto xs = x;
  std::reverse(xs.points.begin(), xs.points.end());
  CHECK(d1_distance(w, x, y) == Catch::Approx(d1_distance(w, xs, y)).margin(1e-12));
  auto big = random_config(w, 65, rng);
  auto big2 = random_config(w, 65, rng);
  CHECK_THROWS_AS(d1_distance(w, big, big2), ParameterError);
}

TEST_CASE("integrate_window on constants and indicators", "[geometry]") {
  Window w = Window::unit(2);
  auto one = [](const Point&) { return 1.0; };
  CHECK(integrate_window(w, one, 1e-9).value == Catch::Approx(1.0).epsilon(1e-9));
  auto fifty = [](const Point&) { return 50.0; };
  CHECK(integrate_window(w, fifty, 1e-9).value == Catch::Approx(50.0).epsilon(1e-9));

  Point c{0.5, 0.5};
  auto ind = [&](const Point& x) { return w.dist(x, c) <= 0.1 ? 1.0 : 0.0; };
  double tol = 2e-4;
  auto res = integrate_window(w, ind, tol, 60'000'000);
  double ball = ball_measure(w, c, 0.1, 1e-8);
  CHECK(std::fabs(res.value - ball) <= 2 * tol + res.error);
}

TEST_CASE("integrate_window reports budget exhaustion", "[geometry]") {
  Window w = Window::unit(2);
  Point c{0.5, 0.5};
  auto ind = [&](const Point& x) { return w.dist(x, c) <= 0.37 ? 1.0 : 0.0; };
  CHECK_THROWS_AS(integrate_window(w, ind, 1e-14, 2000), QuadratureError);
  try {
    integrate_window(w, ind, 1e-14, 2000);
  } catch (const QuadratureError& e) {
    CHECK(e.best_estimate > 0.0);
    CHECK(e.error_estimate >= 0.0);
  }
}
