#ifndef GIBBSTV_WINDOW_HPP
#define GIBBSTV_WINDOW_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "gibbstv/errors.hpp"

namespace gibbstv {

using Point = std::vector<double>;

/// Axis-aligned box, used both as quadrature cell and as partition cell.
struct Box {
  Point lo;
  Point hi;

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }

  Point midpoint() const {
    Point m(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) m[i] = 0.5 * (lo[i] + hi[i]);
    return m;
  }

  int longest_edge() const {
    int best = 0;
    double len = hi[0] - lo[0];
    for (std::size_t i = 1; i < lo.size(); ++i)
      if (hi[i] - lo[i] > len) {
        len = hi[i] - lo[i];
        best = static_cast<int>(i);
      }
    return best;
  }
};

/// Volume of the Euclidean unit ball in dimension d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// D-dimensional box with Lebesgue reference measure and optional
/// wrap-around (torus) metric.
struct Window {
  int dim = 0;
  Point lower;
  Point upper;
  bool torus = false;

  Window() = default;
  Window(Point lo, Point hi, bool torus_metric = false)
      : dim(static_cast<int>(lo.size())),
        lower(std::move(lo)),
        upper(std::move(hi)),
        torus(torus_metric) {
    if (dim == 0 || upper.size() != lower.size())
      throw ParameterError("Window: dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (!(lower[i] < upper[i]))
        throw ParameterError("Window: requires lower[i] < upper[i]");
  }

  /// Unit box [0,1]^d shortcut.
  static Window unit(int d, bool torus_metric = false) {
    return Window(Point(d, 0.0), Point(d, 1.0), torus_metric);
  }

  double edge(int i) const { return upper[i] - lower[i]; }

  double min_edge() const {
    double m = edge(0);
    for (int i = 1; i < dim; ++i) m = std::min(m, edge(i));
    return m;
  }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= edge(i);
    return v;
  }

  bool contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lower[i] || p[i] > upper[i]) return false;
    return true;
  }

  Point center() const {
    Point c(dim);
    for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
  }

  Box as_box() const { return Box{lower, upper}; }

  double dist_sq(const Point& a, const Point& b) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double d = std::fabs(a[i] - b[i]);
      if (torus) {
        double L = edge(i);
        d = std::fmod(d, L);
        d = std::min(d, L - d);
      }
      s += d * d;
    }
    return s;
  }

  double dist(const Point& a, const Point& b) const { return std::sqrt(dist_sq(a, b)); }

  /// Largest possible distance between two points of the window.
  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double d = torus ? 0.5 * edge(i) : edge(i);
      s += d * d;
    }
    return std::sqrt(s);
  }

  /// Tight per-coordinate bounds for dist(x, c) over x in the cell.
  /// Output satisfies lo <= dist(x,c) <= hi for every x in the cell.
  void cell_dist_bounds(const Box& cell, const Point& c, double* lo, double* hi) const {
    double slo = 0.0, shi = 0.0;
    for (int i = 0; i < dim; ++i) {
      double dlo, dhi;
      if (!torus) {
        double below = c[i] - cell.hi[i];
        double above = cell.lo[i] - c[i];
        dlo = std::max({below, above, 0.0});
        dhi = std::max(cell.hi[i] - c[i], c[i] - cell.lo[i]);
      } else {
        double L = edge(i);
        // wrapped coordinate distance is periodic and piecewise linear with
        // peaks of height L/2 at c + L/2 + kL
        dlo = coord_wrap_dist(cell.lo[i], c[i], L);
        dhi = dlo;
        double db = coord_wrap_dist(cell.hi[i], c[i], L);
        dlo = std::min(dlo, db);
        dhi = std::max(dhi, db);
        // valley (distance 0) inside the cell?
        if (image_in_interval(c[i], cell.lo[i], cell.hi[i], L)) dlo = 0.0;
        // peak (distance L/2) inside the cell?
        if (image_in_interval(c[i] + 0.5 * L, cell.lo[i], cell.hi[i], L)) dhi = 0.5 * L;
      }
      slo += dlo * dlo;
      shi += dhi * dhi;
    }
    *lo = std::sqrt(slo);
    *hi = std::sqrt(shi);
  }

 private:
  static double coord_wrap_dist(double x, double c, double L) {
    double d = std::fmod(std::fabs(x - c), L);
    return std::min(d, L - d);
  }

  /// Is some image v + kL inside [a, b]?
  static bool image_in_interval(double v, double a, double b, double L) {
    double k = std::ceil((a - v) / L);
    return v + k * L <= b;
  }
};

}  // namespace gibbstv

#endif
