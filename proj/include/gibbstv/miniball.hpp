#ifndef GIBBSTV_MINIBALL_HPP
#define GIBBSTV_MINIBALL_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "gibbstv/window.hpp"

namespace gibbstv {
namespace detail {

struct EnclosingBall {
  Point center;
  double r2 = -1.0;  // negative: empty ball
  bool contains(const Point& p, double slack) const {
    if (r2 < 0) return false;
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double d = p[i] - center[i];
      s += d * d;
    }
    return s <= r2 * (1.0 + slack) + 1e-300;
  }
};

/// Smallest ball with the support points on its boundary (circumball of an
/// affinely independent set, |S| <= D+1).
inline EnclosingBall circumball(const std::vector<Point>& support, int dim) {
  EnclosingBall b;
  if (support.empty()) return b;
  if (support.size() == 1) {
    b.center = support[0];
    b.r2 = 0.0;
    return b;
  }
  const int m = static_cast<int>(support.size()) - 1;
  // solve 2 (q_i - q_0) . (c - q_0) = |q_i - q_0|^2 for c in the affine hull
  std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
  std::vector<Point> e(m, Point(dim));
  for (int i = 0; i < m; ++i) {
    double n2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      e[i][d] = support[i + 1][d] - support[0][d];
      n2 += e[i][d] * e[i][d];
    }
    A[i][m] = 0.5 * n2;
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += e[i][d] * e[j][d];
      A[i][j] = dot;
    }
  // Gaussian elimination with partial pivoting
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int row = col + 1; row < m; ++row)
      if (std::fabs(A[row][col]) > std::fabs(A[piv][col])) piv = row;
    if (std::fabs(A[piv][col]) < 1e-14) return b;  // degenerate support
    std::swap(A[piv], A[col]);
    for (int row = 0; row < m; ++row) {
      if (row == col) continue;
      double f = A[row][col] / A[col][col];
      for (int c2 = col; c2 <= m; ++c2) A[row][c2] -= f * A[col][c2];
    }
  }
  b.center = support[0];
  for (int i = 0; i < m; ++i) {
    double lam = A[i][m] / A[i][i];
    for (int d = 0; d < dim; ++d) b.center[d] += lam * e[i][d];
  }
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    double df = b.center[d] - support[0][d];
    r2 += df * df;
  }
  b.r2 = r2;
  return b;
}

inline EnclosingBall welzl(std::vector<const Point*>& pts, std::size_t n,
                           std::vector<Point>& support, int dim) {
  if (n == 0 || support.size() == static_cast<std::size_t>(dim) + 1)
    return circumball(support, dim);
  const Point* p = pts[n - 1];
  EnclosingBall b = welzl(pts, n - 1, support, dim);
  if (b.contains(*p, 1e-12)) return b;
  support.push_back(*p);
  b = welzl(pts, n - 1, support, dim);
  support.pop_back();
  return b;
}

}  // namespace detail

/// Radius of the smallest enclosing Euclidean ball of a small point set.
inline double miniball_radius(const std::vector<Point>& pts, int dim) {
  if (pts.empty()) return 0.0;
  std::vector<const Point*> ptrs;
  ptrs.reserve(pts.size());
  for (const auto& p : pts) ptrs.push_back(&p);
  std::vector<Point> support;
  auto ball = detail::welzl(ptrs, ptrs.size(), support, dim);
  return ball.r2 <= 0 ? 0.0 : std::sqrt(ball.r2);
}

}  // namespace gibbstv

#endif
