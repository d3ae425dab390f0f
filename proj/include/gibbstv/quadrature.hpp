#ifndef GIBBSTV_QUADRATURE_HPP
#define GIBBSTV_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/window.hpp"

namespace gibbstv {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
};

namespace detail {

inline void split_box(const Box& b, std::vector<Box>* out) {
  const int d = static_cast<int>(b.lo.size());
  const std::size_t n = std::size_t{1} << d;
  out->clear();
  Point mid = b.midpoint();
  for (std::size_t mask = 0; mask < n; ++mask) {
    Box c = b;
    for (int i = 0; i < d; ++i) {
      if (mask & (std::size_t{1} << i))
        c.lo[i] = mid[i];
      else
        c.hi[i] = mid[i];
    }
    out->push_back(std::move(c));
  }
}

struct QuadCell {
  double value;  // Richardson-extrapolated estimate
  double error;
  long id;       // insertion order, for deterministic tie-breaking
  Box box;
};

struct QuadCellWorse {
  bool operator()(const QuadCell& a, const QuadCell& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.id > b.id;
  }
};

template <typename F>
QuadCell eval_cell(const F& f, Box box, long id, long* evals) {
  const int d = static_cast<int>(box.lo.size());
  const double vol = box.volume();
  std::vector<double> vals;
  vals.reserve(std::size_t{1} << (d + 1));
  const double coarse = f(box.midpoint()) * vol;
  vals.push_back(f(box.midpoint()));
  std::vector<Box> children;
  split_box(box, &children);
  double fine = 0.0;
  for (const auto& c : children) {
    double v = f(c.midpoint());
    vals.push_back(v);
    fine += v * c.volume();
  }
  // corner samples: straddle detection for piecewise-constant integrands
  Point corner(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    for (int i = 0; i < d; ++i)
      corner[i] = (mask & (std::size_t{1} << i)) ? box.hi[i] : box.lo[i];
    vals.push_back(f(corner));
  }
  *evals += static_cast<long>(vals.size());

  // midpoint rule is second order; one Richardson step per cell
  const double extrap = fine + (fine - coarse) / 3.0;
  double err = std::fabs(fine - coarse) / 3.0;

  // Integrands that are locally two-valued (indicators, piecewise-constant
  // interactions) defeat the Richardson estimate on cells whose samples all
  // agree by side. For such cells the spread itself is the only usable
  // error signal; smooth integrands take many distinct values and skip this.
  double vmin = vals[0], vmax = vals[0];
  for (double v : vals) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax > vmin) {
    bool two_valued = true;
    for (double v : vals)
      if (v != vmin && v != vmax) {
        two_valued = false;
        break;
      }
    if (two_valued) err = std::max(err, 0.25 * (vmax - vmin) * vol);
  }
  return QuadCell{extrap, err, id, std::move(box)};
}

}  // namespace detail

/// Adaptive tensor quadrature of f over the box: dyadic subdivision with a
/// midpoint rule, Richardson error estimates, and global worst-cell-first
/// refinement until the summed error estimate is at most tol.
/// Deterministic given (f, tol).
template <typename F>
QuadResult integrate_box(const F& f, const Box& box, double tol,
                         long max_evals = 20'000'000) {
  if (!(tol > 0)) throw ParameterError("integrate: tol must be positive");
  long evals = 0;
  long next_id = 0;
  std::priority_queue<detail::QuadCell, std::vector<detail::QuadCell>, detail::QuadCellWorse>
      heap;
  double value = 0.0, error = 0.0;

  // seed at depth 2 so symmetric integrands do not fool the error estimate
  std::vector<Box> seed{box}, tmp, split;
  for (int level = 0; level < 2; ++level) {
    tmp.clear();
    for (const auto& b : seed) {
      detail::split_box(b, &split);
      for (auto& c : split) tmp.push_back(std::move(c));
    }
    seed.swap(tmp);
  }
  for (auto& b : seed) {
    auto cell = detail::eval_cell(f, std::move(b), next_id++, &evals);
    value += cell.value;
    error += cell.error;
    heap.push(std::move(cell));
  }

  while (error > tol && !heap.empty()) {
    if (evals > max_evals)
      throw QuadratureError("integrate: evaluation budget exhausted", value, error);
    detail::QuadCell worst = heap.top();
    heap.pop();
    value -= worst.value;
    error -= worst.error;
    detail::split_box(worst.box, &split);
    for (auto& c : split) {
      auto cell = detail::eval_cell(f, std::move(c), next_id++, &evals);
      value += cell.value;
      error += cell.error;
      heap.push(std::move(cell));
    }
  }
  return QuadResult{value, error, evals};
}

template <typename F>
QuadResult integrate_window(const Window& w, const F& f, double tol,
                            long max_evals = 20'000'000) {
  return integrate_box(f, w.as_box(), tol, max_evals);
}

enum class CellClass { Inside, Outside, Ambiguous };

/// Measure of {x in domain : x inside region} where classify() gives sound
/// inside/outside verdicts per cell. Refines ambiguous cells breadth-first
/// until their total volume is below 2*abs_tol, then assigns half of it.
/// The returned value is within abs_tol of the true measure.
template <typename Classify>
double measure_classified(const Box& domain, const Classify& classify, double abs_tol,
                          std::size_t max_cells = 50'000'000) {
  if (!(abs_tol > 0)) throw ParameterError("measure: tol must be positive");
  double inside = 0.0;
  std::vector<Box> ambiguous;
  switch (classify(domain)) {
    case CellClass::Inside:
      return domain.volume();
    case CellClass::Outside:
      return 0.0;
    case CellClass::Ambiguous:
      ambiguous.push_back(domain);
  }
  std::size_t processed = 0;
  std::vector<Box> next;
  std::vector<Box> kids;
  while (true) {
    double ambig_vol = 0.0;
    for (const auto& b : ambiguous) ambig_vol += b.volume();
    if (ambig_vol <= 2.0 * abs_tol || ambiguous.empty())
      return inside + 0.5 * ambig_vol;
    if (processed > max_cells)
      throw QuadratureError("measure: cell budget exhausted", inside + 0.5 * ambig_vol,
                            0.5 * ambig_vol);
    next.clear();
    for (const auto& b : ambiguous) {
      detail::split_box(b, &kids);
      processed += kids.size();
      for (auto& c : kids) {
        switch (classify(c)) {
          case CellClass::Inside:
            inside += c.volume();
            break;
          case CellClass::Outside:
            break;
          case CellClass::Ambiguous:
            next.push_back(std::move(c));
        }
      }
    }
    ambiguous.swap(next);
  }
}

struct FracClass {
  CellClass cls = CellClass::Ambiguous;
  double frac = 0.5;  // estimated inside-fraction for ambiguous cells
};

/// Like measure_classified, but ambiguous cells contribute an estimated
/// inside-fraction (linear in the signed boundary distance). For smooth
/// boundaries this converges at second order; stopping is by stabilization
/// of consecutive refinement levels.
template <typename ClassifyFrac>
double measure_classified_smooth(const Box& domain, const ClassifyFrac& classify,
                                 double abs_tol, std::size_t max_cells = 20'000'000) {
  if (!(abs_tol > 0)) throw ParameterError("measure: tol must be positive");
  double inside = 0.0;
  std::vector<Box> ambiguous;
  {
    FracClass fc = classify(domain);
    if (fc.cls == CellClass::Inside) return domain.volume();
    if (fc.cls == CellClass::Outside) return 0.0;
    ambiguous.push_back(domain);
  }
  double prev = std::numeric_limits<double>::quiet_NaN();
  std::size_t processed = 0;
  std::vector<Box> next, kids;
  std::vector<double> fracs{0.5};
  for (int level = 1;; ++level) {
    double est = inside;
    for (std::size_t i = 0; i < ambiguous.size(); ++i)
      est += fracs[i] * ambiguous[i].volume();
    if (ambiguous.empty()) return est;
    if (level > 3 && std::fabs(est - prev) <= 0.5 * abs_tol) return est;
    if (processed > max_cells) {
      double ambig_vol = 0.0;
      for (const auto& b : ambiguous) ambig_vol += b.volume();
      throw QuadratureError("measure: cell budget exhausted", est, 0.5 * ambig_vol);
    }
    prev = est;
    next.clear();
    std::vector<double> next_fracs;
    for (const auto& b : ambiguous) {
      detail::split_box(b, &kids);
      processed += kids.size();
      for (auto& c : kids) {
        FracClass fc = classify(c);
        switch (fc.cls) {
          case CellClass::Inside:
            inside += c.volume();
            break;
          case CellClass::Outside:
            break;
          case CellClass::Ambiguous:
            next.push_back(std::move(c));
            next_fracs.push_back(std::min(1.0, std::max(0.0, fc.frac)));
        }
      }
    }
    ambiguous.swap(next);
    fracs.swap(next_fracs);
  }
}

/// Lebesgue measure of the metric ball B(center, r) intersected with the
/// window (wrapped ball under the torus metric). Closed form when the ball
/// is interior, cell-classification quadrature otherwise.
inline double ball_measure(const Window& w, const Point& center, double r,
                           double abs_tol = 1e-7) {
  if (r < 0) throw ParameterError("ball_measure: negative radius");
  if (r == 0.0) return 0.0;
  const double full = unit_ball_volume(w.dim) * std::pow(r, w.dim);
  if (w.torus) {
    if (2.0 * r <= w.min_edge()) return full;
    if (r >= w.diameter()) return w.volume();
  } else {
    bool interior = true;
    bool covers_all = true;
    for (int i = 0; i < w.dim; ++i) {
      if (center[i] - r < w.lower[i] || center[i] + r > w.upper[i]) interior = false;
      double far = std::max(center[i] - w.lower[i], w.upper[i] - center[i]);
      if (far * far * w.dim > r * r) covers_all = false;  // conservative
    }
    if (interior) return full;
    if (covers_all && w.dist(center, w.lower) <= r && w.dist(center, w.upper) <= r) {
      // check all corners
      bool all = true;
      for (std::size_t mask = 0; mask < (std::size_t{1} << w.dim) && all; ++mask) {
        Point corner(w.dim);
        for (int i = 0; i < w.dim; ++i)
          corner[i] = (mask & (std::size_t{1} << i)) ? w.upper[i] : w.lower[i];
        all = w.dist(center, corner) <= r;
      }
      if (all) return w.volume();
    }
  }
  auto classify = [&](const Box& cell) {
    double lo, hi;
    w.cell_dist_bounds(cell, center, &lo, &hi);
    if (hi <= r) return FracClass{CellClass::Inside, 1.0};
    if (lo > r) return FracClass{CellClass::Outside, 0.0};
    return FracClass{CellClass::Ambiguous, (r - lo) / std::max(hi - lo, 1e-300)};
  };
  return measure_classified_smooth(w.as_box(), classify, abs_tol);
}

}  // namespace gibbstv

#endif
