#ifndef GIBBSTV_ERRORS_HPP
#define GIBBSTV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gibbstv {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent model/operation parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A model lacks a finite local-stability envelope for the requested operation.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance within budget.
/// Carries the best estimate obtained and its estimated error.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double best, double err)
      : Error(what), best_estimate(best), error_estimate(err) {}
  double best_estimate;
  double error_estimate;
};

/// Series evaluation requested outside its convergence region.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A simulated dominating chain exceeded its level cap.
class ExplosionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gibbstv

#endif
