#ifndef GIBBSTV_RNG_HPP
#define GIBBSTV_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gibbstv {

/// Counter-based random stream: the n-th draw is a pure function of
/// (seed, stream, n), so replicas keyed by distinct streams produce the
/// same output regardless of scheduling or interleaving.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + 0x632be59bd9b4e019ULL) ^ mix(stream + 0x9e3779b97f4a7c15ULL)),
        counter_(0) {}

  /// Independent substream, e.g. one per replica.
  CounterRng stream(std::uint64_t tag) const { return CounterRng(key_, tag + 1); }

  std::uint64_t next_u64() { return mix(key_ + mix(counter_++)); }

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(static_cast<double>(n) * uniform());
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace gibbstv

#endif
