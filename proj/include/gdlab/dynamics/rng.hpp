#pragma once

#include <cstdint>

namespace gdlab::dynamics {

/// Counter-based generator: the k-th draw of stream s under seed z is a pure
/// function of (z, s, k), so any stream can be replayed or split off without
/// shared state. Output is SplitMix64 applied to a keyed counter.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gdlab::dynamics
