#pragma once

// Counter-based deterministic RNG.  splitmix64 applied to (seed, stream,
// counter) gives reproducible, order-independent draws: sample k of stream s
// is the same number no matter how many other streams were consumed first.
// That property is what makes the Monte Carlo results bit-stable across
// refactorings of the evaluation loop.

#include <cstdint>

namespace glab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(splitmix64(splitmix64(seed) ^ (0xd1342543de82ef95ULL * (stream + 1)))) {}

  std::uint64_t next_u64() { return splitmix64(base_ ^ counter_++); }

  // uniform in [0,1): top 53 bits, exactly representable
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo,hi)
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  void skip_to(std::uint64_t counter) { counter_ = counter; }
  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

} // namespace glab
