#pragma once

#include <cstdint>

namespace lfosc {

/// splitmix64 stream. Used for synthetic-data draws so that the value attached
/// to a given (seed, prime) pair never depends on the series limit or on the
/// order primes are visited.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 s(seed ^ (0x6a09e667f3bcc909ULL + salt * 0x517cc1b727220a95ULL));
  s.next();
  return s.next();
}

} // namespace lfosc
