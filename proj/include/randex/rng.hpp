#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace randex {

// SplitMix64 (Steele/Lea/Flood). Trivial to reimplement anywhere, which is
// the point: a transcript is reproducible from its seed on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0,1) with 53 significant bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  bool next_bit() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

// Halton low-discrepancy sequence, used for multistart seeding.
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv_base = 1.0 / base;
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

inline std::vector<double> halton_point(std::uint64_t index, unsigned dims) {
  static constexpr std::array<unsigned, 8> primes{2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<double> p(dims);
  for (unsigned d = 0; d < dims; ++d) p[d] = radical_inverse(index + 1, primes[d % primes.size()]);
  return p;
}

}  // namespace randex
