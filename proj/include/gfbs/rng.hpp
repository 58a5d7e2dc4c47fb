#pragma once

#include <cstdint>
#include <limits>

#include "gfbs/types.hpp"

namespace gfbs {

// splitmix64 stream. Every random quantity in the library is drawn from one of
// these so that seeded instances are reproducible across platforms; the normal
// variates use Box-Muller on top of the stream rather than std::normal_distribution,
// whose output is implementation-defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);

  // Independent child stream, e.g. one per block of a generated instance.
  SplitMix64 split() { return SplitMix64((*this)()); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gfbs
