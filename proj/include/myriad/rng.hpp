#pragma once

// Reproducible random variates.
//
// The bit source is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. All transforms to uniform, normal, gamma and Cauchy variates
// are implemented here rather than taken from <random> distributions, whose
// algorithms are implementation-defined. A 64-bit seed therefore yields the
// same variates on every conforming platform.
//
//   uniform()  : (u64 >> 11) * 2^-53, in [0, 1)
//   normal()   : Marsaglia polar method, caching the second variate
//   gamma()    : Marsaglia-Tsang squeeze; shape < 1 boosted via U^(1/shape)
//   cauchy()   : loc + scale * tan(pi * (U - 1/2)), U in (0, 1)

#include <cstdint>
#include <random>

namespace myriad {

class Rng {
 public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  /// Gamma variate with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  double cauchy(double loc, double scale);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a master seed and an index
/// (splitmix64 finalizer applied twice), so stream i does not depend on how
/// many other streams exist.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace myriad
