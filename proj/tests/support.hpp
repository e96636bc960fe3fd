#pragma once

// Hand-rolled generators and small oracles shared by the test binaries.
// Deliberately built on <random> rather than myriad::Rng so the fixtures do
// not depend on the code under test.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "myriad/estimators.hpp"
#include "myriad/numkernel.hpp"
#include "myriad/sample_set.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  double chi2(double k) { return std::chi_squared_distribution<double>(k)(eng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  std::mt19937_64& engine() { return eng_; }

  /// Square matrix with standard normal entries.
  myriad::Matrix gaussian_matrix(std::size_t d) {
    myriad::Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(i, j) = normal();
    return a;
  }

  /// A^T A + d I.
  myriad::SpdMatrix spd(std::size_t d) {
    const myriad::Matrix a = gaussian_matrix(d);
    std::vector<double> m(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = i == j ? static_cast<double>(d) : 0.0;
        for (std::size_t k = 0; k < d; ++k) s += a(k, i) * a(k, j);
        m[i * d + j] = s;
      }
    return myriad::SpdMatrix(d, m);
  }

  /// Orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
  myriad::Matrix rotation(std::size_t d) {
    myriad::Matrix q = gaussian_matrix(d);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += q(i, j) * q(i, k);
        for (std::size_t i = 0; i < d; ++i) q(i, j) -= dot * q(i, k);
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < d; ++i) nrm += q(i, j) * q(i, j);
      nrm = std::sqrt(nrm);
      for (std::size_t i = 0; i < d; ++i) q(i, j) /= nrm;
    }
    return q;
  }

  /// Well-conditioned invertible matrix: rotation times a positive diagonal.
  myriad::Matrix invertible(std::size_t d) {
    myriad::Matrix q = rotation(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double s = uniform(0.5, 2.0);
      for (std::size_t i = 0; i < d; ++i) q(i, j) *= s;
    }
    return q;
  }

  /// n Student-t draws mu + L z / sqrt(chi2_nu / nu).
  myriad::SampleSet student_t(std::size_t n, const std::vector<double>& mu, const myriad::SpdMatrix& sigma,
                              double nu) {
    const std::size_t d = mu.size();
    const myriad::CholeskyFactor l = myriad::cholesky(sigma);
    std::vector<double> rows(n * d);
    std::vector<double> z(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : z) v = normal();
      const double scale = 1.0 / std::sqrt(chi2(nu) / nu);
      for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c <= r; ++c) s += l(r, c) * z[c];
        rows[i * d + r] = mu[r] + scale * s;
      }
    }
    return myriad::SampleSet(n, d, rows);
  }

  /// Positive weights in [0.5, 1.5], normalized.
  myriad::WeightVector weights(std::size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = uniform(0.5, 1.5);
    return myriad::WeightVector::normalized(std::move(w));
  }

 private:
  std::mt19937_64 eng_;
};

struct Instance {
  myriad::SampleSet x;
  myriad::WeightVector w;
  double nu;
};

/// Random estimation problem from the grid d in {1,2,3,5}, nu in
/// {1,2,5,100}, n = 20 d. Instance i cycles through the grid.
inline Instance feasible_instance(std::size_t i, std::uint64_t seed = 2024) {
  static constexpr std::size_t kDims[] = {1, 2, 3, 5};
  static constexpr double kNus[] = {1.0, 2.0, 5.0, 100.0};
  Gen g(seed + 7919 * i);
  const std::size_t d = kDims[i % 4];
  const double nu = kNus[(i / 4) % 4];
  std::vector<double> mu(d);
  for (auto& m : mu) m = g.uniform(-3.0, 3.0);
  const myriad::SpdMatrix sigma = g.spd(d);
  myriad::SampleSet x = g.student_t(20 * d, mu, sigma, nu);
  myriad::WeightVector w = (i % 3 == 0) ? myriad::WeightVector::uniform(20 * d) : g.weights(20 * d);
  return {std::move(x), std::move(w), nu};
}

/// Applies x -> A x + b to every sample.
inline myriad::SampleSet affine(const myriad::SampleSet& x, const myriad::Matrix& a, const std::vector<double>& b) {
  const std::size_t d = x.dim();
  std::vector<double> rows(x.size() * d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const myriad::Vector y = a.apply(x.row(i));
    for (std::size_t r = 0; r < d; ++r) rows[i * d + r] = y[r] + b[r];
  }
  return myriad::SampleSet(x.size(), d, rows);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testing
