#pragma once

// Dense kernels for the small symmetric positive definite matrices that show
// up as scatter matrices (d is at most a few hundred, usually <= 25).
// Storage is row-major throughout.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace myriad {

using Vector = std::vector<double>;

/// Neumaier-compensated running sum. Accumulation order is the caller's
/// responsibility; given the same order the result is bit-reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// General dense matrix, used for transforms and test fixtures.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  Vector apply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix intended to be positive definite. Construction
/// symmetrizes the input as (m + m^T)/2; positive definiteness is verified
/// lazily by cholesky(), which every consumer goes through.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}
  SpdMatrix(std::size_t dim, std::vector<double> entries);

  static SpdMatrix identity(std::size_t dim, double scale = 1.0);
  static SpdMatrix diagonal(std::span<const double> diag);
  static SpdMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  std::span<const double> entries() const noexcept { return a_; }

  double trace() const noexcept;
  double frobenius_norm() const noexcept;
  SpdMatrix scaled(double factor) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

/// Lower-triangular L with strictly positive diagonal such that m = L L^T.
class CholeskyFactor {
 public:
  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return l_[i * dim_ + j]; }

  /// Solves L y = b.
  Vector solve_lower(std::span<const double> b) const;
  /// Solves L L^T y = b.
  Vector solve(std::span<const double> b) const;
  double logdet() const noexcept;
  /// diff^T (L L^T)^{-1} diff via one forward substitution. `scratch` must
  /// hold dim() doubles; it avoids an allocation in hot loops.
  double quadratic_form(std::span<const double> diff, std::span<double> scratch) const;
  double quadratic_form(std::span<const double> diff) const;
  SpdMatrix reconstruct() const;

 private:
  friend CholeskyFactor cholesky(const SpdMatrix& m);
  std::size_t dim_ = 0;
  std::vector<double> l_;
};

/// Throws Error(NotPositiveDefinite) when a pivot falls to or below
/// 1e-14 * trace(m) / d.
CholeskyFactor cholesky(const SpdMatrix& m);

double mahalanobis(std::span<const double> x, std::span<const double> mu, const SpdMatrix& m);
double logdet(const SpdMatrix& m);
Vector solve_spd(const SpdMatrix& m, std::span<const double> b);

/// A S A^T.
SpdMatrix congruence(const Matrix& a, const SpdMatrix& s);

double norm2(std::span<const double> x) noexcept;

}  // namespace myriad
