#include "myriad/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "myriad/error.hpp"

namespace myriad {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": expected length " +
                                             std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require_dim(row.size(), c, "Matrix::from_rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::apply(std::span<const double> x) const {
  require_dim(x.size(), cols_, "Matrix::apply");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

SpdMatrix::SpdMatrix(std::size_t dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
  require_dim(a_.size(), dim * dim, "SpdMatrix");
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      const double avg = 0.5 * (a_[i * dim_ + j] + a_[j * dim_ + i]);
      a_[i * dim_ + j] = avg;
      a_[j * dim_ + i] = avg;
    }
  }
}

SpdMatrix SpdMatrix::identity(std::size_t dim, double scale) {
  SpdMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = scale;
  return m;
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> diag) {
  SpdMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.a_[i * diag.size() + i] = diag[i];
  return m;
}

SpdMatrix SpdMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t d = rows.size();
  std::vector<double> e;
  e.reserve(d * d);
  for (const auto& row : rows) {
    require_dim(row.size(), d, "SpdMatrix::from_rows");
    e.insert(e.end(), row.begin(), row.end());
  }
  return SpdMatrix(d, std::move(e));
}

double SpdMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += a_[i * dim_ + i];
  return t;
}

double SpdMatrix::frobenius_norm() const noexcept { return norm2(a_); }

SpdMatrix SpdMatrix::scaled(double factor) const {
  SpdMatrix m = *this;
  for (double& v : m.a_) v *= factor;
  return m;
}

CholeskyFactor cholesky(const SpdMatrix& m) {
  const std::size_t d = m.dim();
  if (d == 0) throw Error(Errc::DimensionMismatch, "cholesky of an empty matrix");
  const double tr = m.trace();
  const double eps = std::max(0.0, 1e-14 * tr / static_cast<double>(d));
  CholeskyFactor f;
  f.dim_ = d;
  f.l_.assign(d * d, 0.0);
  auto& l = f.l_;
  for (std::size_t j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l[j * d + k] * l[j * d + k];
    if (!(pivot > eps) || !std::isfinite(pivot)) {
      throw Error(Errc::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    }
    const double ljj = std::sqrt(pivot);
    l[j * d + j] = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = s / ljj;
    }
  }
  return f;
}

Vector CholeskyFactor::solve_lower(std::span<const double> b) const {
  Vector y(dim_);
  require_dim(b.size(), dim_, "solve_lower");
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_[i * dim_ + k] * y[k];
    y[i] = s / l_[i * dim_ + i];
  }
  return y;
}

Vector CholeskyFactor::solve(std::span<const double> b) const {
  Vector y = solve_lower(b);
  for (std::size_t ii = dim_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < dim_; ++k) s -= l_[k * dim_ + ii] * y[k];
    y[ii] = s / l_[ii * dim_ + ii];
  }
  return y;
}

double CholeskyFactor::logdet() const noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) s += std::log(l_[j * dim_ + j]);
  return 2.0 * s;
}

double CholeskyFactor::quadratic_form(std::span<const double> diff, std::span<double> scratch) const {
  require_dim(diff.size(), dim_, "quadratic_form");
  double q = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = &l_[i * dim_];
    double s = diff[i];
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * scratch[k];
    const double yi = s / row[i];
    scratch[i] = yi;
    q += yi * yi;
  }
  return q;
}

double CholeskyFactor::quadratic_form(std::span<const double> diff) const {
  Vector scratch(dim_);
  return quadratic_form(diff, scratch);
}

SpdMatrix CholeskyFactor::reconstruct() const {
  std::vector<double> e(dim_ * dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += l_[i * dim_ + k] * l_[j * dim_ + k];
      e[i * dim_ + j] = s;
      e[j * dim_ + i] = s;
    }
  }
  return SpdMatrix(dim_, std::move(e));
}

double mahalanobis(std::span<const double> x, std::span<const double> mu, const SpdMatrix& m) {
  require_dim(x.size(), m.dim(), "mahalanobis x");
  require_dim(mu.size(), m.dim(), "mahalanobis mu");
  const CholeskyFactor f = cholesky(m);
  Vector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - mu[i];
  return f.quadratic_form(diff);
}

double logdet(const SpdMatrix& m) { return cholesky(m).logdet(); }

Vector solve_spd(const SpdMatrix& m, std::span<const double> b) { return cholesky(m).solve(b); }

SpdMatrix congruence(const Matrix& a, const SpdMatrix& s) {
  const std::size_t d = s.dim();
  if (a.cols() != d) throw Error(Errc::DimensionMismatch, "congruence: A and S disagree");
  const std::size_t r = a.rows();
  Matrix as(r, d);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += a(i, k) * s(k, j);
      as(i, j) = acc;
    }
  std::vector<double> e(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += as(i, k) * a(j, k);
      e[i * r + j] = acc;
    }
  return SpdMatrix(r, std::move(e));
}

double norm2(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace myriad
