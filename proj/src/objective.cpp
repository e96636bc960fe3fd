#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "internal.hpp"
#include "myriad/error.hpp"
#include "myriad/estimators.hpp"

namespace myriad {

namespace detail {

CanonicalData canonicalize(const SampleSet& samples, const WeightVector& w) {
  const std::size_t n = samples.size();
  const std::size_t d = samples.dim();
  if (w.size() != n) {
    throw Error(Errc::DimensionMismatch, "got " + std::to_string(w.size()) + " weights for " +
                                             std::to_string(n) + " samples");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = samples.row(a);
    const auto rb = samples.row(b);
    for (std::size_t j = 0; j < d; ++j) {
      if (ra[j] != rb[j]) return ra[j] < rb[j];
    }
    return w[a] < w[b];
  });
  std::vector<double> rows(n * d);
  std::vector<double> weights(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = samples.row(order[k]);
    std::copy(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(k * d));
    weights[k] = w[order[k]];
  }
  return {SampleSet(n, d, std::move(rows)), std::move(weights)};
}

SampleSet normalize_rows(const SampleSet& samples) {
  const std::size_t n = samples.size();
  const std::size_t d = samples.dim();
  std::vector<double> rows(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = samples.row(i);
    const double len = norm2(r);
    if (!(len > 0.0)) throw Error(Errc::ZeroSample, "sample " + std::to_string(i) + " is the zero vector");
    for (std::size_t j = 0; j < d; ++j) rows[i * d + j] = r[j] / len;
  }
  return SampleSet(n, d, std::move(rows));
}

}  // namespace detail

namespace {

void require_sizes(const SampleSet& samples, const WeightVector& w, std::size_t dim) {
  if (w.size() != samples.size()) throw Error(Errc::DimensionMismatch, "weights and samples disagree");
  if (samples.dim() != dim) throw Error(Errc::DimensionMismatch, "sample dimension disagrees with scatter");
}

}  // namespace

double neg_loglik(const SampleSet& samples, const WeightVector& w, const StudentTParams& p) {
  if (!(p.nu > 0.0)) throw Error(Errc::InvalidNu, "neg_loglik needs nu > 0");
  const std::size_t d = p.sigma.dim();
  require_sizes(samples, w, d);
  if (p.mu.size() != d) throw Error(Errc::DimensionMismatch, "mu and sigma disagree");
  const CholeskyFactor f = cholesky(p.sigma);
  Vector diff(d), scratch(d);
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto x = samples.row(i);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - p.mu[j];
    acc.add(w[i] * std::log(p.nu + f.quadratic_form(diff, scratch)));
  }
  return (static_cast<double>(d) + p.nu) * acc.value() + f.logdet();
}

double neg_loglik_pn(const SampleSet& samples, const WeightVector& w, const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  if (d < 2) throw Error(Errc::InvalidArgument, "projected normal likelihood needs d >= 2");
  require_sizes(samples, w, d);
  const CholeskyFactor f = cholesky(sigma);
  Vector scratch(d);
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    acc.add(w[i] * std::log(f.quadratic_form(samples.row(i), scratch)));
  }
  return static_cast<double>(d) * acc.value() + f.logdet();
}

FixedPointResiduals fixed_point_residuals(const SampleSet& samples, const WeightVector& w,
                                          const StudentTParams& p) {
  const std::size_t d = p.sigma.dim();
  require_sizes(samples, w, d);
  const CholeskyFactor f = cholesky(p.sigma);
  const double dn = static_cast<double>(d) + p.nu;
  std::vector<CompensatedSum> loc(d), scat(d * d);
  CompensatedSum norm;
  Vector diff(d), scratch(d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto x = samples.row(i);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - p.mu[j];
    const double c = w[i] / (p.nu + f.quadratic_form(diff, scratch));
    norm.add(c);
    for (std::size_t j = 0; j < d; ++j) {
      loc[j].add(c * diff[j]);
      for (std::size_t k = 0; k < d; ++k) scat[j * d + k].add(c * diff[j] * diff[k]);
    }
  }
  FixedPointResiduals r;
  double loc2 = 0.0;
  for (const auto& s : loc) loc2 += s.value() * s.value();
  r.location = std::sqrt(loc2);
  double res2 = 0.0;
  for (std::size_t j = 0; j < d * d; ++j) {
    const double e = p.sigma.entries()[j] - dn * scat[j].value();
    res2 += e * e;
  }
  r.scatter = std::sqrt(res2) / p.sigma.frobenius_norm();
  r.trace = std::abs(dn * norm.value() - 1.0);
  return r;
}

double tyler_residual(const SampleSet& samples, const WeightVector& w, const SpdMatrix& sigma) {
  const std::size_t d = sigma.dim();
  require_sizes(samples, w, d);
  const SampleSet unit = detail::normalize_rows(samples);
  const CholeskyFactor f = cholesky(sigma);
  std::vector<CompensatedSum> acc(d * d);
  Vector scratch(d);
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const auto x = unit.row(i);
    const double c = w[i] / f.quadratic_form(x, scratch);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) acc[j * d + k].add(c * x[j] * x[k]);
  }
  double res2 = 0.0;
  for (std::size_t j = 0; j < d * d; ++j) {
    const double e = sigma.entries()[j] - static_cast<double>(d) * acc[j].value();
    res2 += e * e;
  }
  return std::sqrt(res2) / sigma.frobenius_norm();
}

}  // namespace myriad
