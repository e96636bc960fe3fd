#include "myriad/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "myriad/error.hpp"
#include "myriad/rng.hpp"

namespace myriad {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nu_positive(double nu) {
  if (!(nu > 0.0) || std::isnan(nu)) {
    throw Error(Errc::InvalidNu, "degrees of freedom must be positive, got " + std::to_string(nu));
  }
}

}  // namespace

WrappedCauchyParams::WrappedCauchyParams(double a, double rho) : a_(a), rho_(rho) {
  if (!(a >= -kPi && a < kPi)) {
    throw Error(Errc::InvalidArgument, "wrapped Cauchy location must lie in [-pi, pi)");
  }
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(Errc::InvalidArgument, "wrapped Cauchy concentration must lie in [0, 1)");
  }
}

double WrappedCauchyParams::gamma() const { return -std::log(rho_); }

double wrap_angle(double theta) noexcept {
  if (theta >= -kPi && theta < kPi) return theta;
  double r = std::fmod(theta + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  double out = r - kPi;
  if (out >= kPi) out -= 2.0 * kPi;
  if (out < -kPi) out = -kPi;
  return out;
}

double student_t_logpdf(std::span<const double> x, const StudentTParams& p) {
  require_nu_positive(p.nu);
  const auto d = static_cast<double>(p.sigma.dim());
  const CholeskyFactor f = cholesky(p.sigma);
  if (x.size() != p.sigma.dim() || p.mu.size() != p.sigma.dim()) {
    throw Error(Errc::DimensionMismatch, "student_t_logpdf: dimensions disagree");
  }
  Vector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - p.mu[i];
  const double delta = f.quadratic_form(diff);
  return std::lgamma(0.5 * (d + p.nu)) - std::lgamma(0.5 * p.nu) - 0.5 * d * std::log(kPi * p.nu) -
         0.5 * f.logdet() - 0.5 * (d + p.nu) * std::log1p(delta / p.nu);
}

double projected_normal_logpdf(std::span<const double> x, const SpdMatrix& sigma) {
  const std::size_t dim = sigma.dim();
  if (x.size() != dim) throw Error(Errc::DimensionMismatch, "projected_normal_logpdf");
  if (dim < 2) throw Error(Errc::InvalidArgument, "projected normal needs d >= 2");
  if (std::abs(norm2(x) - 1.0) > 1e-8) throw Error(Errc::NotUnitVector, "x must lie on the unit sphere");
  const CholeskyFactor f = cholesky(sigma);
  const double delta = f.quadratic_form(x);
  const auto d = static_cast<double>(dim);
  return std::lgamma(0.5 * d) - std::log(2.0) - 0.5 * d * std::log(kPi) - 0.5 * f.logdet() -
         0.5 * d * std::log(delta);
}

double wrapped_cauchy_pdf(double theta, const WrappedCauchyParams& p) {
  const double rho = p.rho();
  return (1.0 - rho * rho) / (2.0 * kPi * (1.0 + rho * rho - 2.0 * rho * std::cos(theta - p.a())));
}

SampleSet sample_student_t(const StudentTParams& p, std::size_t n, std::uint64_t seed) {
  require_nu_positive(p.nu);
  const std::size_t d = p.sigma.dim();
  if (p.mu.size() != d) throw Error(Errc::DimensionMismatch, "sample_student_t: mu and sigma disagree");
  const CholeskyFactor f = cholesky(p.sigma);
  Rng rng(seed);
  std::vector<double> out(n * d);
  Vector g(d);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < d; ++j) g[j] = rng.normal();
    const double y = rng.gamma(0.5 * p.nu, 0.5 * p.nu);
    const double inv_sqrt_y = 1.0 / std::sqrt(y);
    for (std::size_t i = 0; i < d; ++i) {
      double z = 0.0;
      for (std::size_t k = 0; k <= i; ++k) z += f(i, k) * g[k];
      out[s * d + i] = p.mu[i] + z * inv_sqrt_y;
    }
  }
  return SampleSet(n, d, std::move(out));
}

std::vector<double> sample_wrapped_cauchy(const WrappedCauchyParams& p, std::size_t n,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  if (p.is_uniform()) {
    for (double& t : out) t = wrap_angle(-kPi + 2.0 * kPi * rng.uniform());
    return out;
  }
  const double gamma = p.gamma();
  for (double& t : out) t = wrap_angle(rng.cauchy(p.a(), gamma));
  return out;
}

WrappedCauchyParams pn_to_wc(const SpdMatrix& sigma) {
  if (sigma.dim() != 2) throw Error(Errc::DimensionMismatch, "pn_to_wc needs a 2x2 matrix");
  cholesky(sigma);  // positive definiteness
  const double s11 = sigma(0, 0);
  const double s22 = sigma(1, 1);
  const double s12 = sigma(0, 1);
  const double tr = s11 + s22;
  const double sqrt_det = std::sqrt(s11 * s22 - s12 * s12);
  // (tr - 2 sqrt|S|) / (tr + 2 sqrt|S|) rewritten with tr^2 - 4|S| =
  // (s11 - s22)^2 + 4 s12^2 in the numerator, which avoids cancellation.
  const double diff = s11 - s22;
  double rho = std::sqrt(diff * diff + 4.0 * s12 * s12) / (tr + 2.0 * sqrt_det);
  if (rho >= 1.0) rho = std::nextafter(1.0, 0.0);

  double a;
  if (diff == 0.0) {
    // s12 = r sin a with cos a = 0; an isotropic matrix maps to rho = 0.
    a = s12 > 0.0 ? kPi / 2.0 : (s12 < 0.0 ? -kPi / 2.0 : -kPi);
  } else if (diff > 0.0) {
    a = std::atan(2.0 * s12 / diff);
  } else if (s12 >= 0.0) {
    a = std::atan(2.0 * s12 / diff) + kPi;
  } else {
    a = std::atan(2.0 * s12 / diff) - kPi;
  }
  return WrappedCauchyParams(wrap_angle(a), rho);
}

SpdMatrix wc_to_pn(const WrappedCauchyParams& p) {
  const double r = p.rho() / (1.0 + p.rho() * p.rho());
  const double c = r * std::cos(p.a());
  const double s = r * std::sin(p.a());
  return SpdMatrix::from_rows({{0.5 + c, s}, {s, 0.5 - c}});
}

}  // namespace myriad
