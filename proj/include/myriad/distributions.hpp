#pragma once

// Student-t, projected normal and wrapped Cauchy laws: densities, samplers
// and the conversions between a 2x2 projected-normal scatter matrix and
// wrapped Cauchy parameters.

#include <cstdint>
#include <span>
#include <vector>

#include "myriad/numkernel.hpp"
#include "myriad/sample_set.hpp"

namespace myriad {

/// Location, scatter and degrees of freedom of T_nu(mu, sigma). nu = 0 is
/// only meaningful for scatter-only (projected normal) use.
struct StudentTParams {
  Vector mu;
  SpdMatrix sigma;
  double nu = 1.0;
};

/// Wrapped Cauchy parameters (a, rho) with a in [-pi, pi), rho in [0, 1).
/// rho = exp(-gamma) for the Cauchy scale gamma of the unwrapped law.
class WrappedCauchyParams {
 public:
  WrappedCauchyParams(double a, double rho);

  double a() const noexcept { return a_; }
  double rho() const noexcept { return rho_; }
  double gamma() const;
  /// rho == 0: the uniform law, for which a carries no information.
  bool is_uniform() const noexcept { return rho_ == 0.0; }

 private:
  double a_;
  double rho_;
};

/// Reduces an angle to [-pi, pi).
double wrap_angle(double theta) noexcept;

double student_t_logpdf(std::span<const double> x, const StudentTParams& p);

/// Projected normal log-density on the sphere S^{d-1}; centered, d >= 2.
double projected_normal_logpdf(std::span<const double> x, const SpdMatrix& sigma);

double wrapped_cauchy_pdf(double theta, const WrappedCauchyParams& p);

/// X = mu + Z / sqrt(Y), Z ~ N(0, sigma) via the Cholesky factor, Y ~ Gamma(nu/2, nu/2).
SampleSet sample_student_t(const StudentTParams& p, std::size_t n, std::uint64_t seed);

/// Draws a + gamma * tan(pi (U - 1/2)) and wraps them into [-pi, pi).
/// rho == 0 produces uniform angles.
std::vector<double> sample_wrapped_cauchy(const WrappedCauchyParams& p, std::size_t n,
                                          std::uint64_t seed);

WrappedCauchyParams pn_to_wc(const SpdMatrix& sigma);

/// The trace-one representative of the projected normal scatter.
SpdMatrix wc_to_pn(const WrappedCauchyParams& p);

}  // namespace myriad
