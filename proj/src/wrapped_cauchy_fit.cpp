#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>

#include "myriad/error.hpp"
#include "myriad/estimators.hpp"

namespace myriad {

namespace {

constexpr double kPi = std::numbers::pi;

// Angles are compared after wrapping, so -pi and pi count as one direction.
void check_degenerate(std::span<const double> theta, const WeightVector& w) {
  std::vector<std::size_t> order(theta.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });
  std::size_t distinct = 0;
  double run_mass = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || theta[order[k]] != theta[order[k - 1]]) {
      ++distinct;
      run_mass = 0.0;
    }
    run_mass += w[order[k]];
    worst = std::max(worst, run_mass);
  }
  if (distinct <= 2) {
    throw Error(Errc::DegenerateData, "angles take at most two distinct values");
  }
  if (worst >= 0.5) {
    throw Error(Errc::DegenerateData, "a single angle carries half of the weight or more");
  }
}

}  // namespace

WrappedCauchyEstimate wrapped_cauchy_estimate(std::span<const double> angles, const WeightVector& w,
                                              const EstimatorOptions& opts) {
  if (w.size() != angles.size()) throw Error(Errc::DimensionMismatch, "weights and angles disagree");
  if (angles.size() < 3) throw Error(Errc::TooSmall, "wrapped Cauchy fit needs at least three angles");
  if (!(opts.tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  const std::size_t n = angles.size();

  // Canonical order: by angle, then by weight.
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(angles[i])) throw Error(Errc::InvalidArgument, "angles must be finite");
    theta[i] = wrap_angle(angles[i]);
  }
  check_degenerate(theta, w);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return theta[a] != theta[b] ? theta[a] < theta[b] : w[a] < w[b];
  });
  std::vector<double> c(n), s(n), wt(n);
  for (std::size_t k = 0; k < n; ++k) {
    c[k] = std::cos(theta[order[k]]);
    s[k] = std::sin(theta[order[k]]);
    wt[k] = w[order[k]];
  }

  WrappedCauchyEstimate out;
  double z1 = 0.0;
  double z2 = 0.0;
  double step = 0.0;
  std::size_t it = 0;
  while (it < opts.max_iter) {
    CompensatedSum num1, num2, den;
    for (std::size_t k = 0; k < n; ++k) {
      const double coef = wt[k] / (1.0 - z1 * c[k] - z2 * s[k]);
      num1.add(coef * c[k]);
      num2.add(coef * s[k]);
      den.add(coef);
    }
    double n1 = num1.value() / den.value();
    double n2 = num2.value() / den.value();
    const double len = std::hypot(n1, n2);
    if (len >= 1.0) {
      n1 *= (1.0 - 1e-9) / len;
      n2 *= (1.0 - 1e-9) / len;
      ++out.damped_steps;
    }
    step = std::hypot(n1 - z1, n2 - z2) / std::max(std::hypot(z1, z2), 1e-12);
    z1 = n1;
    z2 = n2;
    ++it;
    if (step < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  out.final_step = step;

  double z = std::hypot(z1, z2);
  if (z < 64.0 * DBL_EPSILON) {
    z1 = z2 = z = 0.0;
  }
  out.zeta = {z1, z2};
  const double a = z == 0.0 ? -kPi : wrap_angle(std::atan2(z2, z1));
  // (1 - sqrt(1 - z^2)) / z without the cancellation for small z.
  double rho = z / (1.0 + std::sqrt((1.0 - z) * (1.0 + z)));
  if (rho >= 1.0) rho = std::nextafter(1.0, 0.0);
  out.params = WrappedCauchyParams(a, rho);
  return out;
}

}  // namespace myriad
