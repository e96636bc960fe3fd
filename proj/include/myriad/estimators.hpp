#pragma once

// Weighted maximum-likelihood estimation for the Student-t family.
//
// All estimators minimize the weighted negative log-likelihood
//
//   L(mu, Sigma) = (d + nu) sum_i w_i log(nu + delta_i) + log|Sigma|,
//   delta_i      = (x_i - mu)^T Sigma^{-1} (x_i - mu),
//
// (or its nu = 0 analogue on the sphere) through fixed-point iterations.
// Weighted sums run over the samples in a canonical order (lexicographic on
// the sample row, then the weight) with compensated summation, so a result
// does not depend on how the caller ordered its (sample, weight) pairs.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "myriad/distributions.hpp"
#include "myriad/numkernel.hpp"
#include "myriad/sample_set.hpp"

namespace myriad {

enum class EstimationMode { joint, scatter_only, tyler };

struct EstimatorOptions {
  double tol = 1e-6;
  std::size_t max_iter = 10000;
  EstimationMode mode = EstimationMode::joint;
  /// Run check_assumptions() first and throw AssumptionViolation on failure.
  bool check_assumptions = true;
  /// Location held fixed in scatter_only mode (zero when absent).
  std::optional<Vector> fixed_mu;
  /// When an iterate stops being positive definite, return the last good
  /// iterate (converged = false, singular_stop = true) instead of throwing.
  bool stop_on_singular = false;
};

struct EstimateResult {
  StudentTParams params;
  std::size_t iterations = 0;
  double final_step = 0.0;
  /// L at every visited iterate, starting with the initialization.
  std::vector<double> objective_trace;
  /// sum_i w_i / (nu + delta_i) at every visited iterate.
  std::vector<double> normalizer_trace;
  bool converged = false;
  bool assumption_check_bypassed = false;
  /// The initial scatter was singular and got eps * I added.
  bool init_regularized = false;
  bool singular_stop = false;
};

struct FeasibilityReport {
  bool independence_ok = true;
  bool weight_bound_ok = true;
  double worst_weight = 0.0;
  /// Upper bound that worst_weight has to stay strictly below.
  double required_bound = 0.0;
  std::optional<std::vector<std::size_t>> violating_subset;
  /// False when n was too large for an exhaustive subset scan and random
  /// subsets plus a full-rank check were used instead.
  bool exhaustive = true;

  bool ok() const noexcept { return independence_ok && weight_bound_ok; }
};

/// (mu, Sigma) pair that the step functions advance.
struct IterateState {
  Vector mu;
  SpdMatrix sigma;
};

double neg_loglik(const SampleSet& samples, const WeightVector& w, const StudentTParams& p);

/// L_0(Sigma) = d sum_i w_i log(delta_i) + log|Sigma|, d >= 2.
double neg_loglik_pn(const SampleSet& samples, const WeightVector& w, const SpdMatrix& sigma);

/// Checks the existence conditions for the weighted ML estimate:
///  - joint: every <= d+1 samples affinely independent, d w_max < (nu+d-1)/(nu+d)
///  - scatter_only: every <= d samples linearly independent,
///    (d-1) w_max < (nu+d-1)/(nu+d)
///  - tyler: every <= d samples linearly independent, w_max < 1/d
/// Exhaustive for n <= 15; beyond that, exact duplicates (or collinear pairs)
/// are still found deterministically but larger subsets are sampled.
FeasibilityReport check_assumptions(const SampleSet& samples, const WeightVector& w, double nu,
                                    EstimationMode mode);

/// Smallest uniform-weight sample count n with d / n < (nu+d-1)/(nu+d).
std::size_t minimal_uniform_sample_count(std::size_t d, double nu);

/// One GMMF update. Sigma uses the old location mu_r.
IterateState gmmf_step(const IterateState& state, const SampleSet& samples, const WeightVector& w,
                       double nu, bool update_mu = true);

/// One EM update: same location update, Sigma evaluated at mu_{r+1} with the
/// factor (nu + d).
IterateState em_step(const IterateState& state, const SampleSet& samples, const WeightVector& w,
                     double nu);

/// Generalized multivariate myriad filter. Starts from the sample mean and
/// sample covariance and stops when the relative step drops below opts.tol.
/// Non-convergence is reported through converged = false, not thrown.
EstimateResult gmmf_estimate(const SampleSet& samples, const WeightVector& w, double nu,
                             const EstimatorOptions& opts = {});

EstimateResult em_estimate(const SampleSet& samples, const WeightVector& w, double nu,
                           const EstimatorOptions& opts = {});

/// Tyler's scatter M-estimator: samples are projected to the unit sphere,
/// mu = 0, nu = 0, and each iterate is rescaled to trace one.
EstimateResult tyler_estimate(const SampleSet& samples, const WeightVector& w,
                              const EstimatorOptions& opts = {});

struct WrappedCauchyEstimate {
  WrappedCauchyParams params{0.0, 0.0};
  std::array<double, 2> zeta{0.0, 0.0};
  std::size_t iterations = 0;
  double final_step = 0.0;
  bool converged = false;
  /// Updates that would have left the unit disk and were pulled back.
  std::size_t damped_steps = 0;
};

/// Weighted ML fit of a wrapped Cauchy law to angles in [-pi, pi).
/// Throws DegenerateData when the angles take at most two distinct values or
/// a single value carries half of the weight or more.
WrappedCauchyEstimate wrapped_cauchy_estimate(std::span<const double> angles, const WeightVector& w,
                                              const EstimatorOptions& opts = {});

/// Patch restoration mu + (Sigma - nu/(nu-2) s^2 I)_+ Sigma^{-1} (p - mu) for
/// nu > 2, where (.)_+ clamps negative eigenvalues to zero; mu for nu <= 2.
Vector blue_restore(std::span<const double> p, std::span<const double> mu_hat,
                    const SpdMatrix& sigma_hat, double nu, double sigma_noise);

struct FixedPointResiduals {
  /// || sum_i w_i (x_i - mu) / (nu + delta_i) ||_2
  double location = 0.0;
  /// || Sigma - (d+nu) sum_i w_i (x_i-mu)(x_i-mu)^T/(nu+delta_i) ||_F / ||Sigma||_F
  double scatter = 0.0;
  /// | (d+nu) sum_i w_i / (nu + delta_i) - 1 |
  double trace = 0.0;
};

FixedPointResiduals fixed_point_residuals(const SampleSet& samples, const WeightVector& w,
                                          const StudentTParams& p);

/// Relative Frobenius residual of Sigma = d sum_i w_i x_i x_i^T / delta_i on
/// unit-normalized samples.
double tyler_residual(const SampleSet& samples, const WeightVector& w, const SpdMatrix& sigma);

}  // namespace myriad
