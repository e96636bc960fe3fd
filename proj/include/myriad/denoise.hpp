#pragma once

// Nonlocal Student-t denoising of real images and wrapped Cauchy denoising of
// circle-valued images.
//
// For every pixel the k patches most similar to the reference patch are
// picked from a w x w search window (patches that reach past the border are
// completed by mirroring). Their centre values, or the whole patches, are
// then fed to the robust estimators.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "myriad/imaging.hpp"
#include "myriad/numkernel.hpp"

namespace myriad {

enum class DenoiseMode { pixelwise, patchwise, adaptive };

struct DenoiseConfig {
  std::size_t patch_size = 5;
  std::size_t window = 21;
  std::size_t k = 50;
  double nu = 1.0;
  /// Noise scale for real images, gamma for circle-valued ones.
  double sigma = 10.0;
  DenoiseMode mode = DenoiseMode::pixelwise;
  /// Adaptive mode: centre-value variance below which a pixel takes the
  /// patchwise result. Absent means default_var_threshold().
  std::optional<double> var_threshold;
  double tol = 1e-5;
  std::size_t max_iter = 1000;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 1;
};

/// Throws InvalidConfig (with the smallest admissible k when that is what
/// fails) or InsufficientCandidates (k > w^2).
void validate(const DenoiseConfig& cfg, bool circular = false);

/// Smallest k for which k uniform s^2-dimensional patches can satisfy the
/// existence condition of the joint estimate.
std::size_t minimal_patchwise_k(std::size_t patch_size, double nu);

/// Variance of standard T_nu noise, nu / (nu - 2). For nu <= 2, where it is
/// infinite, the noise is clipped to [-1, 1] first and E[min(X^2, 1)] is
/// taken (deterministic Monte Carlo, 2e5 draws).
double noise_variance_constant(double nu);

/// (1.5 sigma)^2 * noise_variance_constant(nu).
double default_var_threshold(double nu, double sigma);

/// Reflects an index into [0, n) without repeating the edge: -1 -> 1, n -> n-2.
std::size_t mirror_index(std::ptrdiff_t i, std::size_t n) noexcept;

/// Row-major s x s block centred at (row, col); the centre may lie outside
/// the image.
Vector extract_patch(const Image& img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s);
Vector extract_patch(const S1Image& img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s);

/// sum_i log(nu + ((p_i - q_i) / (2 sigma))^2)
double dist_student(std::span<const double> p, std::span<const double> q, double nu, double sigma);

/// sum_i log(1 + rho^2 - 2 rho cos(wrap(p_i - q_i) / 2))
double dist_wrapped_cauchy(std::span<const double> p, std::span<const double> q, double rho);

struct SimilarPatch {
  std::ptrdiff_t row = 0;
  std::ptrdiff_t col = 0;
  double distance = 0.0;
};

/// The k selected patch centres (possibly outside the image), ascending by
/// distance. The reference comes first; other ties keep row-major scan order.
struct SimilaritySet {
  std::size_t row = 0;
  std::size_t col = 0;
  std::vector<SimilarPatch> members;
};

SimilaritySet select_similar(const Image& img, std::size_t row, std::size_t col, const DenoiseConfig& cfg);
/// Uses dist_wrapped_cauchy with rho = exp(-cfg.sigma).
SimilaritySet select_similar(const S1Image& img, std::size_t row, std::size_t col, const DenoiseConfig& cfg);

struct DenoiseStats {
  std::size_t pixels = 0;
  /// Sample sets whose values coincide (or nearly all carry one value) and
  /// were answered without iterating.
  std::size_t degenerate_sets = 0;
  std::size_t not_converged = 0;
  std::size_t singular_stops = 0;
  /// Estimator failures answered by a fallback (mean patch, circular median).
  std::size_t fallbacks = 0;
  /// Adaptive mode: pixels that took the patchwise value.
  std::size_t patchwise_pixels = 0;
  double var_threshold = 0.0;
};

struct DenoiseResult {
  Image image;
  DenoiseStats stats;
};

struct S1DenoiseResult {
  S1Image image;
  DenoiseStats stats;
};

DenoiseResult denoise_image(const Image& noisy, const DenoiseConfig& cfg);
S1DenoiseResult denoise_s1_image(const S1Image& noisy, const DenoiseConfig& cfg);

/// Number of restored patches covering each pixel in patchwise aggregation.
std::vector<std::size_t> aggregation_counts(std::size_t width, std::size_t height, std::size_t patch_size);

/// Weighted circular median: the sample angle minimizing the weighted sum of
/// geodesic distances (first minimizer in input order).
double circular_median(std::span<const double> angles, std::span<const double> weights);

}  // namespace myriad
