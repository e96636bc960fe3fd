#include "myriad/denoise.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/estimators.hpp"
#include "myriad/rng.hpp"
#include "patch_grid.hpp"

namespace myriad {

namespace {

constexpr std::uint64_t kThresholdSeed = 0x5eed7a11c0ffee01ULL;
constexpr std::size_t kThresholdDraws = 200000;

// Per-pixel outcome flags, summed serially afterwards.
enum Flag : std::uint8_t {
  kDegenerate = 1,
  kNotConverged = 2,
  kSingular = 4,
  kFallback = 8,
};

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

EstimatorOptions estimator_options(const DenoiseConfig& cfg) {
  EstimatorOptions o;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.mode = EstimationMode::joint;
  o.check_assumptions = false;
  o.stop_on_singular = true;
  return o;
}

double sample_variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

/// Joint one-dimensional location/scale estimate of the centre values.
double pixel_estimate(std::vector<double>& values, double nu, const EstimatorOptions& opts, std::uint8_t& flags) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double best_value = sorted[0];
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > best_run) {
      best_run = j - i;
      best_value = sorted[i];
    }
    i = j;
  }
  if (best_run == sorted.size()) {
    flags |= kDegenerate;
    return best_value;
  }
  // One value carrying mass >= nu/(nu+1) pulls the estimate onto itself.
  if (static_cast<double>(best_run) / n >= nu / (nu + 1.0)) {
    flags |= kDegenerate;
    return best_value;
  }
  const EstimateResult r = gmmf_estimate(SampleSet::from_values(values), WeightVector::uniform(values.size()), nu, opts);
  if (!r.converged) flags |= kNotConverged;
  if (r.singular_stop) flags |= kSingular;
  return r.params.mu[0];
}

/// Restored reference patch from the k selected patches (rows of `patches`).
void patch_estimate(const std::vector<double>& patches, std::size_t k, std::size_t dim, const DenoiseConfig& cfg,
                    const EstimatorOptions& opts, double* out, std::uint8_t& flags) {
  bool identical = true;
  for (std::size_t i = 1; i < k && identical; ++i)
    identical = std::equal(patches.begin(), patches.begin() + static_cast<std::ptrdiff_t>(dim),
                           patches.begin() + static_cast<std::ptrdiff_t>(i * dim));
  if (identical) {
    flags |= kDegenerate;
    std::copy(patches.begin(), patches.begin() + static_cast<std::ptrdiff_t>(dim), out);
    return;
  }
  const std::span<const double> ref(patches.data(), dim);
  try {
    const EstimateResult r = gmmf_estimate(SampleSet(k, dim, patches), WeightVector::uniform(k), cfg.nu, opts);
    if (!r.converged) flags |= kNotConverged;
    if (r.singular_stop) flags |= kSingular;
    const Vector v = blue_restore(ref, r.params.mu, r.params.sigma, cfg.nu, cfg.sigma);
    std::copy(v.begin(), v.end(), out);
  } catch (const Error&) {
    flags |= kFallback;
    for (std::size_t j = 0; j < dim; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < k; ++i) m += patches[i * dim + j];
      out[j] = m / static_cast<double>(k);
    }
  }
}

void tally(const std::vector<std::uint8_t>& flags, DenoiseStats& st) {
  for (std::uint8_t f : flags) {
    if (f & kDegenerate) ++st.degenerate_sets;
    if (f & kNotConverged) ++st.not_converged;
    if (f & kSingular) ++st.singular_stops;
    if (f & kFallback) ++st.fallbacks;
  }
}

}  // namespace

std::size_t minimal_patchwise_k(std::size_t patch_size, double nu) {
  return minimal_uniform_sample_count(patch_size * patch_size, nu);
}

void validate(const DenoiseConfig& cfg, bool circular) {
  const auto fail = [](const std::string& m) { throw Error(Errc::InvalidConfig, m); };
  if (cfg.patch_size == 0 || cfg.patch_size % 2 == 0) fail("patch size must be odd and positive");
  if (cfg.window % 2 == 0) fail("search window must be odd");
  if (cfg.window < cfg.patch_size) fail("search window must not be smaller than the patch");
  if (cfg.k < 2) fail("k must be at least 2");
  if (cfg.k > cfg.window * cfg.window) {
    throw Error(Errc::InsufficientCandidates, "k = " + std::to_string(cfg.k) + " exceeds the " +
                                                  std::to_string(cfg.window * cfg.window) + " window candidates");
  }
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) fail(circular ? "gamma must be positive" : "sigma must be positive");
  if (!(cfg.tol > 0.0)) fail("tol must be positive");
  if (cfg.max_iter < 1) fail("max_iter must be at least 1");
  if (circular) {
    if (cfg.k < 3) fail("circular denoising needs k >= 3");
    return;
  }
  if (!(cfg.nu >= 1.0) || !std::isfinite(cfg.nu)) fail("nu must be finite and >= 1 for real images");
  if (cfg.var_threshold && !(*cfg.var_threshold >= 0.0)) fail("var_threshold must be non-negative");
  if (cfg.mode != DenoiseMode::pixelwise) {
    const std::size_t kmin = minimal_patchwise_k(cfg.patch_size, cfg.nu);
    if (cfg.k < kmin) {
      fail("patchwise estimation with " + std::to_string(cfg.patch_size) + "x" + std::to_string(cfg.patch_size) +
           " patches needs k >= " + std::to_string(kmin) + " (got " + std::to_string(cfg.k) + ")");
    }
  }
}

double noise_variance_constant(double nu) {
  if (!(nu > 0.0)) throw Error(Errc::InvalidNu, "nu must be positive");
  if (nu > 2.0) return nu / (nu - 2.0);
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nu);
  if (it == cache.end()) {
    Rng rng(kThresholdSeed);
    CompensatedSum acc;
    for (std::size_t i = 0; i < kThresholdDraws; ++i) {
      const double x = rng.normal() / std::sqrt(rng.gamma(0.5 * nu, 0.5 * nu));
      acc.add(std::min(x * x, 1.0));
    }
    it = cache.emplace(nu, acc.value() / static_cast<double>(kThresholdDraws)).first;
  }
  return it->second;
}

double default_var_threshold(double nu, double sigma) {
  return (1.5 * sigma) * (1.5 * sigma) * noise_variance_constant(nu);
}

std::vector<std::size_t> aggregation_counts(std::size_t width, std::size_t height, std::size_t patch_size) {
  const auto h = static_cast<std::ptrdiff_t>(patch_size / 2);
  const auto span = [h](std::ptrdiff_t i, std::ptrdiff_t n) {
    return static_cast<std::size_t>(std::min(i + h, n - 1) - std::max(i - h, std::ptrdiff_t{0}) + 1);
  };
  std::vector<std::size_t> out(width * height);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      out[r * width + c] = span(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(height)) *
                           span(static_cast<std::ptrdiff_t>(c), static_cast<std::ptrdiff_t>(width));
  return out;
}

DenoiseResult denoise_image(const Image& noisy, const DenoiseConfig& cfg) {
  validate(cfg);
  const std::size_t W = noisy.width();
  const std::size_t H = noisy.height();
  const std::size_t N = W * H;
  const std::size_t k = cfg.k;
  const std::size_t s = cfg.patch_size;
  const std::size_t dim = s * s;
  const auto hs = static_cast<std::ptrdiff_t>(s / 2);
  const detail::PaddedGrid grid(noisy.pixels(), W, H, static_cast<std::size_t>(detail::grid_margin(cfg)));
  const EstimatorOptions opts = estimator_options(cfg);

  DenoiseStats stats;
  stats.pixels = N;

  // Selections first: both estimators and the adaptive rule read them.
  std::vector<std::ptrdiff_t> sel_r(N * k), sel_c(N * k);
  std::vector<double> variance(N);
  parallel_for(N, cfg.threads, [&](std::size_t p) {
    thread_local std::vector<double> scratch;
    const SimilaritySet set = detail::select_on_grid(grid, p / W, p % W, cfg, detail::Metric::student, scratch);
    std::vector<double> centre(k);
    for (std::size_t t = 0; t < k; ++t) {
      sel_r[p * k + t] = set.members[t].row;
      sel_c[p * k + t] = set.members[t].col;
      centre[t] = grid.at(set.members[t].row, set.members[t].col);
    }
    variance[p] = sample_variance(centre);
  });

  std::vector<char> use_patch(N, cfg.mode == DenoiseMode::patchwise ? 1 : 0);
  if (cfg.mode == DenoiseMode::adaptive) {
    stats.var_threshold = cfg.var_threshold ? *cfg.var_threshold : default_var_threshold(cfg.nu, cfg.sigma);
    for (std::size_t p = 0; p < N; ++p) use_patch[p] = variance[p] < stats.var_threshold ? 1 : 0;
  }

  // Reference patches to restore: every centre whose footprint touches a
  // pixel that takes the patchwise value.
  std::vector<char> need_patch(N, 0);
  for (std::size_t p = 0; p < N; ++p) {
    if (!use_patch[p]) continue;
    const auto r = static_cast<std::ptrdiff_t>(p / W);
    const auto c = static_cast<std::ptrdiff_t>(p % W);
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, r - hs); i <= std::min<std::ptrdiff_t>(H - 1, r + hs); ++i)
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, c - hs); j <= std::min<std::ptrdiff_t>(W - 1, c + hs); ++j)
        need_patch[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)] = 1;
  }

  std::vector<std::uint8_t> pixel_flags(N, 0), patch_flags(N, 0);
  std::vector<double> pixel_value(N, 0.0);
  std::vector<double> restored(N * dim, 0.0);
  parallel_for(N, cfg.threads, [&](std::size_t p) {
    if (!use_patch[p]) {
      std::vector<double> centre(k);
      for (std::size_t t = 0; t < k; ++t) centre[t] = grid.at(sel_r[p * k + t], sel_c[p * k + t]);
      pixel_value[p] = pixel_estimate(centre, cfg.nu, opts, pixel_flags[p]);
    }
    if (need_patch[p]) {
      std::vector<double> patches(k * dim);
      for (std::size_t t = 0; t < k; ++t) grid.copy_patch(sel_r[p * k + t], sel_c[p * k + t], s, &patches[t * dim]);
      patch_estimate(patches, k, dim, cfg, opts, &restored[p * dim], patch_flags[p]);
    }
  });
  tally(pixel_flags, stats);
  tally(patch_flags, stats);

  std::vector<double> out(N);
  for (std::size_t p = 0; p < N; ++p) {
    if (!use_patch[p]) {
      out[p] = pixel_value[p];
      continue;
    }
    ++stats.patchwise_pixels;
    const auto r = static_cast<std::ptrdiff_t>(p / W);
    const auto c = static_cast<std::ptrdiff_t>(p % W);
    double sum = 0.0;
    std::size_t count = 0;
    // Reference centre (i, j) sees pixel p at patch offset (r - i, c - j).
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, r - hs); i <= std::min<std::ptrdiff_t>(H - 1, r + hs); ++i) {
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, c - hs); j <= std::min<std::ptrdiff_t>(W - 1, c + hs);
           ++j) {
        const std::size_t q = static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j);
        const auto off = static_cast<std::size_t>((r - i + hs) * static_cast<std::ptrdiff_t>(s) + (c - j + hs));
        sum += restored[q * dim + off];
        ++count;
      }
    }
    out[p] = sum / static_cast<double>(count);
  }
  if (cfg.mode == DenoiseMode::pixelwise) stats.patchwise_pixels = 0;
  return {Image(W, H, std::move(out), noisy.peak()), stats};
}

double circular_median(std::span<const double> angles, std::span<const double> weights) {
  if (angles.empty() || angles.size() != weights.size()) {
    throw Error(Errc::DimensionMismatch, "circular_median needs matching, non-empty inputs");
  }
  double best = angles[0];
  double best_cost = std::numeric_limits<double>::infinity();
  for (double a : angles) {
    double cost = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) cost += weights[j] * s1_distance(a, angles[j]);
    if (cost < best_cost) {
      best_cost = cost;
      best = a;
    }
  }
  return wrap_angle(best);
}

S1DenoiseResult denoise_s1_image(const S1Image& noisy, const DenoiseConfig& cfg) {
  validate(cfg, true);
  const std::size_t W = noisy.width();
  const std::size_t H = noisy.height();
  const std::size_t N = W * H;
  const std::size_t k = cfg.k;
  const detail::PaddedGrid grid(noisy.angles(), W, H, static_cast<std::size_t>(detail::grid_margin(cfg)));
  EstimatorOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  const WeightVector uniform = WeightVector::uniform(k);

  std::vector<double> out(N);
  std::vector<std::uint8_t> flags(N, 0);
  parallel_for(N, cfg.threads, [&](std::size_t p) {
    thread_local std::vector<double> scratch;
    const SimilaritySet set =
        detail::select_on_grid(grid, p / W, p % W, cfg, detail::Metric::wrapped_cauchy, scratch);
    std::vector<double> centre(k);
    for (std::size_t t = 0; t < k; ++t) centre[t] = grid.at(set.members[t].row, set.members[t].col);
    if (std::all_of(centre.begin(), centre.end(), [&](double a) { return a == centre[0]; })) {
      flags[p] |= kDegenerate;
      out[p] = centre[0];
      return;
    }
    try {
      const WrappedCauchyEstimate e = wrapped_cauchy_estimate(centre, uniform, opts);
      if (!e.converged) flags[p] |= kNotConverged;
      out[p] = e.params.a();
    } catch (const Error& err) {
      if (err.code() != Errc::DegenerateData) throw;
      flags[p] |= kFallback;
      out[p] = circular_median(centre, uniform.values());
    }
  });
  DenoiseStats stats;
  stats.pixels = N;
  tally(flags, stats);
  return {S1Image(W, H, std::move(out)), stats};
}

}  // namespace myriad
