#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "myriad/denoise.hpp"
#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "patch_grid.hpp"

namespace myriad {

std::size_t mirror_index(std::ptrdiff_t i, std::size_t n) noexcept {
  if (n <= 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t r = i % period;
  if (r < 0) r += period;
  if (r >= static_cast<std::ptrdiff_t>(n)) r = period - r;
  return static_cast<std::size_t>(r);
}

namespace {

template <class Img, class Get>
Vector extract(const Img& img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s, Get get) {
  if (s % 2 == 0) throw Error(Errc::InvalidArgument, "patch side must be odd");
  const auto h = static_cast<std::ptrdiff_t>(s / 2);
  Vector out;
  out.reserve(s * s);
  for (std::ptrdiff_t dr = -h; dr <= h; ++dr)
    for (std::ptrdiff_t dc = -h; dc <= h; ++dc)
      out.push_back(get(mirror_index(row + dr, img.height()), mirror_index(col + dc, img.width())));
  return out;
}

void require_same_length(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(Errc::DimensionMismatch, "patches differ in size");
}

// The one-dimensional forms of the two metrics, shared with the grid scan.
inline double student_term(double diff, double nu, double two_sigma) {
  const double t = diff / two_sigma;
  return std::log(nu + t * t);
}

inline double wc_term(double diff, double rho) {
  return std::log(1.0 + rho * rho - 2.0 * rho * std::cos(0.5 * wrap_angle(diff)));
}

}  // namespace

Vector extract_patch(const Image& img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s) {
  return extract(img, row, col, s, [&](std::size_t r, std::size_t c) { return img(r, c); });
}

Vector extract_patch(const S1Image& img, std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s) {
  return extract(img, row, col, s, [&](std::size_t r, std::size_t c) { return img(r, c); });
}

double dist_student(std::span<const double> p, std::span<const double> q, double nu, double sigma) {
  require_same_length(p, q);
  if (!(nu > 0.0)) throw Error(Errc::InvalidNu, "patch distance needs nu > 0");
  if (!(sigma > 0.0)) throw Error(Errc::InvalidArgument, "patch distance needs sigma > 0");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += student_term(p[i] - q[i], nu, 2.0 * sigma);
  return d;
}

double dist_wrapped_cauchy(std::span<const double> p, std::span<const double> q, double rho) {
  require_same_length(p, q);
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(Errc::InvalidArgument, "rho must lie in [0, 1)");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += wc_term(p[i] - q[i], rho);
  return d;
}

namespace detail {

PaddedGrid::PaddedGrid(std::span<const double> values, std::size_t width, std::size_t height, std::size_t margin)
    : pw_(width + 2 * margin), m_(static_cast<std::ptrdiff_t>(margin)) {
  const std::size_t ph = height + 2 * margin;
  v_.resize(pw_ * ph);
  for (std::size_t r = 0; r < ph; ++r) {
    const std::size_t sr = mirror_index(static_cast<std::ptrdiff_t>(r) - m_, height);
    for (std::size_t c = 0; c < pw_; ++c) {
      v_[r * pw_ + c] = values[sr * width + mirror_index(static_cast<std::ptrdiff_t>(c) - m_, width)];
    }
  }
}

void PaddedGrid::copy_patch(std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s, double* out) const {
  const double* o = patch_origin(row, col, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) *out++ = o[i * pw_ + j];
}

std::ptrdiff_t grid_margin(const DenoiseConfig& cfg) {
  return static_cast<std::ptrdiff_t>(cfg.window / 2 + cfg.patch_size / 2);
}

SimilaritySet select_on_grid(const PaddedGrid& g, std::size_t row, std::size_t col, const DenoiseConfig& cfg,
                             Metric metric, std::vector<double>& dist) {
  const std::size_t s = cfg.patch_size;
  const std::size_t w = cfg.window;
  const auto hw = static_cast<std::ptrdiff_t>(w / 2);
  const auto r0 = static_cast<std::ptrdiff_t>(row);
  const auto c0 = static_cast<std::ptrdiff_t>(col);
  const std::size_t stride = g.stride();
  const double* ref = g.patch_origin(r0, c0, s);
  const double two_sigma = 2.0 * cfg.sigma;
  const double rho = metric == Metric::wrapped_cauchy ? std::exp(-cfg.sigma) : 0.0;

  dist.resize(w * w);
  std::size_t idx = 0;
  for (std::ptrdiff_t dr = -hw; dr <= hw; ++dr) {
    for (std::ptrdiff_t dc = -hw; dc <= hw; ++dc, ++idx) {
      const double* q = g.patch_origin(r0 + dr, c0 + dc, s);
      double d = 0.0;
      if (metric == Metric::student) {
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j)
            d += student_term(ref[i * stride + j] - q[i * stride + j], cfg.nu, two_sigma);
      } else {
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j) d += wc_term(ref[i * stride + j] - q[i * stride + j], rho);
      }
      dist[idx] = d;
    }
  }

  const std::size_t self = (w / 2) * w + w / 2;
  std::vector<std::size_t> order(w * w);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    if ((a == self) != (b == self)) return a == self;
    return a < b;
  };
  // The reference goes first even if rounding ever let a rival undercut it.
  std::swap(order[0], order[self]);
  std::partial_sort(order.begin() + 1, order.begin() + static_cast<std::ptrdiff_t>(cfg.k), order.end(), before);

  SimilaritySet out;
  out.row = row;
  out.col = col;
  out.members.reserve(cfg.k);
  for (std::size_t t = 0; t < cfg.k; ++t) {
    const std::size_t i = order[t];
    out.members.push_back({r0 + static_cast<std::ptrdiff_t>(i / w) - hw, c0 + static_cast<std::ptrdiff_t>(i % w) - hw,
                           dist[i]});
  }
  return out;
}

}  // namespace detail

SimilaritySet select_similar(const Image& img, std::size_t row, std::size_t col, const DenoiseConfig& cfg) {
  validate(cfg);
  if (row >= img.height() || col >= img.width()) throw Error(Errc::InvalidArgument, "pixel outside the image");
  const detail::PaddedGrid g(img.pixels(), img.width(), img.height(),
                             static_cast<std::size_t>(detail::grid_margin(cfg)));
  std::vector<double> scratch;
  return detail::select_on_grid(g, row, col, cfg, detail::Metric::student, scratch);
}

SimilaritySet select_similar(const S1Image& img, std::size_t row, std::size_t col, const DenoiseConfig& cfg) {
  validate(cfg, true);
  if (row >= img.height() || col >= img.width()) throw Error(Errc::InvalidArgument, "pixel outside the image");
  const detail::PaddedGrid g(img.angles(), img.width(), img.height(),
                             static_cast<std::size_t>(detail::grid_margin(cfg)));
  std::vector<double> scratch;
  return detail::select_on_grid(g, row, col, cfg, detail::Metric::wrapped_cauchy, scratch);
}

}  // namespace myriad
