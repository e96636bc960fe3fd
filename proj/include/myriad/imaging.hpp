#pragma once

// Grayscale and circle-valued images, file formats, noise models and
// quality metrics.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace myriad {

/// Real-valued image, row-major. `peak` is the nominal dynamic range used
/// by PSNR/SSIM and by the PGM writer; pixel values may leave [0, peak].
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, double fill = 0.0, double peak = 255.0);
  Image(std::size_t width, std::size_t height, std::vector<double> pixels, double peak = 255.0);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  double peak() const noexcept { return peak_; }
  double operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  /// Writes must keep the value finite.
  void set(std::size_t row, std::size_t col, double v);
  std::span<const double> pixels() const noexcept { return pixels_; }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double peak_ = 255.0;
  std::vector<double> pixels_;
};

/// Image of angles in [-pi, pi).
class S1Image {
 public:
  S1Image() = default;
  S1Image(std::size_t width, std::size_t height, double fill = 0.0);
  S1Image(std::size_t width, std::size_t height, std::vector<double> angles);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double operator()(std::size_t row, std::size_t col) const { return angles_[row * width_ + col]; }
  /// Wraps the value into [-pi, pi).
  void set(std::size_t row, std::size_t col, double v);
  std::span<const double> angles() const noexcept { return angles_; }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> angles_;
};

/// f = u + sigma * eta / sqrt(y), eta ~ N(0,1), y ~ Gamma(nu/2, nu/2), i.i.d.
/// per pixel in row-major order. Not clipped.
Image add_student_t_noise(const Image& u, double nu, double sigma, std::uint64_t seed);

/// Adds a Cauchy(0, gamma) perturbation per pixel and wraps to [-pi, pi);
/// the perturbation is wrapped Cauchy with rho = exp(-gamma).
S1Image add_wrapped_cauchy_noise(const S1Image& u, double gamma, std::uint64_t seed);

/// Clamps every pixel to [0, peak].
Image clip(const Image& img);

/// 10 log10(peak^2 / MSE) with the reference's peak; +inf when MSE = 0.
double psnr(const Image& ref, const Image& test);

/// Mean SSIM over all full 11x11 windows (Gaussian weights, sigma 1.5),
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.
double ssim(const Image& ref, const Image& test);

/// Geodesic distance on the circle, in [0, pi].
double s1_distance(double alpha, double beta) noexcept;

/// Mean squared geodesic distance.
double s1_mse(const S1Image& ref, const S1Image& test);

struct PgmWriteReport {
  std::size_t clamped_low = 0;
  std::size_t clamped_high = 0;
};

/// Binary PGM (P5). maxval <= 255 uses one byte per sample, otherwise two
/// bytes big-endian. The returned image has peak = maxval.
Image read_pgm(const std::filesystem::path& path);

/// Writes with maxval = round(peak); values are clamped to [0, maxval] and
/// rounded half-to-even.
PgmWriteReport write_pgm(const std::filesystem::path& path, const Image& img);

enum class RasterKind : std::uint32_t { real = 0, circular = 1 };

/// MYR1 raster: "MYR1", u32 width, u32 height, u32 kind, u64 reserved (all
/// little-endian), then width*height little-endian f64 values row-major.
RasterKind peek_f64_kind(const std::filesystem::path& path);
Image read_f64_image(const std::filesystem::path& path, double peak = 255.0);
S1Image read_f64_s1(const std::filesystem::path& path);
void write_f64(const std::filesystem::path& path, const Image& img);
void write_f64(const std::filesystem::path& path, const S1Image& img);

/// Synthetic 128x128 (by default) piecewise-constant test image: a few
/// rectangles, a disk and a triangle on a mid-gray background, values in
/// [0, 255].
Image make_piecewise_phantom(std::size_t side = 128);

/// Circle-valued counterpart, 256x256 by default, on the same layout; two
/// regions sit on either side of the -pi/pi seam.
S1Image make_s1_phantom(std::size_t side = 256);

}  // namespace myriad
