#include <algorithm>
#include <cmath>
#include <string>

#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/imaging.hpp"

namespace myriad {

namespace {

void check_shape(std::size_t width, std::size_t height, std::size_t count) {
  if (width == 0 || height == 0) throw Error(Errc::InvalidArgument, "image sides must be positive");
  if (count != width * height) throw Error(Errc::ShapeMismatch, "pixel count does not match width * height");
}

}  // namespace

Image::Image(std::size_t width, std::size_t height, double fill, double peak)
    : Image(width, height, std::vector<double>(width * height, fill), peak) {}

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels, double peak)
    : width_(width), height_(height), peak_(peak), pixels_(std::move(pixels)) {
  check_shape(width, height, pixels_.size());
  if (!(peak > 0.0) || !std::isfinite(peak)) throw Error(Errc::InvalidArgument, "peak must be positive");
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (!std::isfinite(pixels_[i])) {
      throw Error(Errc::InvalidArgument, "non-finite pixel at index " + std::to_string(i));
    }
  }
}

void Image::set(std::size_t row, std::size_t col, double v) {
  if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "pixel values must be finite");
  pixels_[row * width_ + col] = v;
}

S1Image::S1Image(std::size_t width, std::size_t height, double fill)
    : S1Image(width, height, std::vector<double>(width * height, fill)) {}

S1Image::S1Image(std::size_t width, std::size_t height, std::vector<double> angles)
    : width_(width), height_(height), angles_(std::move(angles)) {
  check_shape(width, height, angles_.size());
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    if (!std::isfinite(angles_[i])) {
      throw Error(Errc::InvalidArgument, "non-finite angle at index " + std::to_string(i));
    }
    angles_[i] = wrap_angle(angles_[i]);
  }
}

void S1Image::set(std::size_t row, std::size_t col, double v) {
  if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "angles must be finite");
  angles_[row * width_ + col] = wrap_angle(v);
}

Image clip(const Image& img) {
  std::vector<double> px(img.pixels().begin(), img.pixels().end());
  for (double& v : px) v = std::min(std::max(v, 0.0), img.peak());
  return Image(img.width(), img.height(), std::move(px), img.peak());
}

}  // namespace myriad
