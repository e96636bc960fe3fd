#pragma once

// Mirror-padded copy of an image so that every patch reachable from a
// search window is a plain strided block.

#include <cstddef>
#include <span>
#include <vector>

#include "myriad/denoise.hpp"

namespace myriad::detail {

class PaddedGrid {
 public:
  PaddedGrid(std::span<const double> values, std::size_t width, std::size_t height, std::size_t margin);

  /// Value at image coordinates (row, col), which may lie in the margin.
  double at(std::ptrdiff_t row, std::ptrdiff_t col) const {
    return v_[static_cast<std::size_t>(row + m_) * pw_ + static_cast<std::size_t>(col + m_)];
  }
  /// Pointer to the top-left entry of the s x s patch centred at (row, col).
  const double* patch_origin(std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s) const {
    const auto h = static_cast<std::ptrdiff_t>(s / 2);
    return &v_[static_cast<std::size_t>(row - h + m_) * pw_ + static_cast<std::size_t>(col - h + m_)];
  }
  std::size_t stride() const noexcept { return pw_; }
  void copy_patch(std::ptrdiff_t row, std::ptrdiff_t col, std::size_t s, double* out) const;

 private:
  std::vector<double> v_;
  std::size_t pw_;
  std::ptrdiff_t m_;
};

enum class Metric { student, wrapped_cauchy };

/// Selection against a padded grid whose margin is at least w/2 + s/2.
SimilaritySet select_on_grid(const PaddedGrid& g, std::size_t row, std::size_t col, const DenoiseConfig& cfg,
                             Metric metric, std::vector<double>& scratch);

std::ptrdiff_t grid_margin(const DenoiseConfig& cfg);

}  // namespace myriad::detail
