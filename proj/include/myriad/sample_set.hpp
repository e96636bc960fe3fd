#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace myriad {

/// n samples of dimension d, stored row-major. Entries are finite.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t n, std::size_t dim, std::vector<double> rows);
  static SampleSet from_rows(const std::vector<std::vector<double>>& rows);
  /// One-dimensional samples.
  static SampleSet from_values(std::span<const double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Weights in the open probability simplex: all positive, summing to one
/// within 1e-12.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w);
  static WeightVector uniform(std::size_t n);
  /// Rescales positive weights to unit sum.
  static WeightVector normalized(std::vector<double> w);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }
  double max() const noexcept;

 private:
  std::vector<double> w_;
};

}  // namespace myriad
