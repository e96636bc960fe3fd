#include "myriad/sample_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "myriad/error.hpp"

namespace myriad {

SampleSet::SampleSet(std::size_t n, std::size_t dim, std::vector<double> rows)
    : n_(n), d_(dim), data_(std::move(rows)) {
  if (n_ == 0 || d_ == 0) throw Error(Errc::InvalidArgument, "sample set needs n >= 1 and d >= 1");
  if (data_.size() != n_ * d_) {
    throw Error(Errc::DimensionMismatch, "sample set payload has " + std::to_string(data_.size()) +
                                             " values, expected " + std::to_string(n_ * d_));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw Error(Errc::InvalidArgument, "non-finite sample entry at row " + std::to_string(k / d_) +
                                             ", column " + std::to_string(k % d_));
    }
  }
}

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(Errc::InvalidArgument, "sample set needs n >= 1");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw Error(Errc::DimensionMismatch, "ragged sample rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SampleSet(rows.size(), d, std::move(flat));
}

SampleSet SampleSet::from_values(std::span<const double> values) {
  return SampleSet(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw Error(Errc::InvalidArgument, "empty weight vector");
  double sum = 0.0;
  for (double v : w_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidArgument, "weights must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(Errc::InvalidArgument, "weights sum to " + std::to_string(sum) + ", not 1");
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "empty weight vector");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidArgument, "weights must be positive");
    sum += v;
  }
  for (double& v : w) v /= sum;
  return WeightVector(std::move(w));
}

double WeightVector::max() const noexcept { return *std::max_element(w_.begin(), w_.end()); }

}  // namespace myriad
