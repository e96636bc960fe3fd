#pragma once

// Helpers shared by the estimator translation units.

#include <cstddef>
#include <vector>

#include "myriad/sample_set.hpp"

namespace myriad::detail {

/// Samples and weights permuted into canonical order: rows compared
/// lexicographically, ties broken by weight.
struct CanonicalData {
  SampleSet samples;
  std::vector<double> weights;
};

CanonicalData canonicalize(const SampleSet& samples, const WeightVector& w);

/// Projects every row onto the unit sphere; throws ZeroSample on a zero row.
SampleSet normalize_rows(const SampleSet& samples);

}  // namespace myriad::detail
