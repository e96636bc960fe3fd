#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "myriad/error.hpp"
#include "myriad/estimators.hpp"
#include "myriad/rng.hpp"

namespace myriad {

namespace {

constexpr std::size_t kExhaustiveLimit = 15;
constexpr std::size_t kRandomSubsets = 256;
constexpr std::uint64_t kSubsetSeed = 0x6d79726961644b31ULL;

/// Rank of the given row vectors by Gaussian elimination with partial
/// pivoting; entries below 1e-10 of the largest magnitude count as zero.
std::size_t rank_of(std::vector<std::vector<double>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  double scale = 0.0;
  for (const auto& r : rows)
    for (double v : r) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;
  const double tol = 1e-10 * scale;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (std::abs(rows[r][c]) > std::abs(rows[piv][c])) piv = r;
    if (std::abs(rows[piv][c]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

class IndependenceTester {
 public:
  IndependenceTester(const SampleSet& s, bool affine) : s_(s), affine_(affine) {}

  bool independent(std::span<const std::size_t> idx) const {
    std::vector<std::vector<double>> rows;
    if (affine_) {
      const auto base = s_.row(idx[0]);
      for (std::size_t k = 1; k < idx.size(); ++k) {
        const auto r = s_.row(idx[k]);
        std::vector<double> v(r.size());
        for (std::size_t j = 0; j < r.size(); ++j) v[j] = r[j] - base[j];
        rows.push_back(std::move(v));
      }
    } else {
      for (std::size_t i : idx) {
        const auto r = s_.row(i);
        rows.emplace_back(r.begin(), r.end());
      }
    }
    return rank_of(std::move(rows)) == rows_needed(idx.size());
  }

 private:
  std::size_t rows_needed(std::size_t k) const { return affine_ ? k - 1 : k; }
  const SampleSet& s_;
  bool affine_;
};

/// Exact duplicate rows (affine) or zero rows and collinear pairs (linear),
/// found in O(n log n) over all samples.
std::optional<std::vector<std::size_t>> find_pair_violation(const SampleSet& s, bool affine,
                                                            const IndependenceTester& tester) {
  const std::size_t n = s.size();
  const std::size_t d = s.dim();
  std::vector<std::vector<double>> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = s.row(i);
    keys[i].assign(r.begin(), r.end());
    if (!affine) {
      const double len = norm2(r);
      if (len == 0.0) return std::vector<std::size_t>{i};
      double sign = 1.0;
      for (double v : r) {
        if (v != 0.0) {
          sign = v > 0.0 ? 1.0 : -1.0;
          break;
        }
      }
      for (double& v : keys[i]) v *= sign / len;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t k = 1; k < n; ++k) {
    const auto& a = keys[order[k - 1]];
    const auto& b = keys[order[k]];
    bool close = true;
    for (std::size_t j = 0; j < d && close; ++j) close = std::abs(a[j] - b[j]) <= 1e-12;
    if (!close) continue;
    std::vector<std::size_t> pair{std::min(order[k - 1], order[k]), std::max(order[k - 1], order[k])};
    if (!tester.independent(pair)) return pair;
  }
  return std::nullopt;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

FeasibilityReport check_assumptions(const SampleSet& samples, const WeightVector& w, double nu,
                                    EstimationMode mode) {
  if (w.size() != samples.size()) throw Error(Errc::DimensionMismatch, "weights and samples disagree");
  const std::size_t n = samples.size();
  const std::size_t dim = samples.dim();
  const auto d = static_cast<double>(dim);
  FeasibilityReport rep;
  rep.worst_weight = w.max();

  const double rhs = (nu + d - 1.0) / (nu + d);
  switch (mode) {
    case EstimationMode::joint:
      rep.weight_bound_ok = d * rep.worst_weight < rhs;
      rep.required_bound = rhs / d;
      break;
    case EstimationMode::scatter_only:
      rep.weight_bound_ok = (d - 1.0) * rep.worst_weight < rhs;
      rep.required_bound = dim == 1 ? std::numeric_limits<double>::infinity() : rhs / (d - 1.0);
      break;
    case EstimationMode::tyler:
      rep.weight_bound_ok = d * rep.worst_weight < 1.0;
      rep.required_bound = 1.0 / d;
      break;
  }

  const bool affine = mode == EstimationMode::joint;
  const std::size_t k = std::min(n, affine ? dim + 1 : dim);
  const IndependenceTester tester(samples, affine);
  rep.exhaustive = k <= 2 || n <= kExhaustiveLimit;

  if (auto bad = find_pair_violation(samples, affine, tester)) {
    rep.independence_ok = false;
    rep.violating_subset = std::move(bad);
    return rep;
  }
  // Subsets of size <= 2 are fully covered by the pair scan.
  if (k <= 2) return rep;

  std::vector<std::size_t> idx(k);
  if (n <= kExhaustiveLimit) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
      if (!tester.independent(idx)) {
        rep.independence_ok = false;
        rep.violating_subset = idx;
        return rep;
      }
    } while (next_combination(idx, n));
    return rep;
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  // The full data set must span the whole (affine) space.
  {
    std::vector<std::vector<double>> rows;
    const auto base = samples.row(0);
    for (std::size_t i = affine ? 1 : 0; i < n; ++i) {
      const auto r = samples.row(i);
      std::vector<double> v(dim);
      for (std::size_t j = 0; j < dim; ++j) v[j] = affine ? r[j] - base[j] : r[j];
      rows.push_back(std::move(v));
    }
    if (rank_of(std::move(rows)) < dim) {
      rep.independence_ok = false;
      rep.violating_subset = all;
      return rep;
    }
  }
  Rng rng(kSubsetSeed ^ (n * 0x9E3779B97F4A7C15ULL) ^ dim);
  for (std::size_t t = 0; t < kRandomSubsets; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
      std::swap(all[i], all[std::min(j, n - 1)]);
    }
    std::copy(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), idx.begin());
    std::sort(idx.begin(), idx.end());
    if (!tester.independent(idx)) {
      rep.independence_ok = false;
      rep.violating_subset = idx;
      return rep;
    }
  }
  return rep;
}

std::size_t minimal_uniform_sample_count(std::size_t d, double nu) {
  const auto dd = static_cast<double>(d);
  const double rhs = (nu + dd - 1.0) / (nu + dd);
  if (!(rhs > 0.0)) throw Error(Errc::InvalidConfig, "no sample count satisfies the weight bound");
  auto n = static_cast<std::size_t>(std::floor(dd / rhs));
  n = n > 1 ? n - 1 : 1;
  while (!(dd * (1.0 / static_cast<double>(n)) < rhs)) ++n;
  return n;
}

}  // namespace myriad
