#pragma once

// Monte-Carlo comparison of GMMF and EM iteration counts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "myriad/numkernel.hpp"

namespace myriad {

struct LabeledScatter {
  std::string label;
  SpdMatrix sigma;
};

struct BenchConfig {
  std::size_t d = 2;
  std::size_t n = 100;
  std::size_t trials = 1000;
  std::vector<double> nus{1.0, 2.0, 5.0, 10.0, 100.0};
  /// Empty means {"I": identity}.
  std::vector<LabeledScatter> sigmas;
  /// Empty means the zero vector.
  Vector mu;
  double tol = 1e-6;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct BenchRow {
  double nu = 0.0;
  std::string sigma_label;
  double mean_iter_gmmf = 0.0;
  double std_iter_gmmf = 0.0;
  double mean_iter_em = 0.0;
  double std_iter_em = 0.0;
  /// Trials where either estimator threw or did not converge; they are left
  /// out of the means.
  std::size_t failures = 0;
};

/// Trial t of every (nu, sigma) cell draws its samples from seed
/// split_seed(cfg.seed, t). Rows are ordered by (nu, sigma label).
std::vector<BenchRow> run_table1(const BenchConfig& cfg);

/// CSV text with header nu,sigma,mean_gmmf,std_gmmf,mean_em,std_em,failures.
std::string format_csv(const std::vector<BenchRow>& rows);
void emit_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

}  // namespace myriad
