#include "myriad/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/estimators.hpp"
#include "myriad/rng.hpp"

namespace myriad {

namespace {

struct Trial {
  double gmmf = 0.0;
  double em = 0.0;
  bool ok = false;
};

Trial run_trial(const StudentTParams& p, const BenchConfig& cfg, std::uint64_t seed) {
  Trial t;
  try {
    const SampleSet x = sample_student_t(p, cfg.n, seed);
    const WeightVector w = WeightVector::uniform(cfg.n);
    EstimatorOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    const EstimateResult g = gmmf_estimate(x, w, p.nu, opts);
    const EstimateResult e = em_estimate(x, w, p.nu, opts);
    t.gmmf = static_cast<double>(g.iterations);
    t.em = static_cast<double>(e.iterations);
    t.ok = g.converged && e.converged;
  } catch (const Error&) {
    t.ok = false;
  }
  return t;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<BenchRow> run_table1(const BenchConfig& cfg) {
  if (cfg.d == 0 || cfg.n == 0 || cfg.trials == 0) throw Error(Errc::InvalidConfig, "counts must be positive");
  if (!(cfg.tol > 0.0)) throw Error(Errc::InvalidConfig, "tol must be positive");
  std::vector<LabeledScatter> sigmas = cfg.sigmas;
  if (sigmas.empty()) sigmas.push_back({"I", SpdMatrix::identity(cfg.d)});
  const Vector mu = cfg.mu.empty() ? Vector(cfg.d, 0.0) : cfg.mu;
  if (mu.size() != cfg.d) throw Error(Errc::InvalidConfig, "mu has the wrong dimension");
  for (const auto& s : sigmas) {
    if (s.sigma.dim() != cfg.d) throw Error(Errc::InvalidConfig, "scatter " + s.label + " has the wrong dimension");
    cholesky(s.sigma);
  }
  for (double nu : cfg.nus) {
    if (!(nu >= 1.0) || !std::isfinite(nu)) throw Error(Errc::InvalidConfig, "bench nu values must be >= 1");
    const auto d = static_cast<double>(cfg.d);
    if (!(d / static_cast<double>(cfg.n) < (nu + d - 1.0) / (nu + d))) {
      throw Error(Errc::InvalidConfig, "n too small for the existence condition at nu = " + std::to_string(nu));
    }
  }

  std::vector<double> nus = cfg.nus;
  std::sort(nus.begin(), nus.end());
  std::sort(sigmas.begin(), sigmas.end(), [](const auto& a, const auto& b) { return a.label < b.label; });

  std::vector<BenchRow> rows;
  for (double nu : nus) {
    for (const auto& s : sigmas) {
      const StudentTParams p{mu, s.sigma, nu};
      std::vector<Trial> trials(cfg.trials);
      std::atomic<std::size_t> next{0};
      const auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < cfg.trials;) trials[t] = run_trial(p, cfg, split_seed(cfg.seed, t));
      };
      const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.trials));
      if (nthreads == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
      }
      BenchRow row;
      row.nu = nu;
      row.sigma_label = s.label;
      std::vector<double> g, e;
      for (const Trial& t : trials) {
        if (!t.ok) {
          ++row.failures;
          continue;
        }
        g.push_back(t.gmmf);
        e.push_back(t.em);
      }
      mean_std(g, row.mean_iter_gmmf, row.std_iter_gmmf);
      mean_std(e, row.mean_iter_em, row.std_iter_em);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_csv(const std::vector<BenchRow>& rows) {
  std::vector<const BenchRow*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const BenchRow* a, const BenchRow* b) {
    return a->nu != b->nu ? a->nu < b->nu : a->sigma_label < b->sigma_label;
  });
  std::string out = "nu,sigma,mean_gmmf,std_gmmf,mean_em,std_em,failures\n";
  char buf[256];
  for (const BenchRow* r : order) {
    std::snprintf(buf, sizeof buf, "%g,%s,%.4f,%.4f,%.4f,%.4f,%zu\n", r->nu, r->sigma_label.c_str(),
                  r->mean_iter_gmmf, r->std_iter_gmmf, r->mean_iter_em, r->std_iter_em, r->failures);
    out += buf;
  }
  return out;
}

void emit_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  f << format_csv(rows);
  if (!f) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace myriad
