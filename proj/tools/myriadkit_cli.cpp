// myriadkit: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 the estimator did not converge (the JSON result is still printed).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "myriad/bench.hpp"
#include "myriad/denoise.hpp"
#include "myriad/distributions.hpp"
#include "myriad/error.hpp"
#include "myriad/estimators.hpp"
#include "myriad/imaging.hpp"

namespace {

using json = nlohmann::ordered_json;
using myriad::Errc;
using myriad::Error;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      const std::string tok = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || *end != '\0' || !std::isfinite(v)) {
        throw Error(Errc::InvalidArgument, path + ":" + std::to_string(lineno) + ": not a finite number: '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(Errc::DimensionMismatch, path + ":" + std::to_string(lineno) + ": expected " +
                                               std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::InvalidArgument, path + ": no samples");
  return rows;
}

/// All numbers of a CSV file, whatever its shape.
std::vector<double> read_flat(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& c : all)
    if (c == '\n' || c == '\r') c = ',';
  std::vector<double> out;
  std::stringstream ss(all);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = cell.find_last_not_of(" \t");
    const std::string tok = cell.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v)) throw Error(Errc::InvalidArgument, path + ": not a finite number: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(Errc::InvalidArgument, path + ": no values");
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || !std::isfinite(v)) {
      throw Error(Errc::InvalidArgument, std::string("bad value in ") + what + ": '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

myriad::WeightVector load_weights(const std::string& path, std::size_t n) {
  if (path.empty()) return myriad::WeightVector::uniform(n);
  std::vector<double> w = read_flat(path);
  if (w.size() != n) {
    throw Error(Errc::DimensionMismatch, "got " + std::to_string(w.size()) + " weights for " + std::to_string(n) + " samples");
  }
  return myriad::WeightVector::normalized(std::move(w));
}

json number_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

json matrix_json(const myriad::SpdMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

enum class FileFormat { pgm, myr };

FileFormat sniff(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (magic[0] == 'P' && magic[1] == '5') return FileFormat::pgm;
  if (std::string(magic, 4) == "MYR1") return FileFormat::myr;
  throw Error(Errc::MalformedHeader, path + ": neither a binary PGM nor a MYR1 raster");
}

bool wants_pgm(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == "pgm";
}

bool is_circular(const std::string& path) {
  return sniff(path) == FileFormat::myr && myriad::peek_f64_kind(path) == myriad::RasterKind::circular;
}

myriad::Image load_real(const std::string& path) {
  if (sniff(path) == FileFormat::pgm) return myriad::read_pgm(path);
  return myriad::read_f64_image(path);
}

json save_real(const std::string& path, const myriad::Image& img) {
  json j;
  if (wants_pgm(path)) {
    const auto rep = myriad::write_pgm(path, img);
    j["clamped_low"] = rep.clamped_low;
    j["clamped_high"] = rep.clamped_high;
  } else {
    myriad::write_f64(path, img);
  }
  return j;
}

void save_s1(const std::string& path, const myriad::S1Image& img) {
  if (wants_pgm(path)) throw Error(Errc::KindMismatch, "circle-valued images can only be written as MYR1");
  myriad::write_f64(path, img);
}

std::size_t default_threads() {
  const char* env = std::getenv("MYRIADKIT_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw Error(Errc::InvalidConfig, "MYRIADKIT_THREADS must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  std::string weights;
  double nu = 0.0;
  std::string method = "gmmf";
  std::string mode = "joint";
  std::string mu;
  double tol = 1e-6;
  std::size_t max_iter = 10000;
  bool check = true;
};

int run_estimate(const EstimateArgs& a) {
  const myriad::SampleSet x = myriad::SampleSet::from_rows(read_csv(a.input));
  const myriad::WeightVector w = load_weights(a.weights, x.size());
  myriad::EstimatorOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  opts.check_assumptions = a.check;
  opts.mode = a.mode == "joint" ? myriad::EstimationMode::joint : myriad::EstimationMode::scatter_only;
  if (!a.mu.empty()) {
    if (a.mode != "scatter-only") throw Error(Errc::InvalidArgument, "--mu only applies to --mode scatter-only");
    opts.fixed_mu = parse_list(a.mu, "--mu");
  }
  const myriad::EstimateResult r =
      a.method == "em" ? myriad::em_estimate(x, w, a.nu, opts) : myriad::gmmf_estimate(x, w, a.nu, opts);
  const myriad::FixedPointResiduals res = myriad::fixed_point_residuals(x, w, r.params);
  json j;
  j["method"] = a.method;
  j["mode"] = a.mode;
  j["n"] = x.size();
  j["d"] = x.dim();
  j["nu"] = a.nu;
  j["mu"] = r.params.mu;
  j["sigma"] = matrix_json(r.params.sigma);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_step"] = r.final_step;
  j["objective"] = r.objective_trace.back();
  j["trace_residual"] = res.trace;
  j["assumption_check_bypassed"] = r.assumption_check_bypassed;
  print(j);
  return r.converged ? 0 : kExitNotConverged;
}

struct TylerArgs {
  std::string input;
  std::string weights;
  double tol = 1e-6;
  std::size_t max_iter = 10000;
  bool check = true;
};

int run_tyler(const TylerArgs& a) {
  const myriad::SampleSet x = myriad::SampleSet::from_rows(read_csv(a.input));
  const myriad::WeightVector w = load_weights(a.weights, x.size());
  myriad::EstimatorOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  opts.check_assumptions = a.check;
  const myriad::EstimateResult r = myriad::tyler_estimate(x, w, opts);
  json j;
  j["n"] = x.size();
  j["d"] = x.dim();
  j["sigma"] = matrix_json(r.params.sigma);
  j["trace"] = r.params.sigma.trace();
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_step"] = r.final_step;
  j["fixed_point_residual"] = myriad::tyler_residual(x, w, r.params.sigma);
  print(j);
  return r.converged ? 0 : kExitNotConverged;
}

struct WcArgs {
  std::string input;
  std::string weights;
  double tol = 1e-6;
  std::size_t max_iter = 10000;
};

int run_wc(const WcArgs& a) {
  const std::vector<double> theta = read_flat(a.input);
  const myriad::WeightVector w = load_weights(a.weights, theta.size());
  myriad::EstimatorOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  const myriad::WrappedCauchyEstimate e = myriad::wrapped_cauchy_estimate(theta, w, opts);
  json j;
  j["n"] = theta.size();
  j["a"] = e.params.a();
  j["rho"] = e.params.rho();
  j["zeta"] = {e.zeta[0], e.zeta[1]};
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["final_step"] = e.final_step;
  j["damped_steps"] = e.damped_steps;
  print(j);
  return e.converged ? 0 : kExitNotConverged;
}

struct NoiseArgs {
  std::string input;
  std::string output;
  std::string model = "student-t";
  double nu = 1.0;
  double sigma = 10.0;
  double gamma = 0.1;
  std::uint64_t seed = 1;
  bool clip = false;
};

int run_add_noise(const NoiseArgs& a) {
  json j;
  j["model"] = a.model;
  j["seed"] = a.seed;
  if (a.model == "student-t") {
    if (is_circular(a.input)) throw Error(Errc::KindMismatch, "student-t noise needs a real image");
    myriad::Image noisy = myriad::add_student_t_noise(load_real(a.input), a.nu, a.sigma, a.seed);
    if (a.clip) noisy = myriad::clip(noisy);
    j["nu"] = a.nu;
    j["sigma"] = a.sigma;
    j["pixels"] = noisy.size();
    j["write"] = save_real(a.output, noisy);
  } else {
    if (sniff(a.input) != FileFormat::myr) throw Error(Errc::KindMismatch, "wrapped-cauchy noise needs a MYR1 angle image");
    const myriad::S1Image noisy = myriad::add_wrapped_cauchy_noise(myriad::read_f64_s1(a.input), a.gamma, a.seed);
    save_s1(a.output, noisy);
    j["gamma"] = a.gamma;
    j["pixels"] = noisy.size();
  }
  j["output"] = a.output;
  print(j);
  return 0;
}

struct DenoiseArgs {
  std::string input;
  std::string output;
  std::string kind;
  double nu = 1.0;
  std::optional<double> sigma;
  std::optional<double> gamma;
  std::size_t patch = 5;
  std::optional<std::size_t> window;
  std::size_t k = 50;
  std::string mode = "pixelwise";
  std::optional<double> var_threshold;
  std::optional<std::size_t> threads;
  double tol = 1e-5;
  std::size_t max_iter = 1000;
};

json stats_json(const myriad::DenoiseStats& s) {
  json j;
  j["pixels"] = s.pixels;
  j["degenerate_sets"] = s.degenerate_sets;
  j["not_converged"] = s.not_converged;
  j["singular_stops"] = s.singular_stops;
  j["fallbacks"] = s.fallbacks;
  j["patchwise_pixels"] = s.patchwise_pixels;
  return j;
}

int run_denoise(const DenoiseArgs& a) {
  const bool circular = a.kind.empty() ? is_circular(a.input) : a.kind == "s1";
  myriad::DenoiseConfig cfg;
  cfg.patch_size = a.patch;
  cfg.window = a.window ? *a.window : (a.patch <= 3 ? 13 : 21);
  cfg.k = a.k;
  cfg.nu = a.nu;
  cfg.mode = a.mode == "patchwise"  ? myriad::DenoiseMode::patchwise
             : a.mode == "adaptive" ? myriad::DenoiseMode::adaptive
                                    : myriad::DenoiseMode::pixelwise;
  cfg.var_threshold = a.var_threshold;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.threads = a.threads ? *a.threads : default_threads();

  json j;
  j["kind"] = circular ? "s1" : "real";
  const auto t0 = std::chrono::steady_clock::now();
  if (circular) {
    if (a.sigma) throw Error(Errc::InvalidConfig, "use --gamma for circle-valued images");
    if (!a.gamma) throw Error(Errc::InvalidConfig, "--gamma is required for circle-valued images");
    cfg.sigma = *a.gamma;
    myriad::validate(cfg, true);
    const auto r = myriad::denoise_s1_image(myriad::read_f64_s1(a.input), cfg);
    save_s1(a.output, r.image);
    j["gamma"] = cfg.sigma;
    j["stats"] = stats_json(r.stats);
  } else {
    if (a.gamma) throw Error(Errc::InvalidConfig, "use --sigma for real images");
    if (!a.sigma) throw Error(Errc::InvalidConfig, "--sigma is required for real images");
    cfg.sigma = *a.sigma;
    myriad::validate(cfg);
    const auto r = myriad::denoise_image(load_real(a.input), cfg);
    j["write"] = save_real(a.output, r.image);
    j["mode"] = a.mode;
    j["nu"] = cfg.nu;
    j["sigma"] = cfg.sigma;
    if (cfg.mode == myriad::DenoiseMode::adaptive) j["var_threshold"] = r.stats.var_threshold;
    j["stats"] = stats_json(r.stats);
  }
  j["patch"] = cfg.patch_size;
  j["window"] = cfg.window;
  j["k"] = cfg.k;
  j["threads"] = cfg.threads;
  j["output"] = a.output;
  j["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print(j);
  return 0;
}

struct MetricsArgs {
  std::string ref;
  std::string test;
  std::string kind;
};

int run_metrics(const MetricsArgs& a) {
  const bool circular = a.kind.empty() ? is_circular(a.ref) : a.kind == "s1";
  json j;
  if (circular) {
    j["epsilon"] = myriad::s1_mse(myriad::read_f64_s1(a.ref), myriad::read_f64_s1(a.test));
  } else {
    const myriad::Image r = load_real(a.ref);
    const myriad::Image t = load_real(a.test);
    j["psnr"] = number_or_string(myriad::psnr(r, t));
    j["ssim"] = myriad::ssim(r, t);
  }
  print(j);
  return 0;
}

struct BenchArgs {
  std::string config;
  std::string output;
  std::string nus;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> n;
  std::optional<std::size_t> d;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

myriad::BenchConfig bench_config(const BenchArgs& a) {
  myriad::BenchConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + a.config);
    json j;
    try {
      j = json::parse(in);
      if (j.contains("d")) cfg.d = j.at("d").get<std::size_t>();
      if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
      if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
      if (j.contains("nus")) cfg.nus = j.at("nus").get<std::vector<double>>();
      if (j.contains("mu")) cfg.mu = j.at("mu").get<std::vector<double>>();
      if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
      if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<std::size_t>();
      if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("sigmas")) {
        for (const auto& s : j.at("sigmas")) {
          const auto rows = s.at("matrix").get<std::vector<std::vector<double>>>();
          std::vector<double> flat;
          for (const auto& r : rows) {
            if (r.size() != rows.size()) throw Error(Errc::InvalidConfig, "scatter matrices must be square");
            flat.insert(flat.end(), r.begin(), r.end());
          }
          cfg.sigmas.push_back({s.at("label").get<std::string>(), myriad::SpdMatrix(rows.size(), flat)});
        }
      }
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidConfig, a.config + ": " + e.what());
    }
  }
  if (!a.nus.empty()) cfg.nus = parse_list(a.nus, "--nus");
  if (a.trials) cfg.trials = *a.trials;
  if (a.n) cfg.n = *a.n;
  if (a.d) cfg.d = *a.d;
  if (a.tol) cfg.tol = *a.tol;
  if (a.seed) cfg.seed = *a.seed;
  cfg.threads = a.threads ? *a.threads : default_threads();
  if (cfg.threads == 0) cfg.threads = 1;
  return cfg;
}

int run_bench(const BenchArgs& a) {
  const std::vector<myriad::BenchRow> rows = myriad::run_table1(bench_config(a));
  if (a.output.empty()) {
    std::cout << myriad::format_csv(rows);
  } else {
    myriad::emit_csv(rows, a.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Student-t estimation, wrapped Cauchy fitting and nonlocal denoising"};
  app.name("myriadkit");
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Weighted ML fit of a Student-t location and scatter");
  c_est->add_option("--input", est.input, "CSV samples, one per row, no header")->required()->check(CLI::ExistingFile);
  c_est->add_option("--nu", est.nu, "Degrees of freedom")->required();
  c_est->add_option("--weights", est.weights, "CSV weights (rescaled to sum to one)")->check(CLI::ExistingFile);
  c_est->add_option("--method", est.method, "gmmf or em")->check(CLI::IsMember({"gmmf", "em"}))->capture_default_str();
  c_est->add_option("--mode", est.mode, "joint or scatter-only")
      ->check(CLI::IsMember({"joint", "scatter-only"}))
      ->capture_default_str();
  c_est->add_option("--mu", est.mu, "Fixed location for scatter-only mode, comma separated");
  c_est->add_option("--tol", est.tol, "Relative step tolerance")->capture_default_str();
  c_est->add_option("--max-iter", est.max_iter, "Iteration cap")->capture_default_str();
  c_est->add_flag("--check,!--no-check", est.check, "Verify the existence conditions first (default on)");

  TylerArgs ty;
  auto* c_ty = app.add_subcommand("tyler", "Tyler's scatter M-estimator (trace one)");
  c_ty->add_option("--input", ty.input, "CSV samples, one per row, no header")->required()->check(CLI::ExistingFile);
  c_ty->add_option("--weights", ty.weights, "CSV weights (rescaled to sum to one)")->check(CLI::ExistingFile);
  c_ty->add_option("--tol", ty.tol, "Relative step tolerance")->capture_default_str();
  c_ty->add_option("--max-iter", ty.max_iter, "Iteration cap")->capture_default_str();
  c_ty->add_flag("--check,!--no-check", ty.check, "Verify the existence conditions first (default on)");

  WcArgs wc;
  auto* c_wc = app.add_subcommand("wc-estimate", "Weighted ML fit of a wrapped Cauchy law to angles");
  c_wc->add_option("--input", wc.input, "CSV of angles in radians")->required()->check(CLI::ExistingFile);
  c_wc->add_option("--weights", wc.weights, "CSV weights (rescaled to sum to one)")->check(CLI::ExistingFile);
  c_wc->add_option("--tol", wc.tol, "Relative step tolerance")->capture_default_str();
  c_wc->add_option("--max-iter", wc.max_iter, "Iteration cap")->capture_default_str();

  NoiseArgs nz;
  auto* c_nz = app.add_subcommand("add-noise", "Corrupt an image with Student-t or wrapped Cauchy noise");
  c_nz->add_option("--input", nz.input, "PGM or MYR1 image")->required()->check(CLI::ExistingFile);
  c_nz->add_option("--output", nz.output, "Output path (.pgm writes PGM, anything else MYR1)")->required();
  c_nz->add_option("--model", nz.model, "student-t or wrapped-cauchy")
      ->check(CLI::IsMember({"student-t", "wrapped-cauchy"}))
      ->capture_default_str();
  c_nz->add_option("--nu", nz.nu, "Degrees of freedom (student-t)")->capture_default_str();
  c_nz->add_option("--sigma", nz.sigma, "Noise scale (student-t)")->capture_default_str();
  c_nz->add_option("--gamma", nz.gamma, "Cauchy scale (wrapped-cauchy)")->capture_default_str();
  c_nz->add_option("--seed", nz.seed, "Random seed")->capture_default_str();
  c_nz->add_flag("--clip", nz.clip, "Clamp the noisy image to [0, peak]");

  DenoiseArgs dn;
  auto* c_dn = app.add_subcommand("denoise", "Nonlocal robust denoising");
  c_dn->add_option("--input", dn.input, "PGM or MYR1 image")->required()->check(CLI::ExistingFile);
  c_dn->add_option("--output", dn.output, "Output path (.pgm writes PGM, anything else MYR1)")->required();
  c_dn->add_option("--kind", dn.kind, "real or s1 (default: from the input file)")->check(CLI::IsMember({"real", "s1"}));
  c_dn->add_option("--nu", dn.nu, "Degrees of freedom")->capture_default_str();
  c_dn->add_option("--sigma", dn.sigma, "Noise scale (real images)");
  c_dn->add_option("--gamma", dn.gamma, "Wrapped Cauchy scale (s1 images)");
  c_dn->add_option("--patch", dn.patch, "Patch side (odd)")->capture_default_str();
  c_dn->add_option("--window", dn.window, "Search window side (odd; default 21, or 13 for patch <= 3)");
  c_dn->add_option("--k", dn.k, "Number of similar patches")->capture_default_str();
  c_dn->add_option("--mode", dn.mode, "pixelwise, patchwise or adaptive")
      ->check(CLI::IsMember({"pixelwise", "patchwise", "adaptive"}))
      ->capture_default_str();
  c_dn->add_option("--var-threshold", dn.var_threshold, "Adaptive mode homogeneity cut on the centre-value variance");
  c_dn->add_flag("--seedless", "Accepted for symmetry; denoising never draws random numbers");
  c_dn->add_option("--threads", dn.threads, "Worker threads (default $MYRIADKIT_THREADS or 1; 0 = all cores)");
  c_dn->add_option("--tol", dn.tol, "Estimator tolerance")->capture_default_str();
  c_dn->add_option("--max-iter", dn.max_iter, "Estimator iteration cap")->capture_default_str();

  MetricsArgs mt;
  auto* c_mt = app.add_subcommand("metrics", "PSNR/SSIM for real images, mean squared arc error for s1 images");
  c_mt->add_option("--ref", mt.ref, "Reference image")->required()->check(CLI::ExistingFile);
  c_mt->add_option("--test", mt.test, "Test image")->required()->check(CLI::ExistingFile);
  c_mt->add_option("--kind", mt.kind, "real or s1 (default: from the reference file)")->check(CLI::IsMember({"real", "s1"}));

  BenchArgs bn;
  auto* c_bn = app.add_subcommand("bench", "GMMF versus EM iteration counts on simulated Student-t data");
  c_bn->add_option("--config", bn.config, "JSON config: d, n, trials, nus, sigmas [{label, matrix}], mu, tol, max_iter, seed")
      ->check(CLI::ExistingFile);
  c_bn->add_option("--output", bn.output, "CSV path (default: stdout)");
  c_bn->add_option("--nus", bn.nus, "Comma-separated degrees of freedom");
  c_bn->add_option("--trials", bn.trials, "Trials per cell");
  c_bn->add_option("--n", bn.n, "Samples per trial");
  c_bn->add_option("--d", bn.d, "Dimension");
  c_bn->add_option("--tol", bn.tol, "Estimator tolerance");
  c_bn->add_option("--seed", bn.seed, "Master seed");
  c_bn->add_option("--threads", bn.threads, "Worker threads (default $MYRIADKIT_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_est) return run_estimate(est);
    if (*c_ty) return run_tyler(ty);
    if (*c_wc) return run_wc(wc);
    if (*c_nz) return run_add_noise(nz);
    if (*c_dn) return run_denoise(dn);
    if (*c_mt) return run_metrics(mt);
    if (*c_bn) return run_bench(bn);
  } catch (const Error& e) {
    std::cerr << "myriadkit: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "myriadkit: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
