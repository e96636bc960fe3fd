#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "myriad/error.hpp"
#include "myriad/estimators.hpp"

namespace myriad {

namespace {

enum class Variant { gmmf, em, tyler };

/// Quantities evaluated at one iterate: coef_i = w_i / (nu + delta_i).
struct Evaluation {
  std::vector<double> coef;
  double objective = 0.0;
  double normalizer = 0.0;
};

class FixedPointProblem {
 public:
  FixedPointProblem(const SampleSet& x, std::vector<double> w, double nu, Variant variant, bool update_mu)
      : x_(x), w_(std::move(w)), nu_(nu), variant_(variant), update_mu_(update_mu),
        diff_(x.dim()), scratch_(x.dim()) {}

  Evaluation evaluate(const IterateState& s) {
    const std::size_t n = x_.size();
    const std::size_t d = x_.dim();
    const CholeskyFactor f = cholesky(s.sigma);
    Evaluation ev;
    ev.coef.resize(n);
    CompensatedSum logs, norm;
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x_.row(i);
      for (std::size_t j = 0; j < d; ++j) diff_[j] = xi[j] - s.mu[j];
      const double delta = f.quadratic_form(diff_, scratch_);
      const double denom = nu_ + delta;
      logs.add(w_[i] * std::log(denom));
      ev.coef[i] = w_[i] / denom;
      norm.add(ev.coef[i]);
    }
    ev.objective = (static_cast<double>(d) + nu_) * logs.value() + f.logdet();
    ev.normalizer = norm.value();
    return ev;
  }

  IterateState update(const IterateState& s, const Evaluation& ev) {
    const std::size_t n = x_.size();
    const std::size_t d = x_.dim();
    IterateState next;
    next.mu = s.mu;
    if (update_mu_) {
      std::vector<CompensatedSum> acc(d);
      for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x_.row(i);
        for (std::size_t j = 0; j < d; ++j) acc[j].add(ev.coef[i] * xi[j]);
      }
      for (std::size_t j = 0; j < d; ++j) next.mu[j] = acc[j].value() / ev.normalizer;
    }
    // GMMF and Tyler centre on mu_r; EM on mu_{r+1}.
    const Vector& centre = variant_ == Variant::em ? next.mu : s.mu;
    const std::size_t m = d * (d + 1) / 2;
    sum_.assign(m, 0.0);
    comp_.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x_.row(i);
      for (std::size_t j = 0; j < d; ++j) diff_[j] = xi[j] - centre[j];
      std::size_t t = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const double cj = ev.coef[i] * diff_[j];
        for (std::size_t k = j; k < d; ++k, ++t) {
          // Branch-free two-sum; the rounding error goes to comp_.
          const double x = cj * diff_[k];
          const double a = sum_[t] + x;
          const double z = a - sum_[t];
          comp_[t] += (sum_[t] - (a - z)) + (x - z);
          sum_[t] = a;
        }
      }
    }
    const double factor = variant_ == Variant::em ? static_cast<double>(d) + nu_ : 1.0 / ev.normalizer;
    std::vector<double> e(d * d);
    std::size_t t = 0;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) {
        const double v = factor * (sum_[t] + comp_[t]);
        ++t;
        e[j * d + k] = v;
        e[k * d + j] = v;
      }
    if (variant_ == Variant::tyler) {
      double tr = 0.0;
      for (std::size_t j = 0; j < d; ++j) tr += e[j * d + j];
      for (double& v : e) v /= tr;
    }
    next.sigma = SpdMatrix(d, std::move(e));
    return next;
  }

 private:
  const SampleSet& x_;
  std::vector<double> w_;
  double nu_;
  Variant variant_;
  bool update_mu_;
  Vector diff_;
  Vector scratch_;
  std::vector<double> sum_;
  std::vector<double> comp_;
};

double relative_step(const IterateState& a, const IterateState& b, bool include_mu) {
  double num = 0.0;
  double den = 0.0;
  if (include_mu) {
    for (std::size_t j = 0; j < a.mu.size(); ++j) {
      num += (b.mu[j] - a.mu[j]) * (b.mu[j] - a.mu[j]);
      den += a.mu[j] * a.mu[j];
    }
  }
  const auto sa = a.sigma.entries();
  const auto sb = b.sigma.entries();
  for (std::size_t j = 0; j < sa.size(); ++j) {
    num += (sb[j] - sa[j]) * (sb[j] - sa[j]);
    den += sa[j] * sa[j];
  }
  num = std::sqrt(num);
  den = std::sqrt(den);
  return den < 1e-300 ? num : num / den;
}

std::string describe(const FeasibilityReport& r) {
  std::string msg;
  if (!r.independence_ok) {
    msg += "samples not in general position";
    if (r.violating_subset) {
      msg += " (indices";
      for (std::size_t i : *r.violating_subset) msg += " " + std::to_string(i);
      msg += ")";
    }
  }
  if (!r.weight_bound_ok) {
    if (!msg.empty()) msg += "; ";
    msg += "max weight " + std::to_string(r.worst_weight) + " must be below " +
           std::to_string(r.required_bound);
  }
  return msg;
}

/// Sample mean (or the fixed location) and the 1/n scatter around it.
IterateState initial_state(const SampleSet& x, const Vector* fixed_mu) {
  const std::size_t n = x.size();
  const std::size_t d = x.dim();
  IterateState s;
  if (fixed_mu != nullptr) {
    s.mu = *fixed_mu;
  } else {
    std::vector<CompensatedSum> acc(d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) acc[j].add(x.row(i)[j]);
    s.mu.resize(d);
    for (std::size_t j = 0; j < d; ++j) s.mu[j] = acc[j].value() / static_cast<double>(n);
  }
  std::vector<CompensatedSum> acc(d * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) acc[j * d + k].add((xi[j] - s.mu[j]) * (xi[k] - s.mu[k]));
  }
  std::vector<double> e(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k) {
      const double v = acc[j * d + k].value() / static_cast<double>(n);
      e[j * d + k] = v;
      e[k * d + j] = v;
    }
  s.sigma = SpdMatrix(d, std::move(e));
  return s;
}

/// Adds 1e-8 * tr/d * I when the initial scatter is singular.
bool regularize_if_singular(IterateState& s) {
  try {
    cholesky(s.sigma);
    return false;
  } catch (const Error&) {
  }
  const std::size_t d = s.sigma.dim();
  const double tr = s.sigma.trace();
  if (!(tr > 0.0)) {
    throw Error(Errc::DegenerateInit, "initial scatter is zero; all samples coincide");
  }
  const double eps = 1e-8 * tr / static_cast<double>(d);
  std::vector<double> e(s.sigma.entries().begin(), s.sigma.entries().end());
  for (std::size_t j = 0; j < d; ++j) e[j * d + j] += eps;
  s.sigma = SpdMatrix(d, std::move(e));
  try {
    cholesky(s.sigma);
  } catch (const Error& err) {
    throw Error(Errc::DegenerateInit, std::string("regularized initial scatter still singular: ") + err.what());
  }
  return true;
}

EstimateResult run(const SampleSet& samples, const WeightVector& w, double nu, const EstimatorOptions& opts,
                   Variant variant) {
  if (!(opts.tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (opts.max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be at least 1");
  if (w.size() != samples.size()) throw Error(Errc::DimensionMismatch, "weights and samples disagree");
  const std::size_t d = samples.dim();

  EstimationMode mode = variant == Variant::tyler ? EstimationMode::tyler : opts.mode;
  if (mode == EstimationMode::tyler && variant != Variant::tyler) {
    throw Error(Errc::InvalidArgument, "tyler mode is served by tyler_estimate");
  }
  if (mode == EstimationMode::joint && !(nu >= 1.0)) {
    throw Error(Errc::InvalidNu, "joint location/scatter estimation needs nu >= 1");
  }
  if (mode == EstimationMode::scatter_only && !(nu > 0.0)) {
    throw Error(Errc::InvalidNu, "scatter-only estimation needs nu > 0");
  }
  if (mode == EstimationMode::tyler && d < 2) {
    throw Error(Errc::InvalidArgument, "Tyler's estimator needs d >= 2");
  }

  // Tyler works on the unit sphere; scatter-only on the data as given with a
  // frozen location.
  SampleSet work = variant == Variant::tyler ? detail::normalize_rows(samples) : samples;
  Vector fixed_mu;
  if (mode != EstimationMode::joint) {
    fixed_mu = (mode == EstimationMode::scatter_only && opts.fixed_mu) ? *opts.fixed_mu : Vector(d, 0.0);
    if (fixed_mu.size() != d) throw Error(Errc::DimensionMismatch, "fixed mu has the wrong length");
  }

  EstimateResult res;
  if (opts.check_assumptions) {
    FeasibilityReport rep;
    if (mode == EstimationMode::scatter_only) {
      std::vector<double> centred(work.data().begin(), work.data().end());
      for (std::size_t i = 0; i < work.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) centred[i * d + j] -= fixed_mu[j];
      rep = check_assumptions(SampleSet(work.size(), d, std::move(centred)), w, nu, mode);
    } else {
      rep = check_assumptions(work, w, nu, mode);
    }
    if (!rep.ok()) throw Error(Errc::AssumptionViolation, describe(rep));
  } else {
    res.assumption_check_bypassed = true;
  }

  detail::CanonicalData canon = detail::canonicalize(work, w);
  const bool joint = mode == EstimationMode::joint;
  FixedPointProblem problem(canon.samples, std::move(canon.weights), nu, variant, joint);

  IterateState cur;
  if (variant == Variant::tyler) {
    cur.mu = fixed_mu;
    cur.sigma = SpdMatrix::identity(d, 1.0 / static_cast<double>(d));
  } else {
    cur = initial_state(canon.samples, joint ? nullptr : &fixed_mu);
    res.init_regularized = regularize_if_singular(cur);
  }

  Evaluation ev = problem.evaluate(cur);
  res.objective_trace.push_back(ev.objective);
  res.normalizer_trace.push_back(ev.normalizer);
  double step = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (;;) {
    if (it > 0 && step < opts.tol) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter || std::isnan(step)) break;
    IterateState next = problem.update(cur, ev);
    const double st = relative_step(cur, next, joint);
    Evaluation ev_next;
    try {
      ev_next = problem.evaluate(next);
    } catch (const Error& e) {
      if (e.code() == Errc::NotPositiveDefinite && opts.stop_on_singular) {
        res.singular_stop = true;
        break;
      }
      throw;
    }
    cur = std::move(next);
    ev = std::move(ev_next);
    step = st;
    ++it;
    res.objective_trace.push_back(ev.objective);
    res.normalizer_trace.push_back(ev.normalizer);
  }
  res.iterations = it;
  res.final_step = it == 0 ? 0.0 : step;
  res.params = StudentTParams{std::move(cur.mu), std::move(cur.sigma), nu};
  return res;
}

}  // namespace

IterateState gmmf_step(const IterateState& state, const SampleSet& samples, const WeightVector& w, double nu,
                       bool update_mu) {
  if (!(nu >= 0.0)) throw Error(Errc::InvalidNu, "nu must be non-negative");
  if (nu == 0.0 && update_mu) throw Error(Errc::InvalidNu, "nu = 0 only supports scatter updates");
  if (w.size() != samples.size()) throw Error(Errc::DimensionMismatch, "weights and samples disagree");
  if (state.mu.size() != samples.dim() || state.sigma.dim() != samples.dim()) {
    throw Error(Errc::DimensionMismatch, "state and samples disagree");
  }
  detail::CanonicalData canon = detail::canonicalize(samples, w);
  FixedPointProblem problem(canon.samples, std::move(canon.weights), nu, Variant::gmmf, update_mu);
  IterateState next = problem.update(state, problem.evaluate(state));
  cholesky(next.sigma);
  return next;
}

IterateState em_step(const IterateState& state, const SampleSet& samples, const WeightVector& w, double nu) {
  if (!(nu > 0.0)) throw Error(Errc::InvalidNu, "EM needs nu > 0");
  if (w.size() != samples.size()) throw Error(Errc::DimensionMismatch, "weights and samples disagree");
  detail::CanonicalData canon = detail::canonicalize(samples, w);
  FixedPointProblem problem(canon.samples, std::move(canon.weights), nu, Variant::em, true);
  IterateState next = problem.update(state, problem.evaluate(state));
  cholesky(next.sigma);
  return next;
}

EstimateResult gmmf_estimate(const SampleSet& samples, const WeightVector& w, double nu,
                             const EstimatorOptions& opts) {
  if (opts.mode == EstimationMode::tyler) return tyler_estimate(samples, w, opts);
  return run(samples, w, nu, opts, Variant::gmmf);
}

EstimateResult em_estimate(const SampleSet& samples, const WeightVector& w, double nu,
                           const EstimatorOptions& opts) {
  if (opts.mode == EstimationMode::tyler) return tyler_estimate(samples, w, opts);
  return run(samples, w, nu, opts, Variant::em);
}

EstimateResult tyler_estimate(const SampleSet& samples, const WeightVector& w, const EstimatorOptions& opts) {
  return run(samples, w, 0.0, opts, Variant::tyler);
}

}  // namespace myriad
