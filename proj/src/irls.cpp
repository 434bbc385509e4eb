#include "irls.hpp"

#include <algorithm>
#include <cmath>

namespace lpfd {

namespace {

constexpr double kSigmaMin = 1.0 + 1e-6;
constexpr double kSigmaMax = 2.0;
constexpr double kAcceptSlack = 1e-12;  // relative error-increase tolerance
constexpr int kMaxSigmaRetries = 32;

double clamp_sigma(double sigma) {
  return std::clamp(sigma, kSigmaMin, kSigmaMax);
}

bool has_schedule(IrlsStrategy::Kind k) {
  return k == IrlsStrategy::Kind::Bbs ||
         k == IrlsStrategy::Kind::AdaptiveBbs ||
         k == IrlsStrategy::Kind::FreqVarying;
}

void validate(const IrlsStrategy& s, const IrlsConfig& c,
              Eigen::Index residual_count) {
  using Kind = IrlsStrategy::Kind;
  if (c.p_des < 2.0) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: target exponent must be >= 2");
  }
  if (c.max_outer_iters < 1 || c.coeff_tol <= 0 || c.error_tol <= 0 ||
      c.weight_floor <= 0) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: invalid iteration/tolerance configuration");
  }
  if (has_schedule(s.kind) && !(s.sigma > 1.0 && s.sigma <= 2.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: sigma must lie in (1, 2]");
  }
  if (s.kind == Kind::AdaptiveBbs && !(s.delta > 0.0 && s.delta < 1.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: delta must lie in (0, 1)");
  }
  if (s.kind == Kind::Rul && !(s.gamma > 0.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: gamma must be positive");
  }
  if (s.kind == Kind::Karlovitz && !(s.lambda > 0.0 && s.lambda <= 1.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "irls: lambda must lie in (0, 1]");
  }
  if (s.kind == Kind::FreqVarying) {
    if (s.p_per_sample.size() != residual_count) {
      throw DesignError(ErrorCode::DimensionMismatch,
                        "irls: per-sample exponent count must match the "
                        "residual length");
    }
    for (Eigen::Index k = 0; k < s.p_per_sample.size(); ++k) {
      if (s.p_per_sample[k] < 2.0) {
        throw DesignError(ErrorCode::InvalidArgument,
                          "irls: per-sample exponents must be >= 2");
      }
    }
  }
}

}  // namespace

double p_schedule_next(double p_prev, double p_des, double sigma) {
  return std::min(p_des, sigma * p_prev);
}

double kahng_lambda(double p) {
  if (!(p > 1.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "kahng_lambda: need p > 1");
  }
  return 1.0 / (p - 1.0);
}

CVec partial_update(const CVec& candidate, const CVec& previous,
                    double lambda) {
  if (candidate.size() != previous.size()) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "partial_update: length mismatch");
  }
  return lambda * candidate + (1.0 - lambda) * previous;
}

namespace {

RVec basic_weights_impl(const CVec& residual, const double* p_scalar,
                        const RVec* p_vec, double floor_value, bool normalize,
                        unsigned* flags) {
  const Eigen::Index L = residual.size();
  RVec mag(L);
  double m = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) {
    mag[k] = std::abs(residual[k]);
    m = std::max(m, mag[k]);
  }
  RVec w(L);
  if (normalize && m <= 0.0) {
    w.setOnes();
    return w;
  }
  const double scale = normalize ? m : 1.0;
  bool clamped = false;
  for (Eigen::Index k = 0; k < L; ++k) {
    const double p = p_scalar ? *p_scalar : (*p_vec)[k];
    double v = std::pow(mag[k] / scale, p - 2.0);
    if (!(v >= floor_value)) {  // also catches NaN / underflow
      v = floor_value;
      clamped = true;
    }
    w[k] = v;
  }
  if (clamped && flags) *flags |= kFlagZeroWeightClamp;
  return w;
}

}  // namespace

RVec weight_update_basic(const CVec& residual, double p, double weight_floor,
                         bool normalize, unsigned* flags) {
  if (p < 2.0) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "weight_update_basic: need p >= 2");
  }
  return basic_weights_impl(residual, &p, nullptr, weight_floor, normalize,
                            flags);
}

RVec weight_update_basic(const CVec& residual, const RVec& p_per_sample,
                         double weight_floor, bool normalize,
                         unsigned* flags) {
  if (p_per_sample.size() != residual.size()) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "weight_update_basic: exponent/residual length "
                      "mismatch");
  }
  return basic_weights_impl(residual, nullptr, &p_per_sample, weight_floor,
                            normalize, flags);
}

RVec weight_update_rul(const RVec& w_prev, const CVec& residual, double p,
                       double gamma, double weight_floor, bool normalize,
                       unsigned* flags) {
  if (!(gamma > 0.0) || !(p > 2.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "weight_update_rul: need gamma > 0 and p > 2");
  }
  if (w_prev.size() != residual.size()) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "weight_update_rul: weight/residual length mismatch");
  }
  const double alpha = gamma * (p - 2.0) / (gamma * (p - 2.0) + 1.0);
  const double beta = alpha / (2.0 * gamma);
  const Eigen::Index L = residual.size();
  RVec w(L);
  bool clamped = false;
  double m = 0.0;
  for (Eigen::Index k = 0; k < L; ++k) {
    if (!(w_prev[k] > 0.0)) {
      throw DesignError(ErrorCode::InvalidArgument,
                        "weight_update_rul: previous weights must be "
                        "positive");
    }
    w[k] = std::pow(w_prev[k], alpha) * std::pow(std::abs(residual[k]), beta);
    m = std::max(m, w[k]);
  }
  for (Eigen::Index k = 0; k < L; ++k) {
    if (normalize && m > 0.0) w[k] /= m;
    if (!(w[k] >= weight_floor)) {
      w[k] = weight_floor;
      clamped = true;
    }
  }
  if (clamped && flags) *flags |= kFlagZeroWeightClamp;
  return w;
}

double adaptive_sigma_step(double sigma, double delta, double try_error_low,
                           double try_error_high) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "adaptive_sigma_step: delta must lie in (0, 1)");
  }
  const double low = clamp_sigma(sigma * (1.0 - delta));
  const double high = clamp_sigma(sigma * (1.0 + delta));
  return try_error_low <= try_error_high ? low : high;
}

double lp_error(const CVec& residual, double p) {
  if (!(p >= 1.0)) {
    throw DesignError(ErrorCode::InvalidArgument, "lp_error: need p >= 1");
  }
  double m = 0.0;
  for (Eigen::Index k = 0; k < residual.size(); ++k)
    m = std::max(m, std::abs(residual[k]));
  if (m == 0.0) return 0.0;
  if (!std::isfinite(p) || p >= kMaxNormPThreshold) return m;
  double s = 0.0;
  for (Eigen::Index k = 0; k < residual.size(); ++k)
    s += std::pow(std::abs(residual[k]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

double metric_error(const CVec& residual, const RVec& p_per_sample) {
  if (p_per_sample.size() != residual.size()) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "metric_error: exponent/residual length mismatch");
  }
  double s = 0.0;
  for (Eigen::Index k = 0; k < residual.size(); ++k)
    s += std::pow(std::abs(residual[k]), p_per_sample[k]);
  return s;
}

namespace {

struct Attempt {
  CVec h;
  CVec residual;
  RVec solver_weights;
  RVec rul_state;     // amplitude-form weights (Rul only)
  double p = 2.0;     // exponent used (max over samples for FreqVarying)
  RVec p_vec;         // FreqVarying exponents actually used
  double lambda = 1.0;
  double err = 0.0;      // candidate error at this attempt's p
  double err_ref = 0.0;  // accepted iterate's error at the same p
  unsigned flags = 0;
};

}  // namespace

IrlsResult run_lp_outer_loop(const CVec& h0, const IrlsStrategy& strategy,
                             const IrlsConfig& config,
                             const OuterLoopHooks& hooks) {
  using Kind = IrlsStrategy::Kind;

  IrlsConfig cfg = config;
  if (!std::isfinite(cfg.p_des)) cfg.p_des = kInfinityProxyP;

  CVec h_acc = h0;
  CVec r_acc = hooks.residual_of(h_acc);
  const Eigen::Index L = r_acc.size();
  validate(strategy, cfg, L);

  const bool freq_varying = strategy.kind == Kind::FreqVarying;
  const bool scheduled = has_schedule(strategy.kind);
  const RVec& p_target = strategy.p_per_sample;
  const double p_des =
      freq_varying ? p_target.maxCoeff() : cfg.p_des;

  IrlsResult out;
  out.trace.final_weights = RVec::Ones(L);

  auto error_of = [&](const CVec& r, double p, const RVec& p_vec) {
    return freq_varying ? metric_error(r, p_vec) : lp_error(r, p);
  };

  // Record the unweighted least-squares start.
  {
    TraceRecord rec;
    rec.iteration = 0;
    rec.p = 2.0;
    rec.sigma = scheduled ? strategy.sigma : 0.0;
    rec.lambda = 1.0;
    rec.lp_error = error_of(r_acc, 2.0, RVec::Constant(L, 2.0));
    rec.l2_error = lp_error(r_acc, 2.0);
    rec.max_error = lp_error(r_acc, std::numeric_limits<double>::infinity());
    out.trace.records.push_back(rec);
  }

  if (p_des <= 2.0) {
    out.coefficients = h_acc;
    out.trace.status = ConvergenceTrace::Status::Converged;
    return out;
  }

  double sigma = strategy.sigma;
  // Exponent state: the accepted exponent from which the schedule advances.
  double p_base = scheduled ? 2.0 : cfg.p_des;
  RVec p_vec_base = freq_varying ? RVec::Constant(L, 2.0) : RVec();
  RVec rul_state = RVec::Ones(L);

  auto make_attempt = [&](double sigma_try) {
    Attempt a;
    a.flags = 0;
    if (freq_varying) {
      a.p_vec.resize(L);
      for (Eigen::Index k = 0; k < L; ++k)
        a.p_vec[k] = p_schedule_next(p_vec_base[k], p_target[k], sigma_try);
      a.p = a.p_vec.maxCoeff();
    } else if (scheduled) {
      a.p = p_schedule_next(p_base, cfg.p_des, sigma_try);
    } else {
      a.p = cfg.p_des;
    }

    switch (strategy.kind) {
      case Kind::Rul:
        a.rul_state = weight_update_rul(rul_state, r_acc, a.p, strategy.gamma,
                                        cfg.weight_floor,
                                        cfg.normalize_weights, &a.flags);
        a.solver_weights = a.rul_state.cwiseProduct(a.rul_state);
        a.lambda = 1.0;
        break;
      case Kind::Basic:
        a.solver_weights =
            weight_update_basic(r_acc, a.p, cfg.weight_floor,
                                cfg.normalize_weights, &a.flags);
        a.lambda = 1.0;
        break;
      case Kind::Karlovitz:
        a.solver_weights =
            weight_update_basic(r_acc, a.p, cfg.weight_floor,
                                cfg.normalize_weights, &a.flags);
        a.lambda = strategy.lambda;
        break;
      case Kind::Kahng:
      case Kind::Bbs:
      case Kind::AdaptiveBbs:
        a.solver_weights =
            weight_update_basic(r_acc, a.p, cfg.weight_floor,
                                cfg.normalize_weights, &a.flags);
        a.lambda = kahng_lambda(a.p);
        break;
      case Kind::FreqVarying:
        a.solver_weights =
            weight_update_basic(r_acc, a.p_vec, cfg.weight_floor,
                                cfg.normalize_weights, &a.flags);
        a.lambda = kahng_lambda(a.p);
        break;
    }

    const CVec full = hooks.weighted_solve(a.solver_weights, h_acc);
    a.h = partial_update(full, h_acc, a.lambda);
    a.residual = hooks.residual_of(a.h);
    a.err = error_of(a.residual, a.p, a.p_vec);
    a.err_ref = error_of(r_acc, a.p, a.p_vec);
    return a;
  };

  auto at_target = [&](const Attempt& a) {
    if (freq_varying) {
      for (Eigen::Index k = 0; k < L; ++k)
        if (a.p_vec[k] < p_target[k]) return false;
      return true;
    }
    return a.p >= cfg.p_des;
  };

  while (static_cast<int>(out.trace.records.size()) < cfg.max_outer_iters) {
    Attempt acc;
    bool adapted = false;
    if (strategy.kind != Kind::AdaptiveBbs) {
      acc = make_attempt(sigma);
    } else {
      acc = make_attempt(sigma);
      if (acc.err > acc.err_ref * (1.0 + kAcceptSlack)) {
        // The step made things worse; walk sigma until a step helps.
        adapted = true;
        int retries = 0;
        for (;;) {
          const Attempt low = make_attempt(clamp_sigma(sigma * (1 - strategy.delta)));
          const Attempt high = make_attempt(clamp_sigma(sigma * (1 + strategy.delta)));
          sigma = adaptive_sigma_step(sigma, strategy.delta, low.err, high.err);
          acc = (low.err <= high.err) ? low : high;
          if (acc.err <= acc.err_ref * (1.0 + kAcceptSlack)) break;
          if (++retries >= kMaxSigmaRetries) {
            out.coefficients = h_acc;
            out.trace.status =
                ConvergenceTrace::Status::ErrorIncreaseUnrecoverable;
            out.trace.message =
                "lp error kept increasing after " +
                std::to_string(kMaxSigmaRetries) + " sigma updates";
            return out;
          }
        }
      }
    }

    const double h_norm = std::max(h_acc.norm(), 1e-300);
    const double coeff_change = (acc.h - h_acc).norm() / h_norm;
    const double err_change =
        std::abs(acc.err - acc.err_ref) / std::max(acc.err_ref, 1e-300);

    h_acc = acc.h;
    r_acc = acc.residual;
    if (strategy.kind == Kind::Rul) rul_state = acc.rul_state;
    if (freq_varying) p_vec_base = acc.p_vec;
    p_base = acc.p;
    out.trace.final_weights = acc.solver_weights;

    TraceRecord rec;
    rec.iteration = static_cast<int>(out.trace.records.size());
    rec.p = acc.p;
    rec.sigma = scheduled ? sigma : 0.0;
    rec.lambda = acc.lambda;
    rec.lp_error = acc.err;
    rec.l2_error = lp_error(r_acc, 2.0);
    rec.max_error = lp_error(r_acc, std::numeric_limits<double>::infinity());
    rec.adapted = adapted;
    rec.flags = acc.flags;
    out.trace.records.push_back(rec);

    if (hooks.on_accept) {
      hooks.on_accept(h_acc);
      r_acc = hooks.residual_of(h_acc);
    }

    if (at_target(acc) &&
        (coeff_change < cfg.coeff_tol || err_change < cfg.error_tol)) {
      out.coefficients = h_acc;
      out.trace.status = ConvergenceTrace::Status::Converged;
      return out;
    }
  }

  out.coefficients = h_acc;
  out.trace.status = ConvergenceTrace::Status::MaxIters;
  return out;
}

IrlsResult run_irls(const DesignMatrixProblem& problem,
                    const IrlsStrategy& strategy, const IrlsConfig& config) {
  const CVec h0 =
      solve_wls(problem.C, problem.D, RVec::Ones(problem.C.rows()))
          .coefficients;
  OuterLoopHooks hooks;
  hooks.weighted_solve = [&problem](const RVec& w, const CVec&) {
    return solve_wls(problem.C, problem.D, w).coefficients;
  };
  hooks.residual_of = [&problem](const CVec& h) -> CVec {
    return problem.C * h - problem.D;
  };
  return run_lp_outer_loop(h0, strategy, config, hooks);
}

}  // namespace lpfd
