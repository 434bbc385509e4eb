#pragma once

#include <functional>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace lpfd {

// Weight-update rule used by the iterative reweighted least-squares loop.
//
// Basic        w_i = |r_i|^(p-2), full coefficient update. Kept for
//              comparison; known to stall or diverge on hard specs.
// Rul          multiplicative Lawson-style update
//              w_i = w_{i-1}^alpha |r_i|^(alpha/2gamma),
//              alpha = gamma (p-2) / (gamma (p-2) + 1). Amplitude-form
//              weights; squared before entering the solver.
// Karlovitz    basic weights, partial coefficient update with constant
//              lambda.
// Kahng        Karlovitz with the Newton step lambda = 1/(p-1).
// Bbs          Kahng plus the exponent schedule p_i = min(p_des, sigma
//              p_{i-1}) starting from p_0 = min(p_des, 2 sigma).
// AdaptiveBbs  Bbs, but a step whose error grows is discarded and sigma is
//              re-tried at sigma (1 -+ delta) until the error decreases.
// FreqVarying  per-sample exponents p(omega); the objective becomes the
//              metric sum_k |r_k|^(p_k).
struct IrlsStrategy {
  enum class Kind { Basic, Rul, Karlovitz, Kahng, Bbs, AdaptiveBbs,
                    FreqVarying };

  Kind kind = Kind::AdaptiveBbs;
  double gamma = 1.0;    // Rul convergence parameter, > 0
  double lambda = 0.5;   // Karlovitz constant partial step, (0, 1]
  double sigma = 1.5;    // exponent schedule factor, (1, 2]
  double delta = 0.1;    // AdaptiveBbs sigma update factor, (0, 1)
  RVec p_per_sample;     // FreqVarying exponents, each >= 2

  static IrlsStrategy basic() { return {Kind::Basic, 1, 0.5, 1.5, 0.1, {}}; }
  static IrlsStrategy rul(double gamma) {
    return {Kind::Rul, gamma, 0.5, 1.5, 0.1, {}};
  }
  static IrlsStrategy karlovitz(double lambda) {
    return {Kind::Karlovitz, 1, lambda, 1.5, 0.1, {}};
  }
  static IrlsStrategy kahng() { return {Kind::Kahng, 1, 0.5, 1.5, 0.1, {}}; }
  static IrlsStrategy bbs(double sigma) {
    return {Kind::Bbs, 1, 0.5, sigma, 0.1, {}};
  }
  static IrlsStrategy adaptive_bbs(double sigma = 1.5, double delta = 0.1) {
    return {Kind::AdaptiveBbs, 1, 0.5, sigma, delta, {}};
  }
  static IrlsStrategy freq_varying(RVec p, double sigma = 1.5) {
    IrlsStrategy s{Kind::FreqVarying, 1, 0.5, sigma, 0.1, std::move(p)};
    return s;
  }
};

// "inf" targets map to this exponent; past ~100 the max-error improvement
// per unit of p is negligible.
inline constexpr double kInfinityProxyP = 128.0;
// lp_error treats any exponent at or above this as the max norm.
inline constexpr double kMaxNormPThreshold = 1e6;

struct IrlsConfig {
  double p_des = kInfinityProxyP;  // target exponent, >= 2
  int max_outer_iters = 200;
  double coeff_tol = 1e-8;    // relative coefficient-change stop
  double error_tol = 1e-10;   // relative error-change stop at p_des
  double weight_floor = 1e-14;
  bool normalize_weights = true;  // solution-invariant; off only for tests
};

enum TraceFlag : unsigned {
  kFlagZeroWeightClamp = 1u << 0,  // a residual hit the weight floor
  kFlagImagDiscard = 1u << 1,      // non-negligible imaginary parts dropped
  kFlagDivergenceGuard = 1u << 2,  // iteration returned best-so-far
  kFlagStageNoImprove = 1u << 3,   // a stage ended without improving
  kFlagConstraintInfeasible = 1u << 4,
};

struct TraceRecord {
  int iteration = 0;
  double p = 2.0;
  double sigma = 0.0;   // 0 when the strategy has no schedule
  double lambda = 1.0;
  double lp_error = 0.0;  // at this iteration's p (metric for FreqVarying)
  double l2_error = 0.0;
  double max_error = 0.0;
  bool adapted = false;  // sigma changed while producing this iterate
  unsigned flags = 0;
};

struct ConvergenceTrace {
  enum class Status { Converged, MaxIters, ErrorIncreaseUnrecoverable };

  std::vector<TraceRecord> records;
  Status status = Status::Converged;
  RVec final_weights;  // solver-convention weights of the last iteration
  std::string message;

  unsigned combined_flags() const {
    unsigned f = 0;
    for (const auto& r : records) f |= r.flags;
    return f;
  }
};

struct DesignMatrixProblem {
  CMat C;
  CVec D;
};

struct IrlsResult {
  CVec coefficients;
  ConvergenceTrace trace;
};

// --- elementary pieces of the iteration ------------------------------------

// Exponent schedule p_next = min(p_des, sigma * p_prev).
double p_schedule_next(double p_prev, double p_des, double sigma);

// Newton partial step lambda = 1/(p-1).
double kahng_lambda(double p);

// Convex blend lambda * candidate + (1 - lambda) * previous.
CVec partial_update(const CVec& candidate, const CVec& previous,
                    double lambda);

// w_k = |r_k|^(p-2) clamped below by weight_floor, normalized so max w = 1
// (the normalization never changes the weighted LS minimizer). These are
// solver-convention weights: they multiply squared residuals directly.
// flags receives kFlagZeroWeightClamp when the floor engages.
RVec weight_update_basic(const CVec& residual, double p, double weight_floor,
                         bool normalize = true, unsigned* flags = nullptr);
RVec weight_update_basic(const CVec& residual, const RVec& p_per_sample,
                         double weight_floor, bool normalize = true,
                         unsigned* flags = nullptr);

// Multiplicative update w_i = w_prev^alpha |r|^(alpha/2gamma). These are
// amplitude-form weights; square them for the solver.
RVec weight_update_rul(const RVec& w_prev, const CVec& residual, double p,
                       double gamma, double weight_floor,
                       bool normalize = true, unsigned* flags = nullptr);

// Pick the sigma candidate with the smaller trial error; ties go low.
// sigma * (1 + delta) is clamped to 2, and no candidate drops to 1 or
// below.
double adaptive_sigma_step(double sigma, double delta, double try_error_low,
                           double try_error_high);

// (sum |r_k|^p)^(1/p), overflow-guarded; the max norm for huge p.
double lp_error(const CVec& residual, double p);

// sum_k |r_k|^(p_k) - the frequency-varying objective (a metric, not a
// norm: no root).
double metric_error(const CVec& residual, const RVec& p_per_sample);

// --- the loop ---------------------------------------------------------------

// Full IRLS run over a linear design problem: start from the unweighted
// least-squares solution and iterate weights / solve / partial update /
// exponent schedule until the coefficients or the error settle at p_des.
IrlsResult run_irls(const DesignMatrixProblem& problem,
                    const IrlsStrategy& strategy, const IrlsConfig& config);

// Same outer loop with a pluggable weighted solver, so rational (IIR)
// designs can swap the linear solve for a nonlinear least-squares step.
// weighted_solve(w, h_accepted) returns the candidate coefficient vector
// for solver-convention weights w; residual_of(h) returns model(h) - D
// over the rows the weights refer to; on_accept fires after each accepted
// iterate.
struct OuterLoopHooks {
  std::function<CVec(const RVec&, const CVec&)> weighted_solve;
  std::function<CVec(const CVec&)> residual_of;
  std::function<void(const CVec&)> on_accept;  // optional
};

IrlsResult run_lp_outer_loop(const CVec& h0, const IrlsStrategy& strategy,
                             const IrlsConfig& config,
                             const OuterLoopHooks& hooks);

}  // namespace lpfd
