#pragma once

#include "grid.hpp"
#include "irls.hpp"

namespace lpfd {

// Rational filter b(0..M) / a(0..N), a(0) fixed at 1.
struct IirFilter {
  RVec a;  // length N+1, a[0] == 1
  RVec b;  // length M+1

  int denominator_order() const { return static_cast<int>(a.size()) - 1; }
  int numerator_order() const { return static_cast<int>(b.size()) - 1; }
};

// Stacked coefficient vector [b; a_1..a_N] used by the frequency-domain
// solvers, matching the column layout of the design matrices below.
RVec stack_coefficients(const IirFilter& f);
IirFilter unstack_coefficients(const RVec& h, int den_order, int num_order);

// H(omega_k) = B(omega_k) / A(omega_k); errors out when a denominator
// sample is numerically zero.
CVec iir_freq_response(const IirFilter& f, const std::vector<double>& omegas);
CVec iir_freq_response(const IirFilter& f, const FrequencyGrid& grid);

// A(omega) and B(omega) evaluated separately.
CVec denominator_response(const IirFilter& f,
                          const std::vector<double>& omegas);

// Equation-error design matrix F = [F1 | F2]: F1(k, n) = e^{-j w_k n} for
// the numerator taps, F2(k, n) = -D_k e^{-j w_k n} for the denominator
// taps, so F h - D is the equation error B - D A.
CMat eq_error_matrix(const std::vector<double>& omegas, const CVec& D,
                     int den_order, int num_order);

// Same structure with the current response H in place of D; 1/A times this
// matrix is the Jacobian of the solution error.
CMat jacobian_basis_matrix(const std::vector<double>& omegas, const CVec& H,
                           int den_order, int num_order);

// Equation-error fit from L >= N+M+1 equally spaced samples of a
// conjugate-symmetric spectrum over [0, 2 pi). Works through the inverse
// DFT and the circular-convolution normal equations; with L == N+M+1 it
// interpolates the samples exactly.
IirFilter prony_freq_design(const CVec& dft_samples, int den_order,
                            int num_order);

struct IirSolveResult {
  IirFilter filter;
  int iterations = 0;
  double solution_error = 0.0;  // weighted l2 solution error at the result
  unsigned flags = 0;           // kFlagDivergenceGuard when best-so-far
};

// Jackson's decoupled prefiltering iteration: alternating 1/A-weighted
// least-squares solves for b then a. `iters` counts refinements past the
// initial A = 1 seed, so iters == 0 returns the plain equation-error fit.
IirSolveResult jackson_design(const CVec& D, const FrequencyGrid& grid,
                              int den_order, int num_order, int iters);

// Steiglitz-McBride iterations in the frequency domain, with external
// weights folded into V = W_ext / A. Mode 1 re-solves the equation error
// under V; Mode 2 replaces the left-hand basis with the Jacobian basis so
// a fixed point satisfies the true-gradient stationarity condition.
// `iters` is the number of solves (>= 1); both start from A = 1.
IirSolveResult soewito_mode1(const CVec& D, const FrequencyGrid& grid,
                             int den_order, int num_order, const RVec& w_ext,
                             int iters);
IirSolveResult soewito_mode2(const CVec& D, const FrequencyGrid& grid,
                             int den_order, int num_order, const RVec& w_ext,
                             int iters);

struct QuasilinearizeOptions {
  int max_iters = 30;
  bool stabilize = true;       // reflect unstable poles every iteration
  double coeff_tol = 1e-14;    // early exit on stagnation
};

// Soewito's quasilinearization: Newton-like solution-error minimization via
// successive weighted solves of G h = D + H_i - F h_i. This is the inner
// engine for every lp IIR loop. Needs a starting point (typically the
// Prony fit). Three consecutive error doublings trigger the divergence
// guard, which returns the best iterate seen.
IirSolveResult quasilinearize(const CVec& D, const FrequencyGrid& grid,
                              int den_order, int num_order, const RVec& w_ext,
                              const IirFilter& init,
                              const QuasilinearizeOptions& options = {});

// Reflect any pole outside the unit circle to its conjugate reciprocal and
// rescale b so |H(omega)| is unchanged. Stable inputs pass through
// untouched, so the operation is idempotent.
IirFilter enforce_stability(const IirFilter& f);

// Poles of the filter (roots of A).
std::vector<Complex> denominator_roots(const IirFilter& f);

}  // namespace lpfd
