#pragma once

#include "fir_kernels.hpp"
#include "irls.hpp"

namespace lpfd {

struct FirFilter {
  RVec h;
  bool linear_phase = false;
  LinearPhaseKind lp_kind = LinearPhaseKind::I;
};

struct FirDesignResult {
  FirFilter filter;
  ConvergenceTrace trace;
  std::vector<int> design_rows;  // grid rows that entered the solve
};

// Linear-phase lp design: IRLS on the trigonometric amplitude kernel over
// the non-dont-care rows, then symmetry expansion to the impulse response.
// The desired samples are treated as the (real) amplitude target.
FirDesignResult design_linear_phase_lp(const FrequencyGrid& grid,
                                       const DesiredResponse& desired,
                                       int length, LinearPhaseKind kind,
                                       const IrlsStrategy& strategy,
                                       const IrlsConfig& config);

// Complex lp design on the e^{-j omega n} kernel. The problem is mirrored
// onto (pi, 2 pi) with conjugated data so the solution comes out real;
// leftover imaginary parts are projected away (flagged when large).
FirDesignResult design_complex_lp(const FrequencyGrid& grid,
                                  const DesiredResponse& desired, int length,
                                  const IrlsStrategy& strategy,
                                  const IrlsConfig& config);

// lp design with a per-grid-sample exponent p(omega) >= 2; the reported
// objective is the metric sum |r_k|^(p_k).
FirDesignResult design_freq_varying(const FrequencyGrid& grid,
                                    const DesiredResponse& desired,
                                    int length, LinearPhaseKind kind,
                                    const RVec& p_per_sample,
                                    const IrlsConfig& config,
                                    double sigma = 1.5);

// --- constrained least squares ----------------------------------------------

struct ClsSpec {
  enum class Mode { FixedBand, InducedBand };
  enum class Weighting { Polynomial, Envelope };

  double tau = 0.1;  // constraint tolerance, linear magnitude-error units
  Mode mode = Mode::FixedBand;
  Weighting weighting = Weighting::Polynomial;
  double p = 50.0;  // exponent inside constraint weights, > 2
};

// Amplitude-form constraint weights w = 1 + |e / tau|^((p-2)/2): about 1
// where the constraint holds, growing fast where it is violated.
RVec cls_poly_weights(const RVec& error, double tau, double p);

// Flat amplitude-form weight per violating interval. Each maximal run of
// |e| > tau is extended to the surrounding zero crossings (or band edges)
// and weighted by |e+ / tau|^((p-2)/2), e+ the largest error inside.
// Everything else gets weight 1.
RVec cls_envelope_weights(const RVec& error,
                          const std::vector<BandLabel>& labels, double tau,
                          double p);

// Where constraint weighting may act when only a transition frequency is
// given: per band, the ripple adjacent to the transition edge (up to the
// first interior zero crossing) is excluded so the algorithm does not try
// to build a brick-wall transition. Bands whose error has no interior zero
// crossing stay fully eligible; bands with negligible error contribute
// nothing.
std::vector<bool> detect_induced_band(const RVec& error,
                                      const std::vector<BandLabel>& labels,
                                      double tau);

struct ClsReport {
  bool feasible = false;
  double max_constrained_error = 0.0;
  double realized_pass_edge = 0.0;  // edges of the realized transition band
  double realized_stop_edge = 0.0;
  int iterations = 0;
};

struct ClsResult {
  FirFilter filter;
  ConvergenceTrace trace;
  std::vector<int> design_rows;
  ClsReport report;
};

// Least-squares design subject to |D - H| <= tau on the constrained rows.
// Iterates weighted solves where only constraint-violating regions are
// weighted. An infeasible fixed-band spec does not break: the iteration
// settles toward the quasiequiripple limit and reports infeasibility.
ClsResult design_cls(const FrequencyGrid& grid,
                     const DesiredResponse& desired, int length,
                     LinearPhaseKind kind, const ClsSpec& spec,
                     const IrlsConfig& config);

// --- magnitude design --------------------------------------------------------

// Magnitude-squared design: fit R(omega) to D(omega)^2 on the
// autocorrelation kernel, lift R to be nonnegative if needed, then recover
// the minimum-phase h by spectral factorization.
FirDesignResult design_magnitude_fir(const FrequencyGrid& grid,
                                     const DesiredResponse& desired,
                                     int length,
                                     const IrlsStrategy& strategy,
                                     const IrlsConfig& config);

// Minimum-phase spectral factor of an autocorrelation vector: returns h
// with |H(omega)|^2 = R(omega) and all zeros inside (or on) the unit
// circle. Requires R >= 0 (tolerance -1e-8) on a fine verification grid.
RVec spectral_factorize(const RVec& r);

}  // namespace lpfd
