#pragma once

#include "grid.hpp"

namespace lpfd {

// The four linear-phase FIR classes. Odd lengths are I (even symmetry) and
// III (odd symmetry); even lengths are II and IV. Frequency response
// factors as H(omega) = A(omega) e^{j(K1 + K2 omega)} with real amplitude
// A, K1 in {0, pi/2} and K2 = -(N-1)/2.
enum class LinearPhaseKind { I = 1, II = 2, III = 3, IV = 4 };

struct LinearPhaseKernel {
  LinearPhaseKind kind;
  int length;            // N, filter tap count
  RMat matrix;           // L x n, row k evaluates A(omega_k)
  double phase_offset;   // K1
  double phase_slope;    // K2 = -(N-1)/2

  int coeff_count() const { return static_cast<int>(matrix.cols()); }
};

// Amplitude coefficients are ordered center-first: a_m multiplies the
// impulse-response pair at distance m (or m - 1/2 for even N) from the
// midpoint, so the omega = 0 row of a type-I kernel is [1, 2, 2, ...].
LinearPhaseKernel linear_phase_kernel(const FrequencyGrid& grid, int length,
                                      LinearPhaseKind kind);

// Expand amplitude coefficients into the length-N impulse response with the
// symmetry of the given kind (even: h(k) = h(N-1-k); odd: h(k) = -h(N-1-k),
// center tap zero for type III).
RVec amplitude_to_impulse(const RVec& a, LinearPhaseKind kind, int length);

// Inverse of amplitude_to_impulse for an exactly symmetric h.
RVec impulse_to_amplitude(const RVec& h, LinearPhaseKind kind);

// Complex Fourier kernel, entry (k, n) = e^{-j omega_k n}.
CMat complex_kernel(const FrequencyGrid& grid, int length);
CMat complex_kernel(const std::vector<double>& omegas, int length);

// r(n) = sum_k h(k) h(n + k) for lags 0 .. N-1 (the full sequence is even).
RVec autocorrelation(const RVec& h);

// Power-spectral-density kernel: row [1, 2cos w, ..., 2cos((N-1)w)], so that
// psd_kernel(grid, N) * autocorrelation(h) = |H(omega)|^2 on the grid.
RMat psd_kernel(const FrequencyGrid& grid, int length);

}  // namespace lpfd
