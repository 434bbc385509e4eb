#pragma once

#include <cstddef>
#include <vector>

#include "linalg.hpp"

namespace lpfd {

// Frequencies are radians/sample on [0, pi]. The CLI layer converts from
// normalized f = omega / (2 pi).
struct FrequencyGrid {
  std::vector<double> omegas;  // strictly increasing, in [0, pi]

  std::size_t size() const { return omegas.size(); }
  double operator[](std::size_t k) const { return omegas[k]; }
};

// count equally spaced samples on [0, pi]. With endpoints, omega_0 = 0 and
// omega_{L-1} = pi; without, the midpoint grid (k + 1/2) * pi / L.
FrequencyGrid build_grid(std::size_t count, bool include_endpoints);

// Default grid density for a design with n unknowns: many more samples than
// coefficients, floored so short filters still get a dense grid.
std::size_t default_grid_size(std::size_t coeff_count);

enum class BandLabel { Pass, Stop, Transition };
enum class TransitionMode { DontCare, LinearInterp };
enum class PhaseMode { None, Linear };

struct DesiredResponse {
  CVec samples;                   // D(omega_k), aligned with the grid
  std::vector<BandLabel> labels;  // one label per sample
  bool magnitude_only = false;    // samples are real, >= 0
  TransitionMode transition = TransitionMode::DontCare;

  // Rows that participate in a design. DontCare drops transition-labeled
  // rows; LinearInterp keeps them.
  std::vector<int> active_rows() const;
};

// Standard lowpass spec: magnitude 1 up to pass_edge, 0 from stop_edge on.
// Transition samples carry the linearly interpolated magnitude either way;
// the mode decides whether they count as design rows. Linear phase
// multiplies by e^{-j omega * group_delay}.
DesiredResponse build_lowpass_desired(const FrequencyGrid& grid,
                                      double pass_edge, double stop_edge,
                                      TransitionMode transition,
                                      PhaseMode phase = PhaseMode::None,
                                      double group_delay = 0.0);

// Mirror data from (0, pi) onto (pi, 2 pi) with conjugated values, so a
// least-squares fit of e^{-j omega n} kernels comes out real. Endpoint
// samples at 0 and pi map to themselves.
struct ConjugateExtension {
  std::vector<double> omegas;
  CVec samples;
  std::vector<int> source_row;  // extended row -> original row
};

ConjugateExtension extend_conjugate(const std::vector<double>& omegas,
                                    const CVec& samples);

}  // namespace lpfd
