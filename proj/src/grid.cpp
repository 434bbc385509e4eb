#include "grid.hpp"

#include <cmath>
#include <numbers>

namespace lpfd {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEdgeTol = 1e-12;
}  // namespace

FrequencyGrid build_grid(std::size_t count, bool include_endpoints) {
  if (count < 2) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "build_grid: need at least 2 samples");
  }
  FrequencyGrid g;
  g.omegas.resize(count);
  if (include_endpoints) {
    const double step = kPi / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k)
      g.omegas[k] = static_cast<double>(k) * step;
    g.omegas.back() = kPi;
  } else {
    const double step = kPi / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k)
      g.omegas[k] = (static_cast<double>(k) + 0.5) * step;
  }
  return g;
}

std::size_t default_grid_size(std::size_t coeff_count) {
  return std::max<std::size_t>(16 * coeff_count, 256);
}

std::vector<int> DesiredResponse::active_rows() const {
  std::vector<int> rows;
  rows.reserve(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] != BandLabel::Transition ||
        transition == TransitionMode::LinearInterp) {
      rows.push_back(static_cast<int>(k));
    }
  }
  return rows;
}

DesiredResponse build_lowpass_desired(const FrequencyGrid& grid,
                                      double pass_edge, double stop_edge,
                                      TransitionMode transition,
                                      PhaseMode phase, double group_delay) {
  if (!(0.0 < pass_edge && pass_edge <= stop_edge && stop_edge < kPi)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "build_lowpass_desired: need 0 < pass_edge <= "
                      "stop_edge < pi");
  }
  DesiredResponse d;
  const std::size_t L = grid.size();
  d.samples.resize(static_cast<Eigen::Index>(L));
  d.labels.resize(L);
  d.magnitude_only = (phase == PhaseMode::None);
  d.transition = transition;
  for (std::size_t k = 0; k < L; ++k) {
    const double w = grid[k];
    double mag;
    if (w <= pass_edge + kEdgeTol) {
      d.labels[k] = BandLabel::Pass;
      mag = 1.0;
    } else if (w >= stop_edge - kEdgeTol) {
      d.labels[k] = BandLabel::Stop;
      mag = 0.0;
    } else {
      d.labels[k] = BandLabel::Transition;
      mag = 1.0 - (w - pass_edge) / (stop_edge - pass_edge);
    }
    if (phase == PhaseMode::Linear) {
      d.samples[static_cast<Eigen::Index>(k)] =
          mag * std::exp(Complex(0.0, -w * group_delay));
    } else {
      d.samples[static_cast<Eigen::Index>(k)] = mag;
    }
  }
  return d;
}

ConjugateExtension extend_conjugate(const std::vector<double>& omegas,
                                    const CVec& samples) {
  ConjugateExtension ext;
  const std::size_t L = omegas.size();
  ext.omegas.reserve(2 * L);
  ext.source_row.reserve(2 * L);
  std::vector<Complex> vals;
  vals.reserve(2 * L);
  for (std::size_t k = 0; k < L; ++k) {
    ext.omegas.push_back(omegas[k]);
    vals.push_back(samples[static_cast<Eigen::Index>(k)]);
    ext.source_row.push_back(static_cast<int>(k));
  }
  for (std::size_t k = 0; k < L; ++k) {
    const double w = omegas[k];
    if (w > kEdgeTol && w < kPi - kEdgeTol) {
      ext.omegas.push_back(2.0 * kPi - w);
      vals.push_back(std::conj(samples[static_cast<Eigen::Index>(k)]));
      ext.source_row.push_back(static_cast<int>(k));
    }
  }
  ext.samples.resize(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t k = 0; k < vals.size(); ++k)
    ext.samples[static_cast<Eigen::Index>(k)] = vals[k];
  return ext;
}

}  // namespace lpfd
