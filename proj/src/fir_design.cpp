#include "fir_design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lpfd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFeasibilitySlack = 1e-4;
constexpr double kClsSigma = 1.5;  // homotopy factor for constraint weights
constexpr double kAmplitudeWeightCap = 1e140;

RVec amplitude_target(const DesiredResponse& desired,
                      const std::vector<int>& rows) {
  RVec d(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Complex v = desired.samples[rows[k]];
    d[static_cast<Eigen::Index>(k)] =
        desired.magnitude_only ? v.real() : std::abs(v);
  }
  return d;
}

CMat rows_of(const RMat& m, const std::vector<int>& rows) {
  CMat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) =
        m.row(rows[k]).cast<Complex>();
  return out;
}

CVec to_complex(const RVec& v) {
  return v.cast<Complex>();
}

void flag_projection(ConvergenceTrace& trace, const RealProjection& proj) {
  if (proj.warning && !trace.records.empty())
    trace.records.back().flags |= kFlagImagDiscard;
}

}  // namespace

FirDesignResult design_linear_phase_lp(const FrequencyGrid& grid,
                                       const DesiredResponse& desired,
                                       int length, LinearPhaseKind kind,
                                       const IrlsStrategy& strategy,
                                       const IrlsConfig& config) {
  const LinearPhaseKernel kernel = linear_phase_kernel(grid, length, kind);
  FirDesignResult out;
  out.design_rows = desired.active_rows();

  DesignMatrixProblem problem;
  problem.C = rows_of(kernel.matrix, out.design_rows);
  problem.D = to_complex(amplitude_target(desired, out.design_rows));

  IrlsResult res = run_irls(problem, strategy, config);
  out.trace = std::move(res.trace);
  const RealProjection proj = real_part_projection(res.coefficients);
  flag_projection(out.trace, proj);

  out.filter.h = amplitude_to_impulse(proj.values, kind, length);
  out.filter.linear_phase = true;
  out.filter.lp_kind = kind;
  return out;
}

FirDesignResult design_complex_lp(const FrequencyGrid& grid,
                                  const DesiredResponse& desired, int length,
                                  const IrlsStrategy& strategy,
                                  const IrlsConfig& config) {
  FirDesignResult out;
  out.design_rows = desired.active_rows();

  std::vector<double> omegas(out.design_rows.size());
  CVec d(static_cast<Eigen::Index>(out.design_rows.size()));
  for (std::size_t k = 0; k < out.design_rows.size(); ++k) {
    omegas[k] = grid[static_cast<std::size_t>(out.design_rows[k])];
    d[static_cast<Eigen::Index>(k)] = desired.samples[out.design_rows[k]];
  }
  const ConjugateExtension ext = extend_conjugate(omegas, d);

  DesignMatrixProblem problem;
  problem.C = complex_kernel(ext.omegas, length);
  problem.D = ext.samples;

  IrlsResult res = run_irls(problem, strategy, config);
  out.trace = std::move(res.trace);
  const RealProjection proj = real_part_projection(res.coefficients);
  flag_projection(out.trace, proj);

  // Weights live on the extended rows; keep the leading block, which is the
  // original rows in order.
  if (out.trace.final_weights.size() ==
      static_cast<Eigen::Index>(ext.omegas.size())) {
    out.trace.final_weights = out.trace.final_weights
        .head(static_cast<Eigen::Index>(out.design_rows.size())).eval();
  }

  out.filter.h = proj.values;
  out.filter.linear_phase = false;
  return out;
}

FirDesignResult design_freq_varying(const FrequencyGrid& grid,
                                    const DesiredResponse& desired,
                                    int length, LinearPhaseKind kind,
                                    const RVec& p_per_sample,
                                    const IrlsConfig& config, double sigma) {
  if (p_per_sample.size() != static_cast<Eigen::Index>(grid.size())) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "design_freq_varying: exponent vector must align with "
                      "the grid");
  }
  const std::vector<int> rows = desired.active_rows();
  RVec p_sub(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    p_sub[static_cast<Eigen::Index>(k)] = p_per_sample[rows[k]];

  IrlsConfig cfg = config;
  cfg.p_des = std::max(2.0, p_sub.maxCoeff());

  const LinearPhaseKernel kernel = linear_phase_kernel(grid, length, kind);
  FirDesignResult out;
  out.design_rows = rows;

  DesignMatrixProblem problem;
  problem.C = rows_of(kernel.matrix, rows);
  problem.D = to_complex(amplitude_target(desired, rows));

  IrlsResult res =
      run_irls(problem, IrlsStrategy::freq_varying(p_sub, sigma), cfg);
  out.trace = std::move(res.trace);
  const RealProjection proj = real_part_projection(res.coefficients);
  flag_projection(out.trace, proj);

  out.filter.h = amplitude_to_impulse(proj.values, kind, length);
  out.filter.linear_phase = true;
  out.filter.lp_kind = kind;
  return out;
}

// --- constrained least squares ----------------------------------------------

RVec cls_poly_weights(const RVec& error, double tau, double p) {
  if (!(tau > 0.0) || !(p > 2.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "cls_poly_weights: need tau > 0 and p > 2");
  }
  RVec w(error.size());
  const double e = (p - 2.0) / 2.0;
  for (Eigen::Index k = 0; k < error.size(); ++k) {
    const double v = 1.0 + std::pow(std::abs(error[k]) / tau, e);
    w[k] = std::min(v, kAmplitudeWeightCap);
  }
  return w;
}

namespace {

// Extend a violating run [lo, hi] to the surrounding zero crossings of the
// error without leaving the band the run started in.
void extend_to_envelope(const RVec& e, const std::vector<BandLabel>& labels,
                        int* lo, int* hi) {
  const int n = static_cast<int>(e.size());
  const BandLabel lo_band = labels[static_cast<std::size_t>(*lo)];
  while (*lo > 0 && labels[static_cast<std::size_t>(*lo - 1)] == lo_band &&
         e[*lo - 1] * e[*lo] > 0.0) {
    --*lo;
  }
  const BandLabel hi_band = labels[static_cast<std::size_t>(*hi)];
  while (*hi + 1 < n &&
         labels[static_cast<std::size_t>(*hi + 1)] == hi_band &&
         e[*hi + 1] * e[*hi] > 0.0) {
    ++*hi;
  }
}

}  // namespace

RVec cls_envelope_weights(const RVec& error,
                          const std::vector<BandLabel>& labels, double tau,
                          double p) {
  if (!(tau > 0.0)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "cls_envelope_weights: need tau > 0");
  }
  if (labels.size() != static_cast<std::size_t>(error.size())) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "cls_envelope_weights: label/error length mismatch");
  }
  const int n = static_cast<int>(error.size());
  RVec w = RVec::Ones(n);
  const double expo = (p - 2.0) / 2.0;
  int k = 0;
  while (k < n) {
    if (std::abs(error[k]) <= tau) {
      ++k;
      continue;
    }
    int lo = k, hi = k;
    while (hi + 1 < n && std::abs(error[hi + 1]) > tau &&
           labels[static_cast<std::size_t>(hi + 1)] ==
               labels[static_cast<std::size_t>(lo)]) {
      ++hi;
    }
    const int next = hi + 1;
    extend_to_envelope(error, labels, &lo, &hi);
    double peak = 0.0;
    for (int i = lo; i <= hi; ++i) peak = std::max(peak, std::abs(error[i]));
    const double v =
        std::min(std::pow(peak / tau, expo), kAmplitudeWeightCap);
    for (int i = lo; i <= hi; ++i) w[i] = std::max(w[i], v);
    k = std::max(next, hi + 1);
  }
  return w;
}

std::vector<bool> detect_induced_band(const RVec& error,
                                      const std::vector<BandLabel>& labels,
                                      double /*tau*/) {
  const int n = static_cast<int>(error.size());
  if (labels.size() != static_cast<std::size_t>(n)) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "detect_induced_band: label/error length mismatch");
  }
  std::vector<bool> eligible(static_cast<std::size_t>(n), false);

  int start = 0;
  while (start < n) {
    const BandLabel band = labels[static_cast<std::size_t>(start)];
    int end = start;
    while (end + 1 < n && labels[static_cast<std::size_t>(end + 1)] == band)
      ++end;

    if (band != BandLabel::Transition) {
      double band_max = 0.0;
      for (int i = start; i <= end; ++i)
        band_max = std::max(band_max, std::abs(error[i]));
      if (band_max > 1e-14) {
        int lo = start, hi = end;
        // Drop the ripple hugging a transition-adjacent band edge: walk
        // inward until the error changes sign.
        auto first_crossing = [&](int from, int step) {
          int i = from;
          while (i + step >= start && i + step <= end &&
                 error[i + step] * error[from] > 0.0) {
            i += step;
          }
          return i;
        };
        if (start > 0 && error[start] != 0.0) {
          const int ripple_end = first_crossing(start, +1);
          if (ripple_end < end) lo = ripple_end + 1;
          // no interior crossing: keep the whole band eligible
        }
        if (end < n - 1 && error[end] != 0.0) {
          const int ripple_start = first_crossing(end, -1);
          if (ripple_start > start) hi = std::min(hi, ripple_start - 1);
        }
        if (lo <= hi) {
          for (int i = lo; i <= hi; ++i)
            eligible[static_cast<std::size_t>(i)] = true;
        }
      }
    }
    start = end + 1;
  }
  return eligible;
}

ClsResult design_cls(const FrequencyGrid& grid,
                     const DesiredResponse& desired, int length,
                     LinearPhaseKind kind, const ClsSpec& spec,
                     const IrlsConfig& config) {
  if (!(spec.tau > 0.0)) {
    throw DesignError(ErrorCode::InvalidArgument, "design_cls: need tau > 0");
  }
  if (!(spec.p > 2.0)) {
    throw DesignError(ErrorCode::InvalidArgument, "design_cls: need p > 2");
  }

  const LinearPhaseKernel kernel = linear_phase_kernel(grid, length, kind);

  ClsResult out;
  if (spec.mode == ClsSpec::Mode::FixedBand) {
    out.design_rows = desired.active_rows();
  } else {
    out.design_rows.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      out.design_rows[k] = static_cast<int>(k);
  }
  std::vector<BandLabel> labels(out.design_rows.size());
  for (std::size_t k = 0; k < out.design_rows.size(); ++k)
    labels[k] = desired.labels[static_cast<std::size_t>(out.design_rows[k])];

  const CMat C = rows_of(kernel.matrix, out.design_rows);
  const RVec d = amplitude_target(desired, out.design_rows);
  const CVec D = to_complex(d);
  const Eigen::Index L = C.rows();

  auto is_constrained = [&](Eigen::Index k) {
    return labels[static_cast<std::size_t>(k)] != BandLabel::Transition;
  };

  CVec a = solve_wls(C, D, RVec::Ones(L)).coefficients;
  RVec e = (d - (C * a).real().matrix()).eval();

  double p_cur = std::min(spec.p, 2.0 * kClsSigma);
  bool feasible = false;
  out.trace.final_weights = RVec::Ones(L);

  auto record = [&](double p_used, double lambda, unsigned flags) {
    TraceRecord rec;
    rec.iteration = static_cast<int>(out.trace.records.size());
    rec.p = p_used;
    rec.sigma = kClsSigma;
    rec.lambda = lambda;
    const CVec ec = to_complex(e);
    rec.lp_error = lp_error(ec, p_used);
    rec.l2_error = lp_error(ec, 2.0);
    rec.max_error = lp_error(ec, std::numeric_limits<double>::infinity());
    rec.flags = flags;
    out.trace.records.push_back(rec);
  };

  record(2.0, 1.0, 0);

  while (static_cast<int>(out.trace.records.size()) <
         config.max_outer_iters) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < L; ++k)
      if (is_constrained(k)) worst = std::max(worst, std::abs(e[k]));
    if (worst <= spec.tau + kFeasibilitySlack) {
      feasible = true;
      break;
    }

    RVec wa = spec.weighting == ClsSpec::Weighting::Polynomial
                  ? cls_poly_weights(e, spec.tau, p_cur)
                  : cls_envelope_weights(e, labels, spec.tau, p_cur);
    if (spec.mode == ClsSpec::Mode::InducedBand) {
      const std::vector<bool> eligible =
          detect_induced_band(e, labels, spec.tau);
      for (Eigen::Index k = 0; k < L; ++k)
        if (!eligible[static_cast<std::size_t>(k)]) wa[k] = 1.0;
    } else {
      for (Eigen::Index k = 0; k < L; ++k)
        if (!is_constrained(k)) wa[k] = 1.0;
    }

    RVec w = wa.cwiseProduct(wa);
    const double wmax = w.maxCoeff();
    if (config.normalize_weights && wmax > 0.0) w /= wmax;
    for (Eigen::Index k = 0; k < L; ++k)
      w[k] = std::max(w[k], config.weight_floor);

    const WlsSolution sol = solve_wls(C, D, w);
    const double lambda = kahng_lambda(p_cur);
    const CVec a_next = partial_update(sol.coefficients, a, lambda);

    const double coeff_change =
        (a_next - a).norm() / std::max(a.norm(), 1e-300);
    a = a_next;
    e = (d - (C * a).real().matrix()).eval();
    out.trace.final_weights = w;
    record(p_cur, lambda, 0);

    const bool p_at_target = p_cur >= spec.p;
    p_cur = p_schedule_next(p_cur, spec.p, kClsSigma);
    if (p_at_target && coeff_change < config.coeff_tol) break;
  }

  // Final feasibility over the constrained rows.
  out.report.iterations = static_cast<int>(out.trace.records.size()) - 1;
  out.report.max_constrained_error = 0.0;
  bool all_met = true;
  for (Eigen::Index k = 0; k < L; ++k) {
    if (!is_constrained(k)) continue;
    const double mag = std::abs(e[k]);
    out.report.max_constrained_error =
        std::max(out.report.max_constrained_error, mag);
    if (mag > spec.tau + kFeasibilitySlack) all_met = false;
  }
  out.report.feasible = feasible || all_met;
  if (!out.report.feasible) {
    out.trace.records.back().flags |= kFlagConstraintInfeasible;
    out.trace.message = "constraint-infeasible: max constrained error " +
                        std::to_string(out.report.max_constrained_error) +
                        " exceeds tau " + std::to_string(spec.tau);
  }
  out.trace.status =
      static_cast<int>(out.trace.records.size()) >= config.max_outer_iters
          ? ConvergenceTrace::Status::MaxIters
          : ConvergenceTrace::Status::Converged;

  // Realized transition edges: the outermost constrained samples, walking
  // out from the band interiors, that still meet the tolerance.
  {
    double pass_edge = 0.0, stop_edge = kPi;
    for (Eigen::Index k = 0; k < L; ++k) {
      if (labels[static_cast<std::size_t>(k)] != BandLabel::Pass) continue;
      if (std::abs(e[k]) <= spec.tau + kFeasibilitySlack) {
        pass_edge = grid[static_cast<std::size_t>(out.design_rows
                             [static_cast<std::size_t>(k)])];
      } else {
        break;
      }
    }
    for (Eigen::Index k = L - 1; k >= 0; --k) {
      if (labels[static_cast<std::size_t>(k)] != BandLabel::Stop) continue;
      if (std::abs(e[k]) <= spec.tau + kFeasibilitySlack) {
        stop_edge = grid[static_cast<std::size_t>(out.design_rows
                             [static_cast<std::size_t>(k)])];
      } else {
        break;
      }
    }
    out.report.realized_pass_edge = pass_edge;
    out.report.realized_stop_edge = stop_edge;
  }

  const RealProjection proj = real_part_projection(a);
  flag_projection(out.trace, proj);
  out.filter.h = amplitude_to_impulse(proj.values, kind, length);
  out.filter.linear_phase = true;
  out.filter.lp_kind = kind;
  return out;
}

// --- magnitude design --------------------------------------------------------

FirDesignResult design_magnitude_fir(const FrequencyGrid& grid,
                                     const DesiredResponse& desired,
                                     int length,
                                     const IrlsStrategy& strategy,
                                     const IrlsConfig& config) {
  const RMat kernel = psd_kernel(grid, length);
  FirDesignResult out;
  out.design_rows = desired.active_rows();

  RVec d = amplitude_target(desired, out.design_rows);
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d[k] < 0.0) {
      throw DesignError(ErrorCode::InvalidArgument,
                        "design_magnitude_fir: desired magnitude must be "
                        "nonnegative");
    }
    d[k] *= d[k];  // fit the squared magnitude
  }

  DesignMatrixProblem problem;
  problem.C = rows_of(kernel, out.design_rows);
  problem.D = to_complex(d);

  IrlsResult res = run_irls(problem, strategy, config);
  out.trace = std::move(res.trace);
  const RealProjection proj = real_part_projection(res.coefficients);
  flag_projection(out.trace, proj);
  RVec r = proj.values;

  // Lift the fitted power spectrum if it dips below zero; a constant added
  // to R(omega) lands entirely on lag zero.
  {
    const FrequencyGrid fine =
        build_grid(std::max<std::size_t>(4096, 16 * grid.size()), true);
    const RMat fine_kernel = psd_kernel(fine, length);
    const double rmin = (fine_kernel * r).minCoeff();
    if (rmin < 0.0) {
      r[0] += -rmin + 1e-8 * std::max(std::abs(r[0]), 1e-30);
    }
  }

  out.filter.h = spectral_factorize(r);
  out.filter.linear_phase = false;
  return out;
}

RVec spectral_factorize(const RVec& r) {
  const Eigen::Index N = r.size();
  if (N < 1) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "spectral_factorize: empty autocorrelation");
  }

  // Verification grid and nonnegativity gate.
  const FrequencyGrid fine =
      build_grid(std::max<Eigen::Index>(4096, 16 * N), true);
  const RMat fine_kernel = psd_kernel(fine, static_cast<int>(N));
  const RVec R = fine_kernel * r;
  const double rmin = R.minCoeff();
  if (rmin < -1e-8) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "spectral_factorize: R(omega) reaches " +
                          std::to_string(rmin) +
                          "; lift the autocorrelation first",
                      rmin);
  }
  const double rmax_val = R.maxCoeff();
  if (rmax_val <= 0.0) return RVec::Zero(N);

  // Trailing zero lags shorten the factor; pad the result back out.
  Eigen::Index ne = N;
  while (ne > 1 && r[ne - 1] == 0.0) --ne;

  RVec h = RVec::Zero(N);
  if (ne == 1) {
    h[0] = std::sqrt(std::max(r[0], 0.0));
    return h;
  }

  // Roots of z^(ne-1) R(z), a self-reciprocal polynomial of degree
  // 2(ne-1); they come in (z, 1/conj z) pairs.
  RVec c(2 * ne - 1);
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c[k] = r[std::abs(k - (ne - 1))];
  const std::vector<Complex> roots = polynomial_roots(c);

  constexpr double kCircleTol = 1e-7;
  std::vector<Complex> selected;
  std::vector<Complex> on_circle;
  std::size_t outside = 0;
  for (const Complex& z : roots) {
    const double m = std::abs(z);
    if (m < 1.0 - kCircleTol) {
      selected.push_back(z);
    } else if (m > 1.0 + kCircleTol) {
      ++outside;
    } else {
      on_circle.push_back(z);
    }
  }

  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "spectral_factorize: " << why << "; roots:";
    for (const Complex& z : roots)
      os << " (" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
         << "j)";
    throw DesignError(ErrorCode::FactorizationFailure, os.str());
  };

  if (selected.size() != outside) {
    fail("inside/outside root counts differ");
  }
  if (on_circle.size() % 2 != 0) {
    fail("odd number of roots on the unit circle");
  }

  if (!on_circle.empty()) {
    // Unit-circle roots of a nonnegative R have even multiplicity; they
    // show up as angle pairs split across the circle. Keep one per pair.
    std::sort(on_circle.begin(), on_circle.end(),
              [](const Complex& a, const Complex& b) {
                return std::arg(a) < std::arg(b);
              });
    // Rotate so pairing never straddles the branch cut.
    std::size_t gap_at = 0;
    double gap = -1.0;
    const std::size_t m = on_circle.size();
    for (std::size_t i = 0; i < m; ++i) {
      double d = std::arg(on_circle[(i + 1) % m]) - std::arg(on_circle[i]);
      if (i + 1 == m) d += 2.0 * kPi;
      if (d > gap) {
        gap = d;
        gap_at = (i + 1) % m;
      }
    }
    for (std::size_t i = 0; i + 1 < m; i += 2) {
      const Complex z1 = on_circle[(gap_at + i) % m];
      const Complex z2 = on_circle[(gap_at + i + 1) % m];
      double d = std::abs(std::arg(z1) - std::arg(z2));
      d = std::min(d, 2.0 * kPi - d);
      if (d > 1e-4) fail("unpaired root on the unit circle");
      Complex z = std::abs(z1) <= std::abs(z2) ? z1 : z2;
      if (std::abs(z) > 1.0) z /= std::abs(z);
      selected.push_back(z);
    }
  }

  if (static_cast<Eigen::Index>(selected.size()) != ne - 1) {
    fail("selected root count does not match the factor degree");
  }

  // Multiply the factors out; conjugate pairing keeps the product real.
  std::vector<Complex> q{Complex(1.0, 0.0)};
  for (const Complex& z : selected) {
    std::vector<Complex> nq(q.size() + 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < q.size(); ++i) {
      nq[i] += q[i];
      nq[i + 1] -= q[i] * z;
    }
    q = std::move(nq);
  }

  // Scale so |H|^2 matches R; anchor at the strongest frequency.
  Eigen::Index peak = 0;
  R.maxCoeff(&peak);
  const double w_star = fine[static_cast<std::size_t>(peak)];
  Complex qv(0.0, 0.0);
  for (std::size_t n = 0; n < q.size(); ++n)
    qv += q[n] * std::exp(Complex(0.0, -w_star * static_cast<double>(n)));
  const double q2 = std::norm(qv);
  if (q2 <= 0.0) fail("degenerate scale factor");
  const double g = std::sqrt(R[peak] / q2);

  for (std::size_t n = 0; n < q.size(); ++n)
    h[static_cast<Eigen::Index>(n)] = g * q[n].real();

  // Canonical sign: first nonzero coefficient positive.
  for (Eigen::Index k = 0; k < N; ++k) {
    if (h[k] != 0.0) {
      if (h[k] < 0.0) h = -h;
      break;
    }
  }

  // Verify the factorization on the fine grid.
  double worst = 0.0;
  for (Eigen::Index k = 0; k < R.size(); ++k) {
    Complex H(0.0, 0.0);
    const double w = fine[static_cast<std::size_t>(k)];
    for (Eigen::Index n = 0; n < N; ++n)
      H += h[n] * std::exp(Complex(0.0, -w * static_cast<double>(n)));
    worst = std::max(worst, std::abs(std::norm(H) - R[k]));
  }
  if (worst > 1e-6 * std::max(rmax_val, 1e-30)) {
    fail("reconstruction error " + std::to_string(worst) +
         " exceeds tolerance");
  }
  return h;
}

}  // namespace lpfd
