#include "linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lpfd {

namespace {
constexpr double kRankDeficiencyThreshold = 1e12;
}

WlsSolution solve_wls(const CMat& C, const CVec& D, const RVec& w) {
  const Eigen::Index rows = C.rows();
  const Eigen::Index cols = C.cols();
  if (D.size() != rows || w.size() != rows) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "solve_wls: C is " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " but |D|=" +
                          std::to_string(D.size()) + ", |w|=" +
                          std::to_string(w.size()));
  }
  if (rows < cols) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "solve_wls: underdetermined system (" +
                          std::to_string(rows) + " rows < " +
                          std::to_string(cols) + " columns)");
  }
  Eigen::Index positive = 0;
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (w[k] < 0.0 || !std::isfinite(w[k])) {
      throw DesignError(ErrorCode::InvalidArgument,
                        "solve_wls: weights must be finite and nonnegative");
    }
    if (w[k] > 0.0) ++positive;
  }
  if (positive < cols) {
    throw DesignError(ErrorCode::RankDeficient,
                      "solve_wls: fewer positive weights than unknowns");
  }

  const RVec s = w.cwiseSqrt();
  CMat scaled = s.asDiagonal() * C;
  CVec rhs = s.asDiagonal() * D;

  Eigen::ColPivHouseholderQR<CMat> qr(scaled);
  const auto& R = qr.matrixR();
  double rmax = 0.0, rmin = 0.0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double d = std::abs(R(j, j));
    if (j == 0) rmax = rmin = d;
    rmax = std::max(rmax, d);
    rmin = std::min(rmin, d);
  }
  const double cond =
      rmin > 0.0 ? std::max(1.0, rmax / rmin)
                 : std::numeric_limits<double>::infinity();
  if (!(cond < kRankDeficiencyThreshold)) {
    throw DesignError(ErrorCode::RankDeficient,
                      "solve_wls: scaled design matrix is rank deficient "
                      "(condition estimate " + std::to_string(cond) + ")",
                      cond);
  }

  WlsSolution out;
  out.coefficients = qr.solve(rhs);
  out.residual = C * out.coefficients - D;
  out.condition_estimate = cond;
  return out;
}

std::vector<Complex> polynomial_roots(const RVec& coeffs) {
  Eigen::Index hi = coeffs.size() - 1;
  while (hi > 0 && coeffs[hi] == 0.0) --hi;
  Eigen::Index lo = 0;
  while (lo < hi && coeffs[lo] == 0.0) ++lo;

  std::vector<Complex> roots;
  for (Eigen::Index k = 0; k < lo; ++k) roots.emplace_back(0.0, 0.0);
  const Eigen::Index d = hi - lo;
  if (d < 1) return roots;

  RMat companion = RMat::Zero(d, d);
  for (Eigen::Index k = 1; k < d; ++k) companion(k, k - 1) = 1.0;
  for (Eigen::Index k = 0; k < d; ++k)
    companion(k, d - 1) = -coeffs[lo + k] / coeffs[hi];
  Eigen::EigenSolver<RMat> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw DesignError(ErrorCode::FactorizationFailure,
                      "polynomial_roots: eigenvalue iteration failed");
  }
  for (Eigen::Index k = 0; k < d; ++k) roots.push_back(es.eigenvalues()[k]);
  return roots;
}

RealProjection real_part_projection(const CVec& x) {
  RealProjection out;
  out.values.resize(x.size());
  double max_imag = 0.0, max_real = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    out.values[k] = x[k].real();
    max_imag = std::max(max_imag, std::abs(x[k].imag()));
    max_real = std::max(max_real, std::abs(x[k].real()));
  }
  out.max_imag_discarded = max_imag;
  out.warning = max_imag > 1e-6 * max_real;
  return out;
}

}  // namespace lpfd
