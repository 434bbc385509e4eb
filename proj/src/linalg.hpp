#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lpfd {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  RankDeficient,
  SingularEvaluation,
  FactorizationFailure,
};

// Library-wide error type. `value` carries a diagnostic quantity where one
// exists (condition estimate, offending frequency, ...).
class DesignError : public std::runtime_error {
 public:
  DesignError(ErrorCode code, const std::string& what, double value = 0.0)
      : std::runtime_error(what), code_(code), value_(value) {}
  ErrorCode code() const noexcept { return code_; }
  double value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  double value_;
};

struct WlsSolution {
  CVec coefficients;
  CVec residual;              // C * coefficients - D
  double condition_estimate;  // >= 1, ratio of R-factor diagonal extremes
};

// Weighted least squares: minimize sum_k w_k |D_k - (C h)_k|^2 over h.
// Real problems use the same path with zero imaginary parts.
//
// The solve runs on the sqrt(w)-scaled rows through a column-pivoted QR
// rather than forming C^T W C; the scaled system stays well conditioned
// under the extreme weight spreads the iterative designs generate.
// A condition estimate above 1e12 is treated as rank deficiency.
WlsSolution solve_wls(const CMat& C, const CVec& D, const RVec& w);

struct RealProjection {
  RVec values;
  double max_imag_discarded;
  bool warning;  // discarded imaginary parts were not negligible
};

// Component-wise real parts of x. Complex-kernel solves for real filters
// leave O(eps) imaginary residue; this strips it and reports how much.
RealProjection real_part_projection(const CVec& x);

// All complex roots of c[0] + c[1] z + ... + c[d] z^d, via the eigenvalues
// of the companion matrix. Zero coefficients at either end are handled
// (low-side zeros contribute roots at the origin).
std::vector<Complex> polynomial_roots(const RVec& coeffs);

}  // namespace lpfd
