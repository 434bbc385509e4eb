#include "fir_kernels.hpp"

#include <cmath>
#include <numbers>

namespace lpfd {

namespace {

bool odd_length_kind(LinearPhaseKind kind) {
  return kind == LinearPhaseKind::I || kind == LinearPhaseKind::III;
}

bool even_symmetry(LinearPhaseKind kind) {
  return kind == LinearPhaseKind::I || kind == LinearPhaseKind::II;
}

void check_parity(LinearPhaseKind kind, int length) {
  if (length < 1) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "linear phase: length must be positive");
  }
  const bool odd = (length % 2) == 1;
  if (odd != odd_length_kind(kind)) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "linear phase: kind/length parity mismatch (I, III "
                      "need odd N; II, IV need even N)");
  }
}

int amplitude_count(LinearPhaseKind kind, int length) {
  switch (kind) {
    case LinearPhaseKind::I:
      return (length - 1) / 2 + 1;
    case LinearPhaseKind::III:
      return (length - 1) / 2;
    case LinearPhaseKind::II:
    case LinearPhaseKind::IV:
      return length / 2;
  }
  return 0;
}

}  // namespace

LinearPhaseKernel linear_phase_kernel(const FrequencyGrid& grid, int length,
                                      LinearPhaseKind kind) {
  check_parity(kind, length);
  const double M = 0.5 * (length - 1);
  const int n = amplitude_count(kind, length);
  const Eigen::Index L = static_cast<Eigen::Index>(grid.size());

  LinearPhaseKernel k;
  k.kind = kind;
  k.length = length;
  k.phase_offset = even_symmetry(kind) ? 0.0 : std::numbers::pi / 2.0;
  k.phase_slope = -M;
  k.matrix.resize(L, n);

  for (Eigen::Index r = 0; r < L; ++r) {
    const double w = grid[static_cast<std::size_t>(r)];
    switch (kind) {
      case LinearPhaseKind::I:
        // A(w) = a0 + sum_m 2 a_m cos(m w)
        k.matrix(r, 0) = 1.0;
        for (int m = 1; m < n; ++m) k.matrix(r, m) = 2.0 * std::cos(m * w);
        break;
      case LinearPhaseKind::II:
        // A(w) = sum_m 2 a_m cos((m - 1/2) w), m = 1..N/2
        for (int m = 1; m <= n; ++m)
          k.matrix(r, m - 1) = 2.0 * std::cos((m - 0.5) * w);
        break;
      case LinearPhaseKind::III:
        // A(w) = sum_m 2 a_m sin(m w)
        for (int m = 1; m <= n; ++m)
          k.matrix(r, m - 1) = 2.0 * std::sin(m * w);
        break;
      case LinearPhaseKind::IV:
        // A(w) = sum_m 2 a_m sin((m - 1/2) w)
        for (int m = 1; m <= n; ++m)
          k.matrix(r, m - 1) = 2.0 * std::sin((m - 0.5) * w);
        break;
    }
  }
  return k;
}

RVec amplitude_to_impulse(const RVec& a, LinearPhaseKind kind, int length) {
  check_parity(kind, length);
  const int n = amplitude_count(kind, length);
  if (a.size() != n) {
    throw DesignError(ErrorCode::DimensionMismatch,
                      "amplitude_to_impulse: expected " + std::to_string(n) +
                          " coefficients, got " + std::to_string(a.size()));
  }
  RVec h = RVec::Zero(length);
  const int sign = even_symmetry(kind) ? 1 : -1;
  if (odd_length_kind(kind)) {
    const int M = (length - 1) / 2;
    if (kind == LinearPhaseKind::I) h[M] = a[0];
    // type III leaves h(M) = 0
    for (int m = 1; m <= M; ++m) {
      const double v = a[kind == LinearPhaseKind::I ? m : m - 1];
      h[M - m] = v;
      h[M + m] = sign * v;
    }
  } else {
    const int K = length / 2;
    for (int m = 1; m <= K; ++m) {
      const double v = a[m - 1];
      h[K - m] = v;
      h[length - 1 - (K - m)] = sign * v;
    }
  }
  return h;
}

RVec impulse_to_amplitude(const RVec& h, LinearPhaseKind kind) {
  const int length = static_cast<int>(h.size());
  check_parity(kind, length);
  const int n = amplitude_count(kind, length);
  RVec a(n);
  if (odd_length_kind(kind)) {
    const int M = (length - 1) / 2;
    if (kind == LinearPhaseKind::I) {
      a[0] = h[M];
      for (int m = 1; m <= M; ++m) a[m] = h[M - m];
    } else {
      for (int m = 1; m <= M; ++m) a[m - 1] = h[M - m];
    }
  } else {
    const int K = length / 2;
    for (int m = 1; m <= K; ++m) a[m - 1] = h[K - m];
  }
  return a;
}

CMat complex_kernel(const std::vector<double>& omegas, int length) {
  if (length < 1) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "complex_kernel: length must be positive");
  }
  CMat k(static_cast<Eigen::Index>(omegas.size()), length);
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    const double w = omegas[static_cast<std::size_t>(r)];
    for (int c = 0; c < length; ++c)
      k(r, c) = std::exp(Complex(0.0, -w * c));
  }
  return k;
}

CMat complex_kernel(const FrequencyGrid& grid, int length) {
  return complex_kernel(grid.omegas, length);
}

RVec autocorrelation(const RVec& h) {
  const Eigen::Index N = h.size();
  if (N < 1) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "autocorrelation: empty input");
  }
  RVec r = RVec::Zero(N);
  for (Eigen::Index lag = 0; lag < N; ++lag)
    for (Eigen::Index k = 0; k + lag < N; ++k) r[lag] += h[k] * h[k + lag];
  return r;
}

RMat psd_kernel(const FrequencyGrid& grid, int length) {
  if (length < 1) {
    throw DesignError(ErrorCode::InvalidArgument,
                      "psd_kernel: length must be positive");
  }
  RMat k(static_cast<Eigen::Index>(grid.size()), length);
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    const double w = grid[static_cast<std::size_t>(r)];
    k(r, 0) = 1.0;
    for (int c = 1; c < length; ++c) k(r, c) = 2.0 * std::cos(c * w);
  }
  return k;
}

}  // namespace lpfd
