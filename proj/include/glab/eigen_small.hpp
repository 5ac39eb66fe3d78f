#pragma once

// Eigenvalue ranges of 2x2 and 3x3 hermitian matrices, used for metric
// positivity scans and quasi-isometry constants.  Hermitian matrices have a
// real characteristic polynomial, so the 3x3 case is solved with the
// trigonometric cubic formula -- no iteration, fully deterministic.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glab/grid.hpp"

namespace glab {

struct EigRange {
  double min, max;
};

namespace detail {

// real roots of lambda^3 - c2 lambda^2 + c1 lambda - c0 (all roots real)
inline void real_cubic_roots(double c2, double c1, double c0, double out[3]) {
  const double s = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -2.0 * c2 * c2 * c2 / 27.0 + c1 * c2 / 3.0 - c0;
  if (p > -1e-300) {  // (near-)triple root
    out[0] = out[1] = out[2] = s;
    return;
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  double arg = 3.0 * q / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k)
    out[k] = s + m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
}

} // namespace detail

// eigenvalue range of a hermitian matrix given row-major, dim in {2,3}
inline EigRange hermitian_eig_range(const cplx* A, int dim) {
  if (dim == 2) {
    const double a = A[0].real(), d = A[3].real();
    const double off = std::abs(A[1]);
    const double mid = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), off);
    return {mid - rad, mid + rad};
  }
  if (dim == 3) {
    const double a00 = A[0].real(), a11 = A[4].real(), a22 = A[8].real();
    const cplx a01 = A[1], a02 = A[2], a12 = A[5];
    const double c2 = a00 + a11 + a22;
    const double c1 = (a00 * a11 - std::norm(a01)) +
                      (a00 * a22 - std::norm(a02)) +
                      (a11 * a22 - std::norm(a12));
    const cplx det = A[0] * (A[4] * A[8] - A[5] * A[7]) -
                     A[1] * (A[3] * A[8] - A[5] * A[6]) +
                     A[2] * (A[3] * A[7] - A[4] * A[6]);
    double roots[3];
    detail::real_cubic_roots(c2, c1, det.real(), roots);
    return {std::min({roots[0], roots[1], roots[2]}),
            std::max({roots[0], roots[1], roots[2]})};
  }
  throw InvalidInputs("hermitian_eig_range: dim must be 2 or 3");
}

// eigenvalue range of the hermitian pencil (A, B) with B positive definite:
// the generalized eigenvalues of A x = lambda B x, via Cholesky of B and the
// similar hermitian matrix L^{-1} A L^{-H}
inline EigRange pencil_eig_range(const cplx* A, const cplx* B, int dim) {
  if (dim != 2 && dim != 3)
    throw InvalidInputs("pencil_eig_range: dim must be 2 or 3");
  // lower Cholesky of B
  cplx L[9] = {};
  for (int j = 0; j < dim; ++j) {
    cplx s = B[j * dim + j];
    for (int k = 0; k < j; ++k) s -= L[j * dim + k] * std::conj(L[j * dim + k]);
    if (s.real() <= 0.0)
      throw PositivityViolation("pencil_eig_range: reference matrix not positive definite");
    L[j * dim + j] = std::sqrt(s.real());
    for (int i = j + 1; i < dim; ++i) {
      cplx t = B[i * dim + j];
      for (int k = 0; k < j; ++k) t -= L[i * dim + k] * std::conj(L[j * dim + k]);
      L[i * dim + j] = t / L[j * dim + j].real();
    }
  }
  // M = L^{-1} A L^{-H}: first Y = L^{-1} A (forward solve per column),
  // then M = Y L^{-H} i.e. M^H = L^{-1} Y^H, another forward solve
  cplx Y[9], M[9];
  for (int c = 0; c < dim; ++c)
    for (int i = 0; i < dim; ++i) {
      cplx s = A[i * dim + c];
      for (int k = 0; k < i; ++k) s -= L[i * dim + k] * Y[k * dim + c];
      Y[i * dim + c] = s / L[i * dim + i].real();
    }
  for (int c = 0; c < dim; ++c)
    for (int i = 0; i < dim; ++i) {
      cplx s = std::conj(Y[c * dim + i]);
      for (int k = 0; k < i; ++k) s -= L[i * dim + k] * std::conj(M[c * dim + k]);
      // M^H[i][c] = s / L[i][i]  =>  M[c][i] = conj(...)
      M[c * dim + i] = std::conj(s / L[i * dim + i].real());
    }
  return hermitian_eig_range(M, dim);
}

} // namespace glab
