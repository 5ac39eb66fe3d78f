#pragma once

// Exterior calculus on form fields: pointwise algebra (wedge, conjugate,
// scalar multiplication) and spectral derivatives (del, dbar, and the i
// del dbar composite).  Derivatives act one complex axis at a time through
// Fourier multipliers
//     d/dz_j    ->  i pi (m_x - i m_y)
//     d/dzbar_j ->  i pi (m_x + i m_y)
// where (m_x, m_y) are the integer modes along the two real axes of z_j;
// any Nyquist bin on those two axes is zeroed (its sign is not represented).
//
// Sign bookkeeping happens only here.  Inserting dz^j in front of dz^J costs
// merge_sign({j},J); dbar additionally passes dzbar^j across the p dz's of
// dz^J, costing (-1)^p.

#include <cmath>
#include <numbers>

#include "glab/fft.hpp"
#include "glab/grid.hpp"

namespace glab {

// ---- pointwise algebra ----

inline FormField add(const FormField& A, const FormField& B) {
  check_same_grid(A.grid(), B.grid(), "add");
  if (A.p() != B.p() || A.q() != B.q())
    throw DegreeOverflow("add: bidegree mismatch");
  FormField out = A;
  for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] += B.raw()[i];
  return out;
}

inline FormField sub(const FormField& A, const FormField& B) {
  check_same_grid(A.grid(), B.grid(), "sub");
  if (A.p() != B.p() || A.q() != B.q())
    throw DegreeOverflow("sub: bidegree mismatch");
  FormField out = A;
  for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] -= B.raw()[i];
  return out;
}

inline FormField scale(const FormField& A, cplx c) {
  FormField out = A;
  for (auto& v : out.raw()) v *= c;
  return out;
}

inline FormField scalar_times(const ScalarField& u, const FormField& A) {
  check_same_grid(u.grid, A.grid(), "scalar_times");
  FormField out = A;
  for (int a = 0; a < out.np(); ++a)
    for (int b = 0; b < out.nq(); ++b) {
      cplx* c = out.comp(a, b);
      for (std::uint64_t i = 0; i < out.nodes(); ++i) c[i] *= u.v[i];
    }
  return out;
}

// complex conjugate of a form: coefficients conjugate and (J,K) swap with
// the reordering sign (-1)^{pq}
inline FormField conj_form(const FormField& A) {
  FormField out(A.grid(), A.q(), A.p());
  const double sign = ((A.p() * A.q()) % 2 == 0) ? 1.0 : -1.0;
  for (int a = 0; a < A.np(); ++a)
    for (int b = 0; b < A.nq(); ++b) {
      const cplx* src = A.comp(a, b);
      cplx* dst = out.comp(b, a);
      for (std::uint64_t i = 0; i < A.nodes(); ++i)
        dst[i] = sign * std::conj(src[i]);
    }
  return out;
}

inline FormField wedge(const FormField& A, const FormField& B) {
  check_same_grid(A.grid(), B.grid(), "wedge");
  const PeriodicGrid& g = A.grid();
  FormField out(g, A.p() + B.p(), A.q() + B.q());
  // (dz^J1 dzbar^K1)(dz^J2 dzbar^K2): dzbar^K1 passes over dz^J2
  const double cross = ((A.q() * B.p()) % 2 == 0) ? 1.0 : -1.0;
  for (int a1 = 0; a1 < A.np(); ++a1)
    for (int a2 = 0; a2 < B.np(); ++a2) {
      const unsigned J1 = A.row_masks()[a1], J2 = B.row_masks()[a2];
      const int sj = merge_sign(J1, J2);
      if (sj == 0) continue;
      const int apos = mask_pos(g.n(), out.p(), J1 | J2);
      for (int b1 = 0; b1 < A.nq(); ++b1)
        for (int b2 = 0; b2 < B.nq(); ++b2) {
          const unsigned K1 = A.col_masks()[b1], K2 = B.col_masks()[b2];
          const int sk = merge_sign(K1, K2);
          if (sk == 0) continue;
          const double s = cross * sj * sk;
          const cplx* ca = A.comp(a1, b1);
          const cplx* cb = B.comp(a2, b2);
          cplx* co = out.comp(apos, mask_pos(g.n(), out.q(), K1 | K2));
          for (std::uint64_t i = 0; i < g.nodes(); ++i)
            co[i] += s * ca[i] * cb[i];
        }
    }
  return out;
}

// ---- spectral derivatives ----

namespace detail {

// multiply the spectrum F in place by the d/dz_j (ybar=+1: d/dzbar_j)
// multiplier; Nyquist bins along either real axis of z_j are zeroed
inline void apply_dz_multiplier(const PeriodicGrid& g, int j, int ybar,
                                cplx* F) {
  const int N = g.N();
  const double pi = std::numbers::pi;
  const std::uint64_t sx = g.stride(2 * j), sy = g.stride(2 * j + 1);
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    const int kx = static_cast<int>((i / sx) % N);
    const int ky = static_cast<int>((i / sy) % N);
    if (is_nyquist(kx, N) || is_nyquist(ky, N)) {
      F[i] = 0.0;
      continue;
    }
    const double mx = fourier_mode(kx, N);
    const double my = fourier_mode(ky, N);
    // i pi (mx -+ i my) = +- pi my + i pi mx  (upper sign: d/dz)
    F[i] *= cplx(-ybar * pi * my, pi * mx);
  }
}

} // namespace detail

inline ScalarField partial_z(Fft& fft, const ScalarField& u, int j) {
  check_same_grid(fft.grid(), u.grid, "partial_z");
  ScalarField out(u.grid);
  fft.forward(u.v.data(), out.v.data());
  detail::apply_dz_multiplier(u.grid, j, -1, out.v.data());
  fft.inverse(out.v.data(), out.v.data());
  return out;
}

inline ScalarField partial_zbar(Fft& fft, const ScalarField& u, int j) {
  check_same_grid(fft.grid(), u.grid, "partial_zbar");
  ScalarField out(u.grid);
  fft.forward(u.v.data(), out.v.data());
  detail::apply_dz_multiplier(u.grid, j, +1, out.v.data());
  fft.inverse(out.v.data(), out.v.data());
  return out;
}

// del: (p,q) -> (p+1,q)
inline FormField del(Fft& fft, const FormField& A) {
  const PeriodicGrid& g = A.grid();
  check_same_grid(fft.grid(), g, "del");
  FormField out(g, A.p() + 1, A.q());
  std::vector<cplx> spec(g.nodes()), tmp(g.nodes());
  for (int a = 0; a < A.np(); ++a) {
    const unsigned J = A.row_masks()[a];
    for (int b = 0; b < A.nq(); ++b) {
      fft.forward(A.comp(a, b), spec.data());
      for (int j = 0; j < g.n(); ++j) {
        const int s = merge_sign(1u << j, J);
        if (s == 0) continue;
        tmp = spec;
        detail::apply_dz_multiplier(g, j, -1, tmp.data());
        fft.inverse(tmp.data(), tmp.data());
        cplx* dst = out.comp(mask_pos(g.n(), A.p() + 1, J | (1u << j)), b);
        for (std::uint64_t i = 0; i < g.nodes(); ++i)
          dst[i] += static_cast<double>(s) * tmp[i];
      }
    }
  }
  return out;
}

// dbar: (p,q) -> (p,q+1)
inline FormField dbar(Fft& fft, const FormField& A) {
  const PeriodicGrid& g = A.grid();
  check_same_grid(fft.grid(), g, "dbar");
  FormField out(g, A.p(), A.q() + 1);
  const double pass_dz = (A.p() % 2 == 0) ? 1.0 : -1.0;
  std::vector<cplx> spec(g.nodes()), tmp(g.nodes());
  for (int b = 0; b < A.nq(); ++b) {
    const unsigned K = A.col_masks()[b];
    for (int a = 0; a < A.np(); ++a) {
      fft.forward(A.comp(a, b), spec.data());
      for (int j = 0; j < g.n(); ++j) {
        const int s = merge_sign(1u << j, K);
        if (s == 0) continue;
        tmp = spec;
        detail::apply_dz_multiplier(g, j, +1, tmp.data());
        fft.inverse(tmp.data(), tmp.data());
        cplx* dst = out.comp(a, mask_pos(g.n(), A.q() + 1, K | (1u << j)));
        const double sign = pass_dz * s;
        for (std::uint64_t i = 0; i < g.nodes(); ++i) dst[i] += sign * tmp[i];
      }
    }
  }
  return out;
}

// i del dbar, the hermitian second-order composite (equals d d^c with
// d^c = (i/2)(dbar - del))
inline FormField ddc(Fft& fft, const FormField& A) {
  return scale(del(fft, dbar(fft, A)), cplx(0.0, 1.0));
}

// ---- integration ----

// dz^{1..n} wedge dzbar^{1..n} = mfac(n) * dx1 dy1 ... dxn dyn
inline cplx measure_factor(int n) {
  switch (n) {
    case 1: return cplx(0.0, -2.0);
    case 2: return cplx(4.0, 0.0);
    case 3: return cplx(0.0, -8.0);
  }
  throw InvalidInputs("measure_factor: n must be 1..3");
}

// integral of an (n,n)-form over the unit-period torus
inline cplx integrate_top(const FormField& A) {
  const int n = A.grid().n();
  if (A.p() != n || A.q() != n)
    throw NotTopForm("integrate_top: got bidegree (" + std::to_string(A.p()) +
                     "," + std::to_string(A.q()) + ") on n=" + std::to_string(n));
  const cplx* c = A.comp(0, 0);
  cplx s = 0.0;
  for (std::uint64_t i = 0; i < A.nodes(); ++i) s += c[i];
  return s / static_cast<double>(A.nodes()) * measure_factor(n);
}

// integral of an (n,n)-form that must be real; the imaginary part is checked
// against tol relative to the magnitude
inline double integrate_real_top(const FormField& A, double tol = 1e-9) {
  const cplx val = integrate_top(A);
  const double mag = std::max(std::abs(val), 1.0);
  if (std::abs(val.imag()) > tol * mag)
    throw NonRealTopForm("integrate_real_top: imaginary part " +
                         std::to_string(val.imag()) + " exceeds tolerance");
  return val.real();
}

// scalar <-> (0,0)-form bridges
inline FormField as_form(const ScalarField& u) {
  FormField f(u.grid, 0, 0);
  cplx* c = f.comp(0, 0);
  for (std::uint64_t i = 0; i < u.size(); ++i) c[i] = u.v[i];
  return f;
}

inline ScalarField comp0_scalar(const FormField& A) {
  ScalarField u(A.grid());
  const cplx* c = A.comp(0, 0);
  for (std::uint64_t i = 0; i < u.size(); ++i) u.v[i] = c[i];
  return u;
}

// node-wise ratio of the single components of two top-degree forms, the
// discrete version of dividing by a volume form
inline ScalarField top_ratio(const FormField& A, const FormField& B) {
  check_same_grid(A.grid(), B.grid(), "top_ratio");
  const int n = A.grid().n();
  if (A.p() != n || A.q() != n || B.p() != n || B.q() != n)
    throw NotTopForm("top_ratio: both forms must be top degree");
  ScalarField out(A.grid());
  const cplx* a = A.comp(0, 0);
  const cplx* b = B.comp(0, 0);
  for (std::uint64_t i = 0; i < out.size(); ++i) {
    if (std::abs(b[i]) < 1e-300)
      throw PositivityViolation("top_ratio: denominator vanishes at a node");
    out.v[i] = a[i] / b[i];
  }
  return out;
}

// ---- small field helpers ----

inline cplx mean(const ScalarField& u) {
  cplx s = 0.0;
  for (const auto& x : u.v) s += x;
  return s / static_cast<double>(u.v.size());
}

inline double max_abs(const ScalarField& u) {
  double m = 0.0;
  for (const auto& x : u.v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.grid, b.grid, "max_abs_diff");
  double m = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

inline double form_max_abs(const FormField& A) {
  double m = 0.0;
  for (const auto& x : A.raw()) m = std::max(m, std::abs(x));
  return m;
}

inline double form_max_abs_diff(const FormField& A, const FormField& B) {
  check_same_grid(A.grid(), B.grid(), "form_max_abs_diff");
  if (A.p() != B.p() || A.q() != B.q())
    throw DegreeOverflow("form_max_abs_diff: bidegree mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < A.raw().size(); ++i)
    m = std::max(m, std::abs(A.raw()[i] - B.raw()[i]));
  return m;
}

} // namespace glab
