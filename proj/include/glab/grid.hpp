#pragma once

// Discretized torus underlying C^n / Z^{2n}: coordinates, storage order, and
// the form-component tables everything else is built on.
//
// Conventions, fixed once here and never re-derived elsewhere:
//  * n complex dimensions (2 or 3), N nodes per real axis, unit periods.
//  * real axes ordered (x1, y1, x2, y2, ...); z_j = x_j + i y_j.
//  * fields stored in C order, last axis fastest.
//  * a (p,q)-form is the raw coefficient array of
//        sum_{J,K} c_{J,K} dz^J wedge dzbar^K
//    over strictly increasing multi-indices J (|J| = p) and K (|K| = q),
//    encoded as bitmasks over {0,..,n-1}.  Any factors of i live inside the
//    coefficients; e.g. a hermitian metric enters as c_{jk} = i * g_{j kbar}.
//  * component-major layout: component (a,b) occupies
//        data[(a*nq + b)*nodes + i].

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "glab/errors.hpp"

namespace glab {

using cplx = std::complex<double>;

inline int binom(int n, int p) {
  static constexpr int table[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  if (n < 0 || n > 3) throw DegreeOverflow("binom: n out of range");
  if (p < 0 || p > n) return 0;
  return table[n][p];
}

// strictly increasing multi-indices of length p over {0,..,n-1}, as bitmasks
// in increasing numeric order
inline std::vector<unsigned> index_masks(int n, int p) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == p) out.push_back(m);
  return out;
}

inline int mask_pos(int n, int p, unsigned mask) {
  int pos = 0;
  for (unsigned m = 0; m < mask; ++m)
    if (std::popcount(m) == p) ++pos;
  if (std::popcount(mask) != p || mask >= (1u << n))
    throw DegreeOverflow("mask_pos: mask " + std::to_string(mask) +
                         " is not a degree-" + std::to_string(p) + " index");
  return pos;
}

// sign of dz^A wedge dz^B = merge_sign(A,B) dz^{A|B}; zero if A and B share
// an index.  Parity of the number of pairs (a in A, b in B) with a > b.
inline int merge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    unsigned low = rest & ~(rest - 1);
    swaps += std::popcount(a & ~((low << 1) - 1));
  }
  return (swaps & 1) ? -1 : 1;
}

class PeriodicGrid {
public:
  PeriodicGrid(int n, int N) : n_(n), N_(N) {
    if (n != 2 && n != 3)
      throw InvalidInputs("complex dimension must be 2 or 3, got " +
                          std::to_string(n));
    if (N < 4 || (N & (N - 1)) != 0)
      throw InvalidInputs("nodes per axis must be a power of two >= 4, got " +
                          std::to_string(N));
    std::uint64_t s = 1;
    for (int a = 2 * n - 1; a >= 0; --a) {
      stride_[a] = s;
      s *= static_cast<std::uint64_t>(N);
    }
    nodes_ = s;
  }

  int n() const { return n_; }
  int N() const { return N_; }
  int axes() const { return 2 * n_; }
  std::uint64_t nodes() const { return nodes_; }
  double h() const { return 1.0 / N_; }

  std::uint64_t stride(int axis) const { return stride_[axis]; }
  int axis_index(std::uint64_t i, int axis) const {
    return static_cast<int>((i / stride_[axis]) % N_);
  }
  double coord(std::uint64_t i, int axis) const {
    return axis_index(i, axis) * h();
  }
  // all 2n real coordinates of node i, in axis order
  void coords(std::uint64_t i, double* out) const {
    for (int a = axes() - 1; a >= 0; --a) {
      out[a] = static_cast<double>(i % N_) * h();
      i /= N_;
    }
  }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.n_ == b.n_ && a.N_ == b.N_;
  }

private:
  int n_, N_;
  std::uint64_t nodes_;
  std::array<std::uint64_t, 6> stride_{};
};

inline void check_same_grid(const PeriodicGrid& a, const PeriodicGrid& b,
                            const char* where) {
  if (!(a == b))
    throw GridMismatch(std::string(where) + ": grids differ (n=" +
                       std::to_string(a.n()) + ",N=" + std::to_string(a.N()) +
                       " vs n=" + std::to_string(b.n()) +
                       ",N=" + std::to_string(b.N()) + ")");
}

struct ScalarField {
  PeriodicGrid grid;
  std::vector<cplx> v;

  explicit ScalarField(const PeriodicGrid& g) : grid(g), v(g.nodes()) {}
  ScalarField(const PeriodicGrid& g, cplx fill) : grid(g), v(g.nodes(), fill) {}

  std::uint64_t size() const { return grid.nodes(); }
  cplx& operator[](std::uint64_t i) { return v[i]; }
  const cplx& operator[](std::uint64_t i) const { return v[i]; }
};

// sample f(xy) at every node; f takes a pointer to the 2n real coordinates
template <class F>
ScalarField sample_scalar(const PeriodicGrid& g, F&& f) {
  ScalarField out(g);
  double xy[6];
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    g.coords(i, xy);
    out.v[i] = f(xy);
  }
  return out;
}

class FormField {
public:
  FormField(const PeriodicGrid& g, int p, int q)
      : grid_(g), p_(p), q_(q) {
    if (p < 0 || q < 0 || p > g.n() || q > g.n())
      throw DegreeOverflow("form degree (" + std::to_string(p) + "," +
                           std::to_string(q) + ") out of range for n=" +
                           std::to_string(g.n()));
    np_ = binom(g.n(), p);
    nq_ = binom(g.n(), q);
    row_masks_ = index_masks(g.n(), p);
    col_masks_ = index_masks(g.n(), q);
    data_.assign(static_cast<std::size_t>(np_) * nq_ * g.nodes(), cplx{});
  }

  const PeriodicGrid& grid() const { return grid_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int np() const { return np_; }
  int nq() const { return nq_; }
  const std::vector<unsigned>& row_masks() const { return row_masks_; }
  const std::vector<unsigned>& col_masks() const { return col_masks_; }
  std::uint64_t nodes() const { return grid_.nodes(); }

  cplx* comp(int a, int b) {
    return data_.data() + (static_cast<std::size_t>(a) * nq_ + b) * grid_.nodes();
  }
  const cplx* comp(int a, int b) const {
    return data_.data() + (static_cast<std::size_t>(a) * nq_ + b) * grid_.nodes();
  }
  cplx* comp_by_mask(unsigned jmask, unsigned kmask) {
    return comp(mask_pos(grid_.n(), p_, jmask), mask_pos(grid_.n(), q_, kmask));
  }
  const cplx* comp_by_mask(unsigned jmask, unsigned kmask) const {
    return comp(mask_pos(grid_.n(), p_, jmask), mask_pos(grid_.n(), q_, kmask));
  }

  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

private:
  PeriodicGrid grid_;
  int p_, q_, np_, nq_;
  std::vector<unsigned> row_masks_, col_masks_;
  std::vector<cplx> data_;
};

// max node-wise deviation from the reality condition
//   conj(c_{J,K}) * (-1)^k = c_{K,J}
// for a (k,k)-form; a genuinely real form returns ~0
inline double reality_defect(const FormField& f) {
  if (f.p() != f.q())
    throw InvalidInputs("reality_defect: form must have equal bidegree, got (" +
                        std::to_string(f.p()) + "," + std::to_string(f.q()) + ")");
  const double sign = (f.p() % 2 == 0) ? 1.0 : -1.0;
  double worst = 0.0;
  for (int a = 0; a < f.np(); ++a)
    for (int b = 0; b < f.nq(); ++b) {
      const cplx* ab = f.comp(a, b);
      const cplx* ba = f.comp(b, a);
      for (std::uint64_t i = 0; i < f.nodes(); ++i) {
        double d = std::abs(std::conj(ab[i]) * sign - ba[i]);
        if (d > worst) worst = d;
      }
    }
  return worst;
}

} // namespace glab
