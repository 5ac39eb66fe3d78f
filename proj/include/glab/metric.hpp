#pragma once

// Hermitian metric fields on the torus and their construction from compact
// specs.  A metric is the node-wise hermitian matrix g_{j kbar}; its (1,1)
// form is omega = sum i g_{j kbar} dz^j dzbar^k.  Built metrics carry the
// equivalence range of eigenvalues against the flat metric, which feeds the
// constant bookkeeping later.
//
// Three spec kinds:
//   flat          g = identity
//   conformal     g = e^phi * identity, phi a real trig polynomial
//   perturbation  g = identity + h, h hermitian with trig-polynomial entries
//
// Positivity is certified analytically for flat/conformal; perturbation
// specs are scanned node-wise (plus a refined half-step lattice when that is
// affordable) and the resulting eigenvalue range is marked non-certified.

#include <algorithm>
#include <cmath>
#include <vector>

#include "glab/calculus.hpp"
#include "glab/eigen_small.hpp"
#include "glab/grid.hpp"
#include "glab/trig.hpp"

namespace glab {

struct MetricEquivalence {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  bool certified = true;
};

enum class MetricKind { flat, conformal, perturbation };

struct MetricSpec {
  MetricKind kind = MetricKind::flat;
  TrigPoly phi;  // conformal exponent
  // perturbation entries for j <= k; h[j][k] = re + i im, diagonal im unused
  TrigPoly pert_re[3][3];
  TrigPoly pert_im[3][3];

  static MetricSpec make_flat() { return {}; }
  static MetricSpec make_conformal(TrigPoly p) {
    MetricSpec s;
    s.kind = MetricKind::conformal;
    s.phi = std::move(p);
    return s;
  }
};

class HermitianMetricField {
public:
  HermitianMetricField(const PeriodicGrid& g, std::vector<ScalarField> entries,
                       MetricEquivalence eq)
      : grid_(g), g_(std::move(entries)), equiv_(eq) {
    if (g_.size() != static_cast<std::size_t>(g.n()) * g.n())
      throw InvalidInputs("metric needs n*n entry fields");
  }

  const PeriodicGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  const ScalarField& entry(int j, int k) const { return g_[j * grid_.n() + k]; }
  const MetricEquivalence& equivalence() const { return equiv_; }

  // omega = i g_{j kbar} dz^j dzbar^k as a raw-coefficient (1,1) form
  FormField omega() const {
    FormField w(grid_, 1, 1);
    const cplx I(0.0, 1.0);
    for (int j = 0; j < n(); ++j)
      for (int k = 0; k < n(); ++k) {
        cplx* dst = w.comp(j, k);
        const ScalarField& src = entry(j, k);
        for (std::uint64_t i = 0; i < grid_.nodes(); ++i) dst[i] = I * src.v[i];
      }
    return w;
  }

private:
  PeriodicGrid grid_;
  std::vector<ScalarField> g_;  // row-major n*n, entry(j,k) = g_{j kbar}
  MetricEquivalence equiv_;
};

namespace detail {

// node-wise eigenvalue scan of identity+h on an n-dim lattice with M points
// per axis; returns the (min,max) over all nodes, throws on loss of
// positivity
inline void scan_perturbation(const MetricSpec& spec, int n, int M,
                              double& lo, double& hi) {
  const int axes = 2 * n;
  std::uint64_t count = 1;
  for (int a = 0; a < axes; ++a) count *= static_cast<std::uint64_t>(M);
  double xy[6];
  cplx A[9];
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t r = i;
    for (int a = axes - 1; a >= 0; --a) {
      xy[a] = static_cast<double>(r % M) / M;
      r /= M;
    }
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        cplx v(spec.pert_re[j][k].eval(xy, axes),
               j == k ? 0.0 : spec.pert_im[j][k].eval(xy, axes));
        if (j == k) v += 1.0;
        A[j * n + k] = v;
        A[k * n + j] = std::conj(v);
      }
    EigRange r2 = hermitian_eig_range(A, n);
    lo = std::min(lo, r2.min);
    hi = std::max(hi, r2.max);
    if (r2.min <= 0.0)
      throw PositivityViolation(
          "metric loses positivity at a scan node (lambda_min = " +
          std::to_string(r2.min) + ")");
  }
}

} // namespace detail

inline HermitianMetricField build_metric(const PeriodicGrid& g,
                                         const MetricSpec& spec) {
  const int n = g.n();
  std::vector<ScalarField> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);

  switch (spec.kind) {
    case MetricKind::flat: {
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          entries.emplace_back(g, j == k ? cplx(1.0) : cplx(0.0));
      return {g, std::move(entries), MetricEquivalence{1.0, 1.0, true}};
    }
    case MetricKind::conformal: {
      spec.phi.require_band_limited(g);
      ScalarField ef = sample_scalar(
          g, [&](const double* xy) { return std::exp(spec.phi.eval(xy, g.axes())); });
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          entries.emplace_back(j == k ? ef : ScalarField(g, cplx(0.0)));
      const double s = spec.phi.sup_bound();
      return {g, std::move(entries),
              MetricEquivalence{std::exp(-s), std::exp(s), true}};
    }
    case MetricKind::perturbation: {
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
          spec.pert_re[j][k].require_band_limited(g);
          spec.pert_im[j][k].require_band_limited(g);
        }
      const int axes = 2 * n;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const int lo = std::min(j, k), hi = std::max(j, k);
          ScalarField f = sample_scalar(g, [&](const double* xy) {
            cplx v(spec.pert_re[lo][hi].eval(xy, axes),
                   lo == hi ? 0.0 : spec.pert_im[lo][hi].eval(xy, axes));
            if (k < j) v = std::conj(v);
            if (j == k) v += 1.0;
            return v;
          });
          entries.push_back(std::move(f));
        }
      double lo = 1e300, hi = -1e300;
      detail::scan_perturbation(spec, n, g.N(), lo, hi);
      // refine the scan lattice when the node count stays reasonable
      std::uint64_t refined = 1;
      for (int a = 0; a < axes; ++a) refined *= static_cast<std::uint64_t>(2 * g.N());
      if (refined <= (1ull << 24))
        detail::scan_perturbation(spec, n, 2 * g.N(), lo, hi);
      return {g, std::move(entries), MetricEquivalence{lo, hi, false}};
    }
  }
  throw InvalidInputs("build_metric: unknown spec kind");
}

// omega^k by repeated wedge (raw coefficients throughout)
inline FormField omega_pow(const HermitianMetricField& m, int k) {
  if (k < 1 || k > m.n())
    throw DegreeOverflow("omega_pow: power " + std::to_string(k) +
                         " out of range for n=" + std::to_string(m.n()));
  FormField w = m.omega();
  FormField acc = w;
  for (int i = 1; i < k; ++i) acc = wedge(acc, w);
  return acc;
}

// total volume: integral of omega^n -- the power is NOT divided by n!, so
// the flat unit-period torus has volume 2^n n! (8 for n=2, 48 for n=3)
inline double metric_volume(const HermitianMetricField& m) {
  return integrate_real_top(omega_pow(m, m.n()));
}

} // namespace glab
