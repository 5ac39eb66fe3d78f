#pragma once

// The degenerate-kernel solver.  Three pieces:
//
//  * GauduchonOperator: the map  P u = n ddc(u W)/omega^n  with
//    W = omega^{n-1}, its adjoint in L2(omega^n) (the trace Laplacian
//    u -> n ddc(u) ^ W / omega^n), and the normal composite P*P.  All three
//    run through per-component FFTs: expanding the top coefficient of
//    ddc(u W) gives
//        sum_{a,b} i sigma(a,b) d_{z_a} d_{zbar_b} (u W_ab),
//    where W_ab is the component of W missing dz^a and dzbar^b and
//    sigma(a,b) = (-1)^{n-1} (-1)^{a+b} collects the reordering signs.
//    That is n^2+1 transforms per apply instead of a full exterior-calculus
//    sweep; the generic route is kept as apply_P_reference for cross-checks.
//
//  * DirichletOperator: A u = -(1/w) sum_b d_{zbar_b}( sum_a S_ab d_{z_a} u )
//    with S_ab = n i sigma(a,b) W_ab, the positive form whose Rayleigh
//    quotient over mean-zero fields gives the spectral gap (2n+2 transforms
//    per apply).
//
//  * InverseIterationEngine: smallest eigenpair of either operator with
//    respect to the volume-weighted inner product, by shifted inverse
//    iteration; each shifted solve runs preconditioned CG with a Fourier
//    diagonal preconditioner.  Deflation directions (constants, or an
//    already-found kernel vector) are projected out in the weighted product.
//    Everything is deterministic: fixed initial vectors, no randomness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "glab/calculus.hpp"
#include "glab/metric.hpp"

namespace glab {

// positive volume density per node: top(omega^n) times the measure factor.
// Inner products divide by the node count, so <1,1> equals the volume.
struct VolumeWeights {
  std::vector<double> w;
  double volume = 0.0;
};

inline VolumeWeights make_volume_weights(const FormField& omega_n) {
  const PeriodicGrid& g = omega_n.grid();
  if (omega_n.p() != g.n() || omega_n.q() != g.n())
    throw NotTopForm("make_volume_weights: expected the top power");
  VolumeWeights vw;
  vw.w.resize(g.nodes());
  const cplx mf = measure_factor(g.n());
  const cplx* top = omega_n.comp(0, 0);
  double total = 0.0;
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    const cplx d = top[i] * mf;
    if (std::abs(d.imag()) > 1e-9 * std::max(1.0, std::abs(d)))
      throw NonRealTopForm("volume density has an imaginary part at a node");
    if (d.real() <= 0.0)
      throw PositivityViolation("volume density is not positive at a node");
    vw.w[i] = d.real();
    total += d.real();
  }
  vw.volume = total / static_cast<double>(g.nodes());
  return vw;
}

inline double dot_w(const std::vector<double>& a, const std::vector<double>& b,
                    const VolumeWeights& vw) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * vw.w[i];
  return s / static_cast<double>(a.size());
}

inline double norm_w(const std::vector<double>& a, const VolumeWeights& vw) {
  return std::sqrt(std::max(0.0, dot_w(a, a, vw)));
}

namespace detail {

// dst (or dst +=) coef * multz(a) * multzbar(b) * src, in spectral space;
// Nyquist bins along any involved real axis are zeroed
inline void pair_multiplier(const PeriodicGrid& g, int a, int b, cplx coef,
                            const cplx* src, cplx* dst, bool accumulate) {
  const int N = g.N();
  const double pi = std::numbers::pi;
  const std::uint64_t sxa = g.stride(2 * a), sya = g.stride(2 * a + 1);
  const std::uint64_t sxb = g.stride(2 * b), syb = g.stride(2 * b + 1);
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    const int kxa = static_cast<int>((i / sxa) % N);
    const int kya = static_cast<int>((i / sya) % N);
    const int kxb = static_cast<int>((i / sxb) % N);
    const int kyb = static_cast<int>((i / syb) % N);
    cplx v;
    if (is_nyquist(kxa, N) || is_nyquist(kya, N) || is_nyquist(kxb, N) ||
        is_nyquist(kyb, N)) {
      v = 0.0;
    } else {
      // d/dz:    pi ( my + i mx)
      // d/dzbar: pi (-my + i mx)
      const cplx mza(pi * fourier_mode(kya, N), pi * fourier_mode(kxa, N));
      const cplx mzb(-pi * fourier_mode(kyb, N), pi * fourier_mode(kxb, N));
      v = coef * mza * mzb * src[i];
    }
    if (accumulate) dst[i] += v;
    else dst[i] = v;
  }
}

// single first-order multiplier: dst = i pi (mx -+ i my) src on complex
// axis j (ybar = -1 for d/dz, +1 for d/dzbar)
inline void single_multiplier(const PeriodicGrid& g, int j, int ybar,
                              const cplx* src, cplx* dst) {
  const int N = g.N();
  const double pi = std::numbers::pi;
  const std::uint64_t sx = g.stride(2 * j), sy = g.stride(2 * j + 1);
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    const int kx = static_cast<int>((i / sx) % N);
    const int ky = static_cast<int>((i / sy) % N);
    if (is_nyquist(kx, N) || is_nyquist(ky, N)) {
      dst[i] = 0.0;
      continue;
    }
    dst[i] = cplx(-ybar * pi * fourier_mode(ky, N),
                  pi * fourier_mode(kx, N)) * src[i];
  }
}

inline double sign_pair(int n, int a, int b) {
  int s = ((n - 1) + a + b) % 2;
  return s == 0 ? 1.0 : -1.0;
}

} // namespace detail

class GauduchonOperator {
public:
  explicit GauduchonOperator(const HermitianMetricField& m)
      : grid_(m.grid()), n_(m.n()), fft_(grid_),
        W_(omega_pow(m, m.n() - 1)), wn_(omega_pow(m, m.n())),
        weights_(make_volume_weights(wn_)),
        tmp_(grid_.nodes()), spec_(grid_.nodes()), acc_(grid_.nodes()) {
    const unsigned full = (1u << n_) - 1;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        Wab_[a * n_ + b] = W_.comp_by_mask(full & ~(1u << a), full & ~(1u << b));
    wtop_ = wn_.comp(0, 0);
  }

  const PeriodicGrid& grid() const { return grid_; }
  const VolumeWeights& weights() const { return weights_; }
  const FormField& background_power() const { return W_; }
  const FormField& volume_form() const { return wn_; }

  // y = P x, real node vectors
  void apply_P(const double* x, double* y) {
    std::fill(acc_.begin(), acc_.end(), cplx{});
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        const cplx* Wab = Wab_[a * n_ + b];
        for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
          tmp_[i] = Wab[i] * x[i];
        fft_.forward(tmp_.data(), spec_.data());
        detail::pair_multiplier(grid_, a, b,
                                cplx(0, 1) * detail::sign_pair(n_, a, b),
                                spec_.data(), acc_.data(), true);
      }
    fft_.inverse(acc_.data(), acc_.data());
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
      y[i] = n_ * (acc_[i] / wtop_[i]).real();
  }

  // y = adjoint of P applied to x (the trace Laplacian of x)
  void apply_Pstar(const double* x, double* y) {
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i) tmp_[i] = x[i];
    fft_.forward(tmp_.data(), spec_.data());
    std::fill(acc_.begin(), acc_.end(), cplx{});
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) {
        detail::pair_multiplier(grid_, a, b,
                                cplx(0, 1) * detail::sign_pair(n_, a, b),
                                spec_.data(), tmp_.data(), false);
        fft_.inverse(tmp_.data(), tmp_.data());
        const cplx* Wab = Wab_[a * n_ + b];
        for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
          acc_[i] += Wab[i] * tmp_[i];
      }
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
      y[i] = n_ * (acc_[i] / wtop_[i]).real();
  }

  // y = P*P x; scratch holds the intermediate P x
  void apply_normal(const double* x, double* y) {
    if (scratch_.size() != grid_.nodes()) scratch_.resize(grid_.nodes());
    apply_P(x, scratch_.data());
    apply_Pstar(scratch_.data(), y);
  }

  // reference route through the generic exterior calculus; slow, for checks
  ScalarField apply_P_reference(const ScalarField& u) {
    FormField uw = scalar_times(u, W_);
    FormField top = ddc(fft_, uw);
    return top_ratio(scale(top, cplx(static_cast<double>(n_))), wn_);
  }

private:
  PeriodicGrid grid_;
  int n_;
  Fft fft_;
  FormField W_, wn_;
  VolumeWeights weights_;
  std::vector<cplx> tmp_, spec_, acc_;
  std::vector<double> scratch_;
  const cplx* Wab_[9] = {};
  const cplx* wtop_ = nullptr;
};

class DirichletOperator {
public:
  explicit DirichletOperator(const HermitianMetricField& m)
      : grid_(m.grid()), n_(m.n()), fft_(grid_),
        W_(omega_pow(m, m.n() - 1)), wn_(omega_pow(m, m.n())),
        weights_(make_volume_weights(wn_)),
        spec_(grid_.nodes()), acc_(grid_.nodes()), tmp_(grid_.nodes()) {
    const unsigned full = (1u << n_) - 1;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        Wab_[a * n_ + b] = W_.comp_by_mask(full & ~(1u << a), full & ~(1u << b));
    wtop_ = wn_.comp(0, 0);
    for (int a = 0; a < n_; ++a) da_[a].resize(grid_.nodes());
  }

  const PeriodicGrid& grid() const { return grid_; }
  const VolumeWeights& weights() const { return weights_; }

  // y = -(1/w) sum_b dbar_b( sum_a S_ab dz_a x ),  S_ab = n i sigma(a,b) W_ab
  void apply(const double* x, double* y) {
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i) tmp_[i] = x[i];
    fft_.forward(tmp_.data(), spec_.data());
    for (int a = 0; a < n_; ++a) {
      detail::single_multiplier(grid_, a, -1, spec_.data(), da_[a].data());
      fft_.inverse(da_[a].data(), da_[a].data());
    }
    std::fill(acc_.begin(), acc_.end(), cplx{});
    for (int b = 0; b < n_; ++b) {
      std::fill(tmp_.begin(), tmp_.end(), cplx{});
      for (int a = 0; a < n_; ++a) {
        const cplx coef = cplx(0, 1) * detail::sign_pair(n_, a, b) *
                          static_cast<double>(n_);
        const cplx* Wab = Wab_[a * n_ + b];
        for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
          tmp_[i] += coef * Wab[i] * da_[a][i];
      }
      fft_.forward(tmp_.data(), tmp_.data());
      detail::single_multiplier(grid_, b, +1, tmp_.data(), tmp_.data());
      for (std::uint64_t i = 0; i < grid_.nodes(); ++i) acc_[i] += tmp_[i];
    }
    fft_.inverse(acc_.data(), acc_.data());
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
      y[i] = -(acc_[i] / wtop_[i]).real();
  }

  // gradient energy <A x, x>_w = integral of the positive form density
  double energy(const std::vector<double>& x) {
    std::vector<double> ax(x.size());
    apply(x.data(), ax.data());
    return dot_w(ax, x, weights_);
  }

private:
  PeriodicGrid grid_;
  int n_;
  Fft fft_;
  FormField W_, wn_;
  VolumeWeights weights_;
  std::vector<cplx> spec_, acc_, tmp_;
  std::vector<cplx> da_[3];
  const cplx* Wab_[9] = {};
  const cplx* wtop_ = nullptr;
};

// ---- eigen engine ----

struct EigenSolveOptions {
  double tol = 1e-10;        // threshold on the residual functional
  int max_outer = 40;
  int max_inner = 6000;
  double inner_rtol = 1e-12;
  double shift_factor = 1e-6;  // initial shift, relative to the probe quotient
  bool chase_rayleigh = false; // move the shift under the current eigenvalue
};

struct EigenSolveResult {
  std::vector<double> x;
  double lambda = 0.0;
  double residual = 1e300;       // value of the residual functional at exit
  double generic_residual = 1e300;  // ||A x - lambda x||_w
  int outer = 0;
  long long inner = 0;
};

class InverseIterationEngine {
public:
  using ApplyFn = std::function<void(const double*, double*)>;
  // residual functional: takes (lambda, ||Ax - lambda x||_w)
  using ResidualFn = std::function<double(double, double)>;

  InverseIterationEngine(const PeriodicGrid& g, ApplyFn apply,
                         const VolumeWeights& vw, int prec_order)
      : grid_(g), apply_(std::move(apply)), vw_(vw), order_(prec_order),
        fft_(g), msq_(g.nodes()), cbuf_(g.nodes()) {
    // pi^2 |m|^2 per spectral node, shared by every preconditioner apply
    const int N = g.N();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (std::uint64_t i = 0; i < g.nodes(); ++i) {
      double s = 0.0;
      std::uint64_t r = i;
      for (int a = g.axes() - 1; a >= 0; --a) {
        const double m = fourier_mode(static_cast<int>(r % N), N);
        s += m * m;
        r /= N;
      }
      msq_[i] = pi2 * s;
    }
  }

  // weighted Rayleigh quotient of the fixed probe mode cos(2 pi x1)
  double probe_quotient() {
    std::vector<double> v(grid_.nodes()), av(grid_.nodes());
    for (std::uint64_t i = 0; i < grid_.nodes(); ++i)
      v[i] = std::cos(2.0 * std::numbers::pi * grid_.coord(i, 0));
    const double nn = norm_w(v, vw_);
    for (auto& t : v) t /= nn;
    apply_(v.data(), av.data());
    return dot_w(av, v, vw_);
  }

  EigenSolveResult solve(const std::vector<std::vector<double>>& deflate,
                         std::vector<double> x0, const EigenSolveOptions& opt,
                         ResidualFn residual_fn = {}) {
    const std::uint64_t nn = grid_.nodes();
    lambda_hat_ = probe_quotient();
    if (!(lambda_hat_ > 0.0))
      throw KernelDegenerate("probe quotient is not positive; operator scale "
                             "cannot be calibrated");
    // prec symbol sbar (pi^2 |m|^2)^order matches lambda_hat at |m| = 1
    sbar_ = lambda_hat_;
    for (int k = 0; k < order_; ++k)
      sbar_ /= (std::numbers::pi * std::numbers::pi);
    // normalized copies of the deflation directions
    defl_.clear();
    for (const auto& d : deflate) {
      std::vector<double> dn = d;
      const double dm = norm_w(dn, vw_);
      if (dm <= 0.0) throw InvalidInputs("zero deflation direction");
      for (auto& t : dn) t /= dm;
      defl_.push_back(std::move(dn));
    }

    project(x0);
    double x0n = norm_w(x0, vw_);
    if (x0n <= 1e-14)
      throw InvalidInputs("initial vector vanishes after deflation");
    for (auto& t : x0) t /= x0n;

    EigenSolveResult res;
    res.x = std::move(x0);
    std::vector<double> rhs(nn), y(nn), ax(nn);
    double shift = opt.shift_factor * lambda_hat_;
    double lambda_prev = -1.0;

    for (int outer = 1; outer <= opt.max_outer; ++outer) {
      for (std::uint64_t i = 0; i < nn; ++i)
        rhs[i] = res.x[i] * vw_.w[i] / static_cast<double>(nn);
      res.inner += pcg(rhs, y, shift, opt);
      project(y);
      const double yn = norm_w(y, vw_);
      if (yn <= 1e-300)
        throw KernelDegenerate("inverse iteration collapsed to zero");
      for (auto& t : y) t /= yn;
      res.x = y;

      apply_(res.x.data(), ax.data());
      res.lambda = dot_w(ax, res.x, vw_);
      double gr = 0.0;
      for (std::uint64_t i = 0; i < nn; ++i) {
        const double d = ax[i] - res.lambda * res.x[i];
        gr += d * d * vw_.w[i];
      }
      res.generic_residual = std::sqrt(gr / static_cast<double>(nn));
      res.residual = residual_fn ? residual_fn(res.lambda, res.generic_residual)
                                 : res.generic_residual;
      res.outer = outer;
      if (res.residual <= opt.tol) return res;

      // once the eigenvalue has settled, chase it with the shift to turn
      // linear convergence into a couple of sharp steps
      if (opt.chase_rayleigh && lambda_prev > 0.0 &&
          std::abs(res.lambda - lambda_prev) < 0.25 * res.lambda)
        shift = -0.9 * res.lambda;
      lambda_prev = res.lambda;
    }
    throw NoConvergence("inverse iteration: residual " +
                        std::to_string(res.residual) + " above tolerance " +
                        std::to_string(opt.tol) + " after " +
                        std::to_string(opt.max_outer) + " outer iterations");
  }

private:
  void project(std::vector<double>& v) {
    for (const auto& d : defl_) {
      const double c = dot_w(v, d, vw_);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * d[i];
    }
  }

  // z = K r: Fourier diagonal approximation of the shifted, weighted
  // operator.  Floored to stay positive when the shift goes negative.
  void precondition(const std::vector<double>& r, std::vector<double>& z,
                    double shift) {
    const std::uint64_t nn = grid_.nodes();
    const double c0 = vw_.volume / static_cast<double>(nn);
    const double floor = 0.02 * lambda_hat_;
    for (std::uint64_t i = 0; i < nn; ++i) cbuf_[i] = r[i];
    fft_.forward(cbuf_.data(), cbuf_.data());
    for (std::uint64_t i = 0; i < nn; ++i) {
      double sym = sbar_;
      for (int k = 0; k < order_; ++k) sym *= msq_[i];
      cbuf_[i] /= c0 * std::max(sym + shift, floor);
    }
    fft_.inverse(cbuf_.data(), cbuf_.data());
    for (std::uint64_t i = 0; i < nn; ++i) z[i] = cbuf_[i].real();
  }

  // preconditioned CG on  D (A + shift) y = rhs  in the plain product,
  // D = diag(w/nodes); returns the iteration count
  int pcg(const std::vector<double>& rhs, std::vector<double>& y, double shift,
          const EigenSolveOptions& opt) {
    const std::uint64_t nn = grid_.nodes();
    auto apply_S = [&](const std::vector<double>& v, std::vector<double>& out) {
      apply_(v.data(), out.data());
      for (std::uint64_t i = 0; i < nn; ++i)
        out[i] = (out[i] + shift * v[i]) * vw_.w[i] / static_cast<double>(nn);
    };
    auto pdot = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (std::uint64_t i = 0; i < nn; ++i) s += a[i] * b[i];
      return s;
    };

    y.assign(nn, 0.0);
    std::vector<double> r = rhs, z(nn), p(nn), q(nn);
    const double b0 = std::sqrt(pdot(r, r));
    if (b0 == 0.0) return 0;
    precondition(r, z, shift);
    project(z);
    p = z;
    double rz = pdot(r, z);
    for (int it = 1; it <= opt.max_inner; ++it) {
      apply_S(p, q);
      const double pq = pdot(p, q);
      if (!(pq > 0.0))
        throw NoConvergence("cg: operator lost positivity (p^T S p = " +
                            std::to_string(pq) + ")");
      const double alpha = rz / pq;
      for (std::uint64_t i = 0; i < nn; ++i) {
        y[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      if (std::sqrt(pdot(r, r)) <= opt.inner_rtol * b0) return it;
      precondition(r, z, shift);
      project(z);
      const double rz2 = pdot(r, z);
      const double beta = rz2 / rz;
      rz = rz2;
      for (std::uint64_t i = 0; i < nn; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergence("cg: no convergence within " +
                        std::to_string(opt.max_inner) + " iterations");
  }

  PeriodicGrid grid_;
  ApplyFn apply_;
  const VolumeWeights& vw_;
  int order_;
  Fft fft_;
  std::vector<double> msq_;
  std::vector<cplx> cbuf_;
  std::vector<std::vector<double>> defl_;
  double lambda_hat_ = 0.0, sbar_ = 0.0;
};

// ---- high-level solves ----

struct GauduchonOptions {
  double tol = -1.0;  // residual ||P rho|| / ||rho||; <0 picks 1e-10 (n=2) or 1e-8 (n=3)
  int max_outer = 40;
  int max_inner = 6000;
  double inner_rtol = 1e-12;
  double shift_factor = 1e-6;
  bool estimate_gap = true;
  double gap_rtol = 1e-3;
  int gap_max_outer = 30;
};

struct GauduchonSolveResult {
  ScalarField rho;        // kernel vector, normalized to inf rho = 1
  double lambda = 0.0;    // Rayleigh quotient of the normal operator
  double residual_l2 = 0; // ||P rho||_{L2(omega^n)} / ||rho||
  double sigma2 = 0.0;    // second eigenvalue of the normal operator
  bool gap_certified = false;
  double sup_rho = 1.0;   // inf rho == 1 by normalization
  double volume = 0.0;
  int outer_iters = 0;
  long long inner_iters = 0;
  int gap_outer_iters = 0;
};

inline GauduchonSolveResult solve_gauduchon(const HermitianMetricField& m,
                                            GauduchonOptions opt = {}) {
  GauduchonOperator op(m);
  const PeriodicGrid& g = op.grid();
  if (opt.tol < 0.0) opt.tol = (g.n() == 2) ? 1e-10 : 1e-8;

  InverseIterationEngine engine(
      g, [&op](const double* x, double* y) { op.apply_normal(x, y); },
      op.weights(), 2);

  EigenSolveOptions eo;
  eo.tol = opt.tol;
  eo.max_outer = opt.max_outer;
  eo.max_inner = opt.max_inner;
  eo.inner_rtol = opt.inner_rtol;
  eo.shift_factor = opt.shift_factor;

  // residual ||P x||_w of a w-normalized x is sqrt(lambda)
  auto rfn = [](double lambda, double) {
    return std::sqrt(std::max(lambda, 0.0));
  };

  std::vector<double> ones(g.nodes(), 1.0);
  EigenSolveResult er = engine.solve({}, ones, eo, rfn);

  GauduchonSolveResult out;
  out.lambda = er.lambda;
  out.residual_l2 = er.residual;
  out.outer_iters = er.outer;
  out.inner_iters = er.inner;
  out.volume = op.weights().volume;

  // orient by the mean, then demand a sign: the kernel of a healthy problem
  // is one-dimensional and strictly positive after orientation
  double mean = 0.0;
  for (double v : er.x) mean += v;
  if (mean < 0.0)
    for (auto& v : er.x) v = -v;
  double lo = er.x[0], hi = er.x[0];
  for (double v : er.x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo <= 0.0)
    throw KernelDegenerate("kernel vector changes sign (min " +
                           std::to_string(lo) + ", max " + std::to_string(hi) +
                           "); the degenerate direction is not a density");

  out.rho = ScalarField(g);
  for (std::uint64_t i = 0; i < g.nodes(); ++i) out.rho.v[i] = er.x[i] / lo;
  out.sup_rho = hi / lo;

  if (opt.estimate_gap) {
    EigenSolveOptions go;
    go.tol = opt.gap_rtol;
    go.max_outer = opt.gap_max_outer;
    go.max_inner = opt.max_inner;
    go.inner_rtol = 1e-10;
    go.shift_factor = opt.shift_factor;
    go.chase_rayleigh = true;
    auto rel = [](double lambda, double gr) {
      return gr / std::max(lambda, 1e-300);
    };
    std::vector<double> probe(g.nodes());
    for (std::uint64_t i = 0; i < g.nodes(); ++i)
      probe[i] = std::cos(2.0 * std::numbers::pi * g.coord(i, 0));
    EigenSolveResult gap = engine.solve({er.x}, probe, go, rel);
    out.sigma2 = gap.lambda;
    out.gap_outer_iters = gap.outer;
    const double sigma1_eff = std::max(out.lambda, 1e-15 * out.sigma2);
    out.gap_certified = out.sigma2 >= 100.0 * sigma1_eff;
  }
  return out;
}

struct PoincareOptions {
  double rel_tol = 1e-9;  // ||A x - lambda x||_w / lambda
  int max_outer = 60;
  int max_inner = 6000;
  double inner_rtol = 1e-12;
  double shift_factor = 1e-6;
};

struct PoincareResult {
  double lambda1 = 0.0;  // spectral gap of the gradient form
  double c_p = 0.0;      // 1 / lambda1
  double rel_residual = 0.0;
  int outer_iters = 0;
  long long inner_iters = 0;
};

inline PoincareResult solve_poincare(const HermitianMetricField& m,
                                     PoincareOptions opt = {}) {
  DirichletOperator op(m);
  const PeriodicGrid& g = op.grid();
  InverseIterationEngine engine(
      g, [&op](const double* x, double* y) { op.apply(x, y); },
      op.weights(), 1);

  EigenSolveOptions eo;
  eo.tol = opt.rel_tol;
  eo.max_outer = opt.max_outer;
  eo.max_inner = opt.max_inner;
  eo.inner_rtol = opt.inner_rtol;
  eo.shift_factor = opt.shift_factor;
  eo.chase_rayleigh = true;
  auto rel = [](double lambda, double gr) {
    return gr / std::max(lambda, 1e-300);
  };

  std::vector<double> ones(g.nodes(), 1.0);
  std::vector<double> probe(g.nodes());
  for (std::uint64_t i = 0; i < g.nodes(); ++i)
    probe[i] = std::cos(2.0 * std::numbers::pi * g.coord(i, 0));
  EigenSolveResult er = engine.solve({ones}, probe, eo, rel);

  if (!(er.lambda > 0.0))
    throw KernelDegenerate("gradient form has no spectral gap");
  PoincareResult out;
  out.lambda1 = er.lambda;
  out.c_p = 1.0 / er.lambda;
  out.rel_residual = er.residual;
  out.outer_iters = er.outer;
  out.inner_iters = er.inner;
  return out;
}

} // namespace glab
