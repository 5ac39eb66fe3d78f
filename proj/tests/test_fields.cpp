// grid layout, multi-index tables, trig sampling, small eigensolvers, and
// metric construction

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "glab/eigen_small.hpp"
#include "glab/grid.hpp"
#include "glab/metric.hpp"
#include "glab/trig.hpp"

using namespace glab;
using Catch::Approx;

TEST_CASE("grid validates its parameters") {
  REQUIRE_NOTHROW(PeriodicGrid(2, 4));
  REQUIRE_NOTHROW(PeriodicGrid(3, 8));
  REQUIRE_THROWS_AS(PeriodicGrid(1, 8), InvalidInputs);
  REQUIRE_THROWS_AS(PeriodicGrid(4, 8), InvalidInputs);
  REQUIRE_THROWS_AS(PeriodicGrid(2, 6), InvalidInputs);
  REQUIRE_THROWS_AS(PeriodicGrid(2, 2), InvalidInputs);
  REQUIRE_THROWS_AS(PeriodicGrid(2, 0), InvalidInputs);
}

TEST_CASE("grid storage is C order with the last axis fastest") {
  PeriodicGrid g(2, 4);
  REQUIRE(g.nodes() == 256);
  REQUIRE(g.stride(3) == 1);
  REQUIRE(g.stride(2) == 4);
  REQUIRE(g.stride(1) == 16);
  REQUIRE(g.stride(0) == 64);

  // node with x1-index 1, y1-index 2, x2-index 3, y2-index 0
  std::uint64_t i = 1 * 64 + 2 * 16 + 3 * 4 + 0;
  REQUIRE(g.axis_index(i, 0) == 1);
  REQUIRE(g.axis_index(i, 1) == 2);
  REQUIRE(g.axis_index(i, 2) == 3);
  REQUIRE(g.axis_index(i, 3) == 0);
  REQUIRE(g.coord(i, 2) == Approx(0.75));

  double xy[4];
  g.coords(i, xy);
  REQUIRE(xy[0] == Approx(0.25));
  REQUIRE(xy[1] == Approx(0.50));
  REQUIRE(xy[2] == Approx(0.75));
  REQUIRE(xy[3] == Approx(0.00));
}

TEST_CASE("multi-index masks enumerate in increasing numeric order") {
  REQUIRE(index_masks(2, 0) == std::vector<unsigned>{0});
  REQUIRE(index_masks(2, 1) == std::vector<unsigned>{1, 2});
  REQUIRE(index_masks(2, 2) == std::vector<unsigned>{3});
  REQUIRE(index_masks(3, 2) == std::vector<unsigned>{3, 5, 6});

  for (int n : {2, 3})
    for (int p = 0; p <= n; ++p) {
      auto masks = index_masks(n, p);
      REQUIRE(static_cast<int>(masks.size()) == binom(n, p));
      for (std::size_t a = 0; a < masks.size(); ++a)
        REQUIRE(mask_pos(n, p, masks[a]) == static_cast<int>(a));
    }
}

TEST_CASE("merge_sign counts inversions between disjoint index sets") {
  REQUIRE(merge_sign(0b01, 0b10) == 1);    // dz0 dz1 already ordered
  REQUIRE(merge_sign(0b10, 0b01) == -1);   // dz1 dz0 needs one swap
  REQUIRE(merge_sign(0b101, 0b010) == -1); // {0,2} before {1}: pair (2,1)
  REQUIRE(merge_sign(0b01, 0b01) == 0);    // overlap kills the product
  REQUIRE(merge_sign(0, 0b111) == 1);
  REQUIRE(merge_sign(0b111, 0) == 1);

  // antisymmetry of the wedge: sign(A,B) * sign(B,A) = (-1)^{|A||B|}
  for (unsigned a = 0; a < 8; ++a)
    for (unsigned b = 0; b < 8; ++b) {
      if (a & b) continue;
      int lhs = merge_sign(a, b) * merge_sign(b, a);
      int rhs = ((std::popcount(a) * std::popcount(b)) % 2 == 0) ? 1 : -1;
      REQUIRE(lhs == rhs);
    }
}

TEST_CASE("form fields validate bidegree and expose disjoint components") {
  PeriodicGrid g(2, 4);
  FormField f(g, 1, 1);
  REQUIRE(f.np() == 2);
  REQUIRE(f.nq() == 2);
  REQUIRE_THROWS_AS(FormField(g, 3, 0), DegreeOverflow);
  REQUIRE_THROWS_AS(FormField(g, 0, 3), DegreeOverflow);

  f.comp(0, 1)[5] = cplx(1.0, 2.0);
  REQUIRE(f.comp(1, 0)[5] == cplx(0.0, 0.0));
  REQUIRE(f.comp_by_mask(0b01, 0b10)[5] == cplx(1.0, 2.0));
}

TEST_CASE("reality defect distinguishes real (k,k) forms") {
  PeriodicGrid g(2, 4);

  // i * identity coefficients: the flat hermitian form, real
  FormField w(g, 1, 1);
  for (int j = 0; j < 2; ++j)
    for (std::uint64_t i = 0; i < g.nodes(); ++i)
      w.comp(j, j)[i] = cplx(0.0, 1.0);
  REQUIRE(reality_defect(w) == Approx(0.0).margin(1e-15));

  // hermitian off-diagonal pair stays real
  for (std::uint64_t i = 0; i < g.nodes(); ++i) {
    w.comp(0, 1)[i] = cplx(0.25, 0.5);
    w.comp(1, 0)[i] = -std::conj(cplx(0.25, 0.5));
  }
  REQUIRE(reality_defect(w) == Approx(0.0).margin(1e-15));

  // breaking the pairing is detected
  for (std::uint64_t i = 0; i < g.nodes(); ++i) w.comp(1, 0)[i] = 0.0;
  REQUIRE(reality_defect(w) == Approx(std::abs(cplx(0.25, 0.5))).epsilon(1e-12));

  FormField odd(g, 1, 0);
  REQUIRE_THROWS_AS(reality_defect(odd), InvalidInputs);
}

TEST_CASE("trig polynomials evaluate and bound themselves") {
  PeriodicGrid g(2, 8);
  TrigPoly p;
  p.add_cos(0.5, {1, 0, 0, 0}).add_sin(-0.25, {0, 0, 2, 1});

  ScalarField s = p.sample(g);
  double xy[4];
  for (std::uint64_t i = 0; i < g.nodes(); i += 37) {
    g.coords(i, xy);
    double want = 0.5 * std::cos(2 * std::numbers::pi * xy[0]) -
                  0.25 * std::sin(2 * std::numbers::pi * (2 * xy[2] + xy[3]));
    REQUIRE(s.v[i].real() == Approx(want).margin(1e-14));
    REQUIRE(s.v[i].imag() == 0.0);
  }

  REQUIRE(p.sup_bound() == Approx(0.75));
  REQUIRE(p.max_mode() == 2);
  REQUIRE_NOTHROW(p.require_band_limited(g));       // 2 <= 8/4
  PeriodicGrid coarse(2, 4);
  REQUIRE_THROWS_AS(p.require_band_limited(coarse), InvalidInputs);  // 2 > 4/4
}

TEST_CASE("small hermitian eigenvalue ranges") {
  SECTION("2x2 closed form") {
    cplx A[4] = {cplx(2, 0), cplx(1, -0.5), cplx(1, 0.5), cplx(-1, 0)};
    EigRange r = hermitian_eig_range(A, 2);
    REQUIRE(r.min == Approx(-1.3708286933869709).epsilon(1e-13));
    REQUIRE(r.max == Approx(2.3708286933869704).epsilon(1e-13));
  }
  SECTION("3x3 diagonal") {
    cplx A[9] = {cplx(1), 0, 0, 0, cplx(2), 0, 0, 0, cplx(3)};
    EigRange r = hermitian_eig_range(A, 3);
    REQUIRE(r.min == Approx(1.0).epsilon(1e-12));
    REQUIRE(r.max == Approx(3.0).epsilon(1e-12));
  }
  SECTION("3x3 full") {
    cplx A[9] = {cplx(3, 0),      cplx(0.5, 0.25), cplx(0, -0.75),
                 cplx(0.5, -0.25), cplx(2, 0),     cplx(1, 1),
                 cplx(0, 0.75),   cplx(1, -1),     cplx(1, 0)};
    EigRange r = hermitian_eig_range(A, 3);
    REQUIRE(r.min == Approx(-0.262339913813587).epsilon(1e-11));
    REQUIRE(r.max == Approx(3.321862342109890).epsilon(1e-11));
  }
  SECTION("pencil reduces to plain eigenvalues for identity reference") {
    cplx A[4] = {cplx(2, 0), cplx(1, -0.5), cplx(1, 0.5), cplx(-1, 0)};
    cplx B[4] = {cplx(1), 0, 0, cplx(1)};
    EigRange r = pencil_eig_range(A, B, 2);
    REQUIRE(r.min == Approx(-1.3708286933869709).epsilon(1e-13));
    REQUIRE(r.max == Approx(2.3708286933869704).epsilon(1e-13));
  }
  SECTION("2x2 pencil") {
    cplx A[4] = {cplx(1, 0), cplx(2, 1), cplx(2, -1), cplx(5, 0)};
    cplx B[4] = {cplx(2, 0), cplx(0, 0.5), cplx(0, -0.5), cplx(1, 0)};
    EigRange r = pencil_eig_range(A, B, 2);
    REQUIRE(r.min == Approx(0.0).margin(1e-13));
    REQUIRE(r.max == Approx(5.714285714285714).epsilon(1e-12));
  }
  SECTION("3x3 pencil") {
    cplx A[9] = {cplx(2, 0),  cplx(0.3, 0), cplx(0, 0.1),
                 cplx(0.3, 0), cplx(1.5, 0), cplx(0.2, -0.1),
                 cplx(0, -0.1), cplx(0.2, 0.1), cplx(3, 0)};
    cplx B[9] = {cplx(1, 0), cplx(0, 0.2), cplx(0, 0),
                 cplx(0, -0.2), cplx(2, 0), cplx(0.1, 0),
                 cplx(0, 0), cplx(0.1, 0), cplx(1.5, 0)};
    EigRange r = pencil_eig_range(A, B, 3);
    REQUIRE(r.min == Approx(0.698907249098889).epsilon(1e-11));
    REQUIRE(r.max == Approx(2.140084277179280).epsilon(1e-11));
  }
  SECTION("non-positive reference is rejected") {
    cplx A[4] = {cplx(1), 0, 0, cplx(1)};
    cplx B[4] = {cplx(-1), 0, 0, cplx(1)};
    REQUIRE_THROWS_AS(pencil_eig_range(A, B, 2), PositivityViolation);
  }
}

TEST_CASE("metric construction") {
  PeriodicGrid g(2, 8);

  SECTION("flat") {
    auto m = build_metric(g, MetricSpec::make_flat());
    REQUIRE(m.entry(0, 0).v[17] == cplx(1.0));
    REQUIRE(m.entry(0, 1).v[17] == cplx(0.0));
    REQUIRE(m.equivalence().lambda_min == 1.0);
    REQUIRE(m.equivalence().lambda_max == 1.0);
    REQUIRE(m.equivalence().certified);
  }

  SECTION("conformal scales the identity and certifies its range") {
    TrigPoly phi;
    phi.add_cos(0.1, {1, 0, 0, 0});
    auto m = build_metric(g, MetricSpec::make_conformal(phi));
    double xy[4];
    for (std::uint64_t i = 0; i < g.nodes(); i += 101) {
      g.coords(i, xy);
      double want = std::exp(0.1 * std::cos(2 * std::numbers::pi * xy[0]));
      REQUIRE(m.entry(0, 0).v[i].real() == Approx(want).margin(1e-14));
      REQUIRE(m.entry(1, 1).v[i].real() == Approx(want).margin(1e-14));
      REQUIRE(m.entry(0, 1).v[i] == cplx(0.0));
    }
    REQUIRE(m.equivalence().lambda_min == Approx(std::exp(-0.1)));
    REQUIRE(m.equivalence().lambda_max == Approx(std::exp(0.1)));
    REQUIRE(m.equivalence().certified);
  }

  SECTION("perturbation builds hermitian entries and scans eigenvalues") {
    MetricSpec s;
    s.kind = MetricKind::perturbation;
    s.pert_re[0][1].add_cos(0.2, {0, 0, 1, 0});
    s.pert_im[0][1].add_sin(0.1, {1, 0, 0, 0});
    auto m = build_metric(g, s);
    for (std::uint64_t i = 0; i < g.nodes(); i += 53) {
      REQUIRE(m.entry(1, 0).v[i] == std::conj(m.entry(0, 1).v[i]));
      REQUIRE(m.entry(0, 0).v[i] == cplx(1.0));
    }
    // |h_{01}| <= 0.3 keeps 1 +- |h| inside [0.7, 1.3]
    REQUIRE(m.equivalence().lambda_min >= 0.7);
    REQUIRE(m.equivalence().lambda_max <= 1.3);
    REQUIRE_FALSE(m.equivalence().certified);
  }

  SECTION("losing positivity throws") {
    MetricSpec s;
    s.kind = MetricKind::perturbation;
    s.pert_re[0][1].add_cos(1.5, {0, 0, 1, 0});
    REQUIRE_THROWS_AS(build_metric(g, s), PositivityViolation);
  }
}
