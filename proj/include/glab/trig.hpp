#pragma once

// Real trigonometric polynomials on the torus, used to specify conformal
// factors and metric perturbations.  Terms are amp * cos(2 pi m.x) or
// amp * sin(2 pi m.x) with an integer mode vector m over the 2n real axes.

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "glab/grid.hpp"

namespace glab {

struct TrigTerm {
  double amp = 0.0;
  std::array<int, 6> mode{};  // first 2n entries used
  bool is_sin = false;
};

class TrigPoly {
public:
  TrigPoly() = default;

  TrigPoly& add_cos(double amp, std::array<int, 6> mode) {
    terms_.push_back({amp, mode, false});
    return *this;
  }
  TrigPoly& add_sin(double amp, std::array<int, 6> mode) {
    terms_.push_back({amp, mode, true});
    return *this;
  }

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  TrigPoly scaled(double c) const {
    TrigPoly out = *this;
    for (auto& t : out.terms_) t.amp *= c;
    return out;
  }

  double eval(const double* xy, int axes) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double phase = 0.0;
      for (int a = 0; a < axes; ++a)
        phase += t.mode[a] * xy[a];
      phase *= 2.0 * std::numbers::pi;
      s += t.amp * (t.is_sin ? std::sin(phase) : std::cos(phase));
    }
    return s;
  }

  // certified sup-norm bound: sum of |amplitudes|
  double sup_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.amp);
    return s;
  }

  int max_mode() const {
    int m = 0;
    for (const auto& t : terms_)
      for (int a = 0; a < 6; ++a)
        m = std::max(m, std::abs(t.mode[a]));
    return m;
  }

  // products of two fields double the bandwidth, so inputs are held to N/4
  void require_band_limited(const PeriodicGrid& g) const {
    if (max_mode() > g.N() / 4)
      throw InvalidInputs("trig polynomial mode " + std::to_string(max_mode()) +
                          " exceeds N/4 = " + std::to_string(g.N() / 4) +
                          "; refine the grid");
  }

  ScalarField sample(const PeriodicGrid& g) const {
    const int axes = g.axes();
    return sample_scalar(g, [&](const double* xy) { return eval(xy, axes); });
  }

private:
  std::vector<TrigTerm> terms_;
};

} // namespace glab
