#pragma once

// FFTW wrapper bound to one grid.  Plans are created once (FFTW_ESTIMATE, so
// planning is deterministic and never touches the input) and executed through
// internal aligned buffers, which keeps new-array alignment rules out of the
// callers.  Forward is unnormalized; inverse divides by the node count, so
// inverse(forward(x)) == x.
//
// Spectral index convention: bin k along an axis carries integer mode k for
// k < N/2 and k - N for k >= N/2; the Nyquist bin k == N/2 is ambiguous in
// sign and is zeroed by every odd-order multiplier.

#include <fftw3.h>

#include "glab/grid.hpp"

namespace glab {

inline int fourier_mode(int k, int N) { return (k < N / 2) ? k : k - N; }
inline bool is_nyquist(int k, int N) { return k == N / 2; }

class Fft {
public:
  explicit Fft(const PeriodicGrid& g) : grid_(g) {
    const std::uint64_t m = g.nodes();
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
    if (!in_ || !out_) throw IoError("Fft: allocation failed");
    int dims[6];
    for (int a = 0; a < g.axes(); ++a) dims[a] = g.N();
    fwd_ = fftw_plan_dft(g.axes(), dims, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft(g.axes(), dims, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw IoError("Fft: planning failed");
  }

  ~Fft() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (inv_) fftw_destroy_plan(inv_);
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  const PeriodicGrid& grid() const { return grid_; }

  // dst = unnormalized DFT of src; src == dst is allowed
  void forward(const cplx* src, cplx* dst) {
    run(fwd_, src, dst, 1.0);
  }

  // dst = inverse DFT of src, normalized by 1/nodes
  void inverse(const cplx* src, cplx* dst) {
    run(inv_, src, dst, 1.0 / static_cast<double>(grid_.nodes()));
  }

private:
  void run(fftw_plan plan, const cplx* src, cplx* dst, double scale) {
    const std::uint64_t m = grid_.nodes();
    auto* ib = reinterpret_cast<cplx*>(in_);
    auto* ob = reinterpret_cast<cplx*>(out_);
    for (std::uint64_t i = 0; i < m; ++i) ib[i] = src[i];
    fftw_execute(plan);
    if (scale == 1.0)
      for (std::uint64_t i = 0; i < m; ++i) dst[i] = ob[i];
    else
      for (std::uint64_t i = 0; i < m; ++i) dst[i] = ob[i] * scale;
  }

  PeriodicGrid grid_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

} // namespace glab
