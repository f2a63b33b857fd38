#pragma once

#include <complex>
#include <vector>

namespace esi {

using cplx = std::complex<double>;

// 2D complex-to-complex FFT on an n x n grid, row-major. Forward is
// unnormalized; inverse divides by n^2. Plans are created once per size
// under a lock (FFTW planning is not thread-safe) and shared.
class Fft2 {
 public:
  explicit Fft2(int n);
  int n() const { return n_; }
  void forward(std::vector<cplx>& buf) const;
  void inverse(std::vector<cplx>& buf) const;

 private:
  int n_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Signed integer mode index for row/column i of an n-point DFT.
inline int fft_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace esi
