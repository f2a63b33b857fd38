#include "esi/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "esi/common.hpp"

namespace esi {

namespace {

std::mutex plan_mutex;

struct PlanPair {
  fftw_plan fwd;
  fftw_plan bwd;
};

// One shared plan pair per size; executed via fftw_execute_dft on caller
// buffers, which is thread-safe once the plan exists.
PlanPair& plans_for(int n) {
  static std::map<int, PlanPair>* cache = new std::map<int, PlanPair>();
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache->find(n);
  if (it != cache->end()) return it->second;
  std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
  fftw_complex* p = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair pp;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  pp.fwd = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
  pp.bwd = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
  require(pp.fwd != nullptr && pp.bwd != nullptr, ErrorCode::InvalidArgument,
          "FFTW planning failed");
  return cache->emplace(n, pp).first->second;
}

}  // namespace

Fft2::Fft2(int n) : n_(n) {
  require(n > 0, ErrorCode::InvalidArgument, "FFT size must be positive");
  PlanPair& pp = plans_for(n);
  plan_fwd_ = pp.fwd;
  plan_bwd_ = pp.bwd;
}

void Fft2::forward(std::vector<cplx>& buf) const {
  require(buf.size() == static_cast<std::size_t>(n_) * n_,
          ErrorCode::DimMismatch, "FFT buffer size mismatch");
  fftw_complex* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void Fft2::inverse(std::vector<cplx>& buf) const {
  require(buf.size() == static_cast<std::size_t>(n_) * n_,
          ErrorCode::DimMismatch, "FFT buffer size mismatch");
  fftw_complex* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
  const double s = 1.0 / (static_cast<double>(n_) * n_);
  for (cplx& z : buf) z *= s;
}

}  // namespace esi
