#include "esi/helmholtz.hpp"

#include <cmath>
#include <vector>

#include "esi/fft.hpp"

namespace esi {

HelmholtzParts decompose(const VectorField2& w, const GridSpec& grid,
                         Exec ex) {
  const int n = grid.n_x;
  require(w.x.n_rows == n && w.x.n_cols == n && w.y.n_rows == n &&
              w.y.n_cols == n,
          ErrorCode::DimMismatch, "field dims do not match the grid");
  for (double v : w.x.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite field");
  for (double v : w.y.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite field");

  Fft2 fft(n);
  std::vector<cplx> wx(w.x.data.begin(), w.x.data.end());
  std::vector<cplx> wy(w.y.data.begin(), w.y.data.end());
  fft.forward(wx);
  fft.forward(wy);

  const double n2 = static_cast<double>(n) * n;
  HelmholtzParts parts;
  parts.mean_x = wx[0].real() / n2;
  parts.mean_y = wy[0].real() / n2;

  std::vector<cplx> lx(wx.size()), ly(wx.size());
  std::vector<cplx> tx(wx.size()), ty(wx.size());
  std::vector<cplx> phi(wx.size()), psi(wx.size());
  const double k_unit = 2.0 * M_PI / grid.beta;
  par_for(ex, n, [&](std::int64_t iy) {
    const double ky = k_unit * fft_mode(static_cast<int>(iy), n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = k_unit * fft_mode(ix, n);
      const double k2 = kx * kx + ky * ky;
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      if (k2 == 0.0) {
        lx[idx] = ly[idx] = tx[idx] = ty[idx] = 0.0;
        phi[idx] = psi[idx] = 0.0;
        continue;
      }
      const double inv_k2 = 1.0 / k2;
      const cplx along = (kx * wx[idx] + ky * wy[idx]) * inv_k2;
      lx[idx] = kx * along;
      ly[idx] = ky * along;
      tx[idx] = wx[idx] - lx[idx];
      ty[idx] = wy[idx] - ly[idx];
      const cplx minus_i(0.0, -1.0);
      phi[idx] = minus_i * along;
      psi[idx] = minus_i * (kx * wy[idx] - ky * wx[idx]) * inv_k2;
    }
  });
  fft.inverse(lx);
  fft.inverse(ly);
  fft.inverse(tx);
  fft.inverse(ty);
  fft.inverse(phi);
  fft.inverse(psi);

  parts.grad_phi = VectorField2(n, n);
  parts.curl_psi = VectorField2(n, n);
  parts.phi = ScalarField(n, n);
  parts.psi = ScalarField(n, n);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    parts.grad_phi.x.data[i] = lx[i].real();
    parts.grad_phi.y.data[i] = ly[i].real();
    parts.curl_psi.x.data[i] = tx[i].real();
    parts.curl_psi.y.data[i] = ty[i].real();
    parts.phi.data[i] = phi[i].real();
    parts.psi.data[i] = psi[i].real();
  }
  return parts;
}

VectorField2 weighted_recombine(const HelmholtzParts& parts, double c_p,
                                double c_s) {
  const int rows = parts.grad_phi.x.n_rows;
  const int cols = parts.grad_phi.x.n_cols;
  require(parts.curl_psi.x.n_rows == rows && parts.curl_psi.x.n_cols == cols,
          ErrorCode::DimMismatch, "part dims disagree");
  VectorField2 out(rows, cols);
  for (std::size_t i = 0; i < out.x.data.size(); ++i) {
    out.x.data[i] =
        c_p * parts.grad_phi.x.data[i] + c_s * parts.curl_psi.x.data[i];
    out.y.data[i] =
        c_p * parts.grad_phi.y.data[i] + c_s * parts.curl_psi.y.data[i];
  }
  return out;
}

}  // namespace esi
