#include "esi/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "esi/fft.hpp"
#include "json.hpp"

namespace esi {

namespace {

constexpr double kTimeAlignTol = 1e-9;

// Quadratic absorption profile, strong enough to damp a crossing wave by
// roughly four decades over the layer depth.
double sigma_max(const GridSpec& g) {
  const double depth = g.pml_width * g.h_x;
  return 1.5 * g.c_p() * std::log(1e4) / depth;
}

constexpr double kRampPower = 2.0;

int step_of_time(double t, const GridSpec& g) {
  const int k = static_cast<int>(std::lround(t / g.h_t));
  require(std::abs(k * g.h_t - t) <= kTimeAlignTol && k >= 1 && k <= g.n_t,
          ErrorCode::InvalidArgument,
          "sample time does not align with a solver step");
  return k;
}

std::string sidecar_path(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) +
           ".detectors.json";
  return csv_path + ".detectors.json";
}

}  // namespace

DetectorArray uniform_detectors(int m, int n, const GridSpec& grid) {
  require(m >= 1 && n >= 1, ErrorCode::InvalidArgument,
          "need at least one detector and one sample instant");
  require(grid.n_t % n == 0, ErrorCode::NotDivisor,
          "sample count must divide the step count");
  DetectorArray d;
  for (int i = 0; i < m; ++i) {
    const double angle = 2.0 * M_PI * i / m;
    d.pos_x.push_back(std::cos(angle));
    d.pos_y.push_back(std::sin(angle));
  }
  const int stride = grid.n_t / n;
  for (int k = 1; k <= n; ++k) d.times.push_back(k * stride * grid.h_t);
  return d;
}

void validate_detectors(const DetectorArray& d, const GridSpec& grid) {
  require(d.count() >= 1 && d.sample_count() >= 1,
          ErrorCode::EmptyMeasurements, "empty detector array");
  require(d.pos_x.size() == d.pos_y.size(), ErrorCode::DimMismatch,
          "detector coordinate arrays disagree");
  for (int i = 0; i < d.count(); ++i) {
    const double r = std::hypot(d.pos_x[i], d.pos_y[i]);
    require(std::abs(r - 1.0) <= grid.h_x / 2.0, ErrorCode::InvalidArgument,
            "detector not on the unit circle");
    for (int j = 0; j < i; ++j)
      require(d.pos_x[i] != d.pos_x[j] || d.pos_y[i] != d.pos_y[j],
              ErrorCode::InvalidArgument, "duplicate detector position");
  }
  double prev = 0.0;
  for (double t : d.times) {
    require(t > prev, ErrorCode::InvalidArgument,
            "sample times must be strictly increasing");
    require(t <= grid.t_max + kTimeAlignTol, ErrorCode::InvalidArgument,
            "sample time past t_max");
    step_of_time(t, grid);
    prev = t;
  }
}

Eigen::VectorXd MeasurementSet::vector() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(traces.size()));
  for (std::size_t i = 0; i < traces.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = traces[i];
  return out;
}

BilinearStencil bilinear_stencil(double x, double y, const GridSpec& g) {
  const double half = g.beta / 2.0;
  const double gx = (x + half) / g.h_x;
  const double gy = (y + half) / g.h_x;
  const int ix0 = static_cast<int>(std::floor(gx));
  const int iy0 = static_cast<int>(std::floor(gy));
  const double fx = gx - ix0;
  const double fy = gy - iy0;
  auto wrap = [&](int i) { return ((i % g.n_x) + g.n_x) % g.n_x; };
  BilinearStencil s;
  s.ix[0] = wrap(ix0);
  s.ix[1] = wrap(ix0 + 1);
  s.ix[2] = wrap(ix0);
  s.ix[3] = wrap(ix0 + 1);
  s.iy[0] = wrap(iy0);
  s.iy[1] = wrap(iy0);
  s.iy[2] = wrap(iy0 + 1);
  s.iy[3] = wrap(iy0 + 1);
  s.w[0] = (1.0 - fx) * (1.0 - fy);
  s.w[1] = fx * (1.0 - fy);
  s.w[2] = (1.0 - fx) * fy;
  s.w[3] = fx * fy;
  return s;
}

VectorField2 apply_lame_operator(const VectorField2& u, const GridSpec& grid,
                                 Exec ex) {
  const int n = grid.n_x;
  require(u.x.n_rows == n && u.x.n_cols == n && u.y.n_rows == n &&
              u.y.n_cols == n,
          ErrorCode::DimMismatch, "field dims do not match the grid");
  Fft2 fft(n);
  std::vector<cplx> ux(u.x.data.begin(), u.x.data.end());
  std::vector<cplx> uy(u.y.data.begin(), u.y.data.end());
  fft.forward(ux);
  fft.forward(uy);
  const double mu = grid.mu;
  const double lm = grid.lambda + grid.mu;
  const double k_unit = 2.0 * M_PI / grid.beta;
  par_for(ex, n, [&](std::int64_t iy) {
    const double ky = k_unit * fft_mode(static_cast<int>(iy), n);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = k_unit * fft_mode(ix, n);
      const double k2 = kx * kx + ky * ky;
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      const cplx div = kx * ux[idx] + ky * uy[idx];
      const cplx ax = -mu * k2 * ux[idx] - lm * kx * div;
      const cplx ay = -mu * k2 * uy[idx] - lm * ky * div;
      ux[idx] = ax;
      uy[idx] = ay;
    }
  });
  fft.inverse(ux);
  fft.inverse(uy);
  VectorField2 out(n, n);
  for (std::size_t i = 0; i < ux.size(); ++i) {
    out.x.data[i] = ux[i].real();
    out.y.data[i] = uy[i].real();
  }
  return out;
}

ElasticStepper::ElasticStepper(const GridSpec& grid, Exec ex, bool transposed)
    : grid_(grid), ex_(ex), transposed_(transposed) {
  const int n = grid.n_x;
  freq_.resize(n);
  const double k_unit = 2.0 * M_PI / grid.beta;
  for (int i = 0; i < n; ++i) freq_[i] = k_unit * fft_mode(i, n);
  if (grid.pml_width > 0) {
    const double depth = grid.pml_width * grid.h_x;
    const double inner = grid.beta / 2.0 - depth;
    const double smax = sigma_max(grid);
    damp_half_.resize(static_cast<std::size_t>(n) * n);
    auto ramp = [&](double c) {
      const double d = (std::abs(c) - inner) / depth;
      return d > 0.0 ? std::pow(d, kRampPower) : 0.0;
    };
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double sigma = smax * (ramp(grid.x(ix)) + ramp(grid.x(iy)));
        damp_half_[static_cast<std::size_t>(iy) * n + ix] =
            std::exp(-0.5 * sigma * grid.h_t);
      }
  }
}

void ElasticStepper::damp(ElasticState& s) const {
  if (damp_half_.empty()) return;
  par_for(ex_, static_cast<std::int64_t>(damp_half_.size()),
          [&](std::int64_t i) {
            const double d = damp_half_[static_cast<std::size_t>(i)];
            s.u.x.data[i] *= d;
            s.u.y.data[i] *= d;
            s.v.x.data[i] *= d;
            s.v.y.data[i] *= d;
          });
}

void ElasticStepper::step(ElasticState& s) const {
  const int n = grid_.n_x;
  damp(s);
  Fft2 fft(n);
  std::vector<cplx> ux(s.u.x.data.begin(), s.u.x.data.end());
  std::vector<cplx> uy(s.u.y.data.begin(), s.u.y.data.end());
  std::vector<cplx> vx(s.v.x.data.begin(), s.v.x.data.end());
  std::vector<cplx> vy(s.v.y.data.begin(), s.v.y.data.end());
  fft.forward(ux);
  fft.forward(uy);
  fft.forward(vx);
  fft.forward(vy);
  const double h = grid_.h_t;
  const double cp = grid_.c_p();
  const double cs = grid_.c_s();
  const bool tr = transposed_;
  par_for(ex_, n, [&](std::int64_t iy) {
    const double ky = freq_[static_cast<std::size_t>(iy)];
    for (int ix = 0; ix < n; ++ix) {
      const double kx = freq_[static_cast<std::size_t>(ix)];
      const double k2 = kx * kx + ky * ky;
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      if (k2 == 0.0) {
        if (tr) {
          vx[idx] += h * ux[idx];
          vy[idx] += h * uy[idx];
        } else {
          ux[idx] += h * vx[idx];
          uy[idx] += h * vy[idx];
        }
        continue;
      }
      const double inv_k2 = 1.0 / k2;
      auto rotate = [tr](cplx& u, cplx& v, double c, double sn, double w) {
        const double a = tr ? -w * sn : sn / w;
        const double b = tr ? sn / w : -w * sn;
        const cplx nu = c * u + a * v;
        const cplx nv = b * u + c * v;
        u = nu;
        v = nv;
      };
      // A lone Nyquist index has no conjugate partner, so reality admits
      // only the cross-free generator; each component is then its own
      // oscillator.
      const bool nyq_x = n % 2 == 0 && ix == n / 2;
      const bool nyq_y = n % 2 == 0 && static_cast<int>(iy) == n / 2;
      if (nyq_x != nyq_y) {
        const double dps = cp * cp - cs * cs;
        const double wx = std::sqrt(cs * cs * k2 + dps * kx * kx);
        const double wy = std::sqrt(cs * cs * k2 + dps * ky * ky);
        rotate(ux[idx], vx[idx], std::cos(wx * h), std::sin(wx * h), wx);
        rotate(uy[idx], vy[idx], std::cos(wy * h), std::sin(wy * h), wy);
        continue;
      }
      const cplx du = (kx * ux[idx] + ky * uy[idx]) * inv_k2;
      const cplx dv = (kx * vx[idx] + ky * vy[idx]) * inv_k2;
      cplx ulx = kx * du, uly = ky * du;
      cplx vlx = kx * dv, vly = ky * dv;
      cplx utx = ux[idx] - ulx, uty = uy[idx] - uly;
      cplx vtx = vx[idx] - vlx, vty = vy[idx] - vly;
      const double kn = std::sqrt(k2);
      const double wp = cp * kn, ws = cs * kn;
      const double cp_ = std::cos(wp * h), sp_ = std::sin(wp * h);
      const double ct_ = std::cos(ws * h), st_ = std::sin(ws * h);
      rotate(ulx, vlx, cp_, sp_, wp);
      rotate(uly, vly, cp_, sp_, wp);
      rotate(utx, vtx, ct_, st_, ws);
      rotate(uty, vty, ct_, st_, ws);
      ux[idx] = ulx + utx;
      uy[idx] = uly + uty;
      vx[idx] = vlx + vtx;
      vy[idx] = vly + vty;
    }
  });
  fft.inverse(ux);
  fft.inverse(uy);
  fft.inverse(vx);
  fft.inverse(vy);
  for (std::size_t i = 0; i < ux.size(); ++i) {
    s.u.x.data[i] = ux[i].real();
    s.u.y.data[i] = uy[i].real();
    s.v.x.data[i] = vx[i].real();
    s.v.y.data[i] = vy[i].real();
  }
  damp(s);
  s.t += h;
}

MeasurementSet simulate(const VectorField2& source, const GridSpec& grid,
                        const DetectorArray& detectors, Exec ex) {
  const int n = grid.n_x;
  require(source.x.n_rows == n && source.x.n_cols == n &&
              source.y.n_rows == n && source.y.n_cols == n,
          ErrorCode::DimMismatch, "source dims do not match the grid");
  validate_detectors(detectors, grid);
  const double support_radius = 1.0 - 2.0 * grid.h_x;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      if (std::hypot(grid.x(ix), grid.x(iy)) <= support_radius) continue;
      require(source.x.at(iy, ix) == 0.0 && source.y.at(iy, ix) == 0.0,
              ErrorCode::SupportViolation,
              "source has support outside the interior margin");
    }

  const int m_count = detectors.count();
  const int n_count = detectors.sample_count();
  std::vector<BilinearStencil> stencils;
  std::vector<int> sample_step;
  for (int m = 0; m < m_count; ++m)
    stencils.push_back(
        bilinear_stencil(detectors.pos_x[m], detectors.pos_y[m], grid));
  for (double t : detectors.times) sample_step.push_back(step_of_time(t, grid));

  MeasurementSet out;
  out.detectors = detectors;
  out.traces.assign(static_cast<std::size_t>(2) * n_count * m_count, 0.0);

  ElasticState state;
  state.u = source;
  state.v = VectorField2(n, n);
  ElasticStepper stepper(grid, ex);
  int next_sample = 0;
  for (int k = 1; k <= grid.n_t && next_sample < n_count; ++k) {
    stepper.step(state);
    if (sample_step[static_cast<std::size_t>(next_sample)] != k) continue;
    for (int m = 0; m < m_count; ++m) {
      const BilinearStencil& st = stencils[static_cast<std::size_t>(m)];
      double sx = 0.0, sy = 0.0;
      for (int c = 0; c < 4; ++c) {
        sx += st.w[c] * state.u.x.at(st.iy[c], st.ix[c]);
        sy += st.w[c] * state.u.y.at(st.iy[c], st.ix[c]);
      }
      out.at(0, next_sample, m) = sx;
      out.at(1, next_sample, m) = sy;
    }
    ++next_sample;
  }
  return out;
}

MeasurementSet subsample(const MeasurementSet& m, int keep_detectors,
                         int keep_times) {
  const int mc = m.detectors.count();
  const int nc = m.detectors.sample_count();
  require(keep_detectors >= 1 && mc % keep_detectors == 0,
          ErrorCode::NotDivisor, "kept detector count must divide M");
  require(keep_times >= 1 && nc % keep_times == 0, ErrorCode::NotDivisor,
          "kept sample count must divide N");
  const int dstride = mc / keep_detectors;
  const int tstride = nc / keep_times;
  MeasurementSet out;
  for (int i = 0; i < keep_detectors; ++i) {
    out.detectors.pos_x.push_back(m.detectors.pos_x[i * dstride]);
    out.detectors.pos_y.push_back(m.detectors.pos_y[i * dstride]);
  }
  for (int k = 1; k <= keep_times; ++k)
    out.detectors.times.push_back(m.detectors.times[k * tstride - 1]);
  out.traces.assign(static_cast<std::size_t>(2) * keep_times * keep_detectors,
                    0.0);
  for (int i = 0; i < 2; ++i)
    for (int n = 0; n < keep_times; ++n)
      for (int d = 0; d < keep_detectors; ++d)
        out.at(i, n, d) = m.at(i, (n + 1) * tstride - 1, d * dstride);
  return out;
}

double elastic_energy(const ElasticState& s, const GridSpec& grid, Exec ex) {
  const int n = grid.n_x;
  Fft2 fft(n);
  std::vector<cplx> ux(s.u.x.data.begin(), s.u.x.data.end());
  std::vector<cplx> uy(s.u.y.data.begin(), s.u.y.data.end());
  std::vector<cplx> vx(s.v.x.data.begin(), s.v.x.data.end());
  std::vector<cplx> vy(s.v.y.data.begin(), s.v.y.data.end());
  fft.forward(ux);
  fft.forward(uy);
  fft.forward(vx);
  fft.forward(vy);
  const double mu = grid.mu;
  const double lm = grid.lambda + grid.mu;
  const double k_unit = 2.0 * M_PI / grid.beta;
  const double scale =
      grid.h_x * grid.h_x / (2.0 * std::pow(static_cast<double>(n), 4));
  const double total = par_sum(
      ex, static_cast<std::int64_t>(ux.size()), [&](std::int64_t i) {
        const int ix = static_cast<int>(i % n);
        const int iy = static_cast<int>(i / n);
        const double kx = k_unit * fft_mode(ix, n);
        const double ky = k_unit * fft_mode(iy, n);
        const double k2 = kx * kx + ky * ky;
        const std::size_t idx = static_cast<std::size_t>(i);
        const double kinetic = std::norm(vx[idx]) + std::norm(vy[idx]);
        const double div_u = std::norm(kx * ux[idx] + ky * uy[idx]);
        const double grad_u = k2 * (std::norm(ux[idx]) + std::norm(uy[idx]));
        return kinetic + mu * grad_u + lm * div_u;
      });
  return scale * total;
}

void save_measurements(const MeasurementSet& m, const std::string& csv_path) {
  const std::size_t expect = static_cast<std::size_t>(2) *
                             m.detectors.sample_count() * m.detectors.count();
  require(m.traces.size() == expect, ErrorCode::DimMismatch,
          "trace buffer does not match the detector geometry");
  std::ofstream out(csv_path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + csv_path);
  out << "component,time_index,detector_index,value\n";
  char buf[64];
  for (int i = 0; i < 2; ++i)
    for (int n = 0; n < m.detectors.sample_count(); ++n)
      for (int d = 0; d < m.detectors.count(); ++d) {
        std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, n, d));
        out << i << ',' << n << ',' << d << ',' << buf << '\n';
      }
  require(out.good(), ErrorCode::IoError, "write failed: " + csv_path);

  nlohmann::json side;
  side["positions_x"] = m.detectors.pos_x;
  side["positions_y"] = m.detectors.pos_y;
  side["times"] = m.detectors.times;
  std::ofstream sc(sidecar_path(csv_path), std::ios::binary);
  require(sc.good(), ErrorCode::IoError, "cannot open detector sidecar");
  sc << side.dump(2) << "\n";
  require(sc.good(), ErrorCode::IoError, "sidecar write failed");
}

MeasurementSet load_measurements(const std::string& csv_path) {
  std::ifstream sc(sidecar_path(csv_path), std::ios::binary);
  require(sc.good(), ErrorCode::IoError, "cannot open detector sidecar");
  nlohmann::json side;
  try {
    sc >> side;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad detector sidecar: ") + e.what());
  }
  MeasurementSet m;
  m.detectors.pos_x = side.at("positions_x").get<std::vector<double>>();
  m.detectors.pos_y = side.at("positions_y").get<std::vector<double>>();
  m.detectors.times = side.at("times").get<std::vector<double>>();
  const int mc = m.detectors.count();
  const int nc = m.detectors.sample_count();
  require(static_cast<int>(m.detectors.pos_y.size()) == mc,
          ErrorCode::IoError, "sidecar coordinate arrays disagree");
  m.traces.assign(static_cast<std::size_t>(2) * nc * mc, 0.0);

  std::ifstream in(csv_path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + csv_path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) &&
              line == "component,time_index,detector_index,value",
          ErrorCode::IoError, "bad measurement CSV header");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int i = 0, n = 0, d = 0;
    double value = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    ss >> i >> c1 >> n >> c2 >> d >> c3 >> value;
    require(!ss.fail() && c1 == ',' && c2 == ',' && c3 == ',',
            ErrorCode::IoError, "bad measurement CSV row");
    require(i >= 0 && i < 2 && n >= 0 && n < nc && d >= 0 && d < mc,
            ErrorCode::IoError, "measurement CSV index out of range");
    require(std::isfinite(value), ErrorCode::NonFiniteData,
            "non-finite measurement value");
    m.at(i, n, d) = value;
    ++rows;
  }
  require(rows == m.traces.size(), ErrorCode::IoError,
          "measurement CSV row count mismatch");
  return m;
}

}  // namespace esi
