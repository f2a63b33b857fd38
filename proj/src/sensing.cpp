#include "esi/sensing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "esi/green.hpp"
#include "esi/hankel.hpp"
#include "json.hpp"

namespace esi {

SensingMatrix assemble_sensing(const GridSpec& grid,
                               const DetectorArray& detectors, Exec ex) {
  validate_detectors(detectors, grid);
  const int crop = grid.crop_n();
  const int q_count = crop * crop;
  const int m_count = detectors.count();
  const int n_count = detectors.sample_count();
  const std::int64_t rows = 2LL * n_count * m_count;
  const std::int64_t cols = 2LL * q_count;
  require(rows * cols <= (1LL << 26), ErrorCode::TooLarge,
          "sensing matrix exceeds the dense-storage guard");

  const int lo = grid.crop_lo();
  for (int m = 0; m < m_count; ++m)
    for (int q = 0; q < q_count; ++q) {
      const double zx = grid.x(lo + q % crop);
      const double zy = grid.x(lo + q / crop);
      require(std::hypot(detectors.pos_x[m] - zx, detectors.pos_y[m] - zy) >=
                  grid.h_x / 4.0,
              ErrorCode::SingularPoint,
              "a crop pixel coincides with a detector");
    }

  SensingMatrix out;
  out.grid = grid;
  out.detectors = detectors;
  out.entries = Eigen::MatrixXd::Zero(rows, cols);
  const double w_quad = grid.h_x * grid.h_x;
  const int nm = n_count * m_count;
  par_for(ex, static_cast<std::int64_t>(m_count) * q_count,
          [&](std::int64_t pair) {
            const int m = static_cast<int>(pair / q_count);
            const int q = static_cast<int>(pair % q_count);
            const double zx = grid.x(lo + q % crop);
            const double zy = grid.x(lo + q / crop);
            const std::vector<Eigen::Matrix2d> kernel =
                time_kernel(detectors.pos_x[m] - zx, detectors.pos_y[m] - zy,
                            detectors.times, grid);
            for (int n = 0; n < n_count; ++n)
              for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                  out.entries(i * nm + n * m_count + m, j * q_count + q) =
                      w_quad * kernel[static_cast<std::size_t>(n)](i, j);
          });
  return out;
}

Eigen::VectorXd PseudoInverse::apply(const Eigen::VectorXd& g) const {
  require(g.size() == lambda.rows(), ErrorCode::DimMismatch,
          "vector length does not match the row count");
  return lambda.transpose() * factor.solve(g);
}

Eigen::VectorXd PseudoInverse::project(const Eigen::VectorXd& g) const {
  return lambda * apply(g);
}

PseudoInverse right_pseudo_inverse(const SensingMatrix& m, double epsilon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument,
          "ridge parameter must be positive");
  PseudoInverse inv;
  inv.lambda = m.entries;
  inv.epsilon = epsilon;
  Eigen::MatrixXd gram = m.entries * m.entries.transpose();
  gram.diagonal().array() += epsilon;
  inv.factor.compute(gram);
  require(inv.factor.info() == Eigen::Success, ErrorCode::FactorizationFailure,
          "LDLT factorization failed");
  const Eigen::VectorXd probe =
      inv.factor.solve(Eigen::VectorXd::Ones(gram.rows()));
  require(probe.allFinite(), ErrorCode::FactorizationFailure,
          "factorization produced non-finite solves");
  return inv;
}

std::vector<Eigen::VectorXd> null_space_probe(const SensingMatrix& m, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "need k >= 1 probes");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m.entries,
                                     Eigen::ComputeFullV | Eigen::ComputeThinU);
  const Eigen::Index cols = m.entries.cols();
  require(k <= cols, ErrorCode::NullSpaceTooSmall,
          "more probes requested than columns");
  const double spectral_norm =
      svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  std::vector<Eigen::VectorXd> probes;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = svd.matrixV().col(cols - 1 - i);
    require((m.entries * v).norm() <= 1e-8 * spectral_norm,
            ErrorCode::NullSpaceTooSmall,
            "requested probes extend beyond the numerical null space");
    probes.push_back(std::move(v));
  }
  return probes;
}

double annihilation_score(const Eigen::MatrixXd& filters,
                          const std::vector<Eigen::VectorXd>& vectors,
                          int components) {
  require(components >= 1, ErrorCode::InvalidArgument,
          "component count must be positive");
  double score = 0.0;
  for (const Eigen::VectorXd& v : vectors) {
    require(v.size() % components == 0, ErrorCode::DimMismatch,
            "vector length is not a multiple of the component count");
    const Eigen::Index block = v.size() / components;
    require(filters.rows() <= block, ErrorCode::DimMismatch,
            "filter taps longer than a component block");
    double sq = 0.0;
    for (int c = 0; c < components; ++c) {
      const Eigen::VectorXd seg = v.segment(c * block, block);
      for (Eigen::Index l = 0; l < filters.cols(); ++l)
        sq += circ_correlate(seg, filters.col(l)).squaredNorm();
    }
    const double nv = v.norm();
    require(nv > 0.0, ErrorCode::InvalidArgument, "zero probe vector");
    score = std::max(score, std::sqrt(sq) / nv);
  }
  return score;
}

void save_sensing(const SensingMatrix& m, const std::string& path) {
  nlohmann::json header;
  header["grid"] = nlohmann::json::parse(grid_to_json(m.grid));
  header["positions_x"] = m.detectors.pos_x;
  header["positions_y"] = m.detectors.pos_y;
  header["times"] = m.detectors.times;
  header["rows"] = m.entries.rows();
  header["cols"] = m.entries.cols();
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  const std::uint64_t header_len = text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r)
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
      const double v = m.entries(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

SensingMatrix load_sensing(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  require(in.good() && header_len < (1u << 20), ErrorCode::TruncatedFile,
          "bad sensing cache header length");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  require(in.good(), ErrorCode::TruncatedFile, "truncated sensing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad sensing header: ") + e.what());
  }
  SensingMatrix m;
  m.grid = grid_from_json(header.at("grid").dump());
  m.detectors.pos_x = header.at("positions_x").get<std::vector<double>>();
  m.detectors.pos_y = header.at("positions_y").get<std::vector<double>>();
  m.detectors.times = header.at("times").get<std::vector<double>>();
  const Eigen::Index rows = header.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = header.at("cols").get<Eigen::Index>();
  require(rows > 0 && cols > 0 && rows * cols <= (1LL << 26),
          ErrorCode::BadShape, "bad sensing cache shape");
  m.entries.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      require(in.good(), ErrorCode::TruncatedFile, "truncated sensing matrix");
      require(std::isfinite(v), ErrorCode::NonFiniteData,
              "non-finite sensing entry");
      m.entries(r, c) = v;
    }
  return m;
}

}  // namespace esi
