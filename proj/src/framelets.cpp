#include "esi/framelets.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "esi/hankel.hpp"
#include "json.hpp"

namespace esi {

namespace {

void check_basis_dims(const FrameletBasis& b) {
  require(b.phi.rows() == b.phi_dual.rows() &&
              b.phi.cols() == b.phi_dual.cols(),
          ErrorCode::DimMismatch, "phi and phi_dual shapes differ");
  require(b.psi.rows() == b.psi_dual.rows() &&
              b.psi.cols() == b.psi_dual.cols(),
          ErrorCode::DimMismatch, "psi and psi_dual shapes differ");
  require(b.psi.rows() == b.pencil, ErrorCode::DimMismatch,
          "psi row count must equal the pencil size");
  require(b.psi.cols() == b.rank_budget, ErrorCode::DimMismatch,
          "psi column count must equal the rank budget");
  require(b.pencil < b.q(), ErrorCode::BadPencil, "pencil must be < Q");
}

Eigen::MatrixXd correlate_bank(const Eigen::VectorXd& g,
                               const Eigen::MatrixXd& psi) {
  Eigen::MatrixXd out(g.size(), psi.cols());
  for (Eigen::Index l = 0; l < psi.cols(); ++l)
    out.col(l) = circ_correlate(g, psi.col(l));
  return out;
}

// Linear convolution of tap sequences (polynomial product).
Eigen::VectorXd conv_taps(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* key,
                                 Eigen::Index rows, Eigen::Index cols) {
  const auto& arr = j.at(key);
  require(arr.is_array() &&
              arr.size() == static_cast<std::size_t>(rows) * cols,
          ErrorCode::IoError, std::string("bad matrix payload for ") + key);
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[k++].get<double>();
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

}  // namespace

FrameletBasis make_basis(const Eigen::MatrixXd& phi,
                         const Eigen::MatrixXd& phi_dual,
                         const Eigen::MatrixXd& psi,
                         const Eigen::MatrixXd& psi_dual) {
  FrameletBasis b;
  b.phi = phi;
  b.phi_dual = phi_dual;
  b.psi = psi;
  b.psi_dual = psi_dual;
  b.pencil = static_cast<int>(psi.rows());
  b.rank_budget = static_cast<int>(psi.cols());
  check_basis_dims(b);
  return b;
}

FrameletBasis svd_basis(const Eigen::VectorXd& f, int p, int r) {
  require(r >= 1 && r <= p, ErrorCode::InvalidArgument,
          "rank budget must satisfy 1 <= r <= p");
  const HankelLift h = lift(f, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h.matrix, Eigen::ComputeThinV);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(r);
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(f.size(), f.size());
  return make_basis(eye, eye, v, v);
}

double frame_condition_error(const FrameletBasis& b) {
  const Eigen::MatrixXd m =
      b.phi_dual * b.phi.transpose() -
      Eigen::MatrixXd::Identity(b.q(), b.q());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double projection_error(const FrameletBasis& b) {
  const Eigen::MatrixXd proj = b.psi * b.psi_dual.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj * proj - proj);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

FrameletCoefficients coefficients(const Eigen::VectorXd& g,
                                  const FrameletBasis& b) {
  check_basis_dims(b);
  require(g.size() == b.q(), ErrorCode::DimMismatch,
          "signal length must equal Q");
  const HankelLift h = lift(g, b.pencil);
  return {b.phi.transpose() * h.matrix * b.psi};
}

FrameletCoefficients coefficients_unlifted(const Eigen::VectorXd& g,
                                           const FrameletBasis& b) {
  check_basis_dims(b);
  require(g.size() == b.q(), ErrorCode::DimMismatch,
          "signal length must equal Q");
  return {b.phi.transpose() * correlate_bank(g, b.psi)};
}

FrameletCoefficients relu_coefficients(const Eigen::VectorXd& g,
                                       const FrameletBasis& b) {
  FrameletCoefficients c = coefficients(g, b);
  c.values = c.values.cwiseMax(0.0);
  return c;
}

Eigen::VectorXd reconstruct(const FrameletCoefficients& c,
                            const FrameletBasis& b) {
  check_basis_dims(b);
  require(c.values.rows() == b.s() && c.values.cols() == b.rank_budget,
          ErrorCode::DimMismatch, "coefficient shape mismatch");
  return unlift(Eigen::MatrixXd(b.phi_dual * c.values *
                                b.psi_dual.transpose()));
}

Eigen::VectorXd reconstruct_unlifted(const FrameletCoefficients& c,
                                     const FrameletBasis& b) {
  check_basis_dims(b);
  require(c.values.rows() == b.s() && c.values.cols() == b.rank_budget,
          ErrorCode::DimMismatch, "coefficient shape mismatch");
  const Eigen::MatrixXd d = b.phi_dual * c.values;  // Q x r
  Eigen::VectorXd f = Eigen::VectorXd::Zero(b.q());
  for (Eigen::Index l = 0; l < d.cols(); ++l)
    f += circ_convolve(d.col(l), b.psi_dual.col(l));
  return f / static_cast<double>(b.pencil);
}

Eigen::MatrixXd basis_matrices(const FrameletBasis& b, int k, int l) {
  require(k >= 1 && k <= b.s() && l >= 1 && l <= b.rank_budget,
          ErrorCode::IndexOutOfRange, "basis matrix indices are 1-based");
  return b.phi_dual.col(k - 1) * b.psi_dual.col(l - 1).transpose();
}

LayerSpec make_layer(int filter_len, int in_channels, int out_channels,
                     const Eigen::MatrixXd& encoder,
                     const Eigen::MatrixXd& decoder) {
  require(filter_len >= 1 && in_channels >= 1 && out_channels >= 1,
          ErrorCode::InvalidArgument, "layer dimensions must be positive");
  require(encoder.rows() == static_cast<Eigen::Index>(filter_len) *
                                in_channels &&
              encoder.cols() == out_channels,
          ErrorCode::ChannelMismatch, "encoder filter shape mismatch");
  require(decoder.rows() == encoder.rows() && decoder.cols() == encoder.cols(),
          ErrorCode::ChannelMismatch, "decoder filter shape mismatch");
  return {filter_len, in_channels, out_channels, encoder, decoder};
}

Eigen::MatrixXd layer_encode(const Eigen::MatrixXd& in, const LayerSpec& l) {
  require(in.cols() == l.in_channels, ErrorCode::ChannelMismatch,
          "input channel count mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(in.rows(), l.out_channels);
  for (int s = 0; s < l.out_channels; ++s)
    for (int c = 0; c < l.in_channels; ++c)
      out.col(s) += circ_correlate(
          in.col(c), l.encoder_filters.block(c * l.filter_len, s,
                                             l.filter_len, 1));
  return out;
}

Eigen::MatrixXd layer_decode(const Eigen::MatrixXd& in, const LayerSpec& l) {
  require(in.cols() == l.out_channels, ErrorCode::ChannelMismatch,
          "channel count mismatch in decode");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(in.rows(), l.in_channels);
  for (int c = 0; c < l.in_channels; ++c)
    for (int s = 0; s < l.out_channels; ++s)
      out.col(c) += circ_convolve(
          in.col(s), l.decoder_filters.block(c * l.filter_len, s,
                                             l.filter_len, 1));
  return out / static_cast<double>(l.filter_len);
}

namespace {

Eigen::MatrixXd forward_rec(const Eigen::MatrixXd& a,
                            const std::vector<LayerSpec>& layers,
                            const std::vector<PoolingFrame>& pooling,
                            bool relu, std::size_t j) {
  if (j == layers.size()) return a;
  const LayerSpec& layer = layers[j];
  const PoolingFrame& frame = pooling[j];
  require(frame.q == a.rows(), ErrorCode::DimMismatch,
          "pooling frame length disagrees with signal length");

  Eigen::MatrixXd z = layer_encode(a, layer);
  Eigen::MatrixXd c(frame.out_len(), z.cols());
  for (Eigen::Index col = 0; col < z.cols(); ++col)
    c.col(col) = frame.analysis(z.col(col));
  if (relu) c = c.cwiseMax(0.0);

  if (frame.kind == FrameKind::identity) {
    const Eigen::MatrixXd processed =
        forward_rec(c, layers, pooling, relu, j + 1);
    return layer_decode(processed, layer);
  }

  const int q = frame.q;
  const Eigen::MatrixXd skip = c.topRows(q);
  const Eigen::MatrixXd pooled = c.bottomRows(q / 2);
  const Eigen::MatrixXd processed =
      forward_rec(pooled, layers, pooling, relu, j + 1);
  require(processed.rows() == q / 2 && processed.cols() == c.cols(),
          ErrorCode::DimMismatch, "processed pooled branch shape mismatch");
  Eigen::MatrixXd d(q, c.cols());
  Eigen::MatrixXd stacked(frame.out_len(), 1);
  for (Eigen::Index col = 0; col < c.cols(); ++col) {
    stacked.col(0).head(q) = skip.col(col);
    stacked.col(0).tail(q / 2) = processed.col(col);
    d.col(col) = frame.synthesis(stacked.col(0));
  }
  return layer_decode(d, layer);
}

}  // namespace

Eigen::VectorXd multilayer_forward(const Eigen::VectorXd& g,
                                   const std::vector<LayerSpec>& layers,
                                   const std::vector<PoolingFrame>& pooling,
                                   bool relu) {
  require(!layers.empty(), ErrorCode::InvalidArgument, "no layers");
  require(layers.size() == pooling.size(), ErrorCode::DimMismatch,
          "need one pooling frame per layer");
  require(layers[0].in_channels == 1, ErrorCode::ChannelMismatch,
          "top layer must take one channel");
  for (std::size_t j = 0; j + 1 < layers.size(); ++j)
    require(layers[j].out_channels == layers[j + 1].in_channels,
            ErrorCode::ChannelMismatch, "channel chain broken");
  Eigen::MatrixXd a(g.size(), 1);
  a.col(0) = g;
  const Eigen::MatrixXd out = forward_rec(a, layers, pooling, relu, 0);
  return out.col(0);
}

LayerSpec cascade_filters(const std::vector<LayerSpec>& layers) {
  require(!layers.empty(), ErrorCode::InvalidArgument, "no layers");
  LayerSpec eff = layers[0];
  for (std::size_t j = 1; j < layers.size(); ++j) {
    const LayerSpec& next = layers[j];
    require(eff.out_channels == next.in_channels, ErrorCode::ChannelMismatch,
            "channel chain broken");
    const int p_eff = eff.filter_len + next.filter_len - 1;
    Eigen::MatrixXd enc = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(p_eff) * eff.in_channels,
        next.out_channels);
    Eigen::MatrixXd dec = enc;
    for (int c = 0; c < eff.in_channels; ++c)
      for (int s = 0; s < next.out_channels; ++s)
        for (int m = 0; m < eff.out_channels; ++m) {
          enc.block(c * p_eff, s, p_eff, 1) +=
              conv_taps(eff.encoder_filters.block(c * eff.filter_len, m,
                                                  eff.filter_len, 1),
                        next.encoder_filters.block(m * next.filter_len, s,
                                                   next.filter_len, 1));
          dec.block(c * p_eff, s, p_eff, 1) +=
              conv_taps(eff.decoder_filters.block(c * eff.filter_len, m,
                                                  eff.filter_len, 1),
                        next.decoder_filters.block(m * next.filter_len, s,
                                                   next.filter_len, 1));
        }
    // layer_decode divides by the effective length once, while the cascade
    // divided by each stage length; fold the ratio into the decoder taps.
    dec *= static_cast<double>(p_eff) /
           (static_cast<double>(eff.filter_len) * next.filter_len);
    eff = make_layer(p_eff, eff.in_channels, next.out_channels, enc, dec);
  }
  return eff;
}

std::string basis_to_json(const FrameletBasis& b) {
  nlohmann::json j;
  j["q"] = b.q();
  j["s"] = b.s();
  j["pencil"] = b.pencil;
  j["rank_budget"] = b.rank_budget;
  j["phi"] = matrix_to_json(b.phi);
  j["phi_dual"] = matrix_to_json(b.phi_dual);
  j["psi"] = matrix_to_json(b.psi);
  j["psi_dual"] = matrix_to_json(b.psi_dual);
  return j.dump();
}

FrameletBasis basis_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad basis JSON: ") + e.what());
  }
  const int q = j.at("q").get<int>();
  const int s = j.at("s").get<int>();
  const int p = j.at("pencil").get<int>();
  const int r = j.at("rank_budget").get<int>();
  return make_basis(matrix_from_json(j, "phi", q, s),
                    matrix_from_json(j, "phi_dual", q, s),
                    matrix_from_json(j, "psi", p, r),
                    matrix_from_json(j, "psi_dual", p, r));
}

void save_basis(const FrameletBasis& b, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out << basis_to_json(b) << "\n";
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

FrameletBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return basis_from_json(os.str());
}

}  // namespace esi
