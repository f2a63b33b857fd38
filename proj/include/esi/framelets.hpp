#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/pooling.hpp"

namespace esi {

// Local/non-local basis pair. phi and phi_dual are stored Q x S; psi and
// psi_dual are p x r. Valid bases satisfy phi_dual * phi^T = I_Q and
// psi * psi_dual^T idempotent (a projection).
struct FrameletBasis {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd phi_dual;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd psi_dual;
  int pencil = 0;
  int rank_budget = 0;

  int q() const { return static_cast<int>(phi.rows()); }
  int s() const { return static_cast<int>(phi.cols()); }
};

struct FrameletCoefficients {
  Eigen::MatrixXd values;  // S x r
};

FrameletBasis make_basis(const Eigen::MatrixXd& phi,
                         const Eigen::MatrixXd& phi_dual,
                         const Eigen::MatrixXd& psi,
                         const Eigen::MatrixXd& psi_dual);

// Identity Phi with Psi = Psi_dual = leading-r right singular vectors of the
// wrap-around Hankel lift of f.
FrameletBasis svd_basis(const Eigen::VectorXd& f, int p, int r);

double frame_condition_error(const FrameletBasis& b);
double projection_error(const FrameletBasis& b);

// Lifted path: C = Phi^T H_p(g) Psi.
FrameletCoefficients coefficients(const Eigen::VectorXd& g,
                                  const FrameletBasis& b);
// Un-lifted path: C = Phi^T (g circularly correlated with each psi column).
FrameletCoefficients coefficients_unlifted(const Eigen::VectorXd& g,
                                           const FrameletBasis& b);
FrameletCoefficients relu_coefficients(const Eigen::VectorXd& g,
                                       const FrameletBasis& b);

// Lifted path: unlift(phi_dual * C * psi_dual^T).
Eigen::VectorXd reconstruct(const FrameletCoefficients& c,
                            const FrameletBasis& b);
// Un-lifted decoder: sum_l conv(phi_dual*C column l, psi_dual col l) / p.
Eigen::VectorXd reconstruct_unlifted(const FrameletCoefficients& c,
                                     const FrameletBasis& b);

// Rank-one expansion element B^{kl} = phi_dual_k psi_dual_l^T; 1-based k, l.
Eigen::MatrixXd basis_matrices(const FrameletBasis& b, int k, int l);

// One encoder/decoder stage of the cascade. encoder_filters and
// decoder_filters are (filter_len * in_channels) x out_channels; the p-tap
// block for input channel c sits in rows [c*p, (c+1)*p).
struct LayerSpec {
  int filter_len = 0;
  int in_channels = 0;
  int out_channels = 0;
  Eigen::MatrixXd encoder_filters;
  Eigen::MatrixXd decoder_filters;
};

LayerSpec make_layer(int filter_len, int in_channels, int out_channels,
                     const Eigen::MatrixXd& encoder,
                     const Eigen::MatrixXd& decoder);

// Multi-channel encoder convolution: out col s = sum_c corr(in col c, taps).
Eigen::MatrixXd layer_encode(const Eigen::MatrixXd& in, const LayerSpec& l);
// Decoder convolution with the 1/p factor.
Eigen::MatrixXd layer_decode(const Eigen::MatrixXd& in, const LayerSpec& l);

Eigen::VectorXd multilayer_forward(const Eigen::VectorXd& g,
                                   const std::vector<LayerSpec>& layers,
                                   const std::vector<PoolingFrame>& pooling,
                                   bool relu);

LayerSpec cascade_filters(const std::vector<LayerSpec>& layers);

std::string basis_to_json(const FrameletBasis& b);
FrameletBasis basis_from_json(const std::string& text);
void save_basis(const FrameletBasis& b, const std::string& path);
FrameletBasis load_basis(const std::string& path);

}  // namespace esi
