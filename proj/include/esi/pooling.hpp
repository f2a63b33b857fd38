#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "esi/common.hpp"

namespace esi {

Eigen::VectorXd avg_pool(const Eigen::VectorXd& x);
Eigen::VectorXd avg_unpool(const Eigen::VectorXd& y);

std::pair<Eigen::VectorXd, Eigen::VectorXd> unet_analysis(
    const Eigen::VectorXd& x);
// Synthesis with Phi itself (not the dual): skip + avg_unpool(coeff).
// Kept as the diagnostic showing the frame defect; not a usable inverse.
Eigen::VectorXd unet_synthesis(const Eigen::VectorXd& skip,
                               const Eigen::VectorXd& coeff);
// Dual-frame unpooling: skip - avg_unpool(avg_pool(skip) - coeff)/2.
Eigen::VectorXd dual_frame_synthesis(const Eigen::VectorXd& skip,
                                     const Eigen::VectorXd& coeff);

enum class FrameKind { identity, unet, dual_frame };

// Analysis operator Phi^T is shared by unet and dual_frame; the kind picks
// which synthesis is used, so the unet kind round trip exhibits the defect.
struct PoolingFrame {
  FrameKind kind = FrameKind::identity;
  int q = 0;

  PoolingFrame() = default;
  PoolingFrame(FrameKind k, int q_in);

  int out_len() const {
    return kind == FrameKind::identity ? q : q + q / 2;
  }
  Eigen::VectorXd analysis(const Eigen::VectorXd& x) const;
  Eigen::VectorXd synthesis(const Eigen::VectorXd& c) const;
  Eigen::MatrixXd analysis_matrix() const;   // S x Q
  Eigen::MatrixXd synthesis_matrix() const;  // Q x S
};

double frame_defect(const PoolingFrame& frame);

// Recursive application on the pooled branch; level j holds the skip at
// resolution Q / 2^j, coarse is the residual pooled signal.
struct MultiLevelCoeffs {
  std::vector<Eigen::VectorXd> skips;
  Eigen::VectorXd coarse;
};

MultiLevelCoeffs multi_level_analysis(const Eigen::VectorXd& x, int depth);
Eigen::VectorXd multi_level_synthesis(const MultiLevelCoeffs& c,
                                      FrameKind kind);

}  // namespace esi
