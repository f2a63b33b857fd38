#include "esi/pooling.hpp"

#include <cmath>

namespace esi {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_even(Eigen::Index n) {
  require(n > 0 && n % 2 == 0, ErrorCode::OddLength,
          "pooling needs a positive even length");
}

}  // namespace

Eigen::VectorXd avg_pool(const Eigen::VectorXd& x) {
  check_even(x.size());
  Eigen::VectorXd y(x.size() / 2);
  for (Eigen::Index k = 0; k < y.size(); ++k)
    y[k] = (x[2 * k] + x[2 * k + 1]) * kInvSqrt2;
  return y;
}

Eigen::VectorXd avg_unpool(const Eigen::VectorXd& y) {
  Eigen::VectorXd x(2 * y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    x[2 * k] = y[k] * kInvSqrt2;
    x[2 * k + 1] = y[k] * kInvSqrt2;
  }
  return x;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> unet_analysis(
    const Eigen::VectorXd& x) {
  return {x, avg_pool(x)};
}

Eigen::VectorXd unet_synthesis(const Eigen::VectorXd& skip,
                               const Eigen::VectorXd& coeff) {
  require(skip.size() == 2 * coeff.size(), ErrorCode::DimMismatch,
          "skip length must be twice the coefficient length");
  return skip + avg_unpool(coeff);
}

Eigen::VectorXd dual_frame_synthesis(const Eigen::VectorXd& skip,
                                     const Eigen::VectorXd& coeff) {
  require(skip.size() == 2 * coeff.size(), ErrorCode::DimMismatch,
          "skip length must be twice the coefficient length");
  return skip - 0.5 * avg_unpool(avg_pool(skip) - coeff);
}

PoolingFrame::PoolingFrame(FrameKind k, int q_in) : kind(k), q(q_in) {
  require(q > 0, ErrorCode::InvalidArgument, "frame length must be positive");
  if (kind != FrameKind::identity) check_even(q);
}

Eigen::VectorXd PoolingFrame::analysis(const Eigen::VectorXd& x) const {
  require(x.size() == q, ErrorCode::DimMismatch, "frame length mismatch");
  if (kind == FrameKind::identity) return x;
  Eigen::VectorXd out(out_len());
  out.head(q) = x;
  out.tail(q / 2) = avg_pool(x);
  return out;
}

Eigen::VectorXd PoolingFrame::synthesis(const Eigen::VectorXd& c) const {
  require(c.size() == out_len(), ErrorCode::DimMismatch,
          "frame length mismatch");
  if (kind == FrameKind::identity) return c;
  const Eigen::VectorXd skip = c.head(q);
  const Eigen::VectorXd coeff = c.tail(q / 2);
  return kind == FrameKind::unet ? unet_synthesis(skip, coeff)
                                 : dual_frame_synthesis(skip, coeff);
}

Eigen::MatrixXd PoolingFrame::analysis_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(out_len(), q);
  for (int j = 0; j < q; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(q);
    e[j] = 1.0;
    m.col(j) = analysis(e);
  }
  return m;
}

Eigen::MatrixXd PoolingFrame::synthesis_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, out_len());
  for (int j = 0; j < out_len(); ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(out_len());
    e[j] = 1.0;
    m.col(j) = synthesis(e);
  }
  return m;
}

double frame_defect(const PoolingFrame& frame) {
  const Eigen::MatrixXd composite =
      frame.synthesis_matrix() * frame.analysis_matrix();
  const Eigen::MatrixXd defect =
      composite - Eigen::MatrixXd::Identity(frame.q, frame.q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(defect);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

MultiLevelCoeffs multi_level_analysis(const Eigen::VectorXd& x, int depth) {
  require(depth >= 1, ErrorCode::InvalidArgument, "depth must be >= 1");
  MultiLevelCoeffs c;
  Eigen::VectorXd cur = x;
  for (int level = 0; level < depth; ++level) {
    check_even(cur.size());
    c.skips.push_back(cur);
    cur = avg_pool(cur);
  }
  c.coarse = cur;
  return c;
}

Eigen::VectorXd multi_level_synthesis(const MultiLevelCoeffs& c,
                                      FrameKind kind) {
  require(!c.skips.empty(), ErrorCode::InvalidArgument, "empty coefficients");
  require(kind != FrameKind::identity, ErrorCode::InvalidArgument,
          "multi-level synthesis needs a pooled kind");
  Eigen::VectorXd cur = c.coarse;
  for (auto it = c.skips.rbegin(); it != c.skips.rend(); ++it)
    cur = kind == FrameKind::unet ? unet_synthesis(*it, cur)
                                  : dual_frame_synthesis(*it, cur);
  return cur;
}

}  // namespace esi
