#include "esi/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "esi/framelets.hpp"
#include "esi/hankel.hpp"

namespace esi {
namespace {

struct Workspace {
  PoolingFrame frame;
  Eigen::MatrixXd analysis;   // S x Q, empty for identity frames
  Eigen::MatrixXd synthesis;  // Q x S
  bool identity = false;
};

Workspace make_workspace(const PoolingFrame& frame) {
  Workspace w;
  w.frame = frame;
  w.identity = frame.kind == FrameKind::identity;
  if (!w.identity) {
    w.analysis = frame.analysis_matrix();
    w.synthesis = frame.synthesis_matrix();
  }
  return w;
}

void check_filters(const LearnedBasis& b, int q) {
  const int p = static_cast<int>(b.psi.rows());
  const int r = static_cast<int>(b.psi.cols());
  require(p >= 1 && r >= 1, ErrorCode::BadShape, "empty filter bank");
  require(b.psi_dual.rows() == p && b.psi_dual.cols() == r,
          ErrorCode::BadShape, "psi and psi_dual shapes differ");
  require(p <= q, ErrorCode::BadShape, "filter longer than signal");
  require(b.pooling.q == q, ErrorCode::BadShape,
          "pooling frame length mismatch");
}

struct ForwardTrace {
  Eigen::MatrixXd corr;    // Q x r
  Eigen::MatrixXd coeffs;  // S x r, pre-activation
  Eigen::MatrixXd mask;    // S x r, 1 where active
  Eigen::MatrixXd synth;   // Q x r
  Eigen::VectorXd out;     // Q
};

ForwardTrace forward(const Eigen::VectorXd& f, const LearnedBasis& b,
                     const Workspace& w, bool relu) {
  const int q = static_cast<int>(f.size());
  const int p = static_cast<int>(b.psi.rows());
  const int r = static_cast<int>(b.psi.cols());
  ForwardTrace t;
  t.corr.resize(q, r);
  for (int l = 0; l < r; ++l) t.corr.col(l) = circ_correlate(f, b.psi.col(l));
  t.coeffs = w.identity ? t.corr : (w.analysis * t.corr).eval();
  if (relu) {
    t.mask = (t.coeffs.array() > 0.0).cast<double>();
    t.synth = t.coeffs.cwiseProduct(t.mask);
  } else {
    t.mask = Eigen::MatrixXd::Ones(t.coeffs.rows(), t.coeffs.cols());
    t.synth = t.coeffs;
  }
  if (!w.identity) t.synth = (w.synthesis * t.synth).eval();
  t.out = Eigen::VectorXd::Zero(q);
  for (int l = 0; l < r; ++l)
    t.out += circ_convolve(t.synth.col(l), b.psi_dual.col(l));
  t.out /= static_cast<double>(p);
  return t;
}

struct Gradients {
  Eigen::MatrixXd psi;
  Eigen::MatrixXd psi_dual;
  double loss = 0.0;
};

// loss = sum_pairs sum_q w_q * e_q^2 with e = K(f) - target. The decoder
// gradient is the head of corr(w.e, synth_l); the encoder gradient chains
// the weighted error back through the dual filter, the frame, and the ReLU
// mask before correlating with the input.
Gradients batch_gradients(const std::vector<TrainingPair>& pairs,
                          const LearnedBasis& b, const Workspace& w,
                          bool relu, const Eigen::VectorXd& weights) {
  const int p = static_cast<int>(b.psi.rows());
  const int r = static_cast<int>(b.psi.cols());
  Gradients g;
  g.psi = Eigen::MatrixXd::Zero(p, r);
  g.psi_dual = Eigen::MatrixXd::Zero(p, r);
  for (const TrainingPair& pair : pairs) {
    const ForwardTrace t = forward(pair.input, b, w, relu);
    const Eigen::VectorXd err = t.out - pair.target;
    const Eigen::VectorXd werr =
        weights.size() == 0 ? err : err.cwiseProduct(weights).eval();
    g.loss += err.dot(werr);
    const double scale = 2.0 / static_cast<double>(p);
    for (int l = 0; l < r; ++l) {
      g.psi_dual.col(l) +=
          scale * circ_correlate(werr, t.synth.col(l)).head(p);
      Eigen::VectorXd back = circ_correlate(werr, b.psi_dual.col(l));
      if (!w.identity) back = (w.synthesis.transpose() * back).eval();
      back = back.cwiseProduct(t.mask.col(l));
      if (!w.identity) back = (w.analysis.transpose() * back).eval();
      g.psi.col(l) += scale * circ_correlate(pair.input, back).head(p);
    }
  }
  return g;
}

double batch_loss(const std::vector<TrainingPair>& pairs,
                  const LearnedBasis& b, const Workspace& w, bool relu,
                  const Eigen::VectorXd& weights) {
  double loss = 0.0;
  for (const TrainingPair& pair : pairs) {
    const Eigen::VectorXd err = forward(pair.input, b, w, relu).out - pair.target;
    loss += weights.size() == 0 ? err.squaredNorm()
                                : err.dot(err.cwiseProduct(weights).eval());
  }
  return loss;
}

void check_pairs(const std::vector<TrainingPair>& pairs,
                 const Eigen::VectorXd& weights) {
  require(pairs.size() >= 2, ErrorCode::BadShape, "need at least two pairs");
  const Eigen::Index q = pairs.front().input.size();
  require(q >= 2, ErrorCode::BadShape, "signals too short");
  for (const TrainingPair& pair : pairs) {
    require(pair.input.size() == q && pair.target.size() == q,
            ErrorCode::BadShape, "inconsistent pair lengths");
    require(pair.input.allFinite() && pair.target.allFinite(),
            ErrorCode::NonFiniteData, "non-finite training data");
  }
  require(weights.size() == 0 || weights.size() == q, ErrorCode::BadShape,
          "weight length mismatch");
  if (weights.size() != 0)
    require(weights.allFinite() && weights.minCoeff() >= 0.0,
            ErrorCode::InvalidArgument, "weights must be non-negative");
}

}  // namespace

Eigen::VectorXd apply_K(const Eigen::VectorXd& f, const LearnedBasis& basis,
                        bool relu) {
  require(f.allFinite(), ErrorCode::NonFiniteData, "non-finite input");
  check_filters(basis, static_cast<int>(f.size()));
  const Workspace w = make_workspace(basis.pooling);
  return forward(f, basis, w, relu).out;
}

double training_loss(const std::vector<TrainingPair>& pairs,
                     const LearnedBasis& basis, bool relu,
                     const Eigen::VectorXd& weights) {
  check_pairs(pairs, weights);
  check_filters(basis, static_cast<int>(pairs.front().input.size()));
  const Workspace w = make_workspace(basis.pooling);
  return batch_loss(pairs, basis, w, relu, weights);
}

LearnedBasis train(const std::vector<TrainingPair>& pairs, int p, int r,
                   bool relu, int steps, double lr, std::uint64_t seed,
                   const PoolingFrame& pooling, const Eigen::VectorXd& weights) {
  (void)seed;
  check_pairs(pairs, weights);
  const int q = static_cast<int>(pairs.front().input.size());
  require(p >= 1 && p <= q, ErrorCode::BadShape, "pencil out of range");
  require(r >= 1 && r <= p, ErrorCode::BadShape, "rank budget out of range");
  require(steps >= 0, ErrorCode::InvalidArgument, "negative step count");
  require(std::isfinite(lr) && lr >= 0.0, ErrorCode::InvalidArgument,
          "learning rate must be non-negative");

  LearnedBasis b;
  b.pooling = pooling.q == 0 ? PoolingFrame(FrameKind::identity, q) : pooling;
  require(b.pooling.q == q, ErrorCode::BadShape,
          "pooling frame length mismatch");

  Eigen::MatrixXd stacked(q * static_cast<int>(pairs.size()), p);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    stacked.middleRows(static_cast<int>(i) * q, q) =
        lift(pairs[i].target, p).matrix;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinV);
  b.psi = svd.matrixV().leftCols(r);
  b.psi_dual = b.psi;

  const Workspace w = make_workspace(b.pooling);
  Gradients g = batch_gradients(pairs, b, w, relu, weights);
  const double initial = g.loss;
  b.loss_trace.push_back(g.loss);

  double rate = lr;
  for (int step = 0; step < steps; ++step) {
    if (rate > 0.0) {
      double trial = rate;
      for (int halving = 0; halving < 60; ++halving) {
        LearnedBasis cand = b;
        cand.psi = b.psi - trial * g.psi;
        cand.psi_dual = b.psi_dual - trial * g.psi_dual;
        const double cand_loss = batch_loss(pairs, cand, w, relu, weights);
        if (cand_loss <= g.loss) {
          b.psi = std::move(cand.psi);
          b.psi_dual = std::move(cand.psi_dual);
          rate = std::min(lr, trial * 2.0);
          break;
        }
        trial *= 0.5;
      }
      g = batch_gradients(pairs, b, w, relu, weights);
    }
    b.loss_trace.push_back(g.loss);
    require(!(g.loss > 1e6 * initial) && std::isfinite(g.loss),
            ErrorCode::Diverged, "training loss diverged");
  }
  return b;
}

double finite_difference_check(const LearnedBasis& basis,
                               const TrainingPair& pair, bool relu) {
  const int q = static_cast<int>(pair.input.size());
  require(pair.target.size() == q, ErrorCode::BadShape,
          "inconsistent pair lengths");
  check_filters(basis, q);
  const Workspace w = make_workspace(basis.pooling);
  if (relu) {
    const ForwardTrace t = forward(pair.input, basis, w, true);
    require(t.coeffs.cwiseAbs().minCoeff() >= 1e-4, ErrorCode::NearKink,
            "coefficient too close to the ReLU kink");
  }
  const std::vector<TrainingPair> one{pair, pair};
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(q, 0.5);
  const Gradients g = batch_gradients(one, basis, w, relu, half);

  const double h = 1e-6;
  const double floor_scale =
      std::max({g.psi.cwiseAbs().maxCoeff(), g.psi_dual.cwiseAbs().maxCoeff(),
                1e-12});
  double worst = 0.0;
  auto probe = [&](bool dual, int i, int l, double analytic) {
    LearnedBasis pert = basis;
    Eigen::MatrixXd& m = dual ? pert.psi_dual : pert.psi;
    m(i, l) += h;
    const double up = batch_loss(one, pert, w, relu, half);
    m(i, l) -= 2.0 * h;
    const double down = batch_loss(one, pert, w, relu, half);
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - analytic) / floor_scale);
  };
  for (int l = 0; l < basis.psi.cols(); ++l)
    for (int i = 0; i < basis.psi.rows(); ++i) {
      probe(false, i, l, g.psi(i, l));
      probe(true, i, l, g.psi_dual(i, l));
    }
  return worst;
}

void save_learned(const LearnedBasis& basis, const std::string& path) {
  FrameletBasis fb;
  fb.pencil = static_cast<int>(basis.psi.rows());
  fb.rank_budget = static_cast<int>(basis.psi.cols());
  fb.psi = basis.psi;
  fb.psi_dual = basis.psi_dual;
  if (basis.pooling.kind == FrameKind::identity) {
    fb.phi = Eigen::MatrixXd::Identity(basis.pooling.q, basis.pooling.q);
    fb.phi_dual = fb.phi;
  } else {
    fb.phi = basis.pooling.analysis_matrix().transpose();
    fb.phi_dual = basis.pooling.synthesis_matrix();
  }
  save_basis(fb, path);

  std::FILE* f = std::fopen((path + ".loss.csv").c_str(), "w");
  require(f != nullptr, ErrorCode::IoError, "cannot open loss trace file");
  std::fprintf(f, "step,loss\n");
  for (std::size_t i = 0; i < basis.loss_trace.size(); ++i)
    std::fprintf(f, "%zu,%.17g\n", i, basis.loss_trace[i]);
  std::fclose(f);
}

}  // namespace esi
