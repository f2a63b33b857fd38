#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/pooling.hpp"

namespace esi {

struct TrainingPair {
  Eigen::VectorXd input;
  Eigen::VectorXd target;
};

struct LearnedBasis {
  Eigen::MatrixXd psi;
  Eigen::MatrixXd psi_dual;
  PoolingFrame pooling;
  std::vector<double> loss_trace;
};

// Single-layer encoder-decoder: correlate with each psi column, run the
// pooling-frame analysis (and optional ReLU) on the coefficients, synthesize
// back, and convolve with the dual filters, scaled by 1/p.
Eigen::VectorXd apply_K(const Eigen::VectorXd& f, const LearnedBasis& basis,
                        bool relu);

double training_loss(const std::vector<TrainingPair>& pairs,
                     const LearnedBasis& basis, bool relu,
                     const Eigen::VectorXd& weights = Eigen::VectorXd());

// Full-batch gradient descent with analytic gradients and halving
// backtracking; psi and psi_dual are both initialized from the SVD of the
// stacked lifted targets, so the descent is deterministic and the seed only
// labels the run. A default pooling frame means the identity frame at the
// signal length; weights default to uniform.
LearnedBasis train(const std::vector<TrainingPair>& pairs, int p, int r,
                   bool relu, int steps, double lr, std::uint64_t seed,
                   const PoolingFrame& pooling = PoolingFrame(),
                   const Eigen::VectorXd& weights = Eigen::VectorXd());

// Max relative disagreement between the analytic gradient and central
// finite differences over every filter entry, step 1e-6.
double finite_difference_check(const LearnedBasis& basis,
                               const TrainingPair& pair, bool relu);

void save_learned(const LearnedBasis& basis, const std::string& path);

}  // namespace esi
