#pragma once

#include <Eigen/Dense>
#include <vector>

#include "esi/common.hpp"

namespace esi {

// Wrap-around Hankel lift: matrix[q][j] = f[(q+j) mod Q], shape Q x p.
struct HankelLift {
  int source_len = 0;
  int pencil = 0;
  Eigen::MatrixXd matrix;
};

struct HankelLiftC {
  int source_len = 0;
  int pencil = 0;
  Eigen::MatrixXcd matrix;
};

// Block-diagonal stack of per-component lifts.
struct BlockHankelLift {
  std::vector<HankelLift> blocks;
  Eigen::MatrixXd assemble() const;
};

// Taps of the polynomial prod_j (1 - e^{-i w_j} z^{-1}); taps[0] = 1.
struct AnnihilatingFilter {
  Eigen::VectorXcd taps;
  Eigen::VectorXcd roots;
};

HankelLift lift(const Eigen::VectorXd& f, int p);
HankelLiftC lift(const Eigen::VectorXcd& f, int p);
Eigen::VectorXd unlift(const Eigen::MatrixXd& m);
Eigen::VectorXcd unlift(const Eigen::MatrixXcd& m);

int numerical_rank(const Eigen::MatrixXd& m, double tol = 1e-8);
int numerical_rank(const Eigen::MatrixXcd& m, double tol = 1e-8);
inline int numerical_rank(const HankelLift& h, double tol = 1e-8) {
  return numerical_rank(h.matrix, tol);
}
inline int numerical_rank(const HankelLiftC& h, double tol = 1e-8) {
  return numerical_rank(h.matrix, tol);
}

AnnihilatingFilter build_annihilator(const std::vector<double>& frequencies);
double annihilation_residual(const Eigen::VectorXcd& f,
                             const AnnihilatingFilter& h);

// Circular correlation: out[q] = sum_j f[(q+j) mod Q] * psi[j]. This is the
// encoder convolution with the flipped filter written as H_p(f) * psi.
Eigen::VectorXd circ_correlate(const Eigen::VectorXd& f,
                               const Eigen::VectorXd& psi);
// Circular convolution: out[i] = sum_j d[(i-j) mod Q] * psi[j].
Eigen::VectorXd circ_convolve(const Eigen::VectorXd& d,
                              const Eigen::VectorXd& psi);

}  // namespace esi
