#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/grid.hpp"
#include "esi/par.hpp"
#include "esi/solver.hpp"

namespace esi {

// Dense source-to-measurement map. Row i*(N*M) + n*M + m, column j*Q + q
// for component pair (i, j), sample n, detector m, crop pixel q; the entry
// is the midpoint quadrature h_x^2 * [dG/dt(y_m - z_q, t_n)]_{ij}.
struct SensingMatrix {
  Eigen::MatrixXd entries;
  GridSpec grid;
  DetectorArray detectors;

  int pixel_count() const {
    const int c = grid.crop_n();
    return c * c;
  }
};

SensingMatrix assemble_sensing(const GridSpec& grid,
                               const DetectorArray& detectors,
                               Exec ex = Exec::parallel);

struct PseudoInverse {
  Eigen::MatrixXd lambda;
  Eigen::LDLT<Eigen::MatrixXd> factor;
  double epsilon = 0.0;

  // Lambda^T (Lambda Lambda^T + eps I)^{-1} g.
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const;
  // Lambda applied after apply(): the range-space projector up to eps.
  Eigen::VectorXd project(const Eigen::VectorXd& g) const;
};

PseudoInverse right_pseudo_inverse(const SensingMatrix& m, double epsilon);

// k orthonormal right singular vectors with the smallest singular values,
// each certified against ||Lambda v|| <= 1e-8 ||Lambda||_2.
std::vector<Eigen::VectorXd> null_space_probe(const SensingMatrix& m, int k);

// max over vectors of ||H_p(v block) filters||_F / ||v||; vectors split
// into `components` equal circular blocks.
double annihilation_score(const Eigen::MatrixXd& filters,
                          const std::vector<Eigen::VectorXd>& vectors,
                          int components = 1);

void save_sensing(const SensingMatrix& m, const std::string& path);
SensingMatrix load_sensing(const std::string& path);

}  // namespace esi
