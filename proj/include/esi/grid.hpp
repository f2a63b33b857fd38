#pragma once

#include <cmath>
#include <string>

#include "esi/common.hpp"

namespace esi {

// Periodic square box [-beta/2, beta/2]^2, nodes x_i = -beta/2 + i*h_x.
// Sources live in the unit disc; the image crop is the square [-1,1)^2.
struct GridSpec {
  double beta = 4.0;
  int n_x = 128;
  double h_x = 0.03125;
  double t_max = 2.0;
  int n_t = 64;
  double h_t = 0.03125;
  double lambda = 1.0;
  double mu = 1.0;
  int pml_width = 16;

  double c_p() const { return std::sqrt(lambda + 2.0 * mu); }
  double c_s() const { return std::sqrt(mu); }

  double x(int i) const { return -0.5 * beta + i * h_x; }
  double t(int n) const { return n * h_t; }

  // First index and side length of the [-1,1)^2 crop.
  int crop_lo() const {
    double lo = (0.5 * beta - 1.0) / h_x;
    int i = static_cast<int>(std::ceil(lo - 1e-9));
    return i < 0 ? 0 : i;
  }
  int crop_n() const {
    int n = static_cast<int>(std::floor(2.0 / h_x + 1e-9));
    const int lo = crop_lo();
    return n > n_x - lo ? n_x - lo : n;
  }
};

GridSpec make_grid(double beta, int n_x, double t_max, int n_t, double lambda,
                   double mu, int pml_width);

std::string grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const std::string& text);
void save_grid(const GridSpec& g, const std::string& path);
GridSpec load_grid(const std::string& path);

}  // namespace esi
