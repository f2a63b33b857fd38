#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/grid.hpp"

namespace esi {

// Row-major scalar grid function, x fastest: data[iy * n_cols + ix].
struct ScalarField {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> data;

  ScalarField() = default;
  ScalarField(int rows, int cols, double fill = 0.0)
      : n_rows(rows), n_cols(cols),
        data(static_cast<std::size_t>(rows) * cols, fill) {}

  double& at(int iy, int ix) {
    return data[static_cast<std::size_t>(iy) * n_cols + ix];
  }
  double at(int iy, int ix) const {
    return data[static_cast<std::size_t>(iy) * n_cols + ix];
  }
  std::size_t size() const { return data.size(); }
};

struct VectorField2 {
  ScalarField x;
  ScalarField y;

  VectorField2() = default;
  VectorField2(int rows, int cols)
      : x(rows, cols), y(rows, cols) {}
};

void write_field(const ScalarField& f, const std::string& path);
ScalarField read_field(const std::string& path);

// Restriction to the [-1,1)^2 crop, raster order (x fastest).
Eigen::VectorXd field_to_image(const ScalarField& f, const GridSpec& g);
// Embeds a crop raster back into a full grid field, zero outside the crop.
ScalarField image_to_field(const Eigen::VectorXd& img, const GridSpec& g);

// Stacked per-component image vector (f_1^T, f_2^T)^T of length 2*crop_n^2.
Eigen::VectorXd vectorize_components(const VectorField2& f, const GridSpec& g);

double max_abs(const ScalarField& f);
double norm2(const ScalarField& f);

}  // namespace esi
