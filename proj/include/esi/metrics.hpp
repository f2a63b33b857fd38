#pragma once

#include <string>

#include "esi/common.hpp"
#include "esi/field.hpp"

namespace esi {

struct MetricReport {
  double psnr_db = 0.0;
  double psnr_conventional = 0.0;
  double ssim = 0.0;
  double mse = 0.0;
  int rows = 0;
  int cols = 0;
};

// 20*log10(rows*cols*max|recon|^2 / ||recon - truth||_2). The sup norm is
// squared while the difference norm is not; both variants are reported so
// results can be compared against tools using the usual peak/MSE ratio.
double psnr(const ScalarField& reconstructed, const ScalarField& truth);
double psnr_conventional(const ScalarField& reconstructed,
                         const ScalarField& truth);

// Single-window SSIM over the whole image with c1=(0.01*xi)^2,
// c2=(0.03*xi)^2; equal inputs give exactly 1.
double ssim(const ScalarField& a, const ScalarField& b, double dynamic_range);

// Pearson correlation of the two images as flat vectors.
double normalized_cross_correlation(const ScalarField& a,
                                    const ScalarField& b);

MetricReport evaluate_metrics(const ScalarField& reconstructed,
                              const ScalarField& truth,
                              double dynamic_range = 1.0);

std::string metrics_to_json(const MetricReport& r);
void append_metrics_csv(const std::string& path, const std::string& label,
                        const MetricReport& r);

}  // namespace esi
