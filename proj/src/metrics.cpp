#include "esi/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "json.hpp"

namespace esi {
namespace {

void check_pair(const ScalarField& a, const ScalarField& b) {
  require(a.n_rows >= 1 && a.n_cols >= 1, ErrorCode::BadShape, "empty image");
  require(a.n_rows == b.n_rows && a.n_cols == b.n_cols, ErrorCode::DimMismatch,
          "image shapes differ");
  for (double v : a.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite image");
  for (double v : b.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite image");
}

double mean_of(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.data) s += v;
  return s / static_cast<double>(f.data.size());
}

double cross_moment(const ScalarField& a, double mu_a, const ScalarField& b,
                    double mu_b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    s += (a.data[i] - mu_a) * (b.data[i] - mu_b);
  return s / static_cast<double>(a.data.size());
}

double mse_of(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return s / static_cast<double>(a.data.size());
}

}  // namespace

double psnr(const ScalarField& reconstructed, const ScalarField& truth) {
  check_pair(reconstructed, truth);
  const double sup = max_abs(reconstructed);
  require(sup > 0.0, ErrorCode::ZeroSignal, "all-zero reconstruction");
  double diff2 = 0.0;
  for (std::size_t i = 0; i < truth.data.size(); ++i) {
    const double d = reconstructed.data[i] - truth.data[i];
    diff2 += d * d;
  }
  require(diff2 > 0.0, ErrorCode::IdenticalImages,
          "psnr undefined for identical images");
  const double pixels =
      static_cast<double>(reconstructed.n_rows) * reconstructed.n_cols;
  return 20.0 * std::log10(pixels * sup * sup / std::sqrt(diff2));
}

double psnr_conventional(const ScalarField& reconstructed,
                         const ScalarField& truth) {
  check_pair(reconstructed, truth);
  const double peak = max_abs(truth);
  require(peak > 0.0, ErrorCode::ZeroSignal, "all-zero truth image");
  const double mse = mse_of(reconstructed, truth);
  require(mse > 0.0, ErrorCode::IdenticalImages,
          "psnr undefined for identical images");
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const ScalarField& a, const ScalarField& b, double dynamic_range) {
  check_pair(a, b);
  require(dynamic_range > 0.0, ErrorCode::InvalidArgument,
          "dynamic range must be positive");
  const double c1 = 0.01 * dynamic_range * 0.01 * dynamic_range;
  const double c2 = 0.03 * dynamic_range * 0.03 * dynamic_range;
  const double mu_a = mean_of(a);
  const double mu_b = mean_of(b);
  const double var_a = cross_moment(a, mu_a, a, mu_a);
  const double var_b = cross_moment(b, mu_b, b, mu_b);
  const double cov = cross_moment(a, mu_a, b, mu_b);
  const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
  const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
  return num / den;
}

double normalized_cross_correlation(const ScalarField& a,
                                    const ScalarField& b) {
  check_pair(a, b);
  const double mu_a = mean_of(a);
  const double mu_b = mean_of(b);
  const double cov = cross_moment(a, mu_a, b, mu_b);
  const double var_a = cross_moment(a, mu_a, a, mu_a);
  const double var_b = cross_moment(b, mu_b, b, mu_b);
  require(var_a > 0.0 && var_b > 0.0, ErrorCode::ZeroSignal,
          "correlation undefined for constant images");
  return cov / std::sqrt(var_a * var_b);
}

MetricReport evaluate_metrics(const ScalarField& reconstructed,
                              const ScalarField& truth, double dynamic_range) {
  MetricReport r;
  r.psnr_db = psnr(reconstructed, truth);
  r.psnr_conventional = psnr_conventional(reconstructed, truth);
  r.ssim = ssim(reconstructed, truth, dynamic_range);
  r.mse = mse_of(reconstructed, truth);
  r.rows = reconstructed.n_rows;
  r.cols = reconstructed.n_cols;
  return r;
}

std::string metrics_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["psnr_db"] = r.psnr_db;
  j["psnr_conventional"] = r.psnr_conventional;
  j["ssim"] = r.ssim;
  j["mse"] = r.mse;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  return j.dump(2);
}

void append_metrics_csv(const std::string& path, const std::string& label,
                        const MetricReport& r) {
  const bool fresh = !std::filesystem::exists(path);
  std::FILE* f = std::fopen(path.c_str(), "a");
  require(f != nullptr, ErrorCode::IoError, "cannot open metrics csv");
  if (fresh)
    std::fprintf(f, "label,psnr_db,psnr_conventional,ssim,mse,rows,cols\n");
  std::fprintf(f, "%s,%.17g,%.17g,%.17g,%.17g,%d,%d\n", label.c_str(),
               r.psnr_db, r.psnr_conventional, r.ssim, r.mse, r.rows, r.cols);
  std::fclose(f);
}

}  // namespace esi
