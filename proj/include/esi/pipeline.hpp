#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/grid.hpp"
#include "esi/metrics.hpp"
#include "esi/par.hpp"

namespace esi {

enum class PhantomKind { bump, offcenter, random_ellipses, shepp };
enum class Method { tr, wtr, wtr_tv, wtr_framelet };

PhantomKind phantom_kind_from_string(const std::string& s);
Method method_from_string(const std::string& s);
std::string to_string(PhantomKind k);
std::string to_string(Method m);

struct PipelineConfig {
  GridSpec grid;
  int detector_count = 64;
  int time_count = 64;
  PhantomKind phantom = PhantomKind::bump;
  std::uint64_t seed = 1;
  double snr_db = std::numeric_limits<double>::infinity();
  Method method = Method::wtr;
  double tv_gamma = 0.02;
  int framelet_pencil = 8;
  int framelet_rank = 4;
  std::string out_dir = "out";
  Exec exec = Exec::parallel;
};

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);
std::uint64_t config_hash(const PipelineConfig& cfg);

// Reconstruction crops are min-max normalized to [0, 1] before any
// postprocessing and before metrics; phantom truths are already in [0, 1].
struct PipelineResult {
  MetricReport report_x;
  MetricReport report_y;
  bool has_y = false;
  ScalarField truth_x;
  ScalarField truth_y;
  ScalarField recon_x;
  ScalarField recon_y;
};

// Phantom -> simulate -> optional noise -> (weighted) time reversal ->
// method postprocessing -> metrics; writes fields, traces, PNGs, metrics
// JSON/CSV, and a manifest into cfg.out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

enum class SweepAxis { detectors, times };

SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepPoint {
  int value = 0;
  double psnr = 0.0;
  double ssim = 0.0;
};

// One pipeline run per value into out_dir/point_<axis>_<value>; jobs > 1
// runs points concurrently (each point then uses serial kernels, which are
// bitwise-identical to the parallel ones). Writes sweep.csv and sweep.png.
std::vector<SweepPoint> sweep(const PipelineConfig& base, SweepAxis axis,
                              const std::vector<int>& values, int jobs = 1);

}  // namespace esi
