#include "esi/pipeline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>

#include "json.hpp"

#include "esi/hankel.hpp"
#include "esi/phantoms.hpp"
#include "esi/render.hpp"
#include "esi/solver.hpp"
#include "esi/time_reversal.hpp"
#include "esi/tv.hpp"

namespace esi {
namespace {

using nlohmann::json;

const char* kVersion = "1.0.0";

json tolerance_table() {
  json t;
  t["svd_rank_tol"] = 1e-8;
  t["pseudo_inverse_epsilon"] = 1e-8;
  t["null_space_certificate"] = 1e-8;
  t["tv_tol"] = 1e-6;
  t["tv_max_iters"] = 500;
  t["learning_fd_step"] = 1e-6;
  return t;
}

ScalarField crop_image(const ScalarField& f, const GridSpec& g) {
  const Eigen::VectorXd v = field_to_image(f, g);
  ScalarField img(g.crop_n(), g.crop_n());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    img.data[static_cast<std::size_t>(i)] = v[i];
  return img;
}

ScalarField normalize_unit(const ScalarField& f) {
  double lo = f.data[0], hi = f.data[0];
  for (double v : f.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ScalarField out(f.n_rows, f.n_cols);
  const double span = hi - lo;
  if (span > 0.0)
    for (std::size_t i = 0; i < f.data.size(); ++i)
      out.data[i] = (f.data[i] - lo) / span;
  return out;
}

// Rank-r wrap-around Hankel projection of the raster, used as the framelet
// filtering step on the reconstruction crop.
ScalarField hankel_filter(const ScalarField& img, int p, int r) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(img.data.size()));
  for (std::size_t i = 0; i < img.data.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = img.data[i];
  const HankelLift h = lift(v, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h.matrix, Eigen::ComputeThinV);
  const Eigen::MatrixXd vr = svd.matrixV().leftCols(r);
  const Eigen::VectorXd rec =
      unlift(Eigen::MatrixXd(h.matrix * vr * vr.transpose()));
  ScalarField out(img.n_rows, img.n_cols);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = rec[static_cast<Eigen::Index>(i)];
  return out;
}

ScalarField postprocess(const ScalarField& img, const PipelineConfig& cfg) {
  switch (cfg.method) {
    case Method::tr:
    case Method::wtr:
      return img;
    case Method::wtr_tv: {
      TVParams tp;
      tp.gamma = cfg.tv_gamma;
      return tv_denoise(img, tp);
    }
    case Method::wtr_framelet:
      return hankel_filter(img, cfg.framelet_pencil, cfg.framelet_rank);
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

VectorField2 build_source(const PipelineConfig& cfg) {
  const GridSpec& g = cfg.grid;
  VectorField2 f(g.n_x, g.n_x);
  switch (cfg.phantom) {
    case PhantomKind::bump:
      f.x = radial_bump(g, 0.0, 0.0, 0.5);
      f.y = f.x;
      return f;
    case PhantomKind::offcenter:
      f.x = radial_bump(g, 0.3, 0.2, 0.25);
      return f;
    case PhantomKind::random_ellipses:
      return phantom_source(cfg.seed, g, true);
    case PhantomKind::shepp:
      f.x = shepp_logan(g, 0.9).image;
      return f;
  }
  fail(ErrorCode::InvalidArgument, "unknown phantom kind");
}

}  // namespace

PhantomKind phantom_kind_from_string(const std::string& s) {
  if (s == "bump") return PhantomKind::bump;
  if (s == "offcenter") return PhantomKind::offcenter;
  if (s == "random") return PhantomKind::random_ellipses;
  if (s == "shepp") return PhantomKind::shepp;
  fail(ErrorCode::InvalidArgument, "unknown phantom kind: " + s);
}

Method method_from_string(const std::string& s) {
  if (s == "tr") return Method::tr;
  if (s == "wtr") return Method::wtr;
  if (s == "wtr+tv") return Method::wtr_tv;
  if (s == "wtr+framelet") return Method::wtr_framelet;
  fail(ErrorCode::InvalidArgument, "unknown method: " + s);
}

std::string to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::bump: return "bump";
    case PhantomKind::offcenter: return "offcenter";
    case PhantomKind::random_ellipses: return "random";
    case PhantomKind::shepp: return "shepp";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::tr: return "tr";
    case Method::wtr: return "wtr";
    case Method::wtr_tv: return "wtr+tv";
    case Method::wtr_framelet: return "wtr+framelet";
  }
  return "?";
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["grid"] = json::parse(grid_to_json(cfg.grid));
  j["detectors"] = cfg.detector_count;
  j["times"] = cfg.time_count;
  j["phantom"] = to_string(cfg.phantom);
  j["seed"] = cfg.seed;
  if (std::isfinite(cfg.snr_db))
    j["snr_db"] = cfg.snr_db;
  else
    j["snr_db"] = nullptr;
  j["method"] = to_string(cfg.method);
  j["tv_gamma"] = cfg.tv_gamma;
  j["framelet_pencil"] = cfg.framelet_pencil;
  j["framelet_rank"] = cfg.framelet_rank;
  j["out_dir"] = cfg.out_dir;
  j["exec"] = cfg.exec == Exec::parallel ? "parallel" : "serial";
  return j.dump(2);
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad config json: ") +
                                         e.what());
  }
  PipelineConfig cfg;
  try {
    if (j.contains("grid")) cfg.grid = grid_from_json(j["grid"].dump());
    if (j.contains("detectors")) cfg.detector_count = j["detectors"].get<int>();
    if (j.contains("times")) cfg.time_count = j["times"].get<int>();
    if (j.contains("phantom"))
      cfg.phantom = phantom_kind_from_string(j["phantom"].get<std::string>());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("snr_db") && !j["snr_db"].is_null())
      cfg.snr_db = j["snr_db"].get<double>();
    if (j.contains("method"))
      cfg.method = method_from_string(j["method"].get<std::string>());
    if (j.contains("tv_gamma")) cfg.tv_gamma = j["tv_gamma"].get<double>();
    if (j.contains("framelet_pencil"))
      cfg.framelet_pencil = j["framelet_pencil"].get<int>();
    if (j.contains("framelet_rank"))
      cfg.framelet_rank = j["framelet_rank"].get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("exec"))
      cfg.exec = j["exec"].get<std::string>() == "serial" ? Exec::serial
                                                          : Exec::parallel;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("bad config field: ") +
                                         e.what());
  }
  return cfg;
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  require(cfg.detector_count >= 1, ErrorCode::InvalidArgument,
          "need at least one detector");
  require(cfg.time_count >= 1, ErrorCode::InvalidArgument,
          "need at least one time sample");
  require(cfg.tv_gamma >= 0.0, ErrorCode::InvalidArgument,
          "tv_gamma must be non-negative");
  const int crop_len = cfg.grid.crop_n() * cfg.grid.crop_n();
  require(cfg.framelet_pencil >= 1 && cfg.framelet_pencil <= crop_len,
          ErrorCode::InvalidArgument, "framelet pencil out of range");
  require(cfg.framelet_rank >= 1 &&
              cfg.framelet_rank <= cfg.framelet_pencil,
          ErrorCode::InvalidArgument, "framelet rank out of range");

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto path = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };

  const VectorField2 source = build_source(cfg);
  const DetectorArray det =
      uniform_detectors(cfg.detector_count, cfg.time_count, cfg.grid);
  MeasurementSet m = simulate(source, cfg.grid, det, cfg.exec);
  m = add_noise(m, cfg.snr_db, cfg.seed ^ 0x6e6f697365ull);

  VectorField2 recon;
  if (cfg.method == Method::tr) {
    recon = back_propagate(m, cfg.grid, cfg.exec);
  } else {
    recon = weighted_time_reversal(m, cfg.grid, cfg.exec).weighted;
  }

  PipelineResult res;
  res.truth_x = crop_image(source.x, cfg.grid);
  res.truth_y = crop_image(source.y, cfg.grid);
  res.has_y = max_abs(res.truth_y) > 0.0;
  res.recon_x = postprocess(normalize_unit(crop_image(recon.x, cfg.grid)), cfg);
  res.recon_y = postprocess(normalize_unit(crop_image(recon.y, cfg.grid)), cfg);
  res.report_x = evaluate_metrics(res.recon_x, res.truth_x, 1.0);
  if (res.has_y) res.report_y = evaluate_metrics(res.recon_y, res.truth_y, 1.0);

  write_field(source.x, path("source_x.ef1"));
  write_field(source.y, path("source_y.ef1"));
  write_field_png(res.truth_x, path("source.png"));
  if (res.has_y) write_field_png(res.truth_y, path("source_y.png"));
  save_measurements(m, path("measurements.csv"));
  write_field(recon.x, path("recon_x.ef1"));
  write_field(recon.y, path("recon_y.ef1"));
  write_field_png(res.recon_x, path("recon.png"));
  if (res.has_y) write_field_png(res.recon_y, path("recon_y.png"));

  const std::string label = to_string(cfg.method) + "/" + to_string(cfg.phantom);
  append_metrics_csv(path("metrics.csv"), label + "/x", res.report_x);
  if (res.has_y)
    append_metrics_csv(path("metrics.csv"), label + "/y", res.report_y);

  json mj;
  mj["x"] = json::parse(metrics_to_json(res.report_x));
  if (res.has_y) mj["y"] = json::parse(metrics_to_json(res.report_y));
  std::ofstream(path("metrics.json")) << mj.dump(2) << "\n";

  json manifest;
  manifest["config"] = json::parse(config_to_json(cfg));
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  manifest["config_hash"] = hex;
  manifest["version"] = kVersion;
  manifest["tolerances"] = tolerance_table();
  std::ofstream(path("manifest.json")) << manifest.dump(2) << "\n";

  return res;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "detectors") return SweepAxis::detectors;
  if (s == "times") return SweepAxis::times;
  fail(ErrorCode::InvalidArgument, "unknown sweep axis: " + s);
}

std::vector<SweepPoint> sweep(const PipelineConfig& base, SweepAxis axis,
                              const std::vector<int>& values, int jobs) {
  require(!values.empty(), ErrorCode::InvalidArgument, "empty sweep values");
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    require(values[i] < values[i + 1], ErrorCode::InvalidArgument,
            "sweep values must be strictly ascending");
  require(jobs >= 1, ErrorCode::InvalidArgument, "jobs must be positive");

  namespace fs = std::filesystem;
  fs::create_directories(base.out_dir);
  const std::string axis_name =
      axis == SweepAxis::detectors ? "detectors" : "times";

  const auto run_point = [&](int value) {
    PipelineConfig cfg = base;
    if (axis == SweepAxis::detectors)
      cfg.detector_count = value;
    else
      cfg.time_count = value;
    if (jobs > 1) cfg.exec = Exec::serial;
    cfg.out_dir = (fs::path(base.out_dir) /
                   ("point_" + axis_name + "_" + std::to_string(value)))
                      .string();
    const PipelineResult r = run_pipeline(cfg);
    return SweepPoint{value, r.report_x.psnr_db, r.report_x.ssim};
  };

  std::vector<SweepPoint> points(values.size());
  for (std::size_t i = 0; i < values.size(); i += jobs) {
    const std::size_t hi = std::min(values.size(), i + jobs);
    std::vector<std::future<SweepPoint>> batch;
    for (std::size_t k = i; k < hi; ++k)
      batch.push_back(
          std::async(std::launch::async, run_point, values[k]));
    for (std::size_t k = i; k < hi; ++k) points[k] = batch[k - i].get();
  }

  std::FILE* f =
      std::fopen((fs::path(base.out_dir) / "sweep.csv").string().c_str(), "w");
  require(f != nullptr, ErrorCode::IoError, "cannot open sweep csv");
  std::fprintf(f, "value,psnr,ssim\n");
  for (const SweepPoint& p : points)
    std::fprintf(f, "%d,%.17g,%.17g\n", p.value, p.psnr, p.ssim);
  std::fclose(f);

  PlotSeries psnr_series, ssim_series;
  for (const SweepPoint& p : points) {
    psnr_series.x.push_back(p.value);
    psnr_series.y.push_back(p.psnr);
    ssim_series.x.push_back(p.value);
    ssim_series.y.push_back(p.ssim);
  }
  write_line_plot({psnr_series, ssim_series},
                  (fs::path(base.out_dir) / "sweep.png").string());
  return points;
}

}  // namespace esi
