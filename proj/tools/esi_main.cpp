#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "esi/common.hpp"
#include "esi/field.hpp"
#include "esi/framelets.hpp"
#include "esi/hankel.hpp"
#include "esi/learning.hpp"
#include "esi/metrics.hpp"
#include "esi/phantoms.hpp"
#include "esi/pipeline.hpp"
#include "esi/pooling.hpp"
#include "esi/render.hpp"
#include "esi/solver.hpp"
#include "esi/time_reversal.hpp"
#include "esi/tv.hpp"

namespace {

std::string g_error_dir = ".";

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  esi::require(in.good(), esi::ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

esi::PipelineConfig load_config(const std::string& config_path,
                                std::uint64_t seed, bool seed_set,
                                const std::string& out, bool out_set) {
  esi::PipelineConfig cfg;
  if (!config_path.empty())
    cfg = esi::config_from_json(read_text(config_path));
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.out_dir = out;
  return cfg;
}

void write_error_json(const std::string& code, const std::string& message) {
  nlohmann::json j;
  j["error"] = code;
  j["message"] = message;
  std::error_code ec;
  std::filesystem::create_directories(g_error_dir, ec);
  std::ofstream out(
      (std::filesystem::path(g_error_dir) / "error.json").string());
  if (out.good()) out << j.dump(2) << "\n";
}

Eigen::VectorXd field_raster(const esi::ScalarField& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.data.size()));
  for (std::size_t i = 0; i < f.data.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = f.data[i];
  return v;
}

esi::ScalarField raster_field(const Eigen::VectorXd& v, int rows, int cols) {
  esi::ScalarField f(rows, cols);
  for (std::size_t i = 0; i < f.data.size(); ++i)
    f.data[i] = v[static_cast<Eigen::Index>(i)];
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic source imaging toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out", in_path, truth_path;
  std::uint64_t seed = 1;
  bool seed_set = false, out_set = false;
  app.add_option("--config", config_path, "pipeline config JSON file");
  app.add_option("--seed", seed, "seed override")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "output directory")
      ->each([&](const std::string&) { out_set = true; });

  auto* cmd_phantom = app.add_subcommand("phantom", "generate a source image");
  std::string phantom_kind = "random";
  cmd_phantom->add_option("--kind", phantom_kind, "bump|offcenter|random|shepp");

  auto* cmd_sim = app.add_subcommand("simulate", "forward solve to traces");

  auto* cmd_tr = app.add_subcommand("timereverse", "reconstruct from traces");
  std::string measurements_path, tr_method = "wtr";
  cmd_tr->add_option("--measurements", measurements_path,
                     "measurement CSV written by simulate");
  cmd_tr->add_option("--method", tr_method, "tr|wtr");

  auto* cmd_tv = app.add_subcommand("denoise-tv", "TV-denoise a field file");
  double tv_gamma = 0.02;
  cmd_tv->add_option("--in", in_path, "input field (.ef1)")->required();
  cmd_tv->add_option("--gamma", tv_gamma, "regularization weight");

  auto* cmd_fr = app.add_subcommand("framelet", "rank-r filtering of a field");
  int pencil = 8, rank = 4;
  cmd_fr->add_option("--in", in_path, "input field (.ef1)")->required();
  cmd_fr->add_option("--pencil", pencil, "window length p");
  cmd_fr->add_option("--rank", rank, "rank budget r");

  auto* cmd_frames = app.add_subcommand("frames", "pooling frame diagnostics");
  auto* cmd_frames_check =
      cmd_frames->add_subcommand("check", "report frame defects");
  std::string frame_kind = "dual_frame";
  std::vector<int> frame_qs = {4, 8, 16, 64, 256};
  cmd_frames_check->add_option("--kind", frame_kind,
                               "identity|unet|dual_frame");
  cmd_frames_check->add_option("--q", frame_qs, "signal lengths");

  auto* cmd_learn = app.add_subcommand("learn", "train filter pairs");
  std::vector<std::string> learn_inputs, learn_targets;
  int learn_steps = 200;
  double learn_lr = 0.01;
  bool learn_relu = false;
  cmd_learn->add_option("--input", learn_inputs, "input fields (repeatable)")
      ->required();
  cmd_learn->add_option("--target", learn_targets, "target fields")
      ->required();
  cmd_learn->add_option("--pencil", pencil, "window length p");
  cmd_learn->add_option("--rank", rank, "rank budget r");
  cmd_learn->add_option("--steps", learn_steps, "gradient steps");
  cmd_learn->add_option("--lr", learn_lr, "initial learning rate");
  cmd_learn->add_flag("--relu", learn_relu, "ReLU on coefficients");

  auto* cmd_pipe = app.add_subcommand("pipeline", "full reconstruction run");

  auto* cmd_sweep = app.add_subcommand("sweep", "pipeline across one axis");
  std::string sweep_axis = "detectors";
  std::vector<int> sweep_values;
  int jobs = 1;
  cmd_sweep->add_option("--axis", sweep_axis, "detectors|times");
  cmd_sweep->add_option("--values", sweep_values, "ascending counts")
      ->required();
  cmd_sweep->add_option("--jobs", jobs, "concurrent points");

  auto* cmd_metrics = app.add_subcommand("metrics", "compare two fields");
  double dynamic_range = 1.0;
  cmd_metrics->add_option("--recon", in_path, "reconstruction field")
      ->required();
  cmd_metrics->add_option("--truth", truth_path, "reference field")
      ->required();
  cmd_metrics->add_option("--range", dynamic_range, "SSIM dynamic range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  g_error_dir = out_dir;
  namespace fs = std::filesystem;
  const auto out_path = [&](const std::string& name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
  };

  try {
    esi::PipelineConfig cfg =
        load_config(config_path, seed, seed_set, out_dir, out_set);
    g_error_dir = cfg.out_dir;

    if (*cmd_phantom) {
      g_error_dir = out_dir;
      cfg.phantom = esi::phantom_kind_from_string(phantom_kind);
      cfg.out_dir = out_dir;
      esi::VectorField2 f(cfg.grid.n_x, cfg.grid.n_x);
      switch (cfg.phantom) {
        case esi::PhantomKind::bump:
          f.x = esi::radial_bump(cfg.grid, 0.0, 0.0, 0.5);
          f.y = f.x;
          break;
        case esi::PhantomKind::offcenter:
          f.x = esi::radial_bump(cfg.grid, 0.3, 0.2, 0.25);
          break;
        case esi::PhantomKind::random_ellipses:
          f = esi::phantom_source(cfg.seed, cfg.grid, true);
          break;
        case esi::PhantomKind::shepp:
          f.x = esi::shepp_logan(cfg.grid, 0.9).image;
          break;
      }
      esi::write_field(f.x, out_path("phantom_x.ef1"));
      esi::write_field(f.y, out_path("phantom_y.ef1"));
      esi::write_field_png(f.x, out_path("phantom.png"));
      std::printf("wrote %s\n", out_path("phantom_x.ef1").c_str());
    } else if (*cmd_sim) {
      const esi::VectorField2 src = [&] {
        esi::PipelineConfig c = cfg;
        c.method = esi::Method::tr;
        esi::VectorField2 f(c.grid.n_x, c.grid.n_x);
        switch (c.phantom) {
          case esi::PhantomKind::bump:
            f.x = esi::radial_bump(c.grid, 0.0, 0.0, 0.5);
            f.y = f.x;
            return f;
          case esi::PhantomKind::offcenter:
            f.x = esi::radial_bump(c.grid, 0.3, 0.2, 0.25);
            return f;
          case esi::PhantomKind::random_ellipses:
            return esi::phantom_source(c.seed, c.grid, true);
          case esi::PhantomKind::shepp:
            f.x = esi::shepp_logan(c.grid, 0.9).image;
            return f;
        }
        esi::fail(esi::ErrorCode::InvalidArgument, "unknown phantom kind");
      }();
      const esi::DetectorArray det = esi::uniform_detectors(
          cfg.detector_count, cfg.time_count, cfg.grid);
      esi::MeasurementSet m = esi::simulate(src, cfg.grid, det, cfg.exec);
      m = esi::add_noise(m, cfg.snr_db, cfg.seed ^ 0x6e6f697365ull);
      esi::save_measurements(m, out_path("measurements.csv"));
      std::printf("wrote %s\n", out_path("measurements.csv").c_str());
    } else if (*cmd_tr) {
      esi::require(!measurements_path.empty(), esi::ErrorCode::InvalidArgument,
                   "--measurements is required");
      const esi::MeasurementSet m = esi::load_measurements(measurements_path);
      esi::VectorField2 recon;
      if (tr_method == "tr") {
        recon = esi::back_propagate(m, cfg.grid, cfg.exec);
      } else if (tr_method == "wtr") {
        recon = esi::weighted_time_reversal(m, cfg.grid, cfg.exec).weighted;
      } else {
        esi::fail(esi::ErrorCode::InvalidArgument,
                  "unknown method: " + tr_method);
      }
      esi::write_field(recon.x, out_path("recon_x.ef1"));
      esi::write_field(recon.y, out_path("recon_y.ef1"));
      esi::write_field_png(recon.x, out_path("recon.png"));
      std::printf("wrote %s\n", out_path("recon_x.ef1").c_str());
    } else if (*cmd_tv) {
      const esi::ScalarField f = esi::read_field(in_path);
      esi::TVParams tp;
      tp.gamma = tv_gamma;
      const esi::ScalarField d = esi::tv_denoise(f, tp);
      esi::write_field(d, out_path("denoised.ef1"));
      esi::write_field_png(d, out_path("denoised.png"));
      std::printf("tv=%.17g objective=%.17g\n", esi::tv_value(d),
                  esi::tv_objective(d, f, tv_gamma));
    } else if (*cmd_fr) {
      const esi::ScalarField f = esi::read_field(in_path);
      const Eigen::VectorXd v = field_raster(f);
      const esi::HankelLift h = esi::lift(v, pencil);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(h.matrix, Eigen::ComputeThinV);
      const Eigen::MatrixXd vr = svd.matrixV().leftCols(rank);
      const Eigen::VectorXd rec =
          esi::unlift(Eigen::MatrixXd(h.matrix * vr * vr.transpose()));
      const esi::ScalarField g = raster_field(rec, f.n_rows, f.n_cols);
      esi::write_field(g, out_path("filtered.ef1"));
      esi::write_field_png(g, out_path("filtered.png"));
      std::printf("relative_change=%.17g\n",
                  (rec - v).norm() / std::max(v.norm(), 1e-300));
    } else if (*cmd_frames) {
      esi::require(static_cast<bool>(*cmd_frames_check),
                   esi::ErrorCode::InvalidArgument,
                   "expected: frames check");
      esi::FrameKind kind;
      if (frame_kind == "identity") {
        kind = esi::FrameKind::identity;
      } else if (frame_kind == "unet") {
        kind = esi::FrameKind::unet;
      } else if (frame_kind == "dual_frame") {
        kind = esi::FrameKind::dual_frame;
      } else {
        esi::fail(esi::ErrorCode::InvalidArgument,
                  "unknown frame kind: " + frame_kind);
      }
      std::printf("kind,q,defect\n");
      for (int q : frame_qs) {
        const esi::PoolingFrame frame(kind, q);
        std::printf("%s,%d,%.17g\n", frame_kind.c_str(), q,
                    esi::frame_defect(frame));
      }
    } else if (*cmd_learn) {
      esi::require(learn_inputs.size() == learn_targets.size(),
                   esi::ErrorCode::InvalidArgument,
                   "--input and --target counts differ");
      std::vector<esi::TrainingPair> pairs;
      for (std::size_t i = 0; i < learn_inputs.size(); ++i) {
        esi::TrainingPair p;
        p.input = field_raster(esi::read_field(learn_inputs[i]));
        p.target = field_raster(esi::read_field(learn_targets[i]));
        pairs.push_back(std::move(p));
      }
      const esi::LearnedBasis basis = esi::train(
          pairs, pencil, rank, learn_relu, learn_steps, learn_lr, cfg.seed);
      esi::save_learned(basis, out_path("learned_basis.json"));
      std::printf("initial_loss=%.17g final_loss=%.17g\n",
                  basis.loss_trace.front(), basis.loss_trace.back());
    } else if (*cmd_pipe) {
      const esi::PipelineResult r = esi::run_pipeline(cfg);
      nlohmann::json j;
      j["x"] = nlohmann::json::parse(esi::metrics_to_json(r.report_x));
      if (r.has_y)
        j["y"] = nlohmann::json::parse(esi::metrics_to_json(r.report_y));
      std::printf("%s\n", j.dump(2).c_str());
    } else if (*cmd_sweep) {
      const esi::SweepAxis axis = esi::sweep_axis_from_string(sweep_axis);
      const std::vector<esi::SweepPoint> points =
          esi::sweep(cfg, axis, sweep_values, jobs);
      std::printf("value,psnr,ssim\n");
      for (const esi::SweepPoint& p : points)
        std::printf("%d,%.17g,%.17g\n", p.value, p.psnr, p.ssim);
    } else if (*cmd_metrics) {
      g_error_dir = out_dir;
      const esi::ScalarField recon = esi::read_field(in_path);
      const esi::ScalarField truth = esi::read_field(truth_path);
      const esi::MetricReport r =
          esi::evaluate_metrics(recon, truth, dynamic_range);
      std::printf("%s\n", esi::metrics_to_json(r).c_str());
    }
  } catch (const esi::Error& e) {
    write_error_json(esi::error_code_name(e.code()), e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == esi::ErrorCode::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    write_error_json("Unhandled", e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
