// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
//
// radscale gen|train|compare|analyze <config.json> [--seed N] [--threads N]
//          [--mode none|quadratic|clamped|clamped-sigma] [--iterations N]
//          [--out DIR]
//
// Exit codes: 0 success, 2 numerical divergence, 64 usage or config error,
// 74 I/O error.

#include "radscale/analysis.hpp"
#include "radscale/config.hpp"
#include "radscale/kernels.hpp"
#include "radscale/metrics.hpp"
#include "radscale/scenes.hpp"
#include "radscale/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace radscale;

namespace {

constexpr int kExitDivergence = 2;
constexpr int kExitUsage = 64;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<std::string> mode;
  std::optional<int> iterations;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("config", o.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Root seed for every random stream (default 42 or config)");
  cmd->add_option("--threads", o.threads, "Worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mode", o.mode, "Gradient scaling mode")
      ->check(CLI::IsMember({"none", "quadratic", "clamped", "clamped-sigma", "jacobian"}));
  cmd->add_option("--iterations", o.iterations, "Training iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory (overrides output_dir)");
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.apply_seed(*o.seed);
  if (o.iterations) cfg.train.iterations = *o.iterations;
  if (o.mode) cfg.train.grad_scale.mode = *parse_scale_mode(*o.mode);
  if (o.out) cfg.output_dir = *o.out;
  if (o.threads > 0) set_kernel_threads(o.threads);
  cfg.validate();
  return cfg;
}

// The parent must exist; only the leaf is created.
void make_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directory(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

Dataset build_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset.path) return load_dataset(*cfg.dataset.path);
  const VoxelField<float> gt = make_scene(cfg.scene);
  return render_dataset(gt, cfg.rig.build(), cfg.dataset.samples, cfg.dataset.test_every, cfg.train.background);
}

int cmd_gen(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  make_output_dir(cfg.output_dir);
  const VoxelField<float> gt = make_scene(cfg.scene);
  const Dataset ds =
      render_dataset(gt, cfg.rig.build(), cfg.dataset.samples, cfg.dataset.test_every, cfg.train.background);
  save_dataset(ds, cfg.output_dir);
  std::cout << "wrote " << ds.cameras.size() << " views (" << ds.train.size() << " train, " << ds.test.size()
            << " test) to " << cfg.output_dir.string() << "\n";
  return 0;
}

int run_matrix(const ExperimentConfig& cfg, const std::vector<ScaleMode>& modes) {
  make_output_dir(cfg.output_dir);
  write_file_atomic(cfg.output_dir / "config.json", config_to_json(cfg));
  const Dataset ds = build_dataset(cfg);
  std::vector<GradScaleConfig> scales;
  for (ScaleMode m : modes) scales.push_back(cfg.scale_config(m));
  const ComparisonReport report = run_experiment_matrix(ds, cfg.train, scales, cfg.metrics, cfg.field_resolution,
                                                        cfg.scene.bounds, cfg.output_dir);
  std::cout << "collapse radius " << report.collapse_radius << "\n" << report.to_csv();
  if (!report.diverged.empty()) {
    for (const auto& m : report.diverged) std::cerr << "radscale: mode " << m << " diverged\n";
    return kExitDivergence;
  }
  return 0;
}

int cmd_train(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  return run_matrix(cfg, {cfg.train.grad_scale.mode});
}

int cmd_compare(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  if (o.mode) return run_matrix(cfg, {cfg.train.grad_scale.mode});
  return run_matrix(cfg, cfg.compare_modes);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(std::numeric_limits<double>::max_digits10);
  s << v;
  return s.str();
}

int cmd_analyze(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  const std::vector<Camera> cams = cfg.rig.build();
  if (cams.empty()) throw InputError("analyze needs at least one camera");
  make_output_dir(cfg.output_dir);

  // Probe rays: a regular pixel grid of camera 0, starting at its center.
  const Camera& c0 = cams.front();
  std::vector<Ray> probes;
  const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(cfg.analyze.probe_rays))));
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const Vec2 px((i + 0.5) * c0.width / side, (j + 0.5) * c0.height / side);
      const Vec2 cell(std::floor(px.x()), std::floor(px.y()));
      Ray r = generate_ray(c0, cell, Vec2(px - cell));
      r.t_near = 0.0;
      probes.push_back(r);
    }
  }
  const auto bins = log_spaced(cfg.analyze.d_min, cfg.analyze.d_max, cfg.analyze.per_decade);
  write_profile_csv(cfg.output_dir / "visibility_curve.csv", visibility_curve(cams, probes, bins));
  write_profile_csv(cfg.output_dir / "sampling_density.csv", sampling_density_curve(cams, probes, bins));

  // Single-camera axis over the decade below the subject distance.
  const double subject = (c0.position - cfg.rig.target).norm();
  Camera axis_cam = c0;
  axis_cam.near = 0.0;
  const AxisProfile ax = axis_density_profile(axis_cam, 0.1 * subject, subject, cfg.analyze.mc_bins,
                                              cfg.analyze.mc_column, cfg.analyze.mc_rays, cfg.analyze.mc_samples,
                                              cfg.seed);
  std::ostringstream csv;
  csv << "distance,mc,approx,exact,ratio,fully_visible\n";
  std::vector<double> xs, ys, ratios;
  for (std::size_t b = 0; b < ax.distances.size(); ++b) {
    const double ratio = ax.approx[b] > 0.0 ? ax.monte_carlo[b] / ax.approx[b] : 0.0;
    csv << fmt(ax.distances[b]) << ',' << fmt(ax.monte_carlo[b]) << ',' << fmt(ax.approx[b]) << ','
        << fmt(ax.exact[b]) << ',' << fmt(ratio) << ',' << (ax.fully_visible[b] ? 1 : 0) << '\n';
    if (ax.fully_visible[b]) {
      xs.push_back(ax.distances[b]);
      ys.push_back(ax.monte_carlo[b]);
      ratios.push_back(ratio);
    }
  }
  write_file_atomic(cfg.output_dir / "axis_density.csv", csv.str());

  std::ostringstream summary;
  summary << "key,value\n";
  summary << "subject_distance," << fmt(subject) << '\n';
  summary << "fully_visible_bins," << xs.size() << '\n';
  if (xs.size() >= 2) {
    const double med = median(ratios);
    double dev = 0.0;
    for (double r : ratios) dev = std::max(dev, std::abs(r / med - 1.0));
    summary << "slope," << fmt(loglog_slope(xs, ys)) << '\n';
    summary << "ratio_median," << fmt(med) << '\n';
    summary << "ratio_max_rel_dev," << fmt(dev) << '\n';
  }
  write_file_atomic(cfg.output_dir / "summary.csv", summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel radiance-field trainer with per-sample gradient scaling"};
  app.require_subcommand(1);
  Options opts;
  CLI::App* gen = app.add_subcommand("gen", "Render a synthetic dataset");
  CLI::App* train = app.add_subcommand("train", "Train one field");
  CLI::App* compare = app.add_subcommand("compare", "Train every configured scaling mode and compare");
  CLI::App* analyze = app.add_subcommand("analyze", "Sampling-density and visibility profiles");
  for (CLI::App* cmd : {gen, train, compare, analyze}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(opts);
    if (*train) return cmd_train(opts);
    if (*compare) return cmd_compare(opts);
    return cmd_analyze(opts);
  } catch (const DivergenceError& e) {
    std::cerr << "radscale: diverged at iteration " << e.iteration() << ": " << e.what() << "\n";
    return kExitDivergence;
  } catch (const ConfigError& e) {
    std::cerr << "radscale: config error at " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "radscale: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "radscale: " << e.what() << "\n";
    return kExitIo;
  } catch (const InputError& e) {
    std::cerr << "radscale: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SingularityError& e) {
    std::cerr << "radscale: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "radscale: internal error: " << e.what() << "\n";
    return kExitSoftware;
  }
}
