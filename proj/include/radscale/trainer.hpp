// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/field.hpp"
#include "radscale/metrics.hpp"
#include "radscale/optimizer.hpp"
#include "radscale/scaler.hpp"
#include "radscale/scenes.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace radscale {

struct TrainConfig {
  int iterations = 4000;
  int batch_rays = 4096;
  double lr_density = 1e-1;
  double lr_color = 1e-2;
  AdamParams adam;
  int samples_per_ray = 192;
  GradScaleConfig grad_scale;
  /// Replaces every camera's near plane during training when set.
  std::optional<double> near_override;
  std::uint64_t seed = 42;
  Vec3 background = Vec3::Zero();
  /// 0 disables logging / snapshots.
  int log_every = 100;
  int snapshot_every = 0;
  /// Snapshots (and the divergence dump) go here when set.
  std::optional<std::filesystem::path> snapshot_dir;
  /// Probe settings for the near-camera mass column of the log.
  double collapse_radius = kDefaultCollapseRadius;
  int log_probe_rays = 64;

  void validate() const;
};

struct TrainLogRecord {
  int iteration = 0;
  double loss = 0.0;
  double train_psnr = 0.0;
  double near_mass = 0.0;
  double wall_clock_s = 0.0;
  /// Backward time of this step with the configured scaling, and of the same
  /// batch re-run with scaling off; their ratio is the scaling overhead.
  double backward_s = 0.0;
  double backward_unscaled_s = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRecord> records;

  /// Header: iteration,loss,train_psnr,near_mass,wall_clock_s,backward_s,
  /// backward_unscaled_s.
  std::string to_csv() const;
};

/// Called after the optimizer step of `iteration` (1-based) with the
/// training wall-clock so far (excluding time spent in the callback).
using TrainCallback = std::function<void(int iteration, const VoxelField<float>& field, double wall_clock_s)>;

/// Stochastic training loop. Each iteration draws batch_rays (camera,
/// pixel) pairs uniformly from the training split with the ray-selection
/// stream of `seed`, renders them stratified, takes the mean squared error
/// over rays and channels, back-propagates with cfg.grad_scale, and applies
/// one Adam step. The loss sequence is reproducible for a fixed seed and
/// thread count.
///
/// Throws DivergenceError when the loss is not finite; the field is then
/// written to snapshot_dir/diverged.rsvf if a directory is configured.
TrainLog train(const Dataset& dataset, VoxelField<float>& field, const TrainConfig& cfg,
               const TrainCallback& on_step = {});

/// Evaluation settings for the comparison harness.
struct EvalConfig {
  std::vector<int> checkpoints{500, 1250, 2000, 4000};
  double collapse_radius = kDefaultCollapseRadius;
  int probe_rays_per_camera = 1024;
  int samples = 192;
  /// Camera whose depth map is written at each checkpoint (dataset index).
  /// Defaults to the first test camera, or camera 0 without a test split.
  std::optional<int> report_camera;
};

struct ComparisonRow {
  std::string mode;
  int iteration = 0;
  double psnr_test_mean = 0.0;
  double near_mass_mean = 0.0;
  double near_mass_max = 0.0;
  double depth_err = 0.0;
  double wall_clock_s = 0.0;
};

struct ComparisonReport {
  std::vector<std::string> modes;
  std::vector<ComparisonRow> rows;
  /// Modes whose training diverged; their rows stop at the last checkpoint
  /// reached.
  std::vector<std::string> diverged;
  double collapse_radius = kDefaultCollapseRadius;

  const ComparisonRow* find(const std::string& mode, int iteration) const;
  /// Columns: mode,iteration,psnr_test_mean,near_mass_mean,near_mass_max,
  /// depth_err,wall_clock_s. Rows are grouped by mode in configured order.
  std::string to_csv() const;
};

/// Field every run starts from (uniform near-empty initialization).
VoxelField<float> initial_field(const GridSize& resolution, const Box& bounds);

/// Evaluates `field` against the dataset: mean PSNR over test cameras,
/// near-camera mass and depth error over all cameras. `gt_renders` holds
/// renders of the ground truth for every camera at eval.samples.
ComparisonRow evaluate(const Dataset& dataset, const VoxelField<float>& field, const EvalConfig& eval,
                       const std::vector<RenderedImage>& gt_renders);

/// Trains one field per mode from the same initial field and seed for
/// base.iterations steps. Checkpoints beyond that are dropped and the final
/// iteration is always evaluated. At each checkpoint the report camera's
/// depth is written to
/// `out_dir/<mode>/depth_<iter>.{png,pfm}` and a metrics row is recorded;
/// final test-view renders go to `out_dir/<mode>/final/`. Nothing is
/// written when out_dir is empty.
ComparisonReport run_experiment_matrix(const Dataset& dataset, const TrainConfig& base,
                                       const std::vector<GradScaleConfig>& modes, const EvalConfig& eval,
                                       const GridSize& resolution, const Box& bounds,
                                       const std::filesystem::path& out_dir = {});

}  // namespace radscale
