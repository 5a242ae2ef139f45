// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/trainer.hpp"

#include "radscale/kernels.hpp"
#include "radscale/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace radscale {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string padded(int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw InputError("train.iterations must be >= 1");
  if (batch_rays < 1) throw InputError("train.batch_rays must be >= 1");
  if (!(lr_density >= 0.0) || !(lr_color >= 0.0)) throw InputError("learning rates must be non-negative");
  if (samples_per_ray < 2) throw InputError("train.samples_per_ray must be >= 2");
  if (near_override && !(*near_override >= 0.0)) throw InputError("train.near_override must be >= 0");
  if (log_every < 0 || snapshot_every < 0) throw InputError("log_every and snapshot_every must be >= 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.eps >= 0.0)) {
    throw InputError("adam parameters need 0 <= beta < 1 and eps >= 0");
  }
  grad_scale.validate();
}

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "iteration,loss,train_psnr,near_mass,wall_clock_s,backward_s,backward_unscaled_s\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.loss << ',' << r.train_psnr << ',' << r.near_mass << ',' << r.wall_clock_s
        << ',' << r.backward_s << ',' << r.backward_unscaled_s << '\n';
  }
  return out.str();
}

TrainLog train(const Dataset& dataset, VoxelField<float>& field, const TrainConfig& cfg,
               const TrainCallback& on_step) {
  cfg.validate();
  if (dataset.train.empty()) throw InputError("train: dataset has no training cameras");
  if (dataset.images.size() != dataset.cameras.size()) throw InputError("train: image/camera count mismatch");

  std::vector<Camera> cameras = dataset.cameras;
  if (cfg.near_override) {
    for (auto& c : cameras) c.near = *cfg.near_override;
  }
  std::vector<Camera> train_cams;
  for (int idx : dataset.train) train_cams.push_back(cameras.at(idx));

  const auto batch = static_cast<std::size_t>(cfg.batch_rays);
  std::vector<Ray> rays(batch);
  std::vector<Vec3T<float>> targets(batch);
  std::vector<RenderOutput<float>> outputs(batch);
  std::vector<RaySampleBatch<float>> samples(batch);
  std::vector<Vec3T<float>> d_rgb(batch);
  GradientWorkspace<float> workspace;
  FieldGradients<float> scratch;
  scratch.resize(field.voxel_count());

  RenderSettings settings;
  settings.samples = cfg.samples_per_ray;
  settings.background = cfg.background;

  FieldOptimizer<float> opt;
  opt.params = cfg.adam;
  field.zero_gradients();

  TrainLog log;
  double elapsed = 0.0;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const auto step_start = Clock::now();
    CounterRng pick(derive_key(cfg.seed, Stream::kRaySelection, static_cast<std::uint64_t>(it)));
    for (std::size_t r = 0; r < batch; ++r) {
      const auto slot = pick.below(dataset.train.size());
      const int cam_index = dataset.train[slot];
      const Camera& cam = cameras[cam_index];
      const auto x = static_cast<int>(pick.below(static_cast<std::uint64_t>(cam.width)));
      const auto y = static_cast<int>(pick.below(static_cast<std::uint64_t>(cam.height)));
      rays[r] = generate_ray(cam, Vec2(x, y));
      const Image& img = dataset.images[cam_index];
      targets[r] = Vec3T<float>(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    }

    render_rays_parallel<float>(field, rays, settings,
                                derive_key(cfg.seed, Stream::kStratification, static_cast<std::uint64_t>(it)),
                                outputs, samples);

    double sq = 0.0;
    const float g = 2.0f / (3.0f * static_cast<float>(batch));
    for (std::size_t r = 0; r < batch; ++r) {
      const Vec3T<float> diff = outputs[r].rgb - targets[r];
      sq += static_cast<double>(diff.squaredNorm());
      d_rgb[r] = g * diff;
    }
    const double loss = sq / (3.0 * static_cast<double>(batch));
    if (!std::isfinite(loss)) {
      if (cfg.snapshot_dir) {
        std::error_code ec;
        fs::create_directories(*cfg.snapshot_dir, ec);
        save_checkpoint(field, *cfg.snapshot_dir / "diverged.rsvf");
      }
      throw DivergenceError("loss is not finite", it);
    }

    const auto bwd_start = Clock::now();
    backward_rays_parallel<float>(field, samples, d_rgb, cfg.grad_scale, field.gradients(), workspace);
    const double backward_s = seconds_since(bwd_start);

    apply_gradients(field, opt, cfg.lr_density, cfg.lr_color);
    field.zero_gradients();
    elapsed += seconds_since(step_start);

    const bool log_now = cfg.log_every > 0 && (it % cfg.log_every == 0 || it == cfg.iterations || it == 1);
    if (log_now) {
      // Same batch again with scaling off, timed only; the result is
      // discarded. The post-step field is used, which does not change the
      // amount of work.
      const auto ref_start = Clock::now();
      backward_rays_parallel<float>(field, samples, d_rgb, GradScaleConfig::none(), scratch, workspace);
      const double unscaled_s = seconds_since(ref_start);
      scratch.zero();

      TrainLogRecord rec;
      rec.iteration = it;
      rec.loss = loss;
      rec.train_psnr = loss > 0.0 ? -10.0 * std::log10(loss) : std::numeric_limits<double>::infinity();
      rec.near_mass =
          near_camera_mass(field, train_cams, cfg.collapse_radius, cfg.log_probe_rays, cfg.samples_per_ray).mean;
      rec.wall_clock_s = elapsed;
      rec.backward_s = backward_s;
      rec.backward_unscaled_s = unscaled_s;
      log.records.push_back(rec);
    }
    if (cfg.snapshot_every > 0 && cfg.snapshot_dir && it % cfg.snapshot_every == 0) {
      std::error_code ec;
      fs::create_directories(*cfg.snapshot_dir, ec);
      if (ec) throw IoError("cannot create snapshot directory " + cfg.snapshot_dir->string());
      save_checkpoint(field, *cfg.snapshot_dir / ("field_" + padded(it, 6) + ".rsvf"));
    }
    if (on_step) on_step(it, field, elapsed);
  }
  return log;
}

const ComparisonRow* ComparisonReport::find(const std::string& mode, int iteration) const {
  for (const auto& r : rows) {
    if (r.mode == mode && r.iteration == iteration) return &r;
  }
  return nullptr;
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "mode,iteration,psnr_test_mean,near_mass_mean,near_mass_max,depth_err,wall_clock_s\n";
  for (const auto& mode : modes) {
    for (const auto& r : rows) {
      if (r.mode != mode) continue;
      out << r.mode << ',' << r.iteration << ',' << r.psnr_test_mean << ',' << r.near_mass_mean << ','
          << r.near_mass_max << ',' << r.depth_err << ',' << r.wall_clock_s << '\n';
    }
  }
  return out.str();
}

VoxelField<float> initial_field(const GridSize& resolution, const Box& bounds) {
  return VoxelField<float>(resolution, bounds);
}

ComparisonRow evaluate(const Dataset& dataset, const VoxelField<float>& field, const EvalConfig& eval,
                       const std::vector<RenderedImage>& gt_renders) {
  ComparisonRow row;
  std::vector<RenderedImage> renders;
  renders.reserve(dataset.cameras.size());
  for (const auto& cam : dataset.cameras) renders.push_back(render_image(field, cam, eval.samples));

  double psnr_sum = 0.0;
  for (int idx : dataset.test) psnr_sum += psnr(renders[idx].rgb, dataset.images[idx]);
  row.psnr_test_mean = dataset.test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : psnr_sum / static_cast<double>(dataset.test.size());

  const CollapseReport mass =
      near_camera_mass(field, dataset.cameras, eval.collapse_radius, eval.probe_rays_per_camera, eval.samples);
  row.near_mass_mean = mass.mean;
  row.near_mass_max = mass.max;
  row.depth_err = depth_error(renders, gt_renders).mean;
  return row;
}

ComparisonReport run_experiment_matrix(const Dataset& dataset, const TrainConfig& base,
                                       const std::vector<GradScaleConfig>& modes, const EvalConfig& eval,
                                       const GridSize& resolution, const Box& bounds, const fs::path& out_dir) {
  if (modes.empty()) throw InputError("run_experiment_matrix needs at least one mode");
  const int report_cam = eval.report_camera.value_or(dataset.test.empty() ? 0 : dataset.test.front());
  if (report_cam < 0 || report_cam >= static_cast<int>(dataset.cameras.size())) {
    throw InputError("report camera index out of range");
  }

  std::vector<RenderedImage> gt_renders;
  for (const auto& cam : dataset.cameras) gt_renders.push_back(render_image(dataset.gt_field, cam, eval.samples));

  std::vector<int> checkpoints;
  for (int c : eval.checkpoints) {
    if (c >= 1 && c <= base.iterations) checkpoints.push_back(c);
  }
  if (std::find(checkpoints.begin(), checkpoints.end(), base.iterations) == checkpoints.end()) {
    checkpoints.push_back(base.iterations);
  }
  std::sort(checkpoints.begin(), checkpoints.end());

  ComparisonReport report;
  report.collapse_radius = eval.collapse_radius;
  const bool write = !out_dir.empty();
  const Camera& rc = dataset.cameras[report_cam];

  for (const auto& mode_cfg : modes) {
    const std::string name(to_string(mode_cfg.mode));
    report.modes.push_back(name);
    const fs::path mode_dir = out_dir / name;
    if (write) {
      std::error_code ec;
      fs::create_directories(mode_dir / "final", ec);
      if (ec) throw IoError("cannot create " + mode_dir.string() + ": " + ec.message());
    }

    TrainConfig cfg = base;
    cfg.grad_scale = mode_cfg;
    if (write && cfg.snapshot_every > 0) cfg.snapshot_dir = mode_dir / "snapshots";
    VoxelField<float> field = initial_field(resolution, bounds);

    auto on_step = [&](int it, const VoxelField<float>& f, double wall) {
      if (!std::binary_search(checkpoints.begin(), checkpoints.end(), it)) return;
      ComparisonRow row = evaluate(dataset, f, eval, gt_renders);
      row.mode = name;
      row.iteration = it;
      row.wall_clock_s = wall;
      report.rows.push_back(row);
      if (write) {
        const RenderedImage r = render_image(f, rc, eval.samples);
        const std::string stem = "depth_" + padded(it, 6);
        write_pfm(mode_dir / (stem + ".pfm"), r.depth);
        write_png(mode_dir / (stem + ".png"), colorize_depth(r.depth, r.opacity, 0.0, rc.far));
      }
    };

    try {
      const TrainLog log = train(dataset, field, cfg, on_step);
      if (write) write_file_atomic(mode_dir / "train_log.csv", log.to_csv());
    } catch (const DivergenceError&) {
      report.diverged.push_back(name);
      continue;
    }
    if (write) {
      save_checkpoint(field, mode_dir / "final.rsvf");
      for (std::size_t k = 0; k < dataset.cameras.size(); ++k) {
        const bool is_test = std::find(dataset.test.begin(), dataset.test.end(), static_cast<int>(k)) !=
                             dataset.test.end();
        if (!is_test) continue;
        const RenderedImage r = render_image(field, dataset.cameras[k], eval.samples);
        write_png(mode_dir / "final" / ("cam_" + padded(static_cast<int>(k), 4) + ".png"), r.rgb);
        write_pfm(mode_dir / "final" / ("depth_" + padded(static_cast<int>(k), 4) + ".pfm"), r.depth);
      }
    }
  }
  if (write) write_file_atomic(out_dir / "metrics.csv", report.to_csv());
  return report;
}

}  // namespace radscale
