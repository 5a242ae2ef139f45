// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/scenes.hpp"
#include "radscale/trainer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace radscale {

inline constexpr int kConfigSchemaVersion = 1;

/// Config problem with a location: "line:col" for syntax errors, a JSON
/// pointer such as "/train/lr_density" for field errors.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : InputError(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

enum class RigKind { kRing, kDistance };

struct RigConfig {
  RigKind kind = RigKind::kDistance;
  int count = 20;
  Vec3 target = Vec3::Zero();
  // ring
  double radius = 1.0;
  double height = 0.0;
  // distance
  double d_min = 0.3;
  double d_max = 3.0;
  double elevation_deg = 30.0;
  double far_margin = 1.5;
  // shared intrinsics
  int width = 64;
  int height_px = 64;
  double fov_deg = 60.0;
  double near = 0.0;
  double far = 3.0;

  Camera camera_template() const;
  std::vector<Camera> build() const;
};

struct DatasetConfig {
  int samples = 512;
  int test_every = 5;
  /// Existing dataset directory to load instead of generating in memory.
  std::optional<std::filesystem::path> path;
};

struct AnalyzeConfig {
  double d_min = 0.01;
  double d_max = 10.0;
  int per_decade = 32;
  int probe_rays = 64;
  std::int64_t mc_rays = 1 << 20;
  int mc_samples = 512;
  /// Side of the square on-axis column used for the Monte Carlo histogram.
  double mc_column = 0.05;
  int mc_bins = 96;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  SceneSpec scene;
  GridSize field_resolution{64, 64, 64};
  RigConfig rig;
  DatasetConfig dataset;
  TrainConfig train;
  bool auto_sigma = false;
  MappingKind mapping = MappingKind::kIdentity;
  EvalConfig metrics;
  std::vector<ScaleMode> compare_modes{ScaleMode::kNone, ScaleMode::kQuadratic, ScaleMode::kClamped};
  AnalyzeConfig analyze;
  std::filesystem::path output_dir = "runs/default";

  /// Applies the root seed to every derived seed (scene texture, training).
  void apply_seed(std::uint64_t s);
  /// Scale configuration for `mode` under this experiment's sigma / mapping
  /// settings; auto_sigma estimates sigma from the rig.
  GradScaleConfig scale_config(ScaleMode mode) const;
  void validate() const;
};

/// Parses a config document. Unknown keys are errors so typos do not pass
/// silently; missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Full document with every key, suitable as a template.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace radscale
