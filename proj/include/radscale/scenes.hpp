// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/field.hpp"
#include "radscale/geometry.hpp"
#include "radscale/image_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace radscale {

enum class SceneKind { kTexturedBox, kSphereCluster, kCheckerPlane };

std::string_view to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(std::string_view name);

/// Procedural ground truth, expressed in the same voxel representation as
/// the field being trained.
///
///   textured_box   cube of half-width `extent` with a 3D checker texture
///   sphere_cluster up to 8 spheres inside a ball of radius `extent`
///   checker_plane  horizontal slab (normal +Y) of half-size `extent` and
///                  thickness `thickness`, 2D checker texture
struct SceneSpec {
  SceneKind kind = SceneKind::kTexturedBox;
  Vec3 center = Vec3::Zero();
  double extent = 0.5;
  double thickness = 0.1;
  std::uint64_t texture_seed = 1;
  GridSize gt_resolution{64, 64, 64};
  Box bounds{Vec3::Constant(-1.5), Vec3::Constant(1.5)};
  double density = 200.0;

  void validate() const;
};

/// Raw density of empty ground-truth nodes; softplus of it is exactly 0 in
/// float.
inline constexpr double kEmptyRaw = -120.0;

/// Deterministic in spec (including texture_seed).
VoxelField<float> make_scene(const SceneSpec& spec);

struct Dataset {
  std::vector<Camera> cameras;
  std::vector<Image> images;
  VoxelField<float> gt_field;
  std::vector<int> train;
  std::vector<int> test;
};

/// Renders every camera from `gt` with unstratified sampling. Camera k goes
/// to the test split when test_every > 0 and k % test_every ==
/// test_every - 1; everything else trains.
Dataset render_dataset(const VoxelField<float>& gt, const std::vector<Camera>& cameras, int samples,
                       int test_every, const Vec3& background = Vec3::Zero());

/// Directory layout: cameras.json, images/cam_####.png, gt.rsvf, split.json.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Camera list as stored in cameras.json.
std::string cameras_to_json(const std::vector<Camera>& cameras);
std::vector<Camera> cameras_from_json(const std::string& text);

}  // namespace radscale
