// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/common.hpp"

#include <optional>
#include <vector>

namespace radscale {

/// Pinhole camera. Camera space is right-handed with +X right, +Y up and
/// the camera looking down -Z. Image space has +x right, +y down, and pixel
/// (i, j) covers [i, i+1) x [j, j+1) with its center at (i + 0.5, j + 0.5).
struct Camera {
  Mat3 rotation = Mat3::Identity();  // world_from_camera
  Vec3 position = Vec3::Zero();
  double focal = 1.0;  // pixels
  Vec2 principal_point = Vec2(0.5, 0.5);
  int width = 1;
  int height = 1;
  double near = 0.0;
  double far = 1.0;

  Vec3 forward() const { return -rotation.col(2); }

  /// Throws InputError when the rotation is not orthonormal, the image is
  /// empty, or the clip range is not 0 <= near < far.
  void validate() const;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3(0, 0, -1);
  double t_near = 0.0;
  double t_far = 1.0;

  Vec3 at(double t) const { return origin + t * direction; }
};

/// Ray through pixel `px` (integer or fractional pixel index). The
/// back-projected image point is px + jitter, or the pixel center when no
/// jitter is given.
Ray generate_ray(const Camera& camera, const Vec2& px,
                 const std::optional<Vec2>& jitter = std::nullopt);

/// Image-plane coordinates of `p`, or nullopt when `p` is not strictly in
/// front of the camera.
std::optional<Vec2> project(const Camera& camera, const Vec3& p);

/// Field-of-view test: in front of the camera and projecting inside the
/// image rectangle. The near plane is deliberately not part of this test.
bool visibility(const Camera& camera, const Vec3& p);

/// World-from-camera rotation looking from `eye` at `target`.
Mat3 look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitY());

/// Full horizontal field of view in radians.
double horizontal_fov(const Camera& camera);

/// `n` cameras on a horizontal circle of `radius` at `height` above the
/// target, camera k at azimuth 2*pi*k/n, all looking at `target`.
/// Intrinsics and clip range are copied from `tmpl`.
std::vector<Camera> ring_rig(int n, double radius, double height, const Vec3& target,
                             const Camera& tmpl);

/// Inward-looking cameras at log-spread distances in [d_min, d_max] from
/// `target`, evenly spaced in azimuth at a fixed elevation. Distances follow
/// the golden-ratio sequence so near and far cameras interleave around the
/// circle. Each camera's far plane is its distance plus `far_margin`.
std::vector<Camera> distance_rig(int n, double d_min, double d_max, double elevation_deg,
                                 const Vec3& target, const Camera& tmpl, double far_margin);

}  // namespace radscale
