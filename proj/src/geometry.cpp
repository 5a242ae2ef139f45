// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/geometry.hpp"

#include <cmath>
#include <numbers>

namespace radscale {

void Camera::validate() const {
  const double err = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-9)) {
    throw InputError("camera rotation is not orthonormal");
  }
  if (width <= 0 || height <= 0) throw InputError("camera image size must be positive");
  if (!(focal > 0.0)) throw InputError("camera focal length must be positive");
  if (!(near >= 0.0) || !(far > near)) throw InputError("camera clip range must satisfy far > near >= 0");
}

Ray generate_ray(const Camera& camera, const Vec2& px, const std::optional<Vec2>& jitter) {
  if (!(px.x() >= 0.0 && px.x() < camera.width && px.y() >= 0.0 && px.y() < camera.height)) {
    throw InputError("pixel coordinate outside the image");
  }
  const Vec2 offset = jitter.value_or(Vec2(0.5, 0.5));
  const Vec2 image = px + offset;
  const Vec3 local((image.x() - camera.principal_point.x()) / camera.focal,
                   -(image.y() - camera.principal_point.y()) / camera.focal, -1.0);
  Ray ray;
  ray.origin = camera.position;
  ray.direction = (camera.rotation * local).normalized();
  ray.t_near = camera.near;
  ray.t_far = camera.far;
  return ray;
}

std::optional<Vec2> project(const Camera& camera, const Vec3& p) {
  const Vec3 local = camera.rotation.transpose() * (p - camera.position);
  const double depth = -local.z();
  if (!(depth > 0.0)) return std::nullopt;
  return Vec2(camera.principal_point.x() + camera.focal * local.x() / depth,
              camera.principal_point.y() - camera.focal * local.y() / depth);
}

bool visibility(const Camera& camera, const Vec3& p) {
  const auto uv = project(camera, p);
  if (!uv) return false;
  return uv->x() >= 0.0 && uv->x() < camera.width && uv->y() >= 0.0 && uv->y() < camera.height;
}

Mat3 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-12) right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-12) right = forward.cross(Vec3::UnitX());
  right.normalize();
  const Vec3 cam_up = right.cross(forward);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = cam_up;
  r.col(2) = -forward;
  return r;
}

double horizontal_fov(const Camera& camera) {
  return 2.0 * std::atan(camera.width / (2.0 * camera.focal));
}

std::vector<Camera> ring_rig(int n, double radius, double height, const Vec3& target,
                             const Camera& tmpl) {
  if (n < 1) throw InputError("ring_rig needs at least one camera");
  if (!(radius > 0.0)) throw InputError("ring_rig radius must be positive");
  std::vector<Camera> cams;
  cams.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n;
    Camera cam = tmpl;
    cam.position = target + Vec3(radius * std::cos(phi), height, radius * std::sin(phi));
    cam.rotation = look_at(cam.position, target);
    cams.push_back(cam);
  }
  return cams;
}

std::vector<Camera> distance_rig(int n, double d_min, double d_max, double elevation_deg,
                                 const Vec3& target, const Camera& tmpl, double far_margin) {
  if (n < 1) throw InputError("distance_rig needs at least one camera");
  if (!(d_min > 0.0) || !(d_max >= d_min)) throw InputError("distance_rig needs 0 < d_min <= d_max");
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double elev = elevation_deg * std::numbers::pi / 180.0;
  std::vector<Camera> cams;
  cams.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double u = n == 1 ? 0.0 : std::fmod(k * golden, 1.0);
    const double dist = d_min * std::pow(d_max / d_min, u);
    const double phi = 2.0 * std::numbers::pi * k / n;
    const Vec3 dir(std::cos(elev) * std::cos(phi), std::sin(elev), std::cos(elev) * std::sin(phi));
    Camera cam = tmpl;
    cam.position = target + dist * dir;
    cam.rotation = look_at(cam.position, target);
    cam.far = dist + far_margin;
    cams.push_back(cam);
  }
  return cams;
}

}  // namespace radscale
