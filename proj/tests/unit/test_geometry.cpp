// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/geometry.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace radscale {
namespace {

Camera square_camera(int size, double focal) {
  Camera c;
  c.width = size;
  c.height = size;
  c.focal = focal;
  c.principal_point = Vec2(size / 2.0, size / 2.0);
  c.near = 0.0;
  c.far = 5.0;
  return c;
}

TEST(GenerateRay, PrincipalPointLooksForward) {
  const Camera cam = square_camera(64, 64);
  // Pixel 31 + 0.5 jitter would be 31.5; the principal point is 32.0.
  const Ray r = generate_ray(cam, Vec2(32, 32), Vec2(0.0, 0.0));
  EXPECT_NEAR((r.direction - Vec3(0, 0, -1)).norm(), 0.0, 1e-15);
  EXPECT_EQ(r.t_near, cam.near);
  EXPECT_EQ(r.t_far, cam.far);
  EXPECT_EQ(r.origin, cam.position);
}

TEST(GenerateRay, OneFocalLengthRightIs45Degrees) {
  const Camera cam = square_camera(256, 64);
  const Ray r = generate_ray(cam, Vec2(128 + 64, 128), Vec2(0.0, 0.0));
  EXPECT_NEAR(std::atan2(r.direction.x(), -r.direction.z()), std::numbers::pi / 4, 1e-12);
  EXPECT_NEAR(r.direction.y(), 0.0, 1e-15);
}

TEST(GenerateRay, CornerMatchesInverseIntrinsics) {
  Camera cam = square_camera(64, 64);
  cam.rotation = look_at(Vec3(1, 2, 3), Vec3(0, 0, 0));
  cam.position = Vec3(1, 2, 3);
  for (const Vec2 px : {Vec2(0, 0), Vec2(63, 0), Vec2(0, 63), Vec2(63, 63)}) {
    const Ray r = generate_ray(cam, px);
    const Vec3 ref = oracle::backproject(64, 32, 32, cam.rotation, px.x() + 0.5, px.y() + 0.5);
    EXPECT_NEAR((r.direction - ref).norm(), 0.0, 1e-12);
    EXPECT_NEAR(r.direction.norm(), 1.0, 1e-12);
  }
}

TEST(GenerateRay, OutOfBoundsPixelIsInputError) {
  const Camera cam = square_camera(8, 8);
  EXPECT_THROW(generate_ray(cam, Vec2(8, 0)), InputError);
  EXPECT_THROW(generate_ray(cam, Vec2(-0.1, 0)), InputError);
  EXPECT_THROW(generate_ray(cam, Vec2(0, 8)), InputError);
}

TEST(Visibility, OnAxisAndBehind) {
  const Camera cam = square_camera(64, 64);
  EXPECT_TRUE(visibility(cam, Vec3(0, 0, -1)));
  EXPECT_FALSE(visibility(cam, Vec3(0, 0, 1)));
  EXPECT_FALSE(visibility(cam, Vec3(0, 0, 0)));
}

TEST(Visibility, IgnoresNearPlane) {
  Camera cam = square_camera(64, 64);
  cam.near = 1.0;
  EXPECT_TRUE(visibility(cam, Vec3(0, 0, -0.5)));
}

TEST(Visibility, FrustumEdgeMatchesExplicitProjection) {
  const Camera cam = square_camera(64, 40);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p(uni(gen), uni(gen), uni(gen) - 0.5);
    const double depth = -p.z();
    bool expected = false;
    if (depth > 0) {
      const double u = 32 + 40 * p.x() / depth;
      const double v = 32 - 40 * p.y() / depth;
      expected = u >= 0 && u < 64 && v >= 0 && v < 64;
    }
    EXPECT_EQ(visibility(cam, p), expected) << p.transpose();
  }
}

TEST(Geometry, RayReprojectsToItsPixel) {
  Camera cam = square_camera(48, 50);
  cam.position = Vec3(0.3, -0.2, 2.0);
  cam.rotation = look_at(cam.position, Vec3::Zero());
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 px(std::floor(uni(gen) * 48), std::floor(uni(gen) * 48));
    const Ray r = generate_ray(cam, px);
    for (int k = 0; k < 100; ++k) {
      const double t = 1e-3 + uni(gen) * (cam.far - 1e-3);
      const Vec3 p = r.at(t);
      ASSERT_TRUE(visibility(cam, p));
      const auto uv = project(cam, p);
      ASSERT_TRUE(uv.has_value());
      EXPECT_LE((*uv - (px + Vec2(0.5, 0.5))).cwiseAbs().maxCoeff(), 0.5);
    }
  }
}

TEST(Geometry, ImageRaysTileTheFieldOfView) {
  const Camera cam = square_camera(64, 48);
  double lo = 1e9, hi = -1e9;
  for (int x = 0; x < cam.width; ++x) {
    for (const double edge : {0.0, 1.0}) {
      const Ray r = generate_ray(cam, Vec2(x, 10), Vec2(edge == 1.0 ? 1.0 - 1e-15 : 0.0, 0.5));
      const double az = std::atan2(r.direction.x(), -r.direction.z());
      lo = std::min(lo, az);
      hi = std::max(hi, az);
    }
  }
  EXPECT_NEAR(hi - lo, horizontal_fov(cam), 1e-6);
  EXPECT_NEAR(horizontal_fov(cam), 2.0 * std::atan(64.0 / 96.0), 1e-15);
}

TEST(RingRig, FourCamerasOnAxes) {
  const Camera tmpl = square_camera(32, 32);
  const auto cams = ring_rig(4, 1.0, 0.0, Vec3::Zero(), tmpl);
  ASSERT_EQ(cams.size(), 4u);
  const Vec3 expected[] = {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(-1, 0, 0), Vec3(0, 0, -1)};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR((cams[k].position - expected[k]).norm(), 0.0, 1e-12);
    EXPECT_NEAR((cams[k].forward() - (-cams[k].position).normalized()).norm(), 0.0, 1e-9);
    EXPECT_NO_THROW(cams[k].validate());
  }
}

TEST(RingRig, SingleCameraAtAngleZero) {
  const auto cams = ring_rig(1, 2.0, 0.5, Vec3(1, 0, 0), square_camera(16, 16));
  ASSERT_EQ(cams.size(), 1u);
  EXPECT_NEAR((cams[0].position - Vec3(3, 0.5, 0)).norm(), 0.0, 1e-12);
}

TEST(RingRig, SixteenCamerasEvenlySpaced) {
  const auto cams = ring_rig(16, 1.0, 0.0, Vec3::Zero(), square_camera(16, 16));
  for (int k = 0; k < 16; ++k) {
    const Vec3 a = cams[k].position, b = cams[(k + 1) % 16].position;
    const double angle = std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
    EXPECT_NEAR(angle * 180.0 / std::numbers::pi, 22.5, 1e-9);
    const Mat3& r = cams[k].rotation;
    EXPECT_LE((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RingRig, RejectsBadArguments) {
  EXPECT_THROW(ring_rig(0, 1.0, 0.0, Vec3::Zero(), square_camera(8, 8)), InputError);
  EXPECT_THROW(ring_rig(4, 0.0, 0.0, Vec3::Zero(), square_camera(8, 8)), InputError);
}

TEST(DistanceRig, SpansRequestedDistances) {
  const auto cams = distance_rig(20, 0.3, 3.0, 30.0, Vec3::Zero(), square_camera(16, 16), 1.5);
  double lo = 1e9, hi = 0;
  for (const auto& c : cams) {
    const double d = c.position.norm();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    EXPECT_GE(d, 0.3 - 1e-12);
    EXPECT_LE(d, 3.0 + 1e-12);
    EXPECT_NEAR(c.far, d + 1.5, 1e-12);
    EXPECT_NEAR((c.forward() + c.position.normalized()).norm(), 0.0, 1e-9);
    EXPECT_TRUE(visibility(c, Vec3::Zero()));
  }
  EXPECT_NEAR(lo, 0.3, 1e-12);
  EXPECT_GT(hi, 2.5);
}

TEST(Camera, ValidateRejectsBadCameras) {
  Camera c = square_camera(8, 8);
  EXPECT_NO_THROW(c.validate());
  c.rotation(0, 0) = 1.001;
  EXPECT_THROW(c.validate(), InputError);
  c = square_camera(8, 8);
  c.near = 2.0;
  c.far = 1.0;
  EXPECT_THROW(c.validate(), InputError);
}

}  // namespace
}  // namespace radscale
