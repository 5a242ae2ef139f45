// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/renderer.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace radscale {
namespace {

Ray axis_ray(double t_near, double t_far) {
  Ray r;
  r.origin = Vec3::Zero();
  r.direction = Vec3(0, 0, -1);
  r.t_near = t_near;
  r.t_far = t_far;
  return r;
}

VoxelField<double> constant_field(double sigma, const Box& b = Box{Vec3(-1, -1, -2), Vec3(1, 1, 0.5)}) {
  VoxelField<double> f({2, 2, 2}, b);
  for (auto& v : f.density_raw()) v = softplus_inverse(sigma);
  return f;
}

VoxelField<double> random_field(const GridSize& res, std::uint64_t seed, double density_bias = 0.0) {
  VoxelField<double> f(res, Box{Vec3::Constant(-1.0), Vec3::Constant(1.0)});
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : f.density_raw()) v = n(gen) + density_bias;
  for (auto& v : f.color_raw()) v = n(gen);
  return f;
}

std::vector<Ray> random_rays(int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Ray> rays;
  for (int i = 0; i < count; ++i) {
    Ray r;
    r.origin = Vec3(n(gen), n(gen), n(gen)).normalized() * 1.8;
    const Vec3 aim = 0.4 * Vec3(n(gen), n(gen), n(gen));
    r.direction = (aim - r.origin).normalized();
    r.t_near = 0.0;
    r.t_far = 3.2;
    rays.push_back(r);
  }
  return rays;
}

TEST(SampleRay, BinMidpoints) {
  RaySampleBatch<double> b;
  sample_ray(axis_ray(0, 1), 4, false, nullptr, b);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int j = 0; j < 4; ++j) {
    EXPECT_DOUBLE_EQ(b.ts[j], expected[j]);
    EXPECT_DOUBLE_EQ(b.deltas_seg[j], 0.25);
    EXPECT_DOUBLE_EQ(b.cam_dist[j], expected[j]);
    EXPECT_NEAR((b.positions[j] - Vec3(0, 0, -expected[j])).norm(), 0.0, 1e-15);
  }
  sample_ray(axis_ray(0, 2), 2, false, nullptr, b);
  EXPECT_DOUBLE_EQ(b.ts[0], 0.5);
  EXPECT_DOUBLE_EQ(b.ts[1], 1.5);
}

TEST(SampleRay, StratifiedStaysInBins) {
  RaySampleBatch<double> b;
  CounterRng rng(99);
  for (int trial = 0; trial < 10000; ++trial) {
    sample_ray(axis_ray(0.2, 1.4), 6, true, &rng, b);
    for (int j = 0; j < 6; ++j) {
      EXPECT_GE(b.ts[j], 0.2 + j * 0.2 - 1e-12);
      EXPECT_LE(b.ts[j], 0.2 + (j + 1) * 0.2 + 1e-12);
    }
  }
}

TEST(SampleRay, Errors) {
  RaySampleBatch<double> b;
  EXPECT_THROW(sample_ray(axis_ray(0, 1), 1, false, nullptr, b), InputError);
  EXPECT_THROW(sample_ray(axis_ray(0, 1), 4, true, nullptr, b), InputError);
}

TEST(RenderRay, EmptyFieldShowsBackground) {
  VoxelField<double> f({2, 2, 2}, Box{Vec3::Constant(-1), Vec3::Constant(1)});
  for (auto& v : f.density_raw()) v = -200.0;
  RenderSettings s;
  s.samples = 32;
  s.background = Vec3(0.2, 0.4, 0.6);
  const auto out = render_ray(f, axis_ray(0, 1), s);
  EXPECT_LT(out.opacity, 1e-80);
  EXPECT_NEAR((out.rgb - s.background).norm(), 0.0, 1e-15);
}

TEST(RenderRay, HomogeneousMediumMatchesBeerLambert) {
  const auto f = constant_field(1.0);
  RenderSettings s;
  s.samples = 512;
  RaySampleBatch<double> b;
  const auto out = render_ray(f, axis_ray(0, 1), s, nullptr, b);
  EXPECT_NEAR(out.opacity, 1.0 - std::exp(-1.0), 1e-3);
  EXPECT_NEAR(out.opacity + b.trans.back(), 1.0, 1e-12);
}

TEST(RenderRay, MatchesIndependentCompositing) {
  const auto f = random_field({6, 6, 6}, 3);
  RenderSettings s;
  s.samples = 64;
  s.background = Vec3(0.1, 0.2, 0.3);
  RaySampleBatch<double> b;
  for (const Ray& r : random_rays(20, 4)) {
    const auto out = render_ray(f, r, s, nullptr, b);
    std::vector<double> t(b.ts.begin(), b.ts.end()), d(b.deltas_seg.begin(), b.deltas_seg.end());
    std::vector<double> sig;
    std::vector<Vec3> rgb;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const auto q = f.query(r.at(t[j]));
      sig.push_back(q.sigma);
      rgb.push_back(q.rgb);
    }
    const auto ref = oracle::composite(t, d, sig, rgb, s.background);
    EXPECT_NEAR((out.rgb - ref.rgb).norm(), 0.0, 1e-12);
    EXPECT_NEAR(out.opacity, ref.opacity, 1e-12);
    EXPECT_NEAR(out.depth, ref.depth, 1e-10);
  }
}

TEST(RenderRay, WeightsSumWithResidualToOne) {
  const auto f = random_field({8, 8, 8}, 5, 1.0);
  RenderSettings s;
  s.samples = 128;
  RaySampleBatch<double> b;
  for (const Ray& r : random_rays(50, 6)) {
    render_ray(f, r, s, nullptr, b);
    double sum = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      EXPECT_GE(b.weight[j], 0.0);
      EXPECT_GE(b.alpha[j], 0.0);
      EXPECT_LT(b.alpha[j], 1.0);
      EXPECT_LE(b.trans[j + 1], b.trans[j]);
      sum += b.weight[j];
    }
    EXPECT_EQ(b.trans[0], 1.0);
    EXPECT_NEAR(sum + b.trans.back(), 1.0, 1e-12);
  }
}

TEST(RenderRay, ThinOpaqueSlabDepth) {
  VoxelField<double> f({2, 2, 2001}, Box{Vec3(-1, -1, -1), Vec3(1, 1, 0)});
  for (int k = 0; k < 2001; ++k) {
    const double z = f.node_position(0, 0, k).z();
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) f.density_raw()[f.index(i, j, k)] = std::abs(z + 0.5) <= 0.002 ? 1e4 : -200.0;
    }
  }
  RenderSettings s;
  s.samples = 512;
  const auto out = render_ray(f, axis_ray(0, 1), s);
  EXPECT_NEAR(out.opacity, 1.0, 1e-9);
  EXPECT_NEAR(out.depth, 0.5, 1.0 / 512);
}

TEST(RenderRay, RiemannSumConvergesWithRefinement) {
  // Density varies along the ray; the reference integral uses Simpson's rule
  // on the exact interpolated density.
  VoxelField<double> f({2, 2, 2}, Box{Vec3(-1, -1, -1.5), Vec3(1, 1, 0.5)});
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) f.density_raw()[f.index(i, j, k)] = k == 0 ? 2.0 : -1.0;
    }
  }
  const Ray r = axis_ray(0.0, 1.0);
  const int m = 200000;
  double integral = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / m;
    const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
    integral += w * f.query(r.at(t)).sigma;
  }
  integral /= 3.0 * m;
  const double exact = 1.0 - std::exp(-integral);
  double prev_err = 0.0;
  for (int n : {8, 16, 32, 64, 128}) {
    RenderSettings s;
    s.samples = n;
    const double err = std::abs(render_ray(f, r, s).opacity - exact);
    if (prev_err > 0.0) EXPECT_LT(err, 0.6 * prev_err) << "n = " << n;
    prev_err = err;
  }
}

TEST(RenderRay, ForwardIsIdenticalAcrossScaleModes) {
  // Scaling is backward-only: render_ray takes no scale configuration, and
  // gradients are the only thing that differs between modes.
  const auto f = random_field({6, 6, 6}, 8);
  RenderSettings s;
  s.samples = 48;
  RaySampleBatch<double> b1, b2;
  for (const Ray& r : random_rays(100, 9)) {
    const auto o1 = render_ray(f, r, s, nullptr, b1);
    FieldGradients<double> g;
    g.resize(f.voxel_count());
    render_ray_backward(f, b1, Vec3(1, 1, 1), GradScaleConfig::clamped(), g);
    const auto o2 = render_ray(f, r, s, nullptr, b2);
    EXPECT_EQ(o1.rgb, o2.rgb);
    EXPECT_EQ(o1.depth, o2.depth);
    EXPECT_EQ(o1.opacity, o2.opacity);
  }
}

oracle::GridLD to_long_double(const VoxelField<double>& f) {
  oracle::GridLD g{f.resolution(), f.bounds().min, f.bounds().max, {}, {}};
  g.density.assign(f.density_raw().begin(), f.density_raw().end());
  g.color.assign(f.color_raw().begin(), f.color_raw().end());
  return g;
}

long double mse_loss_ld(const oracle::GridLD& g, const std::vector<Ray>& rays, const std::vector<Vec3>& targets,
                        const RenderSettings& s) {
  long double loss = 0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto c = oracle::render_ld(g, rays[i].origin, rays[i].direction, rays[i].t_near, rays[i].t_far, s.samples,
                                     s.background);
    loss += (c - targets[i].cast<long double>()).squaredNorm();
  }
  return loss;
}

TEST(RenderRay, AgreesWithExtendedPrecisionModel) {
  const auto f = random_field({16, 16, 16}, 10);
  const auto g = to_long_double(f);
  RenderSettings s;
  s.samples = 64;
  s.background = Vec3(0.3, 0.3, 0.3);
  for (const Ray& r : random_rays(8, 11)) {
    const Vec3 ref = oracle::render_ld(g, r.origin, r.direction, r.t_near, r.t_far, s.samples, s.background)
                         .cast<double>();
    EXPECT_NEAR((render_ray(f, r, s).rgb - ref).norm(), 0.0, 1e-12);
  }
}

TEST(RenderRayBackward, MatchesFiniteDifferencesModeNone) {
  auto f = random_field({16, 16, 16}, 10);
  const auto rays = random_rays(6, 11);
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> targets;
  for (std::size_t i = 0; i < rays.size(); ++i) targets.emplace_back(u(gen), u(gen), u(gen));
  RenderSettings s;
  s.samples = 64;
  s.background = Vec3(0.3, 0.3, 0.3);

  f.gradients().resize(f.voxel_count());
  RaySampleBatch<double> b;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto out = render_ray(f, rays[i], s, nullptr, b);
    render_ray_backward(f, b, Vec3(2.0 * (out.rgb - targets[i])), GradScaleConfig::none());
  }
  std::vector<std::size_t> touched;
  for (std::size_t v = 0; v < f.voxel_count(); ++v) {
    if (f.gradients().density[v] != 0.0) touched.push_back(v);
  }
  ASSERT_GE(touched.size(), 50u);
  std::shuffle(touched.begin(), touched.end(), gen);
  auto g = to_long_double(f);
  const long double h = 1e-5L;
  for (int k = 0; k < 50; ++k) {
    const std::size_t v = touched[k];
    const bool color = k % 2 == 1;
    long double& p = color ? g.color[3 * v + k % 3] : g.density[v];
    const double analytic = color ? f.gradients().color[3 * v + k % 3] : f.gradients().density[v];
    const long double p0 = p;
    p = p0 + h;
    const long double up = mse_loss_ld(g, rays, targets, s);
    p = p0 - h;
    const long double down = mse_loss_ld(g, rays, targets, s);
    p = p0;
    const double fd = static_cast<double>((up - down) / (2 * h));
    EXPECT_LT(oracle::rel_error(analytic, fd), 1e-5) << "voxel " << v << (color ? " color" : " density");
  }
}

TEST(RenderRayBackward, ClampedBeyondUnitDistanceEqualsNone) {
  const auto f = random_field({6, 6, 6}, 13);
  RenderSettings s;
  s.samples = 32;
  Ray r = random_rays(1, 14)[0];
  r.t_near = 1.0;
  RaySampleBatch<double> b;
  render_ray(f, r, s, nullptr, b);
  FieldGradients<double> g0, g1;
  g0.resize(f.voxel_count());
  g1.resize(f.voxel_count());
  render_ray_backward(f, b, Vec3(0.3, -0.2, 0.9), GradScaleConfig::none(), g0);
  render_ray_backward(f, b, Vec3(0.3, -0.2, 0.9), GradScaleConfig::clamped(), g1);
  EXPECT_EQ(g0.density, g1.density);
  EXPECT_EQ(g0.color, g1.color);
}

TEST(RenderRayBackward, SingleCellSampleScaledByDeltaSquared) {
  // One sample inside a 2x2x2 field; the other lies outside the bounds.
  VoxelField<double> f({2, 2, 2}, Box{Vec3(-0.1, -0.1, -0.55), Vec3(0.1, 0.1, -0.45)});
  std::mt19937_64 gen(15);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : f.density_raw()) v = n(gen);
  for (auto& v : f.color_raw()) v = n(gen);
  Ray r = axis_ray(0.45, 0.65);
  RenderSettings s;
  s.samples = 2;
  RaySampleBatch<double> b;
  render_ray(f, r, s, nullptr, b);
  ASSERT_NEAR(b.cam_dist[0], 0.5, 1e-15);
  FieldGradients<double> g0, g1;
  g0.resize(8);
  g1.resize(8);
  render_ray_backward(f, b, Vec3(0.5, 0.1, -0.4), GradScaleConfig::none(), g0);
  render_ray_backward(f, b, Vec3(0.5, 0.1, -0.4), GradScaleConfig::clamped(), g1);
  for (std::size_t i = 0; i < 8; ++i) {
    ASSERT_NE(g0.density[i], 0.0);
    EXPECT_NEAR(g1.density[i], 0.25 * g0.density[i], 1e-15 * std::abs(g0.density[i]));
  }
  for (std::size_t i = 0; i < 24; ++i) EXPECT_NEAR(g1.color[i], 0.25 * g0.color[i], 1e-15 * std::abs(g0.color[i]));
}

TEST(RenderRayBackward, RejectsForeignBatch) {
  const auto f1 = random_field({4, 4, 4}, 16);
  const auto f2 = random_field({4, 4, 4}, 17);
  RenderSettings s;
  s.samples = 8;
  RaySampleBatch<double> b;
  render_ray(f1, axis_ray(0, 1), s, nullptr, b);
  FieldGradients<double> g;
  g.resize(f2.voxel_count());
  EXPECT_THROW(render_ray_backward(f2, b, Vec3(Vec3::Ones()), GradScaleConfig::none(), g), ContractError);
}

TEST(RenderImage, SinglePixelEqualsRenderRay) {
  const auto f = random_field({6, 6, 6}, 18).cast<float>();
  Camera cam;
  cam.width = cam.height = 1;
  cam.focal = 1.0;
  cam.principal_point = Vec2(0.5, 0.5);
  cam.position = Vec3(0, 0, 1.5);
  cam.far = 3.0;
  const auto img = render_image(f, cam, 64);
  RenderSettings s;
  s.samples = 64;
  const auto out = render_ray(f, generate_ray(cam, Vec2(0, 0)), s);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(img.rgb.at(0, 0, c), out.rgb[c]);
  EXPECT_EQ(img.depth.at(0, 0), out.depth);
  EXPECT_EQ(img.opacity.at(0, 0), out.opacity);
}

TEST(RenderImage, EmptyFieldIsBackground) {
  VoxelField<float> f({2, 2, 2}, Box{Vec3::Constant(-1), Vec3::Constant(1)});
  for (auto& v : f.density_raw()) v = -120.0f;
  Camera cam;
  cam.width = 5;
  cam.height = 4;
  cam.focal = 4;
  cam.principal_point = Vec2(2.5, 2);
  cam.position = Vec3(0, 0, 2);
  cam.far = 4;
  const auto img = render_image(f, cam, 16, Vec3(0.25, 0.5, 0.75));
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      EXPECT_FLOAT_EQ(img.rgb.at(x, y, 0), 0.25f);
      EXPECT_FLOAT_EQ(img.rgb.at(x, y, 2), 0.75f);
      EXPECT_EQ(img.opacity.at(x, y), 0.0f);
    }
  }
}

}  // namespace
}  // namespace radscale
