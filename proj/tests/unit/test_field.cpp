// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/field.hpp"
#include "radscale/image_io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

namespace radscale {
namespace {

VoxelField<double> random_field(const GridSize& res, std::uint64_t seed) {
  VoxelField<double> f(res, Box{Vec3(-1, -0.5, -1), Vec3(1, 1.5, 0.5)});
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : f.density_raw()) v = n(gen);
  for (auto& v : f.color_raw()) v = n(gen);
  f.gradients().resize(f.voxel_count());
  return f;
}

Vec3 random_inside(const Box& b, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return b.min + b.size().cwiseProduct(Vec3(u(gen), u(gen), u(gen)));
}

TEST(Activations, SoftplusAndInverse) {
  for (double y : {1e-4, 0.01, 0.5, 3.0, 40.0}) EXPECT_NEAR(softplus(softplus_inverse(y)), y, 1e-12 * (1 + y));
  EXPECT_EQ(softplus(-120.0f), 0.0f);
  EXPECT_NEAR(sigmoid(logit(0.3)), 0.3, 1e-15);
}

TEST(VoxelField, InitializedNearEmpty) {
  const VoxelField<double> f({4, 4, 4}, Box{Vec3::Zero(), Vec3::Ones()});
  const auto s = f.query(Vec3(0.3, 0.4, 0.6));
  EXPECT_NEAR(s.sigma, 0.01, 1e-12);
  EXPECT_NEAR((s.rgb - Vec3::Constant(0.5)).norm(), 0.0, 1e-15);
}

TEST(VoxelField, RejectsBadShape) {
  EXPECT_THROW(VoxelField<float>({1, 4, 4}, Box{Vec3::Zero(), Vec3::Ones()}), InputError);
  EXPECT_THROW(VoxelField<float>({4, 4, 4}, Box{Vec3::Zero(), Vec3(1, 0, 1)}), InputError);
}

TEST(Query, AtNodeReturnsNodeValue) {
  const auto f = random_field({5, 4, 6}, 1);
  const std::size_t v = f.index(2, 1, 3);
  const auto s = f.query(f.node_position(2, 1, 3));
  EXPECT_NEAR(s.sigma, softplus(f.density_raw()[v]), 1e-12);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(s.rgb[c], sigmoid(f.color_raw()[3 * v + c]), 1e-12);
}

TEST(Query, OutsideIsVacuum) {
  const auto f = random_field({4, 4, 4}, 2);
  const auto s = f.query(Vec3(0, 0, 0.9));
  EXPECT_EQ(s.sigma, 0.0);
  EXPECT_EQ(s.rgb, Vec3::Zero());
}

TEST(Query, ConstantFieldIsPartitionOfUnity) {
  VoxelField<double> f({3, 3, 3}, Box{Vec3::Zero(), Vec3::Ones()});
  for (auto& v : f.density_raw()) v = 0.7;
  std::mt19937_64 gen(5);
  for (int i = 0; i < 200; ++i) {
    EXPECT_NEAR(f.query(random_inside(f.bounds(), gen)).sigma, softplus(0.7), 1e-14);
  }
}

TEST(Query, MatchesEightCornerFormula) {
  const auto f = random_field({5, 6, 7}, 3);
  std::mt19937_64 gen(9);
  const Vec3 sp = f.spacing();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 p = random_inside(f.bounds(), gen);
    const Vec3 g = (p - f.bounds().min).cwiseQuotient(sp);
    auto node = [&](int i, int j, int k) { return f.density_raw()[f.index(i, j, k)]; };
    const double raw = oracle::trilinear(node, std::min(g.x(), 4.0 - 1e-12), std::min(g.y(), 5.0 - 1e-12),
                                         std::min(g.z(), 6.0 - 1e-12));
    EXPECT_NEAR(f.query(p).sigma, softplus(raw), 1e-10);
  }
}

TEST(Query, ContinuousAcrossFaces) {
  const auto f = random_field({6, 6, 6}, 4);
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> axis(0, 2), node(1, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec3 p = random_inside(f.bounds(), gen);
    const int a = axis(gen);
    p[a] = f.bounds().min[a] + node(gen) * f.spacing()[a];
    Vec3 e = Vec3::Zero();
    e[a] = 1e-7;
    const auto lo = f.query(p - e), hi = f.query(p + e);
    EXPECT_LT(std::abs(lo.sigma - hi.sigma), 1e-5);
    EXPECT_LT((lo.rgb - hi.rgb).norm(), 1e-5);
  }
}

TEST(QueryBackward, ZeroUpstreamLeavesAccumulators) {
  auto f = random_field({4, 4, 4}, 6);
  f.query_backward(Vec3(0.1, 0.2, 0.3), 0.0, Vec3::Zero());
  for (double g : f.gradients().density) EXPECT_EQ(g, 0.0);
  for (double g : f.gradients().color) EXPECT_EQ(g, 0.0);
}

TEST(QueryBackward, AtNodeTouchesOnlyThatNode) {
  auto f = random_field({4, 4, 4}, 7);
  const std::size_t v = f.index(1, 2, 1);
  f.query_backward(f.node_position(1, 2, 1), 1.0, Vec3::Zero());
  const double raw = f.density_raw()[v];
  const double expected = 1.0 / (1.0 + std::exp(-raw));  // softplus'
  for (std::size_t i = 0; i < f.voxel_count(); ++i) {
    EXPECT_NEAR(f.gradients().density[i], i == v ? expected : 0.0, 1e-12);
  }
}

TEST(QueryBackward, MatchesFiniteDifferencesOnCorners) {
  auto f = random_field({5, 5, 5}, 8);
  std::mt19937_64 gen(13);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 p = random_inside(f.bounds(), gen);
    const double ds = n(gen);
    const Vec3 dc(n(gen), n(gen), n(gen));
    f.zero_gradients();
    f.query_backward(p, ds, dc);
    TrilinearStencil<double> st;
    ASSERT_TRUE(f.stencil(p, st));
    oracle::GridLD g{f.resolution(), f.bounds().min, f.bounds().max, {}, {}};
    g.density.assign(f.density_raw().begin(), f.density_raw().end());
    g.color.assign(f.color_raw().begin(), f.color_raw().end());
    auto objective = [&] {
      long double sigma = 0;
      Eigen::Matrix<long double, 3, 1> rgb;
      g.sample(p, sigma, rgb);
      return ds * sigma + dc.cast<long double>().dot(rgb);
    };
    auto fd = [&](long double& param) {
      const long double h = 1e-5L, p0 = param;
      param = p0 + h;
      const long double up = objective();
      param = p0 - h;
      const long double down = objective();
      param = p0;
      return static_cast<double>((up - down) / (2 * h));
    };
    for (int c = 0; c < 8; ++c) {
      const std::size_t v = st.index[c];
      EXPECT_LT(oracle::rel_error(f.gradients().density[v], fd(g.density[v])), 1e-6) << "corner " << c;
      for (int ch = 0; ch < 3; ++ch) {
        EXPECT_LT(oracle::rel_error(f.gradients().color[3 * v + ch], fd(g.color[3 * v + ch])), 1e-6);
      }
    }
  }
}

TEST(QueryBackward, IsAdjointOfQueryAlongRandomDirection) {
  auto f = random_field({4, 5, 4}, 21);
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 p = random_inside(f.bounds(), gen);
  const double ds = n(gen);
  const Vec3 dc(n(gen), n(gen), n(gen));
  f.query_backward(p, ds, dc);
  std::vector<double> vd(f.voxel_count()), vc(3 * f.voxel_count());
  for (auto& x : vd) x = n(gen);
  for (auto& x : vc) x = n(gen);
  double inner = 0.0;
  for (std::size_t i = 0; i < vd.size(); ++i) inner += f.gradients().density[i] * vd[i];
  for (std::size_t i = 0; i < vc.size(); ++i) inner += f.gradients().color[i] * vc[i];
  const auto d0 = std::vector<double>(f.density_raw().begin(), f.density_raw().end());
  const auto c0 = std::vector<double>(f.color_raw().begin(), f.color_raw().end());
  auto eval = [&](double h) {
    for (std::size_t i = 0; i < vd.size(); ++i) f.density_raw()[i] = d0[i] + h * vd[i];
    for (std::size_t i = 0; i < vc.size(); ++i) f.color_raw()[i] = c0[i] + h * vc[i];
    const auto s = f.query(p);
    return ds * s.sigma + dc.dot(s.rgb);
  };
  const double fd = oracle::central_difference(eval, 0.0);
  EXPECT_LT(oracle::rel_error(inner, fd), 1e-5);
}

TEST(QueryBackward, OutsideReceivesNothing) {
  auto f = random_field({4, 4, 4}, 22);
  f.query_backward(Vec3(5, 5, 5), 1.0, Vec3::Ones());
  for (double g : f.gradients().density) EXPECT_EQ(g, 0.0);
}

TEST(ZeroGradients, Idempotent) {
  auto f = random_field({3, 3, 3}, 23);
  f.query_backward(Vec3(0.1, 0.1, 0.1), 1.0, Vec3::Ones());
  f.zero_gradients();
  f.zero_gradients();
  for (double g : f.gradients().density) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(f.gradients().density.size(), f.voxel_count());
  EXPECT_EQ(f.gradients().color.size(), 3 * f.voxel_count());
}

TEST(Checkpoint, RoundTripsFloat) {
  const auto src = random_field({4, 3, 5}, 30).cast<float>();
  const auto path = std::filesystem::temp_directory_path() / "radscale_field_test.rsvf";
  save_checkpoint(src, path);
  const auto back = load_checkpoint<float>(path);
  EXPECT_EQ(back.resolution(), src.resolution());
  EXPECT_EQ(back.bounds().min, src.bounds().min);
  EXPECT_EQ(back.bounds().max, src.bounds().max);
  for (std::size_t i = 0; i < src.voxel_count(); ++i) EXPECT_EQ(back.density_raw()[i], src.density_raw()[i]);
  for (std::size_t i = 0; i < 3 * src.voxel_count(); ++i) EXPECT_EQ(back.color_raw()[i], src.color_raw()[i]);
  std::filesystem::remove(path);
}

TEST(Checkpoint, LayoutIsLittleEndianRsvf) {
  VoxelField<float> f({2, 2, 2}, Box{Vec3::Zero(), Vec3::Ones()});
  f.density_raw()[0] = 1.0f;
  const auto path = std::filesystem::temp_directory_path() / "radscale_layout.rsvf";
  save_checkpoint(f, path);
  const std::string bytes = read_file(path);
  std::filesystem::remove(path);
  ASSERT_EQ(bytes.size(), 4u + 4 + 12 + 48 + 8 * 4 + 24 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "RSVF");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);
  // 1.0f = 0x3f800000, little-endian, right after the 68-byte header.
  EXPECT_EQ(static_cast<unsigned char>(bytes[68 + 3]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(bytes[68 + 2]), 0x80);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto path = std::filesystem::temp_directory_path() / "radscale_bad.rsvf";
  {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    std::fputs("NOPE", fp);
    std::fclose(fp);
  }
  EXPECT_THROW(load_checkpoint<float>(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint<float>(path), IoError);
}

}  // namespace
}  // namespace radscale
