// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/config.hpp"

#include <gtest/gtest.h>

namespace radscale {
namespace {

TEST(Config, EmptyDocumentGivesDefaults) {
  const auto cfg = parse_config(R"({"schema_version": 1})");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.train.iterations, 4000);
  EXPECT_EQ(cfg.train.batch_rays, 4096);
  EXPECT_EQ(cfg.train.samples_per_ray, 192);
  EXPECT_EQ(cfg.train.lr_density, 0.1);
  EXPECT_EQ(cfg.train.lr_color, 0.01);
  EXPECT_EQ(cfg.metrics.collapse_radius, 0.25);
  EXPECT_EQ(cfg.metrics.checkpoints, (std::vector<int>{500, 1250, 2000, 4000}));
  EXPECT_EQ(cfg.field_resolution, (GridSize{64, 64, 64}));
  EXPECT_EQ(cfg.rig.near, 0.0);
}

TEST(Config, ParsesNestedValues) {
  const auto cfg = parse_config(R"({"schema_version": 1, 
    "seed": 7,
    "scene": {"kind": "checker_plane", "extent": 0.8},
    "rig": {"kind": "ring", "count": 8, "radius": 1.5},
    "train": {"iterations": 10, "grad_scale": {"mode": "clamped-sigma", "sigma": 2.0}},
    "compare": {"modes": ["none", "clamped"]}
  })");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.scene.kind, SceneKind::kCheckerPlane);
  EXPECT_EQ(cfg.scene.extent, 0.8);
  EXPECT_EQ(cfg.rig.kind, RigKind::kRing);
  EXPECT_EQ(cfg.rig.build().size(), 8u);
  EXPECT_EQ(cfg.train.iterations, 10);
  EXPECT_EQ(cfg.train.seed, 7u);
  EXPECT_EQ(cfg.train.grad_scale.mode, ScaleMode::kClampedSigma);
  EXPECT_EQ(cfg.train.grad_scale.sigma, 2.0);
  EXPECT_EQ(cfg.compare_modes, (std::vector<ScaleMode>{ScaleMode::kNone, ScaleMode::kClamped}));
}

TEST(Config, UnknownKeyReportsPointer) {
  try {
    parse_config(R"({"schema_version": 1, "train": {"lr_densty": 0.1}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(e.where().find("/train"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("lr_densty"), std::string::npos);
  }
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"train\": {,}\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.where().substr(0, 2), "3:");
  }
}

TEST(Config, WrongTypeAndBadValues) {
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "seed": "x"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "train": {"iterations": 0}})"), InputError);
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "train": {"grad_scale": {"mode": "clamp"}}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 2})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seed": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "dataset": {"samples": 100}})"), InputError);
}

TEST(Config, RoundTripThroughJson) {
  auto cfg = parse_config(R"({"schema_version": 1, "seed": 11, "scene": {"kind": "sphere_cluster"}, "train": {"batch_rays": 512}})");
  const auto again = parse_config(config_to_json(cfg));
  EXPECT_EQ(config_to_json(again), config_to_json(cfg));
  EXPECT_EQ(again.train.batch_rays, 512);
  EXPECT_EQ(again.scene.kind, SceneKind::kSphereCluster);
}

TEST(Config, SeedDerivesTextureSeed) {
  const auto a = parse_config(R"({"schema_version": 1, "seed": 1})"), b = parse_config(R"({"schema_version": 1, "seed": 2})");
  EXPECT_NE(a.scene.texture_seed, b.scene.texture_seed);
  EXPECT_EQ(a.scene.texture_seed, parse_config(R"({"schema_version": 1, "seed": 1})").scene.texture_seed);
}

TEST(Config, ScaleConfigAutoSigma) {
  auto cfg = parse_config(R"({"schema_version": 1, "rig": {"kind": "ring", "count": 8, "radius": 2.0},
                              "train": {"grad_scale": {"auto_sigma": true}}})");
  EXPECT_NEAR(cfg.scale_config(ScaleMode::kClampedSigma).sigma, 2.0, 1e-9);
  EXPECT_EQ(cfg.scale_config(ScaleMode::kClamped).mode, ScaleMode::kClamped);
}

TEST(RigConfig, CameraTemplateFocal) {
  RigConfig rig;
  rig.width = 64;
  rig.fov_deg = 90.0;
  EXPECT_NEAR(rig.camera_template().focal, 32.0, 1e-12);
}

}  // namespace
}  // namespace radscale
