// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/common.hpp"
#include "radscale/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radscale {

/// Per-sample gradient scaling applied between the compositing adjoint and
/// the field adjoint. The forward pass never sees it.
///
///   None          s = 1
///   Quadratic     s = delta^2
///   Clamped       s = min(1, delta^2)
///   ClampedSigma  s = min(1, delta^2 / sigma^2)
///   Jacobian      s = min(1, delta^2 / |det J_f(p)|)
///
/// delta is the Euclidean distance from the ray origin (the camera) to the
/// sample point.
enum class ScaleMode { kNone, kQuadratic, kClamped, kClampedSigma, kJacobian };

std::string_view to_string(ScaleMode mode);
/// Accepts none | quadratic | clamped | clamped-sigma | jacobian.
std::optional<ScaleMode> parse_scale_mode(std::string_view name);

enum class MappingKind { kIdentity, kContract, kCustom };

/// Space parameterization f: R^3 -> R^3 whose volume change enters the
/// Jacobian mode. kContract is f(p) = p for |p| <= 1 and
/// (2 - 1/|p|) p/|p| otherwise.
struct SpaceMapping {
  MappingKind kind = MappingKind::kIdentity;
  std::function<Vec3(const Vec3&)> custom;

  static SpaceMapping identity() { return {}; }
  static SpaceMapping contract() { return {MappingKind::kContract, {}}; }
  static SpaceMapping from_function(std::function<Vec3(const Vec3&)> f) {
    return {MappingKind::kCustom, std::move(f)};
  }

  Vec3 apply(const Vec3& p) const;
};

std::string_view to_string(MappingKind kind);
std::optional<MappingKind> parse_mapping_kind(std::string_view name);

struct GradScaleConfig {
  ScaleMode mode = ScaleMode::kNone;
  double sigma = 1.0;
  std::optional<SpaceMapping> mapping;

  static GradScaleConfig none() { return {}; }
  static GradScaleConfig quadratic() { return {ScaleMode::kQuadratic, 1.0, std::nullopt}; }
  static GradScaleConfig clamped() { return {ScaleMode::kClamped, 1.0, std::nullopt}; }
  static GradScaleConfig clamped_sigma(double s) { return {ScaleMode::kClampedSigma, s, std::nullopt}; }
  static GradScaleConfig jacobian(SpaceMapping m) { return {ScaleMode::kJacobian, 1.0, std::move(m)}; }

  /// InputError unless sigma > 0 for ClampedSigma and a mapping is present
  /// for Jacobian.
  void validate() const;
};

/// |det(df/dp)|: closed form for identity and contraction, central finite
/// differences (h = 1e-5) for custom mappings. Throws SingularityError when
/// the determinant is not finite.
double jacobian_det(const SpaceMapping& mapping, const Vec3& p);

/// Throws InputError for delta < 0, SingularityError for a zero Jacobian
/// determinant in Jacobian mode.
double scale_factor(double delta, const Vec3& p, const GradScaleConfig& cfg);

template <typename T>
std::pair<T, Vec3T<T>> scale_sample_gradients(T d_sigma, const Vec3T<T>& d_rgb, double delta,
                                              const Vec3& p, const GradScaleConfig& cfg) {
  const T s = static_cast<T>(scale_factor(delta, p, cfg));
  return {d_sigma * s, d_rgb * s};
}

/// Median of the distances from each camera center to the centroid of all
/// camera centers. Needs at least two cameras.
double estimate_sigma(const std::vector<Camera>& cameras);

/// Median with the midpoint convention for even counts.
double median(std::vector<double> values);

}  // namespace radscale
