// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/scaler.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace radscale {

std::string_view to_string(ScaleMode mode) {
  switch (mode) {
    case ScaleMode::kNone: return "none";
    case ScaleMode::kQuadratic: return "quadratic";
    case ScaleMode::kClamped: return "clamped";
    case ScaleMode::kClampedSigma: return "clamped-sigma";
    case ScaleMode::kJacobian: return "jacobian";
  }
  return "?";
}

std::optional<ScaleMode> parse_scale_mode(std::string_view name) {
  for (ScaleMode m : {ScaleMode::kNone, ScaleMode::kQuadratic, ScaleMode::kClamped,
                      ScaleMode::kClampedSigma, ScaleMode::kJacobian}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::kIdentity: return "identity";
    case MappingKind::kContract: return "contract";
    case MappingKind::kCustom: return "custom";
  }
  return "?";
}

std::optional<MappingKind> parse_mapping_kind(std::string_view name) {
  if (name == "identity") return MappingKind::kIdentity;
  if (name == "contract") return MappingKind::kContract;
  return std::nullopt;
}

Vec3 SpaceMapping::apply(const Vec3& p) const {
  switch (kind) {
    case MappingKind::kIdentity: return p;
    case MappingKind::kContract: {
      const double r = p.norm();
      if (r <= 1.0) return p;
      return (2.0 - 1.0 / r) * p / r;
    }
    case MappingKind::kCustom:
      if (!custom) throw InputError("custom mapping has no function");
      return custom(p);
  }
  return p;
}

void GradScaleConfig::validate() const {
  if (mode == ScaleMode::kClampedSigma && !(sigma > 0.0)) {
    throw InputError("clamped-sigma scaling needs sigma > 0");
  }
  if (mode == ScaleMode::kJacobian && !mapping) {
    throw InputError("jacobian scaling needs a space mapping");
  }
}

double jacobian_det(const SpaceMapping& mapping, const Vec3& p) {
  double det = 1.0;
  switch (mapping.kind) {
    case MappingKind::kIdentity:
      det = 1.0;
      break;
    case MappingKind::kContract: {
      // Radial map g(r) p/r has det = g'(r) (g(r)/r)^2; g(r) = 2 - 1/r
      // outside the unit ball gives (2r - 1)^2 / r^6.
      const double r = p.norm();
      if (r <= 1.0) {
        det = 1.0;
      } else {
        const double r3 = r * r * r;
        det = (2.0 * r - 1.0) * (2.0 * r - 1.0) / (r3 * r3);
      }
      break;
    }
    case MappingKind::kCustom: {
      constexpr double h = 1e-5;
      Mat3 jac;
      for (int a = 0; a < 3; ++a) {
        Vec3 step = Vec3::Zero();
        step[a] = h;
        jac.col(a) = (mapping.apply(p + step) - mapping.apply(p - step)) / (2.0 * h);
      }
      det = jac.determinant();
      break;
    }
  }
  if (!std::isfinite(det)) throw SingularityError("non-finite Jacobian determinant");
  return std::abs(det);
}

double scale_factor(double delta, const Vec3& p, const GradScaleConfig& cfg) {
  if (!(delta >= 0.0)) throw InputError("scale_factor needs a non-negative distance");
  const double d2 = delta * delta;
  switch (cfg.mode) {
    case ScaleMode::kNone: return 1.0;
    case ScaleMode::kQuadratic: return d2;
    case ScaleMode::kClamped: return std::min(1.0, d2);
    case ScaleMode::kClampedSigma: return std::min(1.0, d2 / (cfg.sigma * cfg.sigma));
    case ScaleMode::kJacobian: {
      if (!cfg.mapping) throw InputError("jacobian scaling needs a space mapping");
      const double det = jacobian_det(*cfg.mapping, p);
      if (det == 0.0) throw SingularityError("zero Jacobian determinant in scale_factor");
      return std::min(1.0, d2 / det);
    }
  }
  return 1.0;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double estimate_sigma(const std::vector<Camera>& cameras) {
  if (cameras.size() < 2) throw InputError("estimate_sigma needs at least two cameras");
  Vec3 centroid = Vec3::Zero();
  for (const auto& c : cameras) centroid += c.position;
  centroid /= static_cast<double>(cameras.size());
  std::vector<double> dist;
  dist.reserve(cameras.size());
  for (const auto& c : cameras) dist.push_back((c.position - centroid).norm());
  return median(std::move(dist));
}

}  // namespace radscale
