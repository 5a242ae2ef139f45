// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/common.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace radscale {

using GridSize = std::array<int, 3>;

template <typename T>
T softplus(T x) {
  return x > T(30) ? x : std::log1p(std::exp(x));
}

template <typename T>
T softplus_inverse(T y) {
  return y > T(30) ? y : std::log(std::expm1(y));
}

template <typename T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
T logit(T p) {
  return std::log(p / (T(1) - p));
}

template <typename T>
struct FieldSample {
  T sigma = 0;
  Vec3T<T> rgb = Vec3T<T>::Zero();
};

/// Gradient accumulators with the same layout as the field parameters:
/// `density[v]` and `color[3 * v + c]` for voxel index v.
template <typename T>
struct FieldGradients {
  std::vector<T> density;
  std::vector<T> color;

  void resize(std::size_t voxels);
  void zero();
};

/// Eight grid nodes around a point with their interpolation weights.
template <typename T>
struct TrilinearStencil {
  std::array<std::size_t, 8> index{};
  std::array<T, 8> weight{};
};

/// Dense node-centered grid: node (i, j, k) sits at
/// bounds.min + (i, j, k) * bounds.size() / (resolution - 1), so the nodes
/// span the bounds exactly. Voxel index is x-fastest:
/// i + nx * (j + ny * k).
///
/// Parameters are raw (pre-activation). A query interpolates the raw values
/// trilinearly, then applies softplus to density and sigmoid to color.
/// Points outside the bounds are vacuum: zero density, black, no gradient.
template <typename T>
class VoxelField {
 public:
  using Scalar = T;
  /// Post-activation density every voxel starts from.
  static constexpr double kInitialDensity = 0.01;

  VoxelField(const GridSize& resolution, const Box& bounds);

  const GridSize& resolution() const { return resolution_; }
  const Box& bounds() const { return bounds_; }
  std::size_t voxel_count() const { return density_.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(resolution_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(resolution_[1]) * k);
  }
  Vec3 node_position(int i, int j, int k) const;
  Vec3 spacing() const { return spacing_; }

  std::span<T> density_raw() { return density_; }
  std::span<const T> density_raw() const { return density_; }
  std::span<T> color_raw() { return color_; }
  std::span<const T> color_raw() const { return color_; }
  FieldGradients<T>& gradients() { return grad_; }
  const FieldGradients<T>& gradients() const { return grad_; }

  /// Fills `out` and returns true when `p` lies inside the bounds.
  bool stencil(const Vec3T<T>& p, TrilinearStencil<T>& out) const;

  FieldSample<T> query(const Vec3T<T>& p) const;

  /// Chain rule through the activations and the trilinear weights into the
  /// field's own accumulators.
  void query_backward(const Vec3T<T>& p, T d_sigma, const Vec3T<T>& d_rgb);
  /// Same, into an external buffer (per-thread accumulation).
  void query_backward(const Vec3T<T>& p, T d_sigma, const Vec3T<T>& d_rgb,
                      FieldGradients<T>& into) const;

  /// Backward step when the activated sample at `p` is already known.
  /// softplus'(x) = 1 - exp(-softplus(x)) and sigmoid'(x) = s (1 - s), so
  /// the raw values need not be re-gathered.
  void accumulate(const Vec3T<T>& p, const FieldSample<T>& sample, T d_sigma,
                  const Vec3T<T>& d_rgb, FieldGradients<T>& into) const;

  void zero_gradients() { grad_.zero(); }

  template <typename U>
  VoxelField<U> cast() const {
    VoxelField<U> out(resolution_, bounds_);
    auto d = out.density_raw();
    auto c = out.color_raw();
    for (std::size_t i = 0; i < density_.size(); ++i) d[i] = static_cast<U>(density_[i]);
    for (std::size_t i = 0; i < color_.size(); ++i) c[i] = static_cast<U>(color_[i]);
    return out;
  }

 private:
  GridSize resolution_;
  Box bounds_;
  Vec3 spacing_;
  Vec3T<T> origin_t_;
  Vec3T<T> inv_spacing_t_;
  std::vector<T> density_;
  std::vector<T> color_;
  FieldGradients<T> grad_;
};

/// Checkpoint layout (little-endian): "RSVF", u32 version, 3 x u32
/// resolution, 6 x f64 bounds (min xyz, max xyz), f32 density_raw
/// (x-fastest), f32 color_raw (channel-interleaved).
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void save_checkpoint(const VoxelField<T>& field, const std::filesystem::path& path);

template <typename T>
VoxelField<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace radscale
