// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/common.hpp"
#include "radscale/field.hpp"
#include "radscale/geometry.hpp"
#include "radscale/image_io.hpp"
#include "radscale/rng.hpp"
#include "radscale/scaler.hpp"

#include <vector>

namespace radscale {

struct RenderSettings {
  int samples = 192;
  bool stratified = false;
  Vec3 background = Vec3::Zero();
};

/// Everything the backward pass needs about one marched ray. Sample j
/// covers a bin of length deltas_seg[j]; trans has n + 1 entries, the last
/// being the residual transmittance that lets the background through.
template <typename T>
struct RaySampleBatch {
  std::vector<T> ts;
  std::vector<T> deltas_seg;
  std::vector<T> cam_dist;
  std::vector<Vec3T<T>> positions;
  std::vector<T> sigma;
  std::vector<Vec3T<T>> rgb;
  std::vector<T> alpha;
  std::vector<T> trans;
  std::vector<T> weight;
  Vec3T<T> background = Vec3T<T>::Zero();
  const void* field = nullptr;

  std::size_t size() const { return ts.size(); }
  void resize(std::size_t n);
};

template <typename T>
struct RenderOutput {
  Vec3T<T> rgb = Vec3T<T>::Zero();
  T depth = 0;
  T opacity = 0;
};

/// Expected depth divides by max(opacity, kDepthEpsilon).
inline constexpr double kDepthEpsilon = 1e-6;

/// n equal bins over [t_near, t_far]: bin midpoints, or one uniform draw per
/// bin when stratified (rng required then). Fills ts, deltas_seg, cam_dist
/// and positions of `out`.
template <typename T>
void sample_ray(const Ray& ray, int n, bool stratified, CounterRng* rng, RaySampleBatch<T>& out);

/// Piecewise-constant emission-absorption compositing:
/// alpha_j = 1 - exp(-sigma_j delta_j), T_{j+1} = T_j (1 - alpha_j),
/// w_j = T_j alpha_j, rgb = sum w_j c_j + T_n background.
template <typename T>
RenderOutput<T> render_ray(const VoxelField<T>& field, const Ray& ray, const RenderSettings& settings,
                           CounterRng* rng, RaySampleBatch<T>& batch);

template <typename T>
RenderOutput<T> render_ray(const VoxelField<T>& field, const Ray& ray, const RenderSettings& settings) {
  RaySampleBatch<T> batch;
  return render_ray(field, ray, settings, nullptr, batch);
}

/// Adjoint of render_ray for upstream dL/d(rgb). The compositing adjoint
/// gives per-sample (dL/dsigma_j, dL/dc_j); both are multiplied by
/// scale_factor(cam_dist_j, p_j, scale) and only then pushed through the
/// field adjoint into `into`. Throws ContractError if `batch` was not
/// produced from `field`.
template <typename T>
void render_ray_backward(const VoxelField<T>& field, const RaySampleBatch<T>& batch,
                         const Vec3T<T>& d_rgb_out, const GradScaleConfig& scale,
                         FieldGradients<T>& into);

template <typename T>
void render_ray_backward(VoxelField<T>& field, const RaySampleBatch<T>& batch,
                         const Vec3T<T>& d_rgb_out, const GradScaleConfig& scale) {
  render_ray_backward(field, batch, d_rgb_out, scale, field.gradients());
}

struct RenderedImage {
  Image rgb;
  Image depth;
  Image opacity;
};

/// Every pixel center, unstratified. Parallel over rows.
template <typename T>
RenderedImage render_image(const VoxelField<T>& field, const Camera& camera, int samples,
                           const Vec3& background = Vec3::Zero());

}  // namespace radscale
