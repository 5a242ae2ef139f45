// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/renderer.hpp"

#include <algorithm>
#include <cmath>

namespace radscale {

template <typename T>
void RaySampleBatch<T>::resize(std::size_t n) {
  ts.resize(n);
  deltas_seg.resize(n);
  cam_dist.resize(n);
  positions.resize(n);
  sigma.resize(n);
  rgb.resize(n);
  alpha.resize(n);
  trans.resize(n + 1);
  weight.resize(n);
}

template <typename T>
void sample_ray(const Ray& ray, int n, bool stratified, CounterRng* rng, RaySampleBatch<T>& out) {
  if (n < 2) throw InputError("sample_ray needs at least two samples");
  if (stratified && rng == nullptr) throw InputError("stratified sampling needs a generator");
  out.resize(static_cast<std::size_t>(n));
  const double width = (ray.t_far - ray.t_near) / n;
  const Vec3T<T> o = ray.origin.cast<T>();
  const Vec3T<T> d = ray.direction.cast<T>();
  for (int j = 0; j < n; ++j) {
    const double u = stratified ? rng->uniform() : 0.5;
    const T t = static_cast<T>(ray.t_near + (j + u) * width);
    out.ts[j] = t;
    out.deltas_seg[j] = static_cast<T>(width);
    out.cam_dist[j] = t;
    out.positions[j] = o + t * d;
  }
}

template <typename T>
RenderOutput<T> render_ray(const VoxelField<T>& field, const Ray& ray, const RenderSettings& settings,
                           CounterRng* rng, RaySampleBatch<T>& batch) {
  sample_ray(ray, settings.samples, settings.stratified, rng, batch);
  batch.field = &field;
  batch.background = settings.background.cast<T>();
  const std::size_t n = batch.size();
  RenderOutput<T> out;
  T trans = 1;
  T weight_sum = 0;
  T depth_sum = 0;
  Vec3T<T> rgb = Vec3T<T>::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    const FieldSample<T> s = field.query(batch.positions[j]);
    const T alpha = -std::expm1(-s.sigma * batch.deltas_seg[j]);
    const T w = trans * alpha;
    batch.sigma[j] = s.sigma;
    batch.rgb[j] = s.rgb;
    batch.alpha[j] = alpha;
    batch.trans[j] = trans;
    batch.weight[j] = w;
    rgb += w * s.rgb;
    weight_sum += w;
    depth_sum += w * batch.ts[j];
    trans *= T(1) - alpha;
  }
  batch.trans[n] = trans;
  out.rgb = rgb + trans * batch.background;
  out.opacity = weight_sum;
  out.depth = depth_sum / std::max(weight_sum, static_cast<T>(kDepthEpsilon));
  return out;
}

namespace {

// Reverse sweep over the samples. scale_of(j) returns the per-sample factor;
// it is folded into the bin length and weight that already multiply the two
// adjoints.
template <typename T, typename ScaleOf>
void backward_sweep(const VoxelField<T>& field, const RaySampleBatch<T>& batch, const Vec3T<T>& d_rgb_out,
                    FieldGradients<T>& into, ScaleOf scale_of) {
  const std::size_t n = batch.size();
  // suffix = d_rgb_out . (sum_{k>j} w_k c_k + T_n background)
  T suffix = batch.trans[n] * d_rgb_out.dot(batch.background);
  for (std::size_t jj = n; jj-- > 0;) {
    const T s = scale_of(jj);
    const T dc_dot_c = d_rgb_out.dot(batch.rgb[jj]);
    const T d_sigma = (batch.deltas_seg[jj] * s) * (batch.trans[jj + 1] * dc_dot_c - suffix);
    const Vec3T<T> d_rgb = (batch.weight[jj] * s) * d_rgb_out;
    suffix += batch.weight[jj] * dc_dot_c;
    FieldSample<T> sample;
    sample.sigma = batch.sigma[jj];
    sample.rgb = batch.rgb[jj];
    field.accumulate(batch.positions[jj], sample, d_sigma, d_rgb, into);
  }
}

}  // namespace

template <typename T>
void render_ray_backward(const VoxelField<T>& field, const RaySampleBatch<T>& batch,
                         const Vec3T<T>& d_rgb_out, const GradScaleConfig& scale,
                         FieldGradients<T>& into) {
  const std::size_t n = batch.size();
  if (batch.field != &field) throw ContractError("sample batch was produced from a different field");
  if (batch.trans.size() != n + 1 || batch.sigma.size() != n || batch.weight.size() != n) {
    throw ContractError("sample batch is incomplete");
  }
  if (into.density.size() != field.voxel_count()) throw ContractError("gradient buffer shape mismatch");
  const auto& dist = batch.cam_dist;
  switch (scale.mode) {
    case ScaleMode::kNone:
      backward_sweep(field, batch, d_rgb_out, into, [](std::size_t) { return T(1); });
      break;
    case ScaleMode::kQuadratic:
      backward_sweep(field, batch, d_rgb_out, into, [&](std::size_t j) { return dist[j] * dist[j]; });
      break;
    case ScaleMode::kClamped:
      backward_sweep(field, batch, d_rgb_out, into,
                     [&](std::size_t j) { return std::min(T(1), dist[j] * dist[j]); });
      break;
    case ScaleMode::kClampedSigma: {
      const T inv_sigma2 = static_cast<T>(1.0 / (scale.sigma * scale.sigma));
      backward_sweep(field, batch, d_rgb_out, into,
                     [&](std::size_t j) { return std::min(T(1), dist[j] * dist[j] * inv_sigma2); });
      break;
    }
    case ScaleMode::kJacobian:
      backward_sweep(field, batch, d_rgb_out, into, [&](std::size_t j) {
        return static_cast<T>(
            scale_factor(static_cast<double>(dist[j]), batch.positions[j].template cast<double>(), scale));
      });
      break;
  }
}

template <typename T>
RenderedImage render_image(const VoxelField<T>& field, const Camera& camera, int samples,
                           const Vec3& background) {
  RenderedImage img{Image(camera.width, camera.height, 3), Image(camera.width, camera.height, 1),
                    Image(camera.width, camera.height, 1)};
  RenderSettings settings;
  settings.samples = samples;
  settings.background = background;
#pragma omp parallel
  {
    RaySampleBatch<T> batch;
#pragma omp for schedule(static)
    for (int y = 0; y < camera.height; ++y) {
      for (int x = 0; x < camera.width; ++x) {
        const Ray ray = generate_ray(camera, Vec2(x, y));
        const RenderOutput<T> o = render_ray(field, ray, settings, nullptr, batch);
        for (int c = 0; c < 3; ++c) img.rgb.at(x, y, c) = static_cast<float>(o.rgb[c]);
        img.depth.at(x, y) = static_cast<float>(o.depth);
        img.opacity.at(x, y) = static_cast<float>(o.opacity);
      }
    }
  }
  return img;
}

#define RADSCALE_INSTANTIATE(T)                                                                 \
  template struct RaySampleBatch<T>;                                                            \
  template void sample_ray(const Ray&, int, bool, CounterRng*, RaySampleBatch<T>&);            \
  template RenderOutput<T> render_ray(const VoxelField<T>&, const Ray&, const RenderSettings&, \
                                      CounterRng*, RaySampleBatch<T>&);                        \
  template void render_ray_backward(const VoxelField<T>&, const RaySampleBatch<T>&,            \
                                    const Vec3T<T>&, const GradScaleConfig&,                   \
                                    FieldGradients<T>&);                                       \
  template RenderedImage render_image(const VoxelField<T>&, const Camera&, int, const Vec3&);

RADSCALE_INSTANTIATE(float)
RADSCALE_INSTANTIATE(double)

#undef RADSCALE_INSTANTIATE

}  // namespace radscale
