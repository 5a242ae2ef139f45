// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace radscale {

int kernel_threads() { return omp_get_max_threads(); }

void set_kernel_threads(int n) {
  static const int kDefault = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : kDefault);
}

template <typename T>
FieldGradients<T>& GradientWorkspace<T>::buffer(int thread, std::size_t voxels) {
  if (buffers_.size() <= static_cast<std::size_t>(thread)) buffers_.resize(thread + 1);
  auto& b = buffers_[thread];
  if (b.density.size() != voxels) b.resize(voxels);
  return b;
}

namespace {

void check_sizes(std::size_t rays, std::size_t outputs, std::size_t batches) {
  if (outputs != rays || batches != rays) throw ContractError("ray batch size mismatch");
}

template <typename T>
void render_one(const VoxelField<T>& field, const Ray& ray, const RenderSettings& settings,
                std::optional<std::uint64_t> strat_key, std::size_t i, RenderOutput<T>& out,
                RaySampleBatch<T>& batch) {
  if (strat_key) {
    CounterRng rng(derive_key(*strat_key, Stream::kStratification, i));
    RenderSettings s = settings;
    s.stratified = true;
    out = render_ray(field, ray, s, &rng, batch);
  } else {
    RenderSettings s = settings;
    s.stratified = false;
    out = render_ray(field, ray, s, nullptr, batch);
  }
}

}  // namespace

template <typename T>
void render_rays_serial(const VoxelField<T>& field, std::span<const Ray> rays,
                        const RenderSettings& settings, std::optional<std::uint64_t> strat_key,
                        std::span<RenderOutput<T>> outputs, std::span<RaySampleBatch<T>> batches) {
  check_sizes(rays.size(), outputs.size(), batches.size());
  for (std::size_t i = 0; i < rays.size(); ++i) {
    render_one(field, rays[i], settings, strat_key, i, outputs[i], batches[i]);
  }
}

template <typename T>
void render_rays_parallel(const VoxelField<T>& field, std::span<const Ray> rays,
                          const RenderSettings& settings, std::optional<std::uint64_t> strat_key,
                          std::span<RenderOutput<T>> outputs, std::span<RaySampleBatch<T>> batches) {
  check_sizes(rays.size(), outputs.size(), batches.size());
  const auto n = static_cast<std::int64_t>(rays.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    render_one(field, rays[i], settings, strat_key, static_cast<std::size_t>(i), outputs[i], batches[i]);
  }
}

template <typename T>
void backward_rays_serial(const VoxelField<T>& field, std::span<const RaySampleBatch<T>> batches,
                          std::span<const Vec3T<T>> d_rgb, const GradScaleConfig& scale,
                          FieldGradients<T>& into) {
  if (d_rgb.size() != batches.size()) throw ContractError("upstream gradient count mismatch");
  for (std::size_t i = 0; i < batches.size(); ++i) {
    render_ray_backward(field, batches[i], d_rgb[i], scale, into);
  }
}

template <typename T>
void backward_rays_parallel(const VoxelField<T>& field, std::span<const RaySampleBatch<T>> batches,
                            std::span<const Vec3T<T>> d_rgb, const GradScaleConfig& scale,
                            FieldGradients<T>& into, GradientWorkspace<T>& workspace) {
  if (d_rgb.size() != batches.size()) throw ContractError("upstream gradient count mismatch");
  const std::size_t voxels = field.voxel_count();
  const int threads = omp_get_max_threads();
  if (threads == 1) {
    backward_rays_serial(field, batches, d_rgb, scale, into);
    return;
  }
  for (int t = 1; t < threads; ++t) workspace.buffer(t, voxels);
  const auto n = static_cast<std::int64_t>(batches.size());
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    FieldGradients<T>& local = t == 0 ? into : workspace.buffer(t, voxels);
    const std::int64_t begin = n * t / nt;
    const std::int64_t end = n * (t + 1) / nt;
    for (std::int64_t i = begin; i < end; ++i) {
      render_ray_backward(field, batches[i], d_rgb[i], scale, local);
    }
  }
  // Fixed-order reduction, parallel over voxels; buffers are left zeroed.
  std::vector<FieldGradients<T>*> parts;
  for (int t = 1; t < threads; ++t) parts.push_back(&workspace.buffer(t, voxels));
  const auto nv = static_cast<std::int64_t>(voxels);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t v = 0; v < nv; ++v) {
    for (FieldGradients<T>* part : parts) {
      auto& b = *part;
      into.density[v] += b.density[v];
      b.density[v] = 0;
      for (int c = 0; c < 3; ++c) {
        into.color[3 * v + c] += b.color[3 * v + c];
        b.color[3 * v + c] = 0;
      }
    }
  }
}

#define RADSCALE_INSTANTIATE(T)                                                                       \
  template class GradientWorkspace<T>;                                                                \
  template void render_rays_serial(const VoxelField<T>&, std::span<const Ray>, const RenderSettings&, \
                                   std::optional<std::uint64_t>, std::span<RenderOutput<T>>,          \
                                   std::span<RaySampleBatch<T>>);                                     \
  template void render_rays_parallel(const VoxelField<T>&, std::span<const Ray>,                      \
                                     const RenderSettings&, std::optional<std::uint64_t>,             \
                                     std::span<RenderOutput<T>>, std::span<RaySampleBatch<T>>);       \
  template void backward_rays_serial(const VoxelField<T>&, std::span<const RaySampleBatch<T>>,        \
                                     std::span<const Vec3T<T>>, const GradScaleConfig&,               \
                                     FieldGradients<T>&);                                             \
  template void backward_rays_parallel(const VoxelField<T>&, std::span<const RaySampleBatch<T>>,      \
                                       std::span<const Vec3T<T>>, const GradScaleConfig&,             \
                                       FieldGradients<T>&, GradientWorkspace<T>&);

RADSCALE_INSTANTIATE(float)
RADSCALE_INSTANTIATE(double)

#undef RADSCALE_INSTANTIATE

}  // namespace radscale
