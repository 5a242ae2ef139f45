// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batched ray kernels. Each has a serial reference and an OpenMP version;
// the serial one is the oracle the parallel one is tested against.
//
// Reduction contract for the backward pass: rays are split into contiguous
// static chunks, one per thread. Thread 0 accumulates straight into the
// destination; thread t > 0 accumulates into workspace buffer t, and the
// buffers are then added into the destination in increasing t order. For a
// fixed thread count the result is bitwise reproducible.

#include "radscale/renderer.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace radscale {

/// Number of threads the parallel kernels use (OpenMP max threads).
int kernel_threads();
/// Sets the OpenMP thread count; n <= 0 restores the runtime default.
void set_kernel_threads(int n);

/// Per-thread gradient buffers, reused across calls.
template <typename T>
class GradientWorkspace {
 public:
  FieldGradients<T>& buffer(int thread, std::size_t voxels);
  std::size_t size() const { return buffers_.size(); }

 private:
  std::vector<FieldGradients<T>> buffers_;
};

/// Renders rays[i] into outputs[i] / batches[i]. With a stratification key
/// ray i draws its jitter from CounterRng(derive_key(key,
/// kStratification, i)), independent of the thread that runs it.
template <typename T>
void render_rays_serial(const VoxelField<T>& field, std::span<const Ray> rays,
                        const RenderSettings& settings, std::optional<std::uint64_t> strat_key,
                        std::span<RenderOutput<T>> outputs, std::span<RaySampleBatch<T>> batches);

template <typename T>
void render_rays_parallel(const VoxelField<T>& field, std::span<const Ray> rays,
                          const RenderSettings& settings, std::optional<std::uint64_t> strat_key,
                          std::span<RenderOutput<T>> outputs, std::span<RaySampleBatch<T>> batches);

template <typename T>
void backward_rays_serial(const VoxelField<T>& field, std::span<const RaySampleBatch<T>> batches,
                          std::span<const Vec3T<T>> d_rgb, const GradScaleConfig& scale,
                          FieldGradients<T>& into);

template <typename T>
void backward_rays_parallel(const VoxelField<T>& field, std::span<const RaySampleBatch<T>> batches,
                            std::span<const Vec3T<T>> d_rgb, const GradScaleConfig& scale,
                            FieldGradients<T>& into, GradientWorkspace<T>& workspace);

}  // namespace radscale
