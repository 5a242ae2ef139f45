// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/field.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace radscale {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-6;
};

template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::int64_t step = 0;
};

/// Bias-corrected Adam:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// State is lazily sized on the first call.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state, double lr,
               const AdamParams& hp);

template <typename T>
struct FieldOptimizer {
  AdamParams params;
  AdamState<T> density;
  AdamState<T> color;
};

/// One Adam step on density and color with separate learning rates. Does not
/// clear the accumulators; call field.zero_gradients() afterwards.
template <typename T>
void apply_gradients(VoxelField<T>& field, FieldOptimizer<T>& opt, double lr_density, double lr_color);

}  // namespace radscale
