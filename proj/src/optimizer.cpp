// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/optimizer.hpp"

#include <cmath>

namespace radscale {

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state, double lr,
               const AdamParams& hp) {
  if (params.size() != grads.size()) throw ContractError("adam_step: parameter/gradient size mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), T(0));
    state.v.assign(params.size(), T(0));
    state.step = 0;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(hp.beta1);
  const T b2 = static_cast<T>(hp.beta2);
  const T step_size = static_cast<T>(lr / bc1);
  const T inv_bc2 = static_cast<T>(1.0 / bc2);
  const T eps = static_cast<T>(hp.eps);
  const auto n = static_cast<std::int64_t>(params.size());
  T* m = state.m.data();
  T* v = state.v.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T(1) - b1) * g;
    v[i] = b2 * v[i] + (T(1) - b2) * g * g;
    params[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_bc2) + eps);
  }
}

template <typename T>
void apply_gradients(VoxelField<T>& field, FieldOptimizer<T>& opt, double lr_density, double lr_color) {
  const auto& g = field.gradients();
  adam_step<T>(field.density_raw(), g.density, opt.density, lr_density, opt.params);
  adam_step<T>(field.color_raw(), g.color, opt.color, lr_color, opt.params);
}

template void adam_step(std::span<float>, std::span<const float>, AdamState<float>&, double, const AdamParams&);
template void adam_step(std::span<double>, std::span<const double>, AdamState<double>&, double, const AdamParams&);
template void apply_gradients(VoxelField<float>&, FieldOptimizer<float>&, double, double);
template void apply_gradients(VoxelField<double>&, FieldOptimizer<double>&, double, double);

}  // namespace radscale
