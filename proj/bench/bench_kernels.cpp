// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP versions, plus the cost of
// each scaling mode in the backward pass.

#include "radscale/kernels.hpp"
#include "radscale/trainer.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace radscale {
namespace {

constexpr int kSamples = 192;

struct Workload {
  VoxelField<float> field = initial_field({64, 64, 64}, Box{Vec3::Constant(-1.5), Vec3::Constant(1.5)});
  std::vector<Ray> rays;
  std::vector<Vec3T<float>> d_rgb;
  std::vector<RenderOutput<float>> outputs;
  std::vector<RaySampleBatch<float>> batches;

  explicit Workload(int count) {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& v : field.density_raw()) v = static_cast<float>(n(gen));
    for (int i = 0; i < count; ++i) {
      Ray r;
      r.origin = Vec3(n(gen), n(gen), n(gen)).normalized() * 2.0;
      r.direction = (0.5 * Vec3(n(gen), n(gen), n(gen)) - r.origin).normalized();
      r.t_near = 0.0;
      r.t_far = 4.0;
      rays.push_back(r);
      d_rgb.push_back(Vec3(n(gen), n(gen), n(gen)).cast<float>());
    }
    outputs.resize(count);
    batches.resize(count);
  }
};

RenderSettings settings() {
  RenderSettings s;
  s.samples = kSamples;
  s.stratified = true;
  return s;
}

void BM_ForwardSerial(benchmark::State& state) {
  Workload w(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    render_rays_serial<float>(w.field, w.rays, settings(), 1, w.outputs, w.batches);
    benchmark::DoNotOptimize(w.outputs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * kSamples);
}

void BM_ForwardParallel(benchmark::State& state) {
  Workload w(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    render_rays_parallel<float>(w.field, w.rays, settings(), 1, w.outputs, w.batches);
    benchmark::DoNotOptimize(w.outputs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * kSamples);
}

GradScaleConfig mode_for(std::int64_t m) {
  switch (m) {
    case 0: return GradScaleConfig::none();
    case 1: return GradScaleConfig::clamped();
    case 2: return GradScaleConfig::quadratic();
    default: return GradScaleConfig::jacobian(SpaceMapping::contract());
  }
}

void BM_BackwardSerial(benchmark::State& state) {
  Workload w(static_cast<int>(state.range(0)));
  render_rays_serial<float>(w.field, w.rays, settings(), 1, w.outputs, w.batches);
  const GradScaleConfig mode = mode_for(state.range(1));
  for (auto _ : state) {
    w.field.zero_gradients();
    backward_rays_serial<float>(w.field, w.batches, w.d_rgb, mode, w.field.gradients());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * kSamples);
  state.SetLabel(std::string(to_string(mode.mode)));
}

void BM_BackwardParallel(benchmark::State& state) {
  Workload w(static_cast<int>(state.range(0)));
  render_rays_parallel<float>(w.field, w.rays, settings(), 1, w.outputs, w.batches);
  const GradScaleConfig mode = mode_for(state.range(1));
  GradientWorkspace<float> ws;
  for (auto _ : state) {
    w.field.zero_gradients();
    backward_rays_parallel<float>(w.field, w.batches, w.d_rgb, mode, w.field.gradients(), ws);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * kSamples);
  state.SetLabel(std::string(to_string(mode.mode)));
}

BENCHMARK(BM_ForwardSerial)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ForwardParallel)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BackwardSerial)
    ->ArgsProduct({{4096}, {0, 1, 2, 3}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_BackwardParallel)
    ->ArgsProduct({{4096}, {0, 1, 2, 3}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace radscale

BENCHMARK_MAIN();
