// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radscale {

double psnr(const Image& img, const Image& ref) {
  if (!img.same_shape(ref)) throw InputError("psnr: image shapes differ");
  if (img.data.empty()) throw InputError("psnr: empty image");
  double sum = 0.0;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double d = static_cast<double>(img.data[i]) - ref.data[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(img.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

template <typename T>
CollapseReport near_camera_mass(const VoxelField<T>& field, const std::vector<Camera>& cameras,
                                double radius, int rays_per_camera, int samples) {
  if (!(radius > 0.0)) throw InputError("near_camera_mass: radius must be positive");
  if (rays_per_camera < 1) throw InputError("near_camera_mass: rays_per_camera must be positive");
  CollapseReport report;
  report.radius = radius;
  report.per_camera.assign(cameras.size(), 0.0);
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rays_per_camera))));
  RenderSettings settings;
  settings.samples = samples;

  for (std::size_t c = 0; c < cameras.size(); ++c) {
    const Camera& cam = cameras[c];
    double total = 0.0;
#pragma omp parallel reduction(+ : total)
    {
      RaySampleBatch<T> batch;
#pragma omp for schedule(static)
      for (int r = 0; r < side * side; ++r) {
        const double u = (r % side + 0.5) * cam.width / side;
        const double v = (r / side + 0.5) * cam.height / side;
        const Vec2 cell(std::floor(u), std::floor(v));
        Ray ray = generate_ray(cam, cell, Vec2(Vec2(u, v) - cell));
        ray.t_near = 0.0;
        render_ray(field, ray, settings, nullptr, batch);
        double mass = 0.0;
        for (std::size_t j = 0; j < batch.size() && batch.ts[j] < radius; ++j) mass += batch.weight[j];
        total += mass;
      }
    }
    report.per_camera[c] = total / (static_cast<double>(side) * side);
  }
  if (!cameras.empty()) {
    double sum = 0.0;
    for (double m : report.per_camera) {
      sum += m;
      report.max = std::max(report.max, m);
    }
    report.mean = sum / static_cast<double>(cameras.size());
  }
  return report;
}

DepthError depth_error(const std::vector<RenderedImage>& renders, const std::vector<RenderedImage>& gt) {
  if (renders.size() != gt.size()) throw InputError("depth_error: render counts differ");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < renders.size(); ++c) {
    const Image& d = renders[c].depth;
    const Image& gd = gt[c].depth;
    const Image& go = gt[c].opacity;
    if (!d.same_shape(gd) || !go.same_shape(gd)) throw InputError("depth_error: raster shapes differ");
    for (std::size_t i = 0; i < d.data.size(); ++i) {
      if (go.data[i] > kOpaqueThreshold) {
        sum += std::abs(static_cast<double>(d.data[i]) - gd.data[i]);
        ++count;
      }
    }
  }
  if (count == 0) return {std::numeric_limits<double>::quiet_NaN(), 0};
  return {sum / static_cast<double>(count), count};
}

template <typename T, typename U>
DepthError depth_error(const VoxelField<T>& field, const VoxelField<U>& gt_field,
                       const std::vector<Camera>& cameras, int samples) {
  std::vector<RenderedImage> renders, gt;
  for (const auto& cam : cameras) {
    renders.push_back(render_image(field, cam, samples));
    gt.push_back(render_image(gt_field, cam, samples));
  }
  return depth_error(renders, gt);
}

template <typename T>
DensityProfile density_vs_distance_profile(const VoxelField<T>& field, const std::vector<Camera>& cameras,
                                           const std::vector<double>& bin_centers, int lattice) {
  if (cameras.empty()) throw InputError("density_vs_distance_profile needs at least one camera");
  if (lattice < 2) throw InputError("density_vs_distance_profile: lattice must be at least 2");
  const std::size_t nb = bin_centers.size();
  for (std::size_t b = 0; b < nb; ++b) {
    if (!(bin_centers[b] > 0.0) || (b > 0 && !(bin_centers[b] > bin_centers[b - 1]))) {
      throw InputError("density_vs_distance_profile: bin centers must be positive and increasing");
    }
  }
  DensityProfile prof;
  prof.distances = bin_centers;
  prof.values.assign(nb, 0.0);
  if (nb == 0) return prof;

  // Log-space edges: midpoints between centers, extended by half a step at
  // both ends.
  std::vector<double> log_edges(nb + 1);
  for (std::size_t b = 1; b < nb; ++b) {
    log_edges[b] = 0.5 * (std::log(bin_centers[b - 1]) + std::log(bin_centers[b]));
  }
  const double half = nb > 1 ? log_edges[1] - std::log(bin_centers[0]) : 0.5;
  log_edges[0] = std::log(bin_centers[0]) - half;
  log_edges[nb] = std::log(bin_centers[nb - 1]) + (nb > 1 ? std::log(bin_centers[nb - 1]) - log_edges[nb - 1] : half);

  std::vector<double> sum(nb, 0.0);
  std::vector<std::size_t> count(nb, 0);
  const Box& bounds = field.bounds();
  const Vec3 step = bounds.size() / (lattice - 1);
  for (int k = 0; k < lattice; ++k) {
    for (int j = 0; j < lattice; ++j) {
      for (int i = 0; i < lattice; ++i) {
        const Vec3 p = bounds.min + step.cwiseProduct(Vec3(i, j, k));
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& cam : cameras) nearest = std::min(nearest, (p - cam.position).norm());
        if (!(nearest > 0.0)) continue;
        const double ld = std::log(nearest);
        if (ld < log_edges[0] || ld >= log_edges[nb]) continue;
        const auto b = static_cast<std::size_t>(std::upper_bound(log_edges.begin(), log_edges.end(), ld) -
                                                log_edges.begin()) - 1;
        sum[b] += static_cast<double>(field.query(p.cast<T>()).sigma);
        ++count[b];
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) prof.values[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : 0.0;
  return prof;
}

template CollapseReport near_camera_mass(const VoxelField<float>&, const std::vector<Camera>&, double, int, int);
template CollapseReport near_camera_mass(const VoxelField<double>&, const std::vector<Camera>&, double, int, int);
template DepthError depth_error(const VoxelField<float>&, const VoxelField<float>&, const std::vector<Camera>&, int);
template DepthError depth_error(const VoxelField<double>&, const VoxelField<double>&, const std::vector<Camera>&, int);
template DepthError depth_error(const VoxelField<float>&, const VoxelField<double>&, const std::vector<Camera>&, int);
template DepthError depth_error(const VoxelField<double>&, const VoxelField<float>&, const std::vector<Camera>&, int);
template DensityProfile density_vs_distance_profile(const VoxelField<float>&, const std::vector<Camera>&,
                                                    const std::vector<double>&, int);
template DensityProfile density_vs_distance_profile(const VoxelField<double>&, const std::vector<Camera>&,
                                                    const std::vector<double>&, int);

}  // namespace radscale
