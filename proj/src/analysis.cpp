// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/analysis.hpp"

#include "radscale/image_io.hpp"
#include "radscale/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace radscale {

namespace {

void check_coincident(const Camera& cam, const Vec3& p) {
  if ((p - cam.position).norm() < kCoincidentRadius) {
    throw SingularityError("sampling density is singular at a camera center");
  }
}

// Parametric overlap of the ray with an axis-aligned box, clipped to [t0, t1].
bool clip_to_box(const Ray& ray, const Box& box, double& t0, double& t1) {
  for (int a = 0; a < 3; ++a) {
    const double d = ray.direction[a];
    if (std::abs(d) < 1e-300) {
      if (ray.origin[a] < box.min[a] || ray.origin[a] > box.max[a]) return false;
      continue;
    }
    double lo = (box.min[a] - ray.origin[a]) / d;
    double hi = (box.max[a] - ray.origin[a]) / d;
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
  }
  return t0 <= t1;
}

// Fixed work split for Monte Carlo rays so results are thread-independent.
constexpr std::int64_t kRaysPerChunk = 4096;

}  // namespace

double density_exact(const std::vector<Camera>& cameras, const Vec3& p) {
  double sum = 0.0;
  for (const auto& cam : cameras) {
    check_coincident(cam, p);
    if (!visibility(cam, p)) continue;
    const Vec3 diff = p - cam.position;
    const double cos_dist = cam.forward().normalized().dot(diff);
    if (cos_dist <= 0.0) continue;
    const double dist = diff.norm();
    sum += (dist / cos_dist) / (dist * dist);
  }
  return sum;
}

double density_approx(const std::vector<Camera>& cameras, const Vec3& p) {
  double sum = 0.0;
  for (const auto& cam : cameras) {
    check_coincident(cam, p);
    if (!visibility(cam, p)) continue;
    sum += 1.0 / (p - cam.position).squaredNorm();
  }
  return sum;
}

Vec3 Histogram3D::voxel_size() const {
  return region.size().cwiseQuotient(Vec3(resolution[0], resolution[1], resolution[2]));
}

Vec3 Histogram3D::voxel_center(int i, int j, int k) const {
  return region.min + voxel_size().cwiseProduct(Vec3(i + 0.5, j + 0.5, k + 0.5));
}

Histogram3D density_monte_carlo(const std::vector<Camera>& cameras, const Box& region,
                                const std::array<int, 3>& resolution, std::int64_t rays_per_camera,
                                int samples_per_ray, std::uint64_t seed) {
  if (!region.valid()) throw InputError("Monte Carlo region must be non-empty");
  for (int n : resolution) {
    if (n < 1) throw InputError("Monte Carlo histogram resolution must be positive");
  }
  if (samples_per_ray < 1) throw InputError("samples_per_ray must be positive");
  if (rays_per_camera < 0) throw InputError("rays_per_camera must be non-negative");
  Histogram3D hist;
  hist.region = region;
  hist.resolution = resolution;
  const std::size_t voxels = static_cast<std::size_t>(resolution[0]) * resolution[1] * resolution[2];
  hist.values.assign(voxels, 0.0);
  if (rays_per_camera == 0 || cameras.empty()) return hist;

  const Vec3 vsize = hist.voxel_size();
  const Vec3 inv_vsize = vsize.cwiseInverse();
  const std::int64_t chunks_per_camera = (rays_per_camera + kRaysPerChunk - 1) / kRaysPerChunk;
  const std::int64_t total_chunks = chunks_per_camera * static_cast<std::int64_t>(cameras.size());
  const int threads = omp_get_max_threads();
  std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(voxels, 0));

#pragma omp parallel num_threads(threads)
  {
    auto& local = counts[omp_get_thread_num()];
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t chunk = 0; chunk < total_chunks; ++chunk) {
      const std::size_t cam_index = static_cast<std::size_t>(chunk / chunks_per_camera);
      const std::int64_t sub = chunk % chunks_per_camera;
      const Camera& cam = cameras[cam_index];
      CounterRng rng(derive_key(seed, Stream::kMonteCarlo, cam_index, static_cast<std::uint64_t>(sub)));
      const std::int64_t first = sub * kRaysPerChunk;
      const std::int64_t last = std::min(rays_per_camera, first + kRaysPerChunk);
      const double step = (cam.far - cam.near) / samples_per_ray;
      for (std::int64_t r = first; r < last; ++r) {
        const Vec2 px(rng.uniform() * cam.width, rng.uniform() * cam.height);
        const Vec2 cell(std::floor(px.x()), std::floor(px.y()));
        const Ray ray = generate_ray(cam, cell, Vec2(px - cell));
        double t0 = ray.t_near, t1 = ray.t_far;
        if (!clip_to_box(ray, region, t0, t1)) continue;
        const auto j0 = static_cast<int>(std::max(0.0, std::floor((t0 - ray.t_near) / step) - 1));
        const auto j1 = static_cast<int>(std::min<double>(samples_per_ray - 1, std::ceil((t1 - ray.t_near) / step)));
        CounterRng jitter(derive_key(seed, Stream::kStratification, cam_index, static_cast<std::uint64_t>(r)));
        for (int j = j0; j <= j1; ++j) {
          const double t = ray.t_near + (j + jitter.uniform()) * step;
          const Vec3 f = (ray.at(t) - region.min).cwiseProduct(inv_vsize);
          if (!(f.x() >= 0 && f.y() >= 0 && f.z() >= 0)) continue;
          const int i = static_cast<int>(f.x()), jj = static_cast<int>(f.y()), k = static_cast<int>(f.z());
          if (i >= resolution[0] || jj >= resolution[1] || k >= resolution[2]) continue;
          ++local[hist.index(i, jj, k)];
        }
      }
    }
  }

  const double norm = vsize.prod() * static_cast<double>(rays_per_camera) *
                      static_cast<double>(cameras.size()) * samples_per_ray;
  for (std::size_t v = 0; v < voxels; ++v) {
    std::uint64_t total = 0;
    for (const auto& c : counts) total += c[v];
    hist.values[v] = static_cast<double>(total) / norm;
  }
  return hist;
}

AxisProfile axis_density_profile(const Camera& camera, double d_lo, double d_hi, int bins, double column,
                                 std::int64_t rays, int samples_per_ray, std::uint64_t seed) {
  if (!(d_lo > kCoincidentRadius) || !(d_hi > d_lo)) throw InputError("axis profile needs 0 < d_lo < d_hi");
  if (bins < 1 || !(column > 0.0)) throw InputError("axis profile needs bins >= 1 and column > 0");
  camera.validate();
  // Histogram in camera space: the camera is moved to the origin looking
  // down -Z so the column is an axis-aligned box.
  Camera local = camera;
  local.rotation = Mat3::Identity();
  local.position = Vec3::Zero();
  const double h = 0.5 * column;
  const Box region{Vec3(-h, -h, -d_hi), Vec3(h, h, -d_lo)};
  const Histogram3D hist = density_monte_carlo({local}, region, {1, 1, bins}, rays, samples_per_ray, seed);

  AxisProfile prof;
  const double slab = (d_hi - d_lo) / bins;
  for (int b = 0; b < bins; ++b) {
    // Histogram index 0 is the far end (most negative z).
    const double d = d_lo + (b + 0.5) * slab;
    const int k = bins - 1 - b;
    const Vec3 p(0.0, 0.0, -d);
    prof.distances.push_back(d);
    prof.monte_carlo.push_back(hist.at(0, 0, k));
    prof.approx.push_back(density_approx({local}, p));
    prof.exact.push_back(density_exact({local}, p));
    bool visible = true;
    for (double z : {d - 0.5 * slab, d + 0.5 * slab}) {
      for (double sx : {-h, h}) {
        for (double sy : {-h, h}) visible = visible && visibility(local, Vec3(sx, sy, -z));
      }
    }
    prof.fully_visible.push_back(visible && d + 0.5 * slab <= camera.far && d - 0.5 * slab >= camera.near);
  }
  return prof;
}

DensityProfile visibility_curve(const std::vector<Camera>& cameras, const std::vector<Ray>& probe_rays,
                                const std::vector<double>& distances) {
  if (probe_rays.empty()) throw InputError("visibility_curve needs at least one probe ray");
  DensityProfile prof;
  prof.distances = distances;
  prof.values.assign(distances.size(), 0.0);
  for (std::size_t b = 0; b < distances.size(); ++b) {
    double total = 0.0;
    for (const auto& ray : probe_rays) {
      const Vec3 p = ray.at(distances[b]);
      for (const auto& cam : cameras) total += visibility(cam, p) ? 1.0 : 0.0;
    }
    prof.values[b] = total / static_cast<double>(probe_rays.size());
  }
  return prof;
}

DensityProfile sampling_density_curve(const std::vector<Camera>& cameras,
                                      const std::vector<Ray>& probe_rays,
                                      const std::vector<double>& distances) {
  if (probe_rays.empty()) throw InputError("sampling_density_curve needs at least one probe ray");
  DensityProfile prof;
  prof.distances = distances;
  prof.values.assign(distances.size(), 0.0);
  for (std::size_t b = 0; b < distances.size(); ++b) {
    double total = 0.0;
    std::size_t used = 0;
    for (const auto& ray : probe_rays) {
      try {
        total += density_approx(cameras, ray.at(distances[b]));
        ++used;
      } catch (const SingularityError&) {
      }
    }
    prof.values[b] = used ? total / static_cast<double>(used) : 0.0;
  }
  return prof;
}

std::vector<double> log_spaced(double d_min, double d_max, int per_decade) {
  if (!(d_min > 0.0) || !(d_max > d_min) || per_decade < 1) {
    throw InputError("log_spaced needs 0 < d_min < d_max and per_decade >= 1");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double c = d_min * std::pow(10.0, (k + 0.5) / per_decade);
    if (c > d_max) break;
    out.push_back(c);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("loglog_slope needs equally sized inputs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw InputError("loglog_slope needs at least two positive points");
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InputError("loglog_slope needs distinct x values");
  return (n * sxy - sx * sy) / denom;
}

void write_profile_csv(const std::filesystem::path& path, const DensityProfile& profile) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "distance,value\n";
  for (std::size_t i = 0; i < profile.distances.size(); ++i) {
    out << profile.distances[i] << ',' << profile.values[i] << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace radscale
