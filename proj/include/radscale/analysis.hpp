// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sampling density of linear ray marching. For camera i with center c_i
// and unit forward axis d_i, a point p receives
//
//   rho_i(p) = v_i(p) * |p - c_i| / (d_i . (p - c_i)) * 1 / |p - c_i|^2
//
// samples per unit volume (up to a global constant). The middle factor is
// 1/cos(theta) of the angle to the optical axis; dropping it gives the
// approximation v_i(p) / |p - c_i|^2. A scene sums over cameras.

#include "radscale/common.hpp"
#include "radscale/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace radscale {

/// Points closer than this to a camera center are a singularity.
inline constexpr double kCoincidentRadius = 1e-9;

struct DensityProfile {
  std::vector<double> distances;
  std::vector<double> values;
};

double density_exact(const std::vector<Camera>& cameras, const Vec3& p);
double density_approx(const std::vector<Camera>& cameras, const Vec3& p);

/// Samples per unit volume on a regular voxel grid over `region`.
struct Histogram3D {
  Box region;
  std::array<int, 3> resolution{1, 1, 1};
  std::vector<double> values;

  Vec3 voxel_size() const;
  Vec3 voxel_center(int i, int j, int k) const;
  double& at(int i, int j, int k) { return values[index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(resolution[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(resolution[1]) * k);
  }
};

/// Casts `rays_per_camera` rays per camera through uniformly random image
/// positions, places `samples_per_ray` stratified linear samples on
/// [near, far], and counts them per voxel. Counts are divided by the voxel
/// volume and by the total number of samples cast, so values are comparable
/// to density_approx up to a global constant. Cameras run in parallel with
/// per-thread histograms; camera k draws from its own counter stream so
/// the result does not depend on the thread count.
Histogram3D density_monte_carlo(const std::vector<Camera>& cameras, const Box& region,
                                const std::array<int, 3>& resolution, std::int64_t rays_per_camera,
                                int samples_per_ray, std::uint64_t seed);

/// Monte Carlo density along one camera's optical axis next to the two
/// analytic models. The histogram is a square column of side `column`
/// centered on the axis, split into `bins` equal slabs between distances
/// d_lo and d_hi. A slab is fully visible when all four corners of both of
/// its faces are inside the field of view.
struct AxisProfile {
  std::vector<double> distances;
  std::vector<double> monte_carlo;
  std::vector<double> approx;
  std::vector<double> exact;
  std::vector<bool> fully_visible;
};

AxisProfile axis_density_profile(const Camera& camera, double d_lo, double d_hi, int bins, double column,
                                 std::int64_t rays, int samples_per_ray, std::uint64_t seed);

/// Mean over probe rays of the number of cameras that see
/// origin + d * direction, for each d in `distances`.
DensityProfile visibility_curve(const std::vector<Camera>& cameras, const std::vector<Ray>& probe_rays,
                                const std::vector<double>& distances);

/// Mean density_approx along probe rays at each distance (coincident points
/// are skipped).
DensityProfile sampling_density_curve(const std::vector<Camera>& cameras,
                                      const std::vector<Ray>& probe_rays,
                                      const std::vector<double>& distances);

/// Geometric bin centers between d_min and d_max, `per_decade` per decade.
std::vector<double> log_spaced(double d_min, double d_max, int per_decade = 32);

/// Least-squares slope of log(y) against log(x) over entries with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// "distance,value" header, one row per bin.
void write_profile_csv(const std::filesystem::path& path, const DensityProfile& profile);

}  // namespace radscale
