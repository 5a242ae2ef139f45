// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/analysis.hpp"
#include "radscale/field.hpp"
#include "radscale/geometry.hpp"
#include "radscale/image_io.hpp"
#include "radscale/renderer.hpp"

#include <vector>

namespace radscale {

/// Peak signal-to-noise ratio with peak 1.0 on linear values:
/// -10 log10(MSE). Identical images give +infinity. Throws InputError on a
/// shape mismatch.
double psnr(const Image& img, const Image& ref);

/// Collapse radius used when a report does not say otherwise.
inline constexpr double kDefaultCollapseRadius = 0.25;

/// Fraction of each camera's rendered opacity that sits within `radius` of
/// the camera, averaged over a regular grid of probe rays.
struct CollapseReport {
  double radius = kDefaultCollapseRadius;
  std::vector<double> per_camera;
  double mean = 0.0;
  double max = 0.0;
};

/// Probe rays start at the camera center (near = 0) regardless of the
/// camera's own near plane, and pass through pixel positions on a regular
/// ceil(sqrt(rays_per_camera))^2 grid. For each ray the compositing weights
/// of samples with t < radius are summed.
template <typename T>
CollapseReport near_camera_mass(const VoxelField<T>& field, const std::vector<Camera>& cameras,
                                double radius, int rays_per_camera, int samples);

struct DepthError {
  /// NaN when no pixel qualifies.
  double mean;
  std::size_t pixels;
};

/// Accumulates |depth - gt_depth| over pixels whose ground-truth opacity
/// exceeds 0.5.
inline constexpr double kOpaqueThreshold = 0.5;

DepthError depth_error(const std::vector<RenderedImage>& renders, const std::vector<RenderedImage>& gt);

/// Renders both fields from every camera and compares expected depths.
template <typename T, typename U>
DepthError depth_error(const VoxelField<T>& field, const VoxelField<U>& gt_field,
                       const std::vector<Camera>& cameras, int samples);

/// Mean field density as a function of the distance to the nearest camera.
/// Density is sampled at the nodes of a `lattice`^3 grid spanning the field
/// bounds; a point falls into the bin whose geometric edges (midpoints
/// between neighboring centers in log space) enclose its distance. Empty
/// bins report 0.
template <typename T>
DensityProfile density_vs_distance_profile(const VoxelField<T>& field, const std::vector<Camera>& cameras,
                                           const std::vector<double>& bin_centers, int lattice = 48);

}  // namespace radscale
