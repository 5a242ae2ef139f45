// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "radscale/common.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace radscale {

/// Row-major float raster, channel-interleaved, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// 8-bit PNG of a 1- or 3-channel image; values clamped to [0, 1] and
/// rounded to the nearest code value. The stored values are tagged sRGB and
/// written as-is (no transfer function applied).
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

/// Portable float map: "PF" (rgb) or "Pf" (gray), scale -1.0 for
/// little-endian, rows stored bottom to top.
void write_pfm(const std::filesystem::path& path, const Image& image);
Image read_pfm(const std::filesystem::path& path);

/// Plasma-like palette, t in [0, 1]: purple (0) through orange to yellow (1).
Vec3 plasma(double t);

/// False-color depth: near = purple, far = yellow. Pixels with opacity
/// below `min_opacity` are painted black.
Image colorize_depth(const Image& depth, const Image& opacity, double near, double far,
                     double min_opacity = 0.5);

}  // namespace radscale
