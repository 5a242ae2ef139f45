// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace radscale {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

void png_flush_noop(png_structp) {}

struct PngSource {
  const std::string* bytes;
  std::size_t pos;
};

void png_consume(png_structp png, png_bytep data, png_size_t len) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->pos + len > src->bytes->size()) png_error(png, "truncated PNG");
  std::copy_n(src->bytes->data() + src->pos, len, reinterpret_cast<char*>(data));
  src->pos += len;
}

void png_warn(png_structp, png_const_charp) {}

// Failures surface as IoError; nothing is printed.
[[noreturn]] void png_fail(png_structp png, png_const_charp) { png_longjmp(png, 1); }

std::uint8_t to_code(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

void write_png(const fs::path& path, const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw InputError("PNG output needs 1 or 3 channels");
  if (image.width <= 0 || image.height <= 0) throw InputError("PNG output needs a non-empty image");
  std::string out;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(image.width) * image.channels);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png encoding failed: " + path.string());
  }
  {
    png_set_write_fn(png, &out, png_append, png_flush_noop);
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        for (int c = 0; c < image.channels; ++c) row[x * image.channels + c] = to_code(image.at(x, y, c));
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  write_file_atomic(path, out);
}

Image read_png(const fs::path& path) {
  const std::string bytes = read_file(path);
  PngSource src{&bytes, 0};
  Image img;
  std::vector<std::uint8_t> row;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png decoding failed: " + path.string());
  }
  png_set_read_fn(png, &src, png_consume);
  png_read_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int type = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) != 8 || (type != PNG_COLOR_TYPE_RGB && type != PNG_COLOR_TYPE_GRAY)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("only 8-bit RGB or gray PNGs are supported: " + path.string());
  }
  img = Image(w, h, type == PNG_COLOR_TYPE_RGB ? 3 : 1);
  row.resize(static_cast<std::size_t>(w) * img.channels);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w * img.channels; ++x) {
      img.data[static_cast<std::size_t>(y) * w * img.channels + x] = row[x] / 255.0f;
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_pfm(const fs::path& path, const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw InputError("PFM output needs 1 or 3 channels");
  std::string out = image.channels == 3 ? "PF\n" : "Pf\n";
  out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n-1.0\n";
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        const auto bits = std::bit_cast<std::uint32_t>(image.at(x, y, c));
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
      }
    }
  }
  write_file_atomic(path, out);
}

Image read_pfm(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::istringstream header(bytes);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0;
  header >> magic >> w >> h >> scale;
  if (!header || (magic != "PF" && magic != "Pf") || w <= 0 || h <= 0) {
    throw IoError("malformed PFM header: " + path.string());
  }
  if (scale >= 0) throw IoError("big-endian PFM is not supported: " + path.string());
  header.get();  // single whitespace byte after the scale
  const std::size_t offset = static_cast<std::size_t>(header.tellg());
  Image img(w, h, magic == "PF" ? 3 : 1);
  if (bytes.size() != offset + img.data.size() * 4) throw IoError("PFM payload size mismatch: " + path.string());
  std::size_t pos = offset;
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + b])) << (8 * b);
        pos += 4;
        img.at(x, y, c) = std::bit_cast<float>(bits);
      }
    }
  }
  return img;
}

Vec3 plasma(double t) {
  // Control points sampled from the matplotlib plasma map.
  static constexpr std::array<std::array<double, 3>, 6> kStops = {{
      {0.050, 0.030, 0.528},
      {0.417, 0.001, 0.658},
      {0.692, 0.165, 0.565},
      {0.881, 0.393, 0.383},
      {0.988, 0.652, 0.211},
      {0.940, 0.975, 0.131},
  }};
  const double s = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(s), kStops.size() - 2);
  const double f = s - static_cast<double>(i);
  Vec3 out;
  for (int c = 0; c < 3; ++c) out[c] = (1 - f) * kStops[i][c] + f * kStops[i + 1][c];
  return out;
}

Image colorize_depth(const Image& depth, const Image& opacity, double near, double far,
                     double min_opacity) {
  if (depth.channels != 1 || !depth.same_shape(opacity)) throw InputError("depth/opacity shape mismatch");
  Image out(depth.width, depth.height, 3);
  const double span = std::max(far - near, 1e-12);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (opacity.at(x, y) < min_opacity) continue;
      const Vec3 c = plasma((depth.at(x, y) - near) / span);
      for (int k = 0; k < 3; ++k) out.at(x, y, k) = static_cast<float>(c[k]);
    }
  }
  return out;
}

}  // namespace radscale
