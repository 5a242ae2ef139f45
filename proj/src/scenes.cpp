// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/scenes.hpp"

#include "radscale/renderer.hpp"
#include "radscale/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>

namespace radscale {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kTexturedBox: return "textured_box";
    case SceneKind::kSphereCluster: return "sphere_cluster";
    case SceneKind::kCheckerPlane: return "checker_plane";
  }
  return "?";
}

std::optional<SceneKind> parse_scene_kind(std::string_view name) {
  for (SceneKind k : {SceneKind::kTexturedBox, SceneKind::kSphereCluster, SceneKind::kCheckerPlane}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void SceneSpec::validate() const {
  if (!(extent > 0.0)) throw InputError("scene extent must be positive");
  if (!(thickness > 0.0)) throw InputError("scene thickness must be positive");
  if (!(density > 0.0)) throw InputError("scene density must be positive");
  if (!bounds.valid()) throw InputError("scene bounds must be non-empty");
  for (int n : gt_resolution) {
    if (n < 2) throw InputError("scene gt_resolution must be at least 2 per axis");
  }
  const Vec3 reach = kind == SceneKind::kCheckerPlane ? Vec3(extent, thickness / 2, extent) : Vec3::Constant(extent);
  if (!bounds.contains(center - reach) || !bounds.contains(center + reach)) {
    throw InputError("scene content does not fit inside the field bounds");
  }
}

namespace {

Vec3 random_color(CounterRng& rng) {
  return Vec3(0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform());
}

std::uint64_t cell_hash(std::uint64_t seed, long a, long b, long c) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(a) * 73856093ull ^
                                      static_cast<std::uint64_t>(b) * 19349663ull ^
                                      static_cast<std::uint64_t>(c) * 83492791ull));
}

// Two palette colors in a checker pattern with +-0.05 per-cell variation.
Vec3 checker_color(const Vec3& a, const Vec3& b, std::uint64_t seed, long i, long j, long k) {
  const Vec3 base = ((i + j + k) & 1) ? b : a;
  CounterRng noise(cell_hash(seed, i, j, k));
  Vec3 c;
  for (int ch = 0; ch < 3; ++ch) c[ch] = std::clamp(base[ch] + 0.1 * (noise.uniform() - 0.5), 0.05, 0.95);
  return c;
}

struct Sphere {
  Vec3 center;
  double radius;
  Vec3 color;
};

}  // namespace

VoxelField<float> make_scene(const SceneSpec& spec) {
  spec.validate();
  VoxelField<float> field(spec.gt_resolution, spec.bounds);
  CounterRng rng(derive_key(spec.texture_seed, Stream::kScene));
  const Vec3 palette_a = random_color(rng);
  const Vec3 palette_b = random_color(rng);

  std::function<bool(const Vec3&)> inside;
  std::function<Vec3(const Vec3&)> color;
  std::vector<Sphere> spheres;

  switch (spec.kind) {
    case SceneKind::kTexturedBox: {
      const double cell = spec.extent / 2;
      inside = [&](const Vec3& p) { return ((p - spec.center).cwiseAbs().array() <= spec.extent).all(); };
      color = [&, cell](const Vec3& p) {
        const Vec3 q = (p - spec.center) / cell;
        return checker_color(palette_a, palette_b, spec.texture_seed, std::lround(std::floor(q.x())),
                             std::lround(std::floor(q.y())), std::lround(std::floor(q.z())));
      };
      break;
    }
    case SceneKind::kSphereCluster: {
      const int count = 3 + static_cast<int>(rng.below(6));
      for (int s = 0; s < count; ++s) {
        Vec3 dir;
        do {
          dir = Vec3(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
        } while (dir.squaredNorm() > 1.0);
        const double radius = spec.extent * (0.15 + 0.2 * rng.uniform());
        spheres.push_back({spec.center + dir * (spec.extent - radius), radius, random_color(rng)});
      }
      inside = [&](const Vec3& p) {
        for (const auto& s : spheres) {
          if ((p - s.center).norm() <= s.radius) return true;
        }
        return false;
      };
      color = [&](const Vec3& p) {
        double best = std::numeric_limits<double>::infinity();
        Vec3 c = palette_a;
        for (const auto& s : spheres) {
          const double d = (p - s.center).norm() - s.radius;
          if (d < best) {
            best = d;
            c = s.color;
          }
        }
        return c;
      };
      break;
    }
    case SceneKind::kCheckerPlane: {
      const double cell = spec.extent / 4;
      inside = [&](const Vec3& p) {
        const Vec3 q = p - spec.center;
        return std::abs(q.y()) <= spec.thickness / 2 && std::abs(q.x()) <= spec.extent &&
               std::abs(q.z()) <= spec.extent;
      };
      color = [&, cell](const Vec3& p) {
        const Vec3 q = (p - spec.center) / cell;
        return checker_color(palette_a, palette_b, spec.texture_seed, std::lround(std::floor(q.x())), 0,
                             std::lround(std::floor(q.z())));
      };
      break;
    }
  }

  const float inside_raw = static_cast<float>(softplus_inverse(spec.density));
  auto dens = field.density_raw();
  auto col = field.color_raw();
  const auto& res = spec.gt_resolution;
  for (int k = 0; k < res[2]; ++k) {
    for (int j = 0; j < res[1]; ++j) {
      for (int i = 0; i < res[0]; ++i) {
        const Vec3 p = field.node_position(i, j, k);
        const std::size_t v = field.index(i, j, k);
        dens[v] = inside(p) ? inside_raw : static_cast<float>(kEmptyRaw);
        const Vec3 c = color(p);
        for (int ch = 0; ch < 3; ++ch) col[3 * v + ch] = static_cast<float>(logit(c[ch]));
      }
    }
  }
  return field;
}

Dataset render_dataset(const VoxelField<float>& gt, const std::vector<Camera>& cameras, int samples,
                       int test_every, const Vec3& background) {
  if (cameras.empty()) throw InputError("render_dataset needs at least one camera");
  if (samples < 2) throw InputError("render_dataset needs at least two samples per ray");
  Dataset ds{cameras, {}, gt, {}, {}};
  ds.images.reserve(cameras.size());
  for (std::size_t k = 0; k < cameras.size(); ++k) {
    cameras[k].validate();
    Image img = render_image(gt, cameras[k], samples, background).rgb;
    // Quantize to the 8-bit codes a PNG round trip produces, so in-memory
    // and reloaded datasets are identical.
    for (float& v : img.data) v = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0f;
    ds.images.push_back(std::move(img));
    const bool is_test = test_every > 0 && static_cast<int>(k % test_every) == test_every - 1;
    (is_test ? ds.test : ds.train).push_back(static_cast<int>(k));
  }
  if (ds.train.empty()) throw InputError("dataset split left no training cameras");
  return ds;
}

std::string cameras_to_json(const std::vector<Camera>& cameras) {
  json doc;
  doc["convention"] =
      "rotation is world_from_camera (row-major 3x3); camera looks down -Z with +Y up; "
      "image x right, y down; pixel centers at +0.5";
  doc["cameras"] = json::array();
  for (std::size_t k = 0; k < cameras.size(); ++k) {
    const Camera& c = cameras[k];
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back({c.rotation(r, 0), c.rotation(r, 1), c.rotation(r, 2)});
    doc["cameras"].push_back({{"index", k},
                              {"rotation", rot},
                              {"position", {c.position.x(), c.position.y(), c.position.z()}},
                              {"focal", c.focal},
                              {"principal_point", {c.principal_point.x(), c.principal_point.y()}},
                              {"width", c.width},
                              {"height", c.height},
                              {"near", c.near},
                              {"far", c.far}});
  }
  return doc.dump(2) + "\n";
}

std::vector<Camera> cameras_from_json(const std::string& text) {
  std::vector<Camera> out;
  try {
    const json doc = json::parse(text);
    for (const auto& jc : doc.at("cameras")) {
      Camera c;
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) c.rotation(r, col) = jc.at("rotation").at(r).at(col).get<double>();
      }
      for (int a = 0; a < 3; ++a) c.position[a] = jc.at("position").at(a).get<double>();
      c.focal = jc.at("focal").get<double>();
      c.principal_point = Vec2(jc.at("principal_point").at(0).get<double>(), jc.at("principal_point").at(1).get<double>());
      c.width = jc.at("width").get<int>();
      c.height = jc.at("height").get<int>();
      c.near = jc.at("near").get<double>();
      c.far = jc.at("far").get<double>();
      c.validate();
      out.push_back(c);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed cameras.json: ") + e.what());
  }
  return out;
}

namespace {

fs::path image_path(const fs::path& dir, std::size_t k) {
  char name[32];
  std::snprintf(name, sizeof(name), "cam_%04zu.png", k);
  return dir / "images" / name;
}

}  // namespace

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  if (ec) throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "cameras.json", cameras_to_json(dataset.cameras));
  for (std::size_t k = 0; k < dataset.images.size(); ++k) write_png(image_path(dir, k), dataset.images[k]);
  save_checkpoint(dataset.gt_field, dir / "gt.rsvf");
  const json split = {{"train", dataset.train}, {"test", dataset.test}};
  write_file_atomic(dir / "split.json", split.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
  std::vector<Camera> cams = cameras_from_json(read_file(dir / "cameras.json"));
  Dataset ds{cams, {}, load_checkpoint<float>(dir / "gt.rsvf"), {}, {}};
  for (std::size_t k = 0; k < cams.size(); ++k) {
    Image img = read_png(image_path(dir, k));
    if (img.width != cams[k].width || img.height != cams[k].height || img.channels != 3) {
      throw IoError("image size does not match camera " + std::to_string(k));
    }
    ds.images.push_back(std::move(img));
  }
  try {
    const json split = json::parse(read_file(dir / "split.json"));
    ds.train = split.at("train").get<std::vector<int>>();
    ds.test = split.at("test").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed split.json: ") + e.what());
  }
  for (int idx : ds.train) {
    if (idx < 0 || idx >= static_cast<int>(cams.size())) throw IoError("split.json index out of range");
  }
  for (int idx : ds.test) {
    if (idx < 0 || idx >= static_cast<int>(cams.size())) throw IoError("split.json index out of range");
  }
  return ds;
}

}  // namespace radscale
