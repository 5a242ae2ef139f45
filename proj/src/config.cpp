// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#include "radscale/config.hpp"

#include "radscale/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <set>

namespace radscale {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view to_string(RigKind kind) { return kind == RigKind::kRing ? "ring" : "distance"; }

}  // namespace

Camera RigConfig::camera_template() const {
  Camera c;
  c.width = width;
  c.height = height_px;
  c.focal = 0.5 * width / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
  c.principal_point = Vec2(0.5 * width, 0.5 * height_px);
  c.near = near;
  c.far = far;
  return c;
}

std::vector<Camera> RigConfig::build() const {
  if (kind == RigKind::kRing) return ring_rig(count, radius, height, target, camera_template());
  return distance_rig(count, d_min, d_max, elevation_deg, target, camera_template(), far_margin);
}

void ExperimentConfig::apply_seed(std::uint64_t s) {
  seed = s;
  scene.texture_seed = derive_key(s, Stream::kScene);
  train.seed = s;
}

GradScaleConfig ExperimentConfig::scale_config(ScaleMode mode) const {
  GradScaleConfig g = train.grad_scale;
  g.mode = mode;
  if (mode == ScaleMode::kClampedSigma && auto_sigma) g.sigma = estimate_sigma(rig.build());
  if (mode == ScaleMode::kJacobian && !g.mapping) {
    g.mapping = mapping == MappingKind::kContract ? SpaceMapping::contract() : SpaceMapping::identity();
  }
  return g;
}

void ExperimentConfig::validate() const {
  scene.validate();
  for (int n : field_resolution) {
    if (n < 2) throw ConfigError("/field/resolution", "every component must be >= 2");
  }
  if (rig.count < 1) throw ConfigError("/rig/count", "must be >= 1");
  if (rig.width < 1 || rig.height_px < 1) throw ConfigError("/rig/width", "image size must be positive");
  if (!(rig.fov_deg > 0.0 && rig.fov_deg < 180.0)) throw ConfigError("/rig/fov_deg", "must be in (0, 180)");
  if (!(rig.near >= 0.0) || !(rig.far > rig.near)) throw ConfigError("/rig/far", "need far > near >= 0");
  if (rig.kind == RigKind::kRing && !(rig.radius > 0.0)) throw ConfigError("/rig/radius", "must be positive");
  if (rig.kind == RigKind::kDistance && !(rig.d_min > 0.0 && rig.d_max >= rig.d_min)) {
    throw ConfigError("/rig/d_min", "need 0 < d_min <= d_max");
  }
  if (dataset.samples < 512) throw ConfigError("/dataset/samples", "ground truth needs >= 512 samples per ray");
  if (dataset.test_every < 0) throw ConfigError("/dataset/test_every", "must be >= 0");
  try {
    train.validate();
  } catch (const InputError& e) {
    throw ConfigError("/train", e.what());
  }
  if (!(metrics.collapse_radius > 0.0)) throw ConfigError("/metrics/collapse_radius", "must be positive");
  if (metrics.probe_rays_per_camera < 1) throw ConfigError("/metrics/probe_rays_per_camera", "must be >= 1");
  if (metrics.samples < 2) throw ConfigError("/metrics/samples", "must be >= 2");
  if (compare_modes.empty()) throw ConfigError("/compare/modes", "needs at least one mode");
  if (!(analyze.d_min > 0.0 && analyze.d_max > analyze.d_min)) {
    throw ConfigError("/analyze/d_min", "need 0 < d_min < d_max");
  }
  if (analyze.per_decade < 1 || analyze.probe_rays < 1 || analyze.mc_samples < 1 || analyze.mc_rays < 0 ||
      analyze.mc_bins < 1 || !(analyze.mc_column > 0.0)) {
    throw ConfigError("/analyze", "counts must be positive");
  }
}

namespace {

// Walks one JSON object, remembering which keys were consumed so the rest
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path_ + "/" + key, "unknown key");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return path_ + "/" + key; }

  template <typename V>
  void get(const std::string& key, V& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<V, double>) {
        if (!v->is_number()) throw ConfigError(path(key), "expected a number");
      } else if constexpr (std::is_integral_v<V> && !std::is_same_v<V, bool>) {
        if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
        if constexpr (std::is_unsigned_v<V>) {
          if (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0) {
            throw ConfigError(path(key), "expected a non-negative integer");
          }
        }
      }
      out = v->get<V>();
    } catch (const json::exception& e) {
      throw ConfigError(path(key), e.what());
    }
  }

  void get_vec3(const std::string& key, Vec3& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 3) throw ConfigError(path(key), "expected an array of 3 numbers");
    for (int a = 0; a < 3; ++a) {
      if (!(*v)[a].is_number()) throw ConfigError(path(key) + "/" + std::to_string(a), "expected a number");
      out[a] = (*v)[a].get<double>();
    }
  }

  void get_grid(const std::string& key, GridSize& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 3) throw ConfigError(path(key), "expected an array of 3 integers");
    for (int a = 0; a < 3; ++a) {
      if (!(*v)[a].is_number_integer()) {
        throw ConfigError(path(key) + "/" + std::to_string(a), "expected an integer");
      }
      out[a] = (*v)[a].get<int>();
    }
  }

  template <typename Parse>
  void get_enum(const std::string& key, Parse parse) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    if (!parse(v->get<std::string>())) {
      throw ConfigError(path(key), "unrecognized value \"" + v->get<std::string>() + "\"");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void read_scene(ObjectReader& r, SceneSpec& s) {
  r.get_enum("kind", [&](const std::string& v) {
    auto k = parse_scene_kind(v);
    if (k) s.kind = *k;
    return k.has_value();
  });
  r.get_vec3("center", s.center);
  r.get("extent", s.extent);
  r.get("thickness", s.thickness);
  r.get("density", s.density);
  r.get_grid("gt_resolution", s.gt_resolution);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(std::to_string(line) + ":" + std::to_string(col), e.what());
  }

  ExperimentConfig cfg;
  ObjectReader root(doc, "");
  int version = -1;
  root.get("schema_version", version);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("/schema_version", "expected " + std::to_string(kConfigSchemaVersion));
  }
  std::uint64_t seed = cfg.seed;
  root.get("seed", seed);
  std::string out_dir = cfg.output_dir.string();
  root.get("output_dir", out_dir);
  cfg.output_dir = out_dir;

  if (const json* j = root.find("scene")) {
    ObjectReader r(*j, "/scene");
    read_scene(r, cfg.scene);
  }
  if (const json* j = root.find("field")) {
    ObjectReader r(*j, "/field");
    r.get_grid("resolution", cfg.field_resolution);
    r.get_vec3("bounds_min", cfg.scene.bounds.min);
    r.get_vec3("bounds_max", cfg.scene.bounds.max);
  }
  if (const json* j = root.find("rig")) {
    ObjectReader r(*j, "/rig");
    RigConfig& g = cfg.rig;
    r.get_enum("kind", [&](const std::string& v) {
      if (v == "ring") g.kind = RigKind::kRing;
      else if (v == "distance") g.kind = RigKind::kDistance;
      else return false;
      return true;
    });
    r.get("count", g.count);
    r.get_vec3("target", g.target);
    r.get("radius", g.radius);
    r.get("height", g.height);
    r.get("d_min", g.d_min);
    r.get("d_max", g.d_max);
    r.get("elevation_deg", g.elevation_deg);
    r.get("far_margin", g.far_margin);
    r.get("width", g.width);
    r.get("height_px", g.height_px);
    r.get("fov_deg", g.fov_deg);
    r.get("near", g.near);
    r.get("far", g.far);
  }
  if (const json* j = root.find("dataset")) {
    ObjectReader r(*j, "/dataset");
    r.get("samples", cfg.dataset.samples);
    r.get("test_every", cfg.dataset.test_every);
    if (const json* p = r.find("path"); p && !p->is_null()) {
      if (!p->is_string()) throw ConfigError("/dataset/path", "expected a string or null");
      cfg.dataset.path = fs::path(p->get<std::string>());
    }
  }
  if (const json* j = root.find("train")) {
    ObjectReader r(*j, "/train");
    TrainConfig& t = cfg.train;
    r.get("iterations", t.iterations);
    r.get("batch_rays", t.batch_rays);
    r.get("lr_density", t.lr_density);
    r.get("lr_color", t.lr_color);
    r.get("samples_per_ray", t.samples_per_ray);
    r.get("log_every", t.log_every);
    r.get("snapshot_every", t.snapshot_every);
    r.get("log_probe_rays", t.log_probe_rays);
    r.get_vec3("background", t.background);
    if (const json* n = r.find("near_override"); n && !n->is_null()) {
      if (!n->is_number()) throw ConfigError("/train/near_override", "expected a number or null");
      t.near_override = n->get<double>();
    }
    if (const json* a = r.find("adam")) {
      ObjectReader ar(*a, "/train/adam");
      ar.get("beta1", t.adam.beta1);
      ar.get("beta2", t.adam.beta2);
      ar.get("eps", t.adam.eps);
    }
    if (const json* gs = r.find("grad_scale")) {
      ObjectReader gr(*gs, "/train/grad_scale");
      gr.get_enum("mode", [&](const std::string& v) {
        auto m = parse_scale_mode(v);
        if (m) t.grad_scale.mode = *m;
        return m.has_value();
      });
      gr.get("sigma", t.grad_scale.sigma);
      gr.get("auto_sigma", cfg.auto_sigma);
      gr.get_enum("mapping", [&](const std::string& v) {
        auto m = parse_mapping_kind(v);
        if (m && *m == MappingKind::kCustom) return false;
        if (m) cfg.mapping = *m;
        return m.has_value();
      });
    }
  }
  if (const json* j = root.find("metrics")) {
    ObjectReader r(*j, "/metrics");
    r.get("collapse_radius", cfg.metrics.collapse_radius);
    r.get("probe_rays_per_camera", cfg.metrics.probe_rays_per_camera);
    r.get("samples", cfg.metrics.samples);
    if (const json* c = r.find("checkpoints")) {
      if (!c->is_array()) throw ConfigError("/metrics/checkpoints", "expected an array of integers");
      cfg.metrics.checkpoints.clear();
      for (const auto& v : *c) {
        if (!v.is_number_integer()) throw ConfigError("/metrics/checkpoints", "expected an array of integers");
        cfg.metrics.checkpoints.push_back(v.get<int>());
      }
    }
    if (const json* rc = r.find("report_camera"); rc && !rc->is_null()) {
      if (!rc->is_number_integer()) throw ConfigError("/metrics/report_camera", "expected an integer or null");
      cfg.metrics.report_camera = rc->get<int>();
    }
  }
  if (const json* j = root.find("compare")) {
    ObjectReader r(*j, "/compare");
    if (const json* m = r.find("modes")) {
      if (!m->is_array()) throw ConfigError("/compare/modes", "expected an array of mode names");
      cfg.compare_modes.clear();
      for (std::size_t i = 0; i < m->size(); ++i) {
        const json& v = (*m)[i];
        auto mode = v.is_string() ? parse_scale_mode(v.get<std::string>()) : std::nullopt;
        if (!mode) throw ConfigError("/compare/modes/" + std::to_string(i), "unrecognized mode");
        cfg.compare_modes.push_back(*mode);
      }
    }
  }
  if (const json* j = root.find("analyze")) {
    ObjectReader r(*j, "/analyze");
    r.get("d_min", cfg.analyze.d_min);
    r.get("d_max", cfg.analyze.d_max);
    r.get("per_decade", cfg.analyze.per_decade);
    r.get("probe_rays", cfg.analyze.probe_rays);
    r.get("mc_rays", cfg.analyze.mc_rays);
    r.get("mc_samples", cfg.analyze.mc_samples);
    r.get("mc_column", cfg.analyze.mc_column);
    r.get("mc_bins", cfg.analyze.mc_bins);
  }
  cfg.train.collapse_radius = cfg.metrics.collapse_radius;
  cfg.apply_seed(seed);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string config_to_json(const ExperimentConfig& cfg) {
  auto v3 = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  auto grid = [](const GridSize& g) { return json::array({g[0], g[1], g[2]}); };
  json modes = json::array();
  for (ScaleMode m : cfg.compare_modes) modes.push_back(std::string(to_string(m)));
  const auto& t = cfg.train;
  json doc = {
      {"schema_version", kConfigSchemaVersion},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir.string()},
      {"scene",
       {{"kind", std::string(to_string(cfg.scene.kind))},
        {"center", v3(cfg.scene.center)},
        {"extent", cfg.scene.extent},
        {"thickness", cfg.scene.thickness},
        {"density", cfg.scene.density},
        {"gt_resolution", grid(cfg.scene.gt_resolution)}}},
      {"field",
       {{"resolution", grid(cfg.field_resolution)},
        {"bounds_min", v3(cfg.scene.bounds.min)},
        {"bounds_max", v3(cfg.scene.bounds.max)}}},
      {"rig",
       {{"kind", std::string(to_string(cfg.rig.kind))},
        {"count", cfg.rig.count},
        {"target", v3(cfg.rig.target)},
        {"radius", cfg.rig.radius},
        {"height", cfg.rig.height},
        {"d_min", cfg.rig.d_min},
        {"d_max", cfg.rig.d_max},
        {"elevation_deg", cfg.rig.elevation_deg},
        {"far_margin", cfg.rig.far_margin},
        {"width", cfg.rig.width},
        {"height_px", cfg.rig.height_px},
        {"fov_deg", cfg.rig.fov_deg},
        {"near", cfg.rig.near},
        {"far", cfg.rig.far}}},
      {"dataset",
       {{"samples", cfg.dataset.samples},
        {"test_every", cfg.dataset.test_every},
        {"path", cfg.dataset.path ? json(cfg.dataset.path->string()) : json(nullptr)}}},
      {"train",
       {{"iterations", t.iterations},
        {"batch_rays", t.batch_rays},
        {"lr_density", t.lr_density},
        {"lr_color", t.lr_color},
        {"adam", {{"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"eps", t.adam.eps}}},
        {"samples_per_ray", t.samples_per_ray},
        {"near_override", t.near_override ? json(*t.near_override) : json(nullptr)},
        {"background", v3(t.background)},
        {"log_every", t.log_every},
        {"snapshot_every", t.snapshot_every},
        {"log_probe_rays", t.log_probe_rays},
        {"grad_scale",
         {{"mode", std::string(to_string(t.grad_scale.mode))},
          {"sigma", t.grad_scale.sigma},
          {"auto_sigma", cfg.auto_sigma},
          {"mapping", std::string(to_string(cfg.mapping))}}}}},
      {"metrics",
       {{"collapse_radius", cfg.metrics.collapse_radius},
        {"probe_rays_per_camera", cfg.metrics.probe_rays_per_camera},
        {"samples", cfg.metrics.samples},
        {"checkpoints", cfg.metrics.checkpoints},
        {"report_camera", cfg.metrics.report_camera ? json(*cfg.metrics.report_camera) : json(nullptr)}}},
      {"compare", {{"modes", modes}}},
      {"analyze",
       {{"d_min", cfg.analyze.d_min},
        {"d_max", cfg.analyze.d_max},
        {"per_decade", cfg.analyze.per_decade},
        {"probe_rays", cfg.analyze.probe_rays},
        {"mc_rays", cfg.analyze.mc_rays},
        {"mc_samples", cfg.analyze.mc_samples},
        {"mc_column", cfg.analyze.mc_column},
        {"mc_bins", cfg.analyze.mc_bins}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace radscale
