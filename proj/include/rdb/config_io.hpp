#pragma once

// JSON scene, run and detector files. Schemas are documented in README.md.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdb/cfar.hpp"
#include "rdb/grid.hpp"
#include "rdb/metrics.hpp"
#include "rdb/radar_dsp.hpp"
#include "rdb/scene_sim.hpp"

namespace rdb::config {

using json = nlohmann::json;

/// Contents of a --config file. Every field has a default.
struct RunConfig {
  WaveformConfig waveform;
  ArrayGeometry geometry = ArrayGeometry::cascade_default();
  PipelineConfig pipeline;
  Fov fov;
  double lidar_density = 400.0;  // points/m^2 on target faces
  bool remove_ground = true;
  GroundRemovalParams ground;
  RandomSceneOptions scenes;    // generator used by `sweep` and random scene files
  ChamferMode chamfer_mode = ChamferMode::Mean;
  std::optional<double> eval_max_range;
};

/// Contents of a --scene file: a fixed scene advanced by `frame_period` per
/// frame, or a random road scene per frame drawn with `scene_seed`.
struct SceneSource {
  std::variant<Scene, RandomSceneOptions> source;
  double frame_period = 0.1;  // s

  Scene frame(std::size_t index, std::uint64_t scene_seed) const {
    if (const auto* s = std::get_if<Scene>(&source)) return s->advanced(frame_period * static_cast<double>(index));
    return random_scene(scene_seed, std::get<RandomSceneOptions>(source));
  }
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require(j.is_object(), where + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    require(ok, where + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline Vec3 vec3(const json& j, const std::string& where) {
  require(j.is_array() && j.size() == 3, where + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline std::vector<AntennaPosition> positions(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected a list of [x, z]");
  std::vector<AntennaPosition> out;
  for (const auto& p : j) {
    require(p.is_array() && p.size() == 2, where + ": expected [x, z]");
    out.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return out;
}

inline CfarKind kind_of(const std::string& s) {
  if (s == "CA") return CfarKind::CA;
  if (s == "OS") return CfarKind::OS;
  if (s == "CAOS") return CfarKind::CAOS;
  throw ContractError("unknown CFAR kind '" + s + "'");
}

/// Applies overrides onto a CFAR config that already carries defaults.
inline void apply(const json& j, CfarConfig& c, const std::string& where) {
  check_keys(j, {"kind", "training", "guard", "pfa", "threshold_scale", "rank"}, where);
  if (j.contains("kind")) c.kind = kind_of(j.at("kind").get<std::string>());
  auto pair = [&](const char* key, std::array<std::size_t, 2>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number()) out = {v.get<std::size_t>(), v.get<std::size_t>()};
    else {
      require(v.is_array() && v.size() == 2, where + ": '" + key + "' must be a number or [range, other]");
      out = {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
    }
  };
  pair("training", c.training);
  pair("guard", c.guard);
  if (j.contains("threshold_scale")) {
    c.threshold_scale = j.at("threshold_scale").get<double>();
    c.pfa.reset();
  }
  if (j.contains("pfa")) {
    c.pfa = j.at("pfa").get<double>();
    if (!j.contains("threshold_scale")) c.threshold_scale.reset();
  }
  read(j, "rank", c.os_rank_fraction);
}

}  // namespace detail

inline Scene parse_scene(const json& j) {
  detail::check_keys(j, {"noise_power", "ground_plane", "scatterers", "frame_period"}, "scene");
  Scene s;
  detail::read(j, "noise_power", s.noise_power);
  if (j.contains("ground_plane") && !j.at("ground_plane").is_null()) {
    const auto& g = j.at("ground_plane");
    detail::check_keys(g, {"z_offset", "density"}, "scene.ground_plane");
    GroundPlane gp;
    detail::read(g, "z_offset", gp.z_offset);
    detail::read(g, "density", gp.density);
    s.ground_plane = gp;
  }
  if (j.contains("scatterers")) {
    std::size_t i = 0;
    for (const auto& sj : j.at("scatterers")) {
      const std::string w = "scene.scatterers[" + std::to_string(i++) + "]";
      detail::check_keys(sj, {"position", "velocity", "rcs", "extent"}, w);
      Scatterer sc;
      require(sj.contains("position"), w + ": 'position' is required");
      sc.position = detail::vec3(sj.at("position"), w + ".position");
      if (sj.contains("velocity")) sc.velocity = detail::vec3(sj.at("velocity"), w + ".velocity");
      if (sj.contains("extent")) sc.extent = detail::vec3(sj.at("extent"), w + ".extent");
      detail::read(sj, "rcs", sc.rcs);
      s.scatterers.push_back(sc);
    }
  }
  s.validate();
  return s;
}

inline json scene_json(const Scene& s) {
  json j;
  j["noise_power"] = s.noise_power;
  if (s.ground_plane) j["ground_plane"] = {{"z_offset", s.ground_plane->z_offset}, {"density", s.ground_plane->density}};
  j["scatterers"] = json::array();
  for (const auto& sc : s.scatterers)
    j["scatterers"].push_back({{"position", detail::vec3_json(sc.position)},
                               {"velocity", detail::vec3_json(sc.velocity)},
                               {"rcs", sc.rcs},
                               {"extent", detail::vec3_json(sc.extent)}});
  return j;
}

inline RandomSceneOptions parse_random_options(const json& j, RandomSceneOptions o = {}) {
  detail::check_keys(j, {"min_objects", "max_objects", "min_range", "max_range", "max_azimuth_deg", "max_speed",
                         "sensor_height", "noise_power", "ground_density"},
                     "random scene options");
  detail::read(j, "min_objects", o.min_objects);
  detail::read(j, "max_objects", o.max_objects);
  detail::read(j, "min_range", o.min_range);
  detail::read(j, "max_range", o.max_range);
  detail::read(j, "max_azimuth_deg", o.max_azimuth_deg);
  detail::read(j, "max_speed", o.max_speed);
  detail::read(j, "sensor_height", o.sensor_height);
  detail::read(j, "noise_power", o.noise_power);
  detail::read(j, "ground_density", o.ground_density);
  require(o.min_objects <= o.max_objects && o.min_range > 0.0 && o.min_range <= o.max_range,
          "random scene options out of range");
  return o;
}

inline SceneSource parse_scene_source(const json& j) {
  SceneSource src;
  if (j.contains("random")) {
    detail::check_keys(j, {"random", "frame_period"}, "scene");
    src.source = parse_random_options(j.at("random"));
  } else {
    src.source = parse_scene(j);
  }
  detail::read(j, "frame_period", src.frame_period);
  require(src.frame_period >= 0.0, "frame_period must be >= 0");
  return src;
}

inline RunConfig parse_run_config(const json& j) {
  detail::check_keys(j, {"waveform", "geometry", "pipeline", "fov", "lidar_density", "remove_ground", "ground",
                         "scenes", "chamfer_mode", "eval_max_range"},
                     "config");
  RunConfig c;
  if (j.contains("waveform")) {
    const auto& w = j.at("waveform");
    detail::check_keys(w, {"start_frequency", "chirp_slope", "chirp_duration", "n_adc_samples", "n_chirps",
                           "sampling_frequency", "n_tx", "n_rx"},
                       "config.waveform");
    detail::read(w, "start_frequency", c.waveform.start_frequency);
    detail::read(w, "chirp_slope", c.waveform.chirp_slope);
    detail::read(w, "chirp_duration", c.waveform.chirp_duration);
    detail::read(w, "n_adc_samples", c.waveform.n_adc_samples);
    detail::read(w, "n_chirps", c.waveform.n_chirps);
    detail::read(w, "sampling_frequency", c.waveform.sampling_frequency);
    detail::read(w, "n_tx", c.waveform.n_tx);
    detail::read(w, "n_rx", c.waveform.n_rx);
  }
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    detail::check_keys(g, {"tx", "rx", "tx_schedule"}, "config.geometry");
    c.geometry.tx = detail::positions(g.at("tx"), "config.geometry.tx");
    c.geometry.rx = detail::positions(g.at("rx"), "config.geometry.rx");
    c.geometry.tx_schedule = g.at("tx_schedule").get<std::vector<std::size_t>>();
    if (!j.contains("waveform") || !j.at("waveform").contains("n_tx")) c.waveform.n_tx = c.geometry.tx.size();
    if (!j.contains("waveform") || !j.at("waveform").contains("n_rx")) c.waveform.n_rx = c.geometry.rx.size();
  }
  if (j.contains("pipeline")) {
    const auto& p = j.at("pipeline");
    detail::check_keys(p, {"r_fft", "d_fft", "doppler_bins", "a_fft", "e_fft", "elevation_roi_deg", "candidate_db",
                           "compensate"},
                       "config.pipeline");
    detail::read(p, "r_fft", c.pipeline.r_fft);
    detail::read(p, "d_fft", c.pipeline.d_fft);
    detail::read(p, "doppler_bins", c.pipeline.doppler_bins);
    detail::read(p, "a_fft", c.pipeline.a_fft);
    detail::read(p, "e_fft", c.pipeline.e_fft);
    detail::read(p, "elevation_roi_deg", c.pipeline.elevation_roi_deg);
    detail::read(p, "candidate_db", c.pipeline.candidate_db);
    detail::read(p, "compensate", c.pipeline.compensate);
  }
  if (j.contains("fov")) {
    const auto& f = j.at("fov");
    detail::check_keys(f, {"azimuth_deg", "elevation_deg", "max_range"}, "config.fov");
    detail::read(f, "azimuth_deg", c.fov.azimuth_deg);
    detail::read(f, "elevation_deg", c.fov.elevation_deg);
    detail::read(f, "max_range", c.fov.max_range);
  }
  detail::read(j, "lidar_density", c.lidar_density);
  detail::read(j, "remove_ground", c.remove_ground);
  if (j.contains("ground")) {
    const auto& g = j.at("ground");
    detail::check_keys(g, {"iterations", "inlier_threshold", "max_tilt_deg", "min_inlier_fraction", "seed"},
                       "config.ground");
    detail::read(g, "iterations", c.ground.iterations);
    detail::read(g, "inlier_threshold", c.ground.inlier_threshold);
    detail::read(g, "max_tilt_deg", c.ground.max_tilt_deg);
    detail::read(g, "min_inlier_fraction", c.ground.min_inlier_fraction);
    detail::read(g, "seed", c.ground.seed);
  }
  if (j.contains("scenes")) c.scenes = parse_random_options(j.at("scenes"));
  if (j.contains("chamfer_mode")) {
    const auto m = j.at("chamfer_mode").get<std::string>();
    require(m == "sum" || m == "mean", "config.chamfer_mode must be 'sum' or 'mean'");
    c.chamfer_mode = m == "sum" ? ChamferMode::Sum : ChamferMode::Mean;
  }
  if (j.contains("eval_max_range") && !j.at("eval_max_range").is_null())
    c.eval_max_range = j.at("eval_max_range").get<double>();
  c.waveform.validate();
  c.geometry.validate_against(c.waveform);
  require(c.lidar_density > 0.0, "config.lidar_density must be > 0");
  return c;
}

/// One cascade: a name string, or an object with "name" plus optional
/// "stage1"/"stage2" overrides, "peak_height_db" and "aggregation".
inline CascadeConfig parse_cascade_entry(const json& j) {
  if (j.is_string()) return parse_cascade(j.get<std::string>());
  detail::check_keys(j, {"name", "stage1", "stage2", "peak_height_db", "aggregation"}, "detector");
  require(j.contains("name"), "detector: cascade entry needs a 'name'");
  auto c = parse_cascade(j.at("name").get<std::string>());
  if (j.contains("stage1")) detail::apply(j.at("stage1"), c.stage1, c.name + ".stage1");
  if (j.contains("stage2")) {
    require(c.stage2.has_value(), c.name + ": peak-detector cascades take no stage2 block");
    detail::apply(j.at("stage2"), *c.stage2, c.name + ".stage2");
  }
  detail::read(j, "peak_height_db", c.peak_height_db);
  if (j.contains("aggregation")) {
    const auto a = j.at("aggregation").get<std::string>();
    require(a == "max" || a == "sum", c.name + ": aggregation must be 'max' or 'sum'");
    c.aggregation = a == "max" ? Aggregation::Max : Aggregation::Sum;
  }
  c.stage1.validate(2);
  if (c.stage2) c.stage2->validate(1);
  return c;
}

inline std::vector<CascadeConfig> parse_detector(const json& j) {
  std::vector<CascadeConfig> out;
  if (j.is_object() && j.contains("cascades")) {
    detail::check_keys(j, {"cascades"}, "detector");
    for (const auto& e : j.at("cascades")) out.push_back(parse_cascade_entry(e));
  } else {
    out.push_back(parse_cascade_entry(j));
  }
  require(!out.empty(), "detector file lists no cascades");
  return out;
}

inline std::vector<CascadeConfig> reference_detectors() {
  std::vector<CascadeConfig> out;
  for (const auto& n : reference_cascades()) out.push_back(parse_cascade(n));
  return out;
}

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ContractError(path.string() + ": " + e.what());
  }
}

}  // namespace rdb::config
