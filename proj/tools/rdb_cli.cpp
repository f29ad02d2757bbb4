#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdb/config_io.hpp"
#include "rdb/cube_io.hpp"
#include "rdb/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rdb;

namespace {

struct Common {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

config::RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return config::parse_run_config(config::load_json(path));
}

/// "dir/frame_0003.adc.rcb" -> "frame_0003"
std::string stem_of(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  const auto dot = name.find('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

fs::path out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) { io::write_file_atomic(path, text); }

std::string xyz_text(const PointCloud& cloud) {
  std::ostringstream os;
  os << std::setprecision(9);
  for (const auto& p : cloud) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  return os.str();
}

ChamferMode parse_mode(const std::string& m, ChamferMode fallback) {
  if (m.empty()) return fallback;
  return m == "sum" ? ChamferMode::Sum : ChamferMode::Mean;
}

std::vector<CascadeConfig> load_detectors(const std::string& path) {
  if (path.empty()) return config::reference_detectors();
  return config::parse_detector(config::load_json(path));
}

config::SceneSource load_scene(const std::string& path, const config::RunConfig& rc) {
  if (path.empty()) {
    config::SceneSource src;
    src.source = rc.scenes;
    return src;
  }
  return config::parse_scene_source(config::load_json(path));
}

GridSpec radar_grid(const config::RunConfig& rc) { return GridSpec::from_radar_axes(pipeline_axes(rc.waveform, rc.pipeline)); }

void run_simulate(const Common& c, const std::string& scene_path, std::size_t frames, bool ascii) {
  const auto rc = load_config(c.config);
  const auto src = config::parse_scene_source(config::load_json(scene_path));
  parallel_for(frames, [&](std::size_t i) {
    const auto f = simulate_frame(rc, src, i, c.seed);
    io::write_artifact(f.adc, out_path(c, f.name + ".adc.rcb"));
    io::write_artifact(f.lidar, out_path(c, f.name + ".lidar.rcb"));
    write_text(out_path(c, f.name + ".scene.json"), config::scene_json(f.scene).dump(2) + "\n");
    if (ascii) write_text(out_path(c, f.name + ".lidar.xyz"), xyz_text(f.lidar));
  });
}

void run_process(const Common& c, const std::vector<std::string>& inputs, bool no_compensation) {
  auto rc = load_config(c.config);
  if (no_compensation) rc.pipeline.compensate = false;
  parallel_for(inputs.size(), [&](std::size_t i) {
    const auto frame = io::read_as<AdcFrame>(inputs[i]);
    io::write_artifact(process_frame(frame, rc.pipeline), out_path(c, stem_of(inputs[i]) + ".cube.rcb"));
  });
}

void run_detect(const Common& c, const std::vector<std::string>& inputs, const std::string& detector) {
  const auto rc = load_config(c.config);
  const auto cascades = load_detectors(detector);
  parallel_for(inputs.size(), [&](std::size_t i) {
    const auto cube = io::read_as<RadarCube>(inputs[i]);
    const auto spec = GridSpec::from_radar_axes(cube.axes);
    for (const auto& cas : cascades) {
      const auto dets = cascade_detect(cube, cas);
      const std::string base = stem_of(inputs[i]) + "." + slug(cas.name);
      const auto grid = detections_to_grid(dets, spec, rc.fov);
      std::ostringstream os;
      os << std::setprecision(9) << "range_bin,azimuth_bin,doppler_bin,elevation_bin,power_db\n";
      for (const auto& d : dets)
        os << d.range_bin << ',' << d.azimuth_bin << ',' << d.doppler_bin << ',' << d.elevation_bin << ',' << d.power_db
           << '\n';
      write_text(out_path(c, base + ".detections.csv"), os.str());
      io::write_artifact(grid, out_path(c, base + ".grid.rcb"));
      io::write_artifact(grid_to_points(grid), out_path(c, base + ".points.rcb"));
    }
  });
}

void run_voxelize(const Common& c, const std::vector<std::string>& inputs, bool remove) {
  const auto rc = load_config(c.config);
  const auto spec = radar_grid(rc);
  parallel_for(inputs.size(), [&](std::size_t i) {
    const auto cloud = io::read_as<PointCloud>(inputs[i]);
    const auto gt = ground_truth(cloud, spec, rc, remove, c.seed);
    if (remove && !gt.plane_found && !cloud.empty())
      std::cerr << "rdb: warning: " << inputs[i] << ": no ground plane found, cloud kept unchanged\n";
    const std::string base = stem_of(inputs[i]);
    io::write_artifact(gt.grid, out_path(c, base + ".grid.rcb"));
    if (remove) io::write_artifact(gt.cloud, out_path(c, base + ".noground.rcb"));
  });
}

/// Grid and point view of an evaluation input (grid or point cloud file).
struct EvalInput {
  std::optional<OccupancyGrid> grid;
  PointCloud points;
};

EvalInput load_eval_input(const std::string& path) {
  auto art = io::read_artifact(path);
  EvalInput in;
  if (auto* g = std::get_if<OccupancyGrid>(&art)) {
    in.points = grid_to_points(*g);
    in.grid = std::move(*g);
  } else if (auto* p = std::get_if<PointCloud>(&art)) {
    in.points = std::move(*p);
  } else {
    throw ContractError(path + ": evaluate takes occupancy grids or point clouds");
  }
  return in;
}

void run_evaluate(const Common& c, const std::vector<std::string>& preds, const std::vector<std::string>& gts,
                  const std::string& mode) {
  require(preds.size() == gts.size(), "evaluate: --pred and --gt must be given the same number of times");
  const auto rc = load_config(c.config);
  const auto cm = parse_mode(mode, rc.chamfer_mode);
  EvalReport report;
  report.frames.resize(preds.size());
  parallel_for(preds.size(), [&](std::size_t i) {
    auto p = load_eval_input(preds[i]);
    auto g = load_eval_input(gts[i]);
    const GridSpec spec = p.grid ? p.grid->spec() : g.grid ? g.grid->spec() : radar_grid(rc);
    if (!p.grid) p.grid = voxelize(p.points, spec, rc.fov);
    if (!g.grid) g.grid = voxelize(g.points, spec, rc.fov);
    report.frames[i] = evaluate_frame(stem_of(preds[i]), *p.grid, *g.grid, p.points, g.points, cm, rc.eval_max_range);
  });
  const auto csv = eval_csv(report);
  write_text(out_path(c, "eval.csv"), csv);
  std::cout << csv;
}

void run_sweep(const Common& c, const std::string& scene_path, const std::string& detector, std::size_t frames,
               const std::string& mode, bool remove) {
  auto rc = load_config(c.config);
  rc.chamfer_mode = parse_mode(mode, rc.chamfer_mode);
  if (remove) rc.remove_ground = true;
  const auto src = load_scene(scene_path, rc);
  const auto res = rdb::run_sweep(rc, src, load_detectors(detector), frames, c.seed);
  const auto csv = sweep_csv(res);
  write_text(out_path(c, "sweep.csv"), csv);
  write_text(out_path(c, "sweep_frames.csv"), sweep_frames_csv(res));
  for (const auto& r : res.cascades) write_text(out_path(c, "eval_" + slug(r.cascade.name) + ".csv"), eval_csv(r.report));
  std::cout << csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar detection workbench: simulate, process, detect, voxelize, evaluate, sweep"};
  app.require_subcommand(1);
  app.footer(
      "Environment: RDB_THREADS caps the number of worker threads.\n"
      "File formats are described in FORMATS.md; JSON schemas in README.md.");

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Run configuration (JSON); defaults apply when omitted");
    sub->add_option("--out-dir", common.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "Base random seed")->capture_default_str();
  };

  std::string scene, detector, mode;
  std::size_t frames = 1;
  bool remove = false, ascii = false, no_comp = false;
  std::vector<std::string> inputs, preds, gts;
  const auto modes = CLI::IsMember({"sum", "mean"});

  auto* sim = app.add_subcommand("simulate", "Scene file -> AdcFrame and lidar PointCloud files per frame");
  add_common(sim);
  sim->add_option("--scene", scene, "Scene file (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--frames", frames, "Number of frames")->capture_default_str()->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  sim->add_flag("--ascii", ascii, "Also write lidar clouds as .xyz text");

  auto* proc = app.add_subcommand("process", "AdcFrame files -> RadarCube files");
  add_common(proc);
  proc->add_option("inputs", inputs, "AdcFrame files")->required()->check(CLI::ExistingFile);
  proc->add_flag("--no-compensation", no_comp, "Skip TDMA Doppler extension and migration compensation");

  auto* det = app.add_subcommand("detect", "RadarCube files + detector config -> detections, grids, point clouds");
  add_common(det);
  det->add_option("inputs", inputs, "RadarCube files")->required()->check(CLI::ExistingFile);
  det->add_option("--detector", detector, "Detector file (JSON); the five reference cascades when omitted")
      ->check(CLI::ExistingFile);

  auto* vox = app.add_subcommand("voxelize", "PointCloud files -> OccupancyGrid files on the radar grid");
  add_common(vox);
  vox->add_option("inputs", inputs, "PointCloud files")->required()->check(CLI::ExistingFile);
  vox->add_flag("--remove-ground", remove, "Remove the ground plane before voxelizing");

  auto* ev = app.add_subcommand("evaluate", "Predicted vs ground-truth grids/clouds -> EvalReport CSV");
  add_common(ev);
  ev->add_option("--pred", preds, "Predicted grid or point cloud (repeat per frame)")->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", gts, "Ground-truth grid or point cloud (repeat per frame)")->required()->check(CLI::ExistingFile);
  ev->add_option("--mode", mode, "Chamfer mode")->check(modes);

  auto* sw = app.add_subcommand("sweep", "Run detector cascades over a synthetic set and rank them");
  add_common(sw);
  sw->add_option("--scene", scene, "Scene file (JSON); random road scenes from the config when omitted")
      ->check(CLI::ExistingFile);
  sw->add_option("--detector", detector, "Detector file (JSON); the five reference cascades when omitted")
      ->check(CLI::ExistingFile);
  sw->add_option("--frames", frames, "Number of frames")->default_val(50)->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  sw->add_option("--mode", mode, "Chamfer mode")->check(modes);
  sw->add_flag("--remove-ground", remove, "Remove ground from lidar truth (also the config default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) run_simulate(common, scene, frames, ascii);
    else if (*proc) run_process(common, inputs, no_comp);
    else if (*det) run_detect(common, inputs, detector);
    else if (*vox) run_voxelize(common, inputs, remove);
    else if (*ev) run_evaluate(common, preds, gts, mode);
    else if (*sw) run_sweep(common, scene, detector, frames, mode, remove);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "rdb: error: " << msg << '\n';
    return 1;
  }
  return 0;
}
