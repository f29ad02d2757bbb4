// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cases.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "rdb/grid.hpp"
#include "rdb/metrics.hpp"
#include "rdb/pipeline.hpp"

using namespace rdb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// ---- DSP recovery ----------------------------------------------------------

Outcome dsp_recovery() {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const PipelineConfig pc;
  std::mt19937_64 rng(20240601);
  double worst_r = 0, worst_a = 0, worst_d = 0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto t = scenario::random_target(rng);
    const auto cube = process_frame(simulate_adc(scenario::scene_of(t, 20.0), w, g, 1000 + i), pc);
    const auto e = scenario::errors(cube, scenario::truth_bins(t, w, pc, true));
    worst_r = std::max(worst_r, e.range);
    worst_a = std::max(worst_a, e.azimuth);
    worst_d = std::max(worst_d, e.doppler);
    if (e.range > 1.0 || e.azimuth > 1.0 || e.doppler > 1.0) ++bad;
  }
  return {bad == 0, "100 targets, SNR 20 dB; worst |err| range " + fmt(worst_r) + ", azimuth " + fmt(worst_a) +
                        ", doppler " + fmt(worst_d) + " bins; " + std::to_string(bad) + " outside +-1"};
}

// ---- TDMA extension and migration A/B ---------------------------------------

Outcome tdma_ab() {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  PipelineConfig on, off;
  off.compensate = false;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> range(8.0, 40.0), az(-40.0, 40.0);
  int ok = 0;
  double max_alias = 0, worst_dopp = 0, worst_az_on = 0, best_az_off = 1e9;
  for (int i = 0; i < 20; ++i) {
    const scenario::Target t{range(rng), az(rng), 0.0, 10.0};
    const auto frame = simulate_adc(scenario::scene_of(t, 20.0), w, g, 500 + i);
    const auto c_on = process_frame(frame, on);
    const auto c_off = process_frame(frame, off);
    const auto e_on = scenario::errors(c_on, scenario::truth_bins(t, w, on, true));
    const auto e_off = scenario::errors(c_off, scenario::truth_bins(t, w, off, false));
    const double v_alias = c_off.axes.velocity[e_off.peak.d];
    max_alias = std::max(max_alias, std::abs(v_alias));
    worst_dopp = std::max(worst_dopp, e_on.doppler);
    worst_az_on = std::max(worst_az_on, e_on.azimuth);
    best_az_off = std::min(best_az_off, e_off.azimuth);
    const bool aliased = std::abs(v_alias) <= w.max_velocity_tdma();
    if (aliased && e_on.doppler <= 1.0 && e_on.azimuth <= 1.0 && e_off.azimuth > 2.0) ++ok;
  }
  return {ok == 20, "v = 10 m/s, 20 trials passing " + std::to_string(ok) + "; max |v| without extension " +
                        fmt(max_alias) + " m/s; worst doppler err with " + fmt(worst_dopp) + " bins; azimuth err with " +
                        "<= " + fmt(worst_az_on) + ", without >= " + fmt(best_az_off) + " bins"};
}

// ---- CFAR calibration ------------------------------------------------------

Outcome cfar_calibration() {
  std::mt19937_64 rng(9001);
  std::exponential_distribution<double> ex(1.0);
  PowerPlane x(1000, 1000);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = ex(rng);
  CfarConfig ca;
  ca.kind = CfarKind::CA;
  ca.training = {8, 8};
  ca.guard = {1, 1};
  ca.pfa = 1e-3;
  const auto mask = cfar_2d(x, ca);
  const double rate = static_cast<double>(mask.count()) / static_cast<double>(mask.size());

  // Two equal targets three cells apart inside each other's training windows.
  std::vector<double> p(64, 1.0);
  p[30] = p[33] = 20.0;
  auto win = [](CfarKind k) {
    CfarConfig c;
    c.kind = k;
    c.training = {8, 0};
    c.guard = {0, 0};
    return c.with_scale(10.0);
  };
  auto count = [](const std::vector<bool>& m) { return std::count(m.begin(), m.end(), true); };
  const auto n_ca = count(cfar_1d(p, win(CfarKind::CA)));
  const auto m_os = cfar_1d(p, win(CfarKind::OS));
  const bool os_both = m_os[30] && m_os[33];
  const bool pass = rate >= 0.5e-3 && rate <= 2e-3 && os_both && n_ca <= 1;
  return {pass, "CA Pfa " + fmt(rate) + " on 1e6 cells (design 1e-3); masking instance CA " + std::to_string(n_ca) +
                    " detections, OS both " + (os_both ? "yes" : "no")};
}

// ---- CFAR equivalence ------------------------------------------------------

Outcome cfar_equivalence() {
  std::mt19937_64 rng(4242);
  std::exponential_distribution<double> ex(1.0);
  std::vector<CfarConfig> two_d;
  for (auto kind : {CfarKind::CA, CfarKind::OS, CfarKind::CAOS}) {
    CfarConfig a;
    a.kind = kind;
    a.training = {4, 3};
    a.guard = {2, 1};
    a.pfa = 1e-2;
    two_d.push_back(a);
    two_d.push_back(default_stage1(kind).with_scale(4.0));
  }
  std::size_t checks = 0, mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    PowerPlane x(64, 64);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = std::round(ex(rng) * 1024.0) / 1024.0;
    for (int k = 0; k < 8; ++k) x(static_cast<Eigen::Index>(rng() % 64), static_cast<Eigen::Index>(rng() % 64)) *= 64.0;
    for (const auto& c : two_d) {
      ++checks;
      if (!(cfar_2d(x, c) == oracle::naive_cfar(x, c)).all()) ++mismatches;
    }
    for (auto kind : {CfarKind::CA, CfarKind::OS})
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        std::vector<double> row(x.row(r).data(), x.row(r).data() + x.cols());
        const auto c = default_stage2(kind);
        ++checks;
        if (cfar_1d(row, c) != oracle::naive_cfar_1d(row, c)) ++mismatches;
      }
  }
  return {mismatches == 0, "50 random 64x64 inputs, " + std::to_string(checks) + " masks compared, " +
                               std::to_string(mismatches) + " mismatches"};
}

// ---- Chamfer ---------------------------------------------------------------

Outcome chamfer_correctness() {
  bool hand = chamfer({{0, 0, 0}}, {{1, 0, 0}}, ChamferMode::Sum) == 2.0 &&
              chamfer({{0, 0, 0}, {2, 0, 0}}, {{1, 0, 0}}, ChamferMode::Sum) == 3.0 &&
              chamfer({{0, 0, 0}, {2, 0, 0}}, {{1, 0, 0}}, ChamferMode::Mean) == 2.0;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(-25.0, 25.0);
  auto cloud = [&] {
    PointCloud pc;
    for (int i = 0; i < 500; ++i) pc.emplace_back(u(rng), u(rng) + 25.0, 0.1 * u(rng));
    return pc;
  };
  int brute = 0, sym = 0, ident = 0;
  for (int i = 0; i < 20; ++i) {
    const auto a = cloud(), b = cloud();
    bool same = true;
    for (auto m : {ChamferMode::Sum, ChamferMode::Mean}) same = same && chamfer(a, b, m) == oracle::chamfer(a, b, m);
    brute += same;
    sym += chamfer(a, b) == chamfer(b, a);
    ident += chamfer(a, a) == 0.0;
  }
  return {hand && brute == 20 && sym == 20 && ident == 20,
          std::string("hand examples ") + (hand ? "exact" : "WRONG") + "; brute force " + std::to_string(brute) +
              "/20, symmetry " + std::to_string(sym) + "/20, identity " + std::to_string(ident) + "/20"};
}

// ---- Grid round trip -------------------------------------------------------

Outcome grid_round_trip() {
  const auto spec = GridSpec::from_radar_axes(pipeline_axes(WaveformConfig{}));
  std::mt19937_64 rng(1000);
  PointCloud all;
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = cases::random_fov_point(rng);
    all.push_back(p);
    const auto v = voxel_of(p, spec);
    const auto back = grid_to_points(voxelize({p}, spec));
    if (!v || back.size() != 1) continue;
    const auto q = to_sine_space(back[0]), s = to_sine_space(p);
    auto half = [](const std::vector<double>& e, std::size_t k) { return 0.5 * (e[k + 1] - e[k]) + 1e-12; };
    inside += std::abs(q.range - s.range) <= half(spec.range_edges, (*v)[0]) &&
              std::abs(q.sin_az - s.sin_az) <= half(spec.sin_azimuth_edges, (*v)[1]) &&
              std::abs(q.sin_el - s.sin_el) <= half(spec.sin_elevation_edges, (*v)[2]);
  }
  const auto g = voxelize(all, spec);
  const bool fixed = voxelize(grid_to_points(g), spec) == g;
  return {inside == 1000 && fixed, std::to_string(inside) + "/1000 points within their voxel's half-extents; " +
                                       std::to_string(g.count()) + " voxels, re-voxelization " +
                                       (fixed ? "is" : "is NOT") + " a fixed point"};
}

// ---- Ground removal --------------------------------------------------------

Outcome ground_removal() {
  const auto pc = cases::ground_and_box(10000, 0.0, 12);
  const auto res = remove_ground(pc.cloud);
  std::size_t ground_left = 0, box_left = 0;
  for (const auto& q : res.cloud) (q.z() < 0.25 ? ground_left : box_left)++;
  const double removed = 1.0 - static_cast<double>(ground_left) / static_cast<double>(pc.ground);
  const double kept = static_cast<double>(box_left) / static_cast<double>(pc.cloud.size() - pc.ground);
  return {res.plane_found && removed >= 0.99 && kept >= 0.99,
          "ground removed " + fmt(100 * removed) + "%, object retained " + fmt(100 * kept) + "%"};
}

// ---- Sweep via the CLI ----------------------------------------------------

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : s) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) out.push_back(std::exchange(cur, {}));
      else cur += c;
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    auto cells = split(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

Outcome sweep_experiment() {
  const fs::path dir = fs::temp_directory_path() / "rdb_acceptance_sweep";
  fs::remove_all(dir);
  const std::string cmd = std::string("\"") + RDB_CLI_PATH + "\" sweep --frames 50 --seed 7 --out-dir \"" +
                          dir.string() + "\" > \"" + (dir.string() + ".log") + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, "rdb sweep exited with status " + std::to_string(rc)};
  const auto ranked = read_csv(dir / "sweep.csv");
  const auto frames = read_csv(dir / "sweep_frames.csv");
  std::set<std::string> names;
  bool finite = true, ordered = true;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    names.insert(ranked[i].at("cascade"));
    for (const char* k : {"pd", "pfa", "chamfer"}) finite = finite && std::isfinite(std::stod(ranked[i].at(k)));
    ordered = ordered && std::stoul(ranked[i].at("rank")) == i + 1;
    if (i > 0) ordered = ordered && std::stod(ranked[i - 1].at("chamfer")) <= std::stod(ranked[i].at("chamfer"));
  }
  const auto ref = reference_cascades();
  bool all_five = names.size() == 5;
  for (const auto& n : ref) all_five = all_five && names.count(n);
  std::size_t sparser = 0;
  for (const auto& f : frames) sparser += std::stoul(f.at("detections")) < std::stoul(f.at("lidar_points"));
  std::string order;
  for (const auto& r : ranked)
    order += "\n      " + r.at("rank") + ". " + r.at("cascade") + "  Pd " + fmt(std::stod(r.at("pd"))) + "  Pfa " +
             fmt(std::stod(r.at("pfa"))) + "  Chamfer " + fmt(std::stod(r.at("chamfer")));
  const bool pass = all_five && finite && ordered && frames.size() == 250 && sparser == frames.size();
  return {pass, "5 cascades x 50 frames; ranked rows " + std::to_string(ranked.size()) + ", finite " +
                    (finite ? "yes" : "no") + ", frames sparser than lidar " + std::to_string(sparser) + "/" +
                    std::to_string(frames.size()) + order};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dsp-recovery", dsp_recovery},       {"tdma-extension-ab", tdma_ab},
      {"cfar-pfa-calibration", cfar_calibration}, {"cfar-brute-force-equivalence", cfar_equivalence},
      {"chamfer-correctness", chamfer_correctness}, {"grid-round-trip", grid_round_trip},
      {"ground-removal", ground_removal},   {"sweep-experiment", sweep_experiment},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(secs, 3) << " s): " << o.detail << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
