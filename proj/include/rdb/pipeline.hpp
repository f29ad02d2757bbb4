#pragma once

// Frame generation, ground truth and the multi-cascade sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rdb/cfar.hpp"
#include "rdb/config_io.hpp"
#include "rdb/grid.hpp"
#include "rdb/metrics.hpp"
#include "rdb/radar_dsp.hpp"
#include "rdb/scene_sim.hpp"

namespace rdb {

enum class SeedStream : std::uint64_t { Scene = 0, Adc = 1, Lidar = 2, Ground = 3 };

/// Independent per-frame, per-purpose seeds (splitmix64 finaliser).
inline std::uint64_t frame_seed(std::uint64_t base, std::size_t frame, SeedStream stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(frame) * 4 + static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::string frame_name(std::size_t i) {
  std::ostringstream os;
  os << "frame_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

/// Worker count: hardware concurrency, capped by RDB_THREADS when set.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RDB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end != env && *end == '\0' && v > 0, "RDB_THREADS must be a positive integer");
    n = std::min(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs fn(i) for i in [0, n) on worker_count(n) threads. The first exception
/// stops scheduling and is rethrown.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct SimulatedFrame {
  std::string name;
  Scene scene;
  AdcFrame adc;
  PointCloud lidar;  // FoV-cropped, ground returns included
};

inline SimulatedFrame simulate_frame(const config::RunConfig& rc, const config::SceneSource& src, std::size_t index,
                                     std::uint64_t seed) {
  SimulatedFrame f;
  f.name = frame_name(index);
  f.scene = src.frame(index, frame_seed(seed, index, SeedStream::Scene));
  f.adc = simulate_adc(f.scene, rc.waveform, rc.geometry, frame_seed(seed, index, SeedStream::Adc));
  f.lidar = sample_lidar(f.scene, rc.fov, rc.lidar_density, frame_seed(seed, index, SeedStream::Lidar));
  return f;
}

struct GroundTruth {
  PointCloud cloud;  // lidar after optional ground removal
  OccupancyGrid grid;
  bool plane_found = false;
  std::size_t ground_removed = 0;
};

inline GroundTruth ground_truth(const PointCloud& lidar, const GridSpec& spec, const config::RunConfig& rc,
                                bool remove, std::uint64_t seed) {
  GroundTruth gt{lidar, OccupancyGrid(spec)};
  if (remove && !lidar.empty()) {
    auto params = rc.ground;
    params.seed ^= seed;
    auto res = remove_ground(lidar, params);
    gt.cloud = std::move(res.cloud);
    gt.plane_found = res.plane_found;
    gt.ground_removed = res.removed;
  }
  gt.grid = voxelize(gt.cloud, spec, rc.fov);
  return gt;
}

/// Grid and Chamfer evaluation of one detection list against ground truth.
inline FrameEval evaluate_detections(const std::string& name, const DetectionList& dets, const GroundTruth& gt,
                                     const config::RunConfig& rc) {
  const auto grid = detections_to_grid(dets, gt.grid.spec(), rc.fov);
  return evaluate_frame(name, grid, gt.grid, grid_to_points(grid), gt.cloud, rc.chamfer_mode, rc.eval_max_range);
}

struct CascadeResult {
  CascadeConfig cascade;
  EvalReport report;
  std::vector<std::size_t> detections;    // per frame, before grid collapse
  std::vector<std::size_t> lidar_points;  // per frame, ground-truth cloud size

  std::size_t frames_sparser() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < detections.size(); ++i) n += detections[i] < lidar_points[i] ? 1 : 0;
    return n;
  }
  double mean_detections() const {
    double s = 0.0;
    for (auto d : detections) s += static_cast<double>(d);
    return detections.empty() ? 0.0 : s / static_cast<double>(detections.size());
  }
  double mean_lidar_points() const {
    double s = 0.0;
    for (auto d : lidar_points) s += static_cast<double>(d);
    return lidar_points.empty() ? 0.0 : s / static_cast<double>(lidar_points.size());
  }
};

struct SweepResult {
  std::vector<CascadeResult> cascades;  // input order
  std::vector<std::size_t> ranking;     // indices into cascades, best first
};

/// Best first: lower mean Chamfer, then higher Pd, then lower Pfa. Cascades
/// without a defined Chamfer rank last.
inline std::vector<std::size_t> rank_cascades(const std::vector<CascadeResult>& res) {
  std::vector<std::size_t> idx(res.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ca = res[a].report.chamfer(), cb = res[b].report.chamfer();
    const bool fa = std::isfinite(ca), fb = std::isfinite(cb);
    if (fa != fb) return fa;
    if (fa && ca != cb) return ca < cb;
    if (res[a].report.pd() != res[b].report.pd()) return res[a].report.pd() > res[b].report.pd();
    return res[a].report.pfa() < res[b].report.pfa();
  });
  return idx;
}

inline SweepResult run_sweep(const config::RunConfig& rc, const config::SceneSource& src,
                             const std::vector<CascadeConfig>& cascades, std::size_t frames, std::uint64_t seed,
                             const std::function<void(std::size_t)>& on_frame = {}) {
  require(frames > 0, "sweep needs at least one frame");
  require(!cascades.empty(), "sweep needs at least one cascade");
  const GridSpec spec = GridSpec::from_radar_axes(pipeline_axes(rc.waveform, rc.pipeline));

  SweepResult out;
  for (const auto& c : cascades) {
    CascadeResult r;
    r.cascade = c;
    r.report.frames.resize(frames);
    r.detections.resize(frames);
    r.lidar_points.resize(frames);
    out.cascades.push_back(std::move(r));
  }
  std::mutex progress;
  parallel_for(frames, [&](std::size_t i) {
    const auto sim = simulate_frame(rc, src, i, seed);
    const auto cube = process_frame(sim.adc, rc.pipeline);
    const auto gt = ground_truth(sim.lidar, spec, rc, rc.remove_ground, frame_seed(seed, i, SeedStream::Ground));
    for (auto& c : out.cascades) {
      const auto dets = cascade_detect(cube, c.cascade);
      c.report.frames[i] = evaluate_detections(sim.name, dets, gt, rc);
      c.detections[i] = dets.size();
      c.lidar_points[i] = gt.cloud.size();
    }
    if (on_frame) {
      std::lock_guard lock(progress);
      on_frame(i);
    }
  });
  out.ranking = rank_cascades(out.cascades);
  return out;
}

inline const char* kSweepCsvHeader =
    "rank,cascade,pd,pfa,chamfer,frames,chamfer_frames,mean_detections,mean_lidar_points,frames_sparser";

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << std::setprecision(10) << kSweepCsvHeader << '\n';
  for (std::size_t k = 0; k < s.ranking.size(); ++k) {
    const auto& c = s.cascades[s.ranking[k]];
    os << k + 1 << ",\"" << c.cascade.name << "\"," << c.report.pd() << ',' << c.report.pfa() << ','
       << c.report.chamfer() << ',' << c.report.frames.size() << ',' << c.report.chamfer_frames() << ','
       << c.mean_detections() << ',' << c.mean_lidar_points() << ',' << c.frames_sparser() << '\n';
  }
  return os.str();
}

inline const char* kSweepFramesCsvHeader = "cascade,frame,detections,lidar_points,pred_points,pd,pfa,chamfer";

inline std::string sweep_frames_csv(const SweepResult& s) {
  std::ostringstream os;
  os << std::setprecision(10) << kSweepFramesCsvHeader << '\n';
  for (const auto& c : s.cascades)
    for (std::size_t i = 0; i < c.report.frames.size(); ++i) {
      const auto& f = c.report.frames[i];
      os << '"' << c.cascade.name << "\"," << f.frame << ',' << c.detections[i] << ',' << c.lidar_points[i] << ','
         << f.pred_points << ',' << f.counts.pd() << ',' << f.counts.pfa() << ',' << f.chamfer << '\n';
    }
  return os.str();
}

}  // namespace rdb
