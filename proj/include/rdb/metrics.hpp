#pragma once

// Grid-level detection/false-alarm probabilities and the Chamfer distance.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "rdb/common.hpp"
#include "rdb/grid.hpp"
#include "rdb/pointcloud.hpp"

namespace rdb {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  double pd() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
  double pfa() const { return fp + tn ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Per-voxel confusion of `pred` against `gt`. With `max_range`, only range
/// cells whose upper edge is within it are counted.
inline ConfusionCounts pd_pfa(const OccupancyGrid& pred, const OccupancyGrid& gt,
                              std::optional<double> max_range = std::nullopt) {
  require(pred.spec() == gt.spec(), "pd_pfa: grids have different GridSpecs");
  const auto d = gt.dims();
  std::size_t r_end = d[0];
  if (max_range) {
    r_end = 0;
    while (r_end < d[0] && gt.spec().range_edges[r_end + 1] <= *max_range) ++r_end;
  }
  ConfusionCounts c;
  const std::size_t end = r_end * d[1] * d[2];
  for (std::size_t i = 0; i < end; ++i) {
    const bool p = pred.at(i);
    const bool g = gt.at(i);
    if (g) (p ? c.tp : c.fn)++;
    else (p ? c.fp : c.tn)++;
  }
  return c;
}

enum class ChamferMode { Sum, Mean };

namespace detail {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using RPoint = bg::model::point<double, 3, bg::cs::cartesian>;

/// Sum of squared distances from each point of `from` to its exact nearest
/// neighbour in `to` (R-tree, k = 1).
inline double nearest_sq_sum(const PointCloud& from, const PointCloud& to) {
  std::vector<std::pair<RPoint, std::size_t>> items;
  items.reserve(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) items.emplace_back(RPoint(to[i].x(), to[i].y(), to[i].z()), i);
  bgi::rtree<std::pair<RPoint, std::size_t>, bgi::rstar<16>> tree(items.begin(), items.end());
  double sum = 0.0;
  std::vector<std::pair<RPoint, std::size_t>> hit;
  for (const auto& p : from) {
    hit.clear();
    tree.query(bgi::nearest(RPoint(p.x(), p.y(), p.z()), 1), std::back_inserter(hit));
    sum += (p - to[hit.front().second]).squaredNorm();
  }
  return sum;
}

}  // namespace detail

/// Sum mode: sum_x min_y |x - y|^2 + sum_y min_x |x - y|^2.
/// Mean mode averages each of the two sums over its own set.
inline double chamfer(const PointCloud& s1, const PointCloud& s2, ChamferMode mode = ChamferMode::Mean) {
  require(!s1.empty() && !s2.empty(), "chamfer distance is undefined for an empty point cloud");
  double a = detail::nearest_sq_sum(s1, s2);
  double b = detail::nearest_sq_sum(s2, s1);
  if (mode == ChamferMode::Mean) {
    a /= static_cast<double>(s1.size());
    b /= static_cast<double>(s2.size());
  }
  return a + b;
}

struct FrameEval {
  std::string frame;
  ConfusionCounts counts;
  double chamfer = std::numeric_limits<double>::quiet_NaN();  // NaN when either cloud is empty
  std::size_t pred_points = 0;
  std::size_t gt_points = 0;
};

/// Pooled pd/pfa over all frames; Chamfer is the mean over frames where it is defined.
struct EvalReport {
  std::vector<FrameEval> frames;

  ConfusionCounts counts() const {
    ConfusionCounts c;
    for (const auto& f : frames) c += f.counts;
    return c;
  }
  double pd() const { return counts().pd(); }
  double pfa() const { return counts().pfa(); }
  std::size_t chamfer_frames() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += std::isfinite(f.chamfer) ? 1 : 0;
    return n;
  }
  double chamfer() const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& f : frames)
      if (std::isfinite(f.chamfer)) {
        s += f.chamfer;
        ++n;
      }
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
  }
};

inline FrameEval evaluate_frame(std::string name, const OccupancyGrid& pred, const OccupancyGrid& gt,
                                const PointCloud& pred_points, const PointCloud& gt_points, ChamferMode mode,
                                std::optional<double> max_range = std::nullopt) {
  FrameEval f;
  f.frame = std::move(name);
  f.counts = pd_pfa(pred, gt, max_range);
  f.pred_points = pred_points.size();
  f.gt_points = gt_points.size();
  if (!pred_points.empty() && !gt_points.empty()) f.chamfer = chamfer(pred_points, gt_points, mode);
  return f;
}

inline const char* kEvalCsvHeader = "frame,tp,fn,fp,tn,pd,pfa,chamfer,pred_points,gt_points";

inline std::string eval_csv(const EvalReport& report) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << kEvalCsvHeader << '\n';
  auto row = [&](const std::string& name, const ConfusionCounts& c, double ch, std::size_t np, std::size_t ng) {
    os << name << ',' << c.tp << ',' << c.fn << ',' << c.fp << ',' << c.tn << ',' << c.pd() << ',' << c.pfa() << ','
       << ch << ',' << np << ',' << ng << '\n';
  };
  std::size_t np = 0, ng = 0;
  for (const auto& f : report.frames) {
    row(f.frame, f.counts, f.chamfer, f.pred_points, f.gt_points);
    np += f.pred_points;
    ng += f.gt_points;
  }
  row("all", report.counts(), report.chamfer(), np, ng);
  return os.str();
}

}  // namespace rdb
