#pragma once

// Spherical (range, sin-azimuth, sin-elevation) voxel grids shared by radar
// detections and lidar ground truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rdb/axes.hpp"
#include "rdb/common.hpp"
#include "rdb/detection.hpp"
#include "rdb/pointcloud.hpp"

namespace rdb {

struct GridSpec {
  std::vector<double> range_edges;
  std::vector<double> sin_azimuth_edges;
  std::vector<double> sin_elevation_edges;

  std::array<std::size_t, 3> dims() const {
    return {range_edges.size() - 1, sin_azimuth_edges.size() - 1, sin_elevation_edges.size() - 1};
  }
  std::size_t size() const {
    const auto d = dims();
    return d[0] * d[1] * d[2];
  }

  void validate() const {
    for (const auto* e : {&range_edges, &sin_azimuth_edges, &sin_elevation_edges}) {
      require(e->size() >= 2, "grid axis needs at least one cell");
      for (std::size_t i = 1; i < e->size(); ++i) require((*e)[i] > (*e)[i - 1], "grid edges must be strictly increasing");
    }
    require(sin_azimuth_edges.front() >= -1.0 && sin_azimuth_edges.back() <= 1.0, "sin-azimuth edges outside [-1, 1]");
    require(sin_elevation_edges.front() >= -1.0 && sin_elevation_edges.back() <= 1.0,
            "sin-elevation edges outside [-1, 1]");
  }

  static std::vector<double> centres(const std::vector<double>& edges) {
    std::vector<double> c(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) c[i] = 0.5 * (edges[i] + edges[i + 1]);
    return c;
  }

  /// Uniform edges: range over [0, max_range], angles uniform in sine over the FoV.
  static GridSpec uniform(std::size_t R, std::size_t A, std::size_t E, const Fov& fov = {}) {
    require(R > 0 && A > 0 && E > 0, "grid dims must be positive");
    auto lin = [](double lo, double hi, std::size_t n) {
      std::vector<double> e(n + 1);
      for (std::size_t i = 0; i <= n; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
      return e;
    };
    const double sa = std::sin(deg2rad(fov.azimuth_deg));
    const double se = std::sin(deg2rad(fov.elevation_deg));
    GridSpec g{lin(0.0, fov.max_range, R), lin(-sa, sa, A), lin(-se, se, E)};
    // Symmetric by construction, not by rounding.
    for (auto* e : {&g.sin_azimuth_edges, &g.sin_elevation_edges})
      for (std::size_t i = 0; i < e->size() / 2; ++i) (*e)[e->size() - 1 - i] = -(*e)[i];
    if (g.sin_azimuth_edges.size() % 2 == 1) g.sin_azimuth_edges[A / 2] = 0.0;
    if (g.sin_elevation_edges.size() % 2 == 1) g.sin_elevation_edges[E / 2] = 0.0;
    return g;
  }

  /// Cells centred on the radar cube's range, sin-azimuth and cropped
  /// sin-elevation bins, so cube index (r, a, e) is grid cell (r, a, e).
  static GridSpec from_radar_axes(const RadarAxes& axes) {
    auto edges = [](const std::vector<double>& c) {
      require(c.size() >= 2, "axis needs at least two bins");
      std::vector<double> e(c.size() + 1);
      for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
      e.front() = c.front() - (e[1] - c.front());
      e.back() = c.back() + (c.back() - e[c.size() - 1]);
      return e;
    };
    GridSpec g{edges(axes.range), edges(axes.sin_azimuth), edges(axes.sin_elevation)};
    g.sin_azimuth_edges.front() = std::max(-1.0, g.sin_azimuth_edges.front());
    g.sin_azimuth_edges.back() = std::min(1.0, g.sin_azimuth_edges.back());
    return g;
  }

  bool operator==(const GridSpec&) const = default;
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    bits_.assign(spec_.size(), 0);
  }

  const GridSpec& spec() const { return spec_; }
  std::array<std::size_t, 3> dims() const { return spec_.dims(); }
  std::size_t index(std::size_t r, std::size_t a, std::size_t e) const {
    const auto d = dims();
    return (r * d[1] + a) * d[2] + e;
  }
  bool get(std::size_t r, std::size_t a, std::size_t e) const { return bits_[index(r, a, e)] != 0; }
  void set(std::size_t r, std::size_t a, std::size_t e, bool v = true) { bits_[index(r, a, e)] = v ? 1 : 0; }
  bool at(std::size_t flat) const { return bits_[flat] != 0; }
  void set_flat(std::size_t flat, bool v = true) { bits_[flat] = v ? 1 : 0; }
  std::size_t size() const { return bits_.size(); }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1})); }

  bool operator==(const OccupancyGrid&) const = default;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

/// Half-open [e_i, e_i+1) bins; the last cell also takes its upper edge.
inline std::optional<std::size_t> bin_of(const std::vector<double>& edges, double v) {
  if (!(v >= edges.front() && v <= edges.back())) return std::nullopt;
  if (v == edges.back()) return edges.size() - 2;
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1);
}

}  // namespace detail

/// Cell containing `p`, if it is inside both the grid and `fov`.
inline std::optional<std::array<std::size_t, 3>> voxel_of(const Vec3& p, const GridSpec& spec, const Fov& fov = {}) {
  if (!fov.contains(p)) return std::nullopt;
  const auto s = to_sine_space(p);
  const auto r = detail::bin_of(spec.range_edges, s.range);
  const auto a = detail::bin_of(spec.sin_azimuth_edges, s.sin_az);
  const auto e = detail::bin_of(spec.sin_elevation_edges, s.sin_el);
  if (!r || !a || !e) return std::nullopt;
  return std::array<std::size_t, 3>{*r, *a, *e};
}

/// Sets every voxel holding at least one point. Points outside the grid or
/// the FoV are ignored, and so are voxels whose centre lies outside the FoV,
/// so only cells that grid_to_points maps back into the FoV are ever set.
inline OccupancyGrid voxelize(const PointCloud& cloud, const GridSpec& spec, const Fov& fov = {}) {
  OccupancyGrid grid(spec);
  const auto rc = GridSpec::centres(spec.range_edges);
  const auto ac = GridSpec::centres(spec.sin_azimuth_edges);
  const auto ec = GridSpec::centres(spec.sin_elevation_edges);
  for (const auto& p : cloud) {
    const auto v = voxel_of(p, spec, fov);
    if (!v || grid.get((*v)[0], (*v)[1], (*v)[2])) continue;
    if (fov.contains(from_sine_space(rc[(*v)[0]], ac[(*v)[1]], ec[(*v)[2]]))) grid.set((*v)[0], (*v)[1], (*v)[2]);
  }
  return grid;
}

/// One Cartesian point per set voxel at its (range, sin-az, sin-el) centre.
inline PointCloud grid_to_points(const OccupancyGrid& grid) {
  const auto& spec = grid.spec();
  const auto rc = GridSpec::centres(spec.range_edges);
  const auto ac = GridSpec::centres(spec.sin_azimuth_edges);
  const auto ec = GridSpec::centres(spec.sin_elevation_edges);
  PointCloud out;
  for (std::size_t r = 0; r < rc.size(); ++r)
    for (std::size_t a = 0; a < ac.size(); ++a)
      for (std::size_t e = 0; e < ec.size(); ++e)
        if (grid.get(r, a, e)) out.push_back(from_sine_space(rc[r], ac[a], ec[e]));
  return out;
}

/// Marks (range, azimuth, elevation) of each detection, collapsing Doppler.
/// With `fov` set, detections whose voxel centre lies outside it are dropped.
inline OccupancyGrid detections_to_grid(const DetectionList& dets, const GridSpec& spec,
                                        const std::optional<Fov>& fov = Fov{}) {
  OccupancyGrid grid(spec);
  const auto d = spec.dims();
  const auto rc = GridSpec::centres(spec.range_edges);
  const auto ac = GridSpec::centres(spec.sin_azimuth_edges);
  const auto ec = GridSpec::centres(spec.sin_elevation_edges);
  for (const auto& det : dets) {
    require(det.range_bin < d[0] && det.azimuth_bin < d[1] && det.elevation_bin < d[2],
            "detection bin outside grid dims");
    if (fov && !fov->contains(from_sine_space(rc[det.range_bin], ac[det.azimuth_bin], ec[det.elevation_bin])))
      continue;
    grid.set(det.range_bin, det.azimuth_bin, det.elevation_bin);
  }
  return grid;
}

struct GroundRemovalParams {
  std::size_t iterations = 200;
  double inlier_threshold = 0.15;  // m
  double max_tilt_deg = 10.0;
  double min_inlier_fraction = 0.10;
  std::uint64_t seed = 0;
};

struct GroundRemovalResult {
  PointCloud cloud;           // points not on the ground plane
  bool plane_found = false;   // false: cloud returned unchanged
  Eigen::Vector4d plane = Eigen::Vector4d::Zero();  // unit normal n, offset d: n.p + d = 0
  std::size_t removed = 0;
};

namespace detail {

/// Least-squares plane through points (smallest singular vector of the centred set).
inline Eigen::Vector4d fit_plane(const PointCloud& pts, const std::vector<std::size_t>& idx) {
  Vec3 mean = Vec3::Zero();
  for (auto i : idx) mean += pts[i];
  mean /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : idx) {
    const Vec3 q = pts[i] - mean;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Vec3 n = es.eigenvectors().col(0);
  if (n.z() < 0) n = -n;
  Eigen::Vector4d plane;
  plane << n, -n.dot(mean);
  return plane;
}

}  // namespace detail

/// Removes the dominant near-horizontal plane found by random consensus and a
/// least-squares refit on its inliers.
inline GroundRemovalResult remove_ground(const PointCloud& cloud, const GroundRemovalParams& params = {}) {
  require(!cloud.empty(), "remove_ground needs a nonempty cloud");
  require(params.iterations > 0 && params.inlier_threshold > 0.0, "invalid ground-removal parameters");
  const double min_nz = std::cos(deg2rad(params.max_tilt_deg));
  const std::size_t n = cloud.size();
  GroundRemovalResult res;
  res.cloud = cloud;
  if (n < 3) return res;

  auto inliers_of = [&](const Eigen::Vector4d& pl) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(pl.head<3>().dot(cloud[i]) + pl[3]) <= params.inlier_threshold) idx.push_back(i);
    return idx;
  };

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> best;
  Eigen::Vector4d best_plane = Eigen::Vector4d::Zero();
  for (std::size_t it = 0; it < params.iterations; ++it) {
    const Vec3& a = cloud[pick(rng)];
    const Vec3& b = cloud[pick(rng)];
    const Vec3& c = cloud[pick(rng)];
    Vec3 nrm = (b - a).cross(c - a);
    const double len = nrm.norm();
    if (len < 1e-9) continue;
    nrm /= len;
    if (std::abs(nrm.z()) < min_nz) continue;
    Eigen::Vector4d pl;
    pl << nrm, -nrm.dot(a);
    auto idx = inliers_of(pl);
    if (idx.size() > best.size()) {
      best = std::move(idx);
      best_plane = pl;
    }
  }
  if (best.size() < 3 || static_cast<double>(best.size()) < params.min_inlier_fraction * static_cast<double>(n))
    return res;

  Eigen::Vector4d plane = detail::fit_plane(cloud, best);
  auto refined = inliers_of(plane);
  if (std::abs(plane[2]) >= min_nz && refined.size() >= best.size())
    best = std::move(refined);
  else
    plane = best_plane;
  std::vector<std::uint8_t> ground(n, 0);
  for (auto i : best) ground[i] = 1;
  res.cloud.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (!ground[i]) res.cloud.push_back(cloud[i]);
  res.plane_found = true;
  res.plane = plane;
  res.removed = best.size();
  return res;
}

}  // namespace rdb
