#pragma once

#include <cmath>
#include <vector>

#include "rdb/common.hpp"

namespace rdb {

/// Cartesian points in the sensor frame: x right, y boresight, z up (metres).
using PointCloud = std::vector<Vec3>;

/// Sensor-centred angular coordinates in sine space: sin_az = x/r, sin_el = z/r.
/// These are the direction cosines an x/z-oriented array measures directly.
struct SinePoint {
  double range = 0.0;
  double sin_az = 0.0;
  double sin_el = 0.0;
};

inline SinePoint to_sine_space(const Vec3& p) {
  const double r = p.norm();
  if (r <= 0.0) return {};
  return {r, p.x() / r, p.z() / r};
}

/// Inverse of to_sine_space for points in front of the sensor (y >= 0).
inline Vec3 from_sine_space(double range, double sin_az, double sin_el) {
  const double cos2 = std::max(0.0, 1.0 - sin_az * sin_az - sin_el * sin_el);
  return {range * sin_az, range * std::sqrt(cos2), range * sin_el};
}

/// Radar/lidar field of view. Angles are half-widths in degrees.
struct Fov {
  double azimuth_deg = 70.0;
  double elevation_deg = 20.0;
  double max_range = 50.0;

  bool contains(const Vec3& p) const {
    if (!p.allFinite() || p.y() < 0.0) return false;
    const auto s = to_sine_space(p);
    if (!(s.range > 0.0) || s.range > max_range) return false;
    return std::abs(s.sin_az) <= std::sin(deg2rad(azimuth_deg)) &&
           std::abs(s.sin_el) <= std::sin(deg2rad(elevation_deg));
  }
};

/// Keeps exactly the points inside `fov`.
inline PointCloud crop_fov(const PointCloud& cloud, const Fov& fov = {}) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud)
    if (fov.contains(p)) out.push_back(p);
  return out;
}

}  // namespace rdb
