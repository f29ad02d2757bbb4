#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "rdb/axes.hpp"
#include "rdb/common.hpp"
#include "rdb/pointcloud.hpp"

namespace rdb {

struct Detection {
  std::uint32_t range_bin = 0;
  std::uint32_t azimuth_bin = 0;
  std::uint32_t doppler_bin = 0;
  std::uint16_t elevation_bin = 0;
  float power_db = 0.0f;

  auto key() const { return std::tie(range_bin, azimuth_bin, doppler_bin); }
  bool operator==(const Detection&) const = default;
};

using DetectionList = std::vector<Detection>;

/// Sorts by (range, azimuth, Doppler) and drops repeated cells.
inline void normalize(DetectionList& dets) {
  std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.key() < b.key(); });
  dets.erase(std::unique(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.key() == b.key(); }),
             dets.end());
}

/// Cartesian position of each detection at its bin centres.
inline PointCloud detections_to_points(const DetectionList& dets, const RadarAxes& axes) {
  PointCloud out;
  out.reserve(dets.size());
  for (const auto& d : dets) {
    require(d.range_bin < axes.range.size() && d.azimuth_bin < axes.sin_azimuth.size() &&
                d.elevation_bin < axes.sin_elevation.size(),
            "detection bin outside axes");
    out.push_back(from_sine_space(axes.range[d.range_bin], axes.sin_azimuth[d.azimuth_bin],
                                  axes.sin_elevation[d.elevation_bin]));
  }
  return out;
}

}  // namespace rdb
