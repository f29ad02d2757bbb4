#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rdb/common.hpp"

namespace rdb {

/// Bin centres of the four radar-cube axes.
struct RadarAxes {
  std::vector<double> range;          // m
  std::vector<double> sin_azimuth;    // direction cosine along x
  std::vector<double> velocity;       // m/s, positive = receding
  std::vector<double> sin_elevation;  // direction cosine along z, RoI-cropped

  bool operator==(const RadarAxes&) const = default;
};

/// Centres of an n-point spatial DFT sampled half a bin off zero:
/// s_k = (2k + 1)/n - 1. The grid is symmetric about 0 and its cell edges
/// are k * 2/n - 1, i.e. exactly [-1, 1].
inline std::vector<double> half_bin_sine_axis(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k)
    s[k] = (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n) - 1.0;
  return s;
}

/// Indices of half-bin elevation bins with |sin(el)| <= sin(roi).
inline std::vector<std::size_t> elevation_roi(std::size_t e_fft, double roi_deg) {
  const double lim = std::sin(deg2rad(roi_deg));
  const auto axis = half_bin_sine_axis(e_fft);
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < e_fft; ++k)
    if (std::abs(axis[k]) <= lim) keep.push_back(k);
  return keep;
}

/// Centred (FFT-shifted) axis: bin n/2 is zero.
inline std::vector<double> centred_axis(std::size_t n, double step) {
  std::vector<double> v(n);
  const auto mid = static_cast<double>(n / 2);
  for (std::size_t k = 0; k < n; ++k) v[k] = (static_cast<double>(k) - mid) * step;
  return v;
}

}  // namespace rdb
