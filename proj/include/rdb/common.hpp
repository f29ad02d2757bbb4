#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rdb {

using cdouble = std::complex<double>;
using cfloat = std::complex<float>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 3e8;
inline constexpr double kPi = std::numbers::pi;

/// Raised when an input violates an operation's preconditions.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Dense row-major 3D array. Index order is (i, j, k) with k fastest.
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  Volume(std::size_t n0, std::size_t n1, std::size_t n2, T fill = T{})
      : dims_{n0, n1, n2}, data_(n0 * n1 * n2, fill) {}

  const std::array<std::size_t, 3>& dims() const { return dims_; }
  std::size_t dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dims_[1] + j) * dims_[2] + k;
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[offset(i, j, k)]; }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[offset(i, j, k)];
  }

  /// Contiguous innermost line at (i, j).
  std::span<T> line(std::size_t i, std::size_t j) { return {data_.data() + offset(i, j, 0), dims_[2]}; }
  std::span<const T> line(std::size_t i, std::size_t j) const {
    return {data_.data() + offset(i, j, 0), dims_[2]};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Volume&) const = default;

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<T> data_;
};

/// Symmetric Hamming window, w[n] = 0.54 - 0.46 cos(2 pi n / (N - 1)).
inline std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
  return w;
}

inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace rdb
