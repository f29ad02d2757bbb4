#pragma once

// CA-, OS- and CAOS-CFAR in one and two dimensions, the relative-height peak
// detector, and the 2D + 1D cascades run on a RadarCube.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "rdb/common.hpp"
#include "rdb/detection.hpp"
#include "rdb/radar_dsp.hpp"

namespace rdb {

using PowerPlane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskPlane = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class CfarKind { CA, OS, CAOS };

inline std::string to_string(CfarKind k) {
  switch (k) {
    case CfarKind::CA: return "CA";
    case CfarKind::OS: return "OS";
    case CfarKind::CAOS: return "CAOS";
  }
  return "?";
}

/// Window sizes are cells per side. Index 0 is the range axis (rows) of a 2D
/// plane and the only axis of a 1D profile; index 1 is the other plane axis.
struct CfarConfig {
  CfarKind kind = CfarKind::CA;
  std::array<std::size_t, 2> training{8, 8};
  std::array<std::size_t, 2> guard{0, 0};
  std::optional<double> pfa = 1e-3;      // design false-alarm probability
  std::optional<double> threshold_scale;  // direct multiplier, replaces pfa
  double os_rank_fraction = 0.75;

  /// Same window with a direct threshold multiplier instead of a design Pfa.
  CfarConfig with_scale(double scale) const {
    CfarConfig c = *this;
    c.pfa.reset();
    c.threshold_scale = scale;
    return c;
  }

  void validate(int dims) const {
    require(pfa.has_value() != threshold_scale.has_value(), "CFAR needs exactly one of pfa and threshold_scale");
    if (pfa) require(*pfa > 0.0 && *pfa < 1.0, "CFAR pfa must be in (0, 1)");
    if (threshold_scale) require(*threshold_scale > 0.0, "CFAR threshold_scale must be > 0");
    require(os_rank_fraction > 0.0 && os_rank_fraction <= 1.0, "os_rank_fraction must be in (0, 1]");
    for (int d = 0; d < dims; ++d) require(training[static_cast<std::size_t>(d)] >= 1, "CFAR needs >= 1 training cell per side");
  }
};

namespace cfar {

/// 1-based rank of the order statistic used for `n` training values.
inline std::size_t os_rank(std::size_t n, double fraction) {
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

/// CA threshold factor for n exponential training cells.
inline double ca_scale(std::size_t n, double pfa) {
  return static_cast<double>(n) * (std::pow(pfa, -1.0 / static_cast<double>(n)) - 1.0);
}

/// log Pfa of OS-CFAR with n exponential training cells, rank k, factor t.
inline double os_log_pfa(std::size_t n, std::size_t k, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double m = static_cast<double>(n - i);
    s += std::log(m / (m + t));
  }
  return s;
}

namespace detail {

template <typename F>
double solve_decreasing(F log_pfa_of, double pfa) {
  const double target = std::log(pfa);
  double hi = 1.0;
  while (log_pfa_of(hi) > target) {
    hi *= 2.0;
    require(hi < 1e12, "CFAR threshold solve diverged");
  }
  double lo = hi / 2.0;
  if (log_pfa_of(lo) < target) lo = 0.0;
  boost::math::tools::eps_tolerance<double> tol(48);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve([&](double t) { return log_pfa_of(t) - target; }, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

/// Threshold solves are repeated for every window shape of every plane, so
/// results are kept for the process.
template <typename F>
double memoised(int family, std::size_t m, std::size_t k, double cells, double pfa, F solve) {
  using Key = std::tuple<int, std::size_t, std::size_t, double, double>;
  static std::mutex mutex;
  static std::map<Key, double> memo;
  const Key key{family, m, k, cells, pfa};
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const double t = solve();
  std::lock_guard lock(mutex);
  memo.emplace(key, t);
  return t;
}

}  // namespace detail

/// OS threshold factor: solves prod_{i<k} (n - i)/(n - i + T) = pfa for T.
inline double os_scale(std::size_t n, std::size_t k, double pfa) {
  require(k >= 1 && k <= n, "OS rank out of range");
  return detail::memoised(0, n, k, 0.0, pfa, [&] {
    return detail::solve_decreasing([&](double t) { return os_log_pfa(n, k, t); }, pfa);
  });
}

/// Pfa of CAOS-CFAR: the statistic is the k-th smallest of m aggregates, each
/// the mean of `cells` exponential values (Gamma(cells, 1/cells)).
inline double caos_pfa(std::size_t m, std::size_t k, double cells, double t) {
  const double a = static_cast<double>(k);
  const double b = static_cast<double>(m - k + 1);
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double y = boost::math::gamma_p_inv(cells, u) / cells;
    return std::exp(-t * y) * boost::math::ibeta_derivative(a, b, u);
  };
  return integrator.integrate(f, 0.0, 1.0);
}

inline double caos_scale(std::size_t m, std::size_t k, double cells, double pfa) {
  require(k >= 1 && k <= m && cells > 0.0, "CAOS parameters out of range");
  return detail::memoised(1, m, k, cells, pfa, [&] {
    return detail::solve_decreasing([&](double t) { return std::log(caos_pfa(m, k, cells, t)); }, pfa);
  });
}

namespace detail {

struct Window {
  std::size_t t0, t1, g0, g1;
  std::size_t w0() const { return t0 + g0; }
  std::size_t w1() const { return t1 + g1; }
};

inline std::size_t lo(std::size_t i, std::size_t w) { return i >= w ? i - w : 0; }
inline std::size_t hi(std::size_t i, std::size_t w, std::size_t n) { return std::min(n - 1, i + w); }

/// Threshold factors cached per training-set shape.
class ScaleCache {
 public:
  explicit ScaleCache(const CfarConfig& cfg) : cfg_(cfg) {}

  double ca(std::size_t n) {
    if (cfg_.threshold_scale) return *cfg_.threshold_scale;
    auto [it, fresh] = cache_.try_emplace({n, 0}, 0.0);
    if (fresh) it->second = ca_scale(n, *cfg_.pfa);
    return it->second;
  }
  double os(std::size_t n) {
    if (cfg_.threshold_scale) return *cfg_.threshold_scale;
    auto [it, fresh] = cache_.try_emplace({n, 0}, 0.0);
    if (fresh) it->second = os_scale(n, os_rank(n, cfg_.os_rank_fraction), *cfg_.pfa);
    return it->second;
  }
  double caos(std::size_t m, std::size_t cells) {
    if (cfg_.threshold_scale) return *cfg_.threshold_scale;
    auto [it, fresh] = cache_.try_emplace({m, cells}, 0.0);
    if (fresh)
      it->second = caos_scale(m, os_rank(m, cfg_.os_rank_fraction),
                              static_cast<double>(cells) / static_cast<double>(m), *cfg_.pfa);
    return it->second;
  }

 private:
  CfarConfig cfg_;
  std::map<std::pair<std::size_t, std::size_t>, double> cache_;
};

/// Fenwick tree over value ranks: insert/erase and k-th smallest in O(log n).
class RankCounter {
 public:
  explicit RankCounter(std::size_t n) : tree_(n + 1, 0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }
  void add(std::size_t rank, int delta) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  /// 0-based rank of the k-th (1-based) smallest element present.
  std::size_t kth(std::size_t k) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && static_cast<std::size_t>(tree_[next]) < k) {
        pos = next;
        k -= static_cast<std::size_t>(tree_[next]);
      }
    }
    return pos;
  }

 private:
  std::vector<int> tree_;
  std::size_t top_ = 1;
};

inline MaskPlane ca_plane(const PowerPlane& x, const Window& w, ScaleCache& scales) {
  const auto R = static_cast<std::size_t>(x.rows());
  const auto C = static_cast<std::size_t>(x.cols());
  std::vector<double> sat((R + 1) * (C + 1), 0.0);
  for (std::size_t i = 0; i < R; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      row += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      sat[(i + 1) * (C + 1) + j + 1] = sat[i * (C + 1) + j + 1] + row;
    }
  }
  auto rect = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
    return sat[(r1 + 1) * (C + 1) + c1 + 1] - sat[r0 * (C + 1) + c1 + 1] - sat[(r1 + 1) * (C + 1) + c0] +
           sat[r0 * (C + 1) + c0];
  };
  MaskPlane mask = MaskPlane::Constant(x.rows(), x.cols(), false);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      const std::size_t r0 = lo(i, w.w0()), r1 = hi(i, w.w0(), R), c0 = lo(j, w.w1()), c1 = hi(j, w.w1(), C);
      const std::size_t q0 = lo(i, w.g0), q1 = hi(i, w.g0, R), p0 = lo(j, w.g1), p1 = hi(j, w.g1, C);
      const double sum = rect(r0, r1, c0, c1) - rect(q0, q1, p0, p1);
      const std::size_t n = (r1 - r0 + 1) * (c1 - c0 + 1) - (q1 - q0 + 1) * (p1 - p0 + 1);
      const double thr = scales.ca(n) * (sum / static_cast<double>(n));
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > thr;
    }
  return mask;
}

inline MaskPlane os_plane(const PowerPlane& x, const Window& w, double fraction, ScaleCache& scales) {
  const auto R = static_cast<std::size_t>(x.rows());
  const auto C = static_cast<std::size_t>(x.cols());
  const double* v = x.data();
  std::vector<std::size_t> order(R * C);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b] || (v[a] == v[b] && a < b); });
  std::vector<std::size_t> rank(R * C);
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  auto member = [&](std::size_t ii, std::size_t jj, std::size_t i, std::size_t j) {
    const std::size_t di = ii > i ? ii - i : i - ii;
    const std::size_t dj = jj > j ? jj - j : j - jj;
    return di <= w.w0() && dj <= w.w1() && !(di <= w.g0 && dj <= w.g1);
  };

  MaskPlane mask = MaskPlane::Constant(x.rows(), x.cols(), false);
  for (std::size_t i = 0; i < R; ++i) {
    RankCounter counter(R * C);
    const std::size_t r0 = lo(i, w.w0()), r1 = hi(i, w.w0(), R);
    std::size_t n = 0;
    for (std::size_t ii = r0; ii <= r1; ++ii)
      for (std::size_t jj = 0; jj <= std::min(C - 1, w.w1()); ++jj)
        if (member(ii, jj, i, 0)) {
          counter.add(rank[ii * C + jj], 1);
          ++n;
        }
    for (std::size_t j = 0;; ++j) {
      const std::size_t k = os_rank(n, fraction);
      const double thr = scales.os(n) * v[order[counter.kth(k)]];
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i * C + j] > thr;
      if (j + 1 == C) break;
      // Membership only changes in the columns crossing a window or guard edge.
      const long long cand[4] = {static_cast<long long>(j) - static_cast<long long>(w.w1()),
                                 static_cast<long long>(j) - static_cast<long long>(w.g1),
                                 static_cast<long long>(j + 1 + w.g1), static_cast<long long>(j + 1 + w.w1())};
      for (int c = 0; c < 4; ++c) {
        if (cand[c] < 0 || cand[c] >= static_cast<long long>(C)) continue;
        bool dup = false;
        for (int e = 0; e < c; ++e) dup = dup || cand[e] == cand[c];
        if (dup) continue;
        const auto jj = static_cast<std::size_t>(cand[c]);
        for (std::size_t ii = r0; ii <= r1; ++ii) {
          const bool was = member(ii, jj, i, j);
          const bool now = member(ii, jj, i, j + 1);
          if (was == now) continue;
          counter.add(rank[ii * C + jj], now ? 1 : -1);
          n = now ? n + 1 : n - 1;
        }
      }
    }
  }
  return mask;
}

inline MaskPlane caos_plane(const PowerPlane& x, const Window& w, double fraction, ScaleCache& scales) {
  const auto R = static_cast<std::size_t>(x.rows());
  const auto C = static_cast<std::size_t>(x.cols());
  std::vector<double> pre(R * (C + 1), 0.0);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j)
      pre[i * (C + 1) + j + 1] = pre[i * (C + 1) + j] + x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  auto seg = [&](std::size_t i, std::size_t c0, std::size_t c1) { return pre[i * (C + 1) + c1 + 1] - pre[i * (C + 1) + c0]; };

  MaskPlane mask = MaskPlane::Constant(x.rows(), x.cols(), false);
  std::vector<double> agg;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      agg.clear();
      std::size_t cells = 0;
      const std::size_t c0 = lo(j, w.w1()), c1 = hi(j, w.w1(), C), p0 = lo(j, w.g1), p1 = hi(j, w.g1, C);
      for (std::size_t ii = lo(i, w.w0()); ii <= hi(i, w.w0(), R); ++ii) {
        double sum = seg(ii, c0, c1);
        std::size_t n = c1 - c0 + 1;
        if ((ii > i ? ii - i : i - ii) <= w.g0) {
          sum -= seg(ii, p0, p1);
          n -= p1 - p0 + 1;
        }
        if (n == 0) continue;
        agg.push_back(sum / static_cast<double>(n));
        cells += n;
      }
      const std::size_t k = os_rank(agg.size(), fraction);
      std::nth_element(agg.begin(), agg.begin() + static_cast<std::ptrdiff_t>(k - 1), agg.end());
      const double thr = scales.caos(agg.size(), cells) * agg[k - 1];
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > thr;
    }
  return mask;
}

}  // namespace detail
}  // namespace cfar

/// 2D CFAR on linear power; rows are the range axis. Edge cells use the part
/// of the window that lies inside the plane. CAOS averages each training row
/// along the column axis, then takes the order statistic across rows.
inline MaskPlane cfar_2d(const PowerPlane& x, const CfarConfig& cfg) {
  cfg.validate(2);
  const cfar::detail::Window w{cfg.training[0], cfg.training[1], cfg.guard[0], cfg.guard[1]};
  require(static_cast<std::size_t>(x.rows()) > 2 * w.w0() && static_cast<std::size_t>(x.cols()) > 2 * w.w1(),
          "matrix smaller than the CFAR window");
  cfar::detail::ScaleCache scales(cfg);
  switch (cfg.kind) {
    case CfarKind::CA: return cfar::detail::ca_plane(x, w, scales);
    case CfarKind::OS: return cfar::detail::os_plane(x, w, cfg.os_rank_fraction, scales);
    case CfarKind::CAOS: return cfar::detail::caos_plane(x, w, cfg.os_rank_fraction, scales);
  }
  return {};
}

/// 1D CA/OS-CFAR on a linear power profile (training[0], guard[0] per side).
inline std::vector<bool> cfar_1d(std::span<const double> profile, const CfarConfig& cfg) {
  cfg.validate(1);
  require(cfg.kind != CfarKind::CAOS, "CAOS-CFAR is two-dimensional");
  const cfar::detail::Window w{0, cfg.training[0], 0, cfg.guard[0]};
  require(profile.size() > 2 * w.w1(), "profile shorter than the CFAR window");
  const PowerPlane x = Eigen::Map<const PowerPlane>(profile.data(), 1, static_cast<Eigen::Index>(profile.size()));
  cfar::detail::ScaleCache scales(cfg);
  const MaskPlane m = cfg.kind == CfarKind::CA ? cfar::detail::ca_plane(x, w, scales)
                                               : cfar::detail::os_plane(x, w, cfg.os_rank_fraction, scales);
  return std::vector<bool>(m.data(), m.data() + m.size());
}

/// Strict two-sided local maxima no more than `min_height_db` below the global maximum.
inline std::vector<bool> peak_detect_1d(std::span<const double> profile_db, double min_height_db = 10.0) {
  require(!profile_db.empty(), "peak detector needs a nonempty profile");
  const double floor = *std::max_element(profile_db.begin(), profile_db.end()) - min_height_db;
  std::vector<bool> mask(profile_db.size(), false);
  for (std::size_t i = 1; i + 1 < profile_db.size(); ++i)
    mask[i] = profile_db[i] > profile_db[i - 1] && profile_db[i] > profile_db[i + 1] && profile_db[i] >= floor;
  return mask;
}

enum class CfarPlane { RA, RD };
enum class Aggregation { Max, Sum };

/// Stage 1 runs on the range-azimuth or range-Doppler plane, stage 2 along the
/// remaining axis of each stage-1 hit (CFAR, or the peak detector when unset).
struct CascadeConfig {
  std::string name;
  CfarPlane plane = CfarPlane::RA;
  CfarConfig stage1;
  std::optional<CfarConfig> stage2;
  double peak_height_db = 10.0;
  Aggregation aggregation = Aggregation::Max;
};

/// Default windows: CA/CAOS guard 10 range cells and 16 Doppler/azimuth cells,
/// OS without guard cells and rank 0.75 N.
inline CfarConfig default_stage1(CfarKind kind) {
  CfarConfig c;
  c.kind = kind;
  c.pfa = 1e-4;
  if (kind == CfarKind::OS) {
    c.training = {8, 8};
    c.guard = {0, 0};
  } else {
    c.training = {4, 8};
    c.guard = {10, 16};
  }
  return c;
}

inline CfarConfig default_stage2(CfarKind kind) {
  CfarConfig c;
  c.kind = kind;
  c.pfa = 1e-3;
  c.training = {8, 0};
  c.guard = {kind == CfarKind::OS ? 0u : 16u, 0};
  return c;
}

/// Parses names such as "2D OS(RA) + 1D OS(D)" or "2D CAOS(RD) + Peak Detector(A)"
/// into a cascade with default windows.
inline CascadeConfig parse_cascade(const std::string& name) {
  static const std::regex re(
      R"(^\s*2D\s+(CA|OS|CAOS)\s*\(\s*(RA|RD)\s*\)\s*\+\s*(?:1D\s+(CA|OS|CAOS)\s*\(\s*([A-Z])\s*\)|Peak\s+Detector\s*\(\s*([A-Z])\s*\))\s*$)");
  std::smatch m;
  if (!std::regex_match(name, m, re)) throw ContractError("unrecognised cascade name: '" + name + "'");
  auto kind_of = [](const std::string& s) {
    return s == "CA" ? CfarKind::CA : s == "OS" ? CfarKind::OS : CfarKind::CAOS;
  };
  CascadeConfig c;
  c.name = name;
  c.plane = m[2] == "RA" ? CfarPlane::RA : CfarPlane::RD;
  c.stage1 = default_stage1(kind_of(m[1]));
  const std::string axis = m[4].matched ? m[4].str() : m[5].str();
  const std::string expected = c.plane == CfarPlane::RA ? "D" : "A";
  if (axis != expected) throw ContractError("cascade '" + name + "': stage 2 must run along " + expected);
  if (m[3].matched) {
    const auto k2 = kind_of(m[3]);
    if (k2 == CfarKind::CAOS) throw ContractError("cascade '" + name + "': CAOS-CFAR is two-dimensional");
    c.stage2 = default_stage2(k2);
  }
  return c;
}

/// The five cascades of the reference comparison, in its order.
inline std::vector<std::string> reference_cascades() {
  return {"2D OS(RA) + 1D OS(D)", "2D OS(RD) + 1D OS(A)", "2D CAOS(RA) + 1D OS(D)", "2D CAOS(RA) + Peak Detector(D)",
          "2D CAOS(RD) + Peak Detector(A)"};
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Stage-1 plane: the cube collapsed over Doppler (RA) or azimuth (RD) in linear power.
inline PowerPlane aggregate_plane(const RadarCube& cube, CfarPlane plane, Aggregation agg) {
  const std::size_t R = cube.range_bins(), A = cube.azimuth_bins(), D = cube.doppler_bins();
  const std::size_t C = plane == CfarPlane::RA ? A : D;
  PowerPlane out = PowerPlane::Zero(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(C));
  std::vector<double> acc(C);
  for (std::size_t r = 0; r < R; ++r) {
    std::fill(acc.begin(), acc.end(), agg == Aggregation::Max ? -std::numeric_limits<double>::infinity() : 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      auto line = cube.power_db.line(r, a);
      for (std::size_t d = 0; d < D; ++d) {
        double& slot = plane == CfarPlane::RA ? acc[a] : acc[d];
        if (agg == Aggregation::Max)
          slot = std::max(slot, static_cast<double>(line[d]));  // dB; max commutes with the conversion
        else
          slot += db_to_linear(line[d]);
      }
    }
    for (std::size_t c = 0; c < C; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = agg == Aggregation::Max ? db_to_linear(acc[c]) : acc[c];
  }
  return out;
}

inline DetectionList cascade_detect(const RadarCube& cube, const CascadeConfig& cfg) {
  const std::size_t R = cube.range_bins(), A = cube.azimuth_bins(), D = cube.doppler_bins();
  require(R > 0 && A > 0 && D > 0, "empty radar cube");
  require(cube.elevation.dims() == cube.power_db.dims(), "radar cube channels disagree");
  const bool ra = cfg.plane == CfarPlane::RA;
  const MaskPlane hits = cfar_2d(aggregate_plane(cube, cfg.plane, cfg.aggregation), cfg.stage1);
  const std::size_t L = ra ? D : A;

  DetectionList out;
  std::vector<double> profile(L);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < static_cast<std::size_t>(hits.cols()); ++c) {
      if (!hits(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) continue;
      auto at = [&](std::size_t l) { return ra ? cube.power_db(r, c, l) : cube.power_db(r, l, c); };
      std::vector<bool> mask;
      if (cfg.stage2) {
        for (std::size_t l = 0; l < L; ++l) profile[l] = db_to_linear(at(l));
        mask = cfar_1d(profile, *cfg.stage2);
      } else {
        for (std::size_t l = 0; l < L; ++l) profile[l] = at(l);
        mask = peak_detect_1d(profile, cfg.peak_height_db);
      }
      for (std::size_t l = 0; l < L; ++l) {
        if (!mask[l]) continue;
        const std::size_t a = ra ? c : l;
        const std::size_t d = ra ? l : c;
        out.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(d),
                       cube.elevation(r, a, d), cube.power_db(r, a, d)});
      }
    }
  normalize(out);
  return out;
}

}  // namespace rdb
