#pragma once

// Synthetic scenes rendered as FMCW MIMO/TDMA ADC frames and as lidar-style
// point clouds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rdb/common.hpp"
#include "rdb/pointcloud.hpp"

namespace rdb {

/// Chirp parameters. Defaults reproduce the 76 GHz cascade waveform
/// (35 MHz/us slope, 28 us chirps, 256 samples at 12 Msps, 128 chirps, 12 TX x 16 RX).
struct WaveformConfig {
  double start_frequency = 76e9;     // Hz
  double chirp_slope = 35e12;        // Hz/s
  double chirp_duration = 28e-6;     // s, also the TDMA interval between transmitters
  std::size_t n_adc_samples = 256;
  std::size_t n_chirps = 128;        // total chirps per frame, all transmitters
  double sampling_frequency = 12e6;  // complex samples/s
  std::size_t n_tx = 12;
  std::size_t n_rx = 16;

  double wavelength() const { return kSpeedOfLight / start_frequency; }
  double sampling_window() const { return static_cast<double>(n_adc_samples) / sampling_frequency; }
  double effective_bandwidth() const { return chirp_slope * sampling_window(); }
  double range_resolution() const { return kSpeedOfLight / (2.0 * effective_bandwidth()); }
  /// Chirps per transmitter that form one slow-time sequence.
  std::size_t loops() const { return n_chirps / n_tx; }
  /// Repetition interval of one transmitter under TDMA.
  double pri_tx() const { return static_cast<double>(n_tx) * chirp_duration; }
  /// Unambiguous velocity seen by each transmitter's slow-time sequence.
  double max_velocity_tdma() const { return kSpeedOfLight / (4.0 * start_frequency * pri_tx()); }
  /// Unambiguous velocity once the TDMA ambiguity is resolved (single-chirp PRI).
  double max_velocity_extended() const { return kSpeedOfLight / (4.0 * start_frequency * chirp_duration); }
  double range_per_bin(std::size_t r_fft) const {
    return kSpeedOfLight * sampling_frequency / (2.0 * chirp_slope * static_cast<double>(r_fft));
  }
  /// Migration phase accumulated per TDMA slot by a target at radial velocity v.
  double migration_phase(double v) const { return 4.0 * kPi / wavelength() * v * chirp_duration; }

  void validate() const {
    require(start_frequency > 0 && chirp_slope > 0 && chirp_duration > 0 && sampling_frequency > 0,
            "waveform quantities must be strictly positive");
    require(n_adc_samples > 0 && n_chirps > 0 && n_tx > 0 && n_rx > 0, "waveform counts must be positive");
    require(sampling_window() <= chirp_duration * (1.0 + 1e-12),
            "sampling window n_adc_samples/sampling_frequency exceeds chirp duration");
    require(loops() >= 1, "fewer chirps than transmitters");
  }

  static WaveformConfig single_tx() {
    WaveformConfig c;
    c.n_tx = 1;
    return c;
  }
};

/// Antenna position on the half-wavelength lattice.
struct AntennaPosition {
  int x = 0;
  int z = 0;
  bool operator==(const AntennaPosition&) const = default;
};

struct VirtualElement {
  int x = 0;
  int z = 0;
  std::size_t tx = 0;
  std::size_t rx = 0;
  std::size_t slot = 0;  // TDMA slot of the transmitter within one loop
};

/// MIMO layout. Virtual element index is tx * n_rx + rx.
struct ArrayGeometry {
  std::vector<AntennaPosition> tx;
  std::vector<AntennaPosition> rx;
  std::vector<std::size_t> tx_schedule;  // transmitter fired in each slot of a loop

  /// Synthetic 12x16 cascade layout: 86 contiguous azimuth positions and a
  /// {0, 1, 4, 6} minimum-redundancy elevation array.
  static ArrayGeometry cascade_default() {
    ArrayGeometry g;
    for (int i = 0; i < 16; ++i) g.rx.push_back({i, 0});
    for (int x : {0, 14, 28, 42, 56, 70}) g.tx.push_back({x, 0});
    g.tx.push_back({7, 1});
    g.tx.push_back({63, 1});
    g.tx.push_back({0, 4});
    g.tx.push_back({70, 4});
    g.tx.push_back({28, 6});
    g.tx.push_back({42, 6});
    g.tx_schedule = {0, 6, 1, 7, 2, 8, 3, 9, 4, 10, 11, 5};
    return g;
  }

  static ArrayGeometry single_tx(std::size_t n_rx = 16) {
    ArrayGeometry g;
    g.tx.push_back({0, 0});
    for (std::size_t i = 0; i < n_rx; ++i) g.rx.push_back({static_cast<int>(i), 0});
    g.tx_schedule = {0};
    return g;
  }

  void validate() const {
    require(!tx.empty(), "geometry has no transmitters");
    require(!rx.empty(), "geometry has no receivers");
    require(tx_schedule.size() == tx.size(), "tx_schedule must list every transmitter once");
    std::vector<bool> seen(tx.size(), false);
    for (auto t : tx_schedule) {
      require(t < tx.size() && !seen[t], "tx_schedule must be a permutation of transmitter indices");
      seen[t] = true;
    }
  }

  void validate_against(const WaveformConfig& cfg) const {
    validate();
    require(cfg.n_tx == tx.size() && cfg.n_rx == rx.size(), "waveform n_tx/n_rx disagree with geometry");
  }

  std::size_t slot_of(std::size_t tx_index) const {
    auto it = std::find(tx_schedule.begin(), tx_schedule.end(), tx_index);
    require(it != tx_schedule.end(), "transmitter missing from schedule");
    return static_cast<std::size_t>(it - tx_schedule.begin());
  }

  std::vector<VirtualElement> virtual_elements() const {
    std::vector<VirtualElement> out;
    out.reserve(tx.size() * rx.size());
    for (std::size_t t = 0; t < tx.size(); ++t) {
      const auto slot = slot_of(t);
      for (std::size_t r = 0; r < rx.size(); ++r)
        out.push_back({tx[t].x + rx[r].x, tx[t].z + rx[r].z, t, r, slot});
    }
    return out;
  }

  /// Pairs of virtual elements sharing a position but fed by different transmitters.
  std::vector<std::pair<std::size_t, std::size_t>> overlapped_pairs() const {
    const auto ve = virtual_elements();
    std::map<std::pair<int, int>, std::vector<std::size_t>> by_pos;
    for (std::size_t i = 0; i < ve.size(); ++i) by_pos[{ve[i].x, ve[i].z}].push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [pos, idx] : by_pos)
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
          if (ve[idx[a]].tx != ve[idx[b]].tx) pairs.emplace_back(idx[a], idx[b]);
    return pairs;
  }

  std::vector<int> unique_x() const {
    std::vector<int> xs;
    for (const auto& v : virtual_elements()) xs.push_back(v.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
  }

  std::vector<int> unique_z() const {
    std::vector<int> zs;
    for (const auto& v : virtual_elements()) zs.push_back(v.z);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    return zs;
  }

  bool operator==(const ArrayGeometry&) const = default;
};

struct Scatterer {
  Vec3 position = Vec3::Zero();  // m, box centre for extended targets
  Vec3 velocity = Vec3::Zero();  // m/s
  double rcs = 1.0;              // linear power scale
  Vec3 extent = Vec3::Zero();    // half-size per axis, m

  bool is_point() const { return (extent.array() == 0.0).all(); }
};

struct GroundPlane {
  double z_offset = -1.5;  // m
  double density = 1.0;    // lidar points/m^2
};

struct Scene {
  std::vector<Scatterer> scatterers;
  double noise_power = 0.0;  // per-sample complex noise variance
  std::optional<GroundPlane> ground_plane;

  void validate() const {
    require(noise_power >= 0.0, "noise_power must be >= 0");
    for (const auto& s : scatterers) {
      require(s.position.allFinite() && s.velocity.allFinite() && s.extent.allFinite(),
              "scatterer fields must be finite");
      require(s.position.norm() > 0.0, "scatterer at range 0");
      require(s.rcs >= 0.0, "scatterer rcs must be >= 0");
      require((s.extent.array() >= 0.0).all(), "scatterer extent must be >= 0");
    }
    if (ground_plane) require(ground_plane->density >= 0.0, "ground density must be >= 0");
  }

  /// Scene after `dt` seconds of constant-velocity motion.
  Scene advanced(double dt) const {
    Scene s = *this;
    for (auto& sc : s.scatterers) sc.position += sc.velocity * dt;
    return s;
  }
};

struct AdcFrame {
  Volume<cdouble> samples;  // [chirp][rx][fast-time]
  WaveformConfig config;
  ArrayGeometry geometry;
};

namespace detail {

struct BoxFace {
  Vec3 center;
  Vec3 axis_u;  // half-size vectors spanning the face
  Vec3 axis_v;
  double area() const { return 4.0 * axis_u.norm() * axis_v.norm(); }
};

/// Faces of an axis-aligned box whose outward side faces a sensor at the origin.
inline std::vector<BoxFace> visible_faces(const Vec3& center, const Vec3& extent) {
  std::vector<BoxFace> faces;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    if (extent[u] <= 0.0 || extent[v] <= 0.0) continue;
    for (double sign : {-1.0, 1.0}) {
      Vec3 normal = Vec3::Zero();
      normal[axis] = sign;
      const Vec3 fc = center + normal * extent[axis];
      if (normal.dot(fc) >= 0.0) continue;
      Vec3 au = Vec3::Zero();
      Vec3 av = Vec3::Zero();
      au[u] = extent[u];
      av[v] = extent[v];
      faces.push_back({fc, au, av});
      if (extent[axis] == 0.0) break;  // flat plate: both normals share one plane
    }
  }
  return faces;
}

struct PointScatterer {
  Vec3 position;
  Vec3 velocity;
  double amplitude;
};

/// Point scatterers for the radar model: extended targets become a grid over
/// their visible faces with spacing <= `spacing`, sharing the target's rcs.
inline std::vector<PointScatterer> expand_for_radar(const Scene& scene, double spacing) {
  std::vector<PointScatterer> out;
  for (const auto& s : scene.scatterers) {
    if (s.is_point()) {
      out.push_back({s.position, s.velocity, std::sqrt(s.rcs)});
      continue;
    }
    std::vector<Vec3> pts;
    for (const auto& f : visible_faces(s.position, s.extent)) {
      const auto nu = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * f.axis_u.norm() / spacing)));
      const auto nv = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * f.axis_v.norm() / spacing)));
      for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
          const double a = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(nu);
          const double b = -1.0 + (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(nv);
          pts.push_back(f.center + a * f.axis_u + b * f.axis_v);
        }
    }
    if (pts.empty()) continue;
    const double amp = std::sqrt(s.rcs / static_cast<double>(pts.size()));
    for (const auto& p : pts) out.push_back({p, s.velocity, amp});
  }
  return out;
}

}  // namespace detail

/// Renders `scene` as one frame of complex baseband ADC samples.
///
/// Chirp c is transmitted by tx_schedule[c mod n_tx] at t_c = c * chirp_duration.
/// Each point scatterer contributes sqrt(rcs) * exp(j(4 pi R/lambda + 2 pi f_b n/fs))
/// times the virtual-element steering phase exp(-j pi (x sin_az + z sin_el)),
/// with R the range at t_c (stop-and-hop within a chirp) and f_b = 2 S R / c.
inline AdcFrame simulate_adc(const Scene& scene, const WaveformConfig& config, const ArrayGeometry& geometry,
                             std::uint64_t seed) {
  scene.validate();
  config.validate();
  geometry.validate_against(config);

  AdcFrame frame{Volume<cdouble>(config.n_chirps, config.n_rx, config.n_adc_samples), config, geometry};
  const auto points = detail::expand_for_radar(scene, config.range_resolution());
  const double lambda = config.wavelength();
  const std::size_t ns = config.n_adc_samples;
  std::vector<cdouble> base(ns);

  for (const auto& pt : points) {
    if (pt.amplitude == 0.0) continue;
    for (std::size_t c = 0; c < config.n_chirps; ++c) {
      const double t = static_cast<double>(c) * config.chirp_duration;
      const Vec3 pos = pt.position + pt.velocity * t;
      const double range = pos.norm();
      const Vec3 u = pos / range;
      const double fb = 2.0 * config.chirp_slope * range / kSpeedOfLight;
      const double phase0 = std::fmod(4.0 * kPi * range / lambda, 2.0 * kPi);
      const cdouble rot = std::polar(1.0, 2.0 * kPi * fb / config.sampling_frequency);
      cdouble z = std::polar(pt.amplitude, phase0);
      for (std::size_t n = 0; n < ns; ++n) {
        base[n] = z;
        z *= rot;
      }
      const auto& txp = geometry.tx[geometry.tx_schedule[c % config.n_tx]];
      for (std::size_t r = 0; r < config.n_rx; ++r) {
        const double xv = txp.x + geometry.rx[r].x;
        const double zv = txp.z + geometry.rx[r].z;
        const cdouble g = std::polar(1.0, -kPi * (xv * u.x() + zv * u.z()));
        auto* line = reinterpret_cast<double*>(frame.samples.line(c, r).data());
        const auto* b = reinterpret_cast<const double*>(base.data());
        const double gr = g.real(), gi = g.imag();
        for (std::size_t n = 0; n < ns; ++n) {
          line[2 * n] += gr * b[2 * n] - gi * b[2 * n + 1];
          line[2 * n + 1] += gr * b[2 * n + 1] + gi * b[2 * n];
        }
      }
    }
  }

  if (scene.noise_power > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(scene.noise_power / 2.0));
    for (auto& v : frame.samples.data()) v += cdouble(gauss(rng), gauss(rng));
  }
  return frame;
}

/// Lidar-style ground truth: one point per point target, uniformly sampled
/// points on the visible faces of extended targets (density points/m^2), plus
/// ground-plane returns when configured. Result is cropped to `fov`.
inline PointCloud sample_lidar(const Scene& scene, const Fov& fov, double density, std::uint64_t seed) {
  require(density > 0.0, "lidar density must be > 0");
  scene.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  PointCloud cloud;

  for (const auto& s : scene.scatterers) {
    if (s.is_point()) {
      cloud.push_back(s.position);
      continue;
    }
    for (const auto& f : detail::visible_faces(s.position, s.extent)) {
      const auto n = static_cast<std::size_t>(std::llround(density * f.area()));
      for (std::size_t i = 0; i < n; ++i) cloud.push_back(f.center + unit(rng) * f.axis_u + unit(rng) * f.axis_v);
    }
  }

  if (scene.ground_plane && scene.ground_plane->density > 0.0) {
    const double reach = fov.max_range;
    const auto n = static_cast<std::size_t>(std::llround(scene.ground_plane->density * 2.0 * reach * reach));
    std::uniform_real_distribution<double> ux(-reach, reach);
    std::uniform_real_distribution<double> uy(0.0, reach);
    for (std::size_t i = 0; i < n; ++i) cloud.emplace_back(ux(rng), uy(rng), scene.ground_plane->z_offset);
  }
  return crop_fov(cloud, fov);
}

struct RandomSceneOptions {
  std::size_t min_objects = 3;
  std::size_t max_objects = 7;
  double min_range = 6.0;
  double max_range = 40.0;
  double max_azimuth_deg = 50.0;
  double max_speed = 12.0;
  double sensor_height = 1.5;  // ground sits at z = -sensor_height
  double noise_power = 1000.0;  // cars sit near -12 dB per-sample SNR
  double ground_density = 0.5;
};

/// Road-scene generator used for synthetic test sets: cars, cyclists,
/// pedestrians and poles standing on a ground plane.
inline Scene random_scene(std::uint64_t seed, const RandomSceneOptions& opt = {}) {
  struct Kind {
    Vec3 half;
    double rcs;
    double speed_scale;
  };
  static const std::array<Kind, 4> kinds{{
      {{0.9, 2.2, 0.75}, 60.0, 1.0},    // car
      {{0.3, 0.9, 0.85}, 12.0, 0.6},    // cyclist
      {{0.25, 0.25, 0.9}, 6.0, 0.2},    // pedestrian
      {{0.1, 0.1, 1.5}, 8.0, 0.0},      // pole
  }};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> count(opt.min_objects, opt.max_objects);
  std::uniform_int_distribution<std::size_t> pick(0, kinds.size() - 1);
  std::uniform_real_distribution<double> range(opt.min_range, opt.max_range);
  std::uniform_real_distribution<double> az(-deg2rad(opt.max_azimuth_deg), deg2rad(opt.max_azimuth_deg));
  std::uniform_real_distribution<double> speed(-opt.max_speed, opt.max_speed);

  Scene scene;
  scene.noise_power = opt.noise_power;
  if (opt.ground_density > 0.0) scene.ground_plane = GroundPlane{-opt.sensor_height, opt.ground_density};
  const auto n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = kinds[pick(rng)];
    const double r = range(rng);
    const double a = az(rng);
    Scatterer s;
    s.position = {r * std::sin(a), r * std::cos(a), -opt.sensor_height + k.half.z()};
    s.extent = k.half;
    s.rcs = k.rcs;
    s.velocity = {0.0, speed(rng) * k.speed_scale, 0.0};
    scene.scatterers.push_back(s);
  }
  return scene;
}

}  // namespace rdb
