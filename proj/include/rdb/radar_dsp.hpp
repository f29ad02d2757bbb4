#pragma once

// ADC frame -> range-Doppler-channel cube -> TDMA-corrected cube ->
// two-channel range-azimuth-Doppler radar cube.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rdb/axes.hpp"
#include "rdb/common.hpp"
#include "rdb/fft.hpp"
#include "rdb/scene_sim.hpp"

namespace rdb {

/// Range-Doppler-channel cube, values[range][doppler][virtual element].
struct RdcCube {
  Volume<cdouble> values;
  double range_per_bin = 0.0;     // m
  double velocity_per_bin = 0.0;  // m/s, Doppler bin n/2 is zero velocity
  bool extended = false;          // Doppler axis covers the TDMA-extended interval

  std::size_t range_bins() const { return values.dim(0); }
  std::size_t doppler_bins() const { return values.dim(1); }
  std::size_t channels() const { return values.dim(2); }
  double velocity_of(std::size_t d) const {
    return (static_cast<double>(d) - static_cast<double>(doppler_bins() / 2)) * velocity_per_bin;
  }
};

/// Two co-registered range-azimuth-Doppler volumes: peak power over the
/// elevation RoI in dB, and the elevation bin index (into axes.sin_elevation)
/// of that peak.
struct RadarCube {
  Volume<float> power_db;
  Volume<std::uint16_t> elevation;
  RadarAxes axes;

  std::size_t range_bins() const { return power_db.dim(0); }
  std::size_t azimuth_bins() const { return power_db.dim(1); }
  std::size_t doppler_bins() const { return power_db.dim(2); }
  std::size_t elevation_bins() const { return axes.sin_elevation.size(); }
};

struct PipelineConfig {
  std::size_t r_fft = 500;
  std::size_t d_fft = 16;           // per-transmitter Doppler FFT
  std::size_t doppler_bins = 0;     // extended Doppler length; 0 = n_chirps
  std::size_t a_fft = 240;
  std::size_t e_fft = 128;
  double elevation_roi_deg = 20.0;
  double candidate_db = 3.0;        // TDMA hypothesis test only above median energy + this
  bool compensate = true;           // skipped automatically for single-TX waveforms

  std::size_t extended_bins(const WaveformConfig& cfg) const { return doppler_bins ? doppler_bins : cfg.n_chirps; }
};

/// 20 log10(|a| + eps) with the floor that keeps the power channel finite.
inline constexpr double kAmplitudeFloor = 1e-12;

/// Hamming-windowed, zero-padded range FFT along fast time and Doppler FFT
/// along each transmitter's de-interleaved slow time. Only full TDMA loops are
/// used. The Doppler axis is shifted so bin d_fft/2 is zero velocity.
inline RdcCube range_doppler_fft(const AdcFrame& frame, std::size_t r_fft, std::size_t d_fft) {
  const auto& cfg = frame.config;
  cfg.validate();
  frame.geometry.validate_against(cfg);
  require(frame.samples.dims() == std::array<std::size_t, 3>{cfg.n_chirps, cfg.n_rx, cfg.n_adc_samples},
          "ADC frame dims disagree with waveform");
  const std::size_t ns = cfg.n_adc_samples;
  const std::size_t loops = cfg.loops();
  require(r_fft >= ns, "range FFT size smaller than the number of ADC samples");
  require(d_fft >= loops, "Doppler FFT size smaller than chirps per transmitter");

  const std::size_t n_tx = cfg.n_tx;
  const std::size_t n_rx = cfg.n_rx;
  const std::size_t used_chirps = loops * n_tx;
  const std::size_t rows = used_chirps * n_rx;
  const auto wr = hamming(ns);
  const auto wd = hamming(loops);

  fft::Buffer<double> rbuf(rows * r_fft);
  for (std::size_t c = 0; c < used_chirps; ++c)
    for (std::size_t rx = 0; rx < n_rx; ++rx) {
      auto src = frame.samples.line(c, rx);
      auto* dst = rbuf.data() + (c * n_rx + rx) * r_fft;
      for (std::size_t n = 0; n < ns; ++n) dst[n] = src[n] * wr[n];
    }
  fft::BatchPlan<double>(r_fft, rows, fft::Direction::Forward).execute(rbuf);

  const std::size_t n_virtual = n_tx * n_rx;
  fft::Buffer<double> dbuf(n_virtual * r_fft * d_fft);
  for (std::size_t slot = 0; slot < n_tx; ++slot) {
    const std::size_t tx = frame.geometry.tx_schedule[slot];
    for (std::size_t rx = 0; rx < n_rx; ++rx) {
      const std::size_t v = tx * n_rx + rx;
      for (std::size_t l = 0; l < loops; ++l) {
        const std::size_t row = (l * n_tx + slot) * n_rx + rx;
        const auto* src = rbuf.data() + row * r_fft;
        for (std::size_t r = 0; r < r_fft; ++r) dbuf[(v * r_fft + r) * d_fft + l] = src[r] * wd[l];
      }
    }
  }
  fft::BatchPlan<double>(d_fft, n_virtual * r_fft, fft::Direction::Forward).execute(dbuf);

  RdcCube cube;
  cube.values = Volume<cdouble>(r_fft, d_fft, n_virtual);
  cube.range_per_bin = cfg.range_per_bin(r_fft);
  cube.velocity_per_bin = cfg.wavelength() / (2.0 * cfg.pri_tx() * static_cast<double>(d_fft));
  const std::size_t shift = d_fft - d_fft / 2;
  for (std::size_t v = 0; v < n_virtual; ++v)
    for (std::size_t r = 0; r < r_fft; ++r) {
      const auto* src = dbuf.data() + (v * r_fft + r) * d_fft;
      for (std::size_t d = 0; d < d_fft; ++d) cube.values(r, d, v) = src[(d + shift) % d_fft];
    }
  return cube;
}

namespace detail {

inline double wrap_velocity(double v, double vmax) {
  const double span = 2.0 * vmax;
  double w = std::fmod(v + vmax, span);
  if (w < 0.0) w += span;
  return w - vmax;
}

}  // namespace detail

/// Resolves the TDMA Doppler ambiguity and removes the per-slot phase
/// migration 4 pi v dt slot / lambda.
///
/// Cells whose channel energy exceeds the cube median by `candidate_db` are
/// candidates. At each candidate that is a Doppler peak of its range row, the
/// n_tx velocity hypotheses v_h = v + 2 h v_max_tdma are scored by the
/// coherence of overlapped virtual pairs after removing each hypothesis'
/// migration phase. Other candidates take the alias closest to the velocity
/// resolved at the nearest peak of their row, and so do weaker cells within
/// the Hamming main lobe (2 d_fft / loops bins) of a peak; a target's Doppler
/// skirt therefore stays next to its peak. The chosen compensation is applied
/// to every channel and the cell is placed at v_h on an `out_bins`-long axis
/// spanning +-c / (4 f_c chirp_duration). Remaining cells carry no usable
/// phase evidence and are replicated onto all of their aliases. When several
/// cells land in one output bin the most energetic one is kept; a bin that
/// receives nothing takes the replicated cell of its row nearest in Doppler,
/// so the noise floor has no gaps.
inline RdcCube tdma_compensate(const RdcCube& cube, const ArrayGeometry& geometry, const WaveformConfig& config,
                               std::size_t out_bins, double candidate_db = 3.0) {
  geometry.validate_against(config);
  require(!cube.extended, "cube already TDMA-compensated");
  require(out_bins > 0, "extended Doppler length must be positive");
  const auto ve = geometry.virtual_elements();
  require(cube.channels() == ve.size(), "cube channels disagree with geometry");
  const auto pairs = geometry.overlapped_pairs();
  if (pairs.empty())
    throw ContractError("tdma_compensate: geometry has no overlapped virtual pair fed by different transmitters");

  const std::size_t R = cube.range_bins();
  const std::size_t Dp = cube.doppler_bins();
  const std::size_t V = cube.channels();
  const std::size_t n_tx = config.n_tx;
  const double vmax_pre = 0.5 * cube.velocity_per_bin * static_cast<double>(Dp);
  const double vmax_ext = config.max_velocity_extended();
  const double dv_out = 2.0 * vmax_ext / static_cast<double>(out_bins);

  std::vector<double> energy(R * Dp, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t d = 0; d < Dp; ++d) {
      double e = 0.0;
      for (const auto& x : cube.values.line(r, d)) e += std::norm(x);
      energy[r * Dp + d] = e;
    }
  std::vector<double> sorted = energy;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double candidate_level = sorted[sorted.size() / 2] * std::pow(10.0, candidate_db / 10.0);

  // Hypothesis velocities per pre-extension Doppler bin.
  std::vector<double> vh(Dp * n_tx);
  for (std::size_t d = 0; d < Dp; ++d)
    for (std::size_t h = 0; h < n_tx; ++h)
      vh[d * n_tx + h] = detail::wrap_velocity(cube.velocity_of(d) + 2.0 * static_cast<double>(h) * vmax_pre, vmax_ext);
  // exp(-j phi_mig(v_h) slot) per (Doppler bin, hypothesis, slot).
  std::vector<cdouble> unmigrate(Dp * n_tx * n_tx);
  for (std::size_t i = 0; i < Dp * n_tx; ++i)
    for (std::size_t slot = 0; slot < n_tx; ++slot)
      unmigrate[i * n_tx + slot] = std::polar(1.0, -config.migration_phase(vh[i]) * static_cast<double>(slot));
  auto out_bin = [&](double v) {
    const auto j = static_cast<long long>(std::llround(v / dv_out)) + static_cast<long long>(out_bins / 2);
    const auto n = static_cast<long long>(out_bins);
    return static_cast<std::size_t>(((j % n) + n) % n);
  };

  auto test = [&](std::size_t r, std::size_t d) {
    auto x = cube.values.line(r, d);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_h = 0;
    for (std::size_t h = 0; h < n_tx; ++h) {
      const cdouble* rot = unmigrate.data() + (d * n_tx + h) * n_tx;
      double score = 0.0;
      for (const auto& [a, b] : pairs) score += std::real(x[a] * rot[ve[a].slot] * std::conj(x[b] * rot[ve[b].slot]));
      if (score > best) {
        best = score;
        best_h = h;
      }
    }
    return best_h;
  };

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const std::size_t loops = std::max<std::size_t>(1, config.n_chirps / n_tx);
  const std::size_t skirt = (2 * Dp + loops - 1) / loops;
  std::vector<std::size_t> chosen(R * Dp, kNone);
  std::vector<std::size_t> peaks;
  for (std::size_t r = 0; r < R; ++r) {
    const double* e = energy.data() + r * Dp;
    peaks.clear();
    for (std::size_t d = 0; d < Dp; ++d) {
      if (e[d] <= candidate_level) continue;
      if (Dp > 1 && (e[d] < e[(d + Dp - 1) % Dp] || e[d] <= e[(d + 1) % Dp])) continue;
      chosen[r * Dp + d] = test(r, d);
      peaks.push_back(d);
    }
    for (std::size_t d = 0; d < Dp; ++d) {
      if (chosen[r * Dp + d] != kNone) continue;
      const bool candidate = e[d] > candidate_level;
      if (peaks.empty()) {
        if (candidate) chosen[r * Dp + d] = test(r, d);
        continue;
      }
      std::size_t near = peaks.front(), near_dist = Dp;
      for (auto p : peaks) {
        const std::size_t diff = d > p ? d - p : p - d;
        const std::size_t dist = std::min(diff, Dp - diff);
        if (dist < near_dist || (dist == near_dist && e[p] > e[near])) {
          near = p;
          near_dist = dist;
        }
      }
      if (!candidate && near_dist > skirt) continue;
      const double v_peak = vh[near * n_tx + chosen[r * Dp + near]];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < n_tx; ++h) {
        const double gap = std::abs(detail::wrap_velocity(vh[d * n_tx + h] - v_peak, vmax_ext));
        if (gap < best) {
          best = gap;
          chosen[r * Dp + d] = h;
        }
      }
    }
  }

  struct Source {
    double energy = -1.0;
    std::size_t d = 0;
    std::size_t h = 0;
  };
  std::vector<Source> src(R * out_bins);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t d = 0; d < Dp; ++d) {
      const double e = energy[r * Dp + d];
      const std::size_t c = chosen[r * Dp + d];
      const std::size_t h_lo = c == kNone ? 0 : c;
      const std::size_t h_hi = c == kNone ? n_tx : c + 1;
      for (std::size_t h = h_lo; h < h_hi; ++h) {
        auto& s = src[r * out_bins + out_bin(vh[d * n_tx + h])];
        if (e > s.energy) s = {e, d, h};
      }
    }
  for (std::size_t r = 0; r < R; ++r) {
    const std::size_t* row = chosen.data() + r * Dp;
    if (std::find(row, row + Dp, kNone) == row + Dp) continue;
    for (std::size_t j = 0; j < out_bins; ++j) {
      auto& s = src[r * out_bins + j];
      if (s.energy >= 0.0) continue;
      const double v = (static_cast<double>(j) - static_cast<double>(out_bins / 2)) * dv_out;
      const auto dn = static_cast<long long>(std::llround(detail::wrap_velocity(v, vmax_pre) / cube.velocity_per_bin)) +
                      static_cast<long long>(Dp / 2);
      const std::size_t d_nat = static_cast<std::size_t>(((dn % static_cast<long long>(Dp)) + static_cast<long long>(Dp)) %
                                                         static_cast<long long>(Dp));
      const auto hn = std::llround((v - cube.velocity_of(d_nat)) / (2.0 * vmax_pre));
      const auto nt = static_cast<long long>(n_tx);
      const std::size_t h_nat = static_cast<std::size_t>(((hn % nt) + nt) % nt);
      for (std::size_t k = 0; k <= Dp / 2; ++k) {
        const std::size_t lo = (d_nat + Dp - k) % Dp, hi = (d_nat + k) % Dp;
        const std::size_t pick = row[lo] == kNone ? lo : row[hi] == kNone ? hi : Dp;
        if (pick < Dp) {
          s = {energy[r * Dp + pick], pick, h_nat};
          break;
        }
      }
    }
  }

  RdcCube out;
  out.values = Volume<cdouble>(R, out_bins, V);
  out.range_per_bin = cube.range_per_bin;
  out.velocity_per_bin = dv_out;
  out.extended = true;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t j = 0; j < out_bins; ++j) {
      const auto& s = src[r * out_bins + j];
      if (s.energy < 0.0) continue;
      const cdouble* rot = unmigrate.data() + (s.d * n_tx + s.h) * n_tx;
      auto x = cube.values.line(r, s.d);
      auto y = out.values.line(r, j);
      for (std::size_t v = 0; v < V; ++v) y[v] = x[v] * rot[ve[v].slot];
    }
  return out;
}

/// Zero-filled 2D angle FFT and elevation collapse.
///
/// Virtual elements are placed on the dense half-wavelength lattice (duplicates
/// averaged, gaps zero). Azimuth is an a_fft-point DFT, elevation an
/// e_fft-point DFT, both sampled on the half-bin grid of half_bin_sine_axis;
/// elevation is cropped to |sin(el)| <= sin(roi). Per (range, azimuth, Doppler)
/// cell the power channel holds the maximum RoI power in dB and the elevation
/// channel its first argmax.
inline RadarCube angle_process(const RdcCube& cube, const ArrayGeometry& geometry, std::size_t a_fft,
                               std::size_t e_fft, double roi_deg = 20.0) {
  geometry.validate();
  const auto ve = geometry.virtual_elements();
  require(cube.channels() == ve.size(), "cube channels disagree with geometry");
  const auto xs = geometry.unique_x();
  const auto zs = geometry.unique_z();
  const int x0 = xs.front();
  const int z0 = zs.front();
  require(a_fft >= xs.size() && a_fft >= static_cast<std::size_t>(xs.back() - x0 + 1),
          "azimuth FFT shorter than the virtual aperture");
  require(e_fft >= zs.size() && e_fft >= static_cast<std::size_t>(zs.back() - z0 + 1),
          "elevation FFT shorter than the virtual aperture");
  require(roi_deg > 0.0 && roi_deg <= 90.0, "elevation RoI must be in (0, 90] degrees");
  const auto roi = elevation_roi(e_fft, roi_deg);
  require(!roi.empty(), "elevation RoI contains no bins");
  require(roi.size() <= std::numeric_limits<std::uint16_t>::max(), "too many elevation bins");

  const std::size_t R = cube.range_bins();
  const std::size_t D = cube.doppler_bins();
  const std::size_t A = a_fft;
  const std::size_t E = roi.size();
  const std::size_t n_rows = zs.size();

  // Element placement: row per unique z, column x - x0, averaged duplicates,
  // pre-multiplied by the half-bin shift so a backward FFT lands on s_a directly.
  struct Placement {
    std::size_t channel;
    std::size_t slot;  // row * A + column
    cfloat weight;
  };
  std::vector<int> counts(n_rows * A, 0);
  std::vector<std::size_t> row_of(ve.size());
  for (std::size_t i = 0; i < ve.size(); ++i) {
    row_of[i] = static_cast<std::size_t>(std::lower_bound(zs.begin(), zs.end(), ve[i].z) - zs.begin());
    ++counts[row_of[i] * A + static_cast<std::size_t>(ve[i].x - x0)];
  }
  std::vector<Placement> place;
  for (std::size_t i = 0; i < ve.size(); ++i) {
    const auto col = static_cast<std::size_t>(ve[i].x - x0);
    const std::size_t slot = row_of[i] * A + col;
    const double sign = (col % 2 == 0) ? 1.0 : -1.0;
    const auto w = std::polar(sign / counts[slot], kPi * static_cast<double>(col) / static_cast<double>(A));
    place.push_back({i, slot, cfloat(w)});
  }

  // |sum_r A_r w_r(e)|^2 = sum_r |A_r|^2 + 2 Re sum_{r<q} A_r conj(A_q) exp(j pi (z_r - z_q) s_e).
  const auto s_el = half_bin_sine_axis(e_fft);
  struct Cross {
    std::size_t r, q;
  };
  std::vector<Cross> cross;
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t q = r + 1; q < n_rows; ++q) cross.push_back({r, q});
  std::vector<float> tab_re(cross.size() * E), tab_im(cross.size() * E);
  for (std::size_t k = 0; k < cross.size(); ++k)
    for (std::size_t e = 0; e < E; ++e) {
      const double dz = static_cast<double>(zs[cross[k].r] - zs[cross[k].q]);
      const double ph = kPi * dz * s_el[roi[e]];
      tab_re[k * E + e] = static_cast<float>(2.0 * std::cos(ph));
      tab_im[k * E + e] = static_cast<float>(2.0 * std::sin(ph));
    }

  RadarCube out;
  out.power_db = Volume<float>(R, A, D);
  out.elevation = Volume<std::uint16_t>(R, A, D);
  out.axes.range.resize(R);
  for (std::size_t r = 0; r < R; ++r) out.axes.range[r] = static_cast<double>(r) * cube.range_per_bin;
  out.axes.sin_azimuth = half_bin_sine_axis(A);
  out.axes.velocity = centred_axis(D, cube.velocity_per_bin);
  for (auto e : roi) out.axes.sin_elevation.push_back(s_el[e]);

  const std::size_t batch = D * n_rows;
  fft::Buffer<float> buf(batch * A);
  fft::BatchPlan<float> plan(A, batch, fft::Direction::Backward);
  // Structure-of-arrays scratch, vectorised across blocks of kLanes azimuth bins.
  constexpr std::size_t kLanes = 16;
  const std::size_t nc = cross.size();
  const std::size_t Ap = (A + kLanes - 1) / kLanes * kLanes;
  std::vector<float> re(n_rows * Ap), im(n_rows * Ap), diag(Ap), cre(nc * Ap), cim(nc * Ap), best(Ap);
  std::vector<std::uint16_t> arg(Ap);

  // Running max and argmax over the RoI, one pass per elevation bin.
  // NC > 0 fixes the number of row pairs so the inner sum unrolls.
  std::vector<float> argf(Ap);
  auto collapse = [&]<std::size_t NC>() {
    const std::size_t n = NC ? NC : nc;
    std::fill(best.begin(), best.end(), -std::numeric_limits<float>::infinity());
    std::fill(argf.begin(), argf.end(), 0.0f);
    float* __restrict bp = best.data();
    float* __restrict ip = argf.data();
    const float* __restrict dp = diag.data();
    const float* __restrict crp = cre.data();
    const float* __restrict cip = cim.data();
    for (std::size_t e = 0; e < E; ++e) {
      float tr[NC ? NC : 1], ti[NC ? NC : 1];
      if constexpr (NC > 0)
        for (std::size_t k = 0; k < NC; ++k) {
          tr[k] = tab_re[k * E + e];
          ti[k] = tab_im[k * E + e];
        }
      const float ef = static_cast<float>(e);
      for (std::size_t a = 0; a < Ap; ++a) {
        float v = dp[a];
        for (std::size_t k = 0; k < n; ++k) {
          if constexpr (NC > 0)
            v += crp[k * Ap + a] * tr[k] - cip[k * Ap + a] * ti[k];
          else
            v += crp[k * Ap + a] * tab_re[k * E + e] - cip[k * Ap + a] * tab_im[k * E + e];
        }
        const bool gt = v > bp[a];
        ip[a] = gt ? ef : ip[a];
        bp[a] = gt ? v : bp[a];
      }
    }
    for (std::size_t a = 0; a < Ap; ++a) arg[a] = static_cast<std::uint16_t>(argf[a]);
  };

  for (std::size_t r = 0; r < R; ++r) {
    buf.zero();
    for (std::size_t d = 0; d < D; ++d) {
      auto x = cube.values.line(r, d);
      auto* base = buf.data() + d * n_rows * A;
      for (const auto& p : place) base[p.slot] += cfloat(x[p.channel]) * p.weight;
    }
    plan.execute(buf);
    for (std::size_t d = 0; d < D; ++d) {
      const auto* base = buf.data() + d * n_rows * A;
      for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t a = 0; a < A; ++a) {
          re[i * Ap + a] = base[i * A + a].real();
          im[i * Ap + a] = base[i * A + a].imag();
        }
      std::fill(diag.begin(), diag.end(), 0.0f);
      for (std::size_t i = 0; i < n_rows; ++i) {
        const float* pr = re.data() + i * Ap;
        const float* pi = im.data() + i * Ap;
        for (std::size_t a = 0; a < Ap; ++a) diag[a] += pr[a] * pr[a] + pi[a] * pi[a];
      }
      for (std::size_t k = 0; k < nc; ++k) {
        const float* ar = re.data() + cross[k].r * Ap;
        const float* ai = im.data() + cross[k].r * Ap;
        const float* br = re.data() + cross[k].q * Ap;
        const float* bi = im.data() + cross[k].q * Ap;
        float* outr = cre.data() + k * Ap;
        float* outi = cim.data() + k * Ap;
        for (std::size_t a = 0; a < Ap; ++a) {
          outr[a] = ar[a] * br[a] + ai[a] * bi[a];
          outi[a] = ai[a] * br[a] - ar[a] * bi[a];
        }
      }
      if (nc == 6)
        collapse.template operator()<6>();
      else
        collapse.template operator()<0>();
      for (std::size_t a = 0; a < A; ++a) {
        const float amp = std::sqrt(std::max(0.0f, best[a]));
        out.power_db(r, a, d) = 20.0f * std::log10(amp + static_cast<float>(kAmplitudeFloor));
        out.elevation(r, a, d) = arg[a];
      }
    }
  }
  return out;
}

/// Full chain: range/Doppler FFT, TDMA extension and compensation (multi-TX
/// waveforms, when enabled), angle processing.
inline RadarCube process_frame(const AdcFrame& frame, const PipelineConfig& pc = {}) {
  auto rdc = range_doppler_fft(frame, pc.r_fft, pc.d_fft);
  if (pc.compensate && frame.config.n_tx > 1)
    rdc = tdma_compensate(rdc, frame.geometry, frame.config, pc.extended_bins(frame.config), pc.candidate_db);
  return angle_process(rdc, frame.geometry, pc.a_fft, pc.e_fft, pc.elevation_roi_deg);
}

/// Axes process_frame produces for a waveform, without running it.
inline RadarAxes pipeline_axes(const WaveformConfig& cfg, const PipelineConfig& pc = {}) {
  RadarAxes ax;
  ax.range.resize(pc.r_fft);
  for (std::size_t r = 0; r < pc.r_fft; ++r) ax.range[r] = static_cast<double>(r) * cfg.range_per_bin(pc.r_fft);
  ax.sin_azimuth = half_bin_sine_axis(pc.a_fft);
  const bool extended = pc.compensate && cfg.n_tx > 1;
  const std::size_t D = extended ? pc.extended_bins(cfg) : pc.d_fft;
  const double dv = extended ? 2.0 * cfg.max_velocity_extended() / static_cast<double>(D)
                             : cfg.wavelength() / (2.0 * cfg.pri_tx() * static_cast<double>(pc.d_fft));
  ax.velocity = centred_axis(D, dv);
  const auto s = half_bin_sine_axis(pc.e_fft);
  for (auto e : elevation_roi(pc.e_fft, pc.elevation_roi_deg)) ax.sin_elevation.push_back(s[e]);
  return ax;
}

}  // namespace rdb
