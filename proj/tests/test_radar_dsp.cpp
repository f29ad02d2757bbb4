#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "rdb/radar_dsp.hpp"

using namespace rdb;

namespace {

std::size_t argmax_range(const RdcCube& c, std::size_t d, std::size_t ch) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < c.range_bins(); ++r)
    if (std::abs(c.values(r, d, ch)) > std::abs(c.values(best, d, ch))) best = r;
  return best;
}

}  // namespace

TEST(RangeDoppler, TargetAt20mLandsInBin194) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const auto frame = simulate_adc(scenario::scene_of({20.0, 0, 0, 0}, INFINITY), w, g, 0);
  const auto rdc = range_doppler_fft(frame, 500, 16);
  EXPECT_EQ(std::lround(oracle::range_bin(w, 20.0, 500)), 194);
  EXPECT_EQ(argmax_range(rdc, 8, 0), 194u);
  EXPECT_NEAR(rdc.range_per_bin, 0.10286, 1e-5);
  EXPECT_FALSE(rdc.extended);
}

TEST(RangeDoppler, ZeroFrameGivesZeroCube) {
  AdcFrame f{Volume<cdouble>(128, 16, 256), WaveformConfig{}, ArrayGeometry::cascade_default()};
  const auto rdc = range_doppler_fft(f, 500, 16);
  EXPECT_TRUE(std::all_of(rdc.values.data().begin(), rdc.values.data().end(), [](cdouble v) { return v == 0.0; }));
}

TEST(RangeDoppler, InjectedTonePeaksAtClosedFormBinsInEveryChannel) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  AdcFrame f{Volume<cdouble>(w.n_chirps, w.n_rx, w.n_adc_samples), w, g};
  const double fb = 2.3e6, fd = 0.2 / w.pri_tx();
  for (std::size_t c = 0; c < w.n_chirps; ++c)
    for (std::size_t r = 0; r < w.n_rx; ++r)
      for (std::size_t n = 0; n < w.n_adc_samples; ++n)
        f.samples(c, r, n) = std::polar(1.0, 2 * kPi * (fb * n / w.sampling_frequency + fd * c * w.chirp_duration));
  const auto rdc = range_doppler_fft(f, 500, 16);
  const double rb = fb / w.sampling_frequency * 500;
  const double db = fd * w.pri_tx() * 16 + 8;
  for (std::size_t ch = 0; ch < rdc.channels(); ++ch) {
    std::size_t br = 0, bd = 0;
    for (std::size_t r = 0; r < rdc.range_bins(); ++r)
      for (std::size_t d = 0; d < rdc.doppler_bins(); ++d)
        if (std::abs(rdc.values(r, d, ch)) > std::abs(rdc.values(br, bd, ch))) br = r, bd = d;
    EXPECT_LE(std::abs(static_cast<double>(br) - rb), 1.0) << "channel " << ch;
    EXPECT_LE(oracle::circular_gap(static_cast<double>(bd), db, 16), 1.0) << "channel " << ch;
  }
}

TEST(RangeDoppler, RejectsUndersizedTransforms) {
  AdcFrame f{Volume<cdouble>(128, 16, 256), WaveformConfig{}, ArrayGeometry::cascade_default()};
  EXPECT_THROW(range_doppler_fft(f, 128, 16), ContractError);
  EXPECT_THROW(range_doppler_fft(f, 500, 8), ContractError);
  f.samples = Volume<cdouble>(128, 16, 200);
  EXPECT_THROW(range_doppler_fft(f, 500, 16), ContractError);
}

TEST(Tdma, MigrationPhaseClosedForm) {
  const WaveformConfig w;
  EXPECT_EQ(w.migration_phase(0.0), 0.0);
  EXPECT_NEAR(w.migration_phase(10.0), 4 * kPi * 10 * 28e-6 / (3e8 / 76e9), 1e-12);
  EXPECT_NEAR(w.migration_phase(10.0), 0.891, 5e-4);
}

TEST(Tdma, StationaryTargetPhasesAreUntouched) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const auto frame = simulate_adc(scenario::scene_of({15.0, 20, 0, 0}, 30.0), w, g, 2);
  const auto rdc = range_doppler_fft(frame, 500, 16);
  const auto ext = tdma_compensate(rdc, g, w, 128);
  EXPECT_TRUE(ext.extended);
  EXPECT_EQ(ext.doppler_bins(), 128u);
  EXPECT_NEAR(ext.velocity_per_bin, 2 * w.max_velocity_extended() / 128, 1e-12);
  const std::size_t r = argmax_range(rdc, 8, 0);
  for (std::size_t ch = 0; ch < rdc.channels(); ++ch) EXPECT_EQ(ext.values(r, 64, ch), rdc.values(r, 8, ch));
}

TEST(Tdma, ResolvesVelocityBeyondTheTdmaLimit) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  for (double v : {-20.0, -7.5, 4.0, 10.0, 25.0}) {
    const scenario::Target t{22.0, -12, 0, v};
    const auto frame = simulate_adc(scenario::scene_of(t, 20.0), w, g, 7);
    const auto ext = tdma_compensate(range_doppler_fft(frame, 500, 16), g, w, 128);
    std::size_t best = 0;
    double e = -1;
    for (std::size_t r = 0; r < ext.range_bins(); ++r)
      for (std::size_t d = 0; d < 128; ++d) {
        double s = 0;
        for (std::size_t ch = 0; ch < ext.channels(); ++ch) s += std::norm(ext.values(r, d, ch));
        if (s > e) e = s, best = d;
      }
    const double truth = scenario::truth_bins(t, w, PipelineConfig{}, true).doppler_bin;
    EXPECT_LE(oracle::circular_gap(static_cast<double>(best), truth, 128), 1.0) << "v = " << v;
  }
}

TEST(Tdma, RejectsMismatchedGeometry) {
  const WaveformConfig w;
  AdcFrame f{Volume<cdouble>(128, 16, 256), w, ArrayGeometry::cascade_default()};
  const auto rdc = range_doppler_fft(f, 500, 16);
  EXPECT_THROW(tdma_compensate(rdc, ArrayGeometry::single_tx(), w, 128), ContractError);
}

TEST(Angle, AxesAreHalfBinSineGrids) {
  const auto ax = pipeline_axes(WaveformConfig{});
  ASSERT_EQ(ax.sin_azimuth.size(), 240u);
  ASSERT_EQ(ax.sin_elevation.size(), 44u);
  ASSERT_EQ(ax.velocity.size(), 128u);
  EXPECT_NEAR(ax.sin_azimuth.front(), -1 + 1.0 / 240, 1e-15);
  EXPECT_NEAR(ax.sin_elevation.front(), -ax.sin_elevation.back(), 1e-15);
  EXPECT_LE(ax.sin_elevation.back(), std::sin(deg2rad(20)));
  EXPECT_EQ(ax.velocity[64], 0.0);
  EXPECT_NEAR(ax.velocity[127], 35.25 - 2 * 35.25 / 128, 0.01);
}

TEST(Angle, BoresightAndThirtyDegreeTargets) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  PipelineConfig pc;
  for (double az : {0.0, 30.0}) {
    const scenario::Target t{18.0, az, 0, 0};
    const auto cube = process_frame(simulate_adc(scenario::scene_of(t, INFINITY), w, g, 0), pc);
    const auto err = scenario::errors(cube, scenario::truth_bins(t, w, pc, true));
    EXPECT_LE(err.azimuth, 1.0) << az;
    EXPECT_LE(err.range, 1.0);
    EXPECT_LE(err.doppler, 1.0);
    // 0 degrees sits between the two middle RoI bins.
    const double el = oracle::sine_bin(0.0, 128) - 42.0;
    EXPECT_LE(std::abs(cube.elevation(err.peak.r, err.peak.a, err.peak.d) - el), 0.5 + 1e-9);
  }
}

TEST(Angle, TenDegreeElevation) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const scenario::Target t{18.0, 5, 10, 0};
  const auto cube = process_frame(simulate_adc(scenario::scene_of(t, INFINITY), w, g, 0));
  const auto p = oracle::global_peak(cube);
  const double want = oracle::sine_bin(std::sin(deg2rad(10)), 128) - 42.0;
  EXPECT_LE(std::abs(cube.elevation(p.r, p.a, p.d) - want), 1.0);
}

TEST(Angle, UncompensatedMigrationBiasesAzimuth) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const scenario::Target t{25.0, 10, 0, 5.0};
  const auto frame = simulate_adc(scenario::scene_of(t, 20.0), w, g, 3);
  PipelineConfig on, off;
  off.compensate = false;
  const auto with = scenario::errors(process_frame(frame, on), scenario::truth_bins(t, w, on, true));
  const auto without = scenario::errors(process_frame(frame, off), scenario::truth_bins(t, w, off, false));
  EXPECT_LE(with.azimuth, 1.0);
  EXPECT_GT(without.azimuth, 2.0);
}

TEST(ProcessFrame, DefaultCubeShape) {
  AdcFrame f{Volume<cdouble>(128, 16, 256), WaveformConfig{}, ArrayGeometry::cascade_default()};
  const auto cube = process_frame(f);
  EXPECT_EQ(cube.power_db.dims(), (std::array<std::size_t, 3>{500, 240, 128}));
  EXPECT_EQ(cube.elevation.dims(), cube.power_db.dims());
  EXPECT_EQ(cube.axes, pipeline_axes(f.config));
  // The floor keeps an all-zero input finite.
  EXPECT_TRUE(std::all_of(cube.power_db.data().begin(), cube.power_db.data().end(), [](float v) { return std::isfinite(v); }));
}

TEST(ProcessFrame, SingleStationaryTargetDominates) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const scenario::Target t{30.0, 0, 0, 0};
  const auto cube = process_frame(simulate_adc(scenario::scene_of(t, 20.0), w, g, 4));
  const auto err = scenario::errors(cube, scenario::truth_bins(t, w, PipelineConfig{}, true));
  EXPECT_LE(err.range, 1.0);
  EXPECT_LE(err.azimuth, 1.0);
  EXPECT_LE(err.doppler, 1.0);
  // Exactly one cell at the top: the runner-up sits lower.
  std::vector<float> v(cube.power_db.data());
  std::nth_element(v.begin(), v.end() - 2, v.end());
  EXPECT_LT(v[v.size() - 2], err.peak.power);
}

TEST(ProcessFrame, TwoTargetsFiveRangeBinsApart) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  const double rpb = w.range_per_bin(500);
  const auto s1 = scenario::scene_of({150 * rpb, 0, 0, 0}, INFINITY);
  const auto s2 = scenario::scene_of({155 * rpb, 0, 0, 0}, INFINITY);
  auto both = s1;
  both.scatterers.push_back(s2.scatterers[0]);
  const auto c1 = process_frame(simulate_adc(s1, w, g, 5));
  const auto c2 = process_frame(simulate_adc(s2, w, g, 5));
  const auto cube = process_frame(simulate_adc(both, w, g, 5));
  const std::size_t a = 119, d = 64;  // boresight sits between azimuth bins 119 and 120
  auto at = [&](const RadarCube& c, std::size_t r) { return std::max(c.power_db(r, a, d), c.power_db(r, a + 1, d)); };
  for (std::size_t r : {150u, 155u}) {
    EXPECT_GT(at(cube, r), at(cube, r - 1)) << r;
    EXPECT_GT(at(cube, r), at(cube, r + 1)) << r;
  }
  // Superposition: amplitudes add at most linearly.
  auto amp = [](float db) { return std::pow(10.0, db / 20.0); };
  for (std::size_t r = 146; r <= 159; ++r)
    EXPECT_LE(amp(at(cube, r)), (amp(at(c1, r)) + amp(at(c2, r))) * (1 + 1e-4)) << r;
  EXPECT_LT(at(cube, 152), std::min(at(cube, 150), at(cube, 155)) - 3.0);
}

TEST(ProcessFrame, NoiseFloorStaysBelowMedianPlus25dB) {
  const WaveformConfig w;
  const auto g = ArrayGeometry::cascade_default();
  float worst = -1e9f;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Scene s;
    s.noise_power = 1.0;
    const auto cube = process_frame(simulate_adc(s, w, g, 1000 + trial));
    std::vector<float> v(cube.power_db.data());
    const float mx = *std::max_element(v.begin(), v.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    worst = std::max(worst, mx - v[v.size() / 2]);
  }
  EXPECT_LT(worst, 25.0f);
}

TEST(ProcessFrame, SingleTxSkipsExtension) {
  const auto w = WaveformConfig::single_tx();
  const auto g = ArrayGeometry::single_tx();
  PipelineConfig pc;
  pc.d_fft = 128;
  const scenario::Target t{12.0, -20, 0, 2.0};
  const auto cube = process_frame(simulate_adc(scenario::scene_of(t, 20.0), w, g, 8), pc);
  EXPECT_EQ(cube.doppler_bins(), 128u);
  const auto err = scenario::errors(cube, scenario::truth_bins(t, w, pc, false));
  EXPECT_LE(err.range, 1.0);
  EXPECT_LE(err.doppler, 1.0);
  // A 16-element array is coarse: allow its beamwidth in 240-bin units.
  EXPECT_LE(err.azimuth, 240.0 / 16 / 2);
}
