#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "fixture_data.hpp"
#include "rdb/cube_io.hpp"

using namespace rdb;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = RDB_FIXTURE_DIR;

// Offsets into the fixed part of the header.
constexpr std::size_t kKindAt = 4;
constexpr std::size_t kDtypeAt = 17;

std::string decode_error(std::string_view bytes) {
  try {
    io::decode(bytes);
  } catch (const io::DecodeError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("rdb_cube_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(CubeIo, RoundTripsEveryKind) {
  EXPECT_EQ(io::decode_grid(io::encode(fixtures::grid())), fixtures::grid());
  EXPECT_EQ(io::decode_point_cloud(io::encode(fixtures::cloud())), fixtures::cloud());
  const auto cube = io::decode_radar_cube(io::encode(fixtures::cube()));
  EXPECT_EQ(cube.power_db, fixtures::cube().power_db);
  EXPECT_EQ(cube.elevation, fixtures::cube().elevation);
  EXPECT_EQ(cube.axes, fixtures::cube().axes);
  const auto rdc = io::decode_rdc(io::encode(fixtures::rdc()));
  EXPECT_EQ(rdc.values, fixtures::rdc().values);
  EXPECT_EQ(rdc.range_per_bin, 0.25);
  EXPECT_EQ(rdc.velocity_per_bin, 0.5);
  EXPECT_TRUE(rdc.extended);
  const auto adc = io::decode_adc_frame(io::encode(fixtures::adc()));
  EXPECT_EQ(adc.samples, fixtures::adc().samples);
  EXPECT_EQ(adc.geometry, fixtures::adc().geometry);
  EXPECT_EQ(adc.config.n_adc_samples, 8u);
  EXPECT_EQ(adc.config.chirp_slope, WaveformConfig{}.chirp_slope);
}

TEST(CubeIo, FullSizeRadarCubeReserialisesByteIdentically) {
  RadarCube c;
  c.power_db = Volume<float>(500, 240, 128);
  c.elevation = Volume<std::uint16_t>(500, 240, 128);
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n(-60.0f, 15.0f);
  std::uniform_int_distribution<int> e(0, 43);
  for (auto& v : c.power_db.data()) v = n(rng);
  for (auto& v : c.elevation.data()) v = static_cast<std::uint16_t>(e(rng));
  c.axes.range = centred_axis(500, 0.1);
  c.axes.sin_azimuth = half_bin_sine_axis(240);
  c.axes.velocity = centred_axis(128, 0.55);
  c.axes.sin_elevation = std::vector<double>(44, 0.0);
  const auto bytes = io::encode(c);
  EXPECT_EQ(bytes.size(), io::parse_header(bytes).payload_offset + 500u * 240u * 128u * 6u);
  const auto back = io::decode_radar_cube(bytes);
  EXPECT_EQ(back.power_db, c.power_db);
  EXPECT_EQ(io::encode(back), bytes);
}

TEST(CubeIo, TruncatedFileReportsShortPayload) {
  auto bytes = io::encode(fixtures::cube());
  bytes.pop_back();
  EXPECT_EQ(decode_error(bytes), "payload: payload shorter than header claims");
  bytes = io::encode(fixtures::cube()) + '\0';
  EXPECT_EQ(decode_error(bytes), "payload: trailing bytes after payload");
  EXPECT_EQ(decode_error(bytes.substr(0, 10)), "dims: file truncated");
}

TEST(CubeIo, OneBitGridHasPopcountOne) {
  OccupancyGrid g(GridSpec::uniform(3, 3, 9));
  g.set(2, 1, 8);
  const auto back = io::decode_grid(io::encode(g));
  EXPECT_EQ(back.count(), 1u);
  EXPECT_TRUE(back.get(2, 1, 8));
}

TEST(CubeIo, MalformedHeadersAreRejectedWithTheField) {
  const auto good = io::encode(fixtures::grid());
  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(decode_error(bad), "magic: not an RCB1 file");
  bad = good;
  bad[kKindAt] = 9;
  EXPECT_EQ(decode_error(bad), "payload_kind: unknown kind 9");
  bad = good;
  bad[kDtypeAt] = 7;
  EXPECT_EQ(decode_error(bad), "dtype: unknown dtype 7");
  bad = good;
  bad[kDtypeAt] = 0;
  EXPECT_EQ(decode_error(bad), "dtype: dtype 0 invalid for payload kind 2");
  bad = good;
  bad[kDtypeAt - 4] = 0;  // low byte of the elevation dimension
  EXPECT_EQ(decode_error(bad).substr(0, 6), "dims: ");
}

TEST(CubeIo, PaddingBitsAndNonMonotoneEdgesAreRejected) {
  auto bad = io::encode(fixtures::grid());  // 11 elevation cells: 5 padding bits per row
  bad.back() = static_cast<char>(bad.back() | 0x80);
  EXPECT_EQ(decode_error(bad), "payload: padding bits set in bit-packed row");
  auto g = fixtures::grid();
  auto spec = g.spec();
  std::swap(spec.range_edges[1], spec.range_edges[2]);
  io::detail::Writer w;
  w.header(io::PayloadKind::Grid, g.dims(), io::DType::Bits, {spec.range_edges, spec.sin_azimuth_edges, spec.sin_elevation_edges});
  const auto head = w.take();
  const auto body = io::encode(g).substr(io::parse_header(io::encode(g)).payload_offset);
  EXPECT_EQ(decode_error(head + body).substr(0, 13), "axis_arrays: ");
}

TEST(CubeIo, ElevationIndexOutsideAxisIsRejected) {
  auto c = fixtures::cube();
  c.elevation.data()[7] = 3;
  EXPECT_EQ(decode_error(io::encode(c)), "payload: elevation index outside elevation axis");
}

TEST(CubeIo, ReadAsChecksKindAndWritesAreAtomic) {
  const auto dir = scratch_dir("files");
  io::write_artifact(fixtures::cloud(), dir / "c.rcb");
  EXPECT_EQ(io::read_as<PointCloud>(dir / "c.rcb"), fixtures::cloud());
  EXPECT_THROW(io::read_as<OccupancyGrid>(dir / "c.rcb"), io::DecodeError);
  io::write_artifact(fixtures::grid(), dir / "c.rcb");
  EXPECT_EQ(io::read_as<OccupancyGrid>(dir / "c.rcb"), fixtures::grid());
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);  // no temporaries left behind
  EXPECT_THROW(io::write_artifact(fixtures::grid(), dir / "missing" / "g.rcb"), std::runtime_error);
  EXPECT_THROW(io::read_artifact(dir / "nope.rcb"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(CrossLanguage, CommittedCppFixturesMatchTheEncoder) {
  EXPECT_EQ(io::read_file(kFixtures / "cpp_grid.rcb"), io::encode(fixtures::grid()));
  EXPECT_EQ(io::read_file(kFixtures / "cpp_cloud.rcb"), io::encode(fixtures::cloud()));
  EXPECT_EQ(io::read_file(kFixtures / "cpp_cube.rcb"), io::encode(fixtures::cube()));
  EXPECT_EQ(io::read_file(kFixtures / "cpp_rdc.rcb"), io::encode(fixtures::rdc()));
  EXPECT_EQ(io::read_file(kFixtures / "cpp_adc.rcb"), io::encode(fixtures::adc()));
}

TEST(CrossLanguage, ReadsPythonWrittenGrid) {
  const auto g = io::read_as<OccupancyGrid>(kFixtures / "py_grid.rcb");
  ASSERT_EQ(g.dims(), (std::array<std::size_t, 3>{3, 2, 9}));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t e = 0; e < 9; ++e) EXPECT_EQ(g.get(r, a, e), (r + a + e) % 4 == 0);
  EXPECT_EQ(g.spec().range_edges, (std::vector<double>{0, 1, 2, 3}));
  EXPECT_EQ(g.spec().sin_azimuth_edges, (std::vector<double>{-0.5, 0, 0.5}));
  EXPECT_EQ(g.spec().sin_elevation_edges.front(), -0.3);
  EXPECT_EQ(io::encode(g), io::read_file(kFixtures / "py_grid.rcb"));
}

TEST(CrossLanguage, ReadsPythonWrittenCloudAndCube) {
  const auto pc = io::read_as<PointCloud>(kFixtures / "py_cloud.rcb");
  EXPECT_EQ(pc, (PointCloud{{1, 2, 3}, {4, 5, 6}, {-1.5, 7.25, 0}}));
  EXPECT_EQ(io::encode(pc), io::read_file(kFixtures / "py_cloud.rcb"));

  const auto c = io::read_as<RadarCube>(kFixtures / "py_cube.rcb");
  ASSERT_EQ(c.power_db.dims(), (std::array<std::size_t, 3>{2, 3, 4}));
  for (std::size_t i = 0; i < c.power_db.size(); ++i) {
    EXPECT_EQ(c.power_db.data()[i], -0.25f * static_cast<float>(i));
    EXPECT_EQ(c.elevation.data()[i], i % 2);
  }
  EXPECT_EQ(c.axes.velocity, (std::vector<double>{-1, -0.5, 0, 0.5}));
  EXPECT_EQ(c.axes.sin_elevation, (std::vector<double>{-0.1, 0.1}));
  EXPECT_EQ(io::encode(c), io::read_file(kFixtures / "py_cube.rcb"));
}
