#pragma once

// Single little-endian container for every artifact exchanged between tools.
// Byte layout is documented in FORMATS.md.

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <unistd.h>

#include "rdb/common.hpp"
#include "rdb/grid.hpp"
#include "rdb/pointcloud.hpp"
#include "rdb/radar_dsp.hpp"
#include "rdb/scene_sim.hpp"

namespace rdb::io {

inline constexpr char kMagic[4] = {'R', 'C', 'B', '1'};

enum class PayloadKind : std::uint8_t { Rdc = 0, RadarCube = 1, Grid = 2, PointCloud = 3, AdcFrame = 4 };
enum class DType : std::uint8_t { F32 = 0, C64 = 1, U16 = 2, Bits = 3 };

/// Malformed input; `field` names the header field or section at fault.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::string field, std::string what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)), detail_(std::move(what)) {}
  const std::string& field() const { return field_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

struct Header {
  PayloadKind kind{};
  std::array<std::uint32_t, 3> dims{1, 1, 1};
  DType dtype{};
  std::vector<std::vector<double>> arrays;
  std::size_t payload_offset = 0;
};

namespace detail {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void c64(cdouble v) {
    f32(static_cast<float>(v.real()));
    f32(static_cast<float>(v.imag()));
  }
  void header(PayloadKind kind, std::array<std::size_t, 3> dims, DType dtype,
              const std::vector<std::vector<double>>& arrays) {
    bytes(kMagic, 4);
    u8(static_cast<std::uint8_t>(kind));
    for (auto d : dims) {
      require(d <= UINT32_MAX, "dimension does not fit in u32");
      u32(static_cast<std::uint32_t>(d));
    }
    u8(static_cast<std::uint8_t>(dtype));
    u32(static_cast<std::uint32_t>(arrays.size()));
    for (const auto& a : arrays) {
      u32(static_cast<std::uint32_t>(a.size()));
      for (double v : a) f64(v);
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  void need(std::size_t n, const std::string& field) const {
    if (remaining() < n) throw DecodeError(field, "file truncated");
  }
  std::uint8_t u8(const std::string& f) {
    need(1, f);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint64_t uint(int n, const std::string& f) {
    need(static_cast<std::size_t>(n), f);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint16_t u16(const std::string& f) { return static_cast<std::uint16_t>(uint(2, f)); }
  std::uint32_t u32(const std::string& f) { return static_cast<std::uint32_t>(uint(4, f)); }
  float f32(const std::string& f) { return std::bit_cast<float>(u32(f)); }
  double f64(const std::string& f) { return std::bit_cast<double>(uint(8, f)); }
  std::string_view raw(std::size_t n, const std::string& f) {
    need(n, f);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

inline std::size_t dtype_bytes(DType t) {
  switch (t) {
    case DType::F32: return 4;
    case DType::C64: return 8;
    case DType::U16: return 2;
    case DType::Bits: return 0;
  }
  return 0;
}

inline std::size_t expected_payload(const Header& h) {
  const std::size_t n0 = h.dims[0], n1 = h.dims[1], n2 = h.dims[2];
  switch (h.kind) {
    case PayloadKind::RadarCube: return n0 * n1 * n2 * (4 + 2);
    case PayloadKind::Grid: return n0 * n1 * ((n2 + 7) / 8);
    default: return n0 * n1 * n2 * dtype_bytes(h.dtype);
  }
}

inline DType expected_dtype(PayloadKind k) {
  switch (k) {
    case PayloadKind::Rdc:
    case PayloadKind::AdcFrame: return DType::C64;
    case PayloadKind::RadarCube:
    case PayloadKind::PointCloud: return DType::F32;
    case PayloadKind::Grid: return DType::Bits;
  }
  return DType::F32;
}

inline std::vector<double> iota_axis(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return v;
}

}  // namespace detail

/// Parses and validates the header, including the exact payload size.
inline Header parse_header(std::string_view bytes) {
  detail::Reader rd(bytes);
  Header h;
  const auto magic = rd.raw(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DecodeError("magic", "not an RCB1 file");
  const auto kind = rd.u8("payload_kind");
  if (kind > 4) throw DecodeError("payload_kind", "unknown kind " + std::to_string(kind));
  h.kind = static_cast<PayloadKind>(kind);
  for (auto& d : h.dims) d = rd.u32("dims");
  const auto dtype = rd.u8("dtype");
  if (dtype > 3) throw DecodeError("dtype", "unknown dtype " + std::to_string(dtype));
  h.dtype = static_cast<DType>(dtype);
  if (h.dtype != detail::expected_dtype(h.kind))
    throw DecodeError("dtype", "dtype " + std::to_string(dtype) + " invalid for payload kind " + std::to_string(kind));
  if (h.kind != PayloadKind::PointCloud)
    for (auto d : h.dims)
      if (d == 0) throw DecodeError("dims", "zero dimension");
  if (h.kind == PayloadKind::PointCloud && (h.dims[1] != 3 || h.dims[2] != 1))
    throw DecodeError("dims", "point cloud dims must be (N, 3, 1)");
  const auto n_arrays = rd.u32("axis_arrays");
  if (static_cast<std::size_t>(n_arrays) * 4 > rd.remaining()) throw DecodeError("axis_arrays", "array count exceeds file size");
  for (std::uint32_t i = 0; i < n_arrays; ++i) {
    const std::string f = "axis_arrays[" + std::to_string(i) + "]";
    const auto len = rd.u32(f);
    if (static_cast<std::size_t>(len) * 8 > rd.remaining()) throw DecodeError(f, "array length exceeds file size");
    std::vector<double> a(len);
    for (auto& v : a) v = rd.f64(f);
    h.arrays.push_back(std::move(a));
  }
  h.payload_offset = rd.pos();
  const std::size_t want = detail::expected_payload(h);
  if (rd.remaining() < want) throw DecodeError("payload", "payload shorter than header claims");
  if (rd.remaining() > want) throw DecodeError("payload", "trailing bytes after payload");
  return h;
}

// ---- encoders ------------------------------------------------------------

inline std::string encode(const RdcCube& c) {
  std::vector<double> range(c.range_bins());
  for (std::size_t i = 0; i < range.size(); ++i) range[i] = static_cast<double>(i) * c.range_per_bin;
  detail::Writer w;
  w.header(PayloadKind::Rdc, c.values.dims(), DType::C64,
           {range, centred_axis(c.doppler_bins(), c.velocity_per_bin), detail::iota_axis(c.channels()),
            {c.range_per_bin, c.velocity_per_bin, c.extended ? 1.0 : 0.0}});
  for (const auto& v : c.values.data()) w.c64(v);
  return w.take();
}

inline std::string encode(const RadarCube& c) {
  detail::Writer w;
  w.header(PayloadKind::RadarCube, c.power_db.dims(), DType::F32,
           {c.axes.range, c.axes.sin_azimuth, c.axes.velocity, c.axes.sin_elevation});
  for (float v : c.power_db.data()) w.f32(v);
  for (auto v : c.elevation.data()) w.u16(v);
  return w.take();
}

inline std::string encode(const OccupancyGrid& g) {
  detail::Writer w;
  const auto& s = g.spec();
  const auto d = g.dims();
  w.header(PayloadKind::Grid, d, DType::Bits, {s.range_edges, s.sin_azimuth_edges, s.sin_elevation_edges});
  const std::size_t row_bytes = (d[2] + 7) / 8;
  std::vector<std::uint8_t> row(row_bytes);
  for (std::size_t r = 0; r < d[0]; ++r)
    for (std::size_t a = 0; a < d[1]; ++a) {
      std::fill(row.begin(), row.end(), 0);
      for (std::size_t e = 0; e < d[2]; ++e)
        if (g.get(r, a, e)) row[e / 8] |= static_cast<std::uint8_t>(1u << (e % 8));
      w.bytes(row.data(), row_bytes);
    }
  return w.take();
}

inline std::string encode(const PointCloud& pc) {
  detail::Writer w;
  w.header(PayloadKind::PointCloud, {pc.size(), 3, 1}, DType::F32, {});
  for (const auto& p : pc)
    for (int i = 0; i < 3; ++i) w.f32(static_cast<float>(p[i]));
  return w.take();
}

inline std::string encode(const AdcFrame& f) {
  const auto& c = f.config;
  std::vector<double> wf{c.start_frequency, c.chirp_slope, c.chirp_duration, static_cast<double>(c.n_adc_samples),
                         static_cast<double>(c.n_chirps), c.sampling_frequency, static_cast<double>(c.n_tx),
                         static_cast<double>(c.n_rx)};
  auto flat = [](const std::vector<AntennaPosition>& v) {
    std::vector<double> o;
    for (const auto& p : v) {
      o.push_back(p.x);
      o.push_back(p.z);
    }
    return o;
  };
  std::vector<double> sched(f.geometry.tx_schedule.begin(), f.geometry.tx_schedule.end());
  detail::Writer w;
  w.header(PayloadKind::AdcFrame, f.samples.dims(), DType::C64, {wf, flat(f.geometry.tx), flat(f.geometry.rx), sched});
  for (const auto& v : f.samples.data()) w.c64(v);
  return w.take();
}

// ---- decoders ------------------------------------------------------------

namespace detail {

inline void expect_kind(const Header& h, PayloadKind k) {
  if (h.kind != k)
    throw DecodeError("payload_kind", "expected kind " + std::to_string(static_cast<int>(k)) + ", file has " +
                                          std::to_string(static_cast<int>(h.kind)));
}

inline void expect_arrays(const Header& h, std::vector<std::size_t> lengths) {
  if (h.arrays.size() != lengths.size())
    throw DecodeError("axis_arrays", "expected " + std::to_string(lengths.size()) + " arrays, found " +
                                         std::to_string(h.arrays.size()));
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (lengths[i] != SIZE_MAX && h.arrays[i].size() != lengths[i])
      throw DecodeError("axis_arrays[" + std::to_string(i) + "]", "length " + std::to_string(h.arrays[i].size()) +
                                                                        " disagrees with dims");
}

inline std::size_t as_count(double v, const std::string& field) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) throw DecodeError(field, "not a valid count");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline RdcCube decode_rdc(std::string_view bytes) {
  const auto h = parse_header(bytes);
  detail::expect_kind(h, PayloadKind::Rdc);
  detail::expect_arrays(h, {h.dims[0], h.dims[1], h.dims[2], 3});
  RdcCube c;
  c.values = Volume<cdouble>(h.dims[0], h.dims[1], h.dims[2]);
  c.range_per_bin = h.arrays[3][0];
  c.velocity_per_bin = h.arrays[3][1];
  c.extended = h.arrays[3][2] != 0.0;
  detail::Reader rd(bytes.substr(h.payload_offset));
  for (auto& v : c.values.data()) {
    const float re = rd.f32("payload");
    v = cdouble(re, rd.f32("payload"));
  }
  return c;
}

inline RadarCube decode_radar_cube(std::string_view bytes) {
  const auto h = parse_header(bytes);
  detail::expect_kind(h, PayloadKind::RadarCube);
  detail::expect_arrays(h, {h.dims[0], h.dims[1], h.dims[2], SIZE_MAX});
  RadarCube c;
  c.axes = {h.arrays[0], h.arrays[1], h.arrays[2], h.arrays[3]};
  if (c.axes.sin_elevation.empty() || c.axes.sin_elevation.size() > 65536)
    throw DecodeError("axis_arrays[3]", "elevation axis length must be in [1, 65536]");
  c.power_db = Volume<float>(h.dims[0], h.dims[1], h.dims[2]);
  c.elevation = Volume<std::uint16_t>(h.dims[0], h.dims[1], h.dims[2]);
  detail::Reader rd(bytes.substr(h.payload_offset));
  for (auto& v : c.power_db.data()) v = rd.f32("payload");
  for (auto& v : c.elevation.data()) {
    v = rd.u16("payload");
    if (v >= c.axes.sin_elevation.size()) throw DecodeError("payload", "elevation index outside elevation axis");
  }
  return c;
}

inline OccupancyGrid decode_grid(std::string_view bytes) {
  const auto h = parse_header(bytes);
  detail::expect_kind(h, PayloadKind::Grid);
  detail::expect_arrays(h, {h.dims[0] + std::size_t{1}, h.dims[1] + std::size_t{1}, h.dims[2] + std::size_t{1}});
  GridSpec spec{h.arrays[0], h.arrays[1], h.arrays[2]};
  try {
    spec.validate();
  } catch (const ContractError& e) {
    throw DecodeError("axis_arrays", e.what());
  }
  OccupancyGrid g(spec);
  const std::size_t row_bytes = (h.dims[2] + 7) / 8;
  detail::Reader rd(bytes.substr(h.payload_offset));
  for (std::size_t r = 0; r < h.dims[0]; ++r)
    for (std::size_t a = 0; a < h.dims[1]; ++a) {
      const auto row = rd.raw(row_bytes, "payload");
      for (std::size_t e = 0; e < h.dims[2]; ++e)
        if (static_cast<std::uint8_t>(row[e / 8]) >> (e % 8) & 1u) g.set(r, a, e);
      if (h.dims[2] % 8 != 0 && (static_cast<std::uint8_t>(row[row_bytes - 1]) >> (h.dims[2] % 8)) != 0)
        throw DecodeError("payload", "padding bits set in bit-packed row");
    }
  return g;
}

inline PointCloud decode_point_cloud(std::string_view bytes) {
  const auto h = parse_header(bytes);
  detail::expect_kind(h, PayloadKind::PointCloud);
  detail::expect_arrays(h, {});
  PointCloud pc(h.dims[0]);
  detail::Reader rd(bytes.substr(h.payload_offset));
  for (auto& p : pc)
    for (int i = 0; i < 3; ++i) p[i] = rd.f32("payload");
  return pc;
}

inline AdcFrame decode_adc_frame(std::string_view bytes) {
  const auto h = parse_header(bytes);
  detail::expect_kind(h, PayloadKind::AdcFrame);
  if (h.arrays.size() != 4) throw DecodeError("axis_arrays", "ADC frame needs 4 arrays");
  const auto& wf = h.arrays[0];
  if (wf.size() != 8) throw DecodeError("axis_arrays[0]", "waveform array must have 8 values");
  AdcFrame f;
  auto& c = f.config;
  c.start_frequency = wf[0];
  c.chirp_slope = wf[1];
  c.chirp_duration = wf[2];
  c.n_adc_samples = detail::as_count(wf[3], "axis_arrays[0]");
  c.n_chirps = detail::as_count(wf[4], "axis_arrays[0]");
  c.sampling_frequency = wf[5];
  c.n_tx = detail::as_count(wf[6], "axis_arrays[0]");
  c.n_rx = detail::as_count(wf[7], "axis_arrays[0]");
  auto positions = [&](std::size_t idx, std::size_t count) {
    const auto& a = h.arrays[idx];
    const std::string f = "axis_arrays[" + std::to_string(idx) + "]";
    if (a.size() != 2 * count) throw DecodeError(f, "antenna count disagrees with waveform");
    std::vector<AntennaPosition> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back({static_cast<int>(a[2 * i]), static_cast<int>(a[2 * i + 1])});
    return out;
  };
  f.geometry.tx = positions(1, c.n_tx);
  f.geometry.rx = positions(2, c.n_rx);
  for (double v : h.arrays[3]) f.geometry.tx_schedule.push_back(detail::as_count(v, "axis_arrays[3]"));
  try {
    c.validate();
    f.geometry.validate_against(c);
  } catch (const ContractError& e) {
    throw DecodeError("axis_arrays", e.what());
  }
  if (h.dims[0] != c.n_chirps || h.dims[1] != c.n_rx || h.dims[2] != c.n_adc_samples)
    throw DecodeError("dims", "dims disagree with waveform");
  f.samples = Volume<cdouble>(h.dims[0], h.dims[1], h.dims[2]);
  detail::Reader rd(bytes.substr(h.payload_offset));
  for (auto& v : f.samples.data()) {
    const float re = rd.f32("payload");
    v = cdouble(re, rd.f32("payload"));
  }
  return f;
}

using Artifact = std::variant<RdcCube, RadarCube, OccupancyGrid, PointCloud, AdcFrame>;

inline Artifact decode(std::string_view bytes) {
  switch (parse_header(bytes).kind) {
    case PayloadKind::Rdc: return decode_rdc(bytes);
    case PayloadKind::RadarCube: return decode_radar_cube(bytes);
    case PayloadKind::Grid: return decode_grid(bytes);
    case PayloadKind::PointCloud: return decode_point_cloud(bytes);
    case PayloadKind::AdcFrame: return decode_adc_frame(bytes);
  }
  throw DecodeError("payload_kind", "unknown kind");
}

// ---- files ---------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

template <typename T>
void write_artifact(const T& object, const std::filesystem::path& path) {
  write_file_atomic(path, encode(object));
}

inline Artifact read_artifact(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(e.field(), e.detail() + " (" + path.string() + ")");
  }
}

template <typename T>
T read_as(const std::filesystem::path& path) {
  auto a = read_artifact(path);
  if (auto* v = std::get_if<T>(&a)) return std::move(*v);
  throw DecodeError("payload_kind", path.string() + " holds a different artifact kind");
}

}  // namespace rdb::io
