"""Reader/writer for RCB1 artifact files (see FORMATS.md).

Decoded artifacts are plain dataclasses holding numpy arrays, so other
components can consume radar cubes and write occupancy grids without the C++
library. `encode(decode(b)) == b` for every valid file.
"""

from __future__ import annotations

import os
import struct
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"RCB1"
RDC, RADAR_CUBE, GRID, POINT_CLOUD, ADC_FRAME = range(5)
F32, C64, U16, BITS = range(4)

_DTYPE_OF_KIND = {RDC: C64, RADAR_CUBE: F32, GRID: BITS, POINT_CLOUD: F32, ADC_FRAME: C64}
_ITEM = {F32: 4, C64: 8, U16: 2}


class DecodeError(ValueError):
    def __init__(self, field_name: str, what: str):
        super().__init__(f"{field_name}: {what}")
        self.field = field_name


@dataclass
class Header:
    kind: int
    dims: tuple[int, int, int]
    dtype: int
    arrays: list[np.ndarray]
    payload_offset: int


@dataclass
class Rdc:
    values: np.ndarray  # complex64 [range][doppler][channel]
    range_per_bin: float
    velocity_per_bin: float
    extended: bool
    range_axis: np.ndarray = field(repr=False, default=None)
    velocity_axis: np.ndarray = field(repr=False, default=None)


@dataclass
class RadarCube:
    power_db: np.ndarray  # float32 [range][azimuth][doppler]
    elevation: np.ndarray  # uint16 [range][azimuth][doppler]
    range: np.ndarray
    sin_azimuth: np.ndarray
    velocity: np.ndarray
    sin_elevation: np.ndarray


@dataclass
class Grid:
    bits: np.ndarray  # bool [range][azimuth][elevation]
    range_edges: np.ndarray
    sin_azimuth_edges: np.ndarray
    sin_elevation_edges: np.ndarray


@dataclass
class PointCloud:
    points: np.ndarray  # float32 (N, 3)


@dataclass
class AdcFrame:
    samples: np.ndarray  # complex64 [chirp][rx][fast-time]
    waveform: np.ndarray  # 8 values, see FORMATS.md
    tx: np.ndarray  # int (n_tx, 2) x, z in half wavelengths
    rx: np.ndarray
    tx_schedule: np.ndarray


def _payload_size(kind: int, dtype: int, dims) -> int:
    n0, n1, n2 = dims
    if kind == RADAR_CUBE:
        return n0 * n1 * n2 * 6
    if kind == GRID:
        return n0 * n1 * ((n2 + 7) // 8)
    return n0 * n1 * n2 * _ITEM[dtype]


def parse_header(data: bytes) -> Header:
    def need(pos, n, name):
        if len(data) - pos < n:
            raise DecodeError(name, "file truncated")

    need(0, 4, "magic")
    if data[:4] != MAGIC:
        raise DecodeError("magic", "not an RCB1 file")
    need(4, 1, "payload_kind")
    kind = data[4]
    if kind > 4:
        raise DecodeError("payload_kind", f"unknown kind {kind}")
    need(5, 12, "dims")
    dims = struct.unpack_from("<3I", data, 5)
    need(17, 1, "dtype")
    dtype = data[17]
    if dtype > 3:
        raise DecodeError("dtype", f"unknown dtype {dtype}")
    if dtype != _DTYPE_OF_KIND[kind]:
        raise DecodeError("dtype", f"dtype {dtype} invalid for payload kind {kind}")
    if kind != POINT_CLOUD and 0 in dims:
        raise DecodeError("dims", "zero dimension")
    if kind == POINT_CLOUD and (dims[1] != 3 or dims[2] != 1):
        raise DecodeError("dims", "point cloud dims must be (N, 3, 1)")
    need(18, 4, "axis_arrays")
    (count,) = struct.unpack_from("<I", data, 18)
    pos = 22
    if count * 4 > len(data) - pos:
        raise DecodeError("axis_arrays", "array count exceeds file size")
    arrays = []
    for i in range(count):
        name = f"axis_arrays[{i}]"
        need(pos, 4, name)
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if n * 8 > len(data) - pos:
            raise DecodeError(name, "array length exceeds file size")
        arrays.append(np.frombuffer(data, dtype="<f8", count=n, offset=pos).copy())
        pos += 8 * n
    want = _payload_size(kind, dtype, dims)
    have = len(data) - pos
    if have < want:
        raise DecodeError("payload", "payload shorter than header claims")
    if have > want:
        raise DecodeError("payload", "trailing bytes after payload")
    return Header(kind, tuple(dims), dtype, arrays, pos)


def _expect_arrays(h: Header, lengths):
    if len(h.arrays) != len(lengths):
        raise DecodeError("axis_arrays", f"expected {len(lengths)} arrays, found {len(h.arrays)}")
    for i, n in enumerate(lengths):
        if n is not None and len(h.arrays[i]) != n:
            raise DecodeError(f"axis_arrays[{i}]", f"length {len(h.arrays[i])} disagrees with dims")


def _complex(data: bytes, h: Header) -> np.ndarray:
    return np.frombuffer(data, dtype="<c8", offset=h.payload_offset).astype(np.complex64).reshape(h.dims)


def decode(data: bytes):
    h = parse_header(data)
    d0, d1, d2 = h.dims
    if h.kind == RDC:
        _expect_arrays(h, [d0, d1, d2, 3])
        meta = h.arrays[3]
        return Rdc(_complex(data, h), float(meta[0]), float(meta[1]), bool(meta[2] != 0.0), h.arrays[0], h.arrays[1])
    if h.kind == RADAR_CUBE:
        _expect_arrays(h, [d0, d1, d2, None])
        n_el = len(h.arrays[3])
        if not 1 <= n_el <= 65536:
            raise DecodeError("axis_arrays[3]", "elevation axis length must be in [1, 65536]")
        n = d0 * d1 * d2
        power = np.frombuffer(data, dtype="<f4", count=n, offset=h.payload_offset).astype(np.float32).reshape(h.dims)
        elev = np.frombuffer(data, dtype="<u2", count=n, offset=h.payload_offset + 4 * n).astype(np.uint16).reshape(h.dims)
        if elev.size and int(elev.max()) >= n_el:
            raise DecodeError("payload", "elevation index outside elevation axis")
        return RadarCube(power, elev, *h.arrays)
    if h.kind == GRID:
        _expect_arrays(h, [d0 + 1, d1 + 1, d2 + 1])
        for i, e in enumerate(h.arrays):
            if not np.all(np.diff(e) > 0):
                raise DecodeError("axis_arrays", f"edges of axis {i} are not strictly increasing")
        row = (d2 + 7) // 8
        packed = np.frombuffer(data, dtype=np.uint8, offset=h.payload_offset).reshape(d0, d1, row)
        if d2 % 8 and np.any(packed[..., -1] >> (d2 % 8)):
            raise DecodeError("payload", "padding bits set in bit-packed row")
        bits = np.unpackbits(packed, axis=2, bitorder="little")[..., :d2].astype(bool)
        return Grid(bits, *h.arrays)
    if h.kind == POINT_CLOUD:
        _expect_arrays(h, [])
        pts = np.frombuffer(data, dtype="<f4", offset=h.payload_offset).astype(np.float32).reshape(d0, 3)
        return PointCloud(pts)
    if len(h.arrays) != 4 or len(h.arrays[0]) != 8:
        raise DecodeError("axis_arrays", "ADC frame needs 4 arrays and an 8-value waveform")
    wf = h.arrays[0]
    n_tx, n_rx = int(wf[6]), int(wf[7])
    if (d0, d1, d2) != (int(wf[4]), n_rx, int(wf[3])):
        raise DecodeError("dims", "dims disagree with waveform")
    tx = h.arrays[1].astype(int).reshape(n_tx, 2)
    rx = h.arrays[2].astype(int).reshape(n_rx, 2)
    return AdcFrame(_complex(data, h), wf, tx, rx, h.arrays[3].astype(int))


def _header(kind: int, dims, dtype: int, arrays) -> bytes:
    out = [MAGIC, struct.pack("<B3IB", kind, *[int(d) for d in dims], dtype), struct.pack("<I", len(arrays))]
    for a in arrays:
        a = np.asarray(a, dtype="<f8")
        out.append(struct.pack("<I", a.size))
        out.append(a.tobytes())
    return b"".join(out)


def _complex_bytes(values: np.ndarray) -> bytes:
    v = np.asarray(values, dtype=np.complex64)
    inter = np.empty(v.shape + (2,), dtype="<f4")
    inter[..., 0] = v.real
    inter[..., 1] = v.imag
    return inter.tobytes()


def encode(obj) -> bytes:
    if isinstance(obj, Rdc):
        d = obj.values.shape
        rng = np.arange(d[0]) * obj.range_per_bin
        vel = (np.arange(d[1]) - d[1] // 2) * obj.velocity_per_bin
        arrays = [rng, vel, np.arange(d[2], dtype=float), [obj.range_per_bin, obj.velocity_per_bin, float(obj.extended)]]
        return _header(RDC, d, C64, arrays) + _complex_bytes(obj.values)
    if isinstance(obj, RadarCube):
        arrays = [obj.range, obj.sin_azimuth, obj.velocity, obj.sin_elevation]
        return (_header(RADAR_CUBE, obj.power_db.shape, F32, arrays) + np.asarray(obj.power_db, "<f4").tobytes()
                + np.asarray(obj.elevation, "<u2").tobytes())
    if isinstance(obj, Grid):
        bits = np.asarray(obj.bits, dtype=bool)
        packed = np.packbits(bits, axis=2, bitorder="little")
        arrays = [obj.range_edges, obj.sin_azimuth_edges, obj.sin_elevation_edges]
        return _header(GRID, bits.shape, BITS, arrays) + packed.tobytes()
    if isinstance(obj, PointCloud):
        pts = np.asarray(obj.points, dtype="<f4").reshape(-1, 3)
        return _header(POINT_CLOUD, (pts.shape[0], 3, 1), F32, []) + pts.tobytes()
    if isinstance(obj, AdcFrame):
        arrays = [obj.waveform, np.asarray(obj.tx).reshape(-1), np.asarray(obj.rx).reshape(-1), obj.tx_schedule]
        return _header(ADC_FRAME, obj.samples.shape, C64, arrays) + _complex_bytes(obj.samples)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def read(path) -> object:
    data = Path(path).read_bytes()
    try:
        return decode(data)
    except DecodeError as e:
        raise DecodeError(e.field, f"{str(e).split(': ', 1)[1]} ({path})") from None


def write(obj, path) -> None:
    """Atomic write: temporary sibling file, then rename."""
    path = Path(path)
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}")
    tmp.write_bytes(encode(obj))
    os.replace(tmp, path)


def _main(argv):
    for p in argv:
        obj = read(p)
        shape = {Rdc: lambda o: o.values.shape, RadarCube: lambda o: o.power_db.shape, Grid: lambda o: o.bits.shape,
                 PointCloud: lambda o: o.points.shape, AdcFrame: lambda o: o.samples.shape}[type(obj)](obj)
        extra = f" set={int(obj.bits.sum())}" if isinstance(obj, Grid) else ""
        print(f"{p}: {type(obj).__name__} {tuple(shape)}{extra}")


if __name__ == "__main__":
    _main(sys.argv[1:])
