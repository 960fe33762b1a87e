"""Binary field and trajectory files.

Field file::

    b"DNSF"  u8 version  u8 dim  u8 components  u32 n     (little endian)
    float64 (re, im) pairs, component-major, FFT index order row-major

Trajectory file::

    b"DNST"  u8 version  u8 dim  u8 components  u32 n  u32 count
    float64 times[count]
    count field payloads (same layout as above, without header)

Round trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .norms import TimeGrid, TimeSeriesField
from .spectral_core import Grid, SpectralField, _reflect

VERSION = 1
_FIELD = struct.Struct("<4sBBBI")
_SERIES = struct.Struct("<4sBBBII")


class FieldFormatError(ValueError):
    pass


def _payload(coeffs: np.ndarray) -> bytes:
    return np.ascontiguousarray(coeffs, dtype="<c16").tobytes()


def _decode(buf: bytes, shape: tuple) -> np.ndarray:
    count = int(np.prod(shape))
    if len(buf) != 16 * count:
        raise FieldFormatError("payload size does not match header")
    return np.frombuffer(buf, dtype="<c16").astype(complex).reshape(shape)


def _is_hermitian(coeffs: np.ndarray, dim: int) -> bool:
    # the file carries no realness flag; recover it from the symmetry
    scale = np.max(np.abs(coeffs), initial=0.0)
    return bool(np.max(np.abs(coeffs - np.conj(_reflect(coeffs, dim))), initial=0.0) <= 1e-13 * max(scale, 1e-300))


def write_field(path, f: SpectralField) -> None:
    g = f.grid
    head = _FIELD.pack(b"DNSF", VERSION, g.dim, f.components, g.n)
    Path(path).write_bytes(head + _payload(f.coeffs))


def read_field(path) -> SpectralField:
    data = Path(path).read_bytes()
    if len(data) < _FIELD.size:
        raise FieldFormatError("file too short")
    magic, version, dim, comps, n = _FIELD.unpack_from(data)
    if magic != b"DNSF":
        raise FieldFormatError("not a field file")
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version}")
    g = Grid(dim, n)
    coeffs = _decode(data[_FIELD.size :], (comps,) + g.shape)
    return SpectralField(g, coeffs, real=_is_hermitian(coeffs, dim))


def write_series(path, u: TimeSeriesField) -> None:
    g = u.grid
    times = u.timegrid.times
    head = _SERIES.pack(b"DNST", VERSION, g.dim, u.components, g.n, len(times))
    Path(path).write_bytes(head + np.asarray(times, dtype="<f8").tobytes() + _payload(u.coeffs))


def read_series(path) -> TimeSeriesField:
    data = Path(path).read_bytes()
    if len(data) < _SERIES.size:
        raise FieldFormatError("file too short")
    magic, version, dim, comps, n, count = _SERIES.unpack_from(data)
    if magic != b"DNST":
        raise FieldFormatError("not a trajectory file")
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version}")
    g = Grid(dim, n)
    off = _SERIES.size + 8 * count
    times = np.frombuffer(data[_SERIES.size : off], dtype="<f8").astype(float)
    coeffs = _decode(data[off:], (count, comps) + g.shape)
    return TimeSeriesField(g, TimeGrid(times), coeffs, real=_is_hermitian(coeffs, dim))
