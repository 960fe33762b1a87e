import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_ns.fieldio import FieldFormatError, read_field, read_series, write_field, write_series
from dyadic_ns.heat_oseen import heat_trajectory
from dyadic_ns.norms import TimeGrid
from dyadic_ns.spectral_core import Grid, SpectralField, random_band_field


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([(2, 16), (2, 32), (3, 16)]), st.integers(1, 3))
def test_field_round_trip_bit_exact(tmp_path_factory, seed, shape, comps):
    g = Grid(*shape)
    f = random_band_field(seed, g, components=comps)
    path = tmp_path_factory.mktemp("io") / "f.dnsf"
    write_field(path, f)
    back = read_field(path)
    assert back.grid == g and back.real
    assert back.coeffs.tobytes() == f.coeffs.tobytes()


def test_complex_field_keeps_realness_off(tmp_path):
    g = Grid(2, 16)
    c = np.zeros((1,) + g.shape, dtype=complex)
    c[0, 2, 1] = 1.0 + 0.5j
    write_field(tmp_path / "c.dnsf", SpectralField(g, c, real=False))
    assert not read_field(tmp_path / "c.dnsf").real


def test_series_round_trip_bit_exact(tmp_path):
    g = Grid(2, 32)
    tg = TimeGrid.graded(0.3, 8)
    u = heat_trajectory(random_band_field(4, g, components=2), tg)
    write_series(tmp_path / "u.dnst", u)
    back = read_series(tmp_path / "u.dnst")
    assert back.timegrid.times.tobytes() == tg.times.tobytes()
    assert back.coeffs.tobytes() == u.coeffs.tobytes()


def test_bad_files(tmp_path):
    g = Grid(2, 16)
    good = tmp_path / "f.dnsf"
    write_field(good, random_band_field(0, g))
    data = good.read_bytes()
    cases = {
        "short": data[:5],
        "magic": b"XXXX" + data[4:],
        "version": data[:4] + bytes([9]) + data[5:],
        "truncated": data[:-16],
    }
    for name, blob in cases.items():
        p = tmp_path / name
        p.write_bytes(blob)
        with pytest.raises(FieldFormatError):
            read_field(p)
    with pytest.raises(FieldFormatError):
        read_series(good)


def test_header_layout(tmp_path):
    g = Grid(3, 16)
    write_field(tmp_path / "f.dnsf", random_band_field(0, g, components=3))
    head = tmp_path.joinpath("f.dnsf").read_bytes()[:11]
    assert struct.unpack("<4sBBBI", head) == (b"DNSF", 1, 3, 3, 16)
