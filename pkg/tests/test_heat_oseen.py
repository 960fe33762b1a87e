import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_ns.heat_oseen import (
    bilinear_B,
    duhamel_sweep,
    heat_apply,
    heat_trajectory,
    oseen_apply,
    oseen_kernel_l1,
    phi_weights,
    projected_divergence,
    singular_convolution_L,
    tensor_series,
)
from dyadic_ns.mild_solver import SolverConfig, picard_solve
from dyadic_ns.norms import TimeGrid, TimeSeriesField, lebesgue_norm, lebesgue_series
from dyadic_ns.spectral_core import Grid, divergence, leray_project, plane_wave, random_band_field

G = Grid(2, 32)
TG = TimeGrid.graded(0.5, 32)
seeds = st.integers(0, 2**31 - 1)


def test_heat_single_mode():
    f = heat_apply(plane_wave(G, (3, 0)), 0.1)
    assert f.coeffs[0][3, 0].real == pytest.approx(0.4065696597405991, rel=1e-15)
    g = random_band_field(0, G)
    assert np.array_equal(heat_apply(g, 0.0).coeffs, g.coeffs)
    with pytest.raises(ValueError):
        heat_apply(g, -0.1)


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(0, 2), st.floats(0, 2))
def test_semigroup(seed, s, t):
    f = random_band_field(seed, G)
    a = heat_apply(heat_apply(f, s), t).coeffs
    b = heat_apply(f, s + t).coeffs
    assert np.max(np.abs(a - b)) <= 1e-14 * np.max(np.abs(f.coeffs))


@pytest.mark.parametrize("z", [0.0, 1e-8, 0.05, 0.0999999, 0.1, 0.5, 3.0, 50.0])
def test_phi_weights_match_closed_form(z):
    # high-precision reference from the defining integrals
    import mpmath

    mpmath.mp.dps = 40
    zz = mpmath.mpf(z)
    if z == 0:
        p1, c2 = mpmath.mpf(1), mpmath.mpf(1) / 2
    else:
        p1 = (1 - mpmath.e ** (-zz)) / zz
        c2 = (1 - mpmath.e ** (-zz) * (1 + zz)) / zz**2
    got = phi_weights(np.array([z]))
    assert float(got[0][0]) == pytest.approx(float(p1), rel=1e-14)
    assert float(got[1][0]) == pytest.approx(float(c2), rel=1e-13)


def test_oseen_zero():
    F = TimeSeriesField.zeros(G, TG, 4)
    assert not np.any(oseen_apply(F).coeffs)


def test_oseen_single_mode_constant_in_time():
    k = np.array([2, -3])
    F0 = np.zeros((4,) + G.shape, dtype=complex)
    F0[:, k[0], k[1]] = [0.3, -1.1 + 0.2j, 0.7j, 0.5]
    F = TimeSeriesField.constant(type(plane_wave(G, (0, 0)))(G, F0, real=False), TG)
    out = oseen_apply(F).coeffs[:, :, k[0], k[1]]
    ksq = float(k @ k)
    Fm = F0[:, k[0], k[1]].reshape(2, 2)
    w = 1j * (k @ Fm)  # w_i = sum_k i k_k F_{k i}
    Pw = w - k * (k @ w) / ksq
    for m, t in enumerate(TG.times):
        want = -(1 - math.exp(-t * ksq)) / ksq * Pw
        assert np.max(np.abs(out[m] - want)) <= 1e-12


def test_duhamel_exact_for_linear_integrand():
    lam = np.array([0.0, 0.3, 7.0, 400.0])

    class _Grid:
        ksq = lam

    a, b = 1.3, -0.4
    G_lin = a + b * TG.times[:, None] * np.ones_like(lam)
    out = duhamel_sweep(G_lin, _Grid, TG.times)
    for m, t in enumerate(TG.times):
        for i, L in enumerate(lam):
            if L == 0:
                want = a * t + b * t**2 / 2
            else:
                want = a * (1 - math.exp(-L * t)) / L + b * (t / L - (1 - math.exp(-L * t)) / L**2)
            assert out[m, i] == pytest.approx(want, rel=1e-12, abs=1e-15)


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_oseen_output_divergence_free(seed):
    F = TimeSeriesField(G, TG, np.stack([random_band_field(seed + m, G, components=4).coeffs for m in range(len(TG.times))]))
    out = oseen_apply(F)
    for m in range(1, len(TG.times)):
        snap = out.snapshot(m)
        assert lebesgue_norm(divergence(snap), np.inf) <= 1e-12 * max(lebesgue_norm(snap, np.inf), 1e-300)


def _heat(seed, amp=1.0):
    return heat_trajectory(leray_project(random_band_field(seed, G, components=2, gamma=2.0)) * amp, TG)


def test_bilinear_zero_and_scaling():
    z = TimeSeriesField.zeros(G, TG, 2)
    assert not np.any(bilinear_B(z, z).coeffs)
    u, v = _heat(1), _heat(2)
    a = bilinear_B(u * 2.5, v).coeffs
    b = (bilinear_B(u, v) * 2.5).coeffs
    assert np.max(np.abs(a - b)) <= 1e-14 * np.max(np.abs(b))


def test_tensor_series_symmetric_for_equal_inputs():
    u = _heat(3)
    T = tensor_series(u, u).coeffs
    assert np.max(np.abs(T[:, 1] - T[:, 2])) <= 1e-15


def test_time_shift_consistency():
    cfg = SolverConfig(G, TG, tol=1e-12)
    u0 = leray_project(random_band_field(5, G, components=2, gamma=3.0)) * 0.05
    u, _ = picard_solve(u0, cfg)
    times = TG.times
    T = tensor_series(u, u)
    G_all = projected_divergence(T.coeffs, G)
    for m0 in (4, 16):
        sub = times[m0:]
        tail = -duhamel_sweep(G_all[m0:], G, sub - sub[0])
        lin = np.exp(-(sub - sub[0]).reshape(-1, 1, 1, 1) * G.ksq) * u.coeffs[m0][None]
        diff = TimeSeriesField(G, TimeGrid(sub - sub[0]), u.coeffs[m0:] - lin - tail)
        assert np.max(lebesgue_series(diff, np.inf)) <= 1e-10 * lebesgue_norm(u0, np.inf)


def test_kernel_monotone_and_errors():
    ts = 2.0 ** -np.arange(2, 9)
    vals = [oseen_kernel_l1(t, 2, 128) for t in ts]
    assert np.all(np.diff(vals) > 0)
    assert oseen_kernel_l1(10.0, 2, 64) < 1e-3
    with pytest.raises(ValueError):
        oseen_kernel_l1(0.0)


def test_L_constant_and_sqrt():
    ones = np.ones(len(TG.times))
    for t in TG.nodes:
        assert singular_convolution_L(ones, TG, t) == pytest.approx(math.pi, abs=1e-12)
    sq = np.sqrt(TG.times)
    assert singular_convolution_L(sq, TG, TG.T) == pytest.approx(2 * math.sqrt(TG.T), rel=1e-3)
    assert singular_convolution_L(ones[1:], TG, TG.T) == pytest.approx(math.pi, abs=1e-12)
    with pytest.raises(ValueError):
        singular_convolution_L(ones, TG, 0.3)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=len(TG.times), max_size=len(TG.times)),
       st.lists(st.floats(-5, 5), min_size=len(TG.times), max_size=len(TG.times)), st.floats(-3, 3))
def test_L_linear(f, g, a):
    f, g = np.array(f), np.array(g)
    lhs = singular_convolution_L(a * f + g, TG, TG.T)
    rhs = a * singular_convolution_L(f, TG, TG.T) + singular_convolution_L(g, TG, TG.T)
    assert lhs == pytest.approx(rhs, abs=1e-11 * (1 + np.abs(f).max() + np.abs(g).max()))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=len(TG.times), max_size=len(TG.times)))
def test_L_positive(f):
    assert singular_convolution_L(np.array(f), TG, TG.T) >= 0.0


def test_L_matches_refined_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = rng.normal(size=3)
        f = a[0] + a[1] * np.sin(4 * TG.times) + a[2] * TG.times**2
        for t in TG.nodes[::5]:
            ref = singular_convolution_L(f, TG, t, points=640)
            assert singular_convolution_L(f, TG, t) == pytest.approx(ref, rel=1e-6)
