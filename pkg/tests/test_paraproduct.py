import numpy as np
import pytest
from _oracles import brute_convolution
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_ns.littlewood_paley import cutoffs, lp_block, top_block
from dyadic_ns.norms import TimeGrid, besov_norm, chemin_lerner_norm, lebesgue_norm, TimeSeriesField
from dyadic_ns.paraproduct import bony_residual, paraproduct_terms, pi1, pi2
from dyadic_ns.spectral_core import Grid, SpectralField, plane_wave, random_band_field, random_peaked_field

G = Grid(2, 64)
seeds = st.integers(0, 2**31 - 1)


def constant(c, grid=G):
    return SpectralField(grid, np.where(grid.kabs == 0, c, 0.0)[None] + 0j)


def oracle_paraproduct(f, g, which):
    """Direct sum over j of brute-force convolutions with multipliers rebuilt from phi."""
    grid = f.grid
    phi = cutoffs().phi
    out = np.zeros(grid.shape, dtype=complex)
    J = top_block(grid)
    for j in range(-1 if which == 1 else 0, J + 1):
        low = phi(grid.kabs / 2.0 ** (j + 1 if which == 1 else j))
        block = phi(grid.kabs) if j == -1 else phi(grid.kabs / 2.0 ** (j + 1)) - phi(grid.kabs / 2.0**j)
        out += brute_convolution(low * f.coeffs[0], block * g.coeffs[0], grid)
    return out


def test_constant_left_factor():
    g = random_band_field(1, G)
    assert lebesgue_norm(pi1(constant(2.0), g) - g * 2.0, np.inf) <= 1e-13
    low = lp_block(-1, g)
    assert lebesgue_norm(pi2(constant(2.0), g) - (g - low) * 2.0, np.inf) <= 1e-13


def test_constant_right_factor():
    f = random_band_field(2, G)
    assert lebesgue_norm(pi1(f, constant(3.0)) - lp_block(-1, f) * 3.0, np.inf) <= 1e-13
    assert np.max(np.abs(pi2(f, constant(3.0)).coeffs)) == 0.0


def test_constants_residual_exactly_zero():
    assert bony_residual(constant(2.0), constant(-1.5)) == 0.0


def test_far_modes_against_oracle():
    # (8, 0) is not admissible on n = 16 (kmax = 5), so the oracle runs on n = 32
    g32 = Grid(2, 32)
    f = plane_wave(g32, (1, 0)) + plane_wave(g32, (-1, 0))
    h = plane_wave(g32, (8, 0)) + plane_wave(g32, (-8, 0))
    for which, op in ((1, pi1), (2, pi2)):
        assert np.max(np.abs(op(f, h).coeffs[0] - oracle_paraproduct(f, h, which))) <= 1e-12


@pytest.mark.parametrize("seed", [0, 1])
def test_random_pair_against_oracle(seed):
    g16 = Grid(2, 16)
    f, h = random_band_field(seed, g16, gamma=0.0), random_band_field(seed + 5, g16, gamma=1.0)
    for which, op in ((1, pi1), (2, pi2)):
        assert np.max(np.abs(op(f, h).coeffs[0] - oracle_paraproduct(f, h, which))) <= 1e-12


def near_nyquist_pair(seed):
    g = Grid(2, 32)
    band = np.max(np.abs(g.k), axis=0) >= g.kmax - 1
    f = random_band_field(seed, g, gamma=0.0)
    h = random_band_field(seed + 1, g, gamma=0.0)
    return SpectralField(g, f.coeffs * band), SpectralField(g, h.coeffs * band)


@pytest.mark.parametrize("seed", [3, 4])
def test_near_nyquist_pair(seed):
    f, h = near_nyquist_pair(seed)
    assert bony_residual(f, h) <= 1e-12 * lebesgue_norm(f, np.inf) * lebesgue_norm(h, np.inf)
    assert np.max(np.abs(pi1(f, h).coeffs[0] - oracle_paraproduct(f, h, 1))) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([0.0, 1.0, 3.0]), st.booleans())
def test_bony_identity(seed, gamma, peaked):
    f = random_peaked_field(seed, G, gamma) if peaked else random_band_field(seed, G, gamma=gamma)
    h = random_band_field(seed + 1, G, gamma=1.0)
    assert bony_residual(f, h) <= 1e-12 * lebesgue_norm(f, np.inf) * lebesgue_norm(h, np.inf)


@settings(max_examples=10, deadline=None)
@given(seeds, st.floats(-4, 4))
def test_bilinearity(seed, alpha):
    f, f2, h = random_band_field(seed, G), random_band_field(seed + 1, G), random_band_field(seed + 2, G)
    for op in (pi1, pi2):
        lhs = op(f * alpha + f2, h)
        rhs = op(f, h) * alpha + op(f2, h)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-13 * (1 + abs(alpha))
        lhs = op(h, f * alpha + f2)
        rhs = op(h, f) * alpha + op(h, f2)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-13 * (1 + abs(alpha))


def test_summand_support():
    f, h = random_band_field(0, G, gamma=0.0), random_band_field(1, G, gamma=0.0)
    for which in (1, 2):
        for j, term in paraproduct_terms(f, h, which):
            # zero up to FFT roundoff relative to the summand
            outside = G.kabs > 2.0 ** (j + 2)
            assert np.max(np.abs(term.coeffs[0][outside]), initial=0.0) <= 1e-15 * np.max(np.abs(term.coeffs))


def continuity_ratio(grid, count, s1=0.3, s2=0.7):
    worst = 0.0
    for seed in range(count):
        f = random_band_field(seed, grid, gamma=grid.dim - s1)
        g = random_peaked_field(seed + 1, grid, grid.dim + s2)
        for op in (pi1, pi2):
            worst = max(worst, besov_norm(op(f, g), s2 - s1) / (besov_norm(f, -s1) * besov_norm(g, s2)))
    return worst


def test_continuity_ratio_stable_under_doubling():
    a = continuity_ratio(G, 20)
    b = continuity_ratio(Grid(2, 128), 20)
    assert np.isfinite(a) and np.isfinite(b)
    assert max(a / b, b / a) <= 4.0


def test_time_norm_ratio_stable_across_horizons():
    # time-dependent version: Chemin-Lerner norms of the paraproduct per node
    f0 = random_band_field(0, G, gamma=1.7)
    g0 = random_peaked_field(1, G, 2.7)
    ratios = []
    for T in (0.25, 0.5, 1.0):
        tg = TimeGrid.graded(T, 16)
        t = tg.times.reshape(-1, 1, 1, 1)
        u = TimeSeriesField(G, tg, np.exp(-t * G.ksq) * f0.coeffs[None])
        v = TimeSeriesField(G, tg, (1 + t) * g0.coeffs[None])
        prod = TimeSeriesField.from_snapshots([pi1(a, b) for a, b in zip(u.snapshots, v.snapshots)], tg)
        ratios.append(chemin_lerner_norm(prod, 2, 0.4) / (chemin_lerner_norm(u, np.inf, -0.3) * chemin_lerner_norm(v, 2, 0.7)))
    assert max(ratios) / min(ratios) <= 4.0


def test_grid_mismatch():
    with pytest.raises(ValueError):
        pi1(random_band_field(0, G), random_band_field(0, Grid(2, 32)))
