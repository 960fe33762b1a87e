"""Heat semigroup, Oseen integral operator and related time integrals.

The Oseen operator

    L_oss(F)(t) = - int_0^t exp((t - s) Lap) P div F(s) ds

is evaluated per Fourier mode. Between consecutive time samples the
integrand ``G(s) = P(k) (i k . F_hat(s))`` is taken linear in ``s``, and the
product with ``exp(-(t - s)|k|^2)`` is integrated in closed form, so stiff
high modes cost nothing extra and linear-in-s data are integrated exactly.
"""

from __future__ import annotations

import numpy as np

from .norms import TimeGrid, TimeSeriesField
from .spectral_core import (
    Grid,
    SpectralField,
    _ifft,
    leray_symbol_apply,
    padded_physical,
    truncate_padded,
)

# -- phi-functions of exponential integrators ------------------------------------

_SERIES_CUT = 0.1
_SERIES_TERMS = 14


def phi_weights(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(p1, c2)`` with ``p1 = (1 - e^-z)/z`` and ``c2 = (1 - e^-z (1 + z))/z^2``.

    For an interval of length h and decay rate lam (z = lam h),
    ``int_0^h exp(-lam (h - s)) (a + (b - a) s / h) ds = h ((p1 - c2) b + c2 a)``.
    Small z uses the Taylor series to avoid cancellation.
    """
    z = np.asarray(z, dtype=float)
    small = z < _SERIES_CUT
    zs = np.where(small, z, 0.0)
    p1_s = np.zeros_like(zs)
    c2_s = np.zeros_like(zs)
    fact = 1.0
    for n in range(_SERIES_TERMS):
        # p1 = sum (-z)^n / (n+1)!,  c2 = sum (-z)^n (n+1) / (n+2)!
        fact *= n + 1  # (n+1)!
        term = (-zs) ** n
        p1_s += term / fact
        c2_s += term * (n + 1) / (fact * (n + 2))
    zl = np.where(small, 1.0, z)
    em = np.exp(-zl)
    p1_l = -np.expm1(-zl) / zl
    c2_l = (-np.expm1(-zl) - zl * em) / zl**2
    return np.where(small, p1_s, p1_l), np.where(small, c2_s, c2_l)


# -- heat ---------------------------------------------------------------------------


def heat_multiplier(grid: Grid, t: float) -> np.ndarray:
    return np.exp(-t * grid.ksq)


def heat_apply(f: SpectralField, t: float) -> SpectralField:
    if t < 0:
        raise ValueError("heat_apply needs t >= 0")
    return SpectralField(f.grid, heat_multiplier(f.grid, t) * f.coeffs, f.real)


def heat_trajectory(u0: SpectralField, timegrid: TimeGrid) -> TimeSeriesField:
    """``t -> exp(t Lap) u0`` sampled on every time of the grid."""
    g = u0.grid
    t = timegrid.times.reshape((-1, 1) + (1,) * g.dim)
    return TimeSeriesField(g, timegrid, np.exp(-t * g.ksq) * u0.coeffs[None], u0.real)


# -- Oseen ----------------------------------------------------------------------------


def projected_divergence(F_coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """``P (i k . F_hat)`` for tensors ``F_{k i}`` with leading batch axes.

    ``F_coeffs`` has shape ``(..., dim * dim, n, ..., n)``; the result is
    ``(..., dim, n, ..., n)`` with ``w_i = sum_k i k_k F_{k i}``.
    """
    d = grid.dim
    lead = F_coeffs.shape[: -d - 1]
    F = F_coeffs.reshape(lead + (d, d) + grid.shape)
    kk = grid.k.reshape((d, 1) + grid.shape)
    w = np.sum(1j * kk * F, axis=-d - 2)
    return leray_symbol_apply(grid.k, grid.ksq, w)


def duhamel_sweep(G: np.ndarray, grid: Grid, times: np.ndarray) -> np.ndarray:
    """``I(t_m) = int_0^{t_m} exp(-(t_m - s)|k|^2) G(s) ds`` for piecewise-linear G.

    ``G`` has shape ``(len(times), ...)``; one forward sweep with the
    recursion ``I_m = e^{-lam h} I_{m-1} + h ((p1 - c2) G_m + c2 G_{m-1})``.
    """
    lam = grid.ksq
    out = np.zeros_like(G)
    acc = np.zeros_like(G[0])
    for m in range(1, len(times)):
        h = times[m] - times[m - 1]
        z = lam * h
        p1, c2 = phi_weights(z)
        acc = np.exp(-z) * acc + h * ((p1 - c2) * G[m] + c2 * G[m - 1])
        out[m] = acc
    return out


def oseen_apply(F: TimeSeriesField) -> TimeSeriesField:
    """``L_oss(F)`` for a tensor-valued series ``F``; output is solenoidal."""
    g = F.grid
    if F.components != g.dim**2:
        raise ValueError("oseen_apply expects a tensor series")
    G = projected_divergence(F.coeffs, g)
    return TimeSeriesField(g, F.timegrid, -duhamel_sweep(G, g, F.timegrid.times), F.real)


def tensor_series(u: TimeSeriesField, v: TimeSeriesField) -> TimeSeriesField:
    """Per-node dealiased ``u_k v_i``."""
    u._check(v)
    g = u.grid
    d = g.dim
    if u.components != d or v.components != d:
        raise ValueError("expected vector series")
    out = np.empty((len(u.timegrid.times), d * d) + g.shape, dtype=complex)
    for m in range(len(u.timegrid.times)):
        pu = padded_physical(u.coeffs[m], g)
        pv = pu if v is u else padded_physical(v.coeffs[m], g)
        prod = (pu[:, None] * pv[None, :]).reshape((d * d,) + pu.shape[1:])
        out[m] = truncate_padded(prod, g)
    return TimeSeriesField(g, u.timegrid, out, u.real and v.real)


def bilinear_B(u: TimeSeriesField, v: TimeSeriesField) -> TimeSeriesField:
    """``B(u, v) = L_oss(u (x) v)``."""
    return oseen_apply(tensor_series(u, v))


# -- diagnostics ------------------------------------------------------------------------

_KERNEL_GRIDS = {2: 256, 3: 64}


def oseen_kernel_l1(t: float, dim: int = 2, n: int | None = None) -> float:
    """L^1 norm of the matrix kernel of ``exp(t Lap) P d/dx_1``.

    The operator is applied to a unit-mass delta at the origin and the
    pointwise spectral norm ``||K(x)||_{2->2}`` is integrated over the torus,
    matching the Euclidean magnitudes used for vector fields elsewhere.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    grid = Grid(dim, n or _KERNEL_GRIDS[dim])
    vol = (2 * np.pi) ** dim
    k, ksq = grid.k, grid.ksq
    safe = np.where(ksq == 0, 1.0, ksq)
    scalar = np.exp(-t * ksq) * 1j * k[0] / vol
    sym = np.stack([np.stack([((1.0 if i == j else 0.0) - k[i] * k[j] / safe) * scalar for j in range(dim)]) for i in range(dim)])
    K = _ifft(sym, dim).real  # (dim, dim, n, ..., n)
    K = np.moveaxis(K, (0, 1), (-2, -1))
    op = np.linalg.norm(K, ord=2, axis=(-2, -1))
    return float(vol * np.mean(op))


def _interp_with_origin(values: np.ndarray, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=float)
    if len(values) == len(times):
        return times, values
    if len(values) == len(times) - 1:
        # samples on (0, T]: extend linearly to s = 0
        t1, t2 = times[1], times[2]
        f0 = values[0] - (values[1] - values[0]) * t1 / (t2 - t1)
        return times, np.concatenate([[f0], values])
    raise ValueError("sample count does not match the time grid")


def singular_convolution_L(values, timegrid: TimeGrid, t: float, points: int = 64) -> float:
    """``int_0^t f(s) / (sqrt(t - s) sqrt(s)) ds`` for sampled ``f``.

    With ``s = t sin^2(theta)`` the weight becomes ``2 d theta``. The theta
    integral uses a composite 4-point Gauss-Legendre rule with ``points``
    nodes in total; panels are additionally split where ``f``'s linear
    interpolant has kinks, so each panel sees a smooth integrand.
    """
    m = timegrid.node_index(t)
    if m == 0:
        return 0.0
    times, f = _interp_with_origin(values, timegrid.times)
    t = times[m]
    panels = max(1, points // 4)
    edges = np.linspace(0.0, np.pi / 2, panels + 1)
    kinks = np.arcsin(np.sqrt(np.clip(times[1:m] / t, 0.0, 1.0)))
    edges = np.unique(np.concatenate([edges, kinks]))
    xg, wg = np.polynomial.legendre.leggauss(4)
    a, b = edges[:-1, None], edges[1:, None]
    theta = 0.5 * (b - a) * xg + 0.5 * (a + b)
    s = t * np.sin(theta) ** 2
    fs = np.interp(s.ravel(), times[: m + 1], f[: m + 1]).reshape(s.shape)
    return float(2.0 * np.sum(0.5 * (b - a)[:, 0] * (fs @ wg)))
