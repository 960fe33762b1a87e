"""Function-space norms on the torus and on time series of fields.

All spatial L^q norms use the normalized (averaged) measure, so a unimodular
plane wave has norm 1 for every q and constants are grid-independent.
Vector and tensor fields are measured through their pointwise Euclidean
(Frobenius) magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .littlewood_paley import block_multipliers, top_block
from .spectral_core import Grid, SpectralField, _ifft, fft_workers


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Time samples ``0 = t_0 < t_1 < ... < t_M = T``.

    The nodes proper are ``t_1..t_M``; ``t_0 = 0`` is kept so that
    trajectories carry their initial value and quadratures cover ``[0, T]``.
    """

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @classmethod
    def graded(cls, T: float, M: int) -> TimeGrid:
        """Nodes ``t_m = T (m / M)**2`` clustered toward 0."""
        if T <= 0 or M < 1:
            raise ValueError("need T > 0 and M >= 1")
        m = np.arange(M + 1)
        t = T * (m / M) ** 2
        t[-1] = T
        return cls(t)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def M(self) -> int:
        return len(self.times) - 1

    @property
    def nodes(self) -> np.ndarray:
        return self.times[1:]

    @property
    def floor(self) -> float:
        """First positive node; the effective t -> 0 probe."""
        return float(self.times[1])

    @cached_property
    def weights(self) -> np.ndarray:
        """Composite trapezoid weights on ``times`` (sum to T)."""
        h = np.diff(self.times)
        w = np.zeros_like(self.times)
        w[:-1] += h / 2
        w[1:] += h / 2
        return w

    def node_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise ValueError(f"t = {t} is not a node of the time grid")
        return i

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and np.array_equal(self.times, other.times)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TimeSeriesField:
    """Snapshots of a field at every time of a TimeGrid (including t = 0).

    ``coeffs`` has shape ``(M + 1, components, n, ..., n)``.
    """

    grid: Grid
    timegrid: TimeGrid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        want = (len(self.timegrid.times),)
        if c.shape[:1] != want or c.shape[2:] != self.grid.shape:
            raise ValueError(f"series shape {c.shape} incompatible with grids")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_snapshots(cls, snapshots, timegrid: TimeGrid) -> TimeSeriesField:
        snaps = list(snapshots)
        return cls(snaps[0].grid, timegrid, np.stack([s.coeffs for s in snaps]), all(s.real for s in snaps))

    @classmethod
    def constant(cls, f: SpectralField, timegrid: TimeGrid) -> TimeSeriesField:
        c = np.broadcast_to(f.coeffs, (len(timegrid.times),) + f.coeffs.shape)
        return cls(f.grid, timegrid, c.copy(), f.real)

    @classmethod
    def zeros(cls, grid: Grid, timegrid: TimeGrid, components: int) -> TimeSeriesField:
        return cls(grid, timegrid, np.zeros((len(timegrid.times), components) + grid.shape, dtype=complex))

    @property
    def components(self) -> int:
        return self.coeffs.shape[1]

    def snapshot(self, m: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[m], self.real)

    @property
    def snapshots(self) -> list[SpectralField]:
        return [self.snapshot(m) for m in range(len(self.timegrid.times))]

    @property
    def final(self) -> SpectralField:
        return self.snapshot(-1)

    def _check(self, other: TimeSeriesField):
        if other.grid != self.grid or other.timegrid != self.timegrid:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        self._check(other)
        return TimeSeriesField(self.grid, self.timegrid, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other):
        self._check(other)
        return TimeSeriesField(self.grid, self.timegrid, self.coeffs - other.coeffs, self.real and other.real)

    def __mul__(self, c):
        return TimeSeriesField(self.grid, self.timegrid, self.coeffs * c, self.real and np.isrealobj(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True)
class BesovParams:
    s: float
    q: float = np.inf

    def __post_init__(self):
        if not 1 <= self.q <= np.inf:
            raise ValueError("q must lie in [1, inf]")


# -- batched kernels ---------------------------------------------------------


def _magnitude(samples: np.ndarray, comp_axis: int) -> np.ndarray:
    if samples.shape[comp_axis] == 1:
        return np.abs(np.take(samples, 0, axis=comp_axis))
    return np.sqrt(np.sum(np.abs(samples) ** 2, axis=comp_axis))


def _lq_of_samples(mag: np.ndarray, q: float, dim: int) -> np.ndarray:
    axes = tuple(range(-dim, 0))
    if q == np.inf:
        return np.max(mag, axis=axes)
    if q == 2:
        return np.sqrt(np.mean(mag**2, axis=axes))
    return np.mean(mag**q, axis=axes) ** (1.0 / q)


def lq_batch(coeffs: np.ndarray, q: float, dim: int) -> np.ndarray:
    """L^q norm of every field in a batch ``(..., components, n, ..., n)``."""
    samples = _ifft(coeffs, dim)
    return _lq_of_samples(_magnitude(samples, -dim - 1), q, dim)


def block_lq_batch(coeffs: np.ndarray, grid: Grid, q: float) -> np.ndarray:
    """``||Delta_j f||_q`` for j = -1..J; result has shape ``(J + 2, ...)``."""
    return np.stack([lq_batch(m * coeffs, q, grid.dim) for m in block_multipliers(grid)])


def _check_q(q):
    if q < 1:
        raise ValueError("q must be >= 1")


def _block_weights(grid: Grid, s: float) -> np.ndarray:
    j = np.arange(-1, top_block(grid) + 1)
    return 2.0 ** (j * s)


# -- single-field norms --------------------------------------------------------


def lebesgue_norm(f: SpectralField, q: float) -> float:
    _check_q(q)
    return float(lq_batch(f.coeffs, q, f.grid.dim))


def sobolev_norm(f: SpectralField, s: float) -> float:
    w = (1.0 + f.grid.ksq) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.coeffs) ** 2)))


def besov_norm(f: SpectralField, s: float, q: float = np.inf) -> float:
    """``sup_{j >= -1} 2**(j s) ||Delta_j f||_q``."""
    _check_q(q)
    blocks = block_lq_batch(f.coeffs, f.grid, q)
    return float(np.max(_block_weights(f.grid, s) * blocks))


def besov_blocks(f: SpectralField, q: float = np.inf) -> np.ndarray:
    """Block norms ``||Delta_j f||_q`` for j = -1..J."""
    return block_lq_batch(f.coeffs, f.grid, q)


def theta_samples(grid: Grid, delta: float, n_theta: int) -> np.ndarray:
    """Geometric samples of ``(delta 2**(-2J - 2), delta]``.

    Below the floor the heat multiplier is within ``1 - O(2**-2)`` of the
    identity on every admissible mode, so smaller theta adds nothing.
    """
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    lo = delta * 2.0 ** (-2 * top_block(grid) - 2)
    return np.geomspace(lo, delta, n_theta)


def heat_char_norm(f: SpectralField, s: float, q: float = np.inf, delta: float = 1.0, n_theta: int = 64) -> float:
    """``sup_{0 < theta < delta} theta**(s/2) ||exp(theta Lap) f||_q`` on samples."""
    if s <= 0:
        raise ValueError("heat characterization needs s > 0")
    _check_q(q)
    theta = theta_samples(f.grid, delta, n_theta)
    mult = np.exp(-theta.reshape((-1, 1) + (1,) * f.grid.dim) * f.grid.ksq)
    vals = lq_batch(mult * f.coeffs[None], q, f.grid.dim)
    return float(np.max(theta ** (s / 2) * vals))


def uloc_norm(f: SpectralField, p: float, R: float, refine: int = 1) -> float:
    """Sup over a center lattice of the per-ball averaged L^p norm.

    Centers sit on grid points spaced about ``R / (2 refine)`` apart; balls use
    the periodic distance. Ball averages come from one FFT convolution of
    ``|f|**p`` with the ball indicator.
    """
    if not 0 < R <= np.pi:
        raise ValueError("R must lie in (0, pi]")
    _check_q(p)
    g = f.grid
    mag = _magnitude(_ifft(f.coeffs, g.dim), 0)
    dx = 2 * np.pi / g.n
    xs = np.minimum(g.x, 2 * np.pi - g.x)
    ball = (np.sum(xs**2, axis=0) <= R**2).astype(float)
    count = ball.sum()
    axes = tuple(range(g.dim))
    if p == np.inf:
        raise ValueError("uloc_norm needs finite p")
    conv = sfft.ifftn(sfft.fftn(mag**p, axes=axes) * np.conj(sfft.fftn(ball, axes=axes)), axes=axes, workers=fft_workers()).real
    step = max(1, int(round(R / (2 * refine) / dx)))
    centers = conv[tuple(slice(0, None, step) for _ in axes)]
    return float(np.max(np.maximum(centers, 0.0) / count) ** (1.0 / p))


# -- time-series norms -----------------------------------------------------------


def lebesgue_series(v: TimeSeriesField, q: float) -> np.ndarray:
    """``||v(t)||_q`` at every stored time."""
    _check_q(q)
    return lq_batch(v.coeffs, q, v.grid.dim)


def besov_series(v: TimeSeriesField, s: float, q: float = np.inf) -> np.ndarray:
    """``||v(t)||_{B_q^{s,inf}}`` at every stored time."""
    blocks = block_lq_batch(v.coeffs, v.grid, q)
    return np.max(_block_weights(v.grid, s)[:, None] * blocks, axis=0)


def time_lp(values: np.ndarray, timegrid: TimeGrid, p: float) -> np.ndarray:
    """Trapezoid L^p over ``[0, T]`` along the first axis of ``values``."""
    if p == np.inf:
        return np.max(values, axis=0)
    w = timegrid.weights.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.sum(w * values**p, axis=0) ** (1.0 / p)


def chemin_lerner_norm(v: TimeSeriesField, p: float, s: float, q: float = np.inf) -> float:
    """``sup_j 2**(j s) || ||Delta_j v(t)||_q ||_{L^p(0, T)}``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    blocks = block_lq_batch(v.coeffs, v.grid, q)  # (J + 2, M + 1)
    per_block = time_lp(blocks.T, v.timegrid, p)
    return float(np.max(_block_weights(v.grid, s) * per_block))


def weighted_sup_norm(v: TimeSeriesField, mu: float) -> float:
    """``max_m t_m**(mu/2) ||v(t_m)||_inf`` over the positive nodes."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    sup = lq_batch(v.coeffs[1:], np.inf, v.grid.dim)
    return float(np.max(v.timegrid.nodes ** (mu / 2) * sup))
