"""Periodic spectral substrate: grids, Fourier fields, vector calculus, Leray
projection and alias-free products on the torus [0, 2pi)^d.

Coefficients use the normalized convention

    f_hat(k) = mean_x f(x) exp(-i k.x),

so that Parseval reads ``mean |f|^2 == sum |f_hat|^2`` and constants have
``f_hat(0) == c`` regardless of the grid size.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "SpectralField",
    "make_grid",
    "to_physical",
    "from_physical",
    "gradient",
    "divergence",
    "laplacian",
    "leray_project",
    "dealiased_product",
    "tensor_product",
    "random_band_field",
    "random_peaked_field",
    "plane_wave",
    "hermitian_part",
    "hermitian_defect",
    "fft_workers",
    "padded_physical",
    "truncate_padded",
    "leray_symbol_apply",
]


def fft_workers() -> int:
    """Worker count for FFTs, capped by ``DYADIC_NS_THREADS`` (default 1)."""
    raw = os.environ.get("DYADIC_NS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n**dim`` points on the torus."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError(f"n not a power of two >= 16: {self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def kmax(self) -> int:
        return self.n // 3

    @property
    def axes(self) -> tuple[int, ...]:
        # trailing spatial axes of any coefficient array
        return tuple(range(-self.dim, 0))

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavevectors, shape ``(dim, n, ..., n)``, FFT index order."""
        k1 = sfft.fftfreq(self.n, 1.0 / self.n)
        return np.array(np.meshgrid(*([k1] * self.dim), indexing="ij"))

    @cached_property
    def ksq(self) -> np.ndarray:
        return np.sum(self.k**2, axis=0)

    @cached_property
    def kabs(self) -> np.ndarray:
        return np.sqrt(self.ksq)

    @cached_property
    def mask(self) -> np.ndarray:
        """True on admissible modes ``|k|_inf <= kmax``."""
        return np.all(np.abs(self.k) <= self.kmax, axis=0)

    @cached_property
    def x(self) -> np.ndarray:
        x1 = 2 * np.pi * np.arange(self.n) / self.n
        return np.array(np.meshgrid(*([x1] * self.dim), indexing="ij"))

    @cached_property
    def _pad_index(self):
        # source/destination index sets mapping admissible modes of the n-grid
        # into the 2n-grid used for alias-free products
        kk = np.arange(-self.kmax, self.kmax + 1)
        src = np.mod(kk, self.n)
        dst = np.mod(kk, 2 * self.n)
        return np.ix_(*([src] * self.dim)), np.ix_(*([dst] * self.dim))


def make_grid(dim: int, n: int) -> Grid:
    return Grid(dim, n)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Immutable field on a grid.

    ``coeffs`` has shape ``(components, n, ..., n)``. Vector fields carry
    ``dim`` components, tensors ``dim**2`` in row-major ``(k, i)`` order.
    ``real`` records whether the physical field is real-valued.
    """

    grid: Grid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == self.grid.dim:
            c = c[None]
        if c.shape[1:] != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c = np.where(self.grid.mask, c, 0)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    @property
    def kind(self) -> str:
        d = self.grid.dim
        return {1: "scalar", d: "vector", d * d: "tensor"}.get(self.components, "other")

    def component(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i : i + 1], self.real)

    @classmethod
    def zeros(cls, grid: Grid, components: int = 1) -> SpectralField:
        return cls(grid, np.zeros((components,) + grid.shape, dtype=complex))

    @classmethod
    def stack(cls, parts: list[SpectralField]) -> SpectralField:
        g = parts[0].grid
        return cls(g, np.concatenate([p.coeffs for p in parts]), all(p.real for p in parts))

    def _check(self, other: SpectralField):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        if other.components != self.components:
            raise ValueError("component count mismatch")

    def __add__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.real and other.real)

    def __mul__(self, c) -> SpectralField:
        return SpectralField(self.grid, self.coeffs * c, self.real and np.isrealobj(c))

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs, self.real)

    def __truediv__(self, c) -> SpectralField:
        return self * (1.0 / c)


def _ifft(coeffs: np.ndarray, grid_dim: int) -> np.ndarray:
    axes = tuple(range(-grid_dim, 0))
    n_pts = np.prod(coeffs.shape[-grid_dim:])
    return sfft.ifftn(coeffs, axes=axes, workers=fft_workers()) * n_pts


def _fft(samples: np.ndarray, grid_dim: int) -> np.ndarray:
    axes = tuple(range(-grid_dim, 0))
    n_pts = np.prod(samples.shape[-grid_dim:])
    return sfft.fftn(samples, axes=axes, workers=fft_workers()) / n_pts


def to_physical(f: SpectralField) -> np.ndarray:
    """Samples of ``f`` on the grid, shape ``(components, n, ..., n)``."""
    out = _ifft(f.coeffs, f.grid.dim)
    return out.real if f.real else out


def from_physical(samples: np.ndarray, grid: Grid) -> SpectralField:
    """Transform grid samples; modes above ``kmax`` are dropped."""
    samples = np.asarray(samples)
    if samples.shape == grid.shape:
        samples = samples[None]
    if samples.shape[1:] != grid.shape:
        raise ValueError(f"sample shape {samples.shape} does not match grid {grid.shape}")
    return SpectralField(grid, _fft(samples, grid.dim), real=np.isrealobj(samples))


def plane_wave(grid: Grid, k, amplitude: complex = 1.0) -> SpectralField:
    """Complex scalar mode ``amplitude * exp(i k.x)``."""
    c = np.zeros((1,) + grid.shape, dtype=complex)
    c[(0,) + tuple(int(ki) % grid.n for ki in k)] = amplitude
    return SpectralField(grid, c, real=False)


def _reflect(coeffs: np.ndarray, dim: int) -> np.ndarray:
    # a[..., -k] in FFT index order
    out = coeffs
    for ax in range(-dim, 0):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def hermitian_part(f: SpectralField) -> SpectralField:
    """Real part of the physical field: ``(f_hat(k) + conj f_hat(-k)) / 2``."""
    c = 0.5 * (f.coeffs + np.conj(_reflect(f.coeffs, f.grid.dim)))
    return SpectralField(f.grid, c, real=True)


def hermitian_defect(f: SpectralField) -> float:
    """Relative violation of ``f_hat(-k) == conj f_hat(k)``."""
    scale = np.max(np.abs(f.coeffs))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(f.coeffs - np.conj(_reflect(f.coeffs, f.grid.dim)))) / scale)


def gradient(f: SpectralField) -> SpectralField:
    if f.components != 1:
        raise ValueError("gradient expects a scalar field")
    return SpectralField(f.grid, 1j * f.grid.k * f.coeffs[0], f.real)


def divergence(v: SpectralField) -> SpectralField:
    if v.components != v.grid.dim:
        raise ValueError("divergence expects a vector field")
    return SpectralField(v.grid, np.sum(1j * v.grid.k * v.coeffs, axis=0), v.real)


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, -f.grid.ksq * f.coeffs, f.real)


def leray_symbol_apply(k: np.ndarray, ksq: np.ndarray, vhat: np.ndarray) -> np.ndarray:
    """``(I - k k^T / |k|^2) vhat`` per mode; the zero mode passes through.

    ``vhat`` may carry extra leading batch axes before the component axis.
    """
    safe = np.where(ksq == 0, 1.0, ksq)
    kdotv = np.sum(k * vhat, axis=-k.ndim)
    return vhat - k * np.expand_dims(kdotv / safe, -k.ndim)


def leray_project(v: SpectralField) -> SpectralField:
    if v.components != v.grid.dim:
        raise ValueError("leray_project expects a vector field")
    return SpectralField(v.grid, leray_symbol_apply(v.grid.k, v.grid.ksq, v.coeffs), v.real)


def padded_physical(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Physical samples on the 2n-grid of admissible coefficients.

    Leading axes of ``coeffs`` are kept as batch axes.
    """
    src, dst = grid._pad_index
    lead = coeffs.shape[: -grid.dim]
    big = np.zeros(lead + (2 * grid.n,) * grid.dim, dtype=complex)
    big[(Ellipsis,) + dst] = coeffs[(Ellipsis,) + src]
    return _ifft(big, grid.dim)


def truncate_padded(samples: np.ndarray, grid: Grid) -> np.ndarray:
    """Coefficients on the n-grid of a 2n-grid physical array, cut at kmax."""
    src, dst = grid._pad_index
    big = _fft(samples, grid.dim)
    lead = samples.shape[: -grid.dim]
    out = np.zeros(lead + grid.shape, dtype=complex)
    out[(Ellipsis,) + src] = big[(Ellipsis,) + dst]
    return out


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Exact truncated product of band-limited fields, componentwise.

    A scalar factor broadcasts against a multi-component one.
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    if f.components != g.components and 1 not in (f.components, g.components):
        raise ValueError("component count mismatch")
    pf = padded_physical(f.coeffs, f.grid)
    pg = padded_physical(g.coeffs, g.grid)
    return SpectralField(f.grid, truncate_padded(pf * pg, f.grid), f.real and g.real)


def tensor_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """``(u_k v_i)`` as a tensor with component index ``k * dim + i``."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    d = u.grid.dim
    if u.components != d or v.components != d:
        raise ValueError("tensor_product expects vector fields")
    pu = padded_physical(u.coeffs, u.grid)
    pv = padded_physical(v.coeffs, v.grid)
    prod = (pu[:, None] * pv[None, :]).reshape((d * d,) + pu.shape[1:])
    return SpectralField(u.grid, truncate_padded(prod, u.grid), u.real and v.real)


def random_band_field(
    seed: int,
    grid: Grid,
    components: int = 1,
    gamma: float = 1.0,
    divergence_free: bool = False,
    amplitude: float = 1.0,
) -> SpectralField:
    """Random real field with ``|f_hat(k)| = amplitude * (1 + |k|)**(-gamma)``.

    Phases are uniform; Hermitian pairing uses ``theta(k) - theta(-k)``, which
    stays uniform mod 2 pi.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=(components,) + grid.shape)
    phase = theta - _reflect(theta, grid.dim)
    coeffs = amplitude * (1.0 + grid.kabs) ** (-gamma) * np.exp(1j * phase)
    f = SpectralField(grid, coeffs, real=True)
    if divergence_free:
        f = leray_project(f)
    return f


def random_peaked_field(seed: int, grid: Grid, gamma: float = 1.0) -> SpectralField:
    """Random real scalar field whose modes all peak at one random point.

    Amplitudes are ``(1 + |k|)**(-gamma)`` times a uniform factor in
    ``[1/2, 3/2]``; phases are ``-k . x0``. Such fields nearly saturate
    sup-norm bounds that uniform random phases never approach.
    """
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, 2 * np.pi, grid.dim)
    amp = (1.0 + grid.kabs) ** (-gamma) * rng.uniform(0.5, 1.5, grid.shape)
    amp = 0.5 * (amp + _reflect(amp, grid.dim))
    phase = -np.tensordot(x0, grid.k, axes=(0, 0))
    return SpectralField(grid, (amp * np.exp(1j * phase))[None], real=True)
