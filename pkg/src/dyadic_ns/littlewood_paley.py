"""Dyadic Littlewood-Paley analysis on the torus.

The low-pass profile ``phi`` equals 1 on ``[0, 1/2]`` and 0 on ``[1, inf)``;
in between it falls along the normalized primitive of the bump
``exp(-1 / (y (1 - y)))``. The annular profile is ``psi(rho) = phi(rho / 2) - phi(rho)``,
supported in ``[1/2, 2]``.

``phi`` is read from a table of ``2**14`` samples through monotone cubic
(PCHIP) interpolation, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .spectral_core import Grid, SpectralField

TABLE_SIZE = 2**14


def _bump(y):
    with np.errstate(divide="ignore", over="ignore"):
        out = np.exp(-1.0 / (y * (1.0 - y)))
    return np.where((y > 0) & (y < 1), out, 0.0)


@dataclass(frozen=True)
class CutoffPair:
    """Tabulated ``phi`` on the transition band ``[1/2, 1]``."""

    rho: np.ndarray
    phi_table: np.ndarray

    @classmethod
    def build(cls, size: int = TABLE_SIZE) -> CutoffPair:
        y = np.linspace(0.0, 1.0, size)
        # 8-point Gauss-Legendre per table cell, then a cumulative sum
        xg, wg = np.polynomial.legendre.leggauss(8)
        a, b = y[:-1, None], y[1:, None]
        nodes = 0.5 * (b - a) * xg + 0.5 * (a + b)
        cells = 0.5 * (b - a)[:, 0] * (_bump(nodes) @ wg)
        prim = np.concatenate([[0.0], np.cumsum(cells)])
        prim /= prim[-1]
        return cls(rho=0.5 + 0.5 * y, phi_table=1.0 - prim)

    @property
    def _interp(self):
        interp = self.__dict__.get("_pchip")
        if interp is None:
            interp = PchipInterpolator(self.rho, self.phi_table)
            object.__setattr__(self, "_pchip", interp)
        return interp

    def phi(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        out = np.where(rho <= 0.5, 1.0, 0.0)
        band = (rho > 0.5) & (rho < 1.0)
        if np.any(band):
            out = np.where(band, self._interp(np.clip(rho, 0.5, 1.0)), out)
        return out

    def psi(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return self.phi(rho / 2) - self.phi(rho)

    def to_csv(self, path, samples: int = 1001, rho_max: float = 2.5) -> None:
        rho = np.linspace(0.0, rho_max, samples)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho", "phi", "psi"])
            for r, p, s in zip(rho, self.phi(rho), self.psi(rho)):
                w.writerow([repr(float(r)), repr(float(p)), repr(float(s))])


@lru_cache(maxsize=1)
def cutoffs() -> CutoffPair:
    return CutoffPair.build()


def top_block(grid: Grid) -> int:
    """Largest block index J with non-empty support on the admissible modes.

    ``S_{J+1}`` must be the identity on admissible fields, which needs
    ``2**J >= sqrt(dim) * kmax`` (the corner of the admissible cube).
    """
    return math.ceil(math.log2(math.sqrt(grid.dim) * grid.kmax))


@lru_cache(maxsize=16)
def _low_multipliers(grid: Grid) -> tuple[np.ndarray, ...]:
    cp = cutoffs()
    return tuple(cp.phi(grid.kabs / 2.0**j) for j in range(top_block(grid) + 2))


@lru_cache(maxsize=16)
def block_multipliers(grid: Grid) -> tuple[np.ndarray, ...]:
    """Multipliers of Delta_{-1}, Delta_0, ..., Delta_J (index shifted by one)."""
    low = _low_multipliers(grid)
    blocks = [low[0]] + [low[j + 1] - low[j] for j in range(top_block(grid) + 1)]
    for m in blocks:
        m.setflags(write=False)
    return tuple(blocks)


def low_multiplier(grid: Grid, j: int) -> np.ndarray:
    if not 0 <= j <= top_block(grid) + 1:
        raise ValueError(f"S_j index {j} outside [0, {top_block(grid) + 1}]")
    return _low_multipliers(grid)[j]


def block_multiplier(grid: Grid, j: int) -> np.ndarray:
    if not -1 <= j <= top_block(grid):
        raise ValueError(f"block index {j} outside [-1, {top_block(grid)}]")
    return block_multipliers(grid)[j + 1]


def lp_block(j: int, f: SpectralField) -> SpectralField:
    """Delta_j f (Delta_{-1} = S_0)."""
    return SpectralField(f.grid, block_multiplier(f.grid, j) * f.coeffs, f.real)


def lp_low(j: int, f: SpectralField) -> SpectralField:
    """S_j f."""
    return SpectralField(f.grid, low_multiplier(f.grid, j) * f.coeffs, f.real)


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    grid: Grid
    blocks: tuple[SpectralField, ...]

    @property
    def top(self) -> int:
        return len(self.blocks) - 2

    def block(self, j: int) -> SpectralField:
        return self.blocks[j + 1]

    def __iter__(self):
        return iter(zip(range(-1, self.top + 1), self.blocks))


def lp_decompose(f: SpectralField) -> DyadicDecomposition:
    ms = block_multipliers(f.grid)
    return DyadicDecomposition(f.grid, tuple(SpectralField(f.grid, m * f.coeffs, f.real) for m in ms))


def lp_reconstruct(dec: DyadicDecomposition) -> SpectralField:
    # ascending j for a reproducible summation order
    total = dec.blocks[0].coeffs.copy()
    for b in dec.blocks[1:]:
        total += b.coeffs
    return SpectralField(dec.grid, total, all(b.real for b in dec.blocks))
