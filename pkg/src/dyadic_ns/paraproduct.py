"""Modified two-term Bony paraproducts.

    pi1(f, g) = sum_{j >= -1} S_{j+1} f  Delta_j g
    pi2(f, g) = sum_{j >= 0}  S_j f      Delta_j g

so that ``f g = pi1(f, g) + pi2(g, f)``: pi1 collects the block pairs
``(a, b)`` with ``a <= b`` and pi2(g, f) the pairs with ``a > b``.

Every summand is an alias-free product; the sum over j is accumulated on the
padded grid in ascending j and transformed back once.
"""

from __future__ import annotations

import numpy as np

from .littlewood_paley import _low_multipliers, block_multipliers, top_block
from .norms import lebesgue_norm
from .spectral_core import SpectralField, dealiased_product, padded_physical, truncate_padded


def _check(f: SpectralField, g: SpectralField):
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    if f.components != g.components and 1 not in (f.components, g.components):
        raise ValueError("component count mismatch")


def _paraproduct(f: SpectralField, g: SpectralField, shift: int, j_start: int) -> SpectralField:
    _check(f, g)
    grid = f.grid
    low = _low_multipliers(grid)
    blocks = block_multipliers(grid)
    acc = None
    for j in range(j_start, top_block(grid) + 1):
        term = padded_physical(low[j + shift] * f.coeffs, grid) * padded_physical(blocks[j + 1] * g.coeffs, grid)
        acc = term if acc is None else acc + term
    return SpectralField(grid, truncate_padded(acc, grid), f.real and g.real)


def pi1(f: SpectralField, g: SpectralField) -> SpectralField:
    """Low-high paraproduct with ``S_{j+1} f`` against ``Delta_j g``, j >= -1."""
    return _paraproduct(f, g, shift=1, j_start=-1)


def pi2(f: SpectralField, g: SpectralField) -> SpectralField:
    """Strictly-low paraproduct with ``S_j f`` against ``Delta_j g``, j >= 0."""
    return _paraproduct(f, g, shift=0, j_start=0)


def paraproduct_terms(f: SpectralField, g: SpectralField, which: int = 1) -> list[tuple[int, SpectralField]]:
    """Individual summands ``(j, S_{j+1} f Delta_j g)`` (or ``S_j f`` for ``which=2``)."""
    _check(f, g)
    shift, start = (1, -1) if which == 1 else (0, 0)
    low = _low_multipliers(f.grid)
    out = []
    for j in range(start, top_block(f.grid) + 1):
        a = SpectralField(f.grid, low[j + shift] * f.coeffs, f.real)
        b = SpectralField(g.grid, block_multipliers(g.grid)[j + 1] * g.coeffs, g.real)
        out.append((j, dealiased_product(a, b)))
    return out


def bony_residual(f: SpectralField, g: SpectralField) -> float:
    """``||f g - pi1(f, g) - pi2(g, f)||_inf``."""
    r = dealiased_product(f, g) - pi1(f, g) - pi2(g, f)
    return lebesgue_norm(r, np.inf)
