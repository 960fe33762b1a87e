"""Empirical constants frozen from the first audited run of each suite.

Values apply only to the reference configuration below; other
configurations record their measurements without comparison.
"""

from __future__ import annotations

REFERENCE = {
    "dim": 2,
    "grid": 64,
    "seed": 0,
    "r": 0.6,
    "sigma": 0.8,
    "T": 0.5,
    "steps": 64,
    "tol": 1e-10,
    "ensemble": 100,
    "amp": 1e-2,
    "gamma": 3.0,
}

FROZEN: dict[tuple[str, str], float] = {
    ("bernstein", "bernstein-max"): 2.8262581945384517,
    ("heat_char", "ratio-min"): 0.711005094478896,
    ("heat_char", "ratio-max"): 1.641276043166397,
    ("heat_smoothing", "smoothing-constant"): 0.37892914162759955,
    ("oseen_map", "oseen-map-1-inf"): 0.3990777952140128,
    ("oseen_map", "oseen-map-2-2"): 0.6278383388844616,
    ("oseen_map", "bilinear-constant"): 0.19847271452553938,
    ("small_time", "decay-ratio-0"): 0.7967767774683033,
    ("small_time", "decay-ratio-1"): 0.7995367732261123,
    ("small_time", "decay-ratio-2"): 0.7955073741047273,
    ("gmo", "gmo-constant"): 1.7402950232821794,
    # measured maximum 2.6924 plus 5% headroom
    ("sup_interp", "threshold"): 2.83,
}


def lookup(suite: str, key: str, config: dict) -> float | None:
    if any(config.get(k) != v for k, v in REFERENCE.items()):
        return None
    return FROZEN.get((suite, key))
