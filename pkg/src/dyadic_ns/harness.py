"""Named verification suites with JSON/CSV reports.

Each suite runs library invariants at a configured scale and records one
assertion per checked property. Empirical constants are compared with the
frozen values in :mod:`dyadic_ns.baselines`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import baselines
from .heat_oseen import bilinear_B, heat_apply, heat_trajectory, oseen_apply, oseen_kernel_l1, singular_convolution_L
from .littlewood_paley import block_multipliers, lp_decompose, lp_reconstruct
from .mild_solver import (
    NonContraction,
    SolverConfig,
    blowup_monitor,
    bootstrap_check,
    energy_ledger,
    picard_solve,
    small_time_monitor,
    step_integrator_oracle,
    synthetic_blowup_series,
)
from .norms import (
    TimeGrid,
    TimeSeriesField,
    besov_blocks,
    besov_norm,
    chemin_lerner_norm,
    heat_char_norm,
    lebesgue_norm,
    lebesgue_series,
    sobolev_norm,
    weighted_sup_norm,
)
from .paraproduct import bony_residual
from .spectral_core import (
    Grid,
    SpectralField,
    divergence,
    from_physical,
    leray_project,
    random_band_field,
    random_peaked_field,
)


class ConfigError(ValueError):
    """Invalid harness configuration (CLI exit code 2)."""


class UnknownSuite(KeyError):
    pass


@dataclass(frozen=True)
class HarnessConfig:
    dim: int = 2
    grid: int | None = None
    seed: int = 0
    r: float = 0.6
    sigma: float = 0.8
    T: float = 0.5
    steps: int = 64
    tol: float = 1e-10
    ensemble: int = 100
    amp: float = 1e-2
    gamma: float = 3.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError("dim must be 2 or 3")
        if self.grid is None:
            object.__setattr__(self, "grid", 64 if self.dim == 2 else 32)
        n = self.grid
        if n < 16 or n & (n - 1):
            raise ConfigError("grid must be a power of two >= 16")
        if not 0 < self.r < self.sigma < 1:
            raise ConfigError("need 0 < r < sigma < 1")
        if self.T <= 0 or self.steps < 2 or self.tol <= 0 or self.ensemble < 1 or self.amp <= 0:
            raise ConfigError("T, steps, tol, ensemble and amp must be positive (steps >= 2)")

    @classmethod
    def from_mapping(cls, data: dict) -> HarnessConfig:
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, raw in data.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kind = int if str(types[key]).startswith("int") else float
            try:
                kw[key] = kind(str(raw))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kw)

    def solver(self, T: float | None = None, steps: int | None = None, tol: float | None = None) -> SolverConfig:
        return SolverConfig(
            Grid(self.dim, self.grid),
            TimeGrid.graded(T or self.T, steps or self.steps),
            r=self.r,
            sigma=self.sigma,
            tol=tol or self.tol,
        )


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


# -- reports ------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


@dataclass
class Assertion:
    id: str
    anchor: str
    status: str
    measured: object
    tolerance: object


@dataclass
class SuiteReport:
    suite: str
    config: dict
    assertions: list[Assertion] = field(default_factory=list)
    series: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.status != "fail" for a in self.assertions)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def check(self, id: str, anchor: str, ok: bool, measured, tolerance) -> bool:
        self.assertions.append(Assertion(id, anchor, "pass" if ok else "fail", _jsonable(measured), _jsonable(tolerance)))
        return bool(ok)

    def record(self, id: str, anchor: str, measured) -> None:
        self.assertions.append(Assertion(id, anchor, "recorded", _jsonable(measured), None))

    def against_baseline(self, id: str, anchor: str, measured: float, factor: float = 2.0) -> bool:
        """Compare with the frozen value (within ``factor`` either way)."""
        frozen = baselines.lookup(self.suite, id, self.config)
        if frozen is None:
            self.record(id, anchor, measured)
            return True
        ok = bool(np.isfinite(measured)) and frozen / factor <= measured <= frozen * factor
        return self.check(id, anchor, ok, measured, {"frozen": frozen, "factor": factor})

    def to_dict(self, wall_time: bool = True) -> dict:
        d = {
            "suite": self.suite,
            "config": _jsonable(self.config),
            "passed": self.passed,
            "assertions": [asdict(a) for a in self.assertions],
        }
        if self.series:
            d["series"] = _jsonable(self.series)
        if wall_time:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(wall_time), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "id", "anchor", "status", "measured", "tolerance"])
        for a in self.assertions:
            w.writerow([self.suite, a.id, a.anchor, a.status, json.dumps(a.measured, sort_keys=True), json.dumps(a.tolerance, sort_keys=True)])
        return buf.getvalue()

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = sorted(self.series)
        w.writerow(names)
        rows = max((len(self.series[k]) for k in names), default=0)
        for i in range(rows):
            w.writerow([repr(float(self.series[k][i])) if i < len(self.series[k]) else "" for k in names])
        return buf.getvalue()


# -- shared inputs -------------------------------------------------------------------

_GAMMAS = (0.5, 1.0, 1.5, 2.0, 3.0)


def ensemble_field(seed: int, grid: Grid) -> SpectralField:
    """Mixed scalar ensemble: uniform random phases for even seeds, peaked fields for odd."""
    gamma = _GAMMAS[(seed // 2) % len(_GAMMAS)]
    if seed % 2:
        return random_peaked_field(seed, grid, gamma)
    return random_band_field(seed, grid, gamma=gamma)


def small_data(seed: int, grid: Grid, gamma: float = 3.0, amp: float = 1e-2) -> SpectralField:
    """Divergence-free random data scaled to sup norm ``amp``."""
    u = random_band_field(seed, grid, components=grid.dim, gamma=gamma, divergence_free=True)
    return u * (amp / lebesgue_norm(u, np.inf))


def rough_data(seed: int, grid: Grid, r: float, size: float = 0.1) -> SpectralField:
    """Divergence-free data with spectrum ``(1 + |k|)**(r - d)``, scaled to ``||u0||_{B^{-r}} = size``."""
    u = random_band_field(seed, grid, components=grid.dim, gamma=grid.dim - r, divergence_free=True)
    return u * (size / besov_norm(u, -r, np.inf))


def taylor_green(grid: Grid) -> SpectralField:
    x = grid.x
    if grid.dim == 2:
        u = np.stack([np.cos(x[0]) * np.sin(x[1]), -np.sin(x[0]) * np.cos(x[1])])
    else:
        u = np.stack([np.cos(x[0]) * np.sin(x[1]), -np.sin(x[0]) * np.cos(x[1]), np.zeros_like(x[0])])
    return from_physical(u, grid)


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    den = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / den) if den > 0 else float(np.linalg.norm(a - b))


def _grid(cfg: HarnessConfig, scale: int = 1) -> Grid:
    return Grid(cfg.dim, cfg.grid * scale)


# -- suites -----------------------------------------------------------------------------


def _suite_partition(cfg: HarnessConfig, rep: SuiteReport):
    g = _grid(cfg)
    ms = block_multipliers(g)
    total = np.sum(ms, axis=0)
    rep.check("partition-of-unity", "cutoff-partition", np.max(np.abs(total - 1.0)[g.mask]) <= 1e-15,
              float(np.max(np.abs(total - 1.0)[g.mask])), 1e-15)
    overlap = max(float(np.max(np.abs(ms[i] * ms[j]))) for i in range(len(ms)) for j in range(i + 2, len(ms)))
    rep.check("block-overlap", "cutoff-partition", overlap == 0.0, overlap, 0.0)
    worst = 0.0
    for s in range(cfg.seed, cfg.seed + cfg.ensemble):
        f = ensemble_field(s, g)
        err = lebesgue_norm(f - lp_reconstruct(lp_decompose(f)), np.inf) / lebesgue_norm(f, np.inf)
        worst = max(worst, err)
    rep.check("reconstruction", "cutoff-partition", worst <= 1e-12, worst, 1e-12)


def _nyquist_pair(seed: int) -> tuple[SpectralField, SpectralField]:
    # random pair living only in the top admissible shell of an n = 32 grid
    g = Grid(2, 32)
    band = (np.max(np.abs(g.k), axis=0) >= g.kmax - 1)
    f = random_band_field(seed, g, gamma=0.0)
    h = random_band_field(seed + 7919, g, gamma=0.0)
    return SpectralField(g, f.coeffs * band), SpectralField(g, h.coeffs * band)


def _suite_bony(cfg: HarnessConfig, rep: SuiteReport):
    g = _grid(cfg)
    worst = 0.0
    worst_nyq = 0.0
    for s in range(cfg.seed, cfg.seed + cfg.ensemble):
        if s % 5 == 4:
            f, h = _nyquist_pair(s)
        else:
            f, h = ensemble_field(s, g), ensemble_field(s + 104729, g)
        scale = lebesgue_norm(f, np.inf) * lebesgue_norm(h, np.inf)
        res = bony_residual(f, h) / scale
        worst = max(worst, res)
        if s % 5 == 4:
            worst_nyq = max(worst_nyq, res)
    rep.check("bony-identity", "bony-identity", worst <= 1e-12, worst, 1e-12)
    rep.check("bony-identity-near-nyquist", "bony-identity", worst_nyq <= 1e-12, worst_nyq, 1e-12)


def bernstein_constants(cfg: HarnessConfig, grid: Grid | None = None, q: float = 2.0, m: float = np.inf) -> np.ndarray:
    """``||Delta_j f||_m / (2**(j d (1/q - 1/m)) ||Delta_j f||_q)`` per seed and block.

    Blocks j = 0..floor(log2 kmax): beyond that the grid cuts the annulus.
    Peaked fields are used because the constant is a supremum over fields.
    """
    g = grid or _grid(cfg)
    top = int(math.floor(math.log2(g.kmax)))
    j = np.arange(0, top + 1)
    expo = g.dim * (1.0 / q - (0.0 if m == np.inf else 1.0 / m))
    rows = []
    for s in range(cfg.seed, cfg.seed + cfg.ensemble):
        f = random_peaked_field(s, g, _GAMMAS[s % len(_GAMMAS)])
        bq = besov_blocks(f, q)[1 : top + 2]
        bm = besov_blocks(f, m)[1 : top + 2]
        rows.append(bm / (2.0 ** (j * expo) * bq))
    return np.array(rows)


def _suite_bernstein(cfg: HarnessConfig, rep: SuiteReport):
    c = bernstein_constants(cfg)
    spread = float(c.max() / c.min())
    rep.check("bernstein-spread", "bernstein-inequality", spread <= 4.0, {"spread": spread, "max": c.max(), "min": c.min()}, 4.0)
    rep.against_baseline("bernstein-max", "bernstein-inequality", float(c.max()))


def heat_char_ratios(cfg: HarnessConfig, scale: int = 1) -> np.ndarray:
    g = _grid(cfg, scale)
    s = cfg.r
    out = []
    for seed in range(cfg.seed, cfg.seed + cfg.ensemble):
        f = ensemble_field(seed, g)
        out.append(heat_char_norm(f, s, np.inf, 1.0) / besov_norm(f, -s, np.inf))
    return np.array(out)


def _suite_heat_char(cfg: HarnessConfig, rep: SuiteReport):
    a = heat_char_ratios(cfg)
    b = heat_char_ratios(cfg, 2)
    spread = float(a.max() / a.min())
    rep.check("ratio-spread", "heat-characterization", spread <= 50.0, {"min": a.min(), "max": a.max(), "spread": spread}, 50.0)
    drift = max(b.max() / a.max(), a.max() / b.max(), b.min() / a.min(), a.min() / b.min())
    rep.check("grid-doubling", "heat-characterization", drift <= 2.0, {"fine_min": b.min(), "fine_max": b.max(), "drift": drift}, 2.0)
    f = ensemble_field(cfg.seed, _grid(cfg))
    r1 = heat_char_norm(f, cfg.r) / besov_norm(f, -cfg.r)
    r2 = heat_char_norm(f * 3.7, cfg.r) / besov_norm(f * 3.7, -cfg.r)
    rep.check("scale-invariance", "heat-characterization", abs(r1 - r2) <= 1e-12 * r1, abs(r1 - r2) / r1, 1e-12)
    rep.against_baseline("ratio-min", "heat-characterization", float(a.min()))
    rep.against_baseline("ratio-max", "heat-characterization", float(a.max()))


def smoothing_constant(cfg: HarnessConfig, scale: int = 1, count: int = 20) -> float:
    g = _grid(cfg, scale)
    s1, s2 = -cfg.r, cfg.sigma
    ts = np.geomspace(1e-4, 1.0, 33)
    worst = 0.0
    for seed in range(cfg.seed, cfg.seed + count):
        f = ensemble_field(seed, g)
        base = besov_norm(f, s1)
        worst = max(worst, max(t ** ((s2 - s1) / 2) * besov_norm(heat_apply(f, t), s2) / base for t in ts))
    return worst


def _suite_heat_smoothing(cfg: HarnessConfig, rep: SuiteReport):
    a = smoothing_constant(cfg)
    b = smoothing_constant(cfg, 2)
    drift = max(a / b, b / a)
    rep.check("smoothing-finite", "heat-smoothing", np.isfinite(a) and a > 0, a, "finite")
    rep.check("grid-doubling", "heat-smoothing", drift <= 2.0, {"coarse": a, "fine": b, "drift": drift}, 2.0)
    rep.against_baseline("smoothing-constant", "heat-smoothing", a)


def _random_tensor_series(seed: int, grid: Grid, tg: TimeGrid) -> TimeSeriesField:
    d = grid.dim
    a = random_band_field(seed, grid, components=d * d, gamma=1.0)
    b = random_band_field(seed + 1, grid, components=d * d, gamma=1.0)
    t = tg.times.reshape((-1, 1) + (1,) * d)
    return TimeSeriesField(grid, tg, a.coeffs[None] + t * b.coeffs[None])


def oseen_map_ratios(cfg: HarnessConfig, T: float, count: int = 8) -> dict:
    g = _grid(cfg)
    tg = TimeGrid.graded(T, cfg.steps)
    s = cfg.sigma - 1.0
    out = {}
    for p1, p2 in ((1.0, np.inf), (2.0, 2.0)):
        s2 = s + 1 - 2 * (1 / p1 - 1 / p2)
        worst = 0.0
        for seed in range(cfg.seed, cfg.seed + count):
            F = _random_tensor_series(2 * seed, g, tg)
            worst = max(worst, chemin_lerner_norm(oseen_apply(F), p2, s2) / chemin_lerner_norm(F, p1, s))
        out[f"{int(p1)}-{'inf' if p2 == np.inf else int(p2)}"] = worst
    return out


def bilinear_constant(cfg: HarnessConfig, T: float, count: int = 5) -> float:
    g = _grid(cfg)
    tg = TimeGrid.graded(T, cfg.steps)
    worst = 0.0
    for seed in range(cfg.seed, cfg.seed + count):
        u = heat_trajectory(rough_data(seed, g, cfg.r, 1.0), tg)
        v = heat_trajectory(rough_data(seed + 50, g, cfg.r, 1.0), tg)
        worst = max(worst, weighted_sup_norm(bilinear_B(u, v), cfg.r) / (weighted_sup_norm(u, 1.0) * weighted_sup_norm(v, cfg.r)))
    return worst


def _suite_oseen_map(cfg: HarnessConfig, rep: SuiteReport):
    full = oseen_map_ratios(cfg, cfg.T)
    half = oseen_map_ratios(cfg, cfg.T / 2)
    for key in full:
        ok = np.isfinite(full[key]) and half[key] <= 2.0 * full[key]
        rep.check(f"oseen-map-{key}", "oseen-mapping", ok, {"T": full[key], "T/2": half[key]}, "finite; T/2 <= 2 x T")
        rep.against_baseline(f"oseen-map-{key}", "oseen-mapping", full[key])
    b1, b2 = bilinear_constant(cfg, cfg.T), bilinear_constant(cfg, cfg.T / 2)
    drift = max(b1 / b2, b2 / b1)
    rep.check("bilinear-continuity", "bilinear-continuity", drift <= 2.0, {"T": b1, "T/2": b2, "drift": drift}, 2.0)
    rep.against_baseline("bilinear-constant", "bilinear-continuity", b1)


KERNEL_TIMES = 2.0 ** -np.arange(2, 9)


def kernel_slope(dim: int = 2, n: int | None = None) -> tuple[float, np.ndarray]:
    vals = np.array([oseen_kernel_l1(t, dim, n) for t in KERNEL_TIMES])
    slope = float(np.polyfit(np.log(KERNEL_TIMES), np.log(vals), 1)[0])
    return slope, vals


def _suite_kernel_scaling(cfg: HarnessConfig, rep: SuiteReport):
    slope, vals = kernel_slope(2, 256)
    rep.check("slope", "oseen-kernel-scaling", abs(slope + 0.5) <= 0.05, slope, {"target": -0.5, "abs": 0.05})
    rep.check("monotone", "oseen-kernel-scaling", bool(np.all(np.diff(vals) > 0)), vals.tolist(), "decreasing in t")
    rep.record("value-t10", "oseen-kernel-scaling", oseen_kernel_l1(10.0, 2, 256))
    rep.series = {"t": KERNEL_TIMES.tolist(), "l1": vals.tolist()}


def _smooth_samples(seed: int, times: np.ndarray) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=4)
    return a[0] + a[1] * np.cos(3 * times + a[2]) + 0.5 * np.exp(-a[3] ** 2 * times)


def _suite_singular_L(cfg: HarnessConfig, rep: SuiteReport):
    tg = TimeGrid.graded(cfg.T, cfg.steps)
    ones = np.ones(len(tg.times))
    err1 = max(abs(singular_convolution_L(ones, tg, t) - np.pi) for t in tg.nodes)
    rep.check("constant-maps-to-pi", "singular-convolution", err1 <= 1e-10, err1, 1e-10)
    # linear interpolation of sqrt(s) on [0, t_1] is crude, so early nodes are only recorded
    sq = np.sqrt(tg.times)
    rel = np.array([abs(singular_convolution_L(sq, tg, t) / (2 * np.sqrt(t)) - 1) for t in tg.nodes])
    rep.check("sqrt-maps-to-2sqrt", "singular-convolution", rel[-1] <= 1e-3, float(rel[-1]), 1e-3)
    rep.record("sqrt-worst-node", "singular-convolution", {"rel": float(rel.max()), "t": float(tg.nodes[np.argmax(rel)])})
    worst = 0.0
    for seed in range(cfg.seed, cfg.seed + 10):
        f = _smooth_samples(seed, tg.times)
        for t in tg.nodes[:: max(1, tg.M // 8)]:
            ref = singular_convolution_L(f, tg, t, points=640)
            worst = max(worst, abs(singular_convolution_L(f, tg, t) - ref) / max(abs(ref), 1e-300))
    rep.check("refined-oracle", "singular-convolution", worst <= 1e-6, worst, 1e-6)


def _sup_node_error(u: TimeSeriesField, exact: np.ndarray) -> float:
    diff = TimeSeriesField(u.grid, u.timegrid, u.coeffs - exact)
    return float(np.max(lebesgue_series(diff, np.inf)[1:]))


def _suite_picard(cfg: HarnessConfig, rep: SuiteReport):
    sc = cfg.solver()
    g = sc.grid
    u0 = taylor_green(g)
    u, tr = picard_solve(u0, sc)
    exact = np.exp(-2 * sc.timegrid.times).reshape((-1, 1) + (1,) * g.dim) * u0.coeffs[None]
    err = _sup_node_error(u, exact)
    rep.check("taylor-green", "mild-solution-limit", err <= 1e-8, err, 1e-8)
    worst_rel, worst_res, worst_div = 0.0, 0.0, 0.0
    for seed in range(cfg.seed, cfg.seed + 5):
        v0 = small_data(seed, g, cfg.gamma, cfg.amp)
        u, tr = picard_solve(v0, sc)
        ref = step_integrator_oracle(v0, sc)
        worst_rel = max(worst_rel, _rel_l2(u.coeffs[-1], ref.coeffs[-1]))
        worst_res = max(worst_res, tr.residual)
        for m in range(len(sc.timegrid.times)):
            snap = u.snapshot(m)
            worst_div = max(worst_div, lebesgue_norm(divergence(snap), np.inf) / max(lebesgue_norm(snap, np.inf), 1e-300))
    rep.check("oracle-agreement", "mild-solution-limit", worst_rel <= 1e-6, worst_rel, 1e-6)
    rep.check("residual", "mild-solution-limit", worst_res <= 2 * sc.tol, worst_res, 2 * sc.tol)
    rep.check("divergence-free", "mild-solution-limit", worst_div <= 1e-10, worst_div, 1e-10)
    rep.record("t-floor", "mild-solution-limit", sc.timegrid.floor)


def small_time_ratios(cfg: HarnessConfig, seed: int | None = None):
    sc = cfg.solver()
    u0 = rough_data(cfg.seed if seed is None else seed, sc.grid, cfg.r)
    u, _ = picard_solve(u0, sc)
    T = sc.timegrid.T
    deltas = [T, T / 2, T / 4, T / 8]
    rep = small_time_monitor(u, cfg.r, cfg.sigma, deltas)
    return rep, u


def _suite_small_time(cfg: HarnessConfig, rep: SuiteReport):
    mon, _ = small_time_ratios(cfg)
    s = mon.sup_sqrt_t
    ratios = s[1:] / s[:-1]
    floor_ok = mon.deltas[-1] >= mon.t_floor
    rep.check("strict-decrease", "small-time-regularity", bool(np.all(ratios < 1) and floor_ok),
              {"values": s.tolist(), "ratios": ratios.tolist(), "t_floor": mon.t_floor}, "ratios < 1")
    for i, ratio in enumerate(ratios):
        rep.against_baseline(f"decay-ratio-{i}", "small-time-regularity", float(ratio), factor=1.05)
    rep.record("h-sigma", "small-time-regularity", mon.h_sigma.tolist())
    rep.record("h-minus-r", "small-time-regularity", mon.h_minus_r.tolist())
    rep.record("theta", "small-time-regularity", mon.theta.tolist())
    rep.series = {"t": mon.times.tolist(), "sqrt_t_sup": mon.sqrt_t_sup.tolist()}


def _suite_uniqueness(cfg: HarnessConfig, rep: SuiteReport):
    a_cfg = cfg.solver()
    b_cfg = cfg.solver(steps=2 * cfg.steps, tol=cfg.tol / 10)
    worst = 0.0
    for seed in range(cfg.seed, cfg.seed + 5):
        u0 = small_data(seed, a_cfg.grid, cfg.gamma, cfg.amp)
        ua, _ = picard_solve(u0, a_cfg)
        ub, _ = picard_solve(u0, b_cfg)
        worst = max(worst, _rel_l2(ua.coeffs[-1], ub.coeffs[-1]))
    rep.check("refinement-agreement", "uniqueness", worst <= 1e-5, worst, 1e-5)


def _suite_energy(cfg: HarnessConfig, rep: SuiteReport):
    sc = cfg.solver()
    g = sc.grid
    worst_bound = -np.inf
    for seed in range(cfg.seed, cfg.seed + 5):
        for u0 in (small_data(seed, g, cfg.gamma, cfg.amp), rough_data(seed, g, cfg.r)):
            led = energy_ledger(picard_solve(u0, sc)[0])
            worst_bound = max(worst_bound, float(np.max(led.total / led.energy[0])) - 1.0)
    rep.check("dissipation-bound", "energy-space", worst_bound <= 1e-4, worst_bound, 1e-4)
    heat = heat_trajectory(leray_project(rough_data(cfg.seed, g, cfg.r)), sc.timegrid)
    tg_u = picard_solve(taylor_green(g), sc)[0]
    eq = 0.0
    for u in (heat, tg_u):
        led = energy_ledger(u)
        eq = max(eq, float(np.max(np.abs(led.total / led.energy[0] - 1.0))))
    rep.check("heat-equality", "energy-space", eq <= 1e-6, eq, 1e-6)


def _suite_blowup_synthetic(cfg: HarnessConfig, rep: SuiteReport):
    g = _grid(cfg)
    tg = TimeGrid.graded(cfg.T, cfg.steps)
    T_star = 1.25 * cfg.T
    prof = leray_project(random_band_field(cfg.seed, g, components=g.dim, gamma=g.dim - cfg.r))
    exact = blowup_monitor(synthetic_blowup_series(prof, tg, cfg.r, T_star), cfg.r, T_star)
    dev = float(np.max(np.abs(exact.g - 1.0)))
    rep.check("exact-exponent", "blowup-functional", dev <= 1e-10 and not exact.flagged, dev, 1e-10)
    flags = {}
    for factor in (1.1, 0.9):
        mon = blowup_monitor(synthetic_blowup_series(prof, tg, cfg.r, T_star, factor), cfg.r, T_star)
        flags[str(factor)] = mon.trend if mon.flagged else "unflagged"
    rep.check("perturbed-flagged", "blowup-functional", flags == {"1.1": "growing", "0.9": "decaying"}, flags,
              {"1.1": "growing", "0.9": "decaying"})
    u, _ = picard_solve(small_data(cfg.seed, g, cfg.gamma, cfg.amp), cfg.solver())
    mon = blowup_monitor(u, cfg.r)
    rep.check("decaying-sentinel", "blowup-functional", mon.g is None and np.isfinite(mon.integral[-1]),
              float(mon.integral[-1]), "finite integral, no g")


BOOTSTRAP_CASES = {
    "constant-A": ([(t, 1.0) for t in np.linspace(0, 1, 11)], 1.0, 0.125),
    "constant-2A": ([(t, 2.0) for t in np.linspace(0, 1, 11)], 1.0, 0.125),
    "jump-A-to-3A": ([(t, 1.0 if t < 0.5 else 3.0) for t in np.linspace(0, 1, 11)], 1.0, 0.125),
}
BOOTSTRAP_EXPECTED = {
    "constant-A": ("pass", ()),
    "constant-2A": ("hypothesis-violation", ("f<=A+Bf^2",)),
    "jump-A-to-3A": ("hypothesis-violation", ("f<=A+Bf^2", "f<=2A")),
}


def _suite_bootstrap(cfg: HarnessConfig, rep: SuiteReport):
    for name, (samples, A, B) in BOOTSTRAP_CASES.items():
        v = bootstrap_check(samples, A, B)
        status, failed = BOOTSTRAP_EXPECTED[name]
        rep.check(name, "bootstrap-lemma", v.status == status and tuple(v.failed) == failed,
                  {"status": v.status, "failed": v.failed, "gap_jump": v.gap_jump}, {"status": status, "failed": list(failed)})


def gmo_ratio(f: SpectralField, r: float) -> float:
    return lebesgue_norm(f, 4) / math.sqrt(sobolev_norm(f, r) * besov_norm(f, -r, np.inf))


def sup_interp_ratio(f: SpectralField, r: float, sigma: float) -> float:
    lo, hi = besov_norm(f, -r, np.inf), besov_norm(f, sigma, np.inf)
    return lebesgue_norm(f, np.inf) / (lo ** (sigma / (r + sigma)) * hi ** (r / (r + sigma)))


def _ensemble_ratios(cfg: HarnessConfig, ratio, scale: int = 1) -> tuple[np.ndarray, int]:
    g = _grid(cfg, scale)
    vals, skipped = [], 0
    for seed in range(cfg.seed, cfg.seed + cfg.ensemble):
        f = ensemble_field(seed, g)
        if not np.any(f.coeffs):
            skipped += 1
            continue
        vals.append(ratio(f))
    return np.array(vals), skipped


def gmo_check(cfg: HarnessConfig, rep: SuiteReport | None = None) -> SuiteReport:
    rep = rep or SuiteReport("gmo", _jsonable(asdict(cfg)))
    ratio = lambda f: gmo_ratio(f, cfg.r)  # noqa: E731
    a, skipped = _ensemble_ratios(cfg, ratio)
    b, _ = _ensemble_ratios(cfg, ratio, 2)
    f = ensemble_field(cfg.seed, _grid(cfg))
    scale_err = abs(ratio(f * 123.456) - ratio(f)) / ratio(f)
    rep.check("scale-invariance", "gmo-inequality", scale_err <= 1e-12, scale_err, 1e-12)
    rep.check("finite", "gmo-inequality", bool(np.all(np.isfinite(a))), float(a.max()), "finite")
    drift = max(a.max() / b.max(), b.max() / a.max())
    rep.check("grid-doubling", "gmo-inequality", drift <= 2.0, {"coarse": a.max(), "fine": b.max(), "drift": drift}, 2.0)
    rep.against_baseline("gmo-constant", "gmo-inequality", float(a.max()))
    if skipped:
        rep.record("skipped-degenerate", "plumbing", skipped)
    return rep


def _suite_gmo(cfg: HarnessConfig, rep: SuiteReport):
    gmo_check(cfg, rep)


def sup_interp_check(cfg: HarnessConfig, rep: SuiteReport | None = None) -> SuiteReport:
    rep = rep or SuiteReport("sup_interp", _jsonable(asdict(cfg)))
    ratio = lambda f: sup_interp_ratio(f, cfg.r, cfg.sigma)  # noqa: E731
    a, _ = _ensemble_ratios(cfg, ratio)
    b, _ = _ensemble_ratios(cfg, ratio, 2)
    f = ensemble_field(cfg.seed, _grid(cfg))
    scale_err = abs(ratio(f * 0.0371) - ratio(f)) / ratio(f)
    rep.check("scale-invariance", "sup-interpolation", scale_err <= 1e-12, scale_err, 1e-12)
    drift = max(a.max() / b.max(), b.max() / a.max())
    rep.check("grid-doubling", "sup-interpolation", drift <= 2.0, {"coarse": a.max(), "fine": b.max(), "drift": drift}, 2.0)
    threshold = baselines.lookup("sup_interp", "threshold", rep.config)
    if threshold is None:
        rep.record("constant", "sup-interpolation", float(a.max()))
    else:
        rep.check("constant", "sup-interpolation", a.max() <= threshold, float(a.max()), threshold)
    return rep


def _suite_sup_interp(cfg: HarnessConfig, rep: SuiteReport):
    sup_interp_check(cfg, rep)


SUITES = {
    "partition": _suite_partition,
    "bony": _suite_bony,
    "bernstein": _suite_bernstein,
    "heat_char": _suite_heat_char,
    "heat_smoothing": _suite_heat_smoothing,
    "oseen_map": _suite_oseen_map,
    "kernel_scaling": _suite_kernel_scaling,
    "singular_L": _suite_singular_L,
    "picard": _suite_picard,
    "small_time": _suite_small_time,
    "uniqueness": _suite_uniqueness,
    "energy": _suite_energy,
    "blowup_synthetic": _suite_blowup_synthetic,
    "bootstrap": _suite_bootstrap,
    "gmo": _suite_gmo,
    "sup_interp": _suite_sup_interp,
}


def run_suite(name: str, cfg: HarnessConfig | None = None) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuite(name)
    cfg = cfg or HarnessConfig()
    rep = SuiteReport(name, _jsonable(asdict(cfg)))
    start = time.perf_counter()
    try:
        SUITES[name](cfg, rep)
    except NonContraction as exc:
        rep.check("contraction", "mild-solution-limit", False, str(exc), "contracting Picard iteration")
    rep.wall_time = time.perf_counter() - start
    return rep


def _run_named(args):
    name, cfg = args
    return run_suite(name, cfg)


def run_suites(names, cfg: HarnessConfig | None = None, parallel: bool = False) -> list[SuiteReport]:
    """Run several suites; with ``parallel`` they go to a process pool (order preserved)."""
    names = list(names)
    for n in names:
        if n not in SUITES:
            raise UnknownSuite(n)
    cfg = cfg or HarnessConfig()
    if not parallel:
        return [run_suite(n, cfg) for n in names]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor() as pool:
        return list(pool.map(_run_named, [(n, cfg) for n in names]))


__all__ = [
    "ConfigError",
    "HarnessConfig",
    "SUITES",
    "SuiteReport",
    "UnknownSuite",
    "gmo_check",
    "read_config_file",
    "run_suite",
    "run_suites",
    "sup_interp_check",
]
