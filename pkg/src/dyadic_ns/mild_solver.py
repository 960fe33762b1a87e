"""Mild solutions of the periodic Navier-Stokes equations by Picard iteration,
the linearized paraproduct operator, and small-time / blow-up monitors.

Viscosity is fixed at 1; the size of the data is the experimental knob.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .heat_oseen import (
    bilinear_B,
    duhamel_sweep,
    heat_trajectory,
    phi_weights,
    projected_divergence,
)
from .littlewood_paley import _low_multipliers, block_multipliers, top_block
from .norms import (
    TimeGrid,
    TimeSeriesField,
    besov_series,
    chemin_lerner_norm,
    lebesgue_series,
    weighted_sup_norm,
)
from .spectral_core import (
    Grid,
    SpectralField,
    leray_project,
    padded_physical,
    truncate_padded,
)


class NonContraction(RuntimeError):
    """Fixed-point iteration failed to contract (data too large for the horizon)."""


class StepRejected(RuntimeError):
    """Per-step correction of the reference integrator failed to contract."""


@dataclass(frozen=True, eq=False)
class SolverConfig:
    grid: Grid
    timegrid: TimeGrid
    r: float = 0.6
    sigma: float = 0.8
    tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not 0 < self.r < self.sigma < 1:
            raise ValueError("need 0 < r < sigma < 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")

    @classmethod
    def make(cls, dim=2, n=64, T=0.5, M=64, **kw) -> SolverConfig:
        return cls(Grid(dim, n), TimeGrid.graded(T, M), **kw)


@dataclass
class PicardTrace:
    increments: list[float] = field(default_factory=list)
    residual: float = float("nan")
    t_floor: float = float("nan")

    @property
    def iterations(self) -> int:
        return len(self.increments)

    @property
    def ratios(self) -> np.ndarray:
        s = np.asarray(self.increments)
        with np.errstate(divide="ignore", invalid="ignore"):
            return s[1:] / s[:-1]


def xt_norm(v: TimeSeriesField, r: float) -> float:
    """``||v||_{L^inf_{1,T}} + ||v||_{L^inf_{r,T}}``."""
    return weighted_sup_norm(v, 1.0) + weighted_sup_norm(v, r)


def _watch(increments: list[float], what: str):
    s = increments[-1]
    if not np.isfinite(s):
        raise NonContraction(f"{what}: increment is not finite")
    if len(increments) >= 4 and increments[-1] > increments[-2] > increments[-3] > increments[-4]:
        raise NonContraction(f"{what}: increments grew three times in a row ({increments[-4:]})")


def picard_solve(u0: SpectralField, cfg: SolverConfig) -> tuple[TimeSeriesField, PicardTrace]:
    """Iterate ``u_(n+1) = exp(t Lap) u0 + B(u_(n), u_(n))`` over the whole horizon.

    Stops once the X_T increment drops to ``cfg.tol``; the trace records
    every increment and the X_T residual of the returned trajectory.
    """
    u0 = leray_project(u0)
    lin = heat_trajectory(u0, cfg.timegrid)
    trace = PicardTrace(t_floor=cfg.timegrid.floor)
    u = lin
    for _ in range(cfg.max_iter):
        nxt = lin + bilinear_B(u, u)
        trace.increments.append(xt_norm(nxt - u, cfg.r))
        u = nxt
        if trace.increments[-1] <= cfg.tol:
            break
        _watch(trace.increments, "picard")
    else:
        raise NonContraction(f"picard: no convergence in {cfg.max_iter} iterations")
    trace.residual = xt_norm(u - lin - bilinear_B(u, u), cfg.r)
    return u, trace


def _nonlinear(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    # -P div(u (x) u) for one snapshot
    d = grid.dim
    pu = padded_physical(coeffs, grid)
    prod = (pu[:, None] * pu[None, :]).reshape((d * d,) + pu.shape[1:])
    return -projected_divergence(truncate_padded(prod, grid), grid)


def step_integrator_oracle(u0: SpectralField, cfg: SolverConfig, substeps: int = 4) -> TimeSeriesField:
    """Independent reference: sequential exponential time stepping.

    Each time interval is split into ``substeps`` equal steps of a
    second-order exponential Runge-Kutta scheme: an exponential-Euler
    predictor followed by one fixed-point correction with the nonlinearity
    interpolated linearly across the step.
    """
    g = cfg.grid
    u = leray_project(u0).coeffs.copy()
    times = cfg.timegrid.times
    out = np.empty((len(times),) + u.shape, dtype=complex)
    out[0] = u
    lam = g.ksq
    for m in range(1, len(times)):
        h = (times[m] - times[m - 1]) / substeps
        z = lam * h
        e = np.exp(-z)
        p1, c2 = phi_weights(z)
        for _ in range(substeps):
            n0 = _nonlinear(u, g)
            lin = e * u
            pred = lin + h * p1 * n0
            corr = lin + h * ((p1 - c2) * _nonlinear(pred, g) + c2 * n0)
            # roundoff floor: a vanishing nonlinearity must not trigger rejection
            size = max(np.max(np.abs(pred - lin)), 1e-13 * np.max(np.abs(u)))
            if np.max(np.abs(corr - pred)) > size:
                raise StepRejected(f"correction failed to contract near t = {times[m]:.3g}")
            u = corr
        out[m] = u
    return TimeSeriesField(g, cfg.timegrid, out, u0.real)


# -- linearized operator ---------------------------------------------------------


def _paired_low(grid: Grid) -> list[np.ndarray]:
    # S_{j+1} + S_j (S_{-1} = 0): pi1 + pi2 against Delta_j collapses onto one factor
    low = _low_multipliers(grid)
    out = [low[0]]
    for j in range(0, top_block(grid) + 1):
        out.append(low[j + 1] + low[j])
    return out


def paraproduct_tensor(u: TimeSeriesField, f: TimeSeriesField) -> TimeSeriesField:
    """Symmetrized ``T_{ki} = (Pi(u_k, f_i) + Pi(u_i, f_k)) / 2`` with ``Pi = pi1 + pi2``.

    The symmetrization keeps ``T(u, u) = u (x) u`` exactly, because
    ``pi1(a, b) + pi2(b, a) = a b``.
    """
    u._check(f)
    g = u.grid
    d = g.dim
    lows = _paired_low(g)
    blocks = block_multipliers(g)
    out = np.empty((len(u.timegrid.times), d * d) + g.shape, dtype=complex)
    for m in range(len(u.timegrid.times)):
        acc = None
        for lo, bl in zip(lows, blocks):
            a = padded_physical(lo * u.coeffs[m], g)
            b = padded_physical(bl * f.coeffs[m], g)
            term = a[:, None] * b[None, :]
            acc = term if acc is None else acc + term
        sym = 0.5 * (acc + np.swapaxes(acc, 0, 1))
        out[m] = truncate_padded(sym.reshape((d * d,) + sym.shape[2:]), g)
    return TimeSeriesField(g, u.timegrid, out, u.real and f.real)


def operator_Lu(u: TimeSeriesField, f: TimeSeriesField) -> TimeSeriesField:
    """``L_u(f) = L_oss(pi1(u, f) + pi2(u, f))`` (symmetrized tensor)."""
    T = paraproduct_tensor(u, f)
    G = projected_divergence(T.coeffs, u.grid)
    return TimeSeriesField(u.grid, u.timegrid, -duhamel_sweep(G, u.grid, u.timegrid.times), T.real)


@dataclass
class FixedPointTrace:
    increments: list[float] = field(default_factory=list)
    crosscheck: float = float("nan")

    @property
    def iterations(self) -> int:
        return len(self.increments)


def fixed_point_Fu(
    u0: SpectralField, u: TimeSeriesField, cfg: SolverConfig, q: float = np.inf
) -> tuple[TimeSeriesField, FixedPointTrace]:
    """Solve ``w = L_u(exp(t Lap) u0) + L_u(w)`` by iteration.

    Increments and the cross-check against ``B(u, u)`` are measured in the
    Chemin-Lerner norm with time exponent ``2 / (1 + r)`` and regularity
    ``1 + r``.
    """
    p, s = 2.0 / (1.0 + cfg.r), 1.0 + cfg.r
    lin = heat_trajectory(leray_project(u0), cfg.timegrid)
    w0 = operator_Lu(u, lin)
    w = w0
    trace = FixedPointTrace()
    for _ in range(cfg.max_iter):
        nxt = w0 + operator_Lu(u, w)
        trace.increments.append(chemin_lerner_norm(nxt - w, p, s, q))
        w = nxt
        if trace.increments[-1] <= cfg.tol:
            break
        _watch(trace.increments, "fixed point")
    else:
        raise NonContraction(f"fixed point: no convergence in {cfg.max_iter} iterations")
    trace.crosscheck = chemin_lerner_norm(w - bilinear_B(u, u), p, s, q)
    return w, trace


# -- monitors -----------------------------------------------------------------------


@dataclass
class BlowupReport:
    times: np.ndarray
    besov: np.ndarray
    integral: np.ndarray
    g: np.ndarray | None
    flagged: bool
    trend: str


def blowup_monitor(u: TimeSeriesField, r: float, T_star: float = np.inf, drift_tol: float = 1e-6) -> BlowupReport:
    """``g_r(t) = (T* - t)**((1 - r)/2) ||u(t)||_{B_inf^{-r,inf}}`` and its companions.

    ``integral`` is the running trapezoid integral of the Besov norm. With a
    finite ``T*`` the series is flagged when ``log g_r`` drifts by more than
    ``drift_tol`` across the record (``trend`` gives the direction).
    """
    times = u.timegrid.times
    b = besov_series(u, -r, np.inf)
    h = np.diff(times)
    integral = np.concatenate([[0.0], np.cumsum(h * (b[1:] + b[:-1]) / 2)])
    if not np.isfinite(T_star):
        return BlowupReport(times, b, integral, None, False, "none")
    if T_star <= times[-1]:
        raise ValueError("T* must exceed the last time")
    g = (T_star - times) ** ((1 - r) / 2) * b
    logg = np.log(g)
    drift = logg - logg[0]
    flagged = bool(np.max(np.abs(drift)) > drift_tol)
    trend = "flat" if not flagged else ("growing" if drift[-1] > 0 else "decaying")
    return BlowupReport(times, b, integral, g, flagged, trend)


def synthetic_blowup_series(
    profile: SpectralField, timegrid: TimeGrid, r: float, T_star: float, exponent_factor: float = 1.0
) -> TimeSeriesField:
    """``u(t) = (T* - t)**(-(1 - r)/2 * factor) * profile / ||profile||_{B^{-r}}``."""
    from .norms import besov_norm

    unit = profile.coeffs / besov_norm(profile, -r, np.inf)
    amp = (T_star - timegrid.times) ** (-(1 - r) / 2 * exponent_factor)
    return TimeSeriesField(profile.grid, timegrid, amp.reshape((-1,) + (1,) * (unit.ndim)) * unit[None], profile.real)


@dataclass
class RegularityReport:
    times: np.ndarray
    sqrt_t_sup: np.ndarray
    deltas: np.ndarray
    h_sigma: np.ndarray
    h_minus_r: np.ndarray
    theta: np.ndarray
    sup_sqrt_t: np.ndarray
    t_floor: float
    g_r: np.ndarray | None = None  # None unless a blow-up time beyond T was supplied
    energy: EnergyLedger | None = None

    def to_dict(self) -> dict:
        def plain(v):
            return v.tolist() if isinstance(v, np.ndarray) else v

        out = {k: plain(getattr(self, k)) for k in
               ("times", "sqrt_t_sup", "deltas", "h_sigma", "h_minus_r", "theta", "sup_sqrt_t", "t_floor", "g_r")}
        if self.energy is not None:
            out["energy"] = {"energy": self.energy.energy.tolist(), "dissipation": self.energy.dissipation.tolist()}
        return out


def _lp_up_to(values: np.ndarray, times: np.ndarray, delta: float, p: float) -> float:
    # trapezoid of values**p on [0, delta], interpolating linearly at delta
    keep = times <= delta
    t = times[keep]
    v = values[keep] ** p
    if t[-1] < delta:
        v_end = np.interp(delta, times, values) ** p
        t = np.append(t, delta)
        v = np.append(v, v_end)
    return float(np.sum(np.diff(t) * (v[1:] + v[:-1]) / 2) ** (1.0 / p))


def small_time_monitor(u: TimeSeriesField, r: float, sigma: float, deltas, T_star: float = np.inf) -> RegularityReport:
    """Small-time quantities of a trajectory for each window ``(0, delta]``.

    h(sigma, delta) = sup t**((1+sigma)/2) ||u||_{B^{sigma}},
    h(-r, delta) = sup t**((1-r)/2) ||u||_{B^{-r}},
    Theta(delta) = L^{2/(1-r)} norm in time of ||u||_{B^{-r}} over [0, delta],
    and sup sqrt(t) ||u(t)||_inf. Suprema run over positive nodes <= delta.
    The report also carries the energy ledger and, when ``T_star`` is finite,
    the blow-up functional.
    """
    deltas = np.asarray(list(deltas), dtype=float)
    tg = u.timegrid
    if np.any(deltas <= 0) or np.any(deltas > tg.T * (1 + 1e-12)):
        raise ValueError("deltas must lie in (0, T]")
    t = tg.times
    b_sig = besov_series(u, sigma, np.inf)
    b_mr = besov_series(u, -r, np.inf)
    sup = lebesgue_series(u, np.inf)
    h_s = t ** ((1 + sigma) / 2) * b_sig
    h_m = t ** ((1 - r) / 2) * b_mr
    sq = np.sqrt(t) * sup
    pos = t > 0

    def windowed(series, d):
        sel = pos & (t <= d * (1 + 1e-12))
        return float(np.max(series[sel])) if np.any(sel) else 0.0

    return RegularityReport(
        times=t,
        sqrt_t_sup=sq,
        deltas=deltas,
        h_sigma=np.array([windowed(h_s, d) for d in deltas]),
        h_minus_r=np.array([windowed(h_m, d) for d in deltas]),
        theta=np.array([_lp_up_to(b_mr, t, d, 2.0 / (1.0 - r)) for d in deltas]),
        sup_sqrt_t=np.array([windowed(sq, d) for d in deltas]),
        t_floor=tg.floor,
        g_r=blowup_monitor(u, r, T_star).g if np.isfinite(T_star) else None,
        energy=energy_ledger(u),
    )


@dataclass
class BootstrapVerdict:
    status: str
    failed: list[str]
    hypotheses_hold: bool
    conclusion_holds: bool
    gap_jump: bool


def bootstrap_check(samples, A: float, B: float) -> BootstrapVerdict:
    """Check the continuity bootstrap: ``4AB < 1``, ``f(0) <= 2A`` and
    ``f <= A + B f**2`` everywhere should force ``f <= 2A`` everywhere.

    ``samples`` is a sequence of ``(t, f(t))`` pairs in time order.
    ``gap_jump`` marks consecutive samples straddling the forbidden band
    between the roots of ``B f**2 - f + A``, which only discontinuous data
    can do.
    """
    if A <= 0 or B <= 0:
        raise ValueError("A and B must be positive")
    f = np.array([v for _, v in samples], dtype=float)
    failed = []
    if not 4 * A * B < 1:
        failed.append("4AB<1")
    if not f[0] <= 2 * A:
        failed.append("f(0)<=2A")
    if np.any(f > A + B * f**2):
        failed.append("f<=A+Bf^2")
    hyp = not failed
    concl = bool(np.all(f <= 2 * A))
    if not concl:
        failed.append("f<=2A")
    gap = False
    if 4 * A * B < 1:
        disc = np.sqrt(1 - 4 * A * B)
        lo, hi = (1 - disc) / (2 * B), (1 + disc) / (2 * B)
        gap = bool(np.any((np.minimum(f[1:], f[:-1]) <= lo) & (np.maximum(f[1:], f[:-1]) >= hi)))
    if hyp and concl:
        status = "pass"
    elif not hyp:
        status = "hypothesis-violation"
    else:
        status = "conclusion-breach"
    return BootstrapVerdict(status, failed, hyp, concl, gap)


@dataclass
class EnergyLedger:
    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.energy + self.dissipation


def _log_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (a - b) / log(a / b); exact interval integral of an exponential through a, b
    with np.errstate(divide="ignore", invalid="ignore"):
        x = a / np.where(b > 0, b, 1.0) - 1.0
        small = np.abs(x) < 1e-4
        lm = np.where(small, b * (1 + x / 2 - x**2 / 12), b * x / np.log1p(np.where(small, 0.0, x)))
    ok = (a > 0) & (b > 0)
    return np.where(ok, lm, 0.5 * (a + b))


def energy_ledger(u: TimeSeriesField) -> EnergyLedger:
    """``E(t) = ||u(t)||_2**2`` and ``D(t) = 2 int_0^t ||grad u||_2**2``.

    The dissipation integral is accumulated per Fourier mode with an
    exponential fit between samples, exact for heat flows.
    """
    g = u.grid
    power = np.sum(np.abs(u.coeffs) ** 2, axis=1)  # (M + 1, n, ..., n)
    energy = power.reshape(len(power), -1).sum(axis=1)
    grad = 2.0 * g.ksq[None] * power
    h = np.diff(u.timegrid.times).reshape((-1,) + (1,) * g.dim)
    pieces = h * _log_mean(grad[:-1], grad[1:])
    diss = np.concatenate([[0.0], np.cumsum(pieces.reshape(len(pieces), -1).sum(axis=1))])
    return EnergyLedger(u.timegrid.times, energy, diss)
