"""Discrete conservation-law, moment, and blow-up diagnostics.

Evaluates the three conserved functionals of the inviscid flow (mass P,
energy E, momentum M), the dissipation ledgers that close the viscous
energy and momentum balances, the weighted moments feeding the virial
functional phi(t) = I2/2 + int_0^t J + b^2 int_0^t K, and the sign test
8 E(0) + b^2 M(0) < 0 that rules out global existence.  All operations are
pure functions over state snapshots; time accumulation is done with
trapezoid sums over sampled records.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import Grid, PhysParams, integrate, ddx

__all__ = [
    "InvariantRecord",
    "VirialMoments",
    "VirialRecord",
    "DriftSummary",
    "MonitorThresholds",
    "MonitorSample",
    "MonitorStatus",
    "FLAG_WALL_CONTAMINATION",
    "FLAG_WEIGHTED_DATA_INVALID",
    "mass",
    "grad_norm_sq",
    "energy",
    "momentum",
    "viscous_energy_rate",
    "viscous_momentum_rate",
    "viscous_balance",
    "virial_moments",
    "virial_rhs",
    "blowup_criterion",
    "blowup_monitor",
    "wall_flags",
    "second_difference",
    "drift_summary",
    "LedgerAccumulator",
    "VirialAccumulator",
]

FLAG_WALL_CONTAMINATION = 1
FLAG_WEIGHTED_DATA_INVALID = 2


@dataclass(frozen=True)
class InvariantRecord:
    """Sampled invariants plus accumulated viscous ledgers at one time."""

    t: float
    P: float
    E: float
    M: float
    visc_energy_ledger: float = 0.0
    visc_momentum_ledger: float = 0.0


class VirialMoments(NamedTuple):
    I2: float  # int x^2 |u|^2
    J: float   # int x v^2
    K: float   # int x |u|^2


@dataclass(frozen=True)
class VirialRecord:
    """Weighted moments and the accumulated virial functional at one time."""

    t: float
    I2: float
    J: float
    K: float
    phi: float
    rhs_bound: float  # 8 E(0) + b^2 M(0)


@dataclass(frozen=True)
class DriftSummary:
    """Conservation drifts recomputable from a persisted time series."""

    p_rel_drift_max: float
    e_drift_max: float
    m_drift_max: float
    e_defect_max: float  # max |E + energy ledger - E(0)|
    m_defect_max: float  # max |M + momentum ledger - M(0)|


def mass(u: np.ndarray, g: Grid) -> float:
    """P = int |u|^2."""
    return integrate(np.abs(u) ** 2, g)


def grad_norm_sq(u: np.ndarray, g: Grid) -> float:
    """int |u_x|^2 with the second-order stencil derivative."""
    ux = ddx(u, g)
    return integrate(np.abs(ux) ** 2, g)


def energy(u: np.ndarray, v: np.ndarray, p: PhysParams, g: Grid) -> float:
    """E = 1/2 int |u_x|^2 + 1/4 int |u|^4 + b/2 int v |u|^2 + a/8 (int v^2)^2."""
    u2 = np.abs(u) ** 2
    vv = integrate(v * v, g)
    return (
        0.5 * grad_norm_sq(u, g)
        + 0.25 * integrate(u2 * u2, g)
        + 0.5 * p.b * integrate(v * u2, g)
        + 0.125 * p.a * vv * vv
    )


def momentum(u: np.ndarray, v: np.ndarray, g: Grid) -> float:
    """M = int v^2 - 2 Im int u conj(u_x)."""
    ux = ddx(u, g)
    im_part = float(np.dot(g.weights, (u * np.conj(ux)).imag))
    return integrate(v * v, g) - 2.0 * im_part


def viscous_energy_rate(u: np.ndarray, v: np.ndarray, p: PhysParams, g: Grid) -> float:
    """Integrand of the viscous energy ledger.

    eps * [ (b/2) int v_x (|u|^2)_x + (a/2) (int v^2) (int v_x^2) ];
    identically zero for eps = 0.
    """
    if p.epsilon == 0.0:
        return 0.0
    vx = ddx(v, g)
    u2x = ddx(np.abs(u) ** 2, g)
    return p.epsilon * (
        0.5 * p.b * integrate(vx * u2x, g)
        + 0.5 * p.a * integrate(v * v, g) * integrate(vx * vx, g)
    )


def viscous_momentum_rate(v: np.ndarray, p: PhysParams, g: Grid) -> float:
    """Integrand of the viscous momentum ledger: 2 eps int v_x^2."""
    if p.epsilon == 0.0:
        return 0.0
    vx = ddx(v, g)
    return 2.0 * p.epsilon * integrate(vx * vx, g)


class LedgerAccumulator:
    """Trapezoid-in-time accumulation of the two viscous ledgers."""

    def __init__(self) -> None:
        self._t_prev: float | None = None
        self._e_rate_prev = 0.0
        self._m_rate_prev = 0.0
        self.energy_ledger = 0.0
        self.momentum_ledger = 0.0

    def sample(
        self, t: float, u: np.ndarray, v: np.ndarray, p: PhysParams, g: Grid
    ) -> tuple[float, float]:
        e_rate = viscous_energy_rate(u, v, p, g)
        m_rate = viscous_momentum_rate(v, p, g)
        if self._t_prev is not None:
            h = t - self._t_prev
            if h < 0:
                raise ValueError("ledger samples must be time-ordered")
            self.energy_ledger += 0.5 * h * (e_rate + self._e_rate_prev)
            self.momentum_ledger += 0.5 * h * (m_rate + self._m_rate_prev)
        self._t_prev = t
        self._e_rate_prev = e_rate
        self._m_rate_prev = m_rate
        return self.energy_ledger, self.momentum_ledger


def viscous_balance(
    records: Sequence[InvariantRecord], p: PhysParams
) -> tuple[np.ndarray, np.ndarray]:
    """Defects of the viscous energy and momentum identities.

    energy_defect(t) = E(t) + energy ledger(t) - E(0) and likewise for the
    momentum; both tend to 0 under (dx, dt) refinement.  For eps = 0 the
    ledgers vanish and the defects reduce to plain conservation drifts.
    """
    if len(records) == 0:
        raise ValueError("empty record sequence")
    ts = np.array([r.t for r in records])
    if np.any(np.diff(ts) <= 0):
        raise ValueError("records must have strictly increasing times")
    if p.epsilon == 0.0:
        for r in records:
            if r.visc_energy_ledger != 0.0 or r.visc_momentum_ledger != 0.0:
                raise ValueError("nonzero ledger in an inviscid record sequence")
    e0, m0 = records[0].E, records[0].M
    e_defect = np.array([r.E + r.visc_energy_ledger - e0 for r in records])
    m_defect = np.array([r.M + r.visc_momentum_ledger - m0 for r in records])
    return e_defect, m_defect


def virial_moments(u: np.ndarray, v: np.ndarray, g: Grid) -> VirialMoments:
    """Weighted moments I2 = int x^2 |u|^2, J = int x v^2, K = int x |u|^2."""
    u2 = np.abs(u) ** 2
    return VirialMoments(
        I2=integrate(g.x * g.x * u2, g),
        J=integrate(g.x * v * v, g),
        K=integrate(g.x * u2, g),
    )


def virial_rhs(
    u: np.ndarray, v: np.ndarray, p: PhysParams, E0: float, M0: float, g: Grid
) -> float:
    """Exact second derivative of the virial functional along the flow.

    8 E(0) - int |u|^4 - 2 b int |u|^2 v - b^2 int v^2 + b^2 M(0); bounded
    above by 8 E(0) + b^2 M(0).
    """
    u2 = np.abs(u) ** 2
    return (
        8.0 * E0
        - integrate(u2 * u2, g)
        - 2.0 * p.b * integrate(u2 * v, g)
        - p.b * p.b * integrate(v * v, g)
        + p.b * p.b * M0
    )


class VirialAccumulator:
    """Builds VirialRecord rows, accumulating int_0^t J and int_0^t K."""

    def __init__(self, b: float, rhs_bound: float) -> None:
        self._b2 = b * b
        self._rhs_bound = rhs_bound
        self._t_prev: float | None = None
        self._j_prev = 0.0
        self._k_prev = 0.0
        self._int_j = 0.0
        self._int_k = 0.0

    def sample(self, t: float, moments: VirialMoments) -> VirialRecord:
        if self._t_prev is not None:
            h = t - self._t_prev
            if h < 0:
                raise ValueError("virial samples must be time-ordered")
            self._int_j += 0.5 * h * (moments.J + self._j_prev)
            self._int_k += 0.5 * h * (moments.K + self._k_prev)
        self._t_prev = t
        self._j_prev = moments.J
        self._k_prev = moments.K
        phi = 0.5 * moments.I2 + self._int_j + self._b2 * self._int_k
        return VirialRecord(
            t=t, I2=moments.I2, J=moments.J, K=moments.K,
            phi=phi, rhs_bound=self._rhs_bound,
        )


def blowup_criterion(E0: float, M0: float, b: float) -> bool:
    """True iff 8 E(0) + b^2 M(0) < 0 (no global solution exists)."""
    return 8.0 * E0 + b * b * M0 < 0.0


@dataclass(frozen=True)
class MonitorThresholds:
    grad_growth: float = 1e3  # factor over the initial int |u_x|^2
    dt_floor: float = 1e-8    # CFL-collapse floor


@dataclass(frozen=True)
class MonitorSample:
    t: float
    grad: float  # int |u_x|^2
    dt: float    # step size taken to reach t
    finite: bool


@dataclass(frozen=True)
class MonitorStatus:
    state: str  # "running" | "suspected_blowup" | "diverged"
    t_star: float | None = None


def blowup_monitor(
    history: Sequence[MonitorSample],
    thresholds: MonitorThresholds = MonitorThresholds(),
) -> MonitorStatus:
    """Numerical proxy for finite-time nonexistence.

    Reports the earliest trigger: diverged on the first non-finite sample,
    suspected_blowup when int |u_x|^2 exceeds grad_growth times its initial
    value or the step size collapses below dt_floor.
    """
    if len(history) == 0:
        return MonitorStatus("running")
    grad0 = history[0].grad
    for smp in history:
        if not smp.finite:
            return MonitorStatus("diverged", smp.t)
        if smp.grad > thresholds.grad_growth * max(grad0, np.finfo(float).tiny):
            return MonitorStatus("suspected_blowup", smp.t)
        if smp.dt < thresholds.dt_floor:
            return MonitorStatus("suspected_blowup", smp.t)
    return MonitorStatus("running")


def wall_flags(
    u: np.ndarray,
    v: np.ndarray,
    g: Grid,
    wall_zone: float = 0.05,
    wall_tol: float = 1e-8,
    weighted_zone: float = 0.01,
) -> int:
    """Validity bitfield for truncation-sensitive diagnostics.

    Bit 1 (wall contamination): more than wall_tol of int |u|^2 or int v^2
    sits within the last wall_zone fraction of the domain; moment
    identities derived on the half-line stop being trustworthy.  Bit 2
    (weighted data invalid): the same test on the tighter weighted_zone
    strip next to x = L.
    """
    u2 = np.abs(u) ** 2
    v2 = v * v
    flags = 0
    for zone, bit in ((wall_zone, FLAG_WALL_CONTAMINATION),
                      (weighted_zone, FLAG_WEIGHTED_DATA_INVALID)):
        sel = g.x >= (1.0 - zone) * g.L
        for f in (u2, v2):
            total = float(np.dot(g.weights, f))
            if total > 0 and float(np.dot(g.weights[sel], f[sel])) > wall_tol * total:
                flags |= bit
                break
    return flags


def second_difference(ts: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second-derivative estimate by least-squares parabolas over 5 samples.

    Exact on quadratics for any sample spacing and noise-suppressing on
    uniform spacing (Savitzky-Golay weights).  Returns the window-center
    times and the estimates; needs at least 5 samples.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ts.shape != ys.shape or ts.ndim != 1:
        raise ValueError("ts and ys must be 1-d arrays of equal length")
    n = ts.size
    if n < 5:
        raise ValueError("need at least 5 samples for the 5-point estimator")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must be strictly increasing")
    centers = np.empty(n - 4)
    ypp = np.empty(n - 4)
    for i in range(2, n - 2):
        tw = ts[i - 2 : i + 3]
        yw = ys[i - 2 : i + 3]
        tc = tw - tw[2]
        coeffs = np.polyfit(tc, yw, 2)
        centers[i - 2] = tw[2]
        ypp[i - 2] = 2.0 * coeffs[0]
    return centers, ypp


def drift_summary(records: Sequence[InvariantRecord]) -> DriftSummary:
    """Conservation drifts over a record sequence (see DriftSummary)."""
    if len(records) == 0:
        raise ValueError("empty record sequence")
    p0, e0, m0 = records[0].P, records[0].E, records[0].M
    p_scale = abs(p0) if p0 != 0 else 1.0
    p_drift = max(abs(r.P - p0) for r in records) / p_scale
    e_drift = max(abs(r.E - e0) for r in records)
    m_drift = max(abs(r.M - m0) for r in records)
    e_defect = max(abs(r.E + r.visc_energy_ledger - e0) for r in records)
    m_defect = max(abs(r.M + r.visc_momentum_ledger - m0) for r in records)
    return DriftSummary(
        p_rel_drift_max=p_drift,
        e_drift_max=e_drift,
        m_drift_max=m_drift,
        e_defect_max=e_defect,
        m_defect_max=m_defect,
    )
