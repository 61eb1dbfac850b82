"""Named, reproducible experiments: single runs, viscosity sweeps, refinements.

A ScenarioConfig fixes everything (grid, physics, time stepping, initial
data, outputs, seed), so a rerun of the same config produces byte-identical
series files.  The runner samples diagnostics at a fixed cadence (every
k-th step, or on an exact time lattice when sample_dt is set, which is what
sweeps use so that every member shares sample times), accumulates the
viscous ledgers and the virial functional with trapezoid sums, and stops on
divergence, a monitor trigger, or wall contamination.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .core import Grid, PhysParams, integrate, make_grid
from .dynamics import (
    ADVECTION_SCHEMES,
    DIFFUSION_BACKWARD,
    DIFFUSION_SCHEMES,
    UPWIND1,
    BoundaryValues,
    CFLViolationError,
    SimState,
    StepControl,
    cfl_dt,
    nonlocal_speed,
    step,
)
from . import boundstate as bs
from .diagnostics import (
    FLAG_WALL_CONTAMINATION,
    FLAG_WEIGHTED_DATA_INVALID,
    DriftSummary,
    InvariantRecord,
    LedgerAccumulator,
    MonitorSample,
    MonitorThresholds,
    VirialAccumulator,
    blowup_monitor,
    drift_summary,
    energy,
    grad_norm_sq,
    mass,
    momentum,
    second_difference,
    virial_moments,
    wall_flags,
)
from .storage import Snapshot, TimeSeriesRow, write_snapshot, write_timeseries

__all__ = [
    "SCENARIOS",
    "GridConfig",
    "TimeConfig",
    "InitialDataConfig",
    "OutputConfig",
    "MonitorConfig",
    "ScenarioConfig",
    "RunReport",
    "ConfigValidationError",
    "generate_initial_data",
    "run_scenario",
    "viscosity_sweep",
    "convergence_study",
]

SCENARIOS = (
    "conservation",
    "blowup",
    "viscosity_sweep",
    "boundstate_propagation",
    "convergence",
)

GENERATORS = ("zero", "gaussian_u", "bump_v", "gaussian_u+bump_v", "boundstate")

_EPS_WARN_DEFAULT = 0.5
_MEMORY_BUDGET_BYTES = 1 << 30
_WALL_DATA_TOL = 1e-8


class ConfigValidationError(ValueError):
    """Invalid scenario configuration; the message names the offending key."""


@dataclass(frozen=True)
class GridConfig:
    L: float = 40.0
    N: int = 1024


@dataclass(frozen=True)
class TimeConfig:
    T: float = 1.0
    cfl_safety: float = 0.9
    dt_max: float = math.inf


@dataclass(frozen=True)
class InitialDataConfig:
    generator: str = "zero"
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = ""
    series: str = "series.csv"
    cadence: int = 1
    sample_dt: float | None = None
    snapshots: bool = True


@dataclass(frozen=True)
class MonitorConfig:
    grad_growth: float = 1e3
    dt_floor: float = 1e-8
    wall_abort: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    grid: GridConfig = GridConfig()
    physics: PhysParams = PhysParams(a=1.0, b=1.0)
    time: TimeConfig = TimeConfig()
    initial_data: InitialDataConfig = InitialDataConfig()
    outputs: OutputConfig = OutputConfig()
    monitor: MonitorConfig = MonitorConfig()
    seed: int = 0
    advection: str = UPWIND1
    diffusion: str = DIFFUSION_BACKWARD
    eps_list: tuple[float, ...] = (1e-1, 5e-2, 2.5e-2)
    eps_warn: float = _EPS_WARN_DEFAULT
    levels: int = 3

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigValidationError(
                f"scenario.name must be one of {SCENARIOS}, got {self.scenario!r}"
            )
        if not self.time.T > 0:
            raise ConfigValidationError(f"time.T must be > 0, got {self.time.T}")
        if not (0 < self.time.cfl_safety <= 1):
            raise ConfigValidationError(
                f"time.cfl_safety must be in (0, 1], got {self.time.cfl_safety}"
            )
        if not self.time.dt_max > 0:
            raise ConfigValidationError(f"time.dt_max must be > 0, got {self.time.dt_max}")
        if self.initial_data.generator not in GENERATORS:
            raise ConfigValidationError(
                f"initial_data.generator must be one of {GENERATORS}, "
                f"got {self.initial_data.generator!r}"
            )
        if self.outputs.cadence < 1:
            raise ConfigValidationError(
                f"outputs.cadence must be >= 1, got {self.outputs.cadence}"
            )
        if self.outputs.sample_dt is not None and not self.outputs.sample_dt > 0:
            raise ConfigValidationError(
                f"outputs.sample_dt must be > 0, got {self.outputs.sample_dt}"
            )
        if self.advection not in ADVECTION_SCHEMES:
            raise ConfigValidationError(
                f"scenario.advection must be one of {ADVECTION_SCHEMES}, "
                f"got {self.advection!r}"
            )
        if self.diffusion not in DIFFUSION_SCHEMES:
            raise ConfigValidationError(
                f"scenario.diffusion must be one of {DIFFUSION_SCHEMES}, "
                f"got {self.diffusion!r}"
            )
        if self.levels < 3:
            raise ConfigValidationError(f"convergence.levels must be >= 3, got {self.levels}")
        if any(e <= 0 for e in self.eps_list) or any(
            e2 >= e1 for e1, e2 in zip(self.eps_list, self.eps_list[1:])
        ):
            raise ConfigValidationError(
                f"sweep.eps_list must be strictly decreasing positives, got {self.eps_list}"
            )


@dataclass
class PreparedData:
    """Initial fields plus, for bound states, boundary data and the exact flow."""

    u0: np.ndarray
    v0: np.ndarray
    bc: BoundaryValues | None = None
    exact: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None
    bound_params: bs.BoundStateParams | None = None


def _mask(g: Grid) -> np.ndarray:
    # sin^2 envelope: fields and their first derivatives vanish at both walls
    s = np.sin(np.pi * g.x / g.L)
    m = s * s
    m[0] = m[-1] = 0.0  # sin(pi) is only zero to round-off
    return m


def generate_initial_data(
    idc: InitialDataConfig, g: Grid, p: PhysParams
) -> PreparedData:
    """Build smooth, boundary-compatible initial fields from a named generator.

    Compact generators are masked so u, v and their first derivatives
    vanish exactly at both walls; generation fails when more than 1e-8 of
    the initial mass sits in the wall zone.  The boundstate generator also
    returns the analytic boundary data and exact flow for tracking.
    """
    prm = idc.params
    x = g.x
    u0 = np.zeros(g.n_nodes, dtype=np.complex128)
    v0 = np.zeros(g.n_nodes)
    if idc.generator == "zero":
        return PreparedData(u0=u0, v0=v0)
    if idc.generator == "boundstate":
        try:
            s_star = prm["s_star"]
            mu_star = prm["mu_star"]
        except KeyError as exc:
            raise ConfigValidationError(
                f"initial_data.{exc.args[0]} is required for the boundstate generator"
            ) from None
        bp = bs.solve_parameters(p.a, p.b, s_star, mu_star)
        u0, v0 = bs.assemble_bound_state(bp, g, 0.0)
        return PreparedData(
            u0=u0,
            v0=v0,
            bc=bs.analytic_boundary(bp, g),
            exact=lambda t: bs.assemble_bound_state(bp, g, t),
            bound_params=bp,
        )
    if idc.generator in ("gaussian_u", "gaussian_u+bump_v"):
        A = prm.get("amplitude", 1.0)
        x0 = prm.get("center", 0.5 * g.L)
        sig = prm.get("width", g.L / 20.0)
        k = prm.get("carrier", 0.0)
        u0 = A * np.exp(-((x - x0) ** 2) / (2.0 * sig * sig)) * np.exp(1j * k * x) * _mask(g)
    if idc.generator in ("bump_v", "gaussian_u+bump_v"):
        B = prm.get("v_amplitude", 0.5)
        xv = prm.get("v_center", 0.5 * g.L)
        sv = prm.get("v_width", g.L / 20.0)
        v0 = B * np.exp(-((x - xv) ** 2) / (2.0 * sv * sv)) * _mask(g)
    flags = wall_flags(u0, v0, g, wall_tol=_WALL_DATA_TOL)
    if flags & FLAG_WALL_CONTAMINATION:
        raise ConfigValidationError(
            "initial_data parameters put more than 1e-8 of the field mass "
            "within 5% of the far wall; enlarge grid.L or recenter the data"
        )
    return PreparedData(u0=u0, v0=v0)


@dataclass(frozen=True)
class RunReport:
    """Everything a run claims, each number recomputable from its series."""

    scenario: str
    status: str  # completed | suspected_blowup | diverged | wall_contaminated
    t_final: float
    steps: int
    criterion_value: float  # 8 E(0) + b^2 M(0)
    criterion_negative: bool
    drift: DriftSummary
    virial: dict
    tracking: dict | None = None
    sweep: dict | None = None
    convergence: list | None = None
    series_path: str | None = None
    snapshot_paths: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snapshot_paths"] = list(self.snapshot_paths)
        return d

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class _RunResult:
    status: str
    t_star: float | None
    state: SimState
    steps: int
    rows: list
    records: list
    monitor_history: list
    criterion_value: float
    exact: Callable | None
    bound_params: bs.BoundStateParams | None
    u0: np.ndarray | None = None
    v0: np.ndarray | None = None


def _run_loop(
    cfg: ScenarioConfig,
    g: Grid,
    p: PhysParams,
    data: PreparedData,
    wall_abort: bool,
) -> _RunResult:
    scheme = "viscous" if p.epsilon > 0 else "inviscid"
    state = SimState(0.0, data.u0.astype(np.complex128), data.v0.astype(np.float64), g)
    T = cfg.time.T
    tiny = 1e-12 * max(T, 1.0)
    thresholds = MonitorThresholds(cfg.monitor.grad_growth, cfg.monitor.dt_floor)

    e0 = energy(state.u, state.v, p, g)
    m0 = momentum(state.u, state.v, g)
    criterion = 8.0 * e0 + p.b * p.b * m0

    ledgers = LedgerAccumulator()
    virial = VirialAccumulator(p.b, criterion)
    rows: list[TimeSeriesRow] = []
    records: list[InvariantRecord] = []
    history: list[MonitorSample] = []
    grad0 = grad_norm_sq(state.u, g)

    def sample(st: SimState, dt_taken: float) -> TimeSeriesRow:
        P = mass(st.u, g)
        E = energy(st.u, st.v, p, g)
        M = momentum(st.u, st.v, g)
        led_e, led_m = ledgers.sample(st.t, st.u, st.v, p, g)
        mom = virial_moments(st.u, st.v, g)
        vrec = virial.sample(st.t, mom)
        flags = wall_flags(st.u, st.v, g)
        finite = not st.diverged
        grad = grad_norm_sq(st.u, g) if finite else math.inf
        history.append(MonitorSample(t=st.t, grad=grad, dt=dt_taken, finite=finite))
        records.append(
            InvariantRecord(st.t, P, E, M, led_e, led_m)
        )
        row = TimeSeriesRow(
            t=st.t, P=P, E=E, M=M,
            visc_E_ledger=led_e, visc_M_ledger=led_m,
            I2=mom.I2, J=mom.J, K=mom.K, phi=vrec.phi,
            c_speed=nonlocal_speed(st.v, p.a, g),
            max_u=float(np.max(np.abs(st.u))), max_v=float(np.max(np.abs(st.v))),
            flags=flags,
        )
        rows.append(row)
        return row

    sample(state, dt_taken=math.inf)  # t = 0 row; no step taken yet

    status = "completed"
    t_star: float | None = None
    steps = 0
    sample_dt = cfg.outputs.sample_dt
    next_k = 1

    while state.t < T - tiny:
        advective_dt = cfl_dt(state, p, cfg.time.cfl_safety)
        if advective_dt < cfg.monitor.dt_floor:
            # CFL collapse (runaway nonlocal speed), not an end-of-run clamp
            status, t_star = "suspected_blowup", state.t
            break
        dt = min(cfg.time.dt_max, advective_dt, T - state.t)
        if sample_dt is not None:
            dt = min(dt, next_k * sample_dt - state.t)
        if dt <= 0:
            break
        new_state = None
        while new_state is None:
            try:
                new_state = step(
                    state, p,
                    StepControl(dt, cfg.time.cfl_safety, scheme,
                                cfg.advection, cfg.diffusion),
                    bc=data.bc,
                )
            except CFLViolationError:
                # speed grew inside the step; shrink and retry
                dt *= 0.5
                if dt < cfg.monitor.dt_floor:
                    break
        if new_state is None:
            status, t_star = "suspected_blowup", state.t
            break
        state = new_state
        steps += 1

        at_sample = (
            (sample_dt is None and steps % cfg.outputs.cadence == 0)
            or (sample_dt is not None and state.t >= next_k * sample_dt - tiny)
            or state.t >= T - tiny
            or state.diverged
        )
        if not at_sample:
            continue
        if sample_dt is not None and state.t >= next_k * sample_dt - tiny:
            next_k += 1
        row = sample(state, dt_taken=dt)
        if state.diverged:
            status, t_star = "diverged", state.t
            break
        last = history[-1]
        if last.grad > thresholds.grad_growth * max(grad0, np.finfo(float).tiny):
            status, t_star = "suspected_blowup", state.t
            break
        if wall_abort and (row.flags & FLAG_WALL_CONTAMINATION):
            status, t_star = "wall_contaminated", state.t
            break

    if rows[-1].t < state.t - tiny:
        sample(state, dt_taken=math.inf)
    return _RunResult(
        status=status,
        t_star=t_star,
        state=state,
        steps=steps,
        rows=rows,
        records=records,
        monitor_history=history,
        criterion_value=criterion,
        exact=data.exact,
        bound_params=data.bound_params,
        u0=data.u0,
        v0=data.v0,
    )


def _virial_summary(cfg: ScenarioConfig, res: _RunResult) -> dict:
    monitor = blowup_monitor(
        res.monitor_history,
        MonitorThresholds(cfg.monitor.grad_growth, cfg.monitor.dt_floor),
    )
    out = {
        "rhs_bound": res.criterion_value,
        "monitor_state": monitor.state,
        "t_star": monitor.t_star,
        "phi_dd_max": None,
        "phi_dd_violation_max": None,
    }
    rows = res.rows
    if len(rows) >= 5:
        ts = np.array([r.t for r in rows])
        phis = np.array([r.phi for r in rows])
        flags = np.array([r.flags for r in rows])
        centers, ypp = second_difference(ts, phis)
        # a window is valid when none of its five samples touches the wall
        valid = np.array(
            [not np.any(flags[i - 2 : i + 3] & FLAG_WEIGHTED_DATA_INVALID)
             for i in range(2, len(rows) - 2)]
        )
        if np.any(valid):
            sel = ypp[valid]
            out["phi_dd_max"] = float(np.max(sel))
            out["phi_dd_violation_max"] = float(np.max(sel - res.criterion_value))
    return out


def _write_outputs(
    cfg: ScenarioConfig, g: Grid, p: PhysParams, res: _RunResult, report: RunReport
) -> RunReport:
    outdir = cfg.outputs.directory
    if not outdir:
        return report
    os.makedirs(outdir, exist_ok=True)
    series_path = os.path.join(outdir, cfg.outputs.series)
    write_timeseries(res.rows, series_path)
    snaps: list[str] = []
    if cfg.outputs.snapshots:
        def snap_of(t, u, v):
            return Snapshot(
                t=t, L=g.L, N=g.N, a=p.a, b=p.b, epsilon=p.epsilon,
                advection=cfg.advection, splitting="strang_tst",
                diffusion=cfg.diffusion, u=u, v=v,
            )

        if res.u0 is not None:
            initial = os.path.join(outdir, "snapshot_initial.bny")
            write_snapshot(snap_of(0.0, res.u0, res.v0), initial)
            snaps.append(initial)
        final = os.path.join(outdir, "snapshot_final.bny")
        write_snapshot(snap_of(res.state.t, res.state.u, res.state.v), final)
        snaps.append(final)
    report = replace(report, series_path=series_path, snapshot_paths=tuple(snaps))
    report.write_json(os.path.join(outdir, "report.json"))
    return report


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    """Run one scenario to T (or to a monitor stop) and report.

    Deterministic given the config, including the seed; sweep and
    convergence configs are dispatched to their dedicated drivers.
    """
    if cfg.scenario == "viscosity_sweep":
        return viscosity_sweep(cfg)
    if cfg.scenario == "convergence":
        return convergence_study(cfg)
    g = make_grid(cfg.grid.L, cfg.grid.N)
    p = cfg.physics
    if cfg.scenario == "boundstate_propagation" and cfg.initial_data.generator != "boundstate":
        raise ConfigValidationError(
            "initial_data.generator must be 'boundstate' for boundstate_propagation"
        )
    data = generate_initial_data(cfg.initial_data, g, p)
    wall_abort = cfg.monitor.wall_abort and cfg.scenario not in (
        "blowup",
        "boundstate_propagation",
    )
    res = _run_loop(cfg, g, p, data, wall_abort)

    tracking = None
    if res.exact is not None:
        ue, ve = res.exact(res.state.t)
        tracking = {
            "t": res.state.t,
            "err_u_l2": math.sqrt(integrate(np.abs(res.state.u - ue) ** 2, g)),
            "err_v_l2": math.sqrt(integrate((res.state.v - ve) ** 2, g)),
        }

    report = RunReport(
        scenario=cfg.scenario,
        status=res.status,
        t_final=res.state.t,
        steps=res.steps,
        criterion_value=res.criterion_value,
        criterion_negative=res.criterion_value < 0,
        drift=drift_summary(res.records),
        virial=_virial_summary(cfg, res),
        tracking=tracking,
    )
    return _write_outputs(cfg, g, p, res, report)


def viscosity_sweep(cfg: ScenarioConfig, eps_list=None) -> RunReport:
    """Run the same data at a descending viscosity ladder and compare.

    Reports pairwise L2(x) distances of the long wave at T, the viscous
    dissipation ledgers, and the Richardson extrapolation in eps of
    int v^2 from the two smallest members (the desk-scale proxy for the
    vanishing-viscosity limit), with its defect against the smallest-eps
    run at every shared sample time.
    """
    eps = tuple(float(e) for e in (eps_list if eps_list is not None else cfg.eps_list))
    if len(eps) < 2:
        raise ConfigValidationError("sweep.eps_list needs at least two viscosities")
    if any(e <= 0 for e in eps) or any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
        raise ConfigValidationError(
            f"sweep.eps_list must be strictly decreasing positives, got {eps}"
        )
    if max(eps) > cfg.eps_warn:
        print(
            f"warning: viscosity {max(eps)} exceeds the sweep bound {cfg.eps_warn}; "
            "the regularized problem is only guaranteed well-posed for small viscosity",
            file=sys.stderr,
        )
    g = make_grid(cfg.grid.L, cfg.grid.N)
    sample_dt = cfg.outputs.sample_dt or cfg.time.T / 100.0
    base = replace(cfg, outputs=replace(cfg.outputs, sample_dt=sample_dt))
    data = generate_initial_data(cfg.initial_data, g, cfg.physics)

    results: list[_RunResult] = []
    for e in eps:
        p_eps = PhysParams(a=cfg.physics.a, b=cfg.physics.b, epsilon=e)
        res = _run_loop(base, g, p_eps, data, wall_abort=cfg.monitor.wall_abort)
        if res.status != "completed":
            raise RuntimeError(f"sweep member eps={e} stopped early: {res.status}")
        results.append(res)

    times = [np.array([r.t for r in res.rows]) for res in results]
    for ts in times[1:]:
        if ts.shape != times[0].shape or not np.allclose(ts, times[0], atol=1e-10):
            raise RuntimeError("sweep members lost sample-time alignment")

    pairwise = [
        math.sqrt(integrate((r1.state.v - r2.state.v) ** 2, g))
        for r1, r2 in zip(results, results[1:])
    ]
    ledger_e_final = [res.rows[-1].visc_E_ledger for res in results]
    ledger_m_final = [res.rows[-1].visc_M_ledger for res in results]

    a = cfg.physics.a
    i_prev = np.array([r.c_speed for r in results[-2].rows]) / a
    i_last = np.array([r.c_speed for r in results[-1].rows]) / a
    e_prev, e_last = eps[-2], eps[-1]
    c_est = i_last + (i_last - i_prev) * e_last / (e_prev - e_last)
    defect = c_est - i_last

    sweep = {
        "eps": list(eps),
        "pairwise_v_l2": pairwise,
        "ledger_e_final": ledger_e_final,
        "ledger_m_final": ledger_m_final,
        "c_defect_min": float(np.min(defect)),
        "c_defect_max": float(np.max(defect)),
        "sample_dt": sample_dt,
    }

    report = RunReport(
        scenario="viscosity_sweep",
        status="completed",
        t_final=results[-1].state.t,
        steps=sum(r.steps for r in results),
        criterion_value=results[-1].criterion_value,
        criterion_negative=results[-1].criterion_value < 0,
        drift=drift_summary(results[-1].records),
        virial=_virial_summary(base, results[-1]),
        sweep=sweep,
    )
    outdir = cfg.outputs.directory
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        for e, res in zip(eps, results):
            write_timeseries(res.rows, os.path.join(outdir, f"series_eps{e:g}.csv"))
        report = replace(
            report,
            series_path=os.path.join(outdir, f"series_eps{eps[-1]:g}.csv"),
        )
        report.write_json(os.path.join(outdir, "report.json"))
    return report


def convergence_study(cfg: ScenarioConfig, levels: int | None = None) -> RunReport:
    """Joint (dx, dt) refinement; observed orders for u and v separately.

    The reference is the analytic bound state when the scenario carries
    one, otherwise the finest level restricted to the coarser grids.
    Refuses to start when the finest level would not fit in memory.
    """
    levels = int(levels if levels is not None else cfg.levels)
    if levels < 3:
        raise ConfigValidationError(f"convergence.levels must be >= 3, got {levels}")
    if not math.isfinite(cfg.time.dt_max):
        raise ConfigValidationError(
            "time.dt_max must be finite for a convergence study (it sets the level-0 dt)"
        )
    n_finest = cfg.grid.N * 2 ** (levels - 1)
    est_bytes = 24 * (n_finest + 1) * 30
    if est_bytes > _MEMORY_BUDGET_BYTES:
        raise ConfigValidationError(
            f"finest level N={n_finest} would need about {est_bytes / 2**20:.0f} MiB; "
            "reduce grid.N or convergence.levels"
        )

    runs: list[tuple[Grid, _RunResult]] = []
    for i in range(levels):
        n_i = cfg.grid.N * 2**i
        cfg_i = replace(
            cfg,
            grid=replace(cfg.grid, N=n_i),
            time=replace(cfg.time, dt_max=cfg.time.dt_max / 2**i),
        )
        g_i = make_grid(cfg_i.grid.L, cfg_i.grid.N)
        data_i = generate_initial_data(cfg.initial_data, g_i, cfg.physics)
        res_i = _run_loop(cfg_i, g_i, cfg.physics, data_i, wall_abort=False)
        if res_i.status != "completed":
            raise RuntimeError(f"convergence level {i} stopped early: {res_i.status}")
        runs.append((g_i, res_i))

    table: list[dict] = []
    errs_u: list[float] = []
    errs_v: list[float] = []
    g_fine, res_fine = runs[-1]
    for i, (g_i, res_i) in enumerate(runs):
        if res_i.exact is not None:
            ue, ve = res_i.exact(res_i.state.t)
        elif i < levels - 1:
            stride = 2 ** (levels - 1 - i)
            ue, ve = res_fine.state.u[::stride], res_fine.state.v[::stride]
        else:
            ue, ve = res_i.state.u, res_i.state.v  # finest vs itself: zero
        errs_u.append(math.sqrt(integrate(np.abs(res_i.state.u - ue) ** 2, g_i)))
        errs_v.append(math.sqrt(integrate((res_i.state.v - ve) ** 2, g_i)))
        table.append(
            {
                "level": i,
                "N": g_i.N,
                "dt": cfg.time.dt_max / 2**i,
                "err_u_l2": errs_u[-1],
                "err_v_l2": errs_v[-1],
            }
        )
    n_cmp = levels if runs[0][1].exact is not None else levels - 1
    for i in range(1, n_cmp):
        table[i]["order_u"] = (
            math.log2(errs_u[i - 1] / errs_u[i]) if errs_u[i] > 0 else math.inf
        )
        table[i]["order_v"] = (
            math.log2(errs_v[i - 1] / errs_v[i]) if errs_v[i] > 0 else math.inf
        )

    g0, res0 = runs[0]
    report = RunReport(
        scenario="convergence",
        status="completed",
        t_final=res0.state.t,
        steps=sum(r.steps for _, r in runs),
        criterion_value=res0.criterion_value,
        criterion_negative=res0.criterion_value < 0,
        drift=drift_summary(res0.records),
        virial=_virial_summary(cfg, res0),
        convergence=table,
    )
    outdir = cfg.outputs.directory
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        for i, (_, res_i) in enumerate(runs):
            write_timeseries(res_i.rows, os.path.join(outdir, f"series_level{i}.csv"))
        report = replace(report, series_path=os.path.join(outdir, "series_level0.csv"))
        report.write_json(os.path.join(outdir, "report.json"))
    return report
