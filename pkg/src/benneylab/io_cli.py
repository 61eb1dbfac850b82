"""Config ingestion and the command-line entry point.

Config files are INI-style documents with sections [scenario], [grid],
[physics], [time], [initial_data], [outputs], [monitor], [sweep],
[convergence].  Parsing is strict: unknown sections or keys are errors, so
typos cannot silently change a sweep.  `CONFIG` arguments also accept
`preset:NAME` to use a shipped preset.

Exit codes: 0 success, 1 validation error, 2 run stopped before T (report
still written), 3 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

from .core import PhysParams
from .dynamics import ADVECTION_SCHEMES, DIFFUSION_BACKWARD, DIFFUSION_SCHEMES, UPWIND1
from .boundstate import ParameterError, kink_profile, solve_parameters, w_profile
from .experiments import (
    ConfigValidationError,
    GridConfig,
    InitialDataConfig,
    MonitorConfig,
    OutputConfig,
    ScenarioConfig,
    TimeConfig,
    convergence_study,
    run_scenario,
    viscosity_sweep,
)
from .presets import PRESETS, preset
from .storage import (
    CSV_HEADER,
    Snapshot,
    SnapshotFormatError,
    TimeSeriesFormatError,
    TimeSeriesRow,
    read_snapshot,
    read_timeseries,
    rows_to_records,
    write_snapshot,
    write_timeseries,
)
from .diagnostics import drift_summary

__all__ = [
    "ConfigError",
    "load_config",
    "cli_main",
    "main",
    # persistence surface, re-exported
    "CSV_HEADER",
    "TimeSeriesRow",
    "TimeSeriesFormatError",
    "Snapshot",
    "SnapshotFormatError",
    "read_timeseries",
    "write_timeseries",
    "read_snapshot",
    "write_snapshot",
]


class ConfigError(ValueError):
    """Config parse or validation failure; message names the key."""


_GENERATOR_KEYS = {
    "zero": set(),
    "gaussian_u": {"amplitude", "center", "width", "carrier"},
    "bump_v": {"v_amplitude", "v_center", "v_width"},
    "gaussian_u+bump_v": {
        "amplitude", "center", "width", "carrier",
        "v_amplitude", "v_center", "v_width",
    },
    "boundstate": {"s_star", "mu_star"},
}

_SECTION_KEYS = {
    "scenario": {"name", "seed", "advection", "diffusion"},
    "grid": {"L", "N"},
    "physics": {"a", "b", "epsilon"},
    "time": {"T", "cfl_safety", "dt_max"},
    "initial_data": None,  # generator-dependent, checked separately
    "outputs": {"directory", "series", "cadence", "sample_dt", "snapshots"},
    "monitor": {"grad_growth", "dt_floor", "wall_abort"},
    "sweep": {"eps_list", "eps_warn"},
    "convergence": {"levels"},
}


class _Section:
    def __init__(self, name: str, raw: dict[str, str]):
        self.name = name
        self.raw = raw

    def get_float(self, key: str, default=None) -> float:
        if key not in self.raw:
            if default is None:
                raise ConfigError(f"{self.name}.{key} is required")
            return default
        try:
            return float(self.raw[key])
        except ValueError:
            raise ConfigError(
                f"{self.name}.{key} must be a number, got {self.raw[key]!r}"
            ) from None

    def get_int(self, key: str, default=None) -> int:
        if key not in self.raw:
            if default is None:
                raise ConfigError(f"{self.name}.{key} is required")
            return default
        try:
            return int(self.raw[key])
        except ValueError:
            raise ConfigError(
                f"{self.name}.{key} must be an integer, got {self.raw[key]!r}"
            ) from None

    def get_bool(self, key: str, default: bool) -> bool:
        if key not in self.raw:
            return default
        val = self.raw[key].strip().lower()
        if val in ("true", "yes", "on", "1"):
            return True
        if val in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{self.name}.{key} must be a boolean, got {self.raw[key]!r}")

    def get_str(self, key: str, default=None) -> str:
        if key not in self.raw:
            if default is None:
                raise ConfigError(f"{self.name}.{key} is required")
            return default
        return self.raw[key].strip()


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario config file (strict mode)."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keys are case-sensitive (L vs l)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    for sec in parser.sections():
        if sec not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{sec}]")
        allowed = _SECTION_KEYS[sec]
        if allowed is not None:
            for key in parser[sec]:
                if key not in allowed:
                    raise ConfigError(f"unknown key {sec}.{key}")

    def section(name: str) -> _Section:
        return _Section(name, dict(parser[name]) if parser.has_section(name) else {})

    scen = section("scenario")
    if not parser.has_section("scenario"):
        raise ConfigError("[scenario] section is required")
    name = scen.get_str("name")
    seed = scen.get_int("seed", 0)
    advection = scen.get_str("advection", UPWIND1)
    if advection not in ADVECTION_SCHEMES:
        raise ConfigError(
            f"scenario.advection must be one of {ADVECTION_SCHEMES}, got {advection!r}"
        )
    diffusion = scen.get_str("diffusion", DIFFUSION_BACKWARD)
    if diffusion not in DIFFUSION_SCHEMES:
        raise ConfigError(
            f"scenario.diffusion must be one of {DIFFUSION_SCHEMES}, got {diffusion!r}"
        )

    if not parser.has_section("grid"):
        raise ConfigError("[grid] section is required")
    gsec = section("grid")
    grid = GridConfig(L=gsec.get_float("L"), N=gsec.get_int("N"))
    if grid.L <= 0:
        raise ConfigError("grid.L must be > 0")
    if grid.N < 8:
        raise ConfigError("grid.N must be >= 8")

    if not parser.has_section("physics"):
        raise ConfigError("[physics] section is required")
    psec = section("physics")
    a = psec.get_float("a")
    b = psec.get_float("b")
    epsilon = psec.get_float("epsilon", 0.0)
    if a <= 0:
        raise ConfigError("physics.a must be > 0")
    if b == 0:
        raise ConfigError(
            "physics.b must be nonzero (b = 0 decouples the long wave "
            "into a linear transport problem and is out of scope)"
        )
    if epsilon < 0:
        raise ConfigError("physics.epsilon must be >= 0")

    tsec = section("time")
    time_cfg = TimeConfig(
        T=tsec.get_float("T", 1.0),
        cfl_safety=tsec.get_float("cfl_safety", 0.9),
        dt_max=tsec.get_float("dt_max", math.inf),
    )

    isec = section("initial_data")
    generator = isec.get_str("generator", "zero")
    if generator not in _GENERATOR_KEYS:
        raise ConfigError(
            f"initial_data.generator must be one of {sorted(_GENERATOR_KEYS)}, "
            f"got {generator!r}"
        )
    allowed = _GENERATOR_KEYS[generator] | {"generator"}
    for key in isec.raw:
        if key not in allowed:
            raise ConfigError(f"unknown key initial_data.{key}")
    params = {k: isec.get_float(k) for k in isec.raw if k != "generator"}

    osec = section("outputs")
    sample_dt_raw = osec.get_str("sample_dt", "")
    outputs = OutputConfig(
        directory=osec.get_str("directory", ""),
        series=osec.get_str("series", "series.csv"),
        cadence=osec.get_int("cadence", 1),
        sample_dt=float(sample_dt_raw) if sample_dt_raw else None,
        snapshots=osec.get_bool("snapshots", True),
    )

    msec = section("monitor")
    monitor = MonitorConfig(
        grad_growth=msec.get_float("grad_growth", 1e3),
        dt_floor=msec.get_float("dt_floor", 1e-8),
        wall_abort=msec.get_bool("wall_abort", True),
    )

    ssec = section("sweep")
    eps_list: tuple[float, ...] = (1e-1, 5e-2, 2.5e-2)
    if "eps_list" in ssec.raw:
        try:
            eps_list = tuple(float(v) for v in ssec.raw["eps_list"].split(","))
        except ValueError:
            raise ConfigError(
                f"sweep.eps_list must be comma-separated numbers, got "
                f"{ssec.raw['eps_list']!r}"
            ) from None
    eps_warn = ssec.get_float("eps_warn", 0.5)

    csec = section("convergence")
    levels = csec.get_int("levels", 3)

    try:
        return ScenarioConfig(
            scenario=name,
            grid=grid,
            physics=PhysParams(a=a, b=b, epsilon=epsilon),
            time=time_cfg,
            initial_data=InitialDataConfig(generator=generator, params=params),
            outputs=outputs,
            monitor=monitor,
            seed=seed,
            advection=advection,
            diffusion=diffusion,
            eps_list=eps_list,
            eps_warn=eps_warn,
            levels=levels,
        )
    except (ConfigValidationError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _resolve_config(spec: str, outdir: str | None) -> ScenarioConfig:
    if spec.startswith("preset:"):
        name = spec.split(":", 1)[1]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
        return preset(name, outdir=outdir or f"runs/{name}")
    cfg = load_config(spec)
    if outdir:
        from dataclasses import replace

        cfg = replace(cfg, outputs=replace(cfg.outputs, directory=outdir))
    return cfg


_STATUS_EXIT = {"completed": 0, "suspected_blowup": 2, "diverged": 2, "wall_contaminated": 2}


def _print_report(report) -> None:
    print(f"scenario: {report.scenario}")
    print(f"status:   {report.status} (t_final = {report.t_final:.17g})")
    print(f"8E(0)+b^2M(0) = {report.criterion_value:.17g} "
          f"({'negative: no global solution' if report.criterion_negative else 'nonnegative'})")
    d = report.drift
    print(f"drift:    P(rel) {d.p_rel_drift_max:.3e}  E {d.e_drift_max:.3e}  "
          f"M {d.m_drift_max:.3e}  E-defect {d.e_defect_max:.3e}  "
          f"M-defect {d.m_defect_max:.3e}")
    if report.virial.get("t_star") is not None:
        print(f"monitor:  {report.virial['monitor_state']} at t* = {report.virial['t_star']:.6g}")
    if report.tracking:
        print(f"tracking: |u-exact|_2 = {report.tracking['err_u_l2']:.3e}  "
              f"|v-exact|_2 = {report.tracking['err_v_l2']:.3e}")
    if report.sweep:
        print(f"sweep:    eps = {report.sweep['eps']}")
        print(f"          pairwise |v_eps - v_eps/2|_2 = "
              f"{[f'{x:.3e}' for x in report.sweep['pairwise_v_l2']]}")
        print(f"          c(t) defect range = [{report.sweep['c_defect_min']:.3e}, "
              f"{report.sweep['c_defect_max']:.3e}]")
    if report.convergence:
        for row in report.convergence:
            extra = ""
            if "order_u" in row:
                extra = f"  order_u {row['order_u']:.2f}  order_v {row['order_v']:.2f}"
            print(f"level {row['level']}: N {row['N']:>6}  err_u {row['err_u_l2']:.3e}  "
                  f"err_v {row['err_v_l2']:.3e}{extra}")
    if report.series_path:
        print(f"series:   {report.series_path}")


def cli_main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="benneylab",
        description="Numerical laboratory for the nonlocal short-wave/long-wave system",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="config path or preset:NAME")
    p_run.add_argument("--outdir", help="override outputs.directory")

    p_sweep = sub.add_parser("sweep", help="viscosity sweep over a config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--eps", help="comma-separated descending viscosities")
    p_sweep.add_argument("--outdir")

    p_conv = sub.add_parser("converge", help="joint (dx, dt) refinement study")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", type=int)
    p_conv.add_argument("--outdir")

    p_bs = sub.add_parser("boundstate", help="construct a traveling bound state")
    p_bs.add_argument("--a", type=float, required=True)
    p_bs.add_argument("--b", type=float, required=True)
    p_bs.add_argument("--sstar", type=float, required=True)
    p_bs.add_argument("--mustar", type=float, required=True)
    p_bs.add_argument("--table", help="write a profile table CSV to this path")
    p_bs.add_argument("--xmax", type=float, default=20.0)
    p_bs.add_argument("--samples", type=int, default=2001)

    p_check = sub.add_parser("check", help="re-verify invariant drifts from a series file")
    p_check.add_argument("series")
    p_check.add_argument("--report", help="compare against a report.json")

    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0

    try:
        if args.command == "run":
            cfg = _resolve_config(args.config, args.outdir)
            report = run_scenario(cfg)
            _print_report(report)
            return _STATUS_EXIT.get(report.status, 2)

        if args.command == "sweep":
            cfg = _resolve_config(args.config, args.outdir)
            eps = None
            if args.eps:
                eps = tuple(float(v) for v in args.eps.split(","))
            report = viscosity_sweep(cfg, eps_list=eps)
            _print_report(report)
            return _STATUS_EXIT.get(report.status, 2)

        if args.command == "converge":
            cfg = _resolve_config(args.config, args.outdir)
            report = convergence_study(cfg, levels=args.levels)
            _print_report(report)
            return _STATUS_EXIT.get(report.status, 2)

        if args.command == "boundstate":
            bp = solve_parameters(args.a, args.b, args.sstar, args.mustar)
            for name, val in (
                ("mu", bp.mu), ("lambda", bp.lam), ("s_star", bp.s_star),
                ("s", bp.s), ("omega", bp.omega), ("k", bp.k_wave),
                ("c", bp.c_const), ("alpha", bp.alpha), ("r_inf", bp.r_inf),
                ("gamma", bp.gamma),
            ):
                print(f"{name:>7} = {val:.17g}")
            if args.table:
                import numpy as np

                xs = np.linspace(0.0, args.xmax, args.samples)
                r, rp = kink_profile(bp, xs)
                w = w_profile(bp, xs)
                with open(args.table, "w") as fh:
                    fh.write("x,r,rprime,w\n")
                    for row in zip(xs, r, rp, w):
                        fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
                print(f"profile table written to {args.table}")
            return 0

        if args.command == "check":
            rows = read_timeseries(args.series)
            if not rows:
                print("empty series: nothing to verify", file=sys.stderr)
                return 1
            summary = drift_summary(rows_to_records(rows))
            print(f"rows:               {len(rows)}  (t in [{rows[0].t:.17g}, {rows[-1].t:.17g}])")
            print(f"P relative drift:   {summary.p_rel_drift_max:.17g}")
            print(f"E drift:            {summary.e_drift_max:.17g}")
            print(f"M drift:            {summary.m_drift_max:.17g}")
            print(f"E defect (ledger):  {summary.e_defect_max:.17g}")
            print(f"M defect (ledger):  {summary.m_defect_max:.17g}")
            if args.report:
                with open(args.report) as fh:
                    rep = json.load(fh)
                want = rep.get("drift", {})
                got = {
                    "p_rel_drift_max": summary.p_rel_drift_max,
                    "e_drift_max": summary.e_drift_max,
                    "m_drift_max": summary.m_drift_max,
                    "e_defect_max": summary.e_defect_max,
                    "m_defect_max": summary.m_defect_max,
                }
                if want != got:
                    print(f"mismatch against {args.report}: {want} != {got}",
                          file=sys.stderr)
                    return 1
                print(f"matches {args.report}")
            return 0
    except (ConfigError, ConfigValidationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TimeSeriesFormatError, SnapshotFormatError) as exc:
        print(f"file format error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
