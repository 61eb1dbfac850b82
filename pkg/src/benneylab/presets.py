"""Shipped scenario presets.

Scheme profile: the monotone first-order upwind flux is the default for
rough or focusing regimes (blowup presets), while the identity and
convergence studies use the minmod-limited second-order flux so that the
long-wave discretization error refines at the same rate as everything
else.  The blow-up preset's criterion sign is always re-measured from
quadrature at run time, never hard-coded.
"""

from __future__ import annotations

import math

from .core import PhysParams
from .dynamics import DIFFUSION_TRAPEZOID, MINMOD2, UPWIND1
from .experiments import (
    GridConfig,
    InitialDataConfig,
    MonitorConfig,
    OutputConfig,
    ScenarioConfig,
    TimeConfig,
)

__all__ = ["PRESETS", "preset"]

# standing bound state: a tuned so the frame speed is exactly zero
# (s* = a * alpha with b = 1, s* = 2, mu* = 1, alpha = 2*sqrt(2)/3)
STANDING_A = 3.0 / math.sqrt(2.0)


def conservation(epsilon: float = 0.0, N: int = 2048, dt_max: float = 2e-3,
                 T: float = 1.0, outdir: str = "") -> ScenarioConfig:
    """Smooth u-dominated run; the nonlocal speed stays small so the time
    step is accuracy-limited, not CFL-limited."""
    return ScenarioConfig(
        scenario="conservation",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=0.25, b=0.5, epsilon=epsilon),
        time=TimeConfig(T=T, cfl_safety=0.9, dt_max=dt_max),
        initial_data=InitialDataConfig(
            generator="gaussian_u+bump_v",
            params={
                "amplitude": 1.2, "center": 15.0, "width": 1.5, "carrier": 0.8,
                "v_amplitude": 0.1, "v_center": 20.0, "v_width": 3.0,
            },
        ),
        outputs=OutputConfig(directory=outdir),
        advection=MINMOD2,
    )


def identity_study(epsilon: float = 0.0, N: int = 1024, dt_max: float = 4e-3,
                   T: float = 1.0, outdir: str = "") -> ScenarioConfig:
    """Moderate two-field run with real long-wave dynamics, for the viscous
    balance and virial identity checks."""
    return ScenarioConfig(
        scenario="conservation",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=1.0, b=0.75, epsilon=epsilon),
        time=TimeConfig(T=T, cfl_safety=0.9, dt_max=dt_max),
        initial_data=InitialDataConfig(
            generator="gaussian_u+bump_v",
            params={
                "amplitude": 1.0, "center": 15.0, "width": 2.0, "carrier": 0.5,
                "v_amplitude": 0.4, "v_center": 18.0, "v_width": 3.0,
            },
        ),
        outputs=OutputConfig(directory=outdir),
        advection=MINMOD2,
        diffusion=DIFFUSION_TRAPEZOID,
    )


def blowup(N: int = 4096, outdir: str = "") -> ScenarioConfig:
    """Deep attractive well (b < 0, v > 0) co-located with a short-wave
    packet; the negative carrier makes the momentum strongly negative, so
    the nonexistence sign 8E(0)+b^2 M(0) < 0 holds with a wide margin.
    The sign is re-measured from quadrature at run time."""
    return ScenarioConfig(
        scenario="blowup",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=0.01, b=-6.5),
        time=TimeConfig(T=2.0, cfl_safety=0.9, dt_max=2e-3),
        initial_data=InitialDataConfig(
            generator="gaussian_u+bump_v",
            params={
                "amplitude": 3.2, "center": 14.0, "width": 1.0, "carrier": -0.5,
                "v_amplitude": 3.2, "v_center": 14.0, "v_width": 1.0,
            },
        ),
        outputs=OutputConfig(directory=outdir),
        monitor=MonitorConfig(grad_growth=100.0, dt_floor=1e-8, wall_abort=False),
        advection=UPWIND1,
    )


def blowup_control(N: int = 4096, outdir: str = "") -> ScenarioConfig:
    return ScenarioConfig(
        scenario="blowup",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=1.0, b=1.0),
        time=TimeConfig(T=2.0, cfl_safety=0.9, dt_max=5e-3),
        initial_data=InitialDataConfig(
            generator="gaussian_u+bump_v",
            params={
                "amplitude": 0.2, "center": 20.0, "width": 2.0, "carrier": 0.0,
                "v_amplitude": 0.1, "v_center": 20.0, "v_width": 2.0,
            },
        ),
        outputs=OutputConfig(directory=outdir),
        monitor=MonitorConfig(grad_growth=100.0, dt_floor=1e-8, wall_abort=False),
        advection=UPWIND1,
    )


def viscosity_sweep_preset(N: int = 1024, outdir: str = "") -> ScenarioConfig:
    return ScenarioConfig(
        scenario="viscosity_sweep",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=1.0, b=0.75, epsilon=1e-1),
        time=TimeConfig(T=1.0, cfl_safety=0.9, dt_max=2e-3),
        initial_data=InitialDataConfig(
            generator="gaussian_u+bump_v",
            params={
                "amplitude": 1.0, "center": 15.0, "width": 2.0, "carrier": 0.5,
                "v_amplitude": 0.4, "v_center": 18.0, "v_width": 3.0,
            },
        ),
        outputs=OutputConfig(directory=outdir, sample_dt=0.02),
        eps_list=(1e-1, 5e-2, 2.5e-2),
        advection=MINMOD2,
        diffusion=DIFFUSION_TRAPEZOID,
    )


def boundstate_propagation(N: int = 1024, T: float = 1.0, dt_max: float = 5e-3,
                           outdir: str = "") -> ScenarioConfig:
    return ScenarioConfig(
        scenario="boundstate_propagation",
        grid=GridConfig(L=40.0, N=N),
        physics=PhysParams(a=STANDING_A, b=1.0),
        time=TimeConfig(T=T, cfl_safety=0.9, dt_max=dt_max),
        initial_data=InitialDataConfig(
            generator="boundstate", params={"s_star": 2.0, "mu_star": 1.0},
        ),
        outputs=OutputConfig(directory=outdir),
        monitor=MonitorConfig(wall_abort=False),
        advection=MINMOD2,
    )


def convergence_preset(N: int = 256, levels: int = 3, outdir: str = "") -> ScenarioConfig:
    cfg = boundstate_propagation(N=N, T=0.5, dt_max=8e-3, outdir=outdir)
    return ScenarioConfig(
        scenario="convergence",
        grid=cfg.grid,
        physics=cfg.physics,
        time=cfg.time,
        initial_data=cfg.initial_data,
        outputs=cfg.outputs,
        monitor=cfg.monitor,
        advection=cfg.advection,
        levels=levels,
    )


PRESETS = {
    "conservation": conservation,
    "conservation_viscous": lambda **kw: conservation(epsilon=1e-2, **kw),
    "identity_study": identity_study,
    "blowup": blowup,
    "blowup_control": blowup_control,
    "viscosity_sweep": viscosity_sweep_preset,
    "boundstate": boundstate_propagation,
    "convergence": convergence_preset,
}


def preset(name: str, **kwargs) -> ScenarioConfig:
    """Look up a shipped preset by name."""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
    return factory(**kwargs)
