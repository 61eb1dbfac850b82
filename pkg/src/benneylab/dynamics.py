"""Strang-split time integration of the coupled short-wave/long-wave system.

One step advances (u, v) by dt as half transport, full Schrodinger update,
half transport.  The Schrodinger substep is itself split: exact pointwise
phase rotation for dt/2 (the nonlinear ODE i u_t = (|u|^2 + b v) u preserves
|u| at every node, so the rotation is exact), a Crank-Nicolson solve of the
free dispersion i u_t + u_xx = 0 over dt (a unitary tridiagonal solve with
Dirichlet ends), then rotation for dt/2.  The transport substep freezes the
nonlocal speed c = a*int(v^2) at its midpoint, advects v with an upwind
flux (first-order monotone by default, minmod-limited second order for
convergence studies), applies the conservative source -b d/dx |u|^2 in
half-doses around the advection, and, for epsilon > 0, an implicit
diffusion solve (backward Euler by default) that is unconditionally stable
in epsilon.

Boundary values default to the homogeneous Dirichlet data of the half-line
problem (u = 0 at both ends, v = 0 at the inflow x = 0; v at x = L is free
under advection and pinned only by the diffusion solve).  A BoundaryValues
override supplies time-dependent Dirichlet data at both ends, which is how
traveling bound states are propagated: they solve the equations but not the
homogeneous boundary-value problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .core import Grid, PhysParams, integrate, ddx, _check_field

__all__ = [
    "UPWIND1",
    "MINMOD2",
    "ADVECTION_SCHEMES",
    "DIFFUSION_BACKWARD",
    "DIFFUSION_TRAPEZOID",
    "DIFFUSION_SCHEMES",
    "SimState",
    "StepControl",
    "BoundaryValues",
    "CFLViolationError",
    "nonlocal_speed",
    "phase_rotation",
    "crank_nicolson",
    "upwind_advect",
    "implicit_diffusion",
    "schrodinger_step",
    "transport_step",
    "step",
    "cfl_dt",
]

UPWIND1 = "upwind1"
MINMOD2 = "minmod2"
ADVECTION_SCHEMES = (UPWIND1, MINMOD2)

DIFFUSION_BACKWARD = "backward"
DIFFUSION_TRAPEZOID = "trapezoid"
DIFFUSION_SCHEMES = (DIFFUSION_BACKWARD, DIFFUSION_TRAPEZOID)
_DIFFUSION_THETA = {DIFFUSION_BACKWARD: 1.0, DIFFUSION_TRAPEZOID: 0.5}

# relative slack when testing the Courant number so that c*dt = dx passes
_CFL_SLACK = 1e-9


class CFLViolationError(RuntimeError):
    """Advection step rejected: Courant number exceeds 1."""


@dataclass(frozen=True)
class SimState:
    """Time plus nodal (u, v) fields on a shared grid.

    diverged is set once any entry becomes non-finite and is never cleared;
    a step applied to a diverged state is a no-op.
    """

    t: float
    u: np.ndarray
    v: np.ndarray
    grid: Grid
    diverged: bool = False


@dataclass(frozen=True)
class StepControl:
    """Time-step size and scheme switches for one step."""

    dt: float
    cfl_safety: float = 0.9
    scheme: str = "inviscid"  # "inviscid" or "viscous"
    advection: str = UPWIND1
    diffusion: str = DIFFUSION_BACKWARD

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (0 < self.cfl_safety <= 1):
            raise ValueError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if self.scheme not in ("inviscid", "viscous"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.advection not in ADVECTION_SCHEMES:
            raise ValueError(f"unknown advection scheme {self.advection!r}")
        if self.diffusion not in DIFFUSION_SCHEMES:
            raise ValueError(f"unknown diffusion scheme {self.diffusion!r}")


@dataclass(frozen=True)
class BoundaryValues:
    """Time-dependent Dirichlet data at x = 0 and x = L."""

    u_left: Callable[[float], complex]
    u_right: Callable[[float], complex]
    v_left: Callable[[float], float]
    v_right: Callable[[float], float]


def nonlocal_speed(v: np.ndarray, a: float, g: Grid) -> float:
    """Transport speed a*int(v^2); nonnegative since a > 0."""
    v = _check_field(v, g)
    return a * integrate(v * v, g)


def phase_rotation(u: np.ndarray, v: np.ndarray, b: float, dt: float) -> np.ndarray:
    """Exact pointwise solution of i u_t = (|u|^2 + b v) u over dt."""
    return u * np.exp(-1j * (np.abs(u) ** 2 + b * v) * dt)


def crank_nicolson(
    u: np.ndarray,
    dt: float,
    g: Grid,
    left: complex = 0.0 + 0.0j,
    right: complex = 0.0 + 0.0j,
) -> np.ndarray:
    """One Crank-Nicolson step of i u_t + u_xx = 0 with Dirichlet ends.

    left/right are the boundary values at the end of the step; the old
    boundary values are read from u itself.  With homogeneous ends the
    update is a Cayley transform of the symmetric second-difference
    operator, hence unitary on the interior l2 norm.
    """
    u = _check_field(u, g)
    n_int = g.N - 1
    r = dt / (2.0 * g.dx * g.dx)
    rhs = u[1:-1] + 1j * r * (u[2:] - 2.0 * u[1:-1] + u[:-2])
    rhs = rhs.astype(np.complex128, copy=True)
    rhs[0] += 1j * r * left
    rhs[-1] += 1j * r * right
    ab = np.zeros((3, n_int), dtype=np.complex128)
    ab[0, 1:] = -1j * r
    ab[1, :] = 1.0 + 2j * r
    ab[2, :-1] = -1j * r
    interior = solve_banded((1, 1), ab, rhs)
    out = np.empty_like(u, dtype=np.complex128)
    out[0] = left
    out[1:-1] = interior
    out[-1] = right
    return out


def _minmod(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    s = np.sign(p)
    agree = s * np.sign(q) > 0
    return np.where(agree, s * np.minimum(np.abs(p), np.abs(q)), 0.0)


def upwind_advect(
    v: np.ndarray,
    c: float,
    dt: float,
    g: Grid,
    scheme: str = UPWIND1,
    inflow: float = 0.0,
) -> np.ndarray:
    """Advection v_t + c v_x = 0 for one step, wind from the left (c >= 0).

    upwind1 is the classical monotone first-order scheme (exact at Courant
    number 1).  minmod2 reconstructs limited slopes for a second-order TVD
    update; slopes at the two edge nodes fall back to zero.  The node at
    x = 0 is set to the inflow value; the node at x = L is updated from its
    left neighbour (outflow).
    """
    v = _check_field(v, g)
    if c < 0:
        raise ValueError(f"advection speed must be >= 0, got {c}")
    nu = c * dt / g.dx
    if nu > 1.0 + _CFL_SLACK:
        raise CFLViolationError(
            f"Courant number {nu:.6g} exceeds 1; shrink dt below {g.dx / c:.6g}"
        )
    out = v.astype(np.float64, copy=True)
    if c == 0.0:
        out[0] = inflow
        return out
    if scheme == UPWIND1:
        out[1:] = v[1:] - nu * (v[1:] - v[:-1])
    elif scheme == MINMOD2:
        sigma = np.zeros_like(v)
        sigma[1:-1] = _minmod(v[1:-1] - v[:-2], v[2:] - v[1:-1]) / g.dx
        # flux leaving node j rightward; cell-j reconstruction, c > 0
        flux = c * (v + 0.5 * (g.dx - c * dt) * sigma)
        out[1:] = v[1:] - (dt / g.dx) * (flux[1:] - flux[:-1])
    else:
        raise ValueError(f"unknown advection scheme {scheme!r}")
    out[0] = inflow
    return out


def implicit_diffusion(
    v: np.ndarray,
    eps: float,
    dt: float,
    g: Grid,
    left: float = 0.0,
    right: float = 0.0,
    theta: float = 1.0,
) -> np.ndarray:
    """Implicit theta-step of v_t = eps v_xx with Dirichlet ends.

    theta = 1 is backward Euler (the robust default: L-stable, damps
    grid-frequency noise); theta = 0.5 is the trapezoid rule, whose
    dissipation is second-order consistent in time so the viscous balance
    ledgers close at the same rate as everything else.  Unconditionally
    stable for theta >= 0.5, so eps never constrains the time step.
    """
    v = _check_field(v, g)
    if eps == 0.0:
        return v.astype(np.float64, copy=True)
    if not 0.5 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0.5, 1], got {theta}")
    kappa = eps * dt / (g.dx * g.dx)
    n_int = g.N - 1
    rhs = v[1:-1].astype(np.float64, copy=True)
    if theta < 1.0:
        rhs += (1.0 - theta) * kappa * (v[2:] - 2.0 * v[1:-1] + v[:-2])
    rhs[0] += theta * kappa * left
    rhs[-1] += theta * kappa * right
    ab = np.zeros((3, n_int))
    ab[0, 1:] = -theta * kappa
    ab[1, :] = 1.0 + 2.0 * theta * kappa
    ab[2, :-1] = -theta * kappa
    interior = solve_banded((1, 1), ab, rhs)
    out = np.empty_like(v, dtype=np.float64)
    out[0] = left
    out[1:-1] = interior
    out[-1] = right
    return out


def schrodinger_step(
    u: np.ndarray,
    v: np.ndarray,
    p: PhysParams,
    dt: float,
    g: Grid,
    t: float = 0.0,
    bc: BoundaryValues | None = None,
) -> np.ndarray:
    """Advance i u_t + u_xx = |u|^2 u + b u v by dt with v frozen.

    Rotation dt/2, Crank-Nicolson dt, rotation dt/2.  Every substep
    preserves the discrete l2 norm of u to round-off when the boundary
    data is homogeneous.
    """
    u = _check_field(u, g)
    v = _check_field(v, g)
    u1 = phase_rotation(u, v, p.b, 0.5 * dt)
    if bc is None:
        left = right = 0.0 + 0.0j
        left_cn = right_cn = 0.0 + 0.0j
    else:
        left = complex(bc.u_left(t + dt))
        right = complex(bc.u_right(t + dt))
        # the trailing half-rotation will still act on the boundary nodes,
        # so the Dirichlet data fed to the dispersion solve is pre-rotated
        # by its inverse; pinning the end value directly would inject an
        # O(dt) boundary phase error every step
        left_cn = left * np.exp(1j * (abs(left) ** 2 + p.b * v[0]) * 0.5 * dt)
        right_cn = right * np.exp(1j * (abs(right) ** 2 + p.b * v[-1]) * 0.5 * dt)
    u2 = crank_nicolson(u1, dt, g, left=left_cn, right=right_cn)
    u3 = phase_rotation(u2, v, p.b, 0.5 * dt)
    u3[0] = left
    u3[-1] = right
    return u3


def transport_step(
    v: np.ndarray,
    u: np.ndarray,
    p: PhysParams,
    dt: float,
    g: Grid,
    t: float = 0.0,
    bc: BoundaryValues | None = None,
    advection: str = UPWIND1,
    diffusion: str = DIFFUSION_BACKWARD,
) -> np.ndarray:
    """Advance v_t + a*(int v^2) v_x = -b (|u|^2)_x + eps v_xx by dt, u frozen.

    One frozen nonlocal speed is used for the whole step, re-evaluated at
    the substep midpoint through a cheap predictor pass (freezing at the
    left endpoint alone would cost an order in dt whenever int v^2 drifts).
    The source and diffusion are applied in symmetric half-doses around the
    advection so the substep composes to second order inside the outer
    splitting.  Raises CFLViolationError when c*dt/dx > 1; callers shrink
    dt and retry.
    """
    v = _check_field(v, g)
    u = _check_field(u, g)
    if bc is None:
        left, right = 0.0, 0.0
    else:
        left, right = float(bc.v_left(t + dt)), float(bc.v_right(t + dt))
    theta = _DIFFUSION_THETA[diffusion]
    source_half = (0.5 * dt * p.b) * ddx(np.abs(u) ** 2, g)

    c0 = nonlocal_speed(v, p.a, g)
    provisional = upwind_advect(v, c0, dt, g, scheme=advection, inflow=left)
    provisional -= 2.0 * source_half
    c = 0.5 * (c0 + nonlocal_speed(provisional, p.a, g))

    out = v.astype(np.float64, copy=True)
    if p.epsilon > 0:
        out = implicit_diffusion(out, p.epsilon, 0.5 * dt, g,
                                 left=left, right=right, theta=theta)
    out -= source_half
    out = upwind_advect(out, c, dt, g, scheme=advection, inflow=left)
    out -= source_half
    if p.epsilon > 0:
        out = implicit_diffusion(out, p.epsilon, 0.5 * dt, g,
                                 left=left, right=right, theta=theta)
    out[0] = left
    if bc is not None:
        out[-1] = right
    return out


def step(
    s: SimState,
    p: PhysParams,
    ctrl: StepControl,
    bc: BoundaryValues | None = None,
) -> SimState:
    """One Strang step: half transport, Schrodinger, half transport.

    Pure function of its inputs; second-order accurate in dt for smooth
    solutions.  Never raises on growth, only flags non-finite output.
    """
    if s.diverged:
        return s
    if not (np.all(np.isfinite(s.u.view(np.float64))) and np.all(np.isfinite(s.v))):
        return SimState(t=s.t, u=s.u, v=s.v, grid=s.grid, diverged=True)
    if p.epsilon > 0 and ctrl.scheme != "viscous":
        raise ValueError("epsilon > 0 requires StepControl(scheme='viscous')")
    g = s.grid
    dt = ctrl.dt
    half = 0.5 * dt
    v_mid = transport_step(
        s.v, s.u, p, half, g, t=s.t, bc=bc,
        advection=ctrl.advection, diffusion=ctrl.diffusion,
    )
    u_new = schrodinger_step(s.u, v_mid, p, dt, g, t=s.t, bc=bc)
    v_new = transport_step(
        v_mid, u_new, p, half, g, t=s.t + half, bc=bc,
        advection=ctrl.advection, diffusion=ctrl.diffusion,
    )
    diverged = not (np.all(np.isfinite(u_new.view(np.float64))) and np.all(np.isfinite(v_new)))
    return SimState(t=s.t + dt, u=u_new, v=v_new, grid=g, diverged=bool(diverged))


def cfl_dt(s: SimState, p: PhysParams, safety: float = 0.9) -> float:
    """Advective time-step bound dt = safety * dx / max(c, dx).

    The max(c, dx) floor keeps dt finite when v is near zero; the viscous
    substep is implicit, so epsilon never enters.
    """
    if not (0 < safety <= 1):
        raise ValueError(f"safety must be in (0, 1], got {safety}")
    c = nonlocal_speed(s.v, p.a, s.grid)
    return safety * s.grid.dx / max(c, s.grid.dx)
