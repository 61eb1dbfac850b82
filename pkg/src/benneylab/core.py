"""Uniform half-line grids, trapezoid quadrature, and difference stencils.

The half-line is truncated to [0, L] with N+1 equispaced nodes.  Fields are
plain numpy arrays sampled at the nodes: complex128 for the short wave u,
float64 for the long wave v.  Trapezoid weights make the quadrature exact
for piecewise-linear integrands, and first derivatives use second-order
centered stencils inside with second-order one-sided stencils at the two
boundary nodes, so integral diagnostics built from them stay globally
second order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "PhysParams",
    "GridError",
    "FieldShapeError",
    "make_grid",
    "integrate",
    "ddx",
]


class GridError(ValueError):
    """Invalid grid construction parameters."""


class FieldShapeError(ValueError):
    """Field length does not match the grid it is paired with."""


@dataclass(frozen=True)
class Grid:
    """Uniform nodes x_j = j*dx on [0, L], j = 0..N, with trapezoid weights.

    Immutable after construction; the node and weight arrays are marked
    read-only so a Grid can be shared freely between threads.
    """

    L: float
    N: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0):
            raise GridError(f"domain length L must be positive, got {self.L}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 8:
            raise GridError(f"cell count N must be an integer >= 8, got {self.N}")
        dx = self.L / self.N
        x = np.linspace(0.0, self.L, self.N + 1)
        w = np.full(self.N + 1, dx)
        w[0] = w[-1] = 0.5 * dx
        x.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "weights", w)

    @property
    def n_nodes(self) -> int:
        return self.N + 1


@dataclass(frozen=True)
class PhysParams:
    """Coupling constants of the evolution system.

    a > 0 scales the nonlocal transport speed a*int(v^2); b != 0 couples the
    short and long waves (b = 0 decouples the long wave into a linear
    transport problem and is not supported); epsilon >= 0 is the viscosity
    of the regularized long-wave equation.
    """

    a: float
    b: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"coupling a must be > 0, got {self.a}")
        if not (math.isfinite(self.b) and self.b != 0):
            raise ValueError(f"coupling b must be nonzero and finite, got {self.b}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"viscosity epsilon must be >= 0, got {self.epsilon}")


def make_grid(L: float, N: int) -> Grid:
    """Build the uniform truncation of the half-line to [0, L] with N cells."""
    return Grid(L=float(L), N=int(N))


def _check_field(f: np.ndarray, g: Grid) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != g.n_nodes:
        raise FieldShapeError(
            f"field has length {f.shape}, grid expects {g.n_nodes} nodes"
        )
    return f


def integrate(f: np.ndarray, g: Grid) -> float:
    """Trapezoid quadrature of a real nodal field over [0, L].

    Exact for piecewise-linear integrands; the weights depend only on the
    grid, never on field content.
    """
    f = _check_field(f, g)
    return float(np.dot(g.weights, f))


def ddx(f: np.ndarray, g: Grid) -> np.ndarray:
    """First derivative of a nodal field.

    Centered three-point stencil at interior nodes, one-sided second-order
    stencils at x = 0 and x = L.  Exact on quadratics at every node.
    """
    f = _check_field(f, g)
    out = np.empty_like(f)
    inv2dx = 1.0 / (2.0 * g.dx)
    out[1:-1] = (f[2:] - f[:-2]) * inv2dx
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) * inv2dx
    return out
