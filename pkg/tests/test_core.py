import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benneylab.core import (
    FieldShapeError,
    GridError,
    PhysParams,
    ddx,
    integrate,
    make_grid,
)


class TestMakeGrid:
    def test_uniform_spacing_and_nodes(self):
        g = make_grid(1.0, 10)
        assert g.dx == pytest.approx(0.1)
        assert g.x[5] == pytest.approx(0.5)
        assert g.x[0] == 0.0
        assert g.x[-1] == 1.0

    def test_large_grid_spacing(self):
        g = make_grid(40.0, 4096)
        assert g.dx == 40.0 / 4096

    def test_weights_sum_to_length(self):
        for L, N in [(1.0, 10), (40.0, 4096), (3.7, 17)]:
            g = make_grid(L, N)
            assert np.all(g.weights >= 0)
            assert np.sum(g.weights) == pytest.approx(L, rel=1e-13)

    def test_rejects_bad_parameters(self):
        with pytest.raises(GridError):
            make_grid(0.0, 64)
        with pytest.raises(GridError):
            make_grid(-1.0, 64)
        with pytest.raises(GridError):
            make_grid(1.0, 7)

    def test_grid_arrays_read_only(self):
        g = make_grid(1.0, 16)
        with pytest.raises(ValueError):
            g.x[0] = 1.0
        with pytest.raises(ValueError):
            g.weights[0] = 1.0


class TestIntegrate:
    def test_zero_field(self):
        g = make_grid(1.0, 10)
        assert integrate(np.zeros(11), g) == 0.0

    def test_exact_on_linear(self):
        g = make_grid(1.0, 10)
        assert integrate(g.x.copy(), g) == pytest.approx(0.5, abs=1e-15)

    def test_sech4_against_antiderivative(self):
        # int sech^4(kx) dx = (tanh(kx) - tanh(kx)^3/3)/k
        g = make_grid(40.0, 4096)
        k = math.sqrt(0.5)
        f = 1.0 / np.cosh(k * g.x) ** 4
        th = math.tanh(k * 40.0)
        exact = (th - th**3 / 3.0) / k
        assert exact == pytest.approx(0.9428090415820634, abs=1e-15)
        # integrand has vanishing odd derivatives at both ends, so the
        # trapezoid sum superconverges here
        assert integrate(f, g) == pytest.approx(exact, abs=1e-9)

    def test_length_mismatch(self):
        g = make_grid(1.0, 10)
        with pytest.raises(FieldShapeError):
            integrate(np.zeros(10), g)

    @given(
        alpha=st.floats(-10, 10),
        beta=st.floats(-10, 10),
        seed=st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, alpha, beta, seed):
        g = make_grid(2.0, 32)
        rng = np.random.default_rng(seed)
        f = rng.normal(size=33)
        h = rng.normal(size=33)
        lhs = integrate(alpha * f + beta * h, g)
        rhs = alpha * integrate(f, g) + beta * integrate(h, g)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_weights_independent_of_content(self):
        g = make_grid(1.0, 16)
        w_before = g.weights.copy()
        integrate(np.sin(g.x), g)
        ddx(np.cos(g.x), g)
        assert np.array_equal(g.weights, w_before)


class TestDdx:
    def test_annihilates_constants(self):
        g = make_grid(1.0, 32)
        d = ddx(np.full(33, 2.5), g)
        assert np.max(np.abs(d)) == 0.0

    def test_exact_on_quadratics(self):
        g = make_grid(2.0, 32)
        d = ddx(g.x**2, g)
        assert np.max(np.abs(d - 2.0 * g.x)) < 1e-12

    def test_sine_taylor_bound(self):
        # centered stencil error is bounded by dx^2/6 * max|f'''|
        g = make_grid(10.0, 1000)
        assert g.dx == pytest.approx(1e-2)
        d = ddx(np.sin(g.x), g)
        err_interior = np.max(np.abs(d[1:-1] - np.cos(g.x[1:-1])))
        assert err_interior <= 2e-4
        assert err_interior <= g.dx**2 / 6 * 1.01

    def test_complex_fields(self):
        g = make_grid(2.0, 64)
        f = np.exp(1j * g.x)
        d = ddx(f, g)
        assert np.max(np.abs(d[1:-1] - 1j * f[1:-1])) < 1e-3

    def test_length_mismatch(self):
        g = make_grid(1.0, 10)
        with pytest.raises(FieldShapeError):
            ddx(np.zeros(12), g)

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_kills_any_affine_field(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=2)
        g = make_grid(1.0, 16)
        d = ddx(a * g.x + b, g)
        assert np.max(np.abs(d - a)) < 1e-11 * max(1.0, abs(a), abs(b))


class TestPhysParams:
    def test_accepts_valid(self):
        p = PhysParams(a=1.0, b=-2.0, epsilon=0.1)
        assert p.a == 1.0 and p.b == -2.0 and p.epsilon == 0.1

    def test_rejects_nonpositive_a(self):
        with pytest.raises(ValueError):
            PhysParams(a=0.0, b=1.0)
        with pytest.raises(ValueError):
            PhysParams(a=-1.0, b=1.0)

    def test_rejects_zero_b(self):
        with pytest.raises(ValueError):
            PhysParams(a=1.0, b=0.0)

    def test_rejects_negative_epsilon(self):
        with pytest.raises(ValueError):
            PhysParams(a=1.0, b=1.0, epsilon=-1e-3)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PhysParams(a=math.nan, b=1.0)
        with pytest.raises(ValueError):
            PhysParams(a=1.0, b=math.inf)
