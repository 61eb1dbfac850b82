import math

import numpy as np
import pytest

from benneylab.core import PhysParams, integrate, make_grid
from benneylab.diagnostics import (
    FLAG_WALL_CONTAMINATION,
    FLAG_WEIGHTED_DATA_INVALID,
    InvariantRecord,
    LedgerAccumulator,
    MonitorSample,
    MonitorThresholds,
    VirialAccumulator,
    blowup_criterion,
    blowup_monitor,
    drift_summary,
    energy,
    mass,
    momentum,
    second_difference,
    virial_moments,
    virial_rhs,
    viscous_balance,
    viscous_energy_rate,
    viscous_momentum_rate,
    wall_flags,
)


class TestMass:
    def test_zero(self):
        g = make_grid(1.0, 16)
        assert mass(np.zeros(17, complex), g) == 0.0

    def test_sine_half(self):
        g = make_grid(1.0, 256)
        u = np.sin(np.pi * g.x).astype(complex)
        assert mass(u, g) == pytest.approx(0.5, abs=1e-4)

    def test_nonnegative(self):
        g = make_grid(1.0, 32)
        rng = np.random.default_rng(0)
        u = rng.normal(size=33) + 1j * rng.normal(size=33)
        assert mass(u, g) >= 0.0


class TestEnergy:
    def test_zero_state(self):
        g = make_grid(1.0, 16)
        p = PhysParams(a=1.0, b=1.0)
        assert energy(np.zeros(17, complex), np.zeros(17), p, g) == 0.0

    def test_quartic_nonlocal_term_only(self):
        # u = 0, int v^2 = 2, a = 1: E = (1/8) * 4 = 0.5
        g = make_grid(8.0, 512)
        p = PhysParams(a=1.0, b=1.0)
        v = np.full(g.n_nodes, 0.5)  # int v^2 = 0.25 * 8 = 2
        assert energy(np.zeros(g.n_nodes, complex), v, p, g) == pytest.approx(0.5, abs=1e-12)


class TestMomentum:
    def test_real_fields_reduce_to_v_part(self):
        g = make_grid(20.0, 512)
        mask = np.sin(np.pi * g.x / g.L) ** 2
        u = (np.exp(-((g.x - 10) ** 2)) * mask).astype(complex)
        v = 0.7 * np.exp(-((g.x - 8) ** 2)) * mask
        expected = integrate(v * v, g)
        assert momentum(u, v, g) == pytest.approx(expected, abs=1e-12)

    def test_v_only(self):
        g = make_grid(8.0, 256)
        v = np.full(g.n_nodes, 0.5)  # int v^2 = 2
        assert momentum(np.zeros(g.n_nodes, complex), v, g) == pytest.approx(2.0, abs=1e-12)

    def test_gaussian_carrier_closed_form(self):
        # u = e^{ikx} rho: -2 Im int u conj(u_x) = 2k int rho^2
        g = make_grid(40.0, 2048)
        A, sig, k, x0 = 0.8, 1.5, 0.7, 20.0
        rho = A * np.exp(-((g.x - x0) ** 2) / (2 * sig**2))
        u = rho * np.exp(1j * k * g.x)
        expected = 2.0 * k * A**2 * sig * math.sqrt(math.pi)
        assert momentum(u, np.zeros(g.n_nodes), g) == pytest.approx(expected, rel=2e-4)


class TestViscousRatesAndBalance:
    def test_rates_vanish_for_inviscid(self):
        g = make_grid(10.0, 128)
        p = PhysParams(a=1.0, b=1.0, epsilon=0.0)
        rng = np.random.default_rng(1)
        u = (rng.normal(size=129) + 1j * rng.normal(size=129)).astype(complex)
        v = rng.normal(size=129)
        assert viscous_energy_rate(u, v, p, g) == 0.0
        assert viscous_momentum_rate(v, p, g) == 0.0

    def test_momentum_rate_closed_form(self):
        g = make_grid(1.0, 512)
        p = PhysParams(a=1.0, b=1.0, epsilon=0.1)
        v = np.sin(np.pi * g.x)
        # 2 eps int (pi cos(pi x))^2 = 2 * 0.1 * pi^2 / 2
        assert viscous_momentum_rate(v, p, g) == pytest.approx(0.1 * math.pi**2, rel=1e-3)

    def test_inviscid_defects_equal_plain_drifts(self):
        p = PhysParams(a=1.0, b=1.0)
        records = [
            InvariantRecord(t=0.0, P=1.0, E=2.0, M=3.0),
            InvariantRecord(t=0.5, P=1.0, E=2.1, M=2.9),
            InvariantRecord(t=1.0, P=1.0, E=2.2, M=2.8),
        ]
        e_def, m_def = viscous_balance(records, p)
        assert e_def == pytest.approx([0.0, 0.1, 0.2])
        assert m_def == pytest.approx([0.0, -0.1, -0.2])

    def test_defect_zero_at_initial_time(self):
        p = PhysParams(a=1.0, b=1.0, epsilon=1e-2)
        records = [InvariantRecord(t=0.0, P=1.0, E=2.0, M=3.0)]
        e_def, m_def = viscous_balance(records, p)
        assert e_def[0] == 0.0 and m_def[0] == 0.0

    def test_rejects_unsorted_times(self):
        p = PhysParams(a=1.0, b=1.0)
        records = [
            InvariantRecord(t=0.0, P=1.0, E=2.0, M=3.0),
            InvariantRecord(t=0.0, P=1.0, E=2.0, M=3.0),
        ]
        with pytest.raises(ValueError):
            viscous_balance(records, p)

    def test_ledger_accumulator_trapezoid(self):
        # constant rates integrate exactly
        g = make_grid(1.0, 64)
        p = PhysParams(a=1.0, b=1.0, epsilon=0.2)
        v = np.sin(np.pi * g.x)
        u = np.zeros(65, complex)
        led = LedgerAccumulator()
        led.sample(0.0, u, v, p, g)
        e1, m1 = led.sample(0.5, u, v, p, g)
        rate = viscous_momentum_rate(v, p, g)
        assert m1 == pytest.approx(0.5 * rate, rel=1e-12)


class TestVirial:
    def test_zero_state(self):
        g = make_grid(1.0, 16)
        m = virial_moments(np.zeros(17, complex), np.zeros(17), g)
        assert m.I2 == 0 and m.J == 0 and m.K == 0

    def test_spike_moments(self):
        # discrete spike of quadrature mass m at node x*: I2 = m x*^2, K = m x*
        g = make_grid(10.0, 100)
        u = np.zeros(101, complex)
        j = 40
        u[j] = 2.0
        m_disc = g.weights[j] * 4.0
        xs = g.x[j]
        mom = virial_moments(u, np.zeros(101), g)
        assert mom.I2 == pytest.approx(m_disc * xs**2, rel=1e-12)
        assert mom.K == pytest.approx(m_disc * xs, rel=1e-12)

    def test_virial_rhs_zero_state(self):
        g = make_grid(1.0, 16)
        p = PhysParams(a=1.0, b=1.0)
        val = virial_rhs(np.zeros(17, complex), np.zeros(17), p, 0.0, 0.0, g)
        assert val == 0.0

    def test_virial_rhs_bounded_by_criterion_value(self):
        g = make_grid(20.0, 512)
        p = PhysParams(a=1.0, b=-2.0)
        mask = np.sin(np.pi * g.x / g.L) ** 2
        u = (np.exp(-((g.x - 10) ** 2)) * np.exp(0.5j * g.x) * mask).astype(complex)
        v = 0.8 * np.exp(-((g.x - 9) ** 2)) * mask
        E0 = energy(u, v, p, g)
        M0 = momentum(u, v, g)
        rhs = virial_rhs(u, v, p, E0, M0, g)
        # dropped terms are -int|u|^4 - 2b int|u|^2 v - b^2 int v^2; their sum
        # is what the bound discards, so rhs <= 8 E0 + b^2 M0 by construction
        assert rhs <= 8 * E0 + p.b**2 * M0 + 1e-12

    def test_accumulator_phi_starts_at_half_i2(self):
        g = make_grid(10.0, 128)
        u = (np.exp(-((g.x - 5) ** 2)) * np.sin(np.pi * g.x / g.L) ** 2).astype(complex)
        v = np.zeros(129)
        acc = VirialAccumulator(b=1.0, rhs_bound=0.0)
        rec = acc.sample(0.0, virial_moments(u, v, g))
        assert rec.phi == pytest.approx(0.5 * rec.I2, rel=1e-14)
        assert rec.phi >= 0


class TestSecondDifference:
    def test_exact_on_quadratic(self):
        ts = np.linspace(0, 1, 21)
        ys = 3.0 * ts**2 - 2.0 * ts + 0.5
        centers, ypp = second_difference(ts, ys)
        assert np.max(np.abs(ypp - 6.0)) < 1e-10

    def test_exact_on_quadratic_nonuniform(self):
        rng = np.random.default_rng(4)
        ts = np.sort(rng.uniform(0, 1, size=15))
        ys = -1.5 * ts**2 + ts
        _, ypp = second_difference(ts, ys)
        assert np.max(np.abs(ypp + 3.0)) < 1e-9

    def test_noise_suppression_vs_three_point(self):
        rng = np.random.default_rng(5)
        ts = np.linspace(0, 1, 101)
        h = ts[1] - ts[0]
        noise = 1e-6 * rng.normal(size=101)
        ys = ts**2 + noise
        _, ypp5 = second_difference(ts, ys)
        ypp3 = (ys[2:] - 2 * ys[1:-1] + ys[:-2]) / h**2
        assert np.std(ypp5 - 2.0) < np.std(ypp3 - 2.0)

    def test_needs_five_samples(self):
        with pytest.raises(ValueError):
            second_difference(np.arange(4.0), np.arange(4.0))


class TestBlowupCriterion:
    def test_zero_data_false(self):
        assert not blowup_criterion(0.0, 0.0, 1.0)

    def test_direct_substitution(self):
        assert blowup_criterion(-1.0, 0.0, 1.0)  # 8(-1) + 0 < 0

    def test_invariant_under_refinement(self):
        p = PhysParams(a=0.01, b=-6.5)
        vals = []
        for N in (1024, 2048, 4096):
            g = make_grid(40.0, N)
            mask = np.sin(np.pi * g.x / g.L) ** 2
            rho = 3.2 * np.exp(-((g.x - 14.0) ** 2) / 2.0) * mask
            u = rho * np.exp(-0.5j * g.x)
            v = 3.2 * np.exp(-((g.x - 14.0) ** 2) / 2.0) * mask
            vals.append(8 * energy(u, v, p, g) + p.b**2 * momentum(u, v, g))
        assert all(v < 0 for v in vals)
        assert abs(vals[1] - vals[2]) < 1e-3 * abs(vals[2])


class TestBlowupMonitor:
    def test_running_on_tame_history(self):
        hist = [MonitorSample(t=0.1 * i, grad=1.0 + 0.01 * i, dt=1e-3, finite=True)
                for i in range(20)]
        assert blowup_monitor(hist).state == "running"

    def test_gradient_trigger(self):
        hist = [
            MonitorSample(t=0.0, grad=1.0, dt=1e-3, finite=True),
            MonitorSample(t=0.5, grad=50.0, dt=1e-3, finite=True),
            MonitorSample(t=1.0, grad=2000.0, dt=1e-3, finite=True),
        ]
        status = blowup_monitor(hist)
        assert status.state == "suspected_blowup"
        assert status.t_star == 1.0

    def test_dt_floor_trigger(self):
        hist = [
            MonitorSample(t=0.0, grad=1.0, dt=1e-3, finite=True),
            MonitorSample(t=0.5, grad=2.0, dt=1e-12, finite=True),
        ]
        status = blowup_monitor(hist, MonitorThresholds(grad_growth=1e3, dt_floor=1e-8))
        assert status.state == "suspected_blowup" and status.t_star == 0.5

    def test_divergence_trigger(self):
        hist = [
            MonitorSample(t=0.0, grad=1.0, dt=1e-3, finite=True),
            MonitorSample(t=0.25, grad=math.inf, dt=1e-3, finite=False),
        ]
        status = blowup_monitor(hist)
        assert status.state == "diverged" and status.t_star == 0.25


class TestWallFlags:
    def test_compact_data_clean(self):
        g = make_grid(40.0, 512)
        mask = np.sin(np.pi * g.x / g.L) ** 2
        u = (np.exp(-((g.x - 15) ** 2)) * mask).astype(complex)
        v = np.exp(-((g.x - 15) ** 2)) * mask
        assert wall_flags(u, v, g) == 0

    def test_wall_heavy_data_flagged(self):
        g = make_grid(40.0, 512)
        u = (np.exp(-((g.x - 39.0) ** 2)) ).astype(complex)
        flags = wall_flags(u, np.zeros(513), g)
        assert flags & FLAG_WALL_CONTAMINATION
        assert flags & FLAG_WEIGHTED_DATA_INVALID

    def test_zero_fields_clean(self):
        g = make_grid(40.0, 64)
        assert wall_flags(np.zeros(65, complex), np.zeros(65), g) == 0


class TestDriftSummary:
    def test_reference_values(self):
        records = [
            InvariantRecord(t=0.0, P=2.0, E=1.0, M=-1.0, visc_energy_ledger=0.0,
                            visc_momentum_ledger=0.0),
            InvariantRecord(t=1.0, P=2.0 + 2e-12, E=1.01, M=-1.02,
                            visc_energy_ledger=-0.01, visc_momentum_ledger=0.02),
        ]
        d = drift_summary(records)
        assert d.p_rel_drift_max == pytest.approx(1e-12)
        assert d.e_drift_max == pytest.approx(0.01)
        assert d.m_drift_max == pytest.approx(0.02)
        assert d.e_defect_max == pytest.approx(0.0, abs=1e-15)
        assert d.m_defect_max == pytest.approx(0.0, abs=1e-15)
