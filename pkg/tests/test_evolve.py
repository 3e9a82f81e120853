"""Tests for the Strang-splitting integrator and decay records."""

import numpy as np
import pytest

from kgdamp.damping import DampingProfile
from kgdamp.fields import TorusGrid, make_state, energy
from kgdamp.evolve import (
    DecayRecord,
    default_dt,
    dissipation_residual,
    simulate,
    strang_step,
)


def damped_oscillator_u(t):
    """Closed form for u'' + u' + u = 0, u(0)=1, u'(0)=0."""
    om = np.sqrt(3.0) / 2.0
    return np.exp(-t / 2.0) * (np.cos(om * t) + np.sin(om * t) / (2 * om))


class TestStrangStep:
    def test_conservative_isometry(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "random", seed=2)
        e0 = energy(s)
        s2 = strang_step(s, 0.05, np.zeros(g.shape))
        assert abs(energy(s2) - e0) <= 1e-13 * e0

    def test_damped_oscillator_oracle(self):
        g = TorusGrid(1, 16)
        s = make_state(g, (0.0,), 1.0, "single-mode", k=0)
        a = np.ones(g.shape)
        dt = 1e-3
        for _ in range(1000):
            s = strang_step(s, dt, a)
        assert np.max(np.abs(s.u.real - damped_oscillator_u(1.0))) <= 1e-5

    def test_energy_monotone(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "random", seed=4)
        a = 1.0 + np.cos(2 * np.pi * g.points()[..., 0])
        prev = energy(s)
        for _ in range(50):
            s = strang_step(s, 0.05, a)
            e = energy(s)
            assert e <= prev + 1e-12 * prev
            prev = e

    def test_reversibility_without_damping(self):
        g = TorusGrid(1, 32)
        s0 = make_state(g, (0.0,), 1.0, "random", seed=8)
        z = np.zeros(g.shape)
        s = s0
        for _ in range(20):
            s = strang_step(s, 0.05, z)
        for _ in range(20):
            s = strang_step(s, -0.05, z)
        scale = np.max(np.abs(s0.u))
        assert np.max(np.abs(s.u - s0.u)) <= 1e-11 * scale

    def test_shape_mismatch_rejected(self):
        g = TorusGrid(1, 16)
        s = make_state(g, (0.0,), 1.0, "single-mode", k=0)
        with pytest.raises(ValueError):
            strang_step(s, 0.1, np.ones(5))


class TestSimulate:
    def test_conservative_constant_energy(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        rec = simulate(s, None, eta=1, t_end=5.0, dt=1e-2)
        drift = np.max(np.abs(rec.energies - rec.energies[0])) / rec.energies[0]
        assert drift <= 1e-12

    def test_damped_oscillator_energy(self):
        g = TorusGrid(1, 16)
        s = make_state(g, (0.0,), 1.0, "single-mode", k=0)
        p = DampingProfile.constant(1.0)
        rec = simulate(s, p, eta=1, t_end=2.0, dt=1e-3)
        om = np.sqrt(3.0) / 2.0
        t = rec.times
        u = damped_oscillator_u(t)
        du = np.exp(-t / 2.0) * (-np.sin(om * t) * (om + 1.0 / (4 * om)))
        exact = u**2 + du**2
        assert np.max(np.abs(rec.energies - exact)) <= 1e-4 * exact[0]

    def test_under_resolved_grid_rejected(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "single-mode", k=0)
        with pytest.raises(ValueError):
            simulate(s, DampingProfile.cosine(), eta=4, t_end=1.0)

    def test_monotone_record(self):
        g = TorusGrid(1, 64)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.1)
        rec = simulate(s, DampingProfile.cosine(), eta=2, t_end=5.0)
        assert np.all(np.diff(rec.energies) <= 1e-12 * rec.energies[0])
        assert rec.dissipation[0] == 0.0
        assert np.all(np.diff(rec.dissipation) >= -1e-15)

    def test_input_norms_present(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        rec = simulate(s, None, eta=1, t_end=0.5)
        assert set(rec.input_norms) == {"u0_h1", "u1_l2", "lap_u0_l2", "grad_u1_l2"}
        assert rec.input_norms["u0_h1"] > 0


class TestDissipationResidual:
    def test_zero_damping(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        rec = simulate(s, None, eta=1, t_end=2.0)
        assert dissipation_residual(rec) <= 1e-12

    def test_constant_damping_single_mode(self):
        g = TorusGrid(1, 16)
        s = make_state(g, (0.0,), 1.0, "single-mode", k=0)
        rec = simulate(s, DampingProfile.constant(1.0), eta=1, t_end=2.0,
                       dt=1e-3, sample_stride=2)
        assert dissipation_residual(rec) <= 1e-5

    def test_order_two_in_dt(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        p = DampingProfile.cosine()
        r1 = dissipation_residual(
            simulate(s, p, eta=1, t_end=4.0, dt=2e-3, sample_stride=2))
        r2 = dissipation_residual(
            simulate(s, p, eta=1, t_end=4.0, dt=1e-3, sample_stride=2))
        assert 3.2 <= r1 / r2 <= 4.8


class TestRecordFormats:
    def test_csv_header_and_rows(self):
        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        rec = simulate(s, DampingProfile.cosine(), eta=2, t_end=1.0)
        lines = rec.to_csv().strip().split("\n")
        assert lines[0] == "t,E,D,eta"
        assert len(lines) == len(rec.times) + 1
        assert lines[1].split(",")[3] == "2"

    def test_sidecar_json(self):
        import json

        g = TorusGrid(1, 32)
        s = make_state(g, (0.0,), 1.0, "gaussian", width=0.15)
        rec = simulate(s, DampingProfile.cosine(), eta=1, t_end=0.5)
        obj = json.loads(rec.sidecar_json("abc"))
        assert obj["config_hash"] == "abc"
        assert obj["damping"]["kind"] == "cosine"


class TestDefaultDt:
    def test_cap(self):
        assert default_dt(0.0) == 1e-2
        assert default_dt(100.0) == pytest.approx(1e-3)
