"""Tests for rate extraction and the polynomial bound detector."""

import numpy as np
import pytest

from kgdamp.damping import DampingProfile
from kgdamp.fields import TorusGrid, make_state
from kgdamp.evolve import DecayRecord, simulate
from kgdamp.decayfit import (
    FitResult,
    fit_exponential,
    fits_csv,
    uniformity_report,
    verify_power_bound,
)


def synthetic_record(times, energies, eta=1, norms=None):
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if norms is None:
        norms = {"u0_h1": 1.0, "u1_l2": 1.0, "lap_u0_l2": 1.0, "grad_u1_l2": 1.0}
    return DecayRecord(
        times=times,
        energies=energies,
        dissipation=np.zeros_like(times),
        input_norms=norms,
        eta=eta,
        damping_json="null",
    )


class TestFitExponential:
    def test_exact_unit_rate(self):
        t = np.linspace(0, 10, 101)
        rec = synthetic_record(t, np.exp(-t))
        fit = fit_exponential(rec)
        assert fit.rate == pytest.approx(0.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_exact_with_prefactor(self):
        t = np.linspace(0, 20, 201)
        rec = synthetic_record(t, 4.0 * np.exp(-0.6 * t))
        fit = fit_exponential(rec)
        assert fit.rate == pytest.approx(0.3, abs=1e-12)
        assert fit.amplitude == pytest.approx(2.0, abs=1e-10)

    def test_simulated_gcc_run(self):
        g = TorusGrid(1, 64)
        s = make_state(g, (0.0,), 1.0, "gaussian", center=[0.3], width=0.08)
        rec = simulate(s, DampingProfile.cosine(), eta=1, t_end=40.0, dt=1e-2)
        fit = fit_exponential(rec)
        assert fit.rate > 0
        assert fit.r_squared >= 0.98

    def test_nonpositive_energy_rejected(self):
        t = np.linspace(0, 5, 51)
        e = np.exp(-t)
        e[30] = 0.0
        with pytest.raises(ValueError):
            fit_exponential(synthetic_record(t, e))

    def test_degenerate_window_rejected(self):
        t = np.linspace(0, 5, 51)
        with pytest.raises(ValueError):
            fit_exponential(synthetic_record(t, np.exp(-t)), window=(0.9, 0.2))

    def test_too_few_samples_rejected(self):
        t = np.linspace(0, 5, 5)
        with pytest.raises(ValueError):
            fit_exponential(synthetic_record(t, np.exp(-t)))


class TestVerifyPowerBound:
    def test_synthetic_exact_value(self):
        t = np.linspace(0, 50, 201)
        e0 = 9.0
        rec = synthetic_record(
            t, e0 / (1.0 + t), eta=1,
            norms={k: np.sqrt(e0) for k in
                   ("u0_h1", "u1_l2", "lap_u0_l2", "grad_u1_l2")})
        fit = verify_power_bound(rec)
        # ratios are sqrt(E0)/(4 sqrt(E0)) = 0.25 at every sample
        assert fit.rate == pytest.approx(0.25, abs=1e-12)

    def test_conservative_growth_trend(self):
        t = np.linspace(0, 99, 100)
        rec = synthetic_record(t, np.ones_like(t))
        fit = verify_power_bound(rec)
        assert fit.rate == pytest.approx(np.sqrt(100.0) / 4.0, rel=1e-12)

    def test_scaling_invariance(self):
        t = np.linspace(0, 10, 51)
        e = 2.0 / (1.0 + t)
        norms = {"u0_h1": 0.7, "u1_l2": 0.1, "lap_u0_l2": 2.0, "grad_u1_l2": 0.3}
        lam = 17.0
        a = verify_power_bound(synthetic_record(t, e, norms=dict(norms)))
        b = verify_power_bound(synthetic_record(
            t, lam**2 * e, norms={k: lam * v for k, v in norms.items()}))
        assert a.rate == pytest.approx(b.rate, rel=1e-12)

    def test_missing_norms_rejected(self):
        t = np.linspace(0, 5, 20)
        rec = synthetic_record(t, np.exp(-t))
        rec = DecayRecord(rec.times, rec.energies, rec.dissipation,
                          {"u0_h1": 1.0}, 1, "null")
        with pytest.raises(ValueError):
            verify_power_bound(rec)


class TestUniformity:
    def _fit(self, rate):
        return FitResult("exponential", rate, 1.0, 1.0, (0.1, 1.0))

    def test_identical(self):
        rep = uniformity_report([(1, self._fit(0.4)), (2, self._fit(0.4))])
        assert rep["ratio"] == pytest.approx(1.0)

    def test_simple_ratio(self):
        rep = uniformity_report([(1, self._fit(0.1)), (2, self._fit(0.2))])
        assert rep["ratio"] == pytest.approx(2.0)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            uniformity_report([(1, self._fit(0.1))])


class TestCsv:
    def test_header(self):
        fits = [(1, FitResult("exponential", 0.5, 1.0, 0.99, (0.1, 1.0)))]
        text = fits_csv(fits)
        assert text.split("\n")[0] == "eta,model,gamma_or_c,C,r2,window_lo,window_hi"

    def test_invalid_model_rejected(self):
        with pytest.raises(ValueError):
            FitResult("cubic", 1.0, 1.0, 1.0, (0, 1))

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            FitResult("exponential", -0.1, 1.0, 1.0, (0, 1))
