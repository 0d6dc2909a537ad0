"""Trajectory diagnostics: rate fits, audits, and the summary bundle."""

import numpy as np
import pytest

import crnflow as cf
from conftest import make_config


def exponential(rate=2.0, amplitude=3.0, t_end=5.0, samples=101):
    times = np.linspace(0.0, t_end, samples)
    return times, amplitude * np.exp(-rate * times)


class TestRateFit:
    def test_exact_exponential_recovered(self):
        times, e = exponential()
        est = cf.estimate_decay_rate(cf.synthetic_trajectory(times, e))
        assert est.rate == pytest.approx(2.0, abs=1e-10)
        assert est.amplitude == pytest.approx(3.0, rel=1e-9)
        assert est.r_squared >= 1.0 - 1e-12
        assert est.window == (2.5, 5.0)
        assert est.samples == 51

    def test_floored_samples_excluded(self):
        times, e = exponential(rate=2.0, amplitude=1.0, t_end=10.0, samples=101)
        times = np.concatenate([times, np.linspace(10.1, 12.0, 20)])
        e = np.concatenate([e, np.full(20, 1e-20)])
        est = cf.estimate_decay_rate(cf.synthetic_trajectory(times, e))
        assert est.window[1] == 10.0
        assert est.rate == pytest.approx(2.0, abs=1e-9)

    def test_too_few_samples(self):
        times = np.linspace(0.0, 8.0, 9)
        with pytest.raises(cf.InsufficientDecayData, match="need 10"):
            cf.estimate_decay_rate(cf.synthetic_trajectory(times, np.exp(-times)))

    def test_noisy_samples_lower_r_squared(self):
        rng = np.random.default_rng(0)
        times, e = exponential()
        noisy = e * np.exp(0.2 * rng.standard_normal(e.size))
        est = cf.estimate_decay_rate(cf.synthetic_trajectory(times, noisy))
        assert 0.0 <= est.r_squared < 1.0


class TestEntropyAudit:
    def test_monotone_series_is_clean(self):
        times, e = exponential()
        audit = cf.entropy_audit(cf.synthetic_trajectory(times, e))
        assert audit.max_increment == 0.0
        assert audit.eep_defect == 0.0

    def test_increment_reported(self):
        times = np.array([0.0, 1.0, 2.0, 3.0])
        e = np.array([1.0, 0.5, 0.6, 0.3])
        audit = cf.entropy_audit(cf.synthetic_trajectory(times, e))
        assert audit.max_increment == pytest.approx(0.1)

    def test_defect_is_quadrature_bias_only(self):
        times = np.linspace(0.0, 5.0, 251)
        e = np.exp(-2.0 * times)
        audit = cf.entropy_audit(cf.synthetic_trajectory(times, e, production=2.0 * e))
        assert 0.0 < audit.eep_defect < 5e-4

    def test_overstated_production_flagged(self):
        times = np.linspace(0.0, 5.0, 251)
        e = np.exp(-2.0 * times)
        audit = cf.entropy_audit(cf.synthetic_trajectory(times, e, production=4.0 * e))
        assert audit.eep_defect > 0.4


class TestConservationAudit:
    def test_none_without_conserved_quantities(self):
        times, e = exponential()
        assert cf.conservation_audit(cf.synthetic_trajectory(times, e)) is None

    def test_relative_drift(self):
        times = np.array([0.0, 1.0, 2.0])
        masses = np.array([[2.0], [2.0 + 1e-9], [2.0 - 5e-10]])
        traj = cf.synthetic_trajectory(times, np.ones(3), masses=masses)
        assert cf.conservation_audit(traj) == pytest.approx(1e-9 / 3.0)
        assert cf.conservation_audit(traj, reference=[2.0]) == pytest.approx(1e-9 / 3.0)


class TestDissipationRatio:
    def test_constant_ratio(self):
        times, e = exponential()
        traj = cf.synthetic_trajectory(times, e, production=2.2 * e)
        report = cf.dissipation_ratio(traj)
        assert report.min_ratio == pytest.approx(2.2, rel=1e-12)
        assert report.gronwall_consistent is None

    def test_consistency_against_fit(self):
        times, e = exponential()
        rate = cf.estimate_decay_rate(cf.synthetic_trajectory(times, e))
        good = cf.synthetic_trajectory(times, e, production=2.1 * e)
        assert cf.dissipation_ratio(good, rate).gronwall_consistent is True
        bad = cf.synthetic_trajectory(times, e, production=1.5 * e)
        assert cf.dissipation_ratio(bad, rate).gronwall_consistent is False

    def test_all_floored_raises(self):
        times = np.linspace(0.0, 1.0, 5)
        traj = cf.synthetic_trajectory(times, np.full(5, 1e-20))
        with pytest.raises(cf.InsufficientDecayData):
            cf.dissipation_ratio(traj)


class TestSummarize:
    KEYS = {
        "lambda_est",
        "C_est",
        "r2",
        "fit_window",
        "entropy_audit",
        "eep_defect",
        "mass_drift",
        "dissipation_ratio",
        "ckp_pass",
    }

    def test_full_run(self, tmp_path):
        cfg = make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0\n", t_end=0.2)
        summary = cf.summarize(cf.simulate(cfg))
        assert set(summary) == self.KEYS
        assert summary["lambda_est"] > 0
        assert summary["r2"] > 0.99
        assert summary["entropy_audit"] == 0.0
        assert summary["mass_drift"] < 1e-8
        assert summary["ckp_pass"] is True
        assert summary["dissipation_ratio"] > 0
        assert len(summary["fit_window"]) == 2

    def test_synthetic_without_fields(self):
        times, e = exponential()
        summary = cf.summarize(cf.synthetic_trajectory(times, e, production=2.0 * e))
        assert set(summary) == self.KEYS
        assert summary["ckp_pass"] is None
        assert summary["mass_drift"] is None
        assert summary["lambda_est"] == pytest.approx(2.0, abs=1e-10)

    def test_short_series_degrades_gracefully(self):
        times = np.linspace(0.0, 0.5, 6)
        e = np.exp(-2.0 * times)
        summary = cf.summarize(cf.synthetic_trajectory(times, e, production=2.0 * e))
        assert summary["lambda_est"] is None
        assert summary["dissipation_ratio"] == pytest.approx(2.0, rel=1e-12)
