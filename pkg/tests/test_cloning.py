"""Tests for copying fidelities, the birth-chain simulation and the fit."""

import numpy as np
import pytest

from qclink import cloning


class TestFidelityOpt:
    def test_one_to_two(self):
        assert cloning.fidelity_opt(1, 2) == pytest.approx(5 / 6, abs=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 5, 17])
    def test_trivial_copying(self, n):
        assert cloning.fidelity_opt(n, n) == pytest.approx(1.0, abs=1e-15)

    def test_many_copy_limit(self):
        # limit (N+1)/(N+2) for M -> infinity
        assert cloning.fidelity_opt(1, 10 ** 9) == pytest.approx(2 / 3, abs=1e-8)
        assert cloning.fidelity_opt(3, 10 ** 9) == pytest.approx(4 / 5, abs=1e-8)

    def test_monotonicity_and_bounds(self):
        for n in range(1, 6):
            prev = None
            for m in range(n, 40):
                f = cloning.fidelity_opt(n, m)
                assert 0.5 < f <= 1.0
                if prev is not None:
                    assert f <= prev + 1e-15
                prev = f
        for m in range(6, 40):
            values = [cloning.fidelity_opt(n, m) for n in range(1, m + 1)]
            assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            cloning.fidelity_opt(3, 2)
        with pytest.raises(ValueError):
            cloning.fidelity_opt(0, 2)
        with pytest.raises(ValueError):
            cloning.fidelity_opt(1.5, 3)


class TestFidelityClassical:
    def test_equals_copy_formula_at_unit_quality(self):
        for n in range(1, 51):
            for m in range(n, 51):
                diff = abs(cloning.fidelity_classical(n, m, 1.0)
                           - cloning.fidelity_opt(n, m))
                assert diff <= 1e-12

    def test_random_amplification_limit(self):
        # Q = 0 and vanishing input: F -> mu_out / (2 mu_out) = 1/2
        assert cloning.fidelity_classical(1e-9, 1.0, 0.0) == pytest.approx(
            0.5, abs=1e-8)

    def test_bright_input_limit(self):
        assert cloning.fidelity_classical(1e7, 1e8, 0.7) == pytest.approx(
            1.0, abs=1e-6)

    def test_bounds_on_random_grid(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            mu_in = rng.uniform(1e-3, 50)
            gain = rng.uniform(1.0, 100.0)
            q = rng.uniform(0.0, 1.0)
            f = cloning.fidelity_classical(mu_in, gain * mu_in, q)
            assert 0.5 < f <= 1.0

    def test_attenuation_rejected(self):
        with pytest.raises(ValueError):
            cloning.fidelity_classical(2.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            cloning.fidelity_classical(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            cloning.fidelity_classical(1.0, 2.0, 1.5)


class TestBirthProcess:
    def test_exact_small_cases(self):
        assert cloning.birth_process_exact(1, 2) == pytest.approx(5 / 6,
                                                                  abs=1e-12)
        assert cloning.birth_process_exact(1, 3) == pytest.approx(7 / 9,
                                                                  abs=1e-12)

    def test_exact_matches_formula_everywhere(self):
        """The gain chain realises the optimal copying fidelity."""
        for n in range(1, 5):
            for m in range(n, 9):
                assert cloning.birth_process_exact(n, m) == pytest.approx(
                    cloning.fidelity_opt(n, m), abs=1e-12)

    def test_no_growth_is_exact_unity(self):
        mean, se = cloning.birth_process_mc(3, 3, trials=10_000, seed=0)
        assert mean == 1.0
        assert se == 0.0

    def test_monte_carlo_agreement(self):
        for n in range(1, 5):
            for m in range(n + 1, 9):
                mean, se = cloning.birth_process_mc(n, m, trials=100_000,
                                                    seed=n * 10 + m)
                assert abs(mean - cloning.fidelity_opt(n, m)) <= 3 * se

    def test_deterministic_per_seed(self):
        a = cloning.birth_process_mc(1, 5, trials=10_000, seed=9)
        b = cloning.birth_process_mc(1, 5, trials=10_000, seed=9)
        assert a == b

    def test_trial_budget(self):
        with pytest.raises(ValueError):
            cloning.birth_process_mc(1, 2, trials=10)


class TestPoissonMixture:
    def test_unit_gain(self):
        assert cloning.poisson_mixture_fidelity(5.0, 1.0) == pytest.approx(
            1.0, abs=1e-12)

    def test_bright_limit_approaches_unity(self):
        values = [cloning.poisson_mixture_fidelity(mu, 10.0)
                  for mu in (1.0, 5.0, 20.0, 50.0)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[-1] > 0.95

    def test_reported_value_and_deviation(self):
        value = cloning.poisson_mixture_fidelity(5.0, 10.0)
        reference = cloning.fidelity_classical(5.0, 50.0, 1.0)
        assert 0.5 < value <= 1.0
        # the deviation is a report, not a target; just pin the regression
        assert value == pytest.approx(0.857832, abs=1e-5)
        assert abs(value - reference) < 0.02

    def test_domain(self):
        with pytest.raises(ValueError):
            cloning.poisson_mixture_fidelity(60.0, 2.0)
        with pytest.raises(ValueError):
            cloning.poisson_mixture_fidelity(5.0, 0.5)


MU_GRID = np.logspace(np.log10(0.5), np.log10(50.0), 50)


class TestFitQ:
    def test_noiseless_recovery(self):
        data = cloning.generate_fidelity_dataset(0.8, MU_GRID)
        q_hat, rss = cloning.fit_q(data)
        assert q_hat == pytest.approx(0.8, abs=1e-5)
        assert rss <= 1e-12

    def test_boundary_recovery(self):
        data = cloning.generate_fidelity_dataset(1.0, MU_GRID)
        q_hat, _ = cloning.fit_q(data)
        assert q_hat == pytest.approx(1.0, abs=1e-5)

    def test_noisy_recovery_study(self):
        hits = 0
        for seed in range(100):
            data = cloning.generate_fidelity_dataset(
                0.8, MU_GRID, gain=10.0, noise_sigma=0.005, seed=seed)
            q_hat, _ = cloning.fit_q(data)
            hits += abs(q_hat - 0.8) <= 0.02
        assert hits >= 95

    def test_degenerate_dataset_warns(self):
        data = cloning.generate_fidelity_dataset(0.8, [2.0, 2.0, 2.0])
        with pytest.warns(UserWarning):
            q_hat, _ = cloning.fit_q(data)
        assert 0.0 <= q_hat <= 1.0

    def test_too_few_records(self):
        data = cloning.generate_fidelity_dataset(0.8, [1.0, 2.0])
        with pytest.raises(ValueError):
            cloning.fit_q(data)

    def test_grid_argmin_is_global(self):
        """The refined minimum never exceeds any coarse-grid value."""
        data = cloning.generate_fidelity_dataset(
            0.8, MU_GRID, noise_sigma=0.01, seed=3)
        q_hat, rss = cloning.fit_q(data)
        mu_in, mu_out, fid = data.T
        for q in np.linspace(0, 1, 101):
            core = q * mu_out * mu_in
            model = (core + mu_out + mu_in) / (core + 2 * mu_out)
            assert rss <= ((model - fid) ** 2).sum() + 1e-12


class TestCsvRoundTrip:
    def test_save_and_load(self, tmp_path):
        path = tmp_path / "records.csv"
        data = cloning.generate_fidelity_dataset(0.8, [0.5, 2.0, 10.0],
                                                 noise_sigma=0.002, seed=1)
        cloning.save_fidelity_csv(path, data)
        text = path.read_text()
        assert text.splitlines()[0] == "mu_in,mu_out,fidelity"
        loaded = cloning.load_fidelity_csv(path)
        np.testing.assert_allclose(loaded, data, rtol=0, atol=0)

    def test_header_is_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,0.9\n")
        with pytest.raises(ValueError):
            cloning.load_fidelity_csv(path)

    def test_empty_data_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("mu_in,mu_out,fidelity\n")
        with pytest.raises(ValueError):
            cloning.load_fidelity_csv(path)

    def test_invalid_fidelity_rejected(self, tmp_path):
        path = tmp_path / "range.csv"
        path.write_text("mu_in,mu_out,fidelity\n1.0,2.0,1.5\n")
        with pytest.raises(ValueError):
            cloning.load_fidelity_csv(path)
