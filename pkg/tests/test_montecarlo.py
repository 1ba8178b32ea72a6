import math

import numpy as np
import pytest

from cbolab import (
    CboParams,
    McConfig,
    NoiseSource,
    ParticleEnsemble,
    default_registry,
    derive_seed,
    fit_decay_rate,
    run_mc,
    simulate,
    sweep,
)
from cbolab.montecarlo import _replicate, _reduce_exact


def config(mode="anisotropic", sigma=1.0, **kw):
    base = CboParams(lam=1.0, sigma=sigma, alpha=1000.0, dt=0.05, mode=mode)
    defaults = dict(
        base=base,
        objective="rastrigin",
        n_particles=20,
        dim=2,
        steps=30,
        runs=8,
        seed=123,
    )
    defaults.update(kw)
    return McConfig(**defaults)


class TestMcConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="runs"):
            config(runs=0)
        with pytest.raises(ValueError, match="init_low"):
            config(init_low=1.0, init_high=1.0)
        with pytest.raises(ValueError, match="unknown objective"):
            config(objective="nope")
        with pytest.raises(ValueError, match="clip"):
            config(clip="sometimes")
        with pytest.raises(ValueError, match="clip"):
            config(clip=-3.0)

    def test_clip_policy_strings(self):
        assert "auto" in config().clip_policy
        assert config(clip=None).clip_policy == "none"
        assert "5.0" in config(clip=5.0).clip_policy


class TestRunMcDeterministic:
    def test_zero_stderr_and_single_run_series(self):
        cfg = config(mode="deterministic", sigma=0.0, runs=5)
        res = run_mc(cfg)
        assert np.all(res.stderr_v == 0.0)
        # equals the plain simulate series for stream 0
        ns = NoiseSource(cfg.seed, 0)
        init = ParticleEnsemble(
            ns.uniform_box(cfg.n_particles, cfg.dim, cfg.init_low, cfg.init_high)
        )
        traj = simulate(init, cfg.base, default_registry().get("rastrigin"), cfg.steps)
        np.testing.assert_array_equal(res.mean_v, traj.diagnostics.v_series)
        assert res.per_run_final_rates.shape == (5,)
        assert np.all(res.per_run_final_rates == res.per_run_final_rates[0])

    def test_deterministic_rate_objective_independent(self):
        slopes = []
        for objective in ("rastrigin", "rosenbrock", "discontinuous"):
            cfg = config(mode="deterministic", sigma=0.0, objective=objective, steps=60)
            res = run_mc(cfg)
            slopes.append(fit_decay_rate(res.times, res.mean_v).slope)
        expected = 2 * math.log(0.95) / 0.05
        for s in slopes:
            assert s == pytest.approx(expected, rel=1e-6)


class TestRunMcStochastic:
    def test_reproducible_and_worker_invariant(self):
        cfg = config(runs=6)
        a = run_mc(cfg, workers=1)
        b = run_mc(cfg, workers=3)
        c = run_mc(cfg, workers=1)
        np.testing.assert_array_equal(a.mean_v, b.mean_v)
        np.testing.assert_array_equal(a.stderr_v, b.stderr_v)
        np.testing.assert_array_equal(a.mean_v, c.mean_v)
        np.testing.assert_array_equal(a.per_run_final_rates, b.per_run_final_rates)

    def test_replicate_permutation_leaves_mean_unchanged(self):
        # fsum reduction: permuting replicate rows cannot change the mean
        cfg = config(runs=6)
        series = [_replicate(cfg, r)[0] for r in range(cfg.runs)]
        stack = np.stack(series)
        mean_a, se_a = _reduce_exact(stack)
        perm = np.random.default_rng(0).permutation(cfg.runs)
        mean_b, se_b = _reduce_exact(stack[perm])
        np.testing.assert_array_equal(mean_a, mean_b)
        np.testing.assert_array_equal(se_a, se_b)

    def test_stderr_positive_for_stochastic(self):
        res = run_mc(config(runs=6))
        assert (res.stderr_v[1:] > 0).all()

    def test_rates_recorded_per_run(self):
        res = run_mc(config(runs=4, steps=40))
        assert res.per_run_final_rates.shape == (4,)
        assert np.isfinite(res.per_run_final_rates).all()
        assert (res.per_run_final_rates < 0).all()  # stable regime decays


class TestClipping:
    def test_absolute_clip_caps_series(self):
        cfg = config(sigma=math.sqrt(2.1), runs=4, steps=20, clip=2000.0)
        res = run_mc(cfg)
        assert res.mean_v.max() <= 2000.0 + 1e-9
        assert "2000" in res.clip_policy

    def test_auto_clip_caps_growing_run_none_does_not(self):
        # lam dt = 2.5 makes the Euler factor -1.5: offsets grow geometrically,
        # so the auto policy (10 x initial V) must cap while 'none' lets it run
        base = CboParams(lam=50.0, sigma=0.0, alpha=1.0, dt=0.05, mode="deterministic")
        kw = dict(
            base=base, objective="rastrigin", n_particles=10, dim=1,
            steps=20, runs=1, seed=7,
        )
        capped = run_mc(McConfig(**kw, clip="auto"))
        free = run_mc(McConfig(**kw, clip=None))
        assert capped.mean_v.max() <= 10.0 * capped.mean_v[0] + 1e-9
        assert free.mean_v[-1] > 10.0 * free.mean_v[0]

    def test_auto_clip_does_not_bite_in_stable_regime(self):
        cfg = config(runs=4)
        auto = run_mc(cfg)
        off = run_mc(config(runs=4, clip=None))
        np.testing.assert_array_equal(auto.mean_v, off.mean_v)


class TestDivergedRuns:
    @pytest.mark.filterwarnings("ignore:overflow")
    def test_diverged_counted_and_padded(self):
        base = CboParams(lam=1e8, sigma=0.0, alpha=1.0, dt=1.0, mode="deterministic")
        cfg = McConfig(
            base=base,
            objective="rastrigin",
            n_particles=4,
            dim=1,
            steps=80,
            runs=3,
            seed=0,
            clip=None,
        )
        res = run_mc(cfg)
        assert res.diverged_count == 3
        assert res.mean_v.shape == (81,)
        assert np.isfinite(res.mean_v).all()


class TestSweep:
    def test_alpha_sweep_deterministic_rate_invariant(self):
        cfg = config(mode="deterministic", sigma=0.0, runs=1, steps=60)
        grid = sweep(cfg, "alpha", [1.0, 201.0, 401.0])
        slopes = [fit_decay_rate(res.times, res.mean_v).slope for _, res in grid]
        expected = 2 * math.log(0.95) / 0.05
        for s in slopes:
            assert s == pytest.approx(expected, rel=1e-6)

    def test_n_sweep_initial_value_grows(self):
        cfg = config(mode="deterministic", sigma=0.0, runs=1, steps=10)
        grid = sweep(cfg, "n_particles", [10, 210, 410])
        initials = [res.mean_v[0] for _, res in grid]
        assert initials[0] < initials[1] < initials[2]

    def test_dim_sweep_applies_dimension(self):
        cfg = config(mode="deterministic", sigma=0.0, runs=1, steps=5)
        grid = sweep(cfg, "dim", [1, 5])
        assert [v for v, _ in grid] == [1.0, 5.0]
        assert grid[1][1].mean_v[0] > grid[0][1].mean_v[0]

    def test_grid_values_get_distinct_seeds(self):
        cfg = config(runs=2, steps=5)
        grid = sweep(cfg, "alpha", [10.0, 10.0])  # same value, different index
        a, b = grid[0][1].mean_v, grid[1][1].mean_v
        assert not np.array_equal(a, b)

    def test_invalid_values_named(self):
        cfg = config()
        with pytest.raises(ValueError, match="n_particles grid value"):
            sweep(cfg, "n_particles", [0])
        with pytest.raises(ValueError, match="alpha grid value"):
            sweep(cfg, "alpha", [-1.0])
        with pytest.raises(ValueError, match="param"):
            sweep(cfg, "temperature", [1.0])
        with pytest.raises(ValueError, match="at least one"):
            sweep(cfg, "alpha", [])


class TestWorkerResolution:
    def test_env_variable_caps_workers(self, monkeypatch):
        from cbolab.montecarlo import resolve_workers

        monkeypatch.setenv("CBO_LAB_THREADS", "3")
        assert resolve_workers() == 3
        assert resolve_workers(2) == 2  # explicit argument wins
        monkeypatch.setenv("CBO_LAB_THREADS", "zero")
        with pytest.raises(ValueError, match="CBO_LAB_THREADS"):
            resolve_workers()
        monkeypatch.delenv("CBO_LAB_THREADS")
        assert resolve_workers() >= 1

    def test_env_worker_count_same_bytes(self, monkeypatch):
        cfg = config(runs=5, steps=8)
        monkeypatch.setenv("CBO_LAB_THREADS", "1")
        a = run_mc(cfg)
        monkeypatch.setenv("CBO_LAB_THREADS", "4")
        b = run_mc(cfg)
        np.testing.assert_array_equal(a.mean_v, b.mean_v)


class TestSeedPolicy:
    def test_derive_seed_deterministic_and_distinct(self):
        assert derive_seed(42, 0) == derive_seed(42, 0)
        seeds = {derive_seed(42, i) for i in range(100)}
        assert len(seeds) == 100

    def test_runs_differ_across_streams(self):
        cfg = config(runs=2, steps=5)
        v0 = _replicate(cfg, 0)[0]
        v1 = _replicate(cfg, 1)[0]
        assert not np.array_equal(v0, v1)
