import math

import numpy as np
import pytest

from cbolab import (
    ObjectiveRegistry,
    default_registry,
    discontinuous_integrand,
    rastrigin,
    rosenbrock,
)


class TestRastrigin:
    def test_global_minimum_at_origin(self):
        for d in (1, 2, 7):
            assert rastrigin(np.zeros(d)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value_ones(self):
        # each term: 1 - 10 cos(2 pi) = -9, so 20 - 18 = 2
        assert rastrigin(np.array([1.0, 1.0])) == pytest.approx(2.0, abs=1e-12)

    def test_hand_value_half(self):
        # 10 + 0.25 - 10 cos(pi) = 10 + 0.25 + 10
        assert rastrigin(np.array([0.5])) == pytest.approx(20.25, abs=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            x = rng.uniform(-5.12, 5.12, size=rng.integers(1, 6))
            assert rastrigin(x) >= 0.0

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(-5, 5, size=(40, 3))
        batch = default_registry().get("rastrigin").values(X)
        np.testing.assert_allclose(batch, [rastrigin(row) for row in X], rtol=1e-14)


class TestRosenbrock:
    def test_global_minimum_at_ones(self):
        for d in (2, 3, 10):
            assert rosenbrock(np.ones(d)) == pytest.approx(0.0, abs=1e-12)

    def test_origin(self):
        assert rosenbrock(np.array([0.0, 0.0])) == pytest.approx(1.0, abs=1e-12)

    def test_one_zero(self):
        assert rosenbrock(np.array([1.0, 0.0])) == pytest.approx(100.0, abs=1e-12)

    def test_dimension_error(self):
        with pytest.raises(ValueError, match="dimension >= 2"):
            rosenbrock(np.array([1.0]))

    def test_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            x = rng.uniform(-3, 3, size=rng.integers(2, 6))
            assert rosenbrock(x) >= 0.0

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(-2, 2, size=(25, 4))
        batch = default_registry().get("rosenbrock").values(X)
        np.testing.assert_allclose(batch, [rosenbrock(row) for row in X], rtol=1e-14)


class TestDiscontinuousIntegrand:
    def test_zero_outside_hypercube(self):
        assert discontinuous_integrand(np.array([0.6, 0.0])) == 0.0
        assert discontinuous_integrand(np.array([0.0, 0.0, 100.0])) == 0.0

    def test_origin(self):
        assert discontinuous_integrand(np.zeros(3)) == pytest.approx(-1.0, abs=1e-12)

    def test_boundary_inclusive(self):
        # non-strict inequality: the face x_d = 1/2 belongs to the peak region
        value = discontinuous_integrand(np.array([0.5, 0.5]))
        assert value == pytest.approx(-math.exp(5.0), abs=1e-12 * math.exp(5.0))

    def test_nonpositive(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            x = rng.uniform(-1, 1, size=rng.integers(1, 5))
            assert discontinuous_integrand(x) <= 0.0

    def test_monotone_decreasing_inside(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x = rng.uniform(-1, 0.5, size=3)
            step = rng.uniform(0.0, 0.5 - x.max()) if x.max() < 0.5 else 0.0
            y = x + step
            assert discontinuous_integrand(y) <= discontinuous_integrand(x)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(6)
        X = rng.uniform(-1, 1, size=(50, 2))
        batch = default_registry().get("discontinuous").values(X)
        np.testing.assert_allclose(
            batch, [discontinuous_integrand(row) for row in X], rtol=1e-14
        )


class TestRegistry:
    def test_builtins_present(self):
        reg = default_registry()
        for name in ("rastrigin", "rosenbrock", "discontinuous"):
            assert name in reg
            assert reg.get(name).name == name

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown objective"):
            default_registry().get("nope")

    def test_user_registration_and_duplicates(self):
        reg = ObjectiveRegistry()
        from cbolab import Objective

        custom = Objective(name="sphere", evaluate=lambda x: float(x @ x))
        reg.register(custom)
        assert reg.get("sphere") is custom
        with pytest.raises(ValueError, match="already registered"):
            reg.register(custom)
