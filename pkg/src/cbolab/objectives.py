"""Benchmark objectives and a name-based registry.

The three built-ins cover complementary landscape features: Rastrigin (many
regularly spaced local minima), Rosenbrock (narrow curved valley), and a
discontinuous integrand (steep exponential peak inside a hypercube, zero
outside).  All are derivative-free targets; no gradients are provided.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .ensemble import Objective

__all__ = [
    "rastrigin",
    "rosenbrock",
    "discontinuous_integrand",
    "ObjectiveRegistry",
    "default_registry",
]

Array = NDArray[np.float64]


def rastrigin(x: Array) -> float:
    """Rastrigin: 10 D + sum_d (x_d^2 - 10 cos(2 pi x_d)); min 0 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def _rastrigin_batch(X: Array) -> Array:
    return 10.0 * X.shape[1] + np.sum(X * X - 10.0 * np.cos(2.0 * np.pi * X), axis=1)


def rosenbrock(x: Array) -> float:
    """Rosenbrock: sum_{d<D} ((1 - x_d)^2 + 100 (x_{d+1} - x_d^2)^2); min 0 at 1_D.

    Requires D >= 2.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError(f"rosenbrock needs dimension >= 2, got {x.size}")
    return float(np.sum((1.0 - x[:-1]) ** 2 + 100.0 * (x[1:] - x[:-1] ** 2) ** 2))


def _rosenbrock_batch(X: Array) -> Array:
    if X.shape[1] < 2:
        raise ValueError(f"rosenbrock needs dimension >= 2, got {X.shape[1]}")
    return np.sum(
        (1.0 - X[:, :-1]) ** 2 + 100.0 * (X[:, 1:] - X[:, :-1] ** 2) ** 2, axis=1
    )


def discontinuous_integrand(x: Array) -> float:
    """-exp(sum_d 5 x_d) when every coordinate is <= 1/2 (non-strict), else 0."""
    x = np.asarray(x, dtype=np.float64)
    if np.all(x <= 0.5):
        return float(-np.exp(np.sum(5.0 * x)))
    return 0.0


def _discontinuous_batch(X: Array) -> Array:
    inside = np.all(X <= 0.5, axis=1)
    out = np.zeros(X.shape[0])
    if inside.any():
        out[inside] = -np.exp(np.sum(5.0 * X[inside], axis=1))
    return out


class ObjectiveRegistry:
    """Objectives addressable by name; the three built-ins are always present."""

    def __init__(self) -> None:
        self._entries: dict[str, Objective] = {}
        self.register(
            Objective(
                name="rastrigin",
                evaluate=rastrigin,
                known_minimizer=np.zeros(2),
                evaluate_batch=_rastrigin_batch,
            )
        )
        self.register(
            Objective(
                name="rosenbrock",
                evaluate=rosenbrock,
                known_minimizer=np.ones(2),
                evaluate_batch=_rosenbrock_batch,
            )
        )
        self.register(
            Objective(
                name="discontinuous",
                evaluate=discontinuous_integrand,
                known_minimizer=np.full(2, 0.5),
                evaluate_batch=_discontinuous_batch,
            )
        )

    def register(self, objective: Objective) -> None:
        if objective.name in self._entries:
            raise ValueError(f"objective {objective.name!r} already registered")
        self._entries[objective.name] = objective

    def get(self, name: str) -> Objective:
        try:
            return self._entries[name]
        except KeyError:
            known = ", ".join(sorted(self._entries))
            raise ValueError(f"unknown objective {name!r}; known: {known}") from None

    def names(self) -> list[str]:
        return sorted(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries


_DEFAULT = ObjectiveRegistry()


def default_registry() -> ObjectiveRegistry:
    """The process-wide registry used by the CLI."""
    return _DEFAULT
