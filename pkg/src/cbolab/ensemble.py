"""Particle ensembles, softmax consensus weights, and the consensus-manifold
projection.

The state of a consensus-based optimization (CBO) run is an N x D matrix of
agent positions: row n is agent n, column d is spatial coordinate d.  All
per-agent operations are row slices and all per-coordinate operations are
column slices.  Every type in this module is an immutable value object; the
operations are pure functions and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "ParticleEnsemble",
    "WeightVector",
    "Objective",
    "ConsensusState",
    "NonFiniteObjectiveError",
    "softmax_weights",
    "softmax_weights_from_values",
    "consensus_point",
    "projected_offset",
    "distance_sq_to_consensus",
]

Array = NDArray[np.float64]


class NonFiniteObjectiveError(ValueError):
    """An objective evaluation produced NaN or infinity at some particle."""


def _frozen_array(values, shape_hint: str) -> Array:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 0:
        raise ValueError(f"{shape_hint} must be array-like, got a scalar")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParticleEnsemble:
    """Positions of N agents in R^D, one row per agent.

    Entries must be finite; N >= 1 and D >= 1.  The position matrix is
    copied on construction and frozen, so instances can be shared freely
    between threads.
    """

    positions: Array

    def __post_init__(self) -> None:
        arr = _frozen_array(self.positions, "positions")
        if arr.ndim != 2:
            raise ValueError(f"positions must be 2-D (N x D), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"need N >= 1 and D >= 1, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(
                f"non-finite position at agent {bad[0]}, coordinate {bad[1]}"
            )
        object.__setattr__(self, "positions", arr)

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @classmethod
    def uniform(
        cls, n_particles: int, dim: int, low: float, high: float, rng: np.random.Generator
    ) -> "ParticleEnsemble":
        """Draw an ensemble from the uniform box U([low, high]^D)."""
        if not low < high:
            raise ValueError(f"need low < high, got [{low}, {high}]")
        return cls(rng.uniform(low, high, size=(n_particles, dim)))


@dataclass(frozen=True)
class WeightVector:
    """Simplex-constrained consensus weights, one per agent.

    Entries are nonnegative and sum to 1 within 1e-12.  Mathematically every
    softmax weight is strictly positive; at very sharp selection (large
    alpha * objective spread) the smallest weights legitimately underflow to
    exact zero in float64, so zeros are accepted as long as the vector is
    not degenerate.
    """

    weights: Array

    def __post_init__(self) -> None:
        arr = _frozen_array(self.weights, "weights")
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError(f"weights must be a nonempty 1-D vector, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("weights must be finite")
        if (arr < 0.0).any():
            raise ValueError(f"negative weight at index {int(np.argmin(arr))}")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {total!r}")
        if not (arr > 0.0).any():
            raise ValueError("weights are all zero")
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class Objective:
    """A deterministic objective f: R^D -> R with optional metadata.

    `evaluate` maps a single point (length-D vector) to a float.  A batch
    evaluator over an (N, D) matrix can be supplied for speed; otherwise
    rows are evaluated one by one.
    """

    name: str
    evaluate: Callable[[Array], float]
    known_minimizer: Optional[Array] = None
    evaluate_batch: Optional[Callable[[Array], Array]] = field(default=None, repr=False)

    def values(self, positions: Array) -> Array:
        """Evaluate the objective on every row of an (N, D) matrix."""
        pos = np.asarray(positions, dtype=np.float64)
        if self.evaluate_batch is not None:
            out = np.asarray(self.evaluate_batch(pos), dtype=np.float64)
        else:
            out = np.array([self.evaluate(row) for row in pos], dtype=np.float64)
        return out


@dataclass(frozen=True)
class ConsensusState:
    """A consensus point together with the weights that produced it.

    The point is a convex combination of agent positions, so every
    coordinate lies between the column-wise min and max of the ensemble.
    """

    point: Array
    weights: WeightVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", _frozen_array(self.point, "point"))


def softmax_weights_from_values(values: Array, alpha: float) -> Array:
    """Raw softmax weights from precomputed objective values.

    Shift-stable: subtracting min_m f(X^m) inside the exponent preserves the
    exact weight ratios and keeps the computation free of overflow for alpha
    up to at least 1e4 and |f| up to 1e3.  At very sharp selection the
    smallest weights can underflow to exact zero, which is accepted.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    values = np.asarray(values, dtype=np.float64)
    if not np.isfinite(values).all():
        idx = int(np.nonzero(~np.isfinite(values))[0][0])
        raise NonFiniteObjectiveError(
            f"non-finite objective value {values[idx]!r} at particle {idx}"
        )
    shifted = np.exp(-alpha * (values - values.min()))
    return shifted / shifted.sum()


def softmax_weights(ens: ParticleEnsemble, f: Objective, alpha: float) -> WeightVector:
    """Softmax consensus weights: w_m proportional to exp(-alpha f(X^m)).

    Raises:
        ValueError: if alpha <= 0, or any objective value is non-finite
            (the message identifies the offending agent index).
    """
    values = f.values(ens.positions)
    if values.shape != (ens.n_particles,):
        raise ValueError(
            f"objective returned shape {values.shape}, expected ({ens.n_particles},)"
        )
    return WeightVector(softmax_weights_from_values(values, alpha))


def consensus_point(ens: ParticleEnsemble, w: WeightVector) -> ConsensusState:
    """Weighted consensus estimate: the w-average of the agent positions."""
    if len(w) != ens.n_particles:
        raise ValueError(
            f"weight length {len(w)} does not match ensemble size {ens.n_particles}"
        )
    point = w.weights @ ens.positions
    return ConsensusState(point=point, weights=w)


def _centered_columns(positions: Array) -> Array:
    """positions minus column means, with exactly-constant columns snapped
    to exact zero.

    The snap matters because the floating-point mean of N identical values
    can differ from them by an ulp; mathematically a constant column is on
    the consensus manifold and its centered component is exactly zero.
    """
    out = positions - positions.mean(axis=0)
    const_cols = positions.min(axis=0) == positions.max(axis=0)
    if const_cols.any():
        out[:, const_cols] = 0.0
    return out


def projected_offset(ens: ParticleEnsemble) -> Array:
    """Per-coordinate deviation from the ensemble mean: P X with
    P = I - (1/N) 1 1^T applied to each column.

    Column d of the result is the component of X^{:,d} orthogonal to the
    all-ones direction; each output column sums to zero up to rounding, and
    is exactly zero on coordinates where all agents agree bitwise.
    """
    return _centered_columns(ens.positions)


def distance_sq_to_consensus(ens: ParticleEnsemble) -> float:
    """Squared distance to the consensus manifold (all agents coincident).

    Equals the squared Frobenius norm of `projected_offset`, i.e. the sum
    over coordinates d of ||P X^{:,d}||^2; zero exactly when all rows are
    equal.
    """
    off = projected_offset(ens)
    return float(np.sum(off * off))
