"""Time steppers for the three CBO variants and full-trajectory simulation.

Variants: deterministic explicit Euler, anisotropic Euler-Maruyama
(coordinate-wise noise), and isotropic Euler-Maruyama (one noise magnitude
per agent).  The consensus point is evaluated once per step from the
pre-step state and used in both the drift and the diffusion.

Exactness contracts that the steppers maintain:

* Deterministic projected contraction: for any objective and any weights,
  each centered coordinate column contracts by exactly (1 - lambda dt) per
  step, because the centering projector annihilates the rank-one weight
  coupling.
* Equilibrium absorption: a coordinate column on which all agents agree
  bitwise has an exactly zero offset column (enforced, not left to rounding),
  so consensus states are exact fixed points of all three steppers for every
  noise draw.

Reproducibility: a step consumes exactly one (N, D) block of Gaussian draws
from its noise stream, generated in agent-major, coordinate-minor order, so
trajectories depend only on (seed, stream_id) and never on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import math

import numpy as np
from numpy.typing import NDArray

from .diagnostics import DiagnosticSeries
from .ensemble import (
    NonFiniteObjectiveError,
    Objective,
    ParticleEnsemble,
    _centered_columns,
    softmax_weights_from_values,
)

__all__ = [
    "MODES",
    "CboParams",
    "NoiseSource",
    "Trajectory",
    "euler_step_deterministic",
    "em_step_anisotropic",
    "em_step_isotropic",
    "simulate",
]

Array = NDArray[np.float64]

MODES = ("deterministic", "anisotropic", "isotropic")


@dataclass(frozen=True)
class CboParams:
    """Parameters of one CBO configuration.

    lam    drift gain (1/time); negative values are allowed so that the
           noise-stabilized regime can be studied
    sigma  diffusion gain (1/sqrt(time)); forced to 0 in deterministic mode
    alpha  softmax sharpness, > 0
    dt     Euler step size, > 0
    mode   one of "deterministic", "anisotropic", "isotropic"
    """

    lam: float
    sigma: float
    alpha: float
    dt: float
    mode: str = "anisotropic"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not math.isfinite(self.lam):
            raise ValueError(f"lam must be finite, got {self.lam}")
        if self.mode == "deterministic":
            object.__setattr__(self, "sigma", 0.0)
        elif not self.sigma >= 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def euler_stable(self) -> bool:
        """Classical explicit-Euler stability: lambda * dt < 1."""
        return self.lam * self.dt < 1.0

    @property
    def em_ms_stable(self) -> bool:
        """Discrete mean-square stability: 0 < dt < (2 lambda - sigma^2) / lambda^2."""
        ms = 2.0 * self.lam - self.sigma**2
        return ms > 0.0 and self.dt < ms / self.lam**2


class NoiseSource:
    """A reproducible Gaussian stream identified by (seed, stream_id).

    Identical (seed, stream_id) and draw sequence reproduce identical
    increments; distinct stream_ids index statistically independent streams
    of the same root seed (used as the replicate index by the Monte-Carlo
    harness).  Draws for one step are generated as a single (N, D) block in
    agent-major, coordinate-minor order.
    """

    def __init__(self, seed: int, stream_id: int = 0) -> None:
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._rng = self._make_rng()

    def _make_rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)

    def restart(self) -> None:
        """Rewind the stream to its initial state."""
        self._rng = self._make_rng()

    def gaussian_increments(self, n: int, d: int, dt: float) -> Array:
        """One (n, d) block of independent N(0, dt) Brownian increments."""
        return self._rng.standard_normal((n, d)) * math.sqrt(dt)

    def uniform_box(self, n: int, d: int, low: float, high: float) -> Array:
        """One (n, d) block of U([low, high]) draws (ensemble initialization)."""
        return self._rng.uniform(low, high, size=(n, d))

    def __repr__(self) -> str:  # pragma: no cover
        return f"NoiseSource(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class Trajectory:
    """A simulated path: uniformly spaced times, diagnostics, and optional
    thinned state snapshots.

    When the state leaves float range the trajectory is truncated at the
    last finite step and `diverged` is set with the offending step index.
    """

    times: Array
    diagnostics: DiagnosticSeries
    snapshots: Optional[tuple[tuple[int, ParticleEnsemble], ...]]
    diverged: bool = False
    diverged_step: Optional[int] = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @property
    def final_state(self) -> Optional[ParticleEnsemble]:
        if not self.snapshots:
            return None
        return self.snapshots[-1][1]


def _centered_offsets(positions: Array, nu: Array) -> Array:
    """Offsets from the consensus point, with exactly-constant coordinate
    columns snapped to exact zero.

    On a column where all agents agree bitwise the mathematical offset is
    zero, but a floating-point weighted average of identical values can miss
    the common value by an ulp; snapping restores the exact equilibrium so
    consensus states are absorbing for every noise draw.
    """
    off = positions - nu
    const_cols = positions.min(axis=0) == positions.max(axis=0)
    if const_cols.any():
        off[:, const_cols] = 0.0
    return off


def _weights_and_consensus(
    positions: Array, f: Objective, alpha: float
) -> tuple[Array, Array, Array]:
    """Objective values, softmax weights and consensus point for one state."""
    values = f.values(positions)
    weights = softmax_weights_from_values(values, alpha)
    nu = weights @ positions
    return values, weights, nu


def _advance(
    positions: Array,
    nu: Array,
    p: CboParams,
    increments: Optional[Array],
) -> Array:
    """One update of the mode-selected scheme from precomputed consensus."""
    off = _centered_offsets(positions, nu)
    new = positions - (p.lam * p.dt) * off
    if p.sigma != 0.0 and increments is not None:
        if p.mode == "anisotropic":
            new = new + p.sigma * off * increments
        else:
            magnitudes = np.sqrt(np.sum(off * off, axis=1, keepdims=True))
            new = new + p.sigma * magnitudes * increments
    return new


def _step_checked(
    ens: ParticleEnsemble, p: CboParams, f: Objective, mode: str, noise: Optional[NoiseSource]
) -> ParticleEnsemble:
    if p.mode != mode:
        raise ValueError(f"params have mode {p.mode!r}, stepper requires {mode!r}")
    _, weights, nu = _weights_and_consensus(ens.positions, f, p.alpha)
    increments = None
    if noise is not None:
        increments = noise.gaussian_increments(ens.n_particles, ens.dim, p.dt)
    return ParticleEnsemble(_advance(ens.positions, nu, p, increments))


def euler_step_deterministic(
    ens: ParticleEnsemble, p: CboParams, f: Objective
) -> ParticleEnsemble:
    """X+ = X - lambda dt (X - 1 nu^T): explicit Euler on the drift."""
    return _step_checked(ens, p, f, "deterministic", None)


def em_step_anisotropic(
    ens: ParticleEnsemble, p: CboParams, f: Objective, noise: NoiseSource
) -> ParticleEnsemble:
    """Euler-Maruyama step with coordinate-wise (Hadamard) diffusion.

    Z+^n = Z^n - lambda (Z^n - nu) dt + sigma (Z^n - nu) o dW^n, where dW^n
    holds D independent N(0, dt) increments for agent n.
    """
    return _step_checked(ens, p, f, "anisotropic", noise)


def em_step_isotropic(
    ens: ParticleEnsemble, p: CboParams, f: Objective, noise: NoiseSource
) -> ParticleEnsemble:
    """Euler-Maruyama step with per-agent scalar diffusion magnitude.

    Z+^n = Z^n - lambda (Z^n - nu) dt + sigma ||Z^n - nu||_2 dW^n: one
    Euclidean offset norm per agent multiplies its D-dimensional increment.
    """
    return _step_checked(ens, p, f, "isotropic", noise)


def simulate(
    init: ParticleEnsemble,
    p: CboParams,
    f: Objective,
    steps: int,
    noise: Optional[NoiseSource] = None,
    snapshot_stride: Optional[int] = None,
) -> Trajectory:
    """Iterate the mode-selected stepper for `steps` transitions.

    Records, at every time point k dt for k = 0..steps: the squared distance
    V to the consensus manifold, its square root ||E||, the consensus point,
    and the minimum objective value over agents.  State snapshots are kept
    at every `snapshot_stride`-th step (and the final step) when a stride is
    given.

    A non-finite state (possible under strong diffusion) truncates the
    trajectory at the last finite step and sets the diverged flag instead of
    raising, so parameter sweeps across unstable regimes run to completion.

    Raises:
        ValueError: steps < 1, or a stochastic mode is requested without a
            noise source.
    """
    if steps < 1:
        raise ValueError(f"need steps >= 1, got {steps}")
    if p.mode != "deterministic" and noise is None:
        raise ValueError(f"mode {p.mode!r} requires a noise source")
    if snapshot_stride is not None and snapshot_stride < 1:
        raise ValueError(f"snapshot_stride must be >= 1, got {snapshot_stride}")

    n, d = init.n_particles, init.dim
    n_records = steps + 1
    v_series = np.empty(n_records)
    e_series = np.empty(n_records)
    best_f = np.empty(n_records)
    consensus = np.empty((n_records, d))
    snaps: Optional[list[tuple[int, ParticleEnsemble]]] = (
        [] if snapshot_stride is not None else None
    )

    positions = init.positions.copy()
    diverged = False
    diverged_step: Optional[int] = None
    recorded = 0

    for k in range(n_records):
        try:
            values, weights, nu = _weights_and_consensus(positions, f, p.alpha)
        except NonFiniteObjectiveError:
            diverged = True
            diverged_step = k
            break
        centered = _centered_columns(positions)
        v = float(np.sum(centered * centered))
        v_series[k] = v
        e_series[k] = math.sqrt(v)
        best_f[k] = values.min()
        consensus[k] = nu
        if snaps is not None and (k % snapshot_stride == 0 or k == steps):
            snaps.append((k, ParticleEnsemble(positions)))
        recorded = k + 1
        if k == steps:
            break

        increments = None
        if noise is not None and p.sigma != 0.0:
            increments = noise.gaussian_increments(n, d, p.dt)
        new_positions = _advance(positions, nu, p, increments)
        if not np.isfinite(new_positions).all():
            diverged = True
            diverged_step = k + 1
            break
        positions = new_positions

    times = np.arange(recorded) * p.dt
    diag = DiagnosticSeries(
        times=times,
        v_series=v_series[:recorded],
        e_norm_series=e_series[:recorded],
        consensus_series=consensus[:recorded],
        best_f_series=best_f[:recorded],
    )
    return Trajectory(
        times=times,
        diagnostics=diag,
        snapshots=tuple(snaps) if snaps is not None else None,
        diverged=diverged,
        diverged_step=diverged_step,
    )
