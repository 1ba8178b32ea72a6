"""Replicated-run harness: averaged consensus-distance curves and parameter
sweeps.

Each replicate r of a Monte-Carlo experiment owns the noise stream
(root seed, stream_id=r); the stream first yields the replicate's initial
ensemble (drawn fresh per replicate from the uniform box) and then the
dynamics increments.  Replicates are embarrassingly parallel: results are
assembled by replicate index and reduced in that fixed order, so the output
is bit-identical whether computed by one worker or many.

In deterministic mode there is no randomness to average: every replicate
would have to share the same data for the standard error to vanish, so all
replicates reuse stream 0 and the harness computes the single run once.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from numpy.typing import NDArray

from .diagnostics import pathwise_log_rate
from .dynamics import CboParams, NoiseSource, simulate
from .ensemble import ParticleEnsemble, _frozen_array
from .objectives import default_registry

__all__ = [
    "McConfig",
    "McResult",
    "SWEEP_PARAMS",
    "derive_seed",
    "resolve_workers",
    "run_mc",
    "sweep",
]

Array = NDArray[np.float64]

SWEEP_PARAMS = ("alpha", "n_particles", "dim")

#: sentinel for the documented default clip rule: 10 x the run's own initial V
AUTO_CLIP = "auto"


@dataclass(frozen=True)
class McConfig:
    """Configuration of one Monte-Carlo experiment.

    clip: pointwise cap applied to each run's squared-distance series before
    averaging.  A float is an absolute threshold; "auto" (the default) caps
    at 10 x the run's own initial value, which only bites on exploding runs;
    None disables clipping.  The effective policy is echoed in the result.
    """

    base: CboParams
    objective: str
    n_particles: int
    dim: int
    steps: int
    runs: int
    seed: int
    init_low: float = -5.0
    init_high: float = 5.0
    clip: Union[float, str, None] = AUTO_CLIP

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError(f"need runs >= 1, got {self.runs}")
        if self.steps < 1:
            raise ValueError(f"need steps >= 1, got {self.steps}")
        if self.n_particles < 1:
            raise ValueError(f"need n_particles >= 1, got {self.n_particles}")
        if self.dim < 1:
            raise ValueError(f"need dim >= 1, got {self.dim}")
        if not self.init_low < self.init_high:
            raise ValueError(
                f"need init_low < init_high, got [{self.init_low}, {self.init_high}]"
            )
        if isinstance(self.clip, str) and self.clip != AUTO_CLIP:
            raise ValueError(f"clip must be a float, None or {AUTO_CLIP!r}")
        if isinstance(self.clip, float) and not self.clip > 0:
            raise ValueError(f"clip threshold must be positive, got {self.clip}")
        if self.objective not in default_registry():
            raise ValueError(
                f"unknown objective {self.objective!r}; known: "
                + ", ".join(default_registry().names())
            )

    @property
    def clip_policy(self) -> str:
        if self.clip is None:
            return "none"
        if self.clip == AUTO_CLIP:
            return "auto: 10 x run initial value"
        return f"absolute: {self.clip}"


@dataclass(frozen=True)
class McResult:
    """Averaged squared-distance curve over replicates.

    mean_v and stderr_v have steps + 1 entries; per_run_final_rates holds
    each replicate's pathwise log rate over its (possibly truncated)
    horizon, -inf if it reached exact consensus, NaN if undefined.
    """

    times: Array
    mean_v: Array
    stderr_v: Array
    diverged_count: int
    per_run_final_rates: Array
    clip_policy: str

    def __post_init__(self) -> None:
        for name in ("times", "mean_v", "stderr_v", "per_run_final_rates"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), name))


def derive_seed(root: int, index: int) -> int:
    """Deterministic child seed for sweep grid point `index`.

    Splits the root via numpy's SeedSequence spawn keys, so grid points get
    independent streams while remaining reproducible from (root, index).
    """
    ss = np.random.SeedSequence(root, spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit argument, else CBO_LAB_THREADS, else cpu count."""
    if workers is not None:
        if workers < 1:
            raise ValueError(f"need workers >= 1, got {workers}")
        return workers
    env = os.environ.get("CBO_LAB_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"CBO_LAB_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"CBO_LAB_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _replicate(cfg: McConfig, stream_id: int) -> tuple[Array, float, bool]:
    """One replicate: returns (padded+clipped v series, final rate, diverged)."""
    noise = NoiseSource(cfg.seed, stream_id=stream_id)
    init = ParticleEnsemble(
        noise.uniform_box(cfg.n_particles, cfg.dim, cfg.init_low, cfg.init_high)
    )
    f = default_registry().get(cfg.objective)
    traj = simulate(init, cfg.base, f, cfg.steps, noise)

    v = np.asarray(traj.diagnostics.v_series, dtype=np.float64)
    full = np.empty(cfg.steps + 1)
    full[: v.size] = v
    if v.size < cfg.steps + 1:
        # diverged run: hold the last finite value so the grid stays rectangular
        full[v.size :] = v[-1]

    if cfg.clip == AUTO_CLIP:
        threshold: Optional[float] = 10.0 * full[0] if full[0] > 0.0 else None
    else:
        threshold = cfg.clip
    if threshold is not None:
        np.minimum(full, threshold, out=full)

    try:
        rate = pathwise_log_rate(traj)
    except ValueError:
        rate = math.nan
    return full, rate, traj.diverged


def _reduce_exact(all_v: Array) -> tuple[Array, Array]:
    """Per-time-point mean and standard error with exactly rounded sums.

    fsum makes the reduction independent of both worker count and replicate
    ordering: permuting runs changes nothing in the output, bit for bit.
    """
    runs, n_times = all_v.shape
    mean = np.empty(n_times)
    stderr = np.zeros(n_times)
    for k in range(n_times):
        col = all_v[:, k]
        m = math.fsum(col) / runs
        mean[k] = m
        if runs > 1:
            var = math.fsum((x - m) ** 2 for x in col) / (runs - 1)
            stderr[k] = math.sqrt(var / runs)
    return mean, stderr


def run_mc(cfg: McConfig, workers: Optional[int] = None) -> McResult:
    """Run cfg.runs independent replicates and average their V series.

    Replicate r uses stream_id r (stream 0 for every replicate in
    deterministic mode).  The reduction is exactly rounded (fsum), so the
    result depends on neither the worker count nor the replicate order.
    """
    n_workers = resolve_workers(workers)
    times = np.arange(cfg.steps + 1) * cfg.base.dt

    if cfg.base.mode == "deterministic":
        v, rate, diverged = _replicate(cfg, 0)
        return McResult(
            times=times,
            mean_v=v,
            stderr_v=np.zeros_like(v),
            diverged_count=cfg.runs if diverged else 0,
            per_run_final_rates=np.full(cfg.runs, rate),
            clip_policy=cfg.clip_policy,
        )

    all_v = np.empty((cfg.runs, cfg.steps + 1))
    rates = np.empty(cfg.runs)
    diverged_count = 0

    if n_workers == 1 or cfg.runs == 1:
        results = (_replicate(cfg, r) for r in range(cfg.runs))
        for r, (v, rate, diverged) in enumerate(results):
            all_v[r] = v
            rates[r] = rate
            diverged_count += int(diverged)
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunk = max(1, cfg.runs // (4 * n_workers))
            for r, (v, rate, diverged) in enumerate(
                pool.map(_replicate, [cfg] * cfg.runs, range(cfg.runs), chunksize=chunk)
            ):
                all_v[r] = v
                rates[r] = rate
                diverged_count += int(diverged)

    mean_v, stderr_v = _reduce_exact(all_v)
    return McResult(
        times=times,
        mean_v=mean_v,
        stderr_v=stderr_v,
        diverged_count=diverged_count,
        per_run_final_rates=rates,
        clip_policy=cfg.clip_policy,
    )


def _apply_sweep_value(cfg: McConfig, param: str, value: float, seed: int) -> McConfig:
    if param == "alpha":
        if not value > 0:
            raise ValueError(f"invalid alpha grid value {value!r}")
        return replace(cfg, base=replace(cfg.base, alpha=float(value)), seed=seed)
    if param == "n_particles":
        n = int(value)
        if n < 1 or n != value:
            raise ValueError(f"invalid n_particles grid value {value!r}")
        return replace(cfg, n_particles=n, seed=seed)
    if param == "dim":
        d = int(value)
        if d < 1 or d != value:
            raise ValueError(f"invalid dim grid value {value!r}")
        return replace(cfg, dim=d, seed=seed)
    raise ValueError(f"param must be one of {SWEEP_PARAMS}, got {param!r}")


def sweep(
    cfg: McConfig,
    param: str,
    values,
    workers: Optional[int] = None,
) -> list[tuple[float, McResult]]:
    """Run one Monte-Carlo experiment per grid value of a single parameter.

    Grid point i runs with seed derive_seed(cfg.seed, i), so points are
    independent but the whole grid is reproducible from the root seed.
    """
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one grid value")
    out: list[tuple[float, McResult]] = []
    for i, value in enumerate(values):
        sub = _apply_sweep_value(cfg, param, value, derive_seed(cfg.seed, i))
        out.append((float(value), run_mc(sub, workers=workers)))
    return out
