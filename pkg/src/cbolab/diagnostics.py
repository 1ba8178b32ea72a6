"""Decay-rate theory and estimation.

Closed-form rates for the consensus-formation error in every regime
(continuous / time-discretized, deterministic / stochastic), a Monte-Carlo
estimator for the discrete pathwise rate, and least-squares rate fits for
simulated series.

Conventions: rates are quoted as positive decay constants delta, meaning the
quantity behaves like exp(-delta t).  Rates on the squared distance V are
twice the rates on the distance ||E||.  Fields that are undefined in a
regime (for example the stable-step bound when 2 lambda <= sigma^2) are
``None``, never NaN.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import math

import numpy as np
from numpy.typing import NDArray

from .ensemble import _frozen_array

if TYPE_CHECKING:  # pragma: no cover
    from .dynamics import CboParams, Trajectory

__all__ = [
    "DiagnosticSeries",
    "RateReport",
    "McRateEstimate",
    "DecayFit",
    "theoretical_rates",
    "em_as_rate_mc",
    "fit_decay_rate",
    "fit_decay_rate_weighted",
    "pathwise_log_rate",
]

Array = NDArray[np.float64]


@dataclass(frozen=True)
class DiagnosticSeries:
    """Per-time-step record of a simulation run.

    v_series is the squared distance to the consensus manifold, and
    e_norm_series its square root; consensus_series is (T, D); best_f_series
    holds the running minimum objective value over agents at each step.
    """

    times: Array
    v_series: Array
    e_norm_series: Array
    consensus_series: Array
    best_f_series: Array

    def __post_init__(self) -> None:
        for name in ("times", "v_series", "e_norm_series", "best_f_series"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), name))
        object.__setattr__(
            self, "consensus_series", _frozen_array(self.consensus_series, "consensus_series")
        )
        n = self.times.size
        if not (
            self.v_series.size == n
            and self.e_norm_series.size == n
            and self.best_f_series.size == n
            and self.consensus_series.shape[0] == n
        ):
            raise ValueError("diagnostic series lengths disagree")

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class RateReport:
    """All closed-form decay rates and admissibility flags for one parameter set.

    det_rate           continuous deterministic rate on ||E|| (= lambda)
    as_rate            continuous pathwise rate on ||E||: lambda + sigma^2/2
    ms_rate            continuous mean-square rate on V: 2 lambda - sigma^2
    ms_condition_ok    2 lambda > sigma^2
    em_ms_rate         discrete mean-square rate: 2 lambda - sigma^2 - lambda^2 dt
    em_step_bound      (2 lambda - sigma^2) / lambda^2, None when undefined
    euler_stable       lambda * dt < 1
    isotropic_mf_rate  2 lambda - D sigma^2 (mean-field isotropic reference)
    """

    mode: str
    dim: int
    det_rate: float
    as_rate: float
    ms_rate: float
    ms_condition_ok: bool
    em_ms_rate: float
    em_step_bound: Optional[float]
    euler_stable: bool
    isotropic_mf_rate: float
    isotropic_mf_condition_ok: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "dim": self.dim,
            "det_rate": self.det_rate,
            "as_rate": self.as_rate,
            "ms_rate": self.ms_rate,
            "ms_condition_ok": self.ms_condition_ok,
            "em_ms_rate": self.em_ms_rate,
            "em_step_bound": self.em_step_bound,
            "euler_stable": self.euler_stable,
            "isotropic_mf_rate": self.isotropic_mf_rate,
            "isotropic_mf_condition_ok": self.isotropic_mf_condition_ok,
        }


@dataclass(frozen=True)
class McRateEstimate:
    """Monte-Carlo estimate of the discrete pathwise decay rate."""

    estimate: float
    std_error: float
    samples: int
    min_abs_argument: float


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential-rate fit: slope of ln(values) vs time."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int


def theoretical_rates(p: "CboParams", dim: int) -> RateReport:
    """Fill a RateReport from the closed-form expressions."""
    if dim < 1:
        raise ValueError(f"need dim >= 1, got {dim}")
    lam = p.lam
    sigma = 0.0 if p.mode == "deterministic" else p.sigma
    dt = p.dt
    ms_rate = 2.0 * lam - sigma**2
    ms_ok = ms_rate > 0.0
    bound: Optional[float] = None
    if ms_ok and lam != 0.0:
        bound = ms_rate / lam**2
    return RateReport(
        mode=p.mode,
        dim=dim,
        det_rate=lam,
        as_rate=lam + sigma**2 / 2.0,
        ms_rate=ms_rate,
        ms_condition_ok=ms_ok,
        em_ms_rate=ms_rate - lam**2 * dt,
        em_step_bound=bound,
        euler_stable=lam * dt < 1.0,
        isotropic_mf_rate=2.0 * lam - dim * sigma**2,
        isotropic_mf_condition_ok=2.0 * lam > dim * sigma**2,
    )


def em_as_rate_mc(
    lam: float, sigma: float, dt: float, samples: int, seed: int
) -> McRateEstimate:
    """Monte-Carlo estimate of -(1/dt) E ln|1 - lam dt + sigma sqrt(dt) Z|.

    This expectation is the exact pathwise decay rate of one per-coordinate
    error component under the Euler-Maruyama update.  The integrand has an
    integrable log singularity where the argument crosses zero; no clipping
    is applied, and the smallest |argument| encountered is reported so rare
    near-singular draws are visible.

    Raises:
        ValueError: if samples < 10_000 or dt <= 0.
    """
    if samples < 10_000:
        raise ValueError(f"need samples >= 10000 for a stable estimate, got {samples}")
    if not dt > 0:
        raise ValueError(f"need dt > 0, got {dt}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(samples)
    arg = 1.0 - lam * dt + sigma * math.sqrt(dt) * z
    abs_arg = np.abs(arg)
    vals = -np.log(abs_arg) / dt
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if sigma != 0.0 else 0.0
    return McRateEstimate(
        estimate=est,
        std_error=se,
        samples=samples,
        min_abs_argument=float(abs_arg.min()),
    )


def _ols(x: Array, y: Array) -> DecayFit:
    xb = x.mean()
    yb = y.mean()
    dx = x - xb
    denom = float(dx @ dx)
    slope = float(dx @ (y - yb)) / denom
    intercept = float(yb - slope * xb)
    resid = y - (slope * x + intercept)
    tss = float(np.sum((y - yb) ** 2))
    r2 = 1.0 if tss == 0.0 else 1.0 - float(resid @ resid) / tss
    return DecayFit(slope=slope, intercept=intercept, r_squared=r2, n_points=x.size)


def fit_decay_rate(times, values, burn_in: int = 0) -> DecayFit:
    """Ordinary least squares of ln(values) against times, after burn_in points.

    The slope is the empirical exponential rate (negative for decay).  All
    values in the fit window must be strictly positive; a diverged or fully
    collapsed series should be handled by the caller before fitting.

    Raises:
        ValueError: fewer than 3 points remain, or a nonpositive value sits
            in the window (the message names the first offending index).
    """
    t = np.asarray(times, dtype=np.float64)[burn_in:]
    v = np.asarray(values, dtype=np.float64)[burn_in:]
    if t.size != v.size:
        raise ValueError("times and values must have equal length")
    if t.size < 3:
        raise ValueError(f"need at least 3 points after burn_in, got {t.size}")
    bad = np.nonzero(~(v > 0.0))[0]
    if bad.size:
        idx = int(bad[0]) + burn_in
        raise ValueError(f"nonpositive value at index {idx}: cannot fit ln decay")
    return _ols(t, np.log(v))


def fit_decay_rate_weighted(times, values, std_errors, burn_in: int = 0) -> DecayFit:
    """Inverse-variance weighted fit of ln(values) against times.

    For Monte-Carlo averaged series of a multiplicative process the relative
    standard error of the mean grows roughly exponentially in time, so late
    points carry almost no information about the decay slope.  Weighting each
    ln(value) by (value / std_error)^2, its inverse delta-method variance,
    uses the whole series without letting the noise-dominated tail tilt the
    fit.  Points with zero reported error (deterministic series) fall back to
    the unweighted fit.
    """
    t = np.asarray(times, dtype=np.float64)[burn_in:]
    v = np.asarray(values, dtype=np.float64)[burn_in:]
    se = np.asarray(std_errors, dtype=np.float64)[burn_in:]
    if not (t.size == v.size == se.size):
        raise ValueError("times, values and std_errors must have equal length")
    if t.size < 3:
        raise ValueError(f"need at least 3 points after burn_in, got {t.size}")
    bad = np.nonzero(~(v > 0.0))[0]
    if bad.size:
        idx = int(bad[0]) + burn_in
        raise ValueError(f"nonpositive value at index {idx}: cannot fit ln decay")
    if not (se > 0.0).all():
        return _ols(t, np.log(v))
    y = np.log(v)
    w = (v / se) ** 2
    w = w / w.sum()
    tb = float(w @ t)
    yb = float(w @ y)
    dt_ = t - tb
    slope = float(w @ (dt_ * (y - yb))) / float(w @ (dt_ * dt_))
    intercept = yb - slope * tb
    resid = y - (slope * t + intercept)
    tss = float(w @ (y - yb) ** 2)
    r2 = 1.0 if tss == 0.0 else 1.0 - float(w @ (resid * resid)) / tss
    return DecayFit(slope=slope, intercept=intercept, r_squared=r2, n_points=t.size)


def pathwise_log_rate(traj: "Trajectory") -> float:
    """Pathwise exponential rate over a whole trajectory:
    (1/T) ln(||E_T|| / ||E_0||) for the trajectory's final time T.

    Returns -inf when the final error norm is exactly zero (consensus was
    reached to machine precision).

    Raises:
        ValueError: the initial error norm is zero (rate undefined) or the
            trajectory has fewer than 2 time points.
    """
    e = traj.diagnostics.e_norm_series
    t = traj.times
    if t.size < 2:
        raise ValueError("trajectory has no time extent")
    e0 = float(e[0])
    eT = float(e[-1])
    if e0 == 0.0:
        raise ValueError("initial state is at consensus: pathwise rate undefined")
    if eT == 0.0:
        return float("-inf")
    horizon = float(t[-1] - t[0])
    return math.log(eT / e0) / horizon
