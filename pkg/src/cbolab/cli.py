"""Command-line front end.

Subcommands: `simulate` (one trajectory), `mc` (replicated averages),
`sweep` (one-parameter grids), `rates` (closed-form rate report), and
`verify-spectral` (randomized checks of the consensus Laplacian).

Series are written as CSV with a fixed, documented column order; reports
and the run manifest are JSON.  All floating-point output uses 17
significant digits so files round-trip exactly and reruns can be compared
byte for byte.  The manifest echoes the fully resolved configuration:
re-running with the echoed values reproduces identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .diagnostics import em_as_rate_mc, theoretical_rates
from .dynamics import MODES, CboParams, NoiseSource, Trajectory, simulate
from .ensemble import ParticleEnsemble, WeightVector
from .montecarlo import (
    SWEEP_PARAMS,
    McConfig,
    McResult,
    resolve_workers,
    run_mc,
    sweep,
)
from .objectives import default_registry
from .spectral import (
    CenteringProjector,
    consensus_laplacian,
    verify_projection_identity,
    verify_spectrum,
)

__all__ = ["main", "build_parser"]

TRAJECTORY_CSV = "trajectory.csv"
SNAPSHOTS_CSV = "snapshots.csv"
MC_MEAN_CSV = "mc_mean.csv"
SWEEP_CSV = "sweep.csv"


def _fmt(x: float) -> str:
    """Float to 17-significant-digit text (exact float64 round trip)."""
    return f"{x:.17g}"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_rows(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _print_manifest(manifest: dict) -> None:
    json.dump(manifest, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _sigma_from_args(args) -> float:
    if getattr(args, "sigma_sq", None) is not None:
        return float(np.sqrt(args.sigma_sq))
    return args.sigma


def _add_common_dynamics_flags(sub: argparse.ArgumentParser, default_mode: str) -> None:
    sub.add_argument("--objective", default="rastrigin", help="objective name")
    sub.add_argument("--n", type=int, default=100, help="number of particles")
    sub.add_argument("--dim", type=int, default=2, help="space dimension")
    sub.add_argument("--lambda", dest="lam", type=float, default=1.0, help="drift gain")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--sigma", type=float, default=1.0, help="diffusion gain")
    group.add_argument(
        "--sigma-sq", type=float, default=None, help="diffusion gain squared (convenience)"
    )
    sub.add_argument("--alpha", type=float, default=1000.0, help="softmax sharpness")
    sub.add_argument("--dt", type=float, default=0.05, help="time step")
    sub.add_argument("--steps", type=int, default=100, help="number of time steps")
    sub.add_argument("--mode", choices=MODES, default=default_mode)
    sub.add_argument("--seed", type=int, default=42, help="root seed")
    sub.add_argument(
        "--init",
        type=float,
        nargs=2,
        default=[-5.0, 5.0],
        metavar=("LOW", "HIGH"),
        help="uniform initialization box",
    )
    sub.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbolab",
        description="Consensus-based optimization dynamics and rate diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"cbolab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_sim = subs.add_parser("simulate", help="run one trajectory, write trajectory.csv")
    _add_common_dynamics_flags(p_sim, default_mode="anisotropic")
    p_sim.add_argument(
        "--snapshots", action="store_true", help="also write snapshots.csv"
    )
    p_sim.add_argument(
        "--snapshot-stride", type=int, default=1, help="keep every k-th snapshot"
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_mc = subs.add_parser("mc", help="averaged replicates, write mc_mean.csv")
    _add_common_dynamics_flags(p_mc, default_mode="anisotropic")
    p_mc.add_argument("--runs", type=int, default=1000, help="number of replicates")
    p_mc.add_argument(
        "--clip",
        default="auto",
        help="per-run pointwise cap on V: a number, 'auto' (10 x run initial), or 'none'",
    )
    p_mc.add_argument("--workers", type=int, default=None, help="process count")
    p_mc.set_defaults(func=cmd_mc)

    p_sweep = subs.add_parser("sweep", help="one-parameter grid of mc runs")
    _add_common_dynamics_flags(p_sweep, default_mode="anisotropic")
    p_sweep.add_argument("--runs", type=int, default=1000)
    p_sweep.add_argument("--clip", default="auto")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument(
        "--param", required=True, choices=("alpha", "n", "dim"), help="swept parameter"
    )
    p_sweep.add_argument("--from", dest="grid_from", type=float, required=True)
    p_sweep.add_argument("--to", dest="grid_to", type=float, required=True)
    p_sweep.add_argument("--step", dest="grid_step", type=float, required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_rates = subs.add_parser("rates", help="closed-form rate report as JSON")
    p_rates.add_argument("--lambda", dest="lam", type=float, default=1.0)
    group = p_rates.add_mutually_exclusive_group()
    group.add_argument("--sigma", type=float, default=1.0)
    group.add_argument("--sigma-sq", type=float, default=None)
    p_rates.add_argument("--dt", type=float, default=0.05)
    p_rates.add_argument("--dim", type=int, default=2)
    p_rates.add_argument("--mode", choices=MODES, default="anisotropic")
    p_rates.add_argument(
        "--mc-samples", type=int, default=None, help="also estimate the discrete rate"
    )
    p_rates.add_argument("--seed", type=int, default=42)
    p_rates.set_defaults(func=cmd_rates)

    p_spec = subs.add_parser(
        "verify-spectral", help="randomized consensus-Laplacian checks"
    )
    p_spec.add_argument("--n", type=int, default=50, help="matrix size")
    p_spec.add_argument("--trials", type=int, default=100)
    p_spec.add_argument("--tol", type=float, default=1e-10)
    p_spec.add_argument("--seed", type=int, default=42)
    p_spec.add_argument(
        "--inject-broken-weights",
        action="store_true",
        help="negative control: break the simplex constraint and expect failure",
    )
    p_spec.set_defaults(func=cmd_verify_spectral)

    return parser


def _resolve_objective(parser_error, name: str):
    registry = default_registry()
    if name not in registry:
        parser_error(f"unknown objective {name!r}; known: {', '.join(registry.names())}")
    return registry.get(name)


def _validated_params(parser_error, args) -> CboParams:
    try:
        return CboParams(
            lam=args.lam,
            sigma=_sigma_from_args(args),
            alpha=args.alpha,
            dt=args.dt,
            mode=args.mode,
        )
    except ValueError as exc:
        parser_error(str(exc))
        raise AssertionError("unreachable")


def _common_config_echo(args, params: CboParams) -> dict:
    return {
        "objective": args.objective,
        "n": args.n,
        "dim": args.dim,
        "lambda": params.lam,
        "sigma": params.sigma,
        "alpha": params.alpha,
        "dt": params.dt,
        "steps": args.steps,
        "mode": params.mode,
        "seed": args.seed,
        "init": list(args.init),
        "out": args.out,
    }


def _warn_admissibility(params: CboParams) -> None:
    # report-only: the unstable regimes are legitimate study targets
    if not params.euler_stable:
        print(
            f"warning: lambda*dt = {params.lam * params.dt:g} >= 1 "
            "(explicit Euler contraction lost)",
            file=sys.stderr,
        )
    if params.mode != "deterministic" and not params.em_ms_stable:
        print(
            "warning: step size outside the discrete mean-square stability range "
            f"(2*lambda - sigma^2 = {2 * params.lam - params.sigma ** 2:g})",
            file=sys.stderr,
        )


def cmd_simulate(args, parser_error) -> int:
    if args.steps < 1:
        parser_error(f"--steps must be >= 1, got {args.steps}")
    if args.n < 1:
        parser_error(f"--n must be >= 1, got {args.n}")
    if args.dim < 1:
        parser_error(f"--dim must be >= 1, got {args.dim}")
    if args.snapshot_stride < 1:
        parser_error(f"--snapshot-stride must be >= 1, got {args.snapshot_stride}")
    if not args.init[0] < args.init[1]:
        parser_error(f"--init must satisfy LOW < HIGH, got {args.init}")
    params = _validated_params(parser_error, args)
    objective = _resolve_objective(parser_error, args.objective)
    _warn_admissibility(params)

    started = _utc_now()
    t0 = time.time()
    noise = NoiseSource(args.seed, stream_id=0)
    init = ParticleEnsemble(
        noise.uniform_box(args.n, args.dim, args.init[0], args.init[1])
    )
    traj = simulate(
        init,
        params,
        objective,
        args.steps,
        noise=noise,
        snapshot_stride=args.snapshot_stride if args.snapshots else None,
    )

    os.makedirs(args.out, exist_ok=True)
    outputs = []
    traj_path = os.path.join(args.out, TRAJECTORY_CSV)
    _write_trajectory_csv(traj_path, traj, args.dim)
    outputs.append(traj_path)
    if args.snapshots:
        snap_path = os.path.join(args.out, SNAPSHOTS_CSV)
        _write_snapshots_csv(snap_path, traj, args.dim)
        outputs.append(snap_path)

    manifest = {
        "command": "simulate",
        "version": __version__,
        "seed": args.seed,
        "config": {
            **_common_config_echo(args, params),
            "snapshots": bool(args.snapshots),
            "snapshot_stride": args.snapshot_stride,
        },
        "outputs": outputs,
        "diverged": traj.diverged,
        "diverged_step": traj.diverged_step,
        "started_utc": started,
        "finished_utc": _utc_now(),
        "elapsed_seconds": time.time() - t0,
    }
    _print_manifest(manifest)
    return 0


def _write_trajectory_csv(path: str, traj: Trajectory, dim: int) -> None:
    diag = traj.diagnostics
    header = "step,time,v,e_norm,best_f," + ",".join(
        f"consensus_{d}" for d in range(dim)
    )

    def rows():
        for k in range(len(diag)):
            cons = ",".join(_fmt(c) for c in diag.consensus_series[k])
            yield (
                f"{k},{_fmt(diag.times[k])},{_fmt(diag.v_series[k])},"
                f"{_fmt(diag.e_norm_series[k])},{_fmt(diag.best_f_series[k])},{cons}"
            )

    _write_rows(path, header, rows())


def _write_snapshots_csv(path: str, traj: Trajectory, dim: int) -> None:
    header = "step,agent," + ",".join(f"coord_{d}" for d in range(dim))

    def rows():
        for step, ens in traj.snapshots or ():
            for agent in range(ens.n_particles):
                coords = ",".join(_fmt(c) for c in ens.positions[agent])
                yield f"{step},{agent},{coords}"

    _write_rows(path, header, rows())


def _parse_clip(parser_error, text: str):
    if text == "auto":
        return "auto"
    if text == "none":
        return None
    try:
        value = float(text)
    except ValueError:
        parser_error(f"--clip must be a number, 'auto' or 'none', got {text!r}")
    if not value > 0:
        parser_error(f"--clip threshold must be positive, got {value}")
    return value


def _mc_config(parser_error, args) -> McConfig:
    params = _validated_params(parser_error, args)
    _resolve_objective(parser_error, args.objective)
    if args.runs < 1:
        parser_error(f"--runs must be >= 1, got {args.runs}")
    if args.steps < 1:
        parser_error(f"--steps must be >= 1, got {args.steps}")
    try:
        return McConfig(
            base=params,
            objective=args.objective,
            n_particles=args.n,
            dim=args.dim,
            steps=args.steps,
            runs=args.runs,
            seed=args.seed,
            init_low=args.init[0],
            init_high=args.init[1],
            clip=_parse_clip(parser_error, args.clip),
        )
    except ValueError as exc:
        parser_error(str(exc))
        raise AssertionError("unreachable")


def cmd_mc(args, parser_error) -> int:
    cfg = _mc_config(parser_error, args)
    _warn_admissibility(cfg.base)
    workers = resolve_workers(args.workers)
    started = _utc_now()
    t0 = time.time()
    result = run_mc(cfg, workers=workers)

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, MC_MEAN_CSV)
    _write_mc_csv(path, result)

    manifest = {
        "command": "mc",
        "version": __version__,
        "seed": args.seed,
        "config": {
            **_common_config_echo(args, cfg.base),
            "runs": cfg.runs,
            "clip": cfg.clip if not isinstance(cfg.clip, str) else cfg.clip,
        },
        "clip_policy": result.clip_policy,
        "workers": workers,
        "outputs": [path],
        "diverged_count": result.diverged_count,
        "started_utc": started,
        "finished_utc": _utc_now(),
        "elapsed_seconds": time.time() - t0,
    }
    _print_manifest(manifest)
    return 0


def _write_mc_csv(path: str, result: McResult) -> None:
    def rows():
        for k in range(result.times.size):
            yield (
                f"{k},{_fmt(result.times[k])},{_fmt(result.mean_v[k])},"
                f"{_fmt(result.stderr_v[k])}"
            )

    _write_rows(path, "step,time,mean_v,stderr_v", rows())


def cmd_sweep(args, parser_error) -> int:
    cfg = _mc_config(parser_error, args)
    param = {"alpha": "alpha", "n": "n_particles", "dim": "dim"}[args.param]
    if args.grid_step <= 0:
        parser_error(f"--step must be positive, got {args.grid_step}")
    values = list(np.arange(args.grid_from, args.grid_to + args.grid_step / 2, args.grid_step))
    if not values:
        parser_error("empty sweep grid")
    workers = resolve_workers(args.workers)
    started = _utc_now()
    t0 = time.time()
    try:
        results = sweep(cfg, param, values, workers=workers)
    except ValueError as exc:
        parser_error(str(exc))
        raise AssertionError("unreachable")

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, SWEEP_CSV)

    def rows():
        for value, res in results:
            vtxt = _fmt(value)
            for k in range(res.times.size):
                yield f"{vtxt},{k},{_fmt(res.times[k])},{_fmt(res.mean_v[k])}"

    _write_rows(path, "param_value,step,time,mean_v", rows())

    manifest = {
        "command": "sweep",
        "version": __version__,
        "seed": args.seed,
        "config": {
            **_common_config_echo(args, cfg.base),
            "runs": cfg.runs,
            "clip": cfg.clip,
            "param": args.param,
            "grid_from": args.grid_from,
            "grid_to": args.grid_to,
            "grid_step": args.grid_step,
        },
        "grid_values": [float(v) for v in values],
        "workers": workers,
        "outputs": [path],
        "started_utc": started,
        "finished_utc": _utc_now(),
        "elapsed_seconds": time.time() - t0,
    }
    _print_manifest(manifest)
    return 0


def cmd_rates(args, parser_error) -> int:
    try:
        # alpha plays no role in any rate formula; any positive value works
        params = CboParams(
            lam=args.lam,
            sigma=_sigma_from_args(args),
            alpha=1.0,
            dt=args.dt,
            mode=args.mode,
        )
    except ValueError as exc:
        parser_error(str(exc))
        raise AssertionError("unreachable")
    report = theoretical_rates(params, args.dim)
    payload: dict = {"rates": report.to_dict()}
    if args.mc_samples is not None:
        try:
            est = em_as_rate_mc(
                params.lam, params.sigma, params.dt, args.mc_samples, args.seed
            )
        except ValueError as exc:
            parser_error(str(exc))
            raise AssertionError("unreachable")
        payload["as_rate_mc"] = {
            "estimate": est.estimate,
            "std_error": est.std_error,
            "samples": est.samples,
            "min_abs_argument": est.min_abs_argument,
        }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_verify_spectral(args, parser_error) -> int:
    if args.n < 1:
        parser_error(f"--n must be >= 1, got {args.n}")
    if args.trials < 1:
        parser_error(f"--trials must be >= 1, got {args.trials}")
    rng = np.random.default_rng(args.seed)
    proj = CenteringProjector.of_size(args.n)
    failures = 0
    worst_spectrum = 0.0
    worst_identity = 0.0
    for _ in range(args.trials):
        weights = rng.dirichlet(np.ones(args.n))
        if args.inject_broken_weights and args.n >= 2:
            # Breaking the simplex constraint shifts the zero eigenvalue to
            # 1 - sum(w); the projection identity P L = P holds for any w
            # (P 1 = 0), so the spectrum check is the one that must catch it.
            broken = weights.copy()
            broken[0] += 1e-3
            dense = np.eye(args.n) - np.outer(np.ones(args.n), broken)
            eig = np.sort(np.linalg.eigvals(dense).real)
            expected = np.concatenate(([0.0], np.ones(args.n - 1)))
            dev = float(np.max(np.abs(eig - expected)))
            worst_spectrum = max(worst_spectrum, dev)
            if dev > args.tol:
                failures += 1
            continue
        lap = consensus_laplacian(WeightVector(weights))
        report = verify_spectrum(lap, args.tol)
        ok_identity = verify_projection_identity(lap, proj, args.tol)
        worst_spectrum = max(worst_spectrum, report.max_deviation)
        residual = proj.dense @ lap.dense - proj.dense
        worst_identity = max(worst_identity, float(np.max(np.abs(residual))))
        if not (report.passed and ok_identity):
            failures += 1
    passed = failures == 0
    json.dump(
        {
            "command": "verify-spectral",
            "version": __version__,
            "n": args.n,
            "trials": args.trials,
            "tol": args.tol,
            "failures": failures,
            "max_spectrum_deviation": worst_spectrum,
            "max_identity_deviation": worst_identity,
            "passed": passed,
            "negative_control": bool(args.inject_broken_weights),
        },
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")
    return 0 if passed else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser.error)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
