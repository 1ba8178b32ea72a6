"""Secondary acceptance: the plot scripts consume real CLI outputs end to end.

Exercises the decay, snapshot and sweep figures on the data of acceptance
criteria 1, 3 and 9, gating on non-empty images and on the decay figure's
reported slope residual for the deterministic run.  Skipped when node or the
built frontend is unavailable; the primary criteria never depend on this.
"""

import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

FRONTEND = Path(__file__).resolve().parent.parent / "frontend"
PLOT_CLI = FRONTEND / "dist" / "cli.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not PLOT_CLI.exists(),
    reason="frontend not built (cd frontend && npm install && npm run build)",
)


def run_cbolab(*args):
    proc = subprocess.run(
        ["cbolab", *args], capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout)


def run_plot(*args):
    proc = subprocess.run(
        ["node", str(PLOT_CLI), *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout) if proc.stdout.strip() else {}


@pytest.fixture(scope="module")
def outputs(tmp_path_factory):
    root = tmp_path_factory.mktemp("plots_e2e")
    c1 = root / "criterion1"
    c3 = root / "criterion3"
    c9 = root / "criterion9"
    # criterion 1 data: deterministic base setting, trajectory + mc form
    run_cbolab(
        "simulate", "--mode", "deterministic", "--snapshots", "--seed", "42",
        "--out", str(c1),
    )
    run_cbolab(
        "mc", "--mode", "deterministic", "--runs", "1", "--seed", "42",
        "--out", str(c1),
    )
    # criterion 3 data: stochastic averaged curve at full replication
    run_cbolab("mc", "--sigma", "1", "--runs", "1000", "--seed", "42", "--out", str(c3))
    # criterion 9 data: deterministic particle-count sweep
    run_cbolab(
        "sweep", "--param", "n", "--from", "10", "--to", "1010", "--step", "200",
        "--mode", "deterministic", "--runs", "1", "--seed", "42", "--out", str(c9),
    )
    return {"c1": c1, "c3": c3, "c9": c9, "img": root / "img"}


def test_criterion_12_decay_residual_on_deterministic_data(outputs):
    outputs["img"].mkdir(exist_ok=True)
    out = outputs["img"] / "decay_c1.svg"
    discrete_rate = -2 * math.log(0.95) / 0.05
    result = run_plot(
        "decay",
        "--input", str(outputs["c1"] / "mc_mean.csv"),
        "--output", str(out),
        "--rate", f"discrete={discrete_rate!r}",
    )
    assert out.stat().st_size > 0
    residual = result["residuals"][0]["residual"]
    print(f"criterion 12: decay slope residual {residual:.3e} (bound 1e-4)")
    assert residual < 1e-4


def test_criterion_12_snapshot_panels(outputs):
    outputs["img"].mkdir(exist_ok=True)
    out = outputs["img"] / "snapshots_c1.svg"
    run_plot(
        "snapshots",
        "--trajectory", str(outputs["c1"] / "trajectory.csv"),
        "--snapshots", str(outputs["c1"] / "snapshots.csv"),
        "--objective", "rastrigin",
        "--output", str(out),
    )
    assert out.stat().st_size > 0
    body = out.read_text()
    assert body.count("stroke=\"red\"") >= 4  # a consensus marker per panel


def test_criterion_12_stochastic_decay_curve(outputs):
    outputs["img"].mkdir(exist_ok=True)
    out = outputs["img"] / "decay_c3.svg"
    result = run_plot(
        "decay",
        "--input", str(outputs["c3"] / "mc_mean.csv"),
        "--output", str(out),
        "--rate", "em-mean-square=0.9733",
    )
    assert out.stat().st_size > 0
    # stochastic curve: the fitted slope is near the reference, not exact
    assert abs(result["fitted_slope"] + 0.9733) < 0.35


def test_criterion_12_sweep_heat_map(outputs):
    outputs["img"].mkdir(exist_ok=True)
    out = outputs["img"] / "sweep_c9.svg"
    result = run_plot(
        "sweep", "--input", str(outputs["c9"] / "sweep.csv"), "--output", str(out)
    )
    assert out.stat().st_size > 0
    lo, hi = result["color_domain"]
    assert lo < hi
