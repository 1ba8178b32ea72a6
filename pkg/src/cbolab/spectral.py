"""Linear-algebra objects behind consensus formation.

For simplex weights l = (a_1, ..., a_N) the matrix I - 1 l^T plays the role
of a graph Laplacian on the complete interaction graph: it has eigenvalue 0
(eigenvector 1, the consensus direction) and eigenvalue 1 with multiplicity
N - 1 (every direction orthogonal to consensus contracts).  Composed with
the centering projector P = I - (1/N) 1 1^T it satisfies the identity
P L = P, which is what makes the projected consensus dynamics exactly
linear.  Matrices are kept dense: N stays in the hundreds-to-thousands and
the structure is rank-one, so sparse machinery would buy nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .ensemble import WeightVector, _frozen_array

__all__ = [
    "ConsensusLaplacian",
    "CenteringProjector",
    "SpectrumReport",
    "consensus_laplacian",
    "verify_spectrum",
    "verify_projection_identity",
    "rank_one_det",
]

Array = NDArray[np.float64]


@dataclass(frozen=True)
class ConsensusLaplacian:
    """Dense I_N - 1_N l^T for a weight vector l; every row sums to zero."""

    weights: WeightVector
    dense: Array

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class CenteringProjector:
    """Dense P = I - (1/N) 1 1^T: symmetric, idempotent, kernel = span{1}."""

    dense: Array

    def __post_init__(self) -> None:
        object.__setattr__(self, "dense", _frozen_array(self.dense, "dense"))

    @property
    def size(self) -> int:
        return self.dense.shape[0]

    @classmethod
    def of_size(cls, n: int) -> "CenteringProjector":
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        return cls(np.eye(n) - np.full((n, n), 1.0 / n))


@dataclass(frozen=True)
class SpectrumReport:
    """Sorted eigenvalues of a consensus Laplacian and the pass verdict.

    `passed` means the sorted spectrum equals (0, 1, ..., 1) within the
    requested tolerance (just (0,) in the degenerate N = 1 case).
    """

    eigenvalues: Array
    passed: bool
    max_deviation: float


def consensus_laplacian(w: WeightVector) -> ConsensusLaplacian:
    """Build the dense rank-one-update matrix I - 1 l^T from simplex weights."""
    n = len(w)
    dense = np.eye(n) - np.outer(np.ones(n), w.weights)
    dense.setflags(write=False)
    return ConsensusLaplacian(weights=w, dense=dense)


def verify_spectrum(l: ConsensusLaplacian, tol: float) -> SpectrumReport:
    """Check that the spectrum is exactly one zero plus N - 1 ones.

    Eigenvalues are computed with a dense nonsymmetric eigensolver and
    compared, after sorting by real part, against (0, 1, ..., 1); imaginary
    parts count toward the deviation.
    """
    n = l.size
    eig = np.linalg.eigvals(l.dense)
    order = np.argsort(eig.real)
    eig = eig[order]
    expected = np.concatenate(([0.0], np.ones(n - 1)))
    dev = float(np.max(np.abs(eig - expected)))
    report = SpectrumReport(
        eigenvalues=eig.real.copy(), passed=bool(dev <= tol), max_deviation=dev
    )
    report.eigenvalues.setflags(write=False)
    return report


def verify_projection_identity(
    l: ConsensusLaplacian, proj: CenteringProjector, tol: float
) -> bool:
    """True iff max-abs entry of P L - P is at most tol."""
    if l.size != proj.size:
        raise ValueError(f"size mismatch: laplacian {l.size}, projector {proj.size}")
    residual = proj.dense @ l.dense - proj.dense
    return bool(np.max(np.abs(residual)) <= tol)


def rank_one_det(a_scale: float, c: Array, d: Array) -> float:
    """det(a_scale * I + c d^T) via the matrix determinant lemma.

    Evaluates a_scale^(N-1) * (a_scale + d^T c), which avoids dividing by
    a_scale and therefore degrades gracefully at a_scale = 0: the result is
    then 0 for N >= 2 (a rank-one matrix is singular) and c*d for N = 1.

    Useful as an eigensolver-independent oracle: with a_scale = 1 - mu,
    c = -1 and d = l it evaluates the characteristic polynomial of the
    consensus Laplacian on a mu-grid.
    """
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if c.shape != d.shape or c.ndim != 1 or c.size < 1:
        raise ValueError(f"c and d must be equal-length vectors, got {c.shape}, {d.shape}")
    n = c.size
    return float(a_scale ** (n - 1) * (a_scale + float(d @ c)))
