"""The linear algebra behind consensus formation.

For simplex weights l the interaction matrix is the rank-one update
I - 1 l^T.  Its spectrum is {0, 1, ..., 1}: the zero eigenvalue spans the
consensus direction (nothing moves once all agents agree), every orthogonal
direction contracts at unit rate.  Composed with the centering projector it
collapses to the projector itself, P L = P, which is why the projected
dynamics are exactly linear even though the weights depend nonlinearly on
the state.
"""

import numpy as np

from cbolab import (
    CenteringProjector,
    WeightVector,
    consensus_laplacian,
    rank_one_det,
    verify_projection_identity,
    verify_spectrum,
)

rng = np.random.default_rng(0)

print("=" * 72)
print("Spectrum check across sizes (random simplex weights)")
print("=" * 72)
for n in (2, 3, 10, 50, 200):
    worst = 0.0
    proj = CenteringProjector.of_size(n)
    for _ in range(50):
        w = WeightVector(rng.dirichlet(np.ones(n)))
        lap = consensus_laplacian(w)
        report = verify_spectrum(lap, tol=1e-10)
        assert report.passed and verify_projection_identity(lap, proj, 1e-12)
        worst = max(worst, report.max_deviation)
    print(f"  N = {n:4d}: 50 draws, spectrum = (0, 1 x {n - 1}), "
          f"max deviation {worst:.2e}")

print()
print("=" * 72)
print("Determinant lemma as an eigensolver-independent oracle")
print("=" * 72)
n = 6
w = WeightVector(rng.dirichlet(np.ones(n)))
lap = consensus_laplacian(w)
print("  det(L - mu I) evaluated two ways on a mu-grid:")
for mu in (-0.5, 0.0, 0.3, 1.0, 1.6):
    lemma = rank_one_det(1.0 - mu, -np.ones(n), w.weights)
    brute = float(np.linalg.det(lap.dense - mu * np.eye(n)))
    print(f"    mu = {mu:+.1f}: lemma {lemma:+.6e}   brute force {brute:+.6e}")
print("  roots sit exactly at mu = 0 and mu = 1, as the spectrum demands")

print()
print("=" * 72)
print("Why the projection identity holds for any weights at all")
print("=" * 72)
print("  P L - P = -(P 1) l^T and P annihilates the all-ones vector, so the")
print("  residual vanishes identically; what a broken simplex constraint")
print("  shifts is the zero eigenvalue, to 1 - sum(w):")
broken = rng.dirichlet(np.ones(5))
broken[0] += 1e-3
dense = np.eye(5) - np.outer(np.ones(5), broken)
eig = np.sort(np.linalg.eigvals(dense).real)
print(f"    eigenvalues with sum(w) = 1 + 1e-3: {np.array2string(eig, precision=6)}")
