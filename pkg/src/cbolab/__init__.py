"""cbolab: consensus-based optimization dynamics with exact rate diagnostics.

A numpy library plus CLI for the three standard CBO variants (deterministic
drift, anisotropic and isotropic Euler-Maruyama diffusion), built around the
quantity that controls consensus formation: the component of the particle
state orthogonal to the consensus manifold.  The deterministic projected
error contracts exactly geometrically regardless of the objective, and the
stochastic variants admit closed-form mean-square and pathwise decay rates;
this package computes those rates, simulates the dynamics reproducibly, and
estimates the empirical rates from single runs and Monte-Carlo averages.
"""

__version__ = "0.1.0"

from .diagnostics import (
    DecayFit,
    DiagnosticSeries,
    McRateEstimate,
    RateReport,
    em_as_rate_mc,
    fit_decay_rate,
    fit_decay_rate_weighted,
    pathwise_log_rate,
    theoretical_rates,
)
from .dynamics import (
    MODES,
    CboParams,
    NoiseSource,
    Trajectory,
    em_step_anisotropic,
    em_step_isotropic,
    euler_step_deterministic,
    simulate,
)
from .ensemble import (
    ConsensusState,
    NonFiniteObjectiveError,
    Objective,
    ParticleEnsemble,
    WeightVector,
    consensus_point,
    distance_sq_to_consensus,
    projected_offset,
    softmax_weights,
)
from .montecarlo import (
    McConfig,
    McResult,
    derive_seed,
    run_mc,
    sweep,
)
from .objectives import (
    ObjectiveRegistry,
    default_registry,
    discontinuous_integrand,
    rastrigin,
    rosenbrock,
)
from .spectral import (
    CenteringProjector,
    ConsensusLaplacian,
    SpectrumReport,
    consensus_laplacian,
    rank_one_det,
    verify_projection_identity,
    verify_spectrum,
)

__all__ = [
    "__version__",
    # ensemble
    "ParticleEnsemble",
    "WeightVector",
    "Objective",
    "ConsensusState",
    "NonFiniteObjectiveError",
    "softmax_weights",
    "consensus_point",
    "projected_offset",
    "distance_sq_to_consensus",
    # objectives
    "rastrigin",
    "rosenbrock",
    "discontinuous_integrand",
    "ObjectiveRegistry",
    "default_registry",
    # spectral
    "ConsensusLaplacian",
    "CenteringProjector",
    "SpectrumReport",
    "consensus_laplacian",
    "verify_spectrum",
    "verify_projection_identity",
    "rank_one_det",
    # dynamics
    "MODES",
    "CboParams",
    "NoiseSource",
    "Trajectory",
    "euler_step_deterministic",
    "em_step_anisotropic",
    "em_step_isotropic",
    "simulate",
    # diagnostics
    "DiagnosticSeries",
    "RateReport",
    "McRateEstimate",
    "DecayFit",
    "theoretical_rates",
    "em_as_rate_mc",
    "fit_decay_rate",
    "fit_decay_rate_weighted",
    "pathwise_log_rate",
    # montecarlo
    "McConfig",
    "McResult",
    "derive_seed",
    "run_mc",
    "sweep",
]
