"""Quantum learning of Boolean linear functions under biased product distributions.

Dense-statevector simulation and exact analytic sampling of the biased
Fourier-sampling subroutine, the learners built on it (OR-aggregation,
majority vote, noise-robust and unknown-distribution variants, classical
GF(2) baseline), and the sample-complexity bound calculators.
"""

from .bounds import (
    BoundQuery,
    BoundResult,
    binary_entropy,
    compute_bound,
    figure1_curves,
    max_bias_thm53,
    min_bias_thm74,
)
from .errors import CapacityError, ConfigError, IntegrityError
from .experiment import ExperimentConfig, ExperimentSummary, TrialRecord, run_experiment
from .fourier import (
    BiasVector,
    IndexString,
    PmOneVector,
    TargetString,
    basis_phi,
    fourier_coeff_bruteforce,
    fourier_coeff_closed,
    linear_fn,
    product_weight,
)
from .learners import (
    ClassicalExample,
    EliminationResult,
    LearnerOutput,
    classical_baseline,
    estimate_bias,
    learn_majority,
    learn_majority_noisy,
    learn_or_aggregate,
    learn_unknown_distribution,
)
from .sampler import (
    CleanDrawSource,
    NoiseParams,
    NoisyDrawSource,
    NoisyStatevectorDrawSource,
    PerturbedDrawSource,
    StatevectorDrawSource,
    SubroutineOutcome,
    full_outcome_distribution,
    sample_points,
    trial_rng,
)
from .statevector import (
    DEFAULT_CAPACITY,
    NoiseRealization,
    OutcomeDistribution,
    StateVector,
    apply_circuit,
    biased_hadamard,
    build_example_state,
    build_noisy_example_state,
    gate_distance,
    measurement_distribution,
    perturbed_qft,
    state_inner_product,
)

__all__ = [
    "BiasVector",
    "BoundQuery",
    "BoundResult",
    "CapacityError",
    "ClassicalExample",
    "CleanDrawSource",
    "ConfigError",
    "DEFAULT_CAPACITY",
    "EliminationResult",
    "ExperimentConfig",
    "ExperimentSummary",
    "IndexString",
    "IntegrityError",
    "LearnerOutput",
    "NoiseParams",
    "NoiseRealization",
    "NoisyDrawSource",
    "NoisyStatevectorDrawSource",
    "OutcomeDistribution",
    "PerturbedDrawSource",
    "PmOneVector",
    "StateVector",
    "StatevectorDrawSource",
    "SubroutineOutcome",
    "TargetString",
    "TrialRecord",
    "apply_circuit",
    "basis_phi",
    "biased_hadamard",
    "binary_entropy",
    "build_example_state",
    "build_noisy_example_state",
    "classical_baseline",
    "compute_bound",
    "estimate_bias",
    "figure1_curves",
    "fourier_coeff_bruteforce",
    "fourier_coeff_closed",
    "full_outcome_distribution",
    "gate_distance",
    "learn_majority",
    "learn_majority_noisy",
    "learn_or_aggregate",
    "learn_unknown_distribution",
    "linear_fn",
    "max_bias_thm53",
    "measurement_distribution",
    "min_bias_thm74",
    "perturbed_qft",
    "product_weight",
    "run_experiment",
    "sample_points",
    "state_inner_product",
    "trial_rng",
]

__version__ = "0.1.0"
