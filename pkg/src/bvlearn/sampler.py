"""Exact analytic sampling of the Fourier-sampling subroutine's outcomes.

The subroutine measures the label qubit (success means it reads 1) and, on
success, the data register.  Conditioned on success the data bits are
independent: a coordinate with coefficient 0 always reads 0, and a coordinate
with coefficient 1 reads 1 with probability 1 - mu_i^2.  The label itself is a
fair coin for every target and bias, and on failure the data register is the
all-zero word, so the full outcome distribution is available in closed form
without touching a statevector.

Draw sources wrap the clean, label-noise, miscalibrated-gate and dense
statevector variants behind one vectorized interface so the learners do not
care which physics produced their outcomes.  Scalar draws delegate to the
batch path, so a given seed yields one well-defined outcome stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import BiasVector, IndexString, TargetString
from .statevector import (
    DEFAULT_CAPACITY,
    NoiseRealization,
    OutcomeDistribution,
    apply_circuit,
    build_example_state,
    build_noisy_example_state,
    measurement_distribution,
    perturbed_qft,
)

__all__ = [
    "NoiseParams",
    "NoiseRealization",
    "SubroutineOutcome",
    "trial_rng",
    "trial_seed_digest",
    "sample_points",
    "success_conditional_distribution",
    "noisy_conditional_distribution",
    "full_outcome_distribution",
    "DrawSource",
    "CleanDrawSource",
    "NoisyDrawSource",
    "StatevectorDrawSource",
    "PerturbedDrawSource",
    "NoisyStatevectorDrawSource",
    "draw_clean",
    "draw_noisy",
    "draw_perturbed",
]


@dataclass(frozen=True)
class NoiseParams:
    """Per-coordinate label-noise rates eta_i in [0, 1]."""

    rates: tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(v) for v in self.rates)
        if len(r) == 0:
            raise ValueError("noise rates must be non-empty")
        if any(not 0.0 <= v <= 1.0 for v in r):
            raise ValueError(f"noise rates must lie in [0, 1], got {r}")
        object.__setattr__(self, "rates", r)

    @property
    def n(self) -> int:
        return len(self.rates)

    @property
    def flip_probs(self) -> tuple[float, ...]:
        """Per-coordinate probability 2 eta (1 - eta) that the noise flips a coefficient."""
        return tuple(2.0 * e * (1.0 - e) for e in self.rates)

    @property
    def rho(self) -> float:
        """Worst-coordinate flip probability; the noise-robustness parameter."""
        return max(self.flip_probs)

    @classmethod
    def uniform(cls, n: int, eta: float) -> "NoiseParams":
        return cls((float(eta),) * n)


@dataclass(frozen=True)
class SubroutineOutcome:
    """One run of the subroutine: data bits are present exactly on success."""

    success: bool
    bits: IndexString | None

    def __post_init__(self):
        if self.success and self.bits is None:
            raise ValueError("successful outcome must carry data bits")
        if not self.success and self.bits is not None:
            raise ValueError("failed outcome carries no data bits")


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent counter-based stream for one trial.

    Philox keyed through SeedSequence((master_seed, trial_index)); streams for
    distinct indices never collide and do not depend on scheduling order.
    """
    seq = np.random.SeedSequence(entropy=(int(master_seed), int(trial_index)))
    return np.random.Generator(np.random.Philox(seq))


def trial_seed_digest(master_seed: int, trial_index: int) -> int:
    """Stable 64-bit identity of a trial's stream, for logging."""
    seq = np.random.SeedSequence(entropy=(int(master_seed), int(trial_index)))
    return int(seq.generate_state(1, np.uint64)[0])


def sample_points(bias: BiasVector, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw m hypercube points from the product distribution, as an (m, n) array of +-1."""
    if m < 0:
        raise ValueError(f"sample count must be >= 0, got {m}")
    mu = bias.as_array()
    plus = rng.random((m, bias.n)) < (1.0 + mu) / 2.0
    return np.where(plus, 1, -1).astype(np.int8)


def _per_bit_one_probs(target: TargetString, bias: BiasVector) -> np.ndarray:
    mu = bias.as_array()
    a = np.array(target.bits, dtype=float)
    return a * (1.0 - mu * mu)


def _expand_product(p_one: np.ndarray) -> np.ndarray:
    """Distribution over packed data words with independent bits; bit l one w.p. p_one[l]."""
    n = p_one.size
    probs = np.ones(1 << n)
    idx = np.arange(1 << n, dtype=np.uint64)
    for l in range(n):
        one = ((idx >> np.uint64(l)) & np.uint64(1)).astype(bool)
        probs *= np.where(one, p_one[l], 1.0 - p_one[l])
    return probs


def success_conditional_distribution(target: TargetString, bias: BiasVector) -> np.ndarray:
    """Data-word distribution conditioned on a successful label reading."""
    if target.n != bias.n:
        raise ValueError(f"dimension mismatch: {target.n} vs {bias.n}")
    return _expand_product(_per_bit_one_probs(target, bias))


def noisy_conditional_distribution(
    target: TargetString, bias: BiasVector, noise: NoiseParams
) -> np.ndarray:
    """Success-conditioned data-word distribution averaged over noise realizations.

    A coordinate's coefficient is flipped with probability 2 eta (1 - eta)
    independently, so the average stays a product distribution with
    P[bit l = 1] mixed accordingly.
    """
    if not target.n == bias.n == noise.n:
        raise ValueError("dimension mismatch between target, bias and noise")
    mu = bias.as_array()
    a = np.array(target.bits, dtype=float)
    flip = np.array(noise.flip_probs)
    p_if_one = 1.0 - mu * mu
    p_one = a * ((1.0 - flip) * p_if_one) + (1.0 - a) * (flip * p_if_one)
    return _expand_product(p_one)


def full_outcome_distribution(
    target: TargetString, bias: BiasVector, noise: NoiseParams | None = None
) -> OutcomeDistribution:
    """Closed-form distribution over all n+1 measured bits.

    Half the mass is the failure branch, which sits entirely on the all-zero
    data word because the constant function is the only basis element with a
    nonzero mean; the other half is the success-conditioned product law.
    Indexing matches the statevector engine: (data word << 1) | label.
    """
    cond = (
        success_conditional_distribution(target, bias)
        if noise is None
        else noisy_conditional_distribution(target, bias, noise)
    )
    n = target.n
    probs = np.zeros(1 << (n + 1))
    probs[0] = 0.5
    probs[1::2] = 0.5 * cond
    return OutcomeDistribution(probs, n + 1)


def _unpack_outcomes(outcomes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    success = (outcomes & 1).astype(bool)
    shifts = np.arange(1, n + 1, dtype=np.uint64)
    bits = ((outcomes[:, None].astype(np.uint64) >> shifts) & np.uint64(1)).astype(np.uint8)
    return success, bits


class DrawSource:
    """Abstract outcome source: vectorized draw_many plus a scalar wrapper.

    Learners depend only on this interface, so the analytic, label-noise,
    miscalibrated-gate and dense-statevector engines are interchangeable.
    """

    n: int

    def draw_many(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def draw(self, rng: np.random.Generator) -> SubroutineOutcome:
        success, bits = self.draw_many(1, rng)
        if not success[0]:
            return SubroutineOutcome(False, None)
        return SubroutineOutcome(True, IndexString(tuple(int(b) for b in bits[0])))


class CleanDrawSource(DrawSource):
    """Noiseless subroutine sampled from its closed-form law.

    Stream consumption per batch of m: m uniforms for the label coin, then an
    (m, n) block for the data bits.  Rows of the bit array are meaningful only
    where the success mask is set.
    """

    def __init__(self, target: TargetString, bias: BiasVector):
        if target.n != bias.n:
            raise ValueError(f"dimension mismatch: {target.n} vs {bias.n}")
        self.n = target.n
        self._p_one = _per_bit_one_probs(target, bias)

    def draw_many(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        success = rng.random(m) < 0.5
        bits = (rng.random((m, self.n)) < self._p_one).astype(np.uint8)
        return success, bits


class NoisyDrawSource(DrawSource):
    """Subroutine under label noise, via the per-copy effective-string law.

    Each copy draws a fresh realization; a coordinate's coefficient flips with
    probability 2 eta (1 - eta), after which the clean law applies.  Stream
    order per batch: flips (m, n), label coins (m,), data uniforms (m, n).
    """

    def __init__(self, target: TargetString, bias: BiasVector, noise: NoiseParams):
        if not target.n == bias.n == noise.n:
            raise ValueError("dimension mismatch between target, bias and noise")
        self.n = target.n
        self._a = np.array(target.bits, dtype=np.uint8)
        self._p_if_one = 1.0 - bias.as_array() ** 2
        self._flip = np.array(noise.flip_probs)

    def draw_many(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        flips = rng.random((m, self.n)) < self._flip
        effective = self._a ^ flips.astype(np.uint8)
        success = rng.random(m) < 0.5
        bits = (rng.random((m, self.n)) < effective * self._p_if_one).astype(np.uint8)
        return success, bits


class _CachedDistributionSource(DrawSource):
    """Samples outcome words from one precomputed full distribution."""

    def __init__(self, dist: OutcomeDistribution):
        self.n = dist.num_bits - 1
        self.distribution = dist
        self._probs = dist.probs
        self._support = np.arange(self._probs.size)

    def draw_many(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        outcomes = rng.choice(self._support, size=m, p=self._probs)
        return _unpack_outcomes(outcomes, self.n)


class StatevectorDrawSource(_CachedDistributionSource):
    """Exact dense-simulation law of the clean circuit (capacity-limited)."""

    def __init__(self, target: TargetString, bias: BiasVector, capacity: int = DEFAULT_CAPACITY):
        state = build_example_state(target, bias, capacity)
        super().__init__(measurement_distribution(apply_circuit(state, bias, capacity=capacity)))


class PerturbedDrawSource(_CachedDistributionSource):
    """Law of the circuit run with gates from a miscalibrated bias.

    The state is prepared under the true bias; the transforms use
    ``bias_tilde``.  ``gate_error`` carries the summed per-gate operator
    distance, an upper bound on every outcome-probability deviation.
    """

    def __init__(
        self,
        target: TargetString,
        bias: BiasVector,
        bias_tilde: BiasVector,
        capacity: int = DEFAULT_CAPACITY,
    ):
        state = build_example_state(target, bias, capacity)
        super().__init__(
            measurement_distribution(apply_circuit(state, bias_tilde, capacity=capacity))
        )
        _, self.gate_error = perturbed_qft(bias, bias_tilde)


class NoisyStatevectorDrawSource(DrawSource):
    """Dense simulation under label noise: a fresh realization per copy.

    Builds one noisy state per draw, so this is the slow oracle path; the
    analytic NoisyDrawSource is the Monte-Carlo workhorse.
    """

    def __init__(
        self,
        target: TargetString,
        bias: BiasVector,
        noise: NoiseParams,
        capacity: int = DEFAULT_CAPACITY,
    ):
        if not target.n == bias.n == noise.n:
            raise ValueError("dimension mismatch between target, bias and noise")
        # fail fast on capacity before the per-draw loop
        build_example_state(target, bias, capacity)
        self.n = target.n
        self._target = target
        self._bias = bias
        self._noise = noise
        self._capacity = capacity

    def draw_many(self, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        outcomes = np.empty(m, dtype=np.int64)
        support = np.arange(1 << (self.n + 1))
        for k in range(m):
            xi = NoiseRealization.sample(self._noise.rates, rng)
            state = build_noisy_example_state(self._target, self._bias, xi, self._capacity)
            dist = measurement_distribution(
                apply_circuit(state, self._bias, capacity=self._capacity)
            )
            outcomes[k] = rng.choice(support, p=dist.probs)
        return _unpack_outcomes(outcomes, self.n)


def draw_clean(target: TargetString, bias: BiasVector, rng: np.random.Generator) -> SubroutineOutcome:
    """One clean subroutine run from the analytic law."""
    return CleanDrawSource(target, bias).draw(rng)


def draw_noisy(
    target: TargetString, bias: BiasVector, noise: NoiseParams, rng: np.random.Generator
) -> SubroutineOutcome:
    """One subroutine run under label noise (fresh realization)."""
    return NoisyDrawSource(target, bias, noise).draw(rng)


def draw_perturbed(
    target: TargetString,
    bias: BiasVector,
    bias_tilde: BiasVector,
    rng: np.random.Generator,
    capacity: int = DEFAULT_CAPACITY,
) -> SubroutineOutcome:
    """One run with miscalibrated gates, sampled from the exact simulated law."""
    return PerturbedDrawSource(target, bias, bias_tilde, capacity).draw(rng)
