"""Dense statevector engine for the biased Fourier-sampling circuit.

Registers and indexing: a state over n data qubits plus one label qubit is a
complex vector of length 2^(n+1).  Bit 0 of a basis index is the label qubit;
bit i (1 <= i <= n) is data qubit i.  A data qubit in bit value 0 encodes the
point coordinate x_i = +1, bit value 1 encodes x_i = -1, so the data bits of
an index are exactly the packed word used by the fourier module.

Single-qubit gates are applied in place with strided views, giving O(n 2^n)
per circuit; memory is the single amplitude vector.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, IntegrityError
from .fourier import BiasVector, TargetString, all_point_labels, all_point_weights, parity_words

__all__ = [
    "DEFAULT_CAPACITY",
    "StateVector",
    "OutcomeDistribution",
    "NoiseRealization",
    "biased_hadamard",
    "build_example_state",
    "build_noisy_example_state",
    "apply_circuit",
    "measurement_distribution",
    "state_inner_product",
    "perturbed_qft",
    "gate_distance",
    "dump_state_csv",
]

# Data-qubit limit for dense simulation: 2^21 complex amplitudes ~ 32 MiB.
DEFAULT_CAPACITY = 20

_NORM_TOL = 1e-10
_PROB_DRIFT_TOL = 1e-6
_NEG_CLAMP = 1e-12
_UNITARY_TOL = 1e-12


def _check_capacity(n: int, capacity: int) -> None:
    if n > capacity:
        raise CapacityError(f"n={n} data qubits exceeds capacity {capacity}")
    if n < 1:
        raise ValueError(f"need at least one data qubit, got n={n}")


@dataclass(frozen=True)
class StateVector:
    """Immutable amplitude vector over n data qubits plus the label qubit."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size != (1 << (self.n + 1)):
            raise ValueError(f"expected 2^{self.n + 1} amplitudes, got shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_TOL:
            raise IntegrityError(f"state norm {norm} drifted beyond {_NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability vector over measurement outcomes of ``num_bits`` bits.

    Negative entries above -1e-12 are clamped to zero and the vector is
    renormalized; anything worse raises IntegrityError.
    """

    probs: np.ndarray
    num_bits: int

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size != (1 << self.num_bits):
            raise ValueError(f"expected 2^{self.num_bits} probabilities, got shape {p.shape}")
        if p.min() < -_NEG_CLAMP:
            raise IntegrityError(f"probability {p.min()} below clamp threshold")
        p[p < 0.0] = 0.0
        total = float(p.sum())
        if abs(total - 1.0) > _PROB_DRIFT_TOL:
            raise IntegrityError(f"probability mass {total} drifted beyond {_PROB_DRIFT_TOL}")
        p /= total
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class NoiseRealization:
    """One drawn table of label-noise bits, two per coordinate.

    xi_plus[i] is added to the label when x_{i+1} = +1, xi_minus[i] when
    x_{i+1} = -1.  Derived views: sign_bits b_i = xi_plus[i] (a global label
    offset) and flip_bits y_i = xi_plus[i] XOR xi_minus[i] (the coordinates
    whose coefficient the noise flips).
    """

    xi_plus: tuple[int, ...]
    xi_minus: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(b) for b in self.xi_plus)
        m = tuple(int(b) for b in self.xi_minus)
        if len(p) != len(m) or len(p) == 0:
            raise ValueError("xi_plus and xi_minus must be non-empty and equal length")
        if any(b not in (0, 1) for b in p + m):
            raise ValueError("noise bits must be 0/1")
        object.__setattr__(self, "xi_plus", p)
        object.__setattr__(self, "xi_minus", m)

    @property
    def n(self) -> int:
        return len(self.xi_plus)

    @property
    def sign_bits(self) -> tuple[int, ...]:
        return self.xi_plus

    @property
    def flip_bits(self) -> tuple[int, ...]:
        return tuple(p ^ m for p, m in zip(self.xi_plus, self.xi_minus))

    @property
    def flip_word(self) -> int:
        w = 0
        for i, y in enumerate(self.flip_bits):
            w |= y << i
        return w

    @property
    def sign_parity(self) -> int:
        return sum(self.xi_plus) & 1

    @classmethod
    def sample(cls, rates, rng: np.random.Generator) -> "NoiseRealization":
        """Draw each of the 2n bits independently; rates[i] is coordinate i's rate."""
        r = np.asarray(rates, dtype=float)
        plus = rng.random(r.size) < r
        minus = rng.random(r.size) < r
        return cls(tuple(int(b) for b in plus), tuple(int(b) for b in minus))


def biased_hadamard(mu_i: float) -> np.ndarray:
    """One-qubit transform diagonalizing the biased basis on a single coordinate.

    Row j, column x entry is sqrt(weight of x) * phi_j(x):

        [[ sqrt((1+m)/2),  sqrt((1-m)/2)],
         [ sqrt((1-m)/2), -sqrt((1+m)/2)]]

    Orthogonal for every |m| < 1, and the standard Hadamard at m = 0.
    """
    m = float(mu_i)
    if not -1.0 < m < 1.0:
        raise ValueError(f"bias {m} makes the basis singular; need |mu_i| < 1")
    p = np.sqrt((1.0 + m) / 2.0)
    q = np.sqrt((1.0 - m) / 2.0)
    return np.array([[p, q], [q, -p]], dtype=np.complex128)


def _require_unitary(gate: np.ndarray) -> np.ndarray:
    g = np.asarray(gate, dtype=np.complex128)
    if g.shape != (2, 2):
        raise ValueError(f"one-qubit gate must be 2x2, got {g.shape}")
    dev = np.abs(g.conj().T @ g - np.eye(2)).max()
    if dev > _UNITARY_TOL:
        raise ValueError(f"gate is not unitary (deviation {dev:.3e})")
    return g


def _apply_one_qubit(amps: np.ndarray, gate: np.ndarray, bit: int) -> None:
    """Strided in-place update of the owned amplitude buffer on one qubit."""
    view = amps.reshape(-1, 2, 1 << bit)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = gate[0, 0] * lo + gate[0, 1] * hi
    view[:, 1, :] = gate[1, 0] * lo + gate[1, 1] * hi


def build_example_state(
    target: TargetString, bias: BiasVector, capacity: int = DEFAULT_CAPACITY
) -> StateVector:
    """Superposition of all points weighted by the product distribution, labels attached.

    Amplitude sqrt(D(x)) sits at index (word(x) << 1) | linear_fn(x).
    """
    if target.n != bias.n:
        raise ValueError(f"dimension mismatch: target n={target.n}, bias n={bias.n}")
    n = target.n
    _check_capacity(n, capacity)
    weights = all_point_weights(bias)
    labels = all_point_labels(target).astype(np.int64)
    amps = np.zeros(1 << (n + 1), dtype=np.complex128)
    idx = (np.arange(1 << n, dtype=np.int64) << 1) | labels
    amps[idx] = np.sqrt(weights)
    return StateVector(amps, n)


def build_noisy_example_state(
    target: TargetString,
    bias: BiasVector,
    xi: NoiseRealization,
    capacity: int = DEFAULT_CAPACITY,
) -> StateVector:
    """Example state whose label carries the noise bits of one fixed realization.

    The label of point x becomes linear_fn(x) + sum_i xi^i_{x_i} mod 2, which
    equals linear_fn under the flipped coefficient string XOR a global offset.
    """
    if not target.n == bias.n == xi.n:
        raise ValueError("dimension mismatch between target, bias and noise realization")
    n = target.n
    _check_capacity(n, capacity)
    weights = all_point_weights(bias)
    words = np.arange(1 << n, dtype=np.uint64)
    noise_parity = parity_words(words & np.uint64(xi.flip_word)) ^ np.uint8(xi.sign_parity)
    labels = (all_point_labels(target) ^ noise_parity).astype(np.int64)
    amps = np.zeros(1 << (n + 1), dtype=np.complex128)
    amps[(words.astype(np.int64) << 1) | labels] = np.sqrt(weights)
    return StateVector(amps, n)


def apply_circuit(
    state: StateVector,
    bias: BiasVector,
    label_gate: np.ndarray | None = None,
    capacity: int = DEFAULT_CAPACITY,
) -> StateVector:
    """Apply the per-coordinate biased transforms plus a label-qubit gate.

    Data qubit i gets biased_hadamard(bias.values[i-1]); the label qubit gets
    ``label_gate`` (standard Hadamard when omitted).  Passing a bias other
    than the one the state was built from simulates miscalibrated gates.
    """
    if bias.n != state.n:
        raise ValueError(f"dimension mismatch: state n={state.n}, bias n={bias.n}")
    _check_capacity(state.n, capacity)
    gate_l = _require_unitary(label_gate if label_gate is not None else biased_hadamard(0.0))
    amps = np.array(state.amplitudes, dtype=np.complex128)
    _apply_one_qubit(amps, gate_l, 0)
    for i, mu_i in enumerate(bias.values):
        _apply_one_qubit(amps, biased_hadamard(mu_i), i + 1)
    return StateVector(amps, state.n)


def measurement_distribution(state: StateVector) -> OutcomeDistribution:
    """Born-rule outcome distribution over all n+1 measured bits."""
    probs = np.abs(state.amplitudes) ** 2
    return OutcomeDistribution(probs, state.n + 1)


def state_inner_product(first: StateVector, second: StateVector) -> complex:
    """<first|second> with the left argument conjugated."""
    if first.n != second.n:
        raise ValueError(f"dimension mismatch: {first.n} vs {second.n}")
    return complex(np.vdot(first.amplitudes, second.amplitudes))


def gate_distance(gate_a: np.ndarray, gate_b: np.ndarray) -> float:
    """Operator (spectral) norm of the difference of two one-qubit gates."""
    return float(np.linalg.norm(np.asarray(gate_a) - np.asarray(gate_b), 2))


def perturbed_qft(bias: BiasVector, bias_tilde: BiasVector) -> tuple[list[np.ndarray], float]:
    """Gates built from a miscalibrated bias, with their total operator error.

    Returns the per-coordinate gates of ``bias_tilde`` and
    eps = sum_i ||H(mu_i) - H(mu_tilde_i)||, which upper-bounds the operator
    distance of the full tensor-product circuits (errors of unitary factors
    add at worst linearly).
    """
    if bias.n != bias_tilde.n:
        raise ValueError(f"dimension mismatch: {bias.n} vs {bias_tilde.n}")
    gates = [biased_hadamard(v) for v in bias_tilde.values]
    eps = sum(
        gate_distance(biased_hadamard(a), g) for a, g in zip(bias.values, gates)
    )
    return gates, float(eps)


def dump_state_csv(state: StateVector, path) -> None:
    """Debug dump: one (index, re, im) row per amplitude."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for k, amp in enumerate(state.amplitudes):
            writer.writerow([k, f"{amp.real:.17g}", f"{amp.imag:.17g}"])
