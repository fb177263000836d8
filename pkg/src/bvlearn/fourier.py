"""Fourier analysis of Boolean linear functions under biased product distributions.

The domain is the hypercube {-1,+1}^n carrying a product distribution with
per-coordinate means mu_i.  The orthonormal basis for that inner product is

    phi_j(x) = prod_{i: j_i = 1} (x_i - mu_i) / sqrt(1 - mu_i^2),

indexed by bit strings j.  A linear (parity) function with coefficient string a
has exactly one closed-form coefficient profile in this basis, which the rest
of the package samples from; this module provides both the closed form and the
brute-force definition so each can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TargetString",
    "IndexString",
    "PmOneVector",
    "BiasVector",
    "linear_fn",
    "product_weight",
    "basis_phi",
    "fourier_coeff_closed",
    "fourier_coeff_bruteforce",
    "all_point_weights",
    "all_point_labels",
    "parity_words",
]


def _validated_bits(bits) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if len(out) == 0:
        raise ValueError("bit string must be non-empty")
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0/1, got {bits!r}")
    return out


@dataclass(frozen=True)
class _BitString:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _validated_bits(self.bits))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def word(self) -> int:
        """Packed representation: bit i of the word is bits[i]."""
        w = 0
        for i, b in enumerate(self.bits):
            w |= b << i
        return w

    @classmethod
    def from_word(cls, word: int, n: int):
        if not 0 <= word < (1 << n):
            raise ValueError(f"word {word} out of range for n={n}")
        return cls(tuple((word >> i) & 1 for i in range(n)))

    @classmethod
    def from_string(cls, text: str):
        """Parse a left-to-right bit string, e.g. '101' -> bits (1, 0, 1)."""
        return cls(tuple(int(ch) for ch in text))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


class TargetString(_BitString):
    """Coefficient string of the hidden linear function."""

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "TargetString":
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=n)))


class IndexString(_BitString):
    """Basis index: which coordinates enter the basis function's product."""


@dataclass(frozen=True)
class PmOneVector:
    """A point of the hypercube; entries are +1 or -1."""

    entries: tuple[int, ...]

    def __post_init__(self):
        ent = tuple(int(e) for e in self.entries)
        if len(ent) == 0:
            raise ValueError("point must be non-empty")
        if any(e not in (-1, 1) for e in ent):
            raise ValueError(f"entries must be +-1, got {self.entries!r}")
        object.__setattr__(self, "entries", ent)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def word(self) -> int:
        """Packed bit description: bit i set means entries[i] == -1."""
        w = 0
        for i, e in enumerate(self.entries):
            if e == -1:
                w |= 1 << i
        return w

    @property
    def bit_description(self) -> tuple[int, ...]:
        """(1 - x_i)/2 per coordinate: +1 -> 0, -1 -> 1."""
        return tuple((1 - e) // 2 for e in self.entries)

    @classmethod
    def from_word(cls, word: int, n: int) -> "PmOneVector":
        if not 0 <= word < (1 << n):
            raise ValueError(f"word {word} out of range for n={n}")
        return cls(tuple(-1 if (word >> i) & 1 else 1 for i in range(n)))


@dataclass(frozen=True)
class BiasVector:
    """Per-coordinate means of a product distribution, with a boundedness margin.

    Every value must lie in [-1 + c_bound, 1 - c_bound] with c_bound in (0, 1],
    which keeps the basis functions finite (1 - mu_i^2 >= c_bound(2 - c_bound) > 0).
    """

    values: tuple[float, ...]
    c_bound: float

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) == 0:
            raise ValueError("bias vector must be non-empty")
        c = float(self.c_bound)
        if not 0.0 < c <= 1.0:
            raise ValueError(f"c_bound must be in (0, 1], got {c}")
        limit = 1.0 - c + 1e-12
        if any(abs(v) > limit for v in vals):
            raise ValueError(f"bias {vals} not bounded by c={c}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "c_bound", c)

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @classmethod
    def zero(cls, n: int) -> "BiasVector":
        """Uniform distribution: all means zero, maximal margin."""
        return cls((0.0,) * n, 1.0)

    @classmethod
    def from_values(cls, values, c_bound: float | None = None) -> "BiasVector":
        vals = tuple(float(v) for v in values)
        if c_bound is None:
            if any(abs(v) >= 1.0 for v in vals):
                raise ValueError("bias entries must have magnitude < 1")
            c_bound = 1.0 - max(abs(v) for v in vals)
        return cls(vals, c_bound)

    @classmethod
    def random_bounded(cls, n: int, c: float, rng: np.random.Generator) -> "BiasVector":
        """Draw each mean uniformly from the allowed box [-1+c, 1-c]."""
        if not 0.0 < c <= 1.0:
            raise ValueError(f"c must be in (0, 1], got {c}")
        vals = rng.uniform(-1.0 + c, 1.0 - c, size=n) if c < 1.0 else np.zeros(n)
        return cls(tuple(float(v) for v in vals), c)


def _require_same_n(*objs) -> int:
    ns = {o.n for o in objs}
    if len(ns) != 1:
        raise ValueError(f"dimension mismatch: {sorted(ns)}")
    return ns.pop()


def linear_fn(target: TargetString, point: PmOneVector) -> int:
    """Label of the linear function: sum_i a_i (1 - x_i)/2 mod 2.

    Equals the parity of the AND of the packed words, so evaluation is O(1)
    on word-sized n.
    """
    _require_same_n(target, point)
    return bin(target.word & point.word).count("1") & 1


def product_weight(bias: BiasVector, point: PmOneVector) -> float:
    """Probability of ``point`` under the product distribution: prod (1 + x_i mu_i)/2."""
    _require_same_n(bias, point)
    w = 1.0
    for mu_i, x_i in zip(bias.values, point.entries):
        w *= (1.0 + x_i * mu_i) / 2.0
    return w


def basis_phi(bias: BiasVector, index: IndexString, point: PmOneVector) -> float:
    """Evaluate the biased basis function phi_j at a point.

    phi_j(x) = prod over set bits of j of (x_i - mu_i)/sqrt(1 - mu_i^2); the
    empty product (j = 0...0) is 1.
    """
    _require_same_n(bias, index, point)
    v = 1.0
    for mu_i, j_i, x_i in zip(bias.values, index.bits, point.entries):
        if j_i:
            v *= (x_i - mu_i) / math.sqrt(1.0 - mu_i * mu_i)
    return v


def fourier_coeff_closed(target: TargetString, bias: BiasVector, index: IndexString) -> float:
    """Closed-form coefficient of (-1)^(linear_fn) on basis index j.

    Per coordinate:  a_l = 0 contributes (1 - j_l)  (index must avoid unused
    coordinates), and a_l = 1 contributes (1 - j_l) mu_l + j_l sqrt(1 - mu_l^2).
    The full coefficient is the product over coordinates.
    """
    _require_same_n(target, bias, index)
    v = 1.0
    for a_l, mu_l, j_l in zip(target.bits, bias.values, index.bits):
        if a_l == 0:
            v *= 1.0 - j_l
        else:
            v *= (1.0 - j_l) * mu_l + j_l * math.sqrt(1.0 - mu_l * mu_l)
    return v


def fourier_coeff_bruteforce(target: TargetString, bias: BiasVector, index: IndexString) -> float:
    """Defining sum of the coefficient: E_D[(-1)^f phi_j] over all 2^n points.

    Exponential in n; intended as the oracle the closed form is checked against.
    """
    n = _require_same_n(target, bias, index)
    total = 0.0
    for w in range(1 << n):
        x = PmOneVector.from_word(w, n)
        sign = -1.0 if linear_fn(target, x) else 1.0
        total += product_weight(bias, x) * sign * basis_phi(bias, index, x)
    return total


def parity_words(words: np.ndarray) -> np.ndarray:
    """Bitwise parity of each entry of an integer array (vectorized xor fold)."""
    v = np.asarray(words, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.uint8)


def all_point_weights(bias: BiasVector) -> np.ndarray:
    """Product-distribution weights for every point, indexed by packed word.

    Entry w is the probability of the point whose bit description is w
    (bit i set <-> x_{i+1} = -1).  Length 2^n; O(n 2^n) to build.
    """
    n = bias.n
    size = 1 << n
    weights = np.ones(size)
    idx = np.arange(size, dtype=np.uint64)
    for i, mu_i in enumerate(bias.values):
        minus = ((idx >> np.uint64(i)) & np.uint64(1)).astype(bool)
        weights *= np.where(minus, (1.0 - mu_i) / 2.0, (1.0 + mu_i) / 2.0)
    return weights


def all_point_labels(target: TargetString) -> np.ndarray:
    """linear_fn labels for every point, indexed by packed word (uint8 array)."""
    idx = np.arange(1 << target.n, dtype=np.uint64)
    return parity_words(idx & np.uint64(target.word))
