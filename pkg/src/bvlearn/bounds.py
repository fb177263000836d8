"""Closed-form sample-size calculators and the bias-threshold curves.

Everything in this module is plain arithmetic, no simulation.  Each rule is
keyed by the identifier the command line uses (``thm51``, ``thm53``,
``thm63``, ``thm65``, ``lower_classical``, ``lower_quantum_delta``,
``lower_quantum_n``); the four ``thm5x``/``thm6x`` rules give sufficient copy
counts for the corresponding learners, the ``lower_*`` rules give necessary
ones.  Upper bounds return the ceiling of the governing expression, lower
bounds the real value.  A query outside a rule's validity region yields
``regime_ok=False`` with an infinite value; malformed parameters raise
ConfigError instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError

__all__ = [
    "ALL_BOUND_NAMES",
    "BoundQuery",
    "BoundResult",
    "UPPER_BOUND_NAMES",
    "binary_entropy",
    "compute_bound",
    "figure1_curves",
    "m_lower_classical",
    "m_lower_quantum_delta",
    "m_lower_quantum_n",
    "m_upper_thm51",
    "m_upper_thm53",
    "m_upper_thm63",
    "m_upper_thm65",
    "max_bias_thm53",
    "min_bias_thm74",
]


def binary_entropy(p: float) -> float:
    """Entropy in bits of a coin with heads probability p; 0 at both endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"entropy argument must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@dataclass(frozen=True)
class BoundQuery:
    """Parameter point a calculator is evaluated at.

    Only the fields a given rule consumes need to be set.  n is the string
    length, c the boundedness floor (biases live in [-1+c, 1-c]), delta the
    allowed failure probability, rho the summed label-noise magnitude and
    epsilon the gate-calibration error budget.
    """

    n: int | None = None
    c: float | None = None
    delta: float | None = None
    rho: float | None = None
    epsilon: float | None = None


@dataclass(frozen=True)
class BoundResult:
    """One evaluated rule: finite value exactly when the regime holds."""

    name: str
    value: float
    regime_ok: bool
    formula_text: str

    def __post_init__(self) -> None:
        if math.isfinite(self.value) != self.regime_ok:
            raise ValueError("BoundResult value must be finite iff regime_ok")


def _need_n(q: BoundQuery, rule: str, minimum: int = 1) -> int:
    if q.n is None:
        raise ConfigError(f"{rule} requires n")
    n = int(q.n)
    if n < minimum:
        raise ConfigError(f"{rule} requires n >= {minimum}, got {n}")
    return n


def _need_c(q: BoundQuery, rule: str) -> float:
    if q.c is None:
        raise ConfigError(f"{rule} requires c")
    c = float(q.c)
    if not 0.0 < c <= 1.0:
        raise ConfigError(f"{rule} requires c in (0, 1], got {c}")
    return c


def _need_delta(q: BoundQuery, rule: str, upper: float = 1.0) -> float:
    if q.delta is None:
        raise ConfigError(f"{rule} requires delta")
    d = float(q.delta)
    if not 0.0 < d < upper:
        raise ConfigError(f"{rule} requires delta in (0, {upper}), got {d}")
    return d


def m_upper_thm51(q: BoundQuery) -> BoundResult:
    """Copies sufficient for the OR-aggregation learner at any boundedness.

    Defined for every c in (0, 1]; grows like 1/c as the distribution is
    allowed to concentrate and like ln(1/delta) in the confidence.
    """
    n = _need_n(q, "thm51")
    c = _need_c(q, "thm51")
    delta = _need_delta(q, "thm51")
    rate = math.log(1.0 / (1.0 - c + c * c / 2.0))
    value = max(math.log2(2.0 / delta), (math.log(n) + math.log(2.0 / delta)) / rate)
    return BoundResult(
        "thm51",
        float(math.ceil(value)),
        True,
        "ceil(max(log2(2/delta), (ln n + ln(2/delta)) / ln(1/(1 - c + c^2/2))))",
    )


def m_upper_thm53(q: BoundQuery) -> BoundResult:
    """Copies sufficient for the majority-vote learner; needs c > 1 - 1/sqrt(2n)."""
    n = _need_n(q, "thm53")
    c = _need_c(q, "thm53")
    delta = _need_delta(q, "thm53")
    formula = "ceil(4 / (1 - 2n(1-c)^2)^2 * ln(2/delta))"
    if not (1.0 - c) < 1.0 / math.sqrt(2.0 * n):
        return BoundResult("thm53", math.inf, False, formula)
    slack = 1.0 - 2.0 * n * (1.0 - c) ** 2
    value = 4.0 / slack**2 * math.log(2.0 / delta)
    return BoundResult("thm53", float(math.ceil(value)), True, formula)


def m_upper_thm63(q: BoundQuery) -> BoundResult:
    """Copies sufficient for the noisy majority learner.

    Needs both c > 1 - 1/(2 sqrt(n)) and rho < 1/(5n); either slack going to
    zero sends the count to infinity.
    """
    n = _need_n(q, "thm63")
    c = _need_c(q, "thm63")
    delta = _need_delta(q, "thm63")
    if q.rho is None:
        raise ConfigError("thm63 requires rho")
    rho = float(q.rho)
    if rho < 0.0:
        raise ConfigError(f"thm63 requires rho >= 0, got {rho}")
    formula = "ceil(25 * max((1 - 5n rho)^-2, (1 - 4n(1-c)^2)^-2) * ln(4/delta))"
    bias_ok = (1.0 - c) < 1.0 / (2.0 * math.sqrt(n))
    noise_ok = rho < 1.0 / (5.0 * n)
    if not (bias_ok and noise_ok):
        return BoundResult("thm63", math.inf, False, formula)
    noise_term = (1.0 - 5.0 * n * rho) ** -2
    bias_term = (1.0 - 4.0 * n * (1.0 - c) ** 2) ** -2
    value = 25.0 * max(noise_term, bias_term) * math.log(4.0 / delta)
    return BoundResult("thm63", float(math.ceil(value)), True, formula)


def m_upper_thm65(q: BoundQuery) -> BoundResult:
    """Copies sufficient under miscalibrated gates with tensor-sum error epsilon.

    epsilon must lie in (0, 1/2); the bias regime tightens to
    c > 1 - sqrt((1-2 epsilon)/(2n)), which also keeps the second branch of
    the max positive.  As epsilon -> 0 this collapses to the thm53 rule.
    """
    n = _need_n(q, "thm65")
    c = _need_c(q, "thm65")
    delta = _need_delta(q, "thm65")
    if q.epsilon is None:
        raise ConfigError("thm65 requires epsilon")
    eps = float(q.epsilon)
    if not 0.0 < eps < 0.5:
        raise ConfigError(f"thm65 requires epsilon in (0, 0.5), got {eps}")
    formula = "ceil(4 * max((1 - 2 eps)^-2, (1 - 2(n(1-c)^2 + eps))^-2) * ln(2/delta))"
    if not (1.0 - c) < math.sqrt((1.0 - 2.0 * eps) / (2.0 * n)):
        return BoundResult("thm65", math.inf, False, formula)
    gate_term = (1.0 - 2.0 * eps) ** -2
    bias_term = (1.0 - 2.0 * (n * (1.0 - c) ** 2 + eps)) ** -2
    value = 4.0 * max(gate_term, bias_term) * math.log(2.0 / delta)
    return BoundResult("thm65", float(math.ceil(value)), True, formula)


def m_lower_classical(q: BoundQuery) -> BoundResult:
    """Copies any classical learner needs from random labeled examples."""
    n = _need_n(q, "lower_classical")
    delta = _need_delta(q, "lower_classical")
    value = (1.0 - delta) * n - binary_entropy(delta)
    return BoundResult("lower_classical", value, True, "(1 - delta) n - H2(delta)")


def m_lower_quantum_delta(q: BoundQuery) -> BoundResult:
    """Copies any quantum learner needs, evaluated at the least-spread bias 1-c."""
    c = _need_c(q, "lower_quantum_delta")
    delta = _need_delta(q, "lower_quantum_delta", upper=0.5)
    value = 0.5 * math.log(delta * (1.0 - delta)) / math.log((2.0 - c) / 2.0)
    return BoundResult(
        "lower_quantum_delta",
        value,
        True,
        "(ln((2-c)/2))^-1 * (1/2) ln(delta (1-delta))",
    )


def m_lower_quantum_n(q: BoundQuery) -> BoundResult:
    """Growth-in-n lower bound; needs n >= 3 so that ln n > 1.

    The derivation assumes every bias is at least min_bias_thm74(n).  When c
    is supplied the query is gated on that being reachable inside the
    c-bounded box, i.e. 1 - c >= min_bias_thm74(n); with c omitted the value
    is reported ungated.
    """
    n = _need_n(q, "lower_quantum_n", minimum=3)
    delta = _need_delta(q, "lower_quantum_n")
    formula = "((1 - delta) n - H2(delta)) / (H2(1/ln n) + (n+1)/ln n)"
    if q.c is not None:
        c = _need_c(q, "lower_quantum_n")
        if not (1.0 - c) >= min_bias_thm74(n):
            return BoundResult("lower_quantum_n", math.inf, False, formula)
    ln_n = math.log(n)
    numer = (1.0 - delta) * n - binary_entropy(delta)
    denom = binary_entropy(1.0 / ln_n) + (n + 1.0) / ln_n
    return BoundResult("lower_quantum_n", numer / denom, True, formula)


UPPER_BOUND_NAMES: tuple[str, ...] = ("thm51", "thm53", "thm63", "thm65")

_REGISTRY: dict[str, Callable[[BoundQuery], BoundResult]] = {
    "thm51": m_upper_thm51,
    "thm53": m_upper_thm53,
    "thm63": m_upper_thm63,
    "thm65": m_upper_thm65,
    "lower_classical": m_lower_classical,
    "lower_quantum_delta": m_lower_quantum_delta,
    "lower_quantum_n": m_lower_quantum_n,
}

ALL_BOUND_NAMES: tuple[str, ...] = tuple(_REGISTRY)


def compute_bound(name: str, query: BoundQuery) -> BoundResult:
    """Evaluate the named rule; unknown names raise ConfigError."""
    try:
        rule = _REGISTRY[name]
    except KeyError:
        known = ", ".join(ALL_BOUND_NAMES)
        raise ConfigError(f"unknown bound {name!r}; known: {known}") from None
    return rule(query)


def max_bias_thm53(n: int) -> float:
    """Largest 1-c the majority-vote regime tolerates at length n."""
    if n < 1:
        raise ConfigError(f"need n >= 1, got {n}")
    return 1.0 / math.sqrt(2.0 * n)


def min_bias_thm74(n: int) -> float:
    """Smallest per-coordinate bias the growth-in-n lower bound assumes."""
    if n < 3:
        raise ConfigError(f"need n >= 3 (so ln n > 1), got {n}")
    return 2.0 * (1.0 - 1.0 / math.log(n)) ** (1.0 / n) - 1.0


def figure1_curves(
    n_min: int = 3,
    n_max: int = 200,
    log_points: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tabulate both threshold curves over [n_min, n_max].

    Returns (n, max_bias_thm53, min_bias_thm74) arrays, one entry per n.  By
    default every integer in the range is included; log_points switches to
    that many log-spaced lengths (deduplicated after rounding).
    """
    if n_min < 3:
        raise ConfigError(f"need n_min >= 3, got {n_min}")
    if n_max < n_min:
        raise ConfigError(f"need n_max >= n_min, got {n_max} < {n_min}")
    if log_points is None:
        ns = np.arange(n_min, n_max + 1, dtype=np.int64)
    else:
        if log_points < 1:
            raise ConfigError(f"need log_points >= 1, got {log_points}")
        grid = np.geomspace(float(n_min), float(n_max), num=log_points)
        ns = np.unique(np.rint(grid).astype(np.int64))
    upper_c = 1.0 / np.sqrt(2.0 * ns)
    lower_c = 2.0 * (1.0 - 1.0 / np.log(ns)) ** (1.0 / ns) - 1.0
    return ns, upper_c, lower_c
