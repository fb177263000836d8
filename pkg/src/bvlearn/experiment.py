"""Deterministic Monte-Carlo trial runner with CSV persistence.

A run is fully described by an ExperimentConfig; every trial derives its own
generator from (seed, trial_index), so the emitted rows depend only on the
config and never on the worker count (set via the BVLEARN_WORKERS variable).
Within a trial the stream is consumed in a fixed order: target draw if the
target is random, bias draw if the bias is random, then the learner itself.
Trial rows land in ``out`` and the aggregate (success rate plus a 99% Wilson
interval) in a ``<stem>_summary.csv`` sibling.  Wall-clock timing is opt-in
because its column is inherently non-reproducible.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter

from .bounds import BoundQuery, UPPER_BOUND_NAMES, compute_bound
from .errors import CapacityError, ConfigError
from .fourier import BiasVector, PmOneVector, TargetString, linear_fn
from .learners import (
    ClassicalExample,
    classical_baseline,
    learn_majority,
    learn_majority_noisy,
    learn_or_aggregate,
    learn_unknown_distribution,
)
from .sampler import (
    DrawSource,
    NoiseParams,
    NoisyStatevectorDrawSource,
    PerturbedDrawSource,
    StatevectorDrawSource,
    sample_points,
    trial_rng,
    trial_seed_digest,
)
from .statevector import DEFAULT_CAPACITY, perturbed_qft

__all__ = [
    "ALGORITHMS",
    "ENGINES",
    "WILSON_Z99",
    "WORKERS_ENV",
    "ExperimentConfig",
    "ExperimentSummary",
    "TrialRecord",
    "load_config_file",
    "run_experiment",
    "wilson_interval",
    "worker_count",
]

ALGORITHMS = (
    "or_aggregate",
    "majority",
    "majority_noisy",
    "classical_baseline",
    "unknown_distribution",
)
ENGINES = ("analytic", "statevector")
WORKERS_ENV = "BVLEARN_WORKERS"

# two-sided 99% normal quantile
WILSON_Z99 = 2.5758293035489004

TRIAL_HEADER = (
    "trial_index",
    "n",
    "c",
    "m_used",
    "algorithm",
    "success",
    "subroutine_successes",
    "seed",
)
SUMMARY_HEADER = ("trials", "successes", "success_rate", "ci99_lower", "ci99_upper")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment, fully specified; every field has a flat string form.

    target is "random" or an explicit bit string of length n.  mu is "zero",
    "random" (fresh c-bounded vector per trial, requires c) or an explicit
    comma-separated vector.  Exactly one of m and m_from must be set; m_from
    names one of the upper-bound rules.
    """

    n: int
    algorithm: str
    trials: int
    m: int | None = None
    m_from: str | None = None
    target: str = "random"
    mu: str = "random"
    c: float | None = None
    eta: float = 0.0
    mu_tilde: str | None = None
    delta: float = 0.05
    seed: int = 0
    engine: str = "analytic"
    out: str = "trials.csv"
    force: bool = False
    timing: bool = False

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "ExperimentConfig":
        """Build from flat string key/value pairs, coercing field types."""
        pairs = dict(mapping)
        kwargs: dict[str, object] = {}
        for field, coerce in _FIELD_COERCERS.items():
            if field in pairs:
                raw = pairs.pop(field)
                try:
                    kwargs[field] = coerce(raw)
                except ValueError as exc:
                    raise ConfigError(f"bad value for {field}: {raw!r} ({exc})") from None
        if pairs:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(pairs))}")
        for required in ("n", "algorithm", "trials"):
            if required not in kwargs:
                raise ConfigError(f"config is missing required key {required!r}")
        return cls(**kwargs)  # type: ignore[arg-type]


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


_FIELD_COERCERS: dict[str, object] = {
    "n": int,
    "algorithm": str,
    "trials": int,
    "m": int,
    "m_from": str,
    "target": str,
    "mu": str,
    "c": float,
    "eta": float,
    "mu_tilde": str,
    "delta": float,
    "seed": int,
    "engine": str,
    "out": str,
    "force": _parse_bool,
    "timing": _parse_bool,
}


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat key = value file; blank lines and # comments are skipped."""
    mapping: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key = key.strip()
        if key in mapping:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value.strip()
    return mapping


@dataclass(frozen=True)
class TrialRecord:
    """One learner run; subroutine_successes holds the GF(2) rank for the
    classical baseline."""

    trial_index: int
    n: int
    c: float
    m_used: int
    algorithm: str
    success: int
    subroutine_successes: int
    seed: int
    wall_time_ms: float | None = None

    def __post_init__(self) -> None:
        if self.success not in (0, 1):
            raise ValueError(f"success must be 0 or 1, got {self.success}")
        if self.m_used < 1:
            raise ValueError(f"m_used must be >= 1, got {self.m_used}")


@dataclass(frozen=True)
class ExperimentSummary:
    trials: int
    successes: int
    success_rate: float
    ci99_lower: float
    ci99_upper: float
    csv_path: str
    summary_path: str
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class _Plan:
    """Config resolved into concrete objects, shared read-only by workers."""

    c: float
    m_used: int
    target: TargetString | None
    bias: BiasVector | None
    mu_tilde: BiasVector | None
    noise: NoiseParams | None
    warnings: tuple[str, ...]


def _parse_vector(raw: str, n: int, what: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated floats, got {raw!r}") from None
    if len(values) != n:
        raise ConfigError(f"{what} has {len(values)} entries, expected n={n}")
    return values


def _resolve_bias(cfg: ExperimentConfig) -> tuple[float, BiasVector | None]:
    """Returns the recorded boundedness floor and the fixed bias, if any."""
    if cfg.mu == "zero":
        c = 1.0 if cfg.c is None else float(cfg.c)
        if not 0.0 < c <= 1.0:
            raise ConfigError(f"c must lie in (0, 1], got {c}")
        return c, BiasVector.zero(cfg.n)
    if cfg.mu == "random":
        if cfg.c is None:
            raise ConfigError("mu=random requires c")
        c = float(cfg.c)
        if not 0.0 < c <= 1.0:
            raise ConfigError(f"c must lie in (0, 1], got {c}")
        return c, None
    values = _parse_vector(cfg.mu, cfg.n, "mu")
    try:
        if cfg.c is None:
            bias = BiasVector.from_values(values)
        else:
            bias = BiasVector(values, float(cfg.c))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return bias.c_bound, bias


def _resolve_m(cfg: ExperimentConfig, c: float, noise: NoiseParams | None,
               mu_tilde: BiasVector | None, bias: BiasVector | None) -> int:
    if (cfg.m is None) == (cfg.m_from is None):
        raise ConfigError("exactly one of m and m_from must be set")
    if cfg.m is not None:
        if cfg.m < 1:
            raise ConfigError(f"m must be >= 1, got {cfg.m}")
        return int(cfg.m)
    name = str(cfg.m_from)
    if name not in UPPER_BOUND_NAMES:
        raise ConfigError(
            f"m_from must name an upper bound ({', '.join(UPPER_BOUND_NAMES)}), got {name!r}"
        )
    epsilon = None
    if name == "thm65":
        if bias is None or mu_tilde is None:
            raise ConfigError("m_from=thm65 needs explicit mu and mu_tilde")
        _, epsilon = perturbed_qft(bias, mu_tilde)
    rho = noise.rho if noise is not None else (0.0 if name == "thm63" else None)
    result = compute_bound(
        name, BoundQuery(n=cfg.n, c=c, delta=cfg.delta, rho=rho, epsilon=epsilon)
    )
    if not result.regime_ok:
        raise ConfigError(f"{name} regime violated at n={cfg.n}, c={c}: no finite copy count")
    return int(result.value)


def _prepare(cfg: ExperimentConfig) -> _Plan:
    if cfg.n < 1:
        raise ConfigError(f"n must be >= 1, got {cfg.n}")
    if cfg.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}; known: {', '.join(ALGORITHMS)}")
    if cfg.engine not in ENGINES:
        raise ConfigError(f"unknown engine {cfg.engine!r}; known: {', '.join(ENGINES)}")
    if not 0.0 < cfg.delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {cfg.delta}")
    if not 0.0 <= cfg.eta <= 1.0:
        raise ConfigError(f"eta must lie in [0, 1], got {cfg.eta}")

    target = None
    if cfg.target != "random":
        if len(cfg.target) != cfg.n or set(cfg.target) - {"0", "1"}:
            raise ConfigError(f"target must be {cfg.n} bits or 'random', got {cfg.target!r}")
        target = TargetString.from_string(cfg.target)

    c, bias = _resolve_bias(cfg)

    mu_tilde = None
    if cfg.mu_tilde is not None:
        if cfg.algorithm not in ("or_aggregate", "majority"):
            raise ConfigError("mu_tilde only applies to or_aggregate and majority")
        mu_tilde = BiasVector.from_values(_parse_vector(cfg.mu_tilde, cfg.n, "mu_tilde"))

    noise = None
    if cfg.algorithm == "majority_noisy":
        noise = NoiseParams.uniform(cfg.n, cfg.eta)
    elif cfg.eta != 0.0:
        raise ConfigError(f"eta is only meaningful for majority_noisy, got eta={cfg.eta}")

    needs_statevector = (
        cfg.engine == "statevector"
        or mu_tilde is not None
        or cfg.algorithm == "unknown_distribution"
    )
    if needs_statevector and cfg.n + 1 > DEFAULT_CAPACITY:
        raise CapacityError(
            f"statevector path needs {cfg.n + 1} qubits, capacity is {DEFAULT_CAPACITY}"
        )

    m_used = _resolve_m(cfg, c, noise, mu_tilde, bias)
    if cfg.algorithm == "unknown_distribution" and m_used < 2:
        raise ConfigError("unknown_distribution needs m >= 2 to split off estimation copies")

    violations: list[str] = []
    if cfg.algorithm == "majority" and not (1.0 - c) < 1.0 / math.sqrt(2.0 * cfg.n):
        violations.append(
            f"majority vote needs c > 1 - 1/sqrt(2n) = {1.0 - 1.0 / math.sqrt(2.0 * cfg.n):.6g}, got c={c:.6g}"
        )
    if cfg.algorithm == "majority_noisy" and noise is not None:
        if not (1.0 - c) < 1.0 / (2.0 * math.sqrt(cfg.n)):
            violations.append(
                f"noisy majority needs c > 1 - 1/(2 sqrt(n)) = {1.0 - 1.0 / (2.0 * math.sqrt(cfg.n)):.6g}, got c={c:.6g}"
            )
        if not noise.rho < 1.0 / (5.0 * cfg.n):
            violations.append(
                f"noisy majority needs rho < 1/(5n) = {1.0 / (5.0 * cfg.n):.6g}, got rho={noise.rho:.6g}"
            )
    if violations and not cfg.force:
        raise ConfigError("; ".join(violations) + " (set force to run anyway)")

    return _Plan(c, m_used, target, bias, mu_tilde, noise, tuple(violations))


def _make_source(cfg: ExperimentConfig, plan: _Plan,
                 target: TargetString, bias: BiasVector) -> DrawSource | None:
    if plan.mu_tilde is not None:
        return PerturbedDrawSource(target, bias, plan.mu_tilde)
    if cfg.engine != "statevector":
        return None
    if cfg.algorithm == "majority_noisy":
        return NoisyStatevectorDrawSource(target, bias, plan.noise)
    return StatevectorDrawSource(target, bias)


def _run_trial(cfg: ExperimentConfig, plan: _Plan, index: int) -> TrialRecord:
    rng = trial_rng(cfg.seed, index)
    target = plan.target if plan.target is not None else TargetString.random(cfg.n, rng)
    bias = plan.bias if plan.bias is not None else BiasVector.random_bounded(cfg.n, plan.c, rng)
    started = perf_counter() if cfg.timing else None

    if cfg.algorithm == "classical_baseline":
        points = sample_points(bias, plan.m_used, rng)
        examples = []
        for row in points:
            point = PmOneVector(tuple(int(v) for v in row))
            examples.append(ClassicalExample(point, linear_fn(target, point)))
        solved = classical_baseline(examples)
        success = int(solved.result == target)
        subroutine = solved.rank
    else:
        if cfg.algorithm == "or_aggregate":
            out = learn_or_aggregate(
                plan.m_used, target, bias, rng,
                source=_make_source(cfg, plan, target, bias), keep_log=False,
            )
        elif cfg.algorithm == "majority":
            out = learn_majority(
                plan.m_used, target, bias, rng,
                source=_make_source(cfg, plan, target, bias), keep_log=False,
            )
        elif cfg.algorithm == "majority_noisy":
            out = learn_majority_noisy(
                plan.m_used, target, bias, plan.noise, rng,
                source=_make_source(cfg, plan, target, bias), keep_log=False,
            )
        else:
            out = learn_unknown_distribution(
                plan.m_used, target, bias, plan.c, cfg.delta, rng,
            )
        success = int(out.result == target)
        subroutine = out.subroutine_successes

    elapsed = (perf_counter() - started) * 1e3 if started is not None else None
    return TrialRecord(
        trial_index=index,
        n=cfg.n,
        c=plan.c,
        m_used=plan.m_used,
        algorithm=cfg.algorithm,
        success=success,
        subroutine_successes=subroutine,
        seed=trial_seed_digest(cfg.seed, index),
        wall_time_ms=elapsed,
    )


def _run_chunk(packed: tuple[ExperimentConfig, _Plan, int, int]) -> list[TrialRecord]:
    cfg, plan, start, stop = packed
    return [_run_trial(cfg, plan, t) for t in range(start, stop)]


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z99) -> tuple[float, float]:
    """Score interval for a binomial proportion; well-behaved at 0 and 1."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ConfigError(f"successes {successes} outside [0, {trials}]")
    p_hat = successes / trials
    shrink = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / shrink
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials)) / shrink
    # the interval ends are exactly 0 and 1 at the empirical extremes
    lower = 0.0 if successes == 0 else max(0.0, center - half)
    upper = 1.0 if successes == trials else min(1.0, center + half)
    return lower, upper


def _write_trials_csv(path: Path, records: list[TrialRecord], timing: bool) -> None:
    header = TRIAL_HEADER + ("wall_time_ms",) if timing else TRIAL_HEADER
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in records:
            row = [
                r.trial_index,
                r.n,
                format(r.c, ".10g"),
                r.m_used,
                r.algorithm,
                r.success,
                r.subroutine_successes,
                r.seed,
            ]
            if timing:
                row.append(format(r.wall_time_ms, ".3f"))
            writer.writerow(row)


def _write_summary_csv(path: Path, trials: int, successes: int,
                       lower: float, upper: float) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        writer.writerow([
            trials,
            successes,
            format(successes / trials, ".10g"),
            format(lower, ".10g"),
            format(upper, ".10g"),
        ])


def summary_path_for(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + "_summary.csv")


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Execute all trials, write both CSV files, return the aggregate."""
    plan = _prepare(cfg)
    workers = worker_count()
    if workers == 1 or cfg.trials == 1:
        records = _run_chunk((cfg, plan, 0, cfg.trials))
    else:
        step = -(-cfg.trials // workers)
        chunks = [
            (cfg, plan, start, min(start + step, cfg.trials))
            for start in range(0, cfg.trials, step)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    records.sort(key=lambda r: r.trial_index)

    successes = sum(r.success for r in records)
    lower, upper = wilson_interval(successes, cfg.trials)
    out = Path(cfg.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    _write_trials_csv(out, records, cfg.timing)
    summary_path = summary_path_for(out)
    _write_summary_csv(summary_path, cfg.trials, successes, lower, upper)
    return ExperimentSummary(
        trials=cfg.trials,
        successes=successes,
        success_rate=successes / cfg.trials,
        ci99_lower=lower,
        ci99_upper=upper,
        csv_path=str(out),
        summary_path=str(summary_path),
        warnings=plan.warnings,
    )
