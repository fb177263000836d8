"""Command-line front end.

Five subcommands: ``sample`` draws subroutine outcomes into a histogram CSV,
``learn`` runs one learner instance and prints the result, ``experiment``
executes a deterministic trial batch, ``bounds`` tabulates the closed-form
copy-count rules over a parameter grid, and ``figure1`` emits the two
bias-threshold curves.  Exit codes: 0 on success, 2 for configuration or
regime errors, 3 when a statevector request exceeds the qubit capacity.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    ALL_BOUND_NAMES,
    BoundQuery,
    UPPER_BOUND_NAMES,
    compute_bound,
    figure1_curves,
)
from .errors import CapacityError, ConfigError
from .experiment import (
    ExperimentConfig,
    _make_source,
    _prepare,
    load_config_file,
    run_experiment,
)
from .fourier import BiasVector, IndexString, TargetString, linear_fn, PmOneVector
from .learners import (
    ClassicalExample,
    classical_baseline,
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
    full_outcome_distribution,
    sample_points,
    trial_rng,
)

SAMPLE_HEADER = ("outcome", "count", "frequency", "ref_prob")
BOUNDS_HEADER = ("bound", "n", "c", "delta", "rho", "epsilon", "value", "regime_ok")
FIGURE1_HEADER = ("n", "max_bias_thm53", "min_bias_thm74")


def _parse_target(raw: str, n: int, rng) -> TargetString:
    if raw == "random":
        return TargetString.random(n, rng)
    if len(raw) != n or set(raw) - {"0", "1"}:
        raise ConfigError(f"--a must be {n} bits or 'random', got {raw!r}")
    return TargetString.from_string(raw)


def _parse_bias(raw: str, n: int, c: float | None, rng) -> BiasVector:
    if raw == "zero":
        return BiasVector.zero(n)
    if raw == "random":
        if c is None:
            raise ConfigError("--mu random requires --c")
        return BiasVector.random_bounded(n, c, rng)
    try:
        values = tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"--mu must be comma-separated floats, got {raw!r}") from None
    if len(values) != n:
        raise ConfigError(f"--mu has {len(values)} entries, expected n={n}")
    try:
        return BiasVector(values, c) if c is not None else BiasVector.from_values(values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _format_value(value: float) -> str:
    if value == float("inf"):
        return "inf"
    if float(value).is_integer():
        return str(int(value))
    return format(value, ".10g")


def cmd_sample(args) -> int:
    if args.m < 0:
        raise ConfigError(f"--m must be >= 0, got {args.m}")
    rng = trial_rng(args.seed, 0)
    target = _parse_target(args.a, args.n, rng)
    bias = _parse_bias(args.mu, args.n, args.c, rng)
    noise = NoiseParams.uniform(args.n, args.eta) if args.eta > 0.0 else None

    if args.mu_tilde is not None:
        if noise is not None:
            raise ConfigError("--mu-tilde cannot be combined with --eta")
        tilde = _parse_bias(args.mu_tilde, args.n, None, rng)
        source = PerturbedDrawSource(target, bias, tilde)
        ref = source.distribution
    elif args.engine == "statevector":
        source = (
            NoisyStatevectorDrawSource(target, bias, noise)
            if noise is not None
            else StatevectorDrawSource(target, bias)
        )
        ref = full_outcome_distribution(target, bias, noise)
    elif args.engine == "analytic":
        source = (
            NoisyDrawSource(target, bias, noise)
            if noise is not None
            else CleanDrawSource(target, bias)
        )
        ref = full_outcome_distribution(target, bias, noise)
    else:
        raise ConfigError(f"unknown engine {args.engine!r}")

    rows = []
    if args.m > 0:
        success, bits = source.draw_many(args.m, rng)
        weights = (1 << np.arange(args.n, dtype=np.uint64)).astype(np.uint64)
        words = (bits.astype(np.uint64) * weights).sum(axis=1)[success]
        fail_count = int(args.m - success.sum())
        fail_ref = float(ref.probs[0::2].sum())
        rows.append(("fail", fail_count, fail_count / args.m, fail_ref))
        observed, counts = np.unique(words, return_counts=True)
        for word, count in zip(observed, counts):
            outcome = IndexString.from_word(int(word), args.n)
            ref_prob = float(ref.probs[(int(word) << 1) | 1])
            rows.append((str(outcome), int(count), int(count) / args.m, ref_prob))

    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SAMPLE_HEADER)
        for outcome, count, freq, ref_prob in rows:
            writer.writerow([outcome, count, format(freq, ".10g"), format(ref_prob, ".10g")])
    print(f"wrote {out} ({args.m} shots, n={args.n})")
    return 0


def cmd_learn(args) -> int:
    mapping = {
        "n": str(args.n),
        "algorithm": args.algorithm,
        "trials": "1",
        "target": args.a,
        "mu": args.mu,
        "eta": str(args.eta),
        "delta": str(args.delta),
        "seed": str(args.seed),
        "engine": args.engine,
    }
    if args.m is not None:
        mapping["m"] = str(args.m)
    if args.m_from is not None:
        mapping["m_from"] = args.m_from
    if args.c is not None:
        mapping["c"] = str(args.c)
    if args.mu_tilde is not None:
        mapping["mu_tilde"] = args.mu_tilde
    if args.force:
        mapping["force"] = "true"
    cfg = ExperimentConfig.from_mapping(mapping)
    plan = _prepare(cfg)
    for note in plan.warnings:
        print(f"warning: {note}", file=sys.stderr)

    rng = trial_rng(cfg.seed, 0)
    target = plan.target if plan.target is not None else TargetString.random(cfg.n, rng)
    bias = plan.bias if plan.bias is not None else BiasVector.random_bounded(cfg.n, plan.c, rng)

    gate_error = None
    if cfg.algorithm == "classical_baseline":
        points = sample_points(bias, plan.m_used, rng)
        examples = []
        for row in points:
            point = PmOneVector(tuple(int(v) for v in row))
            examples.append(ClassicalExample(point, linear_fn(target, point)))
        solved = classical_baseline(examples)
        result, successes = solved.result, solved.rank
        warnings = ("inconsistent system",) if solved.inconsistent else ()
    else:
        source = _make_source(cfg, plan, target, bias)
        if cfg.algorithm == "or_aggregate":
            out = learn_or_aggregate(plan.m_used, target, bias, rng, source=source, keep_log=False)
        elif cfg.algorithm == "majority":
            out = learn_majority(plan.m_used, target, bias, rng, source=source, keep_log=False)
        elif cfg.algorithm == "majority_noisy":
            out = learn_majority_noisy(
                plan.m_used, target, bias, plan.noise, rng, source=source, keep_log=False
            )
        else:
            out = learn_unknown_distribution(plan.m_used, target, bias, plan.c, cfg.delta, rng)
        result, successes, warnings = out.result, out.subroutine_successes, out.warnings
        gate_error = out.gate_error
        if gate_error is None and isinstance(source, PerturbedDrawSource):
            gate_error = source.gate_error

    print(f"target={target}")
    print(f"result={'fail' if result is None else result}")
    print(f"success={int(result == target)}")
    print(f"copies={plan.m_used}")
    print(f"subroutine_successes={successes}")
    if gate_error is not None:
        print(f"gate_error={gate_error:.6g}")
    for note in warnings:
        print(f"warning: {note}", file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    mapping = load_config_file(args.config) if args.config else {}
    overrides = {
        "n": args.n,
        "algorithm": args.algorithm,
        "trials": args.trials,
        "m": args.m,
        "m_from": args.m_from,
        "target": args.a,
        "mu": args.mu,
        "c": args.c,
        "eta": args.eta,
        "mu_tilde": args.mu_tilde,
        "delta": args.delta,
        "seed": args.seed,
        "engine": args.engine,
        "out": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = str(value)
    if args.force:
        mapping["force"] = "true"
    if args.timing:
        mapping["timing"] = "true"
    cfg = ExperimentConfig.from_mapping(mapping)
    summary = run_experiment(cfg)
    for note in summary.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(
        f"trials={summary.trials} successes={summary.successes}"
        f" success_rate={summary.success_rate:.4f}"
        f" ci99=[{summary.ci99_lower:.4f}, {summary.ci99_upper:.4f}]"
    )
    print(f"wrote {summary.csv_path} and {summary.summary_path}")
    if args.plot:
        from .plots import render_success_trace

        with open(summary.csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            successes = [int(row["success"]) for row in reader]
        render_success_trace(successes, (summary.ci99_lower, summary.ci99_upper), args.plot)
        print(f"wrote {args.plot}")
    return 0


def _parse_grid(raw: str | None, conv, what: str) -> list:
    if raw is None or raw.strip() == "":
        return []
    try:
        return [conv(part) for part in raw.split(",")]
    except ValueError:
        raise ConfigError(f"--{what} must be comma-separated values, got {raw!r}") from None


def _select_bounds(raw: str, has_rho: bool, has_eps: bool,
                   deltas: list[float], ns: list[int]) -> list[str]:
    if raw != "all":
        names = [part.strip() for part in raw.split(",") if part.strip()]
        for name in names:
            if name not in ALL_BOUND_NAMES:
                raise ConfigError(
                    f"unknown bound {name!r}; known: {', '.join(ALL_BOUND_NAMES)}"
                )
        return names
    names = ["thm51", "thm53", "lower_classical"]
    if has_rho:
        names.insert(2, "thm63")
    if has_eps:
        names.insert(len(names) - 1, "thm65")
    if all(d < 0.5 for d in deltas):
        names.append("lower_quantum_delta")
    if all(n >= 3 for n in ns):
        names.append("lower_quantum_n")
    return names


def cmd_bounds(args) -> int:
    ns = _parse_grid(args.n, int, "n")
    cs = _parse_grid(args.c, float, "c")
    deltas = _parse_grid(args.delta, float, "delta")
    rhos = _parse_grid(args.rho, float, "rho")
    epsilons = _parse_grid(args.epsilon, float, "epsilon")
    names = _select_bounds(args.bound, bool(rhos), bool(epsilons), deltas, ns)

    rows = []
    if ns and cs and deltas:
        rho_grid = rhos or [None]
        eps_grid = epsilons or [None]
        for name in names:
            for n in ns:
                for c in cs:
                    for delta in deltas:
                        for rho in rho_grid:
                            for eps in eps_grid:
                                result = compute_bound(
                                    name,
                                    BoundQuery(n=n, c=c, delta=delta, rho=rho, epsilon=eps),
                                )
                                rows.append((
                                    name,
                                    n,
                                    format(c, ".10g"),
                                    format(delta, ".10g"),
                                    "" if rho is None else format(rho, ".10g"),
                                    "" if eps is None else format(eps, ".10g"),
                                    _format_value(result.value),
                                    "true" if result.regime_ok else "false",
                                ))
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BOUNDS_HEADER)
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_figure1(args) -> int:
    ns, max_bias, min_bias = figure1_curves(args.n_min, args.n_max, args.log_points)
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIGURE1_HEADER)
        for n, hi, lo in zip(ns, max_bias, min_bias):
            writer.writerow([int(n), format(hi, ".10g"), format(lo, ".10g")])
    print(f"wrote {out} ({ns.size} rows)")
    if args.plot:
        from .plots import render_figure1

        render_figure1(ns, max_bias, min_bias, args.plot)
        print(f"wrote {args.plot}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvlearn",
        description="Simulate and analyze quantum learners for linear Boolean functions "
        "under biased product distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="draw subroutine outcomes into a histogram CSV")
    sample.add_argument("--n", type=int, required=True, help="string length")
    sample.add_argument("--a", default="random", help="target bits or 'random'")
    sample.add_argument("--mu", default="zero", help="'zero', 'random', or comma floats")
    sample.add_argument("--c", type=float, default=None, help="boundedness floor in (0, 1]")
    sample.add_argument("--eta", type=float, default=0.0, help="uniform label-noise rate")
    sample.add_argument("--mu-tilde", dest="mu_tilde", default=None,
                        help="miscalibrated gate biases (comma floats)")
    sample.add_argument("--m", type=int, required=True, help="number of shots")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--engine", choices=("analytic", "statevector"), default="analytic")
    sample.add_argument("--out", required=True, help="histogram CSV path")
    sample.set_defaults(func=cmd_sample)

    learn = sub.add_parser("learn", help="run one learner instance and print the outcome")
    learn.add_argument("--n", type=int, required=True)
    learn.add_argument("--algorithm", default="majority",
                       choices=("or_aggregate", "majority", "majority_noisy",
                                "classical_baseline", "unknown_distribution"))
    learn.add_argument("--a", default="random")
    learn.add_argument("--mu", default="zero")
    learn.add_argument("--c", type=float, default=None)
    learn.add_argument("--eta", type=float, default=0.0)
    learn.add_argument("--mu-tilde", dest="mu_tilde", default=None)
    learn.add_argument("--m", type=int, default=None)
    learn.add_argument("--m-from", dest="m_from", choices=UPPER_BOUND_NAMES, default=None)
    learn.add_argument("--delta", type=float, default=0.05)
    learn.add_argument("--seed", type=int, default=0)
    learn.add_argument("--engine", choices=("analytic", "statevector"), default="analytic")
    learn.add_argument("--force", action="store_true",
                       help="run even when the algorithm's regime is violated")
    learn.set_defaults(func=cmd_learn)

    experiment = sub.add_parser("experiment", help="run a deterministic trial batch")
    experiment.add_argument("--config", default=None, help="flat key = value config file")
    experiment.add_argument("--n", default=None)
    experiment.add_argument("--algorithm", default=None)
    experiment.add_argument("--trials", default=None)
    experiment.add_argument("--m", default=None)
    experiment.add_argument("--m-from", dest="m_from", default=None)
    experiment.add_argument("--a", default=None, help="overrides target")
    experiment.add_argument("--mu", default=None)
    experiment.add_argument("--c", default=None)
    experiment.add_argument("--eta", default=None)
    experiment.add_argument("--mu-tilde", dest="mu_tilde", default=None)
    experiment.add_argument("--delta", default=None)
    experiment.add_argument("--seed", default=None)
    experiment.add_argument("--engine", default=None)
    experiment.add_argument("--out", default=None)
    experiment.add_argument("--force", action="store_true")
    experiment.add_argument("--timing", action="store_true",
                            help="append a wall_time_ms column (non-reproducible)")
    experiment.add_argument("--plot", default=None,
                            help="also render the running success rate to this file")
    experiment.set_defaults(func=cmd_experiment)

    bounds = sub.add_parser("bounds", help="tabulate copy-count rules over a grid")
    bounds.add_argument("--bound", default="all",
                        help="comma list of rule names, or 'all' for every applicable one")
    bounds.add_argument("--n", default=None, help="comma list of lengths")
    bounds.add_argument("--c", default=None, help="comma list of boundedness floors")
    bounds.add_argument("--delta", default="0.05", help="comma list of failure budgets")
    bounds.add_argument("--rho", default=None, help="comma list of noise magnitudes")
    bounds.add_argument("--epsilon", default=None, help="comma list of gate-error budgets")
    bounds.add_argument("--out", required=True)
    bounds.set_defaults(func=cmd_bounds)

    figure1 = sub.add_parser("figure1", help="emit the two bias-threshold curves")
    figure1.add_argument("--n-min", dest="n_min", type=int, default=3)
    figure1.add_argument("--n-max", dest="n_max", type=int, default=200)
    figure1.add_argument("--log-points", dest="log_points", type=int, default=None,
                         help="use this many log-spaced lengths instead of every integer")
    figure1.add_argument("--out", required=True, help="curve CSV path")
    figure1.add_argument("--plot", default=None, help="also render the curves to this file")
    figure1.set_defaults(func=cmd_figure1)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
