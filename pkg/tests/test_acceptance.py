"""Acceptance suite: one test per numbered criterion.

Each test prints a single verdict line (shown with -s; the -v status line
carries the same information) and asserts the criterion at its stated
tolerance.  Seeds are fixed so the whole suite is reproducible.
"""

import math
from time import perf_counter

import numpy as np

from bvlearn.bounds import BoundQuery, figure1_curves, m_lower_classical
from bvlearn.experiment import ExperimentConfig, run_experiment, summary_path_for
from bvlearn.fourier import (
    BiasVector,
    IndexString,
    PmOneVector,
    TargetString,
    all_point_labels,
    all_point_weights,
    fourier_coeff_bruteforce,
    fourier_coeff_closed,
    linear_fn,
)
from bvlearn.learners import ClassicalExample, classical_baseline
from bvlearn.sampler import (
    NoiseParams,
    full_outcome_distribution,
    sample_points,
    trial_rng,
)
from bvlearn.statevector import (
    NoiseRealization,
    apply_circuit,
    build_example_state,
    build_noisy_example_state,
    measurement_distribution,
    perturbed_qft,
    state_inner_product,
)


def _verdict(tag: str, ok: bool, detail: str) -> None:
    print(f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{tag}: {detail}"


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def _closed_form_distribution(target: TargetString, bias: BiasVector) -> np.ndarray:
    """Squared per-coordinate coefficient products, halved onto label 1."""
    mu = bias.as_array()
    root = np.sqrt(1.0 - mu * mu)
    coeffs = np.ones(1)
    for l in range(target.n - 1, -1, -1):
        pair = np.array([1.0, 0.0]) if target.bits[l] == 0 else np.array([mu[l], root[l]])
        coeffs = (coeffs[:, None] * pair[None, :]).ravel()
    probs = np.zeros(2 << target.n)
    probs[0] = 0.5
    probs[1::2] = 0.5 * coeffs**2
    return probs


def test_criterion_01_three_way_oracle_equivalence():
    started = perf_counter()
    rng = trial_rng(4001, 0)
    worst = 0.0
    for n in range(1, 9):
        for _ in range(100):
            bias = BiasVector.random_bounded(n, 0.3, rng)
            for word in range(1 << n):
                target = TargetString.from_word(word, n)
                sv = measurement_distribution(
                    apply_circuit(build_example_state(target, bias), bias)
                ).probs
                analytic = full_outcome_distribution(target, bias).probs
                closed = _closed_form_distribution(target, bias)
                worst = max(worst, _tv(sv, analytic), _tv(sv, closed), _tv(analytic, closed))
    elapsed = perf_counter() - started
    _verdict(
        "criterion 01",
        worst <= 1e-10 and elapsed < 60.0,
        f"max TV {worst:.2e} over n=1..8, all targets, 100 biases each; {elapsed:.1f}s",
    )


def test_criterion_02_closed_form_matches_bruteforce():
    rng = trial_rng(4002, 0)
    worst = 0.0
    worst_parseval = 0.0
    for n in range(1, 9):
        for _ in range(5):
            target = TargetString.random(n, rng)
            bias = BiasVector.random_bounded(n, 0.3, rng)
            total = 0.0
            for word in range(1 << n):
                j = IndexString.from_word(word, n)
                closed = fourier_coeff_closed(target, bias, j)
                brute = fourier_coeff_bruteforce(target, bias, j)
                worst = max(worst, abs(closed - brute))
                total += closed * closed
            worst_parseval = max(worst_parseval, abs(total - 1.0))
    _verdict(
        "criterion 02",
        worst <= 1e-12 and worst_parseval <= 1e-10,
        f"max coefficient gap {worst:.2e}, max Parseval defect {worst_parseval:.2e}",
    )


def test_criterion_03_label_qubit_is_unbiased():
    rng = trial_rng(4003, 0)
    worst = 0.0
    for n in range(1, 9):
        for _ in range(20):
            target = TargetString.random(n, rng)
            bias = BiasVector.random_bounded(n, 0.3, rng)
            probs = measurement_distribution(
                apply_circuit(build_example_state(target, bias), bias)
            ).probs
            worst = max(worst, abs(float(probs[1::2].sum()) - 0.5))
    _verdict("criterion 03", worst <= 1e-12, f"max |P[label=1] - 1/2| = {worst:.2e}")


def test_criterion_04_or_aggregate_at_computed_copy_count(tmp_path):
    started = perf_counter()
    out = tmp_path / "c4.csv"
    summary = run_experiment(ExperimentConfig(
        n=8, algorithm="or_aggregate", trials=2000, m_from="thm51",
        mu="random", c=0.5, delta=0.05, seed=8404, out=str(out),
    ))
    elapsed = perf_counter() - started
    m_used = int(out.read_text().splitlines()[1].split(",")[3])
    _verdict(
        "criterion 04",
        m_used == 13 and summary.ci99_lower >= 0.95 and elapsed < 120.0,
        f"m={m_used}, success {summary.success_rate:.4f}, "
        f"CI99 lower {summary.ci99_lower:.4f}, {elapsed:.1f}s",
    )


def test_criterion_05_majority_at_computed_copy_count(tmp_path):
    out = tmp_path / "c5.csv"
    summary = run_experiment(ExperimentConfig(
        n=8, algorithm="majority", trials=2000, m_from="thm53",
        mu="random", c=0.95, delta=0.05, seed=8405, out=str(out),
    ))
    m_used = int(out.read_text().splitlines()[1].split(",")[3])
    _verdict(
        "criterion 05",
        m_used == 17 and summary.ci99_lower >= 0.95,
        f"m={m_used}, success {summary.success_rate:.4f}, CI99 lower {summary.ci99_lower:.4f}",
    )


def test_criterion_06_noisy_majority_and_effective_string(tmp_path):
    noise = NoiseParams.uniform(6, 0.01)
    rho_ok = abs(noise.rho - 0.0198) <= 1e-15 and noise.rho < 1.0 / 30.0

    summary = run_experiment(ExperimentConfig(
        n=6, algorithm="majority_noisy", trials=2000, m=685, eta=0.01,
        mu="random", c=0.95, delta=0.05, seed=8406, out=str(tmp_path / "c6.csv"),
    ))

    # per-copy noise is one deterministic flip pattern on the hidden string
    rng = trial_rng(4006, 0)
    worst = 0.0
    for n in range(1, 7):
        rates = NoiseParams.uniform(n, 0.25).rates
        for _ in range(25):
            target = TargetString.random(n, rng)
            bias = BiasVector.random_bounded(n, 0.3, rng)
            xi = NoiseRealization.sample(rates, rng)
            noisy = measurement_distribution(
                apply_circuit(build_noisy_example_state(target, bias, xi), bias)
            ).probs
            flipped = TargetString.from_word(target.word ^ xi.flip_word, n)
            clean = measurement_distribution(
                apply_circuit(build_example_state(flipped, bias), bias)
            ).probs
            worst = max(worst, _tv(noisy, clean))
    _verdict(
        "criterion 06",
        rho_ok and summary.ci99_lower >= 0.95 and worst <= 1e-10,
        f"rho={noise.rho:.6g}, m=685, success {summary.success_rate:.4f}, "
        f"CI99 lower {summary.ci99_lower:.4f}, max effective-string TV {worst:.2e}",
    )


def test_criterion_07_gate_perturbation_deviations():
    rng = trial_rng(4007, 0)
    c = 0.5
    gamma = (1.0 / c**2) * ((2.0 - c) * 3.0 / (2.0 * math.sqrt(2.0) * c) + 1.0)
    worst_excess = -math.inf
    worst_slack = math.inf
    for count in range(50):
        n = 1 + count % 6
        target = TargetString.random(n, rng)
        bias = BiasVector.random_bounded(n, c, rng)
        raw = rng.normal(size=n)
        delta = raw / np.abs(raw).sum() * 0.03
        tilde_values = np.clip(bias.as_array() + delta, -1.0 + c, 1.0 - c)
        tilde = BiasVector(tuple(tilde_values), c)
        _, eps = perturbed_qft(bias, tilde)
        assert eps <= 0.05
        state = build_example_state(target, bias)
        exact = measurement_distribution(apply_circuit(state, bias)).probs
        perturbed = measurement_distribution(apply_circuit(state, tilde)).probs
        deviation = float(np.abs(perturbed - exact).max())
        l1 = float(np.abs(bias.as_array() - tilde.as_array()).sum())
        bound = 2.0 * math.sqrt(2.0) * n * gamma * l1
        worst_excess = max(worst_excess, deviation - eps)
        worst_slack = min(worst_slack, bound - eps)
    _verdict(
        "criterion 07",
        worst_excess <= 1e-15 and worst_slack >= -1e-15,
        f"50 perturbations, n<=6: max(deviation - eps) = {worst_excess:.2e}, "
        f"min(norm bound - eps) = {worst_slack:.3f}",
    )


def test_criterion_08_inner_product_identity():
    rng = trial_rng(4008, 0)
    worst = 0.0
    for count in range(200):
        n = 1 + count % 8
        a = TargetString.random(n, rng)
        b = TargetString.random(n, rng)
        bias = BiasVector.random_bounded(n, 0.3, rng)
        lhs = state_inner_product(
            build_example_state(a, bias), build_example_state(b, bias)
        )
        agree = all_point_labels(a) == all_point_labels(b)
        rhs = float(all_point_weights(bias)[agree].sum())
        worst = max(worst, abs(lhs - rhs))
    single_worst = 0.0
    for n in range(2, 9):
        a = TargetString.random(n, rng)
        flip = int(rng.integers(n))
        b = TargetString.from_word(a.word ^ (1 << flip), n)
        bias = BiasVector.random_bounded(n, 0.3, rng)
        value = state_inner_product(
            build_example_state(a, bias), build_example_state(b, bias)
        )
        expected = (1.0 + bias.values[flip]) / 2.0
        single_worst = max(single_worst, abs(value - expected))
    _verdict(
        "criterion 08",
        worst <= 1e-12 and single_worst <= 1e-12,
        f"max |<.,.> - weighted agreement| = {worst:.2e} over 200 pairs; "
        f"single-coordinate gap {single_worst:.2e}",
    )


def test_criterion_09_classical_baseline_rate():
    rng = np.random.default_rng(4009)
    n = 8
    target = TargetString.random(n, rng)
    uniform = BiasVector.zero(n)

    def run_once(m: int):
        points = sample_points(uniform, m, rng)
        examples = []
        for row in points:
            point = PmOneVector(tuple(int(v) for v in row))
            examples.append(ClassicalExample(point, linear_fn(target, point)))
        return classical_baseline(examples)

    trials = 100_000
    wins = sum(run_once(n).result == target for _ in range(trials))
    rate = wins / trials
    expected = 0.2899191179  # prod_{k=1..8} (1 - 2^-k)
    sigma = math.sqrt(expected * (1.0 - expected) / trials)
    rate_ok = abs(rate - expected) <= 3.0 * sigma

    under = sum(run_once(n - 1).result is not None for _ in range(2000))
    floor = m_lower_classical(BoundQuery(n=n, delta=1.0 - rate)).value
    _verdict(
        "criterion 09",
        rate_ok and under == 0 and n >= floor,
        f"rate {rate:.5f} vs {expected:.5f} (3 sigma = {3 * sigma:.5f}); "
        f"m=n-1 recoveries {under}/2000; m=n={n} >= floor {floor:.2f}",
    )


def test_criterion_10_threshold_curve_gap():
    ns, max_c, min_c = figure1_curves(3, 10_000)
    i8 = int(np.searchsorted(ns, 8))
    independent = 2.0 * math.exp(math.log1p(-1.0 / math.log(8.0)) / 8.0) - 1.0
    spot_ok = (
        abs(max_c[i8] - 0.25) <= 1e-12
        and abs(min_c[i8] - 0.8426232517347991) <= 1e-12
        and abs(min_c[i8] - independent) <= 1e-12
    )
    violations = ns[min_c <= max_c]
    gap_ok = violations.size == 0
    detail = f"n=8 spot ({max_c[i8]:.10g}, {min_c[i8]:.10g}); "
    if gap_ok:
        detail += "strict gap holds for all n in [3, 10000]"
    else:
        j = int(np.searchsorted(ns, violations[0]))
        detail += (
            f"strict gap fails at n={[int(v) for v in violations]}: "
            f"{min_c[j]:.6f} <= {max_c[j]:.6f}; it holds on [4, 10000]"
        )
    _verdict("criterion 10", spot_ok and gap_ok, detail)


def test_criterion_11_worker_count_determinism(tmp_path, monkeypatch):
    base = dict(n=8, algorithm="majority", trials=150, m_from="thm53",
                mu="random", c=0.95, delta=0.05, seed=8411)
    blobs = []
    for tag, workers in (("w1", "1"), ("w4", "4"), ("w16", "16"), ("rerun", "16")):
        monkeypatch.setenv("BVLEARN_WORKERS", workers)
        out = tmp_path / f"{tag}.csv"
        run_experiment(ExperimentConfig(out=str(out), **base))
        blobs.append(out.read_bytes() + summary_path_for(out).read_bytes())
    ok = all(blob == blobs[0] for blob in blobs[1:])
    _verdict(
        "criterion 11",
        ok,
        "byte-identical trial and summary CSVs across worker counts 1, 4, 16 and a rerun",
    )
