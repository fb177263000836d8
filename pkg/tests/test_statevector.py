"""Statevector engine: gate algebra, state construction, circuit distributions."""

import csv
import math

import numpy as np
import pytest

from bvlearn.errors import CapacityError, IntegrityError
from bvlearn.fourier import (
    BiasVector,
    IndexString,
    PmOneVector,
    TargetString,
    fourier_coeff_closed,
    linear_fn,
    product_weight,
)
from bvlearn.statevector import (
    NoiseRealization,
    OutcomeDistribution,
    StateVector,
    apply_circuit,
    biased_hadamard,
    build_example_state,
    build_noisy_example_state,
    dump_state_csv,
    gate_distance,
    measurement_distribution,
    perturbed_qft,
    state_inner_product,
)

RT2 = math.sqrt(2.0)


def test_biased_hadamard_values():
    h0 = biased_hadamard(0.0)
    assert np.allclose(h0, np.array([[1, 1], [1, -1]]) / RT2, atol=1e-15)
    h = biased_hadamard(0.6)
    expect = np.array(
        [[math.sqrt(0.8), math.sqrt(0.2)], [math.sqrt(0.2), -math.sqrt(0.8)]]
    )
    assert np.allclose(h, expect, atol=1e-15)


def test_biased_hadamard_unitary_sweep():
    rng = np.random.default_rng(101)
    eye = np.eye(2)
    for mu in rng.uniform(-0.999, 0.999, size=1000):
        g = biased_hadamard(mu)
        assert np.abs(g.conj().T @ g - eye).max() <= 1e-12


def test_biased_hadamard_rejects_degenerate_bias():
    for bad in (1.0, -1.0, 1.5):
        with pytest.raises(ValueError):
            biased_hadamard(bad)


def test_biased_hadamard_columns_are_weighted_basis_values():
    # column of x equals sqrt(weight(x)) * (phi_0(x), phi_1(x))
    for mu in (-0.4, 0.0, 0.7):
        g = biased_hadamard(mu).real
        b = BiasVector.from_values((mu,))
        for col, xw in ((0, 0), (1, 1)):
            x = PmOneVector.from_word(xw, 1)
            root_w = math.sqrt(product_weight(b, x))
            for row, jw in ((0, 0), (1, 1)):
                j = IndexString.from_word(jw, 1)
                phi = (x.entries[0] - mu) / math.sqrt(1 - mu * mu) if jw else 1.0
                assert g[row, col] == pytest.approx(root_w * phi, abs=1e-14)


def test_build_example_state_frozen_n1():
    # n=1, a=0, mu=0: equal weight on |x=+1,label 0> (index 0) and |x=-1,label 0> (index 2)
    state = build_example_state(TargetString.from_string("0"), BiasVector.zero(1))
    assert np.allclose(state.amplitudes, [1 / RT2, 0, 1 / RT2, 0], atol=1e-15)


def test_build_example_state_amplitudes_match_weights_and_labels():
    rng = np.random.default_rng(103)
    for n in (1, 2, 4):
        a = TargetString.random(n, rng)
        b = BiasVector.random_bounded(n, 0.3, rng)
        state = build_example_state(a, b)
        for w in range(1 << n):
            x = PmOneVector.from_word(w, n)
            lab = linear_fn(a, x)
            amp = state.amplitudes[(w << 1) | lab]
            assert amp.real == pytest.approx(math.sqrt(product_weight(b, x)), abs=1e-14)
            assert state.amplitudes[(w << 1) | (1 - lab)] == 0


def test_apply_circuit_frozen_n1():
    # a=1, mu=0: outcome mass 1/2 on (j=0, label 0) and 1/2 on (j=1, label 1)
    state = build_example_state(TargetString.from_string("1"), BiasVector.zero(1))
    dist = measurement_distribution(apply_circuit(state, BiasVector.zero(1)))
    assert np.allclose(dist.probs, [0.5, 0.0, 0.0, 0.5], atol=1e-14)


def test_circuit_amplitudes_match_closed_coefficients():
    # after the circuit: amp(j, 1) = coeff(j)/sqrt(2), amp(0, 0) = 1/sqrt(2)
    rng = np.random.default_rng(107)
    for n in (1, 2, 3, 5):
        a = TargetString.random(n, rng)
        b = BiasVector.random_bounded(n, 0.25, rng)
        out = apply_circuit(build_example_state(a, b), b)
        amps = out.amplitudes
        assert amps[0].real == pytest.approx(1 / RT2, abs=1e-12)
        for jw in range(1 << n):
            coeff = fourier_coeff_closed(a, b, IndexString.from_word(jw, n))
            assert amps[(jw << 1) | 1].real == pytest.approx(coeff / RT2, abs=1e-12)
            if jw != 0:
                assert abs(amps[jw << 1]) <= 1e-12


def test_circuit_preserves_norm():
    rng = np.random.default_rng(109)
    for n in (1, 3, 6):
        a = TargetString.random(n, rng)
        b = BiasVector.random_bounded(n, 0.2, rng)
        out = apply_circuit(build_example_state(a, b), b)
        assert float(np.linalg.norm(out.amplitudes)) == pytest.approx(1.0, abs=1e-10)


def test_label_success_probability_is_half():
    rng = np.random.default_rng(113)
    for n in (1, 2, 5):
        a = TargetString.random(n, rng)
        b = BiasVector.random_bounded(n, 0.4, rng)
        dist = measurement_distribution(apply_circuit(build_example_state(a, b), b))
        assert float(dist.probs[1::2].sum()) == pytest.approx(0.5, abs=1e-12)


def test_state_inner_product_frozen_and_identity():
    # n=1, a=0 vs b=1, mu=0: labels agree only at x=+1, weight 1/2
    z = BiasVector.zero(1)
    s0 = build_example_state(TargetString.from_string("0"), z)
    s1 = build_example_state(TargetString.from_string("1"), z)
    assert state_inner_product(s0, s1) == pytest.approx(0.5, abs=1e-15)
    assert state_inner_product(s0, s0) == pytest.approx(1.0, abs=1e-15)
    rng = np.random.default_rng(127)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        a = TargetString.random(n, rng)
        b2 = TargetString.random(n, rng)
        bias = BiasVector.random_bounded(n, 0.3, rng)
        ip = state_inner_product(
            build_example_state(a, bias), build_example_state(b2, bias)
        )
        expect = sum(
            product_weight(bias, PmOneVector.from_word(w, n))
            for w in range(1 << n)
            if linear_fn(a, PmOneVector.from_word(w, n))
            == linear_fn(b2, PmOneVector.from_word(w, n))
        )
        assert ip.real == pytest.approx(expect, abs=1e-12)
        assert ip.imag == pytest.approx(0.0, abs=1e-15)


def test_noise_realization_views():
    xi = NoiseRealization((1, 0, 1), (0, 0, 1))
    assert xi.n == 3
    assert xi.sign_bits == (1, 0, 1)
    assert xi.flip_bits == (1, 0, 0)
    assert xi.flip_word == 1
    assert xi.sign_parity == 0
    with pytest.raises(ValueError):
        NoiseRealization((1, 0), (1,))
    with pytest.raises(ValueError):
        NoiseRealization((2,), (0,))


def test_noisy_state_reduces_to_flipped_target():
    # fixed realization: circuit distribution equals the clean one for a XOR flips
    rng = np.random.default_rng(131)
    for n in (1, 2, 3, 4):
        for _ in range(6):
            a = TargetString.random(n, rng)
            b = BiasVector.random_bounded(n, 0.3, rng)
            xi = NoiseRealization(
                tuple(int(v) for v in rng.integers(0, 2, n)),
                tuple(int(v) for v in rng.integers(0, 2, n)),
            )
            noisy = measurement_distribution(
                apply_circuit(build_noisy_example_state(a, b, xi), b)
            )
            flipped = TargetString.from_word(a.word ^ xi.flip_word, n)
            clean = measurement_distribution(
                apply_circuit(build_example_state(flipped, b), b)
            )
            tv = 0.5 * float(np.abs(noisy.probs - clean.probs).sum())
            assert tv <= 1e-12


def test_noisy_state_with_zero_noise_matches_clean():
    a = TargetString.from_string("101")
    b = BiasVector.from_values((0.2, -0.1, 0.0))
    xi = NoiseRealization((0, 0, 0), (0, 0, 0))
    assert np.allclose(
        build_noisy_example_state(a, b, xi).amplitudes,
        build_example_state(a, b).amplitudes,
        atol=1e-15,
    )


def test_perturbed_qft_error_and_deviations():
    b = BiasVector.from_values((0.3, -0.2), c_bound=0.5)
    same_gates, eps0 = perturbed_qft(b, b)
    assert eps0 == 0.0
    assert len(same_gates) == 2
    bt = BiasVector.from_values((0.31, -0.18), c_bound=0.5)
    gates, eps = perturbed_qft(b, bt)
    assert eps > 0
    assert eps == pytest.approx(
        gate_distance(biased_hadamard(0.3), biased_hadamard(0.31))
        + gate_distance(biased_hadamard(-0.2), biased_hadamard(-0.18)),
        abs=1e-15,
    )
    a = TargetString.from_string("11")
    exact = measurement_distribution(apply_circuit(build_example_state(a, b), b))
    pert = measurement_distribution(apply_circuit(build_example_state(a, b), bt))
    assert float(np.abs(exact.probs - pert.probs).max()) <= eps


def test_capacity_and_dimension_errors():
    with pytest.raises(CapacityError):
        build_example_state(TargetString((1,) * 25), BiasVector.zero(25))
    with pytest.raises(CapacityError):
        build_example_state(TargetString((1,) * 5), BiasVector.zero(5), capacity=4)
    with pytest.raises(ValueError):
        build_example_state(TargetString.from_string("10"), BiasVector.zero(3))
    state = build_example_state(TargetString.from_string("1"), BiasVector.zero(1))
    with pytest.raises(ValueError):
        apply_circuit(state, BiasVector.zero(2))
    with pytest.raises(ValueError):
        apply_circuit(state, BiasVector.zero(1), label_gate=np.eye(2) * 2.0)


def test_state_and_distribution_integrity():
    with pytest.raises(IntegrityError):
        StateVector(np.array([1.0, 1.0, 0.0, 0.0]), 1)
    with pytest.raises(IntegrityError):
        OutcomeDistribution(np.array([0.5, 0.25, 0.5, -0.25]), 2)
    with pytest.raises(IntegrityError):
        OutcomeDistribution(np.array([0.2, 0.2, 0.2, 0.2]), 2)
    clamped = OutcomeDistribution(np.array([0.5, 0.5, -1e-13, 0.0]), 2)
    assert clamped.probs.min() == 0.0
    assert float(clamped.probs.sum()) == pytest.approx(1.0, abs=1e-15)


def test_state_vector_is_read_only():
    state = build_example_state(TargetString.from_string("1"), BiasVector.zero(1))
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0


def test_dump_state_csv_round_trip(tmp_path):
    state = build_example_state(
        TargetString.from_string("10"), BiasVector.from_values((0.5, -0.25))
    )
    path = tmp_path / "state.csv"
    dump_state_csv(state, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "re", "im"]
    assert len(rows) == 1 + state.amplitudes.size
    rebuilt = np.array([float(r[1]) + 1j * float(r[2]) for r in rows[1:]])
    assert np.allclose(rebuilt, state.amplitudes, atol=0)
