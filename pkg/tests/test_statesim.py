import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qunfold import fixtures as fx
from qunfold.core import BitOrdering, ResponseMatrix
from qunfold.errors import BadDistribution, BadTarget, CircuitSyntaxError, DimensionMismatch, ZeroVector
from qunfold.statesim import (
    BELL_STATES,
    Circuit,
    Gate,
    GateKind,
    StateVector,
    apply_channel_and_sample,
    apply_gate,
    bell_circuit,
    circuit_from_gates,
    exact_probabilities,
    gate_matrix,
    gaussian_amplitudes,
    initialize_amplitudes,
    parse_circuit,
    run_circuit,
    sample_counts,
    state_in_ordering,
    uniform_circuit,
    unitary,
)

SQ2 = 1 / math.sqrt(2)
ALL_KINDS = [k for k in GateKind]


class TestGateMatrices:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_unitary(self, kind):
        g = gate_matrix(kind, 0.7)
        assert np.max(np.abs(g @ g.conj().T - np.eye(g.shape[0]))) < 1e-12

    def test_identities(self):
        m = gate_matrix
        assert np.allclose(m("S") @ m("S"), m("Z"), atol=1e-12, rtol=0)
        assert np.allclose(m("T") @ m("T"), m("S"), atol=1e-12, rtol=0)
        assert np.allclose(m("SX") @ m("SX"), m("X"), atol=1e-12, rtol=0)
        assert np.allclose(m("H") @ m("X"), m("Z") @ m("H"), atol=1e-12, rtol=0)
        assert np.allclose(m("SX") @ m("SXDG"), np.eye(2), atol=1e-12, rtol=0)

    def test_sqrt_x_printed_form(self):
        expected = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
        assert np.array_equal(gate_matrix("SX"), expected)

    def test_phase_needs_angle(self):
        with pytest.raises(BadTarget):
            gate_matrix("P")

    def test_phase_pi_is_z(self):
        assert np.allclose(gate_matrix("P", math.pi), gate_matrix("Z"))


class TestGateValidation:
    def test_arity(self):
        with pytest.raises(BadTarget):
            Gate(GateKind.CX, (0,))

    def test_distinct(self):
        with pytest.raises(BadTarget):
            Gate(GateKind.SWAP, (1, 1))

    def test_target_range(self):
        with pytest.raises(BadTarget):
            Circuit(2, (Gate(GateKind.X, (2,)),))


class TestApplyGate:
    def test_h_on_zero(self):
        s = apply_gate(StateVector.zero(1), Gate("H", (0,)))
        assert np.allclose(s.amplitudes, [SQ2, SQ2])

    def test_z_on_plus(self):
        plus = apply_gate(StateVector.zero(1), Gate("H", (0,)))
        s = apply_gate(plus, Gate("Z", (0,)))
        assert np.allclose(s.amplitudes, [SQ2, -SQ2])

    def test_x_flips_qubit_bit(self):
        # qubit 1 is bit 1 of the index
        s = apply_gate(StateVector.zero(3), Gate("X", (1,)))
        assert s.amplitudes[2] == 1

    def test_matches_dense_kron(self):
        rng = np.random.default_rng(0)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        s = initialize_amplitudes(amps)
        out = apply_gate(s, Gate("H", (1,)))
        dense = np.kron(np.eye(2), np.kron(gate_matrix("H"), np.eye(2)))
        assert np.allclose(out.amplitudes, dense @ s.amplitudes, atol=1e-12)

    def test_cx_control_is_first_target(self):
        # |q0=1, q1=0> is index 1; CX(0,1) sets q1
        s = apply_gate(StateVector.basis(1, 2), Gate("CX", (0, 1)))
        assert s.amplitudes[3] == 1

    def test_ccx(self):
        s = apply_gate(StateVector.basis(0b011, 3), Gate("CCX", (0, 1, 2)))
        assert s.amplitudes[0b111] == 1
        s = apply_gate(StateVector.basis(0b001, 3), Gate("CCX", (0, 1, 2)))
        assert s.amplitudes[0b001] == 1

    @settings(max_examples=60)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_KINDS))
    def test_norm_preserved(self, seed, kind):
        rng = np.random.default_rng(seed)
        n = 3
        s = initialize_amplitudes(rng.normal(size=8) + 1j * rng.normal(size=8))
        arity = {GateKind.CX: 2, GateKind.SWAP: 2, GateKind.CCX: 3}.get(kind, 1)
        targets = tuple(int(q) for q in rng.permutation(n)[:arity])
        theta = 0.4 if kind is GateKind.P else None
        out = apply_gate(s, Gate(kind, targets, theta))
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1) < 1e-9

    def test_x_twice(self):
        s = initialize_amplitudes([0.6, 0.8j])
        twice = apply_gate(apply_gate(s, Gate("X", (0,))), Gate("X", (0,)))
        assert np.allclose(twice.amplitudes, s.amplitudes)


class TestCircuits:
    @pytest.mark.parametrize("name", sorted(BELL_STATES))
    def test_bell_states(self, name):
        state = run_circuit(bell_circuit(name))
        got = state_in_ordering(state, BitOrdering.Q0_MSB)
        assert np.max(np.abs(got - BELL_STATES[name])) < 1e-12

    def test_phi_plus_recipe(self):
        state = run_circuit(circuit_from_gates(2, [("H", 0), ("CX", 0, 1)]))
        assert np.allclose(state.amplitudes, [SQ2, 0, 0, SQ2])

    def test_swap_from_three_cx(self):
        three = circuit_from_gates(2, [("CX", 0, 1), ("CX", 1, 0), ("CX", 0, 1)])
        swap = circuit_from_gates(2, [("SWAP", 0, 1)])
        assert np.max(np.abs(unitary(three) - unitary(swap))) < 1e-12
        for j in range(4):
            out = run_circuit(three, StateVector.basis(j, 2))
            swapped = ((j & 1) << 1) | (j >> 1)
            assert out.amplitudes[swapped] == pytest.approx(1)

    def test_uniform(self):
        p = exact_probabilities(run_circuit(uniform_circuit(5)))
        assert np.allclose(p.counts, 1 / 32)
        assert round(p.counts[0], 3) == 0.031

    def test_psi_plus_probabilities(self):
        p = exact_probabilities(run_circuit(bell_circuit("psi+")))
        assert np.allclose(p.counts, [0, 0.5, 0.5, 0])


class TestInitialize:
    def test_gaussian_n5(self):
        s = initialize_amplitudes(gaussian_amplitudes(5))
        assert np.max(np.abs(s.amplitudes.real - fx.GAUSS_5Q_NORMALIZED)) < 1e-6
        assert np.argmax(np.abs(s.amplitudes)) in (15, 16)

    def test_unnormalized_endpoints(self):
        # the unnormalised first entry is exp(-(31/16)^2 / 2)
        assert gaussian_amplitudes(5)[0] == pytest.approx(math.exp(-0.5 * (31 / 16) ** 2), abs=1e-15)

    def test_unit_vector_unchanged(self):
        s = initialize_amplitudes([1, 0, 0, 0])
        assert np.array_equal(s.amplitudes, [1, 0, 0, 0])

    def test_all_ones(self):
        assert np.allclose(initialize_amplitudes([1, 1, 1, 1]).amplitudes, 0.5)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            initialize_amplitudes([0, 0])


class TestSampling:
    def test_degenerate(self):
        assert sample_counts([1, 0], 8000, 0).counts.tolist() == [8000, 0]

    def test_deterministic(self):
        a = sample_counts(np.full(32, 1 / 32), 8192, 11)
        b = sample_counts(np.full(32, 1 / 32), 8192, 11)
        assert a == b

    def test_totals(self):
        for seed in range(20):
            assert sample_counts(np.full(8, 1 / 8), 1001, seed).total == 1001

    def test_uniform_band(self):
        # six-sigma band around 256; the binomial tail beyond it is ~2e-9 per bin
        for seed in range(50):
            c = sample_counts(np.full(32, 1 / 32), 8192, seed).counts
            assert c.min() >= 156 and c.max() <= 356

    def test_uniform_band_tail_oracle(self):
        # exact binomial tail outside [156, 356] for one bin, union-bounded over 32 bins
        n, p = 8192, 1 / 32
        def pmf(k):
            return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                            + k * math.log(p) + (n - k) * math.log1p(-p))

        tail = sum(pmf(k) for k in range(0, 156)) + sum(pmf(k) for k in range(357, n + 1))
        assert 32 * tail < 1e-4

    def test_bad_distribution(self):
        with pytest.raises(BadDistribution):
            sample_counts([0.5, 0.6], 10, 0)
        with pytest.raises(BadDistribution):
            sample_counts([0.5, 0.5], 0, 0)

    def test_channel_dimension(self):
        with pytest.raises(DimensionMismatch):
            apply_channel_and_sample([1, 0], np.eye(4), 10, 0)

    def test_channel_identity_matches_plain_sampling(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        assert apply_channel_and_sample(p, np.eye(4), 500, 9) == sample_counts(p, 500, 9)

    def test_channel_large_shots(self):
        c = apply_channel_and_sample([1, 0], ResponseMatrix.from_array(fx.R_1Q), 10**7, 2)
        assert abs(c.counts[0] / 1e7 - 0.8615) < 6 * math.sqrt(0.8615 * 0.1385 / 1e7)

    def test_psi_plus_expectation(self):
        # direct product R_2Q @ [0, 4000, 4000, 0]
        expected = np.array([731.0, 3457.0, 3285.0, 527.0])
        assert np.allclose(fx.R_2Q @ fx.PSI_PLUS_TRUTH, expected, atol=1e-9)
        p = np.asarray(exact_probabilities(run_circuit(bell_circuit("psi+"))))
        mean = np.mean([apply_channel_and_sample(p, fx.R_2Q, 8000, s).counts for s in range(400)], axis=0)
        # standard error of a 400-run mean is below 3 counts per bin
        assert np.max(np.abs(mean - expected)) < 12


class TestCircuitText:
    def test_parse(self):
        c = parse_circuit("QUBITS 3\n# bell\nH 0\nCX 0 1\nP 0.5 2  # phase\n")
        assert c.n_qubits == 3
        assert [g.kind for g in c.ops] == [GateKind.H, GateKind.CX, GateKind.P]
        assert c.ops[2].theta == 0.5

    def test_infer_qubits(self):
        assert parse_circuit("X 4").n_qubits == 5

    def test_round_trip(self):
        c = circuit_from_gates(3, [("H", 0), ("CCX", 0, 1, 2), ("P", 0.25, 1)])
        assert parse_circuit(c.to_text(), 3) == c

    @pytest.mark.parametrize("text", ["FOO 0", "CX 0", "H x", "P 1"])
    def test_syntax_errors(self, text):
        with pytest.raises(CircuitSyntaxError):
            parse_circuit(text, 2)
