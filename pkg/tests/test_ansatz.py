"""HEA structure, state preparation and derivative states against dense
unitary-product and finite-difference oracles."""

import numpy as np
import pytest

from vqa_lab.ansatz import build_hea, cost, derivative_state, prepare_state, state_and_derivatives
from vqa_lab.hamiltonian import TlfimParams, build_tlfim, extremal_eigenvalues
from vqa_lab.statevector import GateKind

from oracles import central_difference_state, circuit_state, dense_pauli_sum


class TestBuildHea:
    def test_6_3_counts(self):
        circuit = build_hea(6, 3)
        assert circuit.n_params == 36
        rotations = [g for g in circuit.gates if g.kind in (GateKind.RY, GateKind.RZ)]
        cnots = [g for g in circuit.gates if g.kind is GateKind.CNOT]
        assert len(rotations) == 36
        assert len(cnots) == 12

    def test_2_2_gate_sequence(self):
        circuit = build_hea(2, 2)
        assert circuit.n_params == 8
        seq = [(g.kind, g.qubits, g.param) for g in circuit.gates]
        assert seq == [
            (GateKind.RY, (0,), 0),
            (GateKind.RY, (1,), 1),
            (GateKind.RZ, (0,), 2),
            (GateKind.RZ, (1,), 3),
            (GateKind.CNOT, (0, 1), None),
            (GateKind.CNOT, (1, 0), None),
            (GateKind.RY, (0,), 4),
            (GateKind.RY, (1,), 5),
            (GateKind.RZ, (0,), 6),
            (GateKind.RZ, (1,), 7),
        ]

    @pytest.mark.parametrize("bad", [(2, 1), (1, 2), (1, 1)])
    def test_too_small_rejected(self, bad):
        with pytest.raises(ValueError):
            build_hea(*bad)

    @pytest.mark.parametrize("n,l", [(2, 2), (3, 4), (4, 3), (5, 2)])
    def test_parameter_index_bijection(self, n, l):
        circuit = build_hea(n, l)
        params = [g.param for g in circuit.gates if g.param is not None]
        assert sorted(params) == list(range(2 * n * l))

    def test_parameter_index_map(self):
        # block l: RY on qubit n -> 2Nl + n, RZ on qubit n -> 2Nl + N + n
        n, l = 3, 3
        circuit = build_hea(n, l)
        for g in circuit.gates:
            if g.kind is GateKind.RY:
                layer = g.param // (2 * n)
                assert g.param == 2 * n * layer + g.qubits[0]
            elif g.kind is GateKind.RZ:
                layer = g.param // (2 * n)
                assert g.param == 2 * n * layer + n + g.qubits[0]

    def test_circular_entangler_includes_wrap(self):
        circuit = build_hea(4, 2)
        cnots = [g.qubits for g in circuit.gates if g.kind is GateKind.CNOT]
        assert cnots == [(0, 1), (1, 2), (2, 3), (3, 0)]

    def test_linear_entangler_drops_wrap(self):
        circuit = build_hea(4, 2, entangler="linear")
        cnots = [g.qubits for g in circuit.gates if g.kind is GateKind.CNOT]
        assert cnots == [(0, 1), (1, 2), (2, 3)]


class TestPrepareState:
    def test_zero_parameters_give_all_zeros_state(self):
        circuit = build_hea(3, 2)
        state = prepare_state(circuit, np.zeros(circuit.n_params))
        expected = np.zeros(8)
        expected[0] = 1.0
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_wrong_length_raises(self):
        circuit = build_hea(2, 2)
        with pytest.raises(ValueError):
            prepare_state(circuit, np.zeros(7))

    def test_single_pi_rotation_cnot_image(self):
        circuit = build_hea(2, 2)
        theta = np.zeros(8)
        theta[0] = np.pi
        state = prepare_state(circuit, theta)
        np.testing.assert_allclose(state.amplitudes, circuit_state(circuit, theta), atol=1e-12)
        # RY0(pi): |00> -> index 1; CNOT(0,1) -> index 3; CNOT(1,0) -> index 2
        np.testing.assert_allclose(np.abs(state.amplitudes), [0, 0, 1, 0], atol=1e-12)

    @pytest.mark.parametrize("n,l", [(2, 2), (2, 3), (3, 2), (4, 2)])
    def test_matches_dense_unitary_product(self, n, l):
        rng = np.random.default_rng(10 * n + l)
        circuit = build_hea(n, l)
        for _ in range(5):
            theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
            got = prepare_state(circuit, theta).amplitudes
            np.testing.assert_allclose(got, circuit_state(circuit, theta), atol=1e-12)

    def test_normalized(self):
        rng = np.random.default_rng(1)
        circuit = build_hea(4, 3)
        for _ in range(5):
            state = prepare_state(circuit, rng.uniform(-np.pi, np.pi, circuit.n_params))
            assert abs(state.norm() - 1.0) < 1e-10


class TestDerivativeState:
    def test_single_ry_generator(self):
        circuit = build_hea(2, 2)
        deriv = derivative_state(circuit, np.zeros(8), 0)
        # at theta=0 the (-i/2) Y_0 insertion gives (1/2)|index 1>, which the
        # two CNOTs then map 1 -> 3 -> 2
        np.testing.assert_allclose(np.abs(deriv.amplitudes), [0, 0, 0.5, 0], atol=1e-12)

    @pytest.mark.parametrize("n,l", [(2, 2), (3, 2)])
    def test_norm_is_half(self, n, l):
        rng = np.random.default_rng(n + l)
        circuit = build_hea(n, l)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        for a in range(circuit.n_params):
            assert abs(derivative_state(circuit, theta, a).norm() - 0.5) < 1e-10

    def test_index_out_of_range(self):
        circuit = build_hea(2, 2)
        with pytest.raises(IndexError):
            derivative_state(circuit, np.zeros(8), 8)

    def test_matches_central_differences(self):
        rng = np.random.default_rng(99)
        circuit = build_hea(2, 2)
        theta = rng.uniform(-np.pi, np.pi, 8)
        for a in range(8):
            got = derivative_state(circuit, theta, a).amplitudes
            oracle = central_difference_state(circuit, theta, a, eps=1e-5)
            np.testing.assert_allclose(got, oracle, atol=1e-6)

    def test_batched_derivatives_match_single(self):
        rng = np.random.default_rng(123)
        circuit = build_hea(3, 2)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        psi, dpsi = state_and_derivatives(circuit, theta)
        np.testing.assert_allclose(psi, prepare_state(circuit, theta).amplitudes, atol=1e-14)
        for a in range(circuit.n_params):
            np.testing.assert_allclose(
                dpsi[a], derivative_state(circuit, theta, a).amplitudes, atol=1e-14
            )


class TestCost:
    def setup_method(self):
        self.h = build_tlfim(TlfimParams(2))
        self.spectrum = extremal_eigenvalues(self.h)
        self.circuit = build_hea(2, 2)

    def test_zero_theta_reference(self):
        energy, residual = cost(self.circuit, self.h, self.spectrum, np.zeros(8))
        assert energy == pytest.approx(2.0, abs=1e-12)
        expected = (2.0 - self.spectrum.lambda_min) / self.spectrum.width
        assert residual == pytest.approx(expected, abs=1e-12)
        assert residual == pytest.approx(0.9534, abs=1e-4)

    def test_bounds(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            _, residual = cost(
                self.circuit, self.h, self.spectrum, rng.uniform(-np.pi, np.pi, 8)
            )
            assert -1e-12 <= residual <= 1 + 1e-12

    def test_two_pi_periodicity(self):
        rng = np.random.default_rng(23)
        theta = rng.uniform(-np.pi, np.pi, 8)
        base = cost(self.circuit, self.h, self.spectrum, theta)[1]
        for k in range(8):
            shifted = theta.copy()
            shifted[k] += 2 * np.pi
            assert cost(self.circuit, self.h, self.spectrum, shifted)[1] == pytest.approx(
                base, abs=1e-10
            )

    def test_single_parameter_sinusoidality(self):
        """Fit c + a cos(x - b) from 3 points, predict a 4th to 1e-9."""
        rng = np.random.default_rng(31)
        theta = rng.uniform(-np.pi, np.pi, 8)
        for k in range(8):
            def energy_at(x):
                probe = theta.copy()
                probe[k] = x
                return cost(self.circuit, self.h, self.spectrum, probe)[0]

            x0 = float(theta[k])
            c = 0.5 * (energy_at(x0 + np.pi / 2) + energy_at(x0 - np.pi / 2))
            a_cos = energy_at(x0) - c
            a_sin = 0.5 * (energy_at(x0 - np.pi / 2) - energy_at(x0 + np.pi / 2))
            x4 = x0 + 1.2345
            predicted = c + a_cos * np.cos(x4 - x0) - a_sin * np.sin(x4 - x0)
            assert energy_at(x4) == pytest.approx(predicted, abs=1e-9)
