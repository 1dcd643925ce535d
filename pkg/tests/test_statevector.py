"""Gate application, inner products and Pauli-sum expectations against
brute-force Kronecker oracles."""

import numpy as np
import pytest

from vqa_lab.statevector import (
    Gate,
    GateKind,
    PauliSum,
    StateVector,
    apply_gate,
    expectation,
    inner_product,
    zero_state,
)
from vqa_lab.hamiltonian import TlfimParams, build_tlfim

from oracles import PAULI, cnot_matrix, dense_pauli_sum, random_state, rotation_matrix, site_operator


class TestZeroState:
    def test_one_qubit(self):
        np.testing.assert_array_equal(zero_state(1).amplitudes, [1, 0])

    def test_two_qubits(self):
        np.testing.assert_array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])

    @pytest.mark.parametrize("n", [0, -1, 25])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            zero_state(n)


class TestApplyGate:
    def test_ry_pi_flips(self):
        out = apply_gate(zero_state(1), Gate(GateKind.RY, (0,), angle=np.pi))
        np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)

    def test_cnot_lsb_convention(self):
        # basis index 1 means qubit 0 = 1; CNOT(0 -> 1) maps it to index 3
        state = StateVector(2, np.array([0, 1, 0, 0], dtype=complex))
        out = apply_gate(state, Gate(GateKind.CNOT, (0, 1)))
        np.testing.assert_array_equal(out.amplitudes, [0, 0, 0, 1])

    def test_rz_phase(self):
        out = apply_gate(zero_state(1), Gate(GateKind.RZ, (0,), angle=np.pi / 2))
        np.testing.assert_allclose(out.amplitudes[0], np.exp(-1j * np.pi / 4), atol=1e-15)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            apply_gate(zero_state(2), Gate(GateKind.RY, (2,), angle=0.1))

    def test_cnot_needs_distinct_qubits(self):
        with pytest.raises(ValueError):
            Gate(GateKind.CNOT, (1, 1))

    def test_value_semantics(self):
        state = zero_state(1)
        apply_gate(state, Gate(GateKind.RY, (0,), angle=1.0))
        np.testing.assert_array_equal(state.amplitudes, [1, 0])

    @pytest.mark.parametrize("n_qubits", [1, 2, 3, 4])
    def test_matches_dense_oracle_on_basis_states(self, n_qubits):
        """Every gate agrees with the Kronecker matrix on every basis state."""
        rng = np.random.default_rng(42 + n_qubits)
        cases: list[tuple[Gate, np.ndarray]] = []
        for q in range(n_qubits):
            for kind, pauli in ((GateKind.RY, "Y"), (GateKind.RZ, "Z")):
                angle = float(rng.uniform(-np.pi, np.pi))
                cases.append((Gate(kind, (q,), angle=angle),
                              site_operator(n_qubits, {q: rotation_matrix(pauli, angle)})))
        if n_qubits >= 2:
            for control in range(n_qubits):
                target = (control + 1) % n_qubits
                cases.append((Gate(GateKind.CNOT, (control, target)),
                              cnot_matrix(n_qubits, control, target)))
        for pauli in "XYZ":
            cases.append((Gate(GateKind.PAULI_FACTOR, (0,), scalar=-0.5j, pauli=pauli),
                          -0.5j * site_operator(n_qubits, {0: PAULI[pauli]})))

        dim = 1 << n_qubits
        for gate, mat in cases:
            for basis in range(dim):
                amps = np.zeros(dim, dtype=complex)
                amps[basis] = 1.0
                out = apply_gate(StateVector(n_qubits, amps), gate)
                np.testing.assert_allclose(out.amplitudes, mat[:, basis], atol=1e-12)

    def test_unitary_gates_preserve_norm(self):
        rng = np.random.default_rng(7)
        state = StateVector(3, random_state(rng, 3))
        for _ in range(50):
            kind = rng.choice(["ry", "rz", "cnot"])
            if kind == "cnot":
                control = int(rng.integers(3))
                target = (control + 1 + int(rng.integers(2))) % 3
                gate = Gate(GateKind.CNOT, (control, target))
            else:
                gate = Gate(GateKind[kind.upper()], (int(rng.integers(3)),),
                            angle=float(rng.uniform(-np.pi, np.pi)))
            state = apply_gate(state, gate)
            assert abs(state.norm() - 1.0) < 1e-12


class TestInnerProduct:
    def test_self_overlap_is_one(self):
        rng = np.random.default_rng(3)
        state = StateVector(3, random_state(rng, 3))
        assert abs(inner_product(state, state) - 1.0) < 1e-10

    def test_orthogonal_basis_states(self):
        a = StateVector(1, np.array([1, 0], dtype=complex))
        b = StateVector(1, np.array([0, 1], dtype=complex))
        assert inner_product(a, b) == 0

    def test_plus_state_overlap(self):
        plus = StateVector(1, np.array([1, 1], dtype=complex) / np.sqrt(2))
        assert abs(inner_product(zero_state(1), plus) - 1 / np.sqrt(2)) < 1e-12

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(11)
        a = StateVector(3, random_state(rng, 3))
        b = StateVector(3, random_state(rng, 3))
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(zero_state(1), zero_state(2))


class TestExpectation:
    def test_tlfim_on_all_zeros(self):
        h = build_tlfim(TlfimParams(2))
        assert expectation(zero_state(2), h) == pytest.approx(2.0, abs=1e-12)

    def test_z_after_ry_half_pi(self):
        state = apply_gate(zero_state(1), Gate(GateKind.RY, (0,), angle=np.pi / 2))
        h = PauliSum(1, [(1.0, {0: "Z"})])
        assert expectation(state, h) == pytest.approx(0.0, abs=1e-12)

    def test_tlfim_on_one_one(self):
        h = build_tlfim(TlfimParams(2))
        state = StateVector(2, np.array([0, 0, 0, 1], dtype=complex))
        expected = dense_pauli_sum(h)[3, 3].real  # brute-force diagonal entry
        assert expected == pytest.approx(0.0, abs=1e-15)
        assert expectation(state, h) == pytest.approx(expected, abs=1e-12)

    def test_mismatch_raises(self):
        with pytest.raises(ValueError):
            expectation(zero_state(1), build_tlfim(TlfimParams(2)))

    @pytest.mark.parametrize("n_qubits", [2, 3, 4, 6])
    def test_matches_dense_oracle_on_random_states(self, n_qubits):
        rng = np.random.default_rng(100 + n_qubits)
        h = build_tlfim(TlfimParams(n_qubits))
        mat = dense_pauli_sum(h)
        for _ in range(20):
            psi = random_state(rng, n_qubits)
            oracle = float(np.real(psi.conj() @ mat @ psi))
            got = expectation(StateVector(n_qubits, psi), h)
            assert got == pytest.approx(oracle, abs=1e-12)

    @pytest.mark.parametrize("n_qubits", [2, 4, 6])
    def test_bounded_by_extremal_eigenvalues(self, n_qubits):
        rng = np.random.default_rng(200 + n_qubits)
        h = build_tlfim(TlfimParams(n_qubits))
        eigenvalues = np.linalg.eigvalsh(dense_pauli_sum(h))
        for _ in range(50):
            value = expectation(StateVector(n_qubits, random_state(rng, n_qubits)), h)
            assert eigenvalues[0] - 1e-10 <= value <= eigenvalues[-1] + 1e-10

    def test_pauli_sum_with_y_and_identity(self):
        h = PauliSum(2, [(0.5, {}), (0.3, {0: "Y", 1: "X"}), (-0.2, {1: "Y"})])
        mat = dense_pauli_sum(h)
        rng = np.random.default_rng(5)
        psi = random_state(rng, 2)
        oracle = float(np.real(psi.conj() @ mat @ psi))
        assert expectation(StateVector(2, psi), h) == pytest.approx(oracle, abs=1e-12)

    def test_invalid_site_rejected(self):
        with pytest.raises(ValueError):
            PauliSum(2, [(1.0, {2: "Z"})])

    def test_nonfinite_coefficient_rejected(self):
        with pytest.raises(ValueError):
            PauliSum(1, [(np.inf, {0: "Z"})])
