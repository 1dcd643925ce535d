"""QFIM, ranks, thresholds, variance estimators and frame potential."""

import numpy as np
import pytest

from vqa_lab.ansatz import GateTemplate, ParamCircuit, build_hea, prepare_state
from vqa_lab.diagnostics import (
    VarianceCurve,
    bp_threshold,
    frame_potential_2,
    gradient_variance,
    haar_frame_potential,
    loss_difference_variance,
    max_qfim_rank,
    numeric_rank,
    op_threshold,
    qfim,
    sample_thetas,
)
from vqa_lab.hamiltonian import Spectrum, TlfimParams, build_tlfim, extremal_eigenvalues
from vqa_lab.statevector import GateKind, PauliSum

from oracles import random_state


def rz_only_circuit(n_qubits: int = 2, n_params: int = 4) -> ParamCircuit:
    """Rotation chain whose cost is exactly theta-independent from |0...0>."""
    gates = tuple(
        GateTemplate(GateKind.RZ, (k % n_qubits,), k) for k in range(n_params)
    )
    return ParamCircuit(n_qubits, 1, gates)


@pytest.fixture(scope="module")
def tlfim2():
    h = build_tlfim(TlfimParams(2))
    return h, extremal_eigenvalues(h)


class TestQfim:
    def test_single_ry(self):
        circuit = ParamCircuit(1, 1, (GateTemplate(GateKind.RY, (0,), 0),))
        result = qfim(circuit, np.array([0.37]))
        np.testing.assert_allclose(result.matrix, [[1.0]], atol=1e-12)

    def test_rz_entry_vanishes_on_zero_state(self):
        circuit = ParamCircuit(
            1, 1, (GateTemplate(GateKind.RY, (0,), 0), GateTemplate(GateKind.RZ, (0,), 1))
        )
        result = qfim(circuit, np.zeros(2))
        assert result.matrix[1, 1] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n,l", [(2, 2), (3, 2)])
    def test_symmetry_and_psd(self, n, l):
        circuit = build_hea(n, l)
        rng = np.random.default_rng(n * 10 + l)
        for _ in range(5):
            matrix = qfim(circuit, rng.uniform(-np.pi, np.pi, circuit.n_params)).matrix
            assert np.max(np.abs(matrix - matrix.T)) < 1e-10
            assert np.linalg.eigvalsh(matrix).min() > -1e-8

    def test_fidelity_second_order_expansion(self):
        circuit = build_hea(2, 2)
        rng = np.random.default_rng(77)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        matrix = qfim(circuit, theta).matrix
        psi = prepare_state(circuit, theta).amplitudes
        for _ in range(5):
            delta = rng.standard_normal(circuit.n_params)
            delta *= 1e-3 / np.linalg.norm(delta)
            phi = prepare_state(circuit, theta + delta).amplitudes
            fidelity = abs(np.vdot(psi, phi)) ** 2
            assert fidelity == pytest.approx(1 - 0.25 * delta @ matrix @ delta, abs=1e-7)

    def test_gauge_two_pi_shift(self):
        circuit = build_hea(2, 2)
        rng = np.random.default_rng(5)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        base = qfim(circuit, theta).matrix
        for k in range(circuit.n_params):
            shifted = theta.copy()
            shifted[k] += 2 * np.pi
            np.testing.assert_allclose(qfim(circuit, shifted).matrix, base, atol=1e-9)


class TestNumericRank:
    def test_identity(self):
        assert numeric_rank(np.eye(5)) == 5

    def test_zero(self):
        assert numeric_rank(np.zeros((4, 4))) == 0

    def test_threshold_arithmetic(self):
        assert numeric_rank(np.diag([1.0, 1e-3, 1e-12]), rel_tol=1e-8) == 2

    def test_rank_never_exceeds_p(self):
        circuit = build_hea(2, 3)
        rank = max_qfim_rank(circuit, 3, np.random.default_rng(1))
        assert rank <= circuit.n_params

    def test_2_2_bounded_by_hilbert_dimension(self):
        rank = max_qfim_rank(build_hea(2, 2), 5, np.random.default_rng(2))
        assert rank <= 6  # min(p, 2^(N+1) - 2) = min(8, 6)
        assert rank == 6  # generic saturation

    def test_n2_rank_scan_saturates(self):
        ranks = {
            l: max_qfim_rank(build_hea(2, l), 4, np.random.default_rng(l)) for l in (2, 3, 4, 5)
        }
        assert op_threshold(ranks, 6) == 2
        assert max(ranks.values()) == 6


class TestOpThreshold:
    def test_basic(self):
        assert op_threshold({3: 20, 5: 30, 7: 30}, 30) == 5

    def test_unsaturated(self):
        assert op_threshold({3: 20, 5: 28}, 30) is None


class TestBpThreshold:
    def test_spec_example(self):
        curve = VarianceCurve("L", [3, 5, 7, 9, 11], np.array([10.0, 2.0, 1.04, 1.01, 1.0]),
                              np.zeros(5), 1000)
        assert bp_threshold(curve, 0.05) == 7

    def test_monotone_increasing_quirk(self):
        curve = VarianceCurve("L", [3, 5, 7], np.array([1.0, 2.0, 3.0]), np.zeros(3), 1000)
        assert bp_threshold(curve, 0.05) == 3

    def test_vth_zero_limit(self):
        curve = VarianceCurve("L", [3, 5, 7], np.array([2.0, 1.0, 1.5]), np.zeros(3), 1000)
        assert bp_threshold(curve, 0.0) == 5


class TestGradientVariance:
    def test_theta_independent_circuit(self):
        circuit = rz_only_circuit()
        h = PauliSum(2, [(1.0, {0: "Z"})])
        variance, std_error = gradient_variance(
            circuit, h, Spectrum(-1.0, 1.0), 0, 200, np.random.default_rng(0)
        )
        # |exp(-i theta/2)|^2 = cos^2 + sin^2 carries ~1e-16 roundoff, so the
        # gradient is zero only to ~1e-16 and its variance to ~1e-32
        assert variance < 1e-30
        assert std_error < 1e-30

    def test_matches_finite_difference_oracle_on_same_stream(self, tlfim2):
        h, spectrum = tlfim2
        circuit = build_hea(2, 2)
        n = 400
        variance, std_error = gradient_variance(
            circuit, h, spectrum, 0, n, np.random.default_rng(31)
        )
        # identical sample stream, independent finite-difference estimator
        from vqa_lab.ansatz import cost_batch

        thetas = sample_thetas(np.random.default_rng(31), n, circuit.n_params)
        eps = 1e-5
        plus, minus = thetas.copy(), thetas.copy()
        plus[:, 0] += eps
        minus[:, 0] -= eps
        grads = (
            cost_batch(circuit, h, spectrum, plus) - cost_batch(circuit, h, spectrum, minus)
        ) / (2 * eps)
        fd_variance = float(grads.var(ddof=1))
        fd_error = float(((grads - grads.mean()) ** 2).std(ddof=1) / np.sqrt(n))
        assert abs(variance - fd_variance) <= 3 * np.hypot(std_error, fd_error) + 1e-12

    def test_disjoint_seed_streams_agree(self, tlfim2):
        h, spectrum = tlfim2
        circuit = build_hea(2, 3)
        v1, e1 = gradient_variance(circuit, h, spectrum, 0, 500, np.random.default_rng(100))
        v2, e2 = gradient_variance(circuit, h, spectrum, 0, 500, np.random.default_rng(200))
        assert abs(v1 - v2) <= 4 * np.hypot(e1, e2)

    def test_deterministic_given_seed(self, tlfim2):
        h, spectrum = tlfim2
        circuit = build_hea(2, 2)
        a = gradient_variance(circuit, h, spectrum, 0, 150, np.random.default_rng(9))
        b = gradient_variance(circuit, h, spectrum, 0, 150, np.random.default_rng(9))
        assert a == b

    def test_minimum_samples(self, tlfim2):
        h, spectrum = tlfim2
        with pytest.raises(ValueError):
            gradient_variance(build_hea(2, 2), h, spectrum, 0, 50, np.random.default_rng(0))


class TestLossDifferenceVariance:
    def test_constant_cost(self):
        circuit = rz_only_circuit()
        h = PauliSum(2, [(1.0, {0: "Z"})])
        variance, _ = loss_difference_variance(
            circuit, h, Spectrum(-1.0, 1.0), 200, np.random.default_rng(0)
        )
        assert variance < 1e-30  # zero up to phase-normalization roundoff

    def test_non_negative_and_deterministic(self, tlfim2):
        h, spectrum = tlfim2
        circuit = build_hea(2, 2)
        a = loss_difference_variance(circuit, h, spectrum, 300, np.random.default_rng(4))
        b = loss_difference_variance(circuit, h, spectrum, 300, np.random.default_rng(4))
        assert a == b
        assert a[0] >= 0.0


class TestFramePotential:
    def test_theta_independent_circuit_gives_one(self):
        result = frame_potential_2(rz_only_circuit(), 100, 100, np.random.default_rng(0))
        assert result.f2 == pytest.approx(1.0, abs=1e-12)

    def test_haar_value_dimension_four(self):
        assert haar_frame_potential(4) == pytest.approx(0.1)

    def test_haar_value_against_mc_sampling(self):
        """Independent check: Haar states via normalized complex Gaussians."""
        rng = np.random.default_rng(2024)
        n = 800
        states_a = np.stack([random_state(rng, 2) for _ in range(n)])
        states_b = np.stack([random_state(rng, 2) for _ in range(n)])
        overlaps_sq = np.abs(states_a.conj() @ states_b.T) ** 2
        f2 = float((overlaps_sq**2).mean())
        row_var = (overlaps_sq**2).mean(axis=1).var(ddof=1) / n
        col_var = (overlaps_sq**2).mean(axis=0).var(ddof=1) / n
        assert abs(f2 - 0.1) <= 3 * np.sqrt(row_var + col_var)

    def test_deeper_circuit_closer_to_haar(self):
        shallow = frame_potential_2(build_hea(2, 2), 400, 400, np.random.default_rng(1))
        deep = frame_potential_2(build_hea(2, 10), 400, 400, np.random.default_rng(2))
        assert abs(deep.normalized) < abs(shallow.normalized)

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            frame_potential_2(build_hea(2, 2), 50, 100, np.random.default_rng(0))
