"""Trainability diagnostics: QFIM rank / overparametrization threshold,
gradient-variance / barren-plateau threshold, loss-difference variance, and
the second-order frame potential against the Haar value.

Monte Carlo estimators draw each sample from its own RNG substream
(``rng.spawn``), so estimates do not depend on evaluation order, and
reductions use numpy's pairwise summation for reproducible accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .ansatz import ParamCircuit, _run_batch_chunked, cost_batch, state_and_derivatives
from .hamiltonian import Spectrum
from .statevector import PauliSum

RANK_REL_TOL = 1e-8
RANK_ABS_FLOOR = 1e-12


@dataclass
class Qfim:
    """p x p quantum Fisher information matrix at one parameter point."""

    matrix: np.ndarray
    theta: np.ndarray
    n_qubits: int
    n_layers: int


@dataclass
class VarianceCurve:
    """A variance estimate per scanned axis value (L or N)."""

    axis_name: str
    axis: list[int]
    variance: np.ndarray
    std_error: np.ndarray
    n_samples: int


@dataclass
class Thresholds:
    n_qubits: int
    l_bp: int | None
    l_op: int | None
    r_max: int
    v_th: float


@dataclass
class FramePotential:
    f2: float
    normalized: float
    std_error: float
    f_haar: float
    n_a: int
    n_b: int

    @property
    def normalized_std_error(self) -> float:
        return self.std_error / self.f_haar


def sample_thetas(rng: np.random.Generator, n_samples: int, n_params: int) -> np.ndarray:
    """(n_samples, n_params) uniform draws from [-pi, pi), one substream per sample."""
    out = np.empty((n_samples, n_params))
    for i, child in enumerate(rng.spawn(n_samples)):
        out[i] = child.uniform(-pi, pi, n_params)
    return out


def qfim(circuit: ParamCircuit, theta: np.ndarray) -> Qfim:
    """M_ab = 4 Re( <d_a psi|d_b psi> - <d_a psi|psi><psi|d_b psi> )."""
    theta = np.asarray(theta, dtype=np.float64)
    psi, dpsi = state_and_derivatives(circuit, theta)
    gram = dpsi.conj() @ dpsi.T
    overlap = dpsi.conj() @ psi  # <d_a psi|psi>
    matrix = 4.0 * (gram - np.outer(overlap, overlap.conj())).real
    asym = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asym > 1e-10:
        raise ValueError(f"QFIM asymmetry {asym:.3e} exceeds 1e-10")
    return Qfim(matrix=matrix, theta=theta.copy(), n_qubits=circuit.n_qubits, n_layers=circuit.n_layers)


def numeric_rank(matrix: np.ndarray, rel_tol: float = RANK_REL_TOL) -> int:
    """Count singular values above ``max(rel_tol * s_max, 1e-12)``."""
    svals = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > max(rel_tol * float(svals[0]), RANK_ABS_FLOOR)))


def max_qfim_rank(
    circuit: ParamCircuit,
    n_theta_samples: int = 5,
    rng: np.random.Generator | None = None,
    rel_tol: float = RANK_REL_TOL,
) -> int:
    """Max numeric QFIM rank over random parameter points.

    The rank at generic theta is almost surely maximal; a handful of samples
    guards against a non-generic draw.
    """
    if n_theta_samples < 1:
        raise ValueError("n_theta_samples must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    thetas = sample_thetas(rng, n_theta_samples, circuit.n_params)
    return max(numeric_rank(qfim(circuit, th).matrix, rel_tol) for th in thetas)


def op_threshold(ranks_by_l: dict[int, int], r_max: int) -> int | None:
    """Smallest scanned L whose rank reaches ``r_max``; None if unsaturated."""
    for l_value in sorted(ranks_by_l):
        if ranks_by_l[l_value] == r_max:
            return l_value
    return None


def _variance_with_error(samples: np.ndarray) -> tuple[float, float]:
    """Sample variance and its standard error from the squared deviations."""
    n = samples.size
    deviations_sq = (samples - samples.mean()) ** 2
    variance = float(deviations_sq.sum() / (n - 1))
    std_error = float(deviations_sq.std(ddof=1) / sqrt(n))
    return variance, std_error


def gradient_variance(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    k: int = 0,
    n_samples: int = 10_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Var(dE/dtheta_k) over uniform random parameter points.

    The gradient is the exact parameter-shift value. Returns (variance,
    standard error).
    """
    if n_samples < 100:
        raise ValueError(f"n_samples must be >= 100, got {n_samples}")
    rng = np.random.default_rng(0) if rng is None else rng
    thetas = sample_thetas(rng, n_samples, circuit.n_params)
    plus = thetas.copy()
    plus[:, k] += pi / 2
    minus = thetas.copy()
    minus[:, k] -= pi / 2
    values = cost_batch(circuit, h, spectrum, np.concatenate([plus, minus], axis=0))
    grads = 0.5 * (values[:n_samples] - values[n_samples:])
    return _variance_with_error(grads)


def bp_threshold(curve: VarianceCurve, v_th: float = 0.05) -> int | None:
    """Minimal L with ``(Var - Var_min)/Var_min < v_th`` over the scanned grid.

    The scan minimum itself always qualifies (normalized value 0), which also
    covers the ``v_th = 0`` limit; None means the inequality was never met.
    """
    variance = np.asarray(curve.variance, dtype=np.float64)
    v_min = float(variance.min())
    if v_min == 0.0:
        satisfied = variance == 0.0
    else:
        normalized = (variance - v_min) / v_min
        satisfied = (normalized < v_th) | (normalized == 0.0)
    hits = np.flatnonzero(satisfied)
    return int(curve.axis[hits[0]]) if hits.size else None


def loss_difference_variance(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    n_pairs: int = 10_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Var(|E(theta_A) - E(theta_B)|) over independent uniform pairs."""
    if n_pairs < 100:
        raise ValueError(f"n_pairs must be >= 100, got {n_pairs}")
    rng = np.random.default_rng(0) if rng is None else rng
    p = circuit.n_params
    pairs = np.empty((n_pairs, 2 * p))
    for i, child in enumerate(rng.spawn(n_pairs)):
        pairs[i] = child.uniform(-pi, pi, 2 * p)
    values_a = cost_batch(circuit, h, spectrum, pairs[:, :p])
    values_b = cost_batch(circuit, h, spectrum, pairs[:, p:])
    return _variance_with_error(np.abs(values_a - values_b))


def haar_frame_potential(dim: int) -> float:
    """Second-moment frame potential of Haar-random states: 2 / (d (d+1))."""
    return 2.0 / (dim * (dim + 1))


def frame_potential_2(
    circuit: ParamCircuit,
    n_a: int = 2000,
    n_b: int = 2000,
    rng: np.random.Generator | None = None,
    _row_chunk: int = 2048,
) -> FramePotential:
    """Mean of |<psi(theta_A)|psi(theta_B)>|^4 over an n_a x n_b cross product.

    The standard error uses the first-order (Hoeffding) decomposition,
    ``Var(row means)/n_a + Var(col means)/n_b``, since entries sharing a row
    or column are correlated.
    """
    if n_a < 100 or n_b < 100:
        raise ValueError(f"sample counts must be >= 100, got ({n_a}, {n_b})")
    rng = np.random.default_rng(0) if rng is None else rng
    p = circuit.n_params
    children = rng.spawn(n_a + n_b)
    thetas_a = np.stack([c.uniform(-pi, pi, p) for c in children[:n_a]])
    thetas_b = np.stack([c.uniform(-pi, pi, p) for c in children[n_a:]])
    states_b = _run_batch_chunked(circuit, thetas_b)

    row_means = np.empty(n_a)
    col_sums = np.zeros(n_b)
    for start in range(0, n_a, _row_chunk):
        stop = min(start + _row_chunk, n_a)
        states_a = _run_batch_chunked(circuit, thetas_a[start:stop])
        overlaps_sq = np.abs(states_a.conj() @ states_b.T) ** 2
        block = overlaps_sq * overlaps_sq
        row_means[start:stop] = block.mean(axis=1)
        col_sums += block.sum(axis=0)
    col_means = col_sums / n_a
    f2 = float(row_means.mean())
    variance = row_means.var(ddof=1) / n_a + col_means.var(ddof=1) / n_b
    f_haar = haar_frame_potential(circuit.dim)
    return FramePotential(
        f2=f2,
        normalized=(f2 - f_haar) / f_haar,
        std_error=float(sqrt(variance)),
        f_haar=f_haar,
        n_a=n_a,
        n_b=n_b,
    )
