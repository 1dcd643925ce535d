"""TLFIM Hamiltonian density, exact extremal eigenvalues, residual-energy scale.

The model is the transverse and longitudinal field Ising chain with periodic
boundary, normalized by the number of sites:

    H = (1/N) * sum_n ( J * Z_n Z_{n+1} + h_X * X_n + h_Z * Z_n ),   Z_N = Z_0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import PauliSum

MAX_DENSE_QUBITS = 12  # 4096 x 4096 dense Hermitian eigensolve is the guard


class DegenerateSpectrumError(ValueError):
    """Raised when an energy scale with zero spectral width is used."""


@dataclass(frozen=True)
class TlfimParams:
    n_sites: int
    coupling: float = 1.0   # J
    field_x: float = 1.0    # h_X
    field_z: float = 1.0    # h_Z

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ValueError(f"TLFIM needs at least 2 sites (periodic wrap), got {self.n_sites}")


@dataclass(frozen=True)
class Spectrum:
    lambda_min: float
    lambda_max: float

    @property
    def width(self) -> float:
        return self.lambda_max - self.lambda_min


def build_tlfim(params: TlfimParams) -> PauliSum:
    """Pauli-sum form of the TLFIM density; zero-coefficient terms are dropped."""
    n = params.n_sites
    terms: list[tuple[float, dict[int, str]]] = []
    if params.coupling != 0.0:
        for site in range(n):
            terms.append((params.coupling / n, {site: "Z", (site + 1) % n: "Z"}))
    if params.field_x != 0.0:
        for site in range(n):
            terms.append((params.field_x / n, {site: "X"}))
    if params.field_z != 0.0:
        for site in range(n):
            terms.append((params.field_z / n, {site: "Z"}))
    return PauliSum(n_qubits=n, terms=terms)


def dense_matrix(h: PauliSum) -> np.ndarray:
    """Dense matrix of a PauliSum, assembled from the compiled gather form."""
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrix limited to {MAX_DENSE_QUBITS} qubits, got {h.n_qubits}")
    dim = 1 << h.n_qubits
    comp = h.compiled()
    mat = np.diag(comp.diag.astype(np.complex128))
    cols = np.arange(dim)
    for perm, w in comp.groups:
        # column j of P maps |j> to w'[...]|j ^ flip>; with our convention the
        # entry is mat[perm[j], j] += w[perm[j]] since (P psi)[i] = w[i] psi[perm[i]]
        mat[perm[cols], cols] += w[perm[cols]]
    return mat


def extremal_eigenvalues(h: PauliSum) -> Spectrum:
    """Smallest and largest eigenvalue by dense exact diagonalization."""
    if h.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(
            f"exact diagonalization limited to {MAX_DENSE_QUBITS} qubits, got {h.n_qubits}"
        )
    mat = dense_matrix(h)
    herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
    if herm_defect > 1e-9:
        raise ValueError(f"input is not Hermitian (defect {herm_defect:.3e})")
    eigenvalues = np.linalg.eigvalsh(mat)
    return Spectrum(lambda_min=float(eigenvalues[0]), lambda_max=float(eigenvalues[-1]))


def relative_residual_energy(energy: float, spectrum: Spectrum) -> float:
    """(energy - lambda_min) / (lambda_max - lambda_min), stored unclamped."""
    if not spectrum.lambda_max > spectrum.lambda_min:
        raise DegenerateSpectrumError(
            f"zero spectral width: lambda_min={spectrum.lambda_min}, "
            f"lambda_max={spectrum.lambda_max}"
        )
    return (energy - spectrum.lambda_min) / spectrum.width
