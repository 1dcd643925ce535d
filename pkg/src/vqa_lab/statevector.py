"""Dense complex statevector engine.

States live on the last axis of a C-contiguous complex128 array, so every
kernel works unchanged on a single state of shape ``(2**n,)`` or on a batch
``(B, 2**n)``.  Qubit 0 is the least-significant bit of the basis index.
Rotation convention: ``R_P(theta) = exp(-i * theta * P / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

MAX_QUBITS = 24  # 2**24 complex amplitudes = 256 MiB, the desk-scale ceiling


class GateKind(Enum):
    RY = "ry"
    RZ = "rz"
    CNOT = "cnot"
    PAULI_FACTOR = "pauli_factor"


@dataclass(frozen=True)
class Gate:
    """A concrete gate instance.

    ``angle`` is used by RY/RZ.  PAULI_FACTOR multiplies the state by
    ``scalar * P`` for a single-site Pauli ``P`` in {X, Y, Z}; it is the
    (generally non-unitary) insertion used to build derivative states.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float = 0.0
    scalar: complex = 1.0
    pauli: str = ""

    def __post_init__(self) -> None:
        if self.kind is GateKind.CNOT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CNOT needs two distinct qubits, got {self.qubits}")
        else:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind.value} acts on one qubit, got {self.qubits}")
        if self.kind is GateKind.PAULI_FACTOR and self.pauli not in ("X", "Y", "Z"):
            raise ValueError(f"PAULI_FACTOR needs a Pauli label in X/Y/Z, got {self.pauli!r}")


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitudes has shape {self.amplitudes.shape}, "
                f"expected ({1 << self.n_qubits},) for {self.n_qubits} qubits"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass
class PauliSum:
    """Weighted sum of Pauli strings, ``terms = [(coeff, {site: 'X'|'Y'|'Z'})]``.

    Real coefficients make the sum Hermitian by construction.  The empty
    string is the identity.  Instances are treated as immutable once built;
    the executor representation is compiled lazily and cached.
    """

    n_qubits: int
    terms: list[tuple[float, dict[int, str]]]
    _compiled: "_CompiledPauliSum | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        for coeff, string in self.terms:
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff}")
            for site, label in string.items():
                if not 0 <= site < self.n_qubits:
                    raise ValueError(f"site {site} out of range for {self.n_qubits} qubits")
                if label not in ("X", "Y", "Z"):
                    raise ValueError(f"unknown Pauli label {label!r}")

    def compiled(self) -> "_CompiledPauliSum":
        if self._compiled is None:
            self._compiled = _compile_pauli_sum(self)
        return self._compiled


@dataclass
class _CompiledPauliSum:
    """Executor form: one merged real diagonal plus gather groups.

    A string with flip mask ``m`` acts as ``(P psi)[j] = w[j] * psi[j ^ m]``,
    so each off-diagonal group is a (permutation, weight) pair; strings that
    share a mask are merged.
    """

    diag: np.ndarray                      # (dim,) float64
    groups: list[tuple[np.ndarray, np.ndarray]]  # [(perm int64, w complex128)]


def _pauli_source_phase(indices: np.ndarray, string: dict[int, str]) -> np.ndarray:
    """Phase ``c(i)`` with ``P|i> = c(i)|i ^ flip>`` for source indices ``i``."""
    phase = np.ones(indices.shape, dtype=np.complex128)
    for site, label in string.items():
        bit = (indices >> site) & 1
        if label == "Y":
            phase *= np.where(bit == 1, -1j, 1j)
        elif label == "Z":
            phase *= 1.0 - 2.0 * bit
    return phase


def _compile_pauli_sum(h: PauliSum) -> _CompiledPauliSum:
    dim = 1 << h.n_qubits
    idx = np.arange(dim, dtype=np.int64)
    diag = np.zeros(dim, dtype=np.float64)
    weights: dict[int, np.ndarray] = {}
    for coeff, string in h.terms:
        flip = 0
        for site, label in string.items():
            if label in ("X", "Y"):
                flip |= 1 << site
        if flip == 0:
            diag += coeff * _pauli_source_phase(idx, string).real
        else:
            src = idx ^ flip
            w = coeff * _pauli_source_phase(src, string)
            if flip in weights:
                weights[flip] += w
            else:
                weights[flip] = w
    groups = [(idx ^ flip, w) for flip, w in sorted(weights.items())]
    return _CompiledPauliSum(diag=diag, groups=groups)


# ---------------------------------------------------------------------------
# batched kernels (shared by the public single-state API and the ansatz /
# optimizer fast paths); all operate in place on a (B, dim) array


def _bit_view(amps: np.ndarray, qubit: int) -> np.ndarray:
    """Reshape ``(B, dim)`` to ``(B, dim >> (q+1), 2, 1 << q)`` exposing bit q."""
    b, dim = amps.shape
    return amps.reshape(b, dim >> (qubit + 1), 2, 1 << qubit)


def _angle_factors(angles: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * np.asarray(angles, dtype=np.float64)
    c, s = np.cos(half), np.sin(half)
    if c.ndim == 1:  # per-row angles broadcast against (B, hi, lo) slices
        c, s = c[:, None, None], s[:, None, None]
    return c, s


def _apply_ry(amps: np.ndarray, qubit: int, angles: float | np.ndarray) -> None:
    c, s = _angle_factors(angles)
    v = _bit_view(amps, qubit)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = c * a0 - s * a1
    v[:, :, 1, :] = s * a0 + c * a1


def _apply_rz(amps: np.ndarray, qubit: int, angles: float | np.ndarray) -> None:
    half = 0.5 * np.asarray(angles, dtype=np.float64)
    ph = np.cos(half) - 1j * np.sin(half)  # exp(-i*theta/2)
    if ph.ndim == 1:
        ph = ph[:, None, None]
    v = _bit_view(amps, qubit)
    v[:, :, 0, :] *= ph
    v[:, :, 1, :] *= np.conj(ph)


@lru_cache(maxsize=None)
def _cnot_indices(n_qubits: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n_qubits)
    sel = ((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)
    i10 = idx[sel]
    i11 = i10 | (1 << target)
    return i10, i11


def _apply_cnot(amps: np.ndarray, n_qubits: int, control: int, target: int) -> None:
    i10, i11 = _cnot_indices(n_qubits, control, target)
    tmp = amps[:, i10].copy()
    amps[:, i10] = amps[:, i11]
    amps[:, i11] = tmp


def _apply_pauli_factor(amps: np.ndarray, qubit: int, pauli: str, scalar: complex) -> None:
    v = _bit_view(amps, qubit)
    if pauli == "X":
        a0 = v[:, :, 0, :].copy()
        v[:, :, 0, :] = scalar * v[:, :, 1, :]
        v[:, :, 1, :] = scalar * a0
    elif pauli == "Y":
        a0 = v[:, :, 0, :].copy()
        v[:, :, 0, :] = (-1j * scalar) * v[:, :, 1, :]
        v[:, :, 1, :] = (1j * scalar) * a0
    else:  # Z
        v[:, :, 0, :] *= scalar
        v[:, :, 1, :] *= -scalar


def _expectation_batch(amps: np.ndarray, h: PauliSum) -> np.ndarray:
    """Real expectation values, one per row; raises if Hermiticity is violated.

    Reductions stay in numpy (pairwise, per row) rather than BLAS so results
    are bit-identical regardless of batch size or thread count.
    """
    comp = h.compiled()
    values = (np.abs(amps) ** 2 * comp.diag).sum(axis=-1)
    if comp.groups:
        acc = np.zeros(amps.shape[0], dtype=np.complex128)
        conj = np.conj(amps)
        for perm, w in comp.groups:
            acc += (conj * w * amps[:, perm]).sum(axis=-1)
        imag_max = float(np.max(np.abs(acc.imag))) if acc.size else 0.0
        if imag_max >= 1e-9:
            raise ValueError(f"expectation has imaginary part {imag_max:.3e}; input not Hermitian?")
        values = values + acc.real
    return values


# ---------------------------------------------------------------------------
# public single-state operations


def zero_state(n_qubits: int) -> StateVector:
    """The computational basis state |0...0>."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state transformed by ``gate`` (value semantics)."""
    n = state.n_qubits
    for q in gate.qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")
    amps = state.amplitudes[None, :].copy()
    if gate.kind is GateKind.RY:
        _apply_ry(amps, gate.qubits[0], gate.angle)
    elif gate.kind is GateKind.RZ:
        _apply_rz(amps, gate.qubits[0], gate.angle)
    elif gate.kind is GateKind.CNOT:
        _apply_cnot(amps, n, gate.qubits[0], gate.qubits[1])
    else:
        _apply_pauli_factor(amps, gate.qubits[0], gate.pauli, gate.scalar)
    return StateVector(n, amps[0])


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum conj(a_i) b_i."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(state: StateVector, h: PauliSum) -> float:
    """Real part of <psi|H|psi>; the imaginary part must vanish below 1e-9."""
    if state.n_qubits != h.n_qubits:
        raise ValueError(f"qubit counts differ: {state.n_qubits} vs {h.n_qubits}")
    return float(_expectation_batch(state.amplitudes[None, :], h)[0])
