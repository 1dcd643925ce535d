"""Hardware-efficient ansatz: construction, state preparation, derivative states.

Parameter indexing for block ``l`` (0-based): the RY on qubit ``n`` takes
``theta[2*N*l + n]`` and the RZ on qubit ``n`` takes ``theta[2*N*l + N + n]``.
The circuit applies blocks B_0, C, B_1, C, ..., B_{L-1}, where C is a chain of
CNOT(n, n+1 mod N) in ascending n.  Within a block all RY come before all RZ,
each in ascending qubit order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hamiltonian import DegenerateSpectrumError, Spectrum, relative_residual_energy
from .statevector import (
    Gate,
    GateKind,
    PauliSum,
    StateVector,
    _apply_cnot,
    _apply_pauli_factor,
    _apply_ry,
    _apply_rz,
    _expectation_batch,
)

# generator of each rotation kind, for derivative-state insertion
_GENERATOR = {GateKind.RY: "Y", GateKind.RZ: "Z"}

# executor limit on batch rows processed at once (memory bound, fixed so that
# results never depend on caller-chosen parallelism)
_MAX_BATCH_ROWS = 4096


@dataclass(frozen=True)
class GateTemplate:
    """Circuit slot: a fixed CNOT, or a rotation bound to parameter ``param``."""

    kind: GateKind
    qubits: tuple[int, ...]
    param: int | None = None


@dataclass(frozen=True)
class ParamCircuit:
    """Ordered gate-template list with a parameter-index bijection.

    ``build_hea`` produces circuits with ``n_params == 2 * n_qubits * n_layers``;
    hand-built circuits (single rotations, rotation-only chains) are allowed
    for diagnostics as long as the parameter indices cover 0..p-1 exactly once.
    """

    n_qubits: int
    n_layers: int
    gates: tuple[GateTemplate, ...]

    def __post_init__(self) -> None:
        params = sorted(g.param for g in self.gates if g.param is not None)
        if params != list(range(len(params))):
            raise ValueError(f"parameter indices must cover 0..p-1 exactly once, got {params}")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {g} addresses qubit {q} of {self.n_qubits}")

    @cached_property
    def n_params(self) -> int:
        return sum(1 for g in self.gates if g.param is not None)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def param_positions(self) -> dict[int, int]:
        """Map parameter index -> gate position in the ordered gate list."""
        return {g.param: pos for pos, g in enumerate(self.gates) if g.param is not None}


def build_hea(n_qubits: int, n_layers: int, entangler: str = "circular") -> ParamCircuit:
    """HEA with ``2*N*L`` rotations and ``N*(L-1)`` CNOTs (circular entangler).

    ``entangler="linear"`` drops the wrap pair (sensitivity checks only);
    the default follows the periodic chain.
    """
    if n_qubits < 2:
        raise ValueError(f"n_qubits must be >= 2, got {n_qubits}")
    if n_layers < 2:
        raise ValueError(f"n_layers must be >= 2, got {n_layers}")
    if entangler not in ("circular", "linear"):
        raise ValueError(f"entangler must be 'circular' or 'linear', got {entangler!r}")
    n = n_qubits
    gates: list[GateTemplate] = []
    for layer in range(n_layers):
        base = 2 * n * layer
        for q in range(n):
            gates.append(GateTemplate(GateKind.RY, (q,), base + q))
        for q in range(n):
            gates.append(GateTemplate(GateKind.RZ, (q,), base + n + q))
        if layer < n_layers - 1:
            pairs = range(n) if entangler == "circular" else range(n - 1)
            for q in pairs:
                gates.append(GateTemplate(GateKind.CNOT, (q, (q + 1) % n)))
    return ParamCircuit(n_qubits=n, n_layers=n_layers, gates=tuple(gates))


def _check_theta(circuit: ParamCircuit, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] != circuit.n_params:
        raise ValueError(
            f"theta has {theta.shape[-1]} entries, circuit has {circuit.n_params} parameters"
        )
    return theta


def _run_batch(circuit: ParamCircuit, thetas: np.ndarray) -> np.ndarray:
    """Execute the circuit from |0...0> for each parameter row; returns (B, dim)."""
    b = thetas.shape[0]
    amps = np.zeros((b, circuit.dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    n = circuit.n_qubits
    for g in circuit.gates:
        if g.kind is GateKind.RY:
            _apply_ry(amps, g.qubits[0], thetas[:, g.param])
        elif g.kind is GateKind.RZ:
            _apply_rz(amps, g.qubits[0], thetas[:, g.param])
        else:
            _apply_cnot(amps, n, g.qubits[0], g.qubits[1])
    return amps


def _run_batch_chunked(circuit: ParamCircuit, thetas: np.ndarray) -> np.ndarray:
    b = thetas.shape[0]
    if b <= _MAX_BATCH_ROWS:
        return _run_batch(circuit, thetas)
    out = np.empty((b, circuit.dim), dtype=np.complex128)
    for start in range(0, b, _MAX_BATCH_ROWS):
        stop = min(start + _MAX_BATCH_ROWS, b)
        out[start:stop] = _run_batch(circuit, thetas[start:stop])
    return out


def prepare_state(circuit: ParamCircuit, theta: np.ndarray) -> StateVector:
    """|psi(theta)> = U(theta)|0...0>."""
    theta = _check_theta(circuit, theta)
    amps = _run_batch(circuit, theta[None, :])
    return StateVector(circuit.n_qubits, amps[0])


def derivative_state(circuit: ParamCircuit, theta: np.ndarray, a: int) -> StateVector:
    """Unnormalized |d psi / d theta_a>, norm exactly 1/2.

    The derivative of ``R_P(x) = exp(-i x P / 2)`` is ``(-i P / 2) R_P(x)``, so
    the state is produced by the ordinary circuit with a ``(-i/2) P`` factor
    inserted immediately after gate ``a``.
    """
    theta = _check_theta(circuit, theta)
    if not 0 <= a < circuit.n_params:
        raise IndexError(f"parameter index {a} out of range [0, {circuit.n_params})")
    amps = np.zeros((1, circuit.dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    n = circuit.n_qubits
    for g in circuit.gates:
        if g.kind is GateKind.RY:
            _apply_ry(amps, g.qubits[0], theta[g.param])
        elif g.kind is GateKind.RZ:
            _apply_rz(amps, g.qubits[0], theta[g.param])
        else:
            _apply_cnot(amps, n, g.qubits[0], g.qubits[1])
        if g.param == a:
            _apply_pauli_factor(amps, g.qubits[0], _GENERATOR[g.kind], -0.5j)
    return StateVector(n, amps[0])


def state_and_derivatives(circuit: ParamCircuit, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One pass over the circuit giving ``psi`` and all p derivative states.

    Row 0 tracks |psi>; row a+1 tracks |d_a psi>, picking up its Pauli factor
    when the circuit passes gate a.  Returns (psi (dim,), dpsi (p, dim)).
    """
    theta = _check_theta(circuit, theta)
    p = circuit.n_params
    amps = np.zeros((p + 1, circuit.dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    n = circuit.n_qubits
    for g in circuit.gates:
        if g.kind is GateKind.RY:
            _apply_ry(amps, g.qubits[0], theta[g.param])
        elif g.kind is GateKind.RZ:
            _apply_rz(amps, g.qubits[0], theta[g.param])
        else:
            _apply_cnot(amps, n, g.qubits[0], g.qubits[1])
        if g.param is not None:
            row = amps[g.param + 1 : g.param + 2]
            _apply_pauli_factor(row, g.qubits[0], _GENERATOR[g.kind], -0.5j)
    return amps[0], amps[1:]


def cost(
    circuit: ParamCircuit, h: PauliSum, spectrum: Spectrum, theta: np.ndarray
) -> tuple[float, float]:
    """(energy, relative residual energy E) at theta."""
    energy = float(_expectation_batch(_run_batch(circuit, _check_theta(circuit, theta)[None, :]), h)[0])
    return energy, relative_residual_energy(energy, spectrum)


def cost_batch(
    circuit: ParamCircuit, h: PauliSum, spectrum: Spectrum, thetas: np.ndarray
) -> np.ndarray:
    """Relative residual energies for a (B, p) block of parameter vectors."""
    if not spectrum.lambda_max > spectrum.lambda_min:
        raise DegenerateSpectrumError(f"zero spectral width in {spectrum}")
    thetas = _check_theta(circuit, np.atleast_2d(thetas))
    energies = _expectation_batch(_run_batch_chunked(circuit, thetas), h)
    return (energies - spectrum.lambda_min) / spectrum.width


def preparation_gate(template: GateTemplate, theta: np.ndarray) -> Gate:
    """Bind a template to concrete angles (introspection/debug helper)."""
    if template.param is None:
        return Gate(kind=template.kind, qubits=template.qubits)
    return Gate(kind=template.kind, qubits=template.qubits, angle=float(theta[template.param]))
