"""Optimizers over the ansatz cost: sequential-minimal (NFT/ERNFT) and
parameter-shift gradient descent.

Along any single rotation parameter the exact cost is ``c + a*cos(x - b)``,
so three evaluations determine the restriction and its minimizer in closed
form.  One *step* minimizes one parameter; one *epoch* visits all ``p``
parameters once.  With caching every step spends exactly 2 fresh cost
evaluations (the predicted minimum of step s is the anchor value of step
s+1), plus a single evaluation at the start of a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .ansatz import ParamCircuit, cost_batch
from .hamiltonian import Spectrum
from .statevector import PauliSum


class DivergenceError(RuntimeError):
    """Raised when an optimizer produces a non-finite cost."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch


@dataclass(frozen=True)
class SinusoidFit:
    """Single-parameter restriction ``cost(x) = offset + amplitude*cos(x - phase)``."""

    amplitude: float
    phase: float
    offset: float
    argmin: float

    @property
    def minimum(self) -> float:
        return self.offset - self.amplitude

    def value(self, x: float) -> float:
        return self.offset + self.amplitude * np.cos(x - self.phase)


@dataclass
class RunHistory:
    """Per-epoch record of one seeded optimization run.

    ``energies[t]`` is the relative residual energy after epoch ``t``
    (``t = 0`` is the unoptimized initial point).  For ERNFT the epoch value
    is the cost after the last step ``s = p``.
    """

    n_qubits: int
    n_layers: int
    seed: int
    optimizer: str
    hyperparameters: dict
    energies: np.ndarray
    final_theta: np.ndarray
    n_evaluations: int
    orderings: list[np.ndarray] | None = None
    step_costs: np.ndarray | None = None

    @property
    def n_epochs(self) -> int:
        return len(self.energies) - 1

    @property
    def final_energy(self) -> float:
        return float(self.energies[-1])


def _wrap_angle(x):
    """Map to [-pi, pi)."""
    return (x + pi) % (2.0 * pi) - pi


def fit_sinusoid(
    c_at_x0: float, c_at_x0_plus: float, c_at_x0_minus: float, x0: float
) -> SinusoidFit:
    """Recover ``c + a*cos(x - b)`` from values at x0 and x0 +- pi/2.

    A flat direction (a = 0) leaves the parameter untouched: argmin = x0.
    """
    c = 0.5 * (c_at_x0_plus + c_at_x0_minus)
    a_cos = c_at_x0 - c                       # a * cos(x0 - b)
    a_sin = 0.5 * (c_at_x0_minus - c_at_x0_plus)  # a * sin(x0 - b)
    amplitude = float(np.hypot(a_cos, a_sin))
    if amplitude == 0.0:
        return SinusoidFit(amplitude=0.0, phase=_wrap_angle(x0), offset=c, argmin=x0)
    phase = x0 - float(np.arctan2(a_sin, a_cos))
    argmin = float(_wrap_angle(phase + pi))
    return SinusoidFit(amplitude=amplitude, phase=phase, offset=c, argmin=argmin)


def nft_step(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta: np.ndarray,
    k: int,
    cached_cost: float | None = None,
) -> tuple[np.ndarray, float, SinusoidFit]:
    """Minimize the cost over parameter ``k`` alone.

    Returns (theta', predicted cost at theta', fit).  ``cached_cost`` is the
    cost at ``theta``; providing it saves the anchor evaluation (2 instead of
    3 evaluations).
    """
    p = circuit.n_params
    if not 0 <= k < p:
        raise IndexError(f"parameter index {k} out of range [0, {p})")
    theta = np.asarray(theta, dtype=np.float64)
    x0 = float(theta[k])
    shifted = np.repeat(theta[None, :], 2, axis=0)
    shifted[0, k] = x0 + pi / 2
    shifted[1, k] = x0 - pi / 2
    c_plus, c_minus = cost_batch(circuit, h, spectrum, shifted)
    if cached_cost is None:
        cached_cost = float(cost_batch(circuit, h, spectrum, theta[None, :])[0])
    fit = fit_sinusoid(cached_cost, float(c_plus), float(c_minus), x0)
    new_theta = theta.copy()
    new_theta[k] = fit.argmin
    return new_theta, fit.minimum, fit


def draw_ordering(
    rng: np.random.Generator, p: int, prev_last: int | None, mode: str = "epoch"
) -> np.ndarray:
    """Parameter visiting order for one epoch.

    ``"epoch"`` draws a uniform permutation, redrawn until its first element
    differs from ``prev_last`` (the exclusion is impossible for p = 1 and is
    then suspended).  ``"step"`` draws each step independently, never
    repeating the immediately preceding parameter.
    """
    if mode == "epoch":
        ordering = rng.permutation(p)
        if prev_last is not None and p > 1:
            while ordering[0] == prev_last:
                ordering = rng.permutation(p)
        return ordering
    if mode == "step":
        out = np.empty(p, dtype=np.int64)
        prev = prev_last
        for s in range(p):
            k = int(rng.integers(p))
            if prev is not None and p > 1:
                while k == prev:
                    k = int(rng.integers(p))
            out[s] = k
            prev = k
        return out
    raise ValueError(f"unknown ordering mode {mode!r}")


def ernft_epoch(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta: np.ndarray,
    rng: np.random.Generator,
    prev_last: int | None = None,
    cached_cost: float | None = None,
    ordering_mode: str = "epoch",
) -> tuple[np.ndarray, float, np.ndarray]:
    """One ERNFT epoch: NFT-step every parameter in a fresh random order.

    Returns (theta', cost after step s = p, ordering).
    """
    ordering = draw_ordering(rng, circuit.n_params, prev_last, ordering_mode)
    if cached_cost is None:
        cached_cost = float(cost_batch(circuit, h, spectrum, np.asarray(theta)[None, :])[0])
    th = np.asarray(theta, dtype=np.float64)
    for k in ordering:
        th, cached_cost, _ = nft_step(circuit, h, spectrum, th, int(k), cached_cost=cached_cost)
    return th, cached_cost, ordering


def run_ernft_batch(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta0s: np.ndarray,
    n_epochs: int,
    seeds: list[int],
    *,
    ordering_mode: str = "epoch",
    three_point: bool = False,
    record_steps: bool = False,
    record_orderings: bool = True,
) -> list[RunHistory]:
    """ERNFT over several runs in lockstep (one batched evaluation per step).

    Each run keeps its own seeded ordering stream and parameter vector, so the
    histories are identical to running the runs one at a time.
    ``three_point=True`` re-evaluates the anchor cost each step instead of
    reusing the previous step's predicted minimum (validation mode).
    """
    theta0s = np.atleast_2d(np.asarray(theta0s, dtype=np.float64))
    n_runs, p = theta0s.shape
    if p != circuit.n_params:
        raise ValueError(f"theta0s has {p} columns, circuit has {circuit.n_params} parameters")
    if len(seeds) != n_runs:
        raise ValueError(f"{n_runs} runs but {len(seeds)} seeds")
    rngs = [np.random.default_rng(s) for s in seeds]
    rows = np.arange(n_runs)

    thetas = theta0s.copy()
    cached = cost_batch(circuit, h, spectrum, thetas)
    n_evals = np.full(n_runs, 1, dtype=np.int64)
    energies = np.empty((n_runs, n_epochs + 1))
    energies[:, 0] = cached
    orderings_log: list[list[np.ndarray]] = [[] for _ in range(n_runs)]
    step_log: list[np.ndarray] = []
    prev_last: list[int | None] = [None] * n_runs

    for _t in range(1, n_epochs + 1):
        epoch_orderings = np.stack(
            [draw_ordering(rngs[r], p, prev_last[r], ordering_mode) for r in range(n_runs)]
        )
        for s in range(p):
            ks = epoch_orderings[:, s]
            x0 = thetas[rows, ks]
            plus = thetas.copy()
            plus[rows, ks] = x0 + pi / 2
            minus = thetas.copy()
            minus[rows, ks] = x0 - pi / 2
            values = cost_batch(circuit, h, spectrum, np.concatenate([plus, minus], axis=0))
            c_plus, c_minus = values[:n_runs], values[n_runs:]
            if three_point:
                cached = cost_batch(circuit, h, spectrum, thetas)
                n_evals += 1
            c = 0.5 * (c_plus + c_minus)
            a_cos = cached - c
            a_sin = 0.5 * (c_minus - c_plus)
            amplitude = np.hypot(a_cos, a_sin)
            argmin = _wrap_angle(x0 - np.arctan2(a_sin, a_cos) + pi)
            thetas[rows, ks] = np.where(amplitude == 0.0, x0, argmin)
            cached = c - amplitude
            n_evals += 2
            if record_steps:
                step_log.append(cached.copy())
        energies[:, _t] = cached
        for r in range(n_runs):
            prev_last[r] = int(epoch_orderings[r, -1])
            if record_orderings:
                orderings_log[r].append(epoch_orderings[r])

    step_costs = np.stack(step_log, axis=1) if step_log else None
    return [
        RunHistory(
            n_qubits=circuit.n_qubits,
            n_layers=circuit.n_layers,
            seed=int(seeds[r]),
            optimizer="ernft",
            hyperparameters={"ordering_mode": ordering_mode, "three_point": three_point},
            energies=energies[r].copy(),
            final_theta=thetas[r].copy(),
            n_evaluations=int(n_evals[r]),
            orderings=orderings_log[r] if record_orderings else None,
            step_costs=step_costs[r].copy() if step_costs is not None else None,
        )
        for r in range(n_runs)
    ]


def run_ernft(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta0: np.ndarray,
    n_epochs: int,
    seed: int,
    *,
    ordering_mode: str = "epoch",
    three_point: bool = False,
    record_steps: bool = False,
    record_orderings: bool = True,
) -> RunHistory:
    """One seeded ERNFT run of ``n_epochs`` epochs starting from ``theta0``."""
    return run_ernft_batch(
        circuit,
        h,
        spectrum,
        np.asarray(theta0, dtype=np.float64)[None, :],
        n_epochs,
        [seed],
        ordering_mode=ordering_mode,
        three_point=three_point,
        record_steps=record_steps,
        record_orderings=record_orderings,
    )[0]


def parameter_shift_gradient(
    circuit: ParamCircuit, h: PauliSum, spectrum: Spectrum, theta: np.ndarray
) -> np.ndarray:
    """Exact gradient of E: ``dE/dtheta_k = [E(theta + pi/2 e_k) - E(theta - pi/2 e_k)] / 2``."""
    theta = np.asarray(theta, dtype=np.float64)
    p = circuit.n_params
    shifted = np.repeat(theta[None, :], 2 * p, axis=0)
    idx = np.arange(p)
    shifted[idx, idx] += pi / 2
    shifted[p + idx, idx] -= pi / 2
    values = cost_batch(circuit, h, spectrum, shifted)
    return 0.5 * (values[:p] - values[p:])


def run_gd_batch(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta0s: np.ndarray,
    n_epochs: int,
    learning_rate: float,
    seeds: list[int],
) -> list[RunHistory]:
    """Plain gradient descent on E for several runs in lockstep.

    One epoch updates the whole parameter vector at once:
    ``theta <- theta - lr * grad E`` with the parameter-shift gradient.
    Parameters are left unwrapped.  ``learning_rate = 0`` is allowed (the
    history is then constant), negative rates are rejected.
    """
    if learning_rate < 0:
        raise ValueError(f"learning_rate must be non-negative, got {learning_rate}")
    theta0s = np.atleast_2d(np.asarray(theta0s, dtype=np.float64))
    n_runs, p = theta0s.shape
    if p != circuit.n_params:
        raise ValueError(f"theta0s has {p} columns, circuit has {circuit.n_params} parameters")
    rows = np.arange(n_runs)
    idx = np.arange(p)

    thetas = theta0s.copy()
    energies = np.empty((n_runs, n_epochs + 1))
    energies[:, 0] = cost_batch(circuit, h, spectrum, thetas)
    n_evals = 1
    for t in range(1, n_epochs + 1):
        shifted = np.empty((n_runs, 2 * p, p))
        shifted[:] = thetas[:, None, :]
        shifted[rows[:, None], idx[None, :], idx[None, :]] += pi / 2
        shifted[rows[:, None], p + idx[None, :], idx[None, :]] -= pi / 2
        values = cost_batch(circuit, h, spectrum, shifted.reshape(-1, p)).reshape(n_runs, 2 * p)
        grad = 0.5 * (values[:, :p] - values[:, p:])
        thetas -= learning_rate * grad
        energies[:, t] = cost_batch(circuit, h, spectrum, thetas)
        n_evals += 2 * p + 1
        if not np.all(np.isfinite(energies[:, t])):
            bad = int(np.flatnonzero(~np.isfinite(energies[:, t]))[0])
            raise DivergenceError(
                f"non-finite cost in run {bad} at epoch {t} (lr={learning_rate})", epoch=t
            )
    return [
        RunHistory(
            n_qubits=circuit.n_qubits,
            n_layers=circuit.n_layers,
            seed=int(seeds[r]),
            optimizer="gd",
            hyperparameters={"learning_rate": learning_rate},
            energies=energies[r].copy(),
            final_theta=thetas[r].copy(),
            n_evaluations=n_evals,
        )
        for r in range(n_runs)
    ]


def run_gd(
    circuit: ParamCircuit,
    h: PauliSum,
    spectrum: Spectrum,
    theta0: np.ndarray,
    n_epochs: int,
    learning_rate: float,
    seed: int,
) -> RunHistory:
    """One gradient-descent run; deterministic given ``theta0`` (seed is recorded)."""
    return run_gd_batch(
        circuit,
        h,
        spectrum,
        np.asarray(theta0, dtype=np.float64)[None, :],
        n_epochs,
        learning_rate,
        [seed],
    )[0]
