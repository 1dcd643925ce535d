"""Exact TLFIM spectra and the relative residual energy scale.

The cost of every experiment in this package is the relative residual energy
E = (energy - lambda_min) / (lambda_max - lambda_min), which needs the exact
extremal eigenvalues of the Hamiltonian density.  This script prints them for
growing chains, together with the E value of the all-zeros product state.
"""

import numpy as np

from vqa_lab import (
    TlfimParams,
    build_tlfim,
    expectation,
    extremal_eigenvalues,
    relative_residual_energy,
    zero_state,
)

print("TLFIM density, periodic chain, J = h_X = h_Z = 1")
print(f"{'N':>3} {'lambda_min':>14} {'lambda_max':>14} {'E(|0...0>)':>12}")
for n in range(2, 9):
    h = build_tlfim(TlfimParams(n))
    spectrum = extremal_eigenvalues(h)
    energy = expectation(zero_state(n), h)
    residual = relative_residual_energy(energy, spectrum)
    print(f"{n:>3} {spectrum.lambda_min:>14.8f} {spectrum.lambda_max:>14.8f} {residual:>12.6f}")

print()
print("For N = 2 the non-trivial eigenvalues are the roots of")
print("x^3 - x^2 - 3x + 1 = 0:", np.sort(np.roots([1, -1, -3, 1]).real))
print("so lambda_min ~ -1.4811 and lambda_max ~ 2.1700.")
