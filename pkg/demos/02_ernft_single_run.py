"""One ERNFT optimization run, step by step.

ERNFT minimizes one rotation parameter at a time in closed form (the cost is
an exact sinusoid along each axis) and shuffles the visiting order every
epoch.  Here a 4-qubit, 5-layer ansatz (mu = 40/30 > 1, overparametrized)
converges exponentially; a 3-layer one (mu = 0.8) gets stuck.
"""

import numpy as np

from vqa_lab import TlfimParams, build_hea, build_tlfim, extremal_eigenvalues, mu_value, run_ernft

h = build_tlfim(TlfimParams(4))
spectrum = extremal_eigenvalues(h)

for n_layers in (5, 3):
    circuit = build_hea(4, n_layers)
    mu = mu_value(4, n_layers)
    theta0 = np.random.default_rng(1).uniform(-np.pi, np.pi, circuit.n_params)
    history = run_ernft(circuit, h, spectrum, theta0, n_epochs=150, seed=7)
    print(f"N=4, L={n_layers}  (p = {circuit.n_params}, mu = {mu:.2f})")
    for t in (0, 10, 50, 100, 150):
        print(f"  E(t={t:>3}) = {history.energies[t]:.3e}")
    print(f"  cost evaluations: {history.n_evaluations}"
          f"  (= 1 + 2 * p * epochs = {1 + 2 * circuit.n_params * 150})")
    print()

print("The overparametrized run reaches the ground state to machine precision;")
print("the underparametrized one is trapped orders of magnitude above it.")
