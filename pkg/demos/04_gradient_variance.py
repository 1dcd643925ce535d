"""Barren-plateau diagnostics: gradient variance and loss-difference variance.

Var(dE/dtheta_0) over uniform random parameters decays exponentially with the
qubit count once the circuit is deep enough, which is the barren-plateau
signature.  The L-scan at fixed N converges to a floor; the first L within
v_th = 5% of that floor is the BP threshold L_bp.
"""

import numpy as np

from vqa_lab import (
    TlfimParams,
    VarianceCurve,
    bp_threshold,
    build_hea,
    build_tlfim,
    extremal_eigenvalues,
    gradient_variance,
    loss_difference_variance,
)

SAMPLES = 1000

print(f"Var(d0 E) vs L at N = 4   ({SAMPLES} samples per point)")
h = build_tlfim(TlfimParams(4))
spectrum = extremal_eigenvalues(h)
l_grid = [2, 3, 4, 5, 7, 9, 11]
variances = []
for l in l_grid:
    var, err = gradient_variance(
        build_hea(4, l), h, spectrum, 0, SAMPLES, np.random.default_rng(40 + l)
    )
    variances.append(var)
    print(f"  L={l:>2}: {var:.4e} +- {err:.1e}")
curve = VarianceCurve("L", l_grid, np.array(variances), np.zeros(len(l_grid)), SAMPLES)
print(f"  -> L_bp(v_th = 0.05) = {bp_threshold(curve, 0.05)}")

print()
print(f"Var(d0 E) and Var(|E_A - E_B|) vs N at L = 12")
for n in (2, 3, 4, 5):
    h = build_tlfim(TlfimParams(n))
    spectrum = extremal_eigenvalues(h)
    circuit = build_hea(n, 12)
    grad_var, _ = gradient_variance(circuit, h, spectrum, 0, SAMPLES, np.random.default_rng(n))
    diff_var, _ = loss_difference_variance(circuit, h, spectrum, SAMPLES, np.random.default_rng(n))
    print(f"  N={n}: grad {grad_var:.4e}   loss-diff {diff_var:.4e}")
print("Both shrink by roughly a constant factor per added qubit.")
