"""QFIM rank growth and the overparametrization threshold.

The quantum Fisher information matrix of the ansatz family has rank at most
2^(N+1) - 2 (the real dimension of the pure-state manifold).  As layers are
added the rank first grows like the parameter count p = 2NL, then saturates;
the first L at the plateau is the overparametrization threshold L_op.
"""

import numpy as np

from vqa_lab import build_hea, max_qfim_rank, mu_value, op_threshold

for n in (2, 3, 4):
    ceiling = 2 ** (n + 1) - 2
    print(f"N = {n}  (rank ceiling 2^(N+1) - 2 = {ceiling})")
    print(f"  {'L':>3} {'p':>5} {'mu':>6} {'rank':>5}")
    ranks = {}
    for l in range(2, 8):
        circuit = build_hea(n, l)
        rank = max_qfim_rank(circuit, n_theta_samples=5, rng=np.random.default_rng(10 * n + l))
        ranks[l] = rank
        print(f"  {l:>3} {circuit.n_params:>5} {mu_value(n, l):>6.2f} {rank:>5}")
    print(f"  -> L_op = {op_threshold(ranks, ceiling)}")
    print()

print("The rank follows min(p, ceiling): saturation coincides with mu = 1.")
