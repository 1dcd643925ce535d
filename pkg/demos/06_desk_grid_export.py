"""A miniature experiment sweep end to end: grid, thresholds, export.

The harness runs every (N, L, run) cell from seeds derived off one base seed,
persists each (N, L) group to a JSON shard (so an interrupted sweep resumes
where it stopped), aggregates the runs, and exports CSV tables.  The same
tables feed the plot frontend.  This miniature config finishes in well under
a minute; the shipped `desk` and `paper` profiles are the same machinery at
larger settings.
"""

import tempfile
from pathlib import Path

from vqa_lab import ExperimentConfig, aggregate, compute_thresholds, export, run_grid

out_dir = Path(tempfile.mkdtemp(prefix="vqa_lab_demo_"))
config = ExperimentConfig(
    n_values=[2, 3],
    l_values=[2, 3, 4, 5],
    n_epochs=60,
    n_runs=5,
    base_seed=20240,
    grad_samples=400,
    pair_samples=400,
    frame_samples=400,
    qfim_theta_samples=3,
    out_dir=str(out_dir),
)

print(f"running {len(config.n_values) * len(config.l_values)} cell groups "
      f"x {config.n_runs} runs x {config.n_epochs} epochs ...")
dataset = run_grid(config)
dataset.thresholds = compute_thresholds(config)
paths = export(dataset)

print("\nmean final E over runs:")
rows = aggregate(dataset)
final = {(r["N"], r["L"]): r["mean_E"] for r in rows if r["t"] == config.n_epochs}
for n in config.n_values:
    line = "  ".join(f"L={l}: {final[(n, l)]:.2e}" for l in config.l_values)
    print(f"  N={n}:  {line}")

print("\nthresholds:")
for n, t in sorted(dataset.thresholds.items()):
    print(f"  N={n}: L_bp={t.l_bp}  L_op={t.l_op}  r_max={t.r_max} "
          f"(ceiling {2 ** (n + 1) - 2})")

print("\nexported files:")
for path in paths:
    print(f"  {path}")
print("\nfirst heatmap.csv lines:")
for line in (out_dir / "heatmap.csv").read_text().splitlines()[:4]:
    print(f"  {line}")
