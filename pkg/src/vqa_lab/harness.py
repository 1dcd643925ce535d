"""Seeded experiment grid over (N, L, optimizer, run) with crash-safe
persistence and deterministic CSV/JSON export.

A grid cell group is one (N, L) pair; its runs execute in lockstep through the
batched optimizer drivers and land in one JSON shard, written atomically.  All
randomness derives from ``mix64(base_seed, purpose, N, L, run)`` with disjoint
purpose tags ("init", "ernft", "gd", "grad", "qfim", ...), so output bytes
depend only on the configuration, never on worker count or scheduling.
Downstream data is always reparsed from the shard JSON, which makes an
interrupted-and-resumed sweep byte-identical to an uninterrupted one.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import build_hea
from .diagnostics import (
    Thresholds,
    VarianceCurve,
    bp_threshold,
    frame_potential_2,
    gradient_variance,
    loss_difference_variance,
    max_qfim_rank,
    numeric_rank,
    op_threshold,
    qfim,
    sample_thetas,
)
from .hamiltonian import TlfimParams, build_tlfim, extremal_eigenvalues
from .optimize import RunHistory, run_ernft_batch, run_gd_batch
from .seeding import mix64

WORKERS_ENV_VAR = "VQA_LAB_WORKERS"

# rel_tol bracket reported alongside every QFIM rank (sensitivity check)
RANK_TOL_BRACKET = (1e-10, 1e-6)


def paper_l_schedule() -> list[int]:
    """L = 3..51 in steps of 2, then 61..201 in steps of 10."""
    return list(range(3, 52, 2)) + list(range(61, 202, 10))


@dataclass
class ExperimentConfig:
    n_values: list[int] = field(default_factory=lambda: [4, 6, 8, 10])
    l_values: list[int] = field(default_factory=paper_l_schedule)
    n_epochs: int = 1000
    n_runs: int = 30
    optimizer: str = "ernft"
    learning_rate: float = 0.05
    ordering_mode: str = "epoch"
    coupling: float = 1.0
    field_x: float = 1.0
    field_z: float = 1.0
    entangler: str = "circular"
    base_seed: int = 20240
    grad_samples: int = 10_000
    pair_samples: int = 10_000
    frame_samples: int = 10_000
    qfim_theta_samples: int = 5
    v_th: float = 0.05
    rank_rel_tol: float = 1e-8
    out_dir: str = "results"
    workers: int = 1
    store_orderings: bool = True
    profile: str = "custom"

    def __post_init__(self) -> None:
        if not self.n_values or not self.l_values:
            raise ValueError("n_values and l_values must be non-empty")
        if min(self.n_values) < 2:
            raise ValueError("every N must be >= 2")
        if min(self.l_values) < 2:
            raise ValueError("every L must be >= 2")
        if list(self.l_values) != sorted(set(self.l_values)):
            raise ValueError("l_values must be strictly increasing")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ValueError("n_values must be strictly increasing")
        if self.n_epochs < 1 or self.n_runs < 1:
            raise ValueError("n_epochs and n_runs must be >= 1")
        if self.optimizer not in ("ernft", "gd"):
            raise ValueError(f"optimizer must be 'ernft' or 'gd', got {self.optimizer!r}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    def tlfim_params(self, n: int) -> TlfimParams:
        return TlfimParams(n_sites=n, coupling=self.coupling, field_x=self.field_x, field_z=self.field_z)

    def cell_fingerprint(self, n: int, l: int) -> str:
        """Hash of everything that determines one cell group's numbers."""
        payload = {
            "n": n,
            "l": l,
            "n_epochs": self.n_epochs,
            "n_runs": self.n_runs,
            "optimizer": self.optimizer,
            "learning_rate": self.learning_rate,
            "ordering_mode": self.ordering_mode,
            "coupling": self.coupling,
            "field_x": self.field_x,
            "field_z": self.field_z,
            "entangler": self.entangler,
            "base_seed": self.base_seed,
            "store_orderings": self.store_orderings,
            "version": 1,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def desk_profile(**overrides) -> ExperimentConfig:
    """Reduced grid that finishes on a workstation (N <= 6, 300 epochs, 10 runs)."""
    settings = dict(
        n_values=[2, 4, 6],
        l_values=[2, 3, 4, 5, 7, 9, 11, 13, 15, 17, 19, 21],
        n_epochs=300,
        n_runs=10,
        grad_samples=2000,
        pair_samples=2000,
        frame_samples=2000,
        profile="desk",
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


def paper_profile(**overrides) -> ExperimentConfig:
    """Full published grid; expressible but long-running at larger N."""
    settings = dict(profile="paper", store_orderings=False)
    settings.update(overrides)
    return ExperimentConfig(**settings)


def mu_value(n: int, l: int) -> float:
    """Parameter count over the rank ceiling: 2NL / (2^(N+1) - 2)."""
    return 2 * n * l / (2 ** (n + 1) - 2)


# ---------------------------------------------------------------------------
# grid execution and shard persistence


@dataclass
class GridDataset:
    config: ExperimentConfig
    histories: dict[tuple[int, int, int], RunHistory]
    thresholds: dict[int, Thresholds] = field(default_factory=dict)

    def complete_groups(self) -> list[tuple[int, int]]:
        out = []
        for n in self.config.n_values:
            for l in self.config.l_values:
                runs = [r for (gn, gl, r) in self.histories if (gn, gl) == (n, l)]
                if len(runs) == self.config.n_runs:
                    out.append((n, l))
        return out

    def incomplete_groups(self) -> list[tuple[int, int]]:
        complete = set(self.complete_groups())
        return [
            (n, l)
            for n in self.config.n_values
            for l in self.config.l_values
            if (n, l) not in complete
        ]


def _shard_path(out_dir: Path, n: int, l: int) -> Path:
    return out_dir / "cells" / f"N{n:02d}_L{l:03d}.json"


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _json_dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=1)


def _history_to_record(history: RunHistory, run: int, init_seed: int) -> dict:
    record = {
        "run": run,
        "seed": history.seed,
        "init_seed": init_seed,
        "optimizer": history.optimizer,
        "hyperparameters": history.hyperparameters,
        "energies": [float(e) for e in history.energies],
        "final_theta": [float(x) for x in history.final_theta],
        "n_evaluations": history.n_evaluations,
    }
    if history.orderings is not None:
        record["orderings"] = [[int(k) for k in o] for o in history.orderings]
    return record


def _record_to_history(record: dict, n: int, l: int) -> RunHistory:
    return RunHistory(
        n_qubits=n,
        n_layers=l,
        seed=record["seed"],
        optimizer=record["optimizer"],
        hyperparameters=record["hyperparameters"],
        energies=np.array(record["energies"], dtype=np.float64),
        final_theta=np.array(record["final_theta"], dtype=np.float64),
        n_evaluations=record["n_evaluations"],
        orderings=[np.array(o, dtype=np.int64) for o in record["orderings"]]
        if "orderings" in record
        else None,
    )


def run_cell_group(config: ExperimentConfig, n: int, l: int) -> dict:
    """Compute every run of one (N, L) cell group; returns the shard payload."""
    circuit = build_hea(n, l, entangler=config.entangler)
    h = build_tlfim(config.tlfim_params(n))
    spectrum = extremal_eigenvalues(h)
    p = circuit.n_params
    init_seeds = [mix64(config.base_seed, "init", n, l, run) for run in range(config.n_runs)]
    theta0s = np.stack(
        [np.random.default_rng(s).uniform(-np.pi, np.pi, p) for s in init_seeds]
    )
    if config.optimizer == "ernft":
        opt_seeds = [mix64(config.base_seed, "ernft", n, l, run) for run in range(config.n_runs)]
        histories = run_ernft_batch(
            circuit,
            h,
            spectrum,
            theta0s,
            config.n_epochs,
            opt_seeds,
            ordering_mode=config.ordering_mode,
            record_orderings=config.store_orderings,
        )
    else:
        opt_seeds = [mix64(config.base_seed, "gd", n, l, run) for run in range(config.n_runs)]
        histories = run_gd_batch(
            circuit, h, spectrum, theta0s, config.n_epochs, config.learning_rate, opt_seeds
        )
    return {
        "fingerprint": config.cell_fingerprint(n, l),
        "n_qubits": n,
        "n_layers": l,
        "lambda_min": spectrum.lambda_min,
        "lambda_max": spectrum.lambda_max,
        "runs": [
            _history_to_record(hist, run, init_seeds[run]) for run, hist in enumerate(histories)
        ],
    }


def _compute_and_write_shard(config_dict: dict, n: int, l: int) -> str:
    """Worker entry point: compute one group and persist its shard."""
    config = ExperimentConfig.from_dict(config_dict)
    payload = run_cell_group(config, n, l)
    path = _shard_path(Path(config.out_dir), n, l)
    _atomic_write_text(path, _json_dumps(payload))
    return str(path)


def effective_workers(config: ExperimentConfig) -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        return max(1, int(env))
    return max(1, config.workers)


def run_grid(config: ExperimentConfig, progress: bool = False) -> GridDataset:
    """Run (or resume) the full sweep; every completed cell is skipped.

    Data is always reloaded from the shard JSON before use, so a resumed sweep
    is byte-identical to an uninterrupted one.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out_dir / "config.json", _json_dumps(config.to_dict()))

    pending: list[tuple[int, int]] = []
    for n in config.n_values:
        for l in config.l_values:
            path = _shard_path(out_dir, n, l)
            if path.exists():
                try:
                    payload = json.loads(path.read_text(encoding="utf-8"))
                except json.JSONDecodeError as err:
                    raise OSError(f"corrupt shard for cell (N={n}, L={l}) at {path}: {err}") from err
                if payload.get("fingerprint") != config.cell_fingerprint(n, l):
                    raise ValueError(
                        f"shard {path} was produced under a different configuration; "
                        f"remove it (or the whole output directory) to recompute cell (N={n}, L={l})"
                    )
                continue
            pending.append((n, l))

    n_workers = effective_workers(config)
    if pending:
        if n_workers == 1:
            for n, l in pending:
                _compute_and_write_shard(config.to_dict(), n, l)
                if progress:
                    print(f"[grid] completed cell group N={n} L={l}")
        else:
            with ProcessPoolExecutor(max_workers=n_workers) as pool:
                futures = {
                    pool.submit(_compute_and_write_shard, config.to_dict(), n, l): (n, l)
                    for n, l in pending
                }
                for future, (n, l) in futures.items():
                    try:
                        future.result()
                    except Exception as err:
                        raise RuntimeError(f"cell group (N={n}, L={l}) failed: {err}") from err
                    if progress:
                        print(f"[grid] completed cell group N={n} L={l}")
    return load_grid(config)


def load_grid(config: ExperimentConfig) -> GridDataset:
    """Build a dataset from the shards present under ``config.out_dir``."""
    out_dir = Path(config.out_dir)
    histories: dict[tuple[int, int, int], RunHistory] = {}
    for n in config.n_values:
        for l in config.l_values:
            path = _shard_path(out_dir, n, l)
            if not path.exists():
                continue
            payload = json.loads(path.read_text(encoding="utf-8"))
            for record in payload["runs"]:
                histories[(n, l, record["run"])] = _record_to_history(record, n, l)
    return GridDataset(config=config, histories=histories)


# ---------------------------------------------------------------------------
# aggregation and diagnostics scans


def aggregate(dataset: GridDataset) -> list[dict]:
    """Mean/std of E(t) over runs for every complete (N, L); rows sorted."""
    config = dataset.config
    rows: list[dict] = []
    for n, l in dataset.complete_groups():
        stack = np.stack(
            [dataset.histories[(n, l, r)].energies for r in range(config.n_runs)]
        )
        mean = stack.mean(axis=0)
        std = stack.std(axis=0, ddof=1) if config.n_runs > 1 else np.full(stack.shape[1], np.nan)
        mu = mu_value(n, l)
        for t in range(stack.shape[1]):
            rows.append(
                {
                    "N": n,
                    "L": l,
                    "t": t,
                    "mean_E": float(mean[t]),
                    "std_E": float(std[t]),
                    "mu": mu,
                    "n_runs": config.n_runs,
                }
            )
    return rows


def scan_gradient_variance(config: ExperimentConfig, n: int) -> VarianceCurve:
    """Var(dE/dtheta_0) over the configured L grid at fixed N."""
    h = build_tlfim(config.tlfim_params(n))
    spectrum = extremal_eigenvalues(h)
    variances, errors = [], []
    for l in config.l_values:
        circuit = build_hea(n, l, entangler=config.entangler)
        rng = np.random.default_rng(mix64(config.base_seed, "grad", n, l))
        var, err = gradient_variance(
            circuit, h, spectrum, k=0, n_samples=config.grad_samples, rng=rng
        )
        variances.append(var)
        errors.append(err)
    return VarianceCurve(
        axis_name="L",
        axis=list(config.l_values),
        variance=np.array(variances),
        std_error=np.array(errors),
        n_samples=config.grad_samples,
    )


def scan_qfim_ranks(config: ExperimentConfig, n: int) -> dict[int, dict]:
    """Max QFIM rank per L, with the rank at the bracket tolerances alongside."""
    out: dict[int, dict] = {}
    lo, hi = RANK_TOL_BRACKET
    for l in config.l_values:
        circuit = build_hea(n, l, entangler=config.entangler)
        rng = np.random.default_rng(mix64(config.base_seed, "qfim", n, l))
        thetas = sample_thetas(rng, config.qfim_theta_samples, circuit.n_params)
        matrices = [qfim(circuit, th).matrix for th in thetas]
        out[l] = {
            "p": circuit.n_params,
            "rank": max(numeric_rank(m, config.rank_rel_tol) for m in matrices),
            "rank_tol_lo": max(numeric_rank(m, lo) for m in matrices),
            "rank_tol_hi": max(numeric_rank(m, hi) for m in matrices),
            "n_theta_samples": config.qfim_theta_samples,
        }
    return out


def compute_thresholds(config: ExperimentConfig) -> dict[int, Thresholds]:
    """BP and OP threshold layer counts per N over the configured L grid.

    The saturation plateau r_max is the largest observed rank, cross-checked
    against the controllability ceiling 2^(N+1) - 2 (a mismatch is reported by
    the caller, not raised).
    """
    out: dict[int, Thresholds] = {}
    for n in config.n_values:
        curve = scan_gradient_variance(config, n)
        ranks = {l: info["rank"] for l, info in scan_qfim_ranks(config, n).items()}
        r_max = max(ranks.values())
        out[n] = Thresholds(
            n_qubits=n,
            l_bp=bp_threshold(curve, config.v_th),
            l_op=op_threshold(ranks, r_max),
            r_max=r_max,
            v_th=config.v_th,
        )
    return out


def scan_loss_difference(config: ExperimentConfig, n: int) -> VarianceCurve:
    h = build_tlfim(config.tlfim_params(n))
    spectrum = extremal_eigenvalues(h)
    variances, errors = [], []
    for l in config.l_values:
        circuit = build_hea(n, l, entangler=config.entangler)
        rng = np.random.default_rng(mix64(config.base_seed, "lossdiff", n, l))
        var, err = loss_difference_variance(
            circuit, h, spectrum, n_pairs=config.pair_samples, rng=rng
        )
        variances.append(var)
        errors.append(err)
    return VarianceCurve(
        axis_name="L",
        axis=list(config.l_values),
        variance=np.array(variances),
        std_error=np.array(errors),
        n_samples=config.pair_samples,
    )


def scan_frame_potential(config: ExperimentConfig, n: int) -> list[dict]:
    rows = []
    for l in config.l_values:
        circuit = build_hea(n, l, entangler=config.entangler)
        rng = np.random.default_rng(mix64(config.base_seed, "frame", n, l))
        fp = frame_potential_2(
            circuit, n_a=config.frame_samples, n_b=config.frame_samples, rng=rng
        )
        rows.append(
            {
                "N": n,
                "L": l,
                "f2": fp.f2,
                "f2_normalized": fp.normalized,
                "std_error": fp.std_error,
                "f_haar": fp.f_haar,
                "n_a": fp.n_a,
                "n_b": fp.n_b,
            }
        )
    return rows


def spectrum_table(config: ExperimentConfig) -> list[dict]:
    rows = []
    for n in config.n_values:
        spec = extremal_eigenvalues(build_tlfim(config.tlfim_params(n)))
        rows.append(
            {
                "N": n,
                "J": config.coupling,
                "h_X": config.field_x,
                "h_Z": config.field_z,
                "lambda_min": spec.lambda_min,
                "lambda_max": spec.lambda_max,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# export


def _format_value(value) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def _write_table(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_format_value(v) for v in row) for row in rows)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _write_json_table(path: Path, header: list[str], rows: list[list]) -> None:
    records = [dict(zip(header, row)) for row in rows]
    _atomic_write_text(path, _json_dumps(records))


HEATMAP_HEADER = ["N", "L", "t", "mean_E", "std_E", "mu", "n_runs"]
RUNS_HEADER = ["N", "L", "run", "seed", "t", "E"]
THRESHOLDS_HEADER = ["N", "L_bp", "L_op", "r_max", "v_th"]


def export(dataset: GridDataset, format: str = "csv", out_dir: str | Path | None = None) -> list[Path]:
    """Write heatmap/runs/thresholds tables plus manifest.json.

    Incomplete cell groups are excluded from the aggregates and listed in the
    manifest instead of failing the export.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    config = dataset.config
    out = Path(out_dir) if out_dir is not None else Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    writer = _write_table if format == "csv" else _write_json_table
    suffix = ".csv" if format == "csv" else ".json"

    heatmap_rows = [
        [r["N"], r["L"], r["t"], r["mean_E"], r["std_E"], r["mu"], r["n_runs"]]
        for r in aggregate(dataset)
    ]
    run_rows = []
    for n, l in dataset.complete_groups():
        for run in range(config.n_runs):
            history = dataset.histories[(n, l, run)]
            for t, e_value in enumerate(history.energies):
                run_rows.append([n, l, run, history.seed, t, float(e_value)])
    threshold_rows = [
        [
            n,
            th.l_bp,
            th.l_op,
            th.r_max,
            th.v_th,
        ]
        for n, th in sorted(dataset.thresholds.items())
    ]

    paths = []
    for name, header, rows in (
        ("heatmap", HEATMAP_HEADER, heatmap_rows),
        ("runs", RUNS_HEADER, run_rows),
        ("thresholds", THRESHOLDS_HEADER, threshold_rows),
    ):
        path = out / f"{name}{suffix}"
        writer(path, header, rows)
        paths.append(path)

    manifest = {
        "tool": "vqa-lab",
        "version": __version__,
        "config": config.to_dict(),
        "format": format,
        "files": [p.name for p in paths],
        "incomplete_cells": [list(c) for c in dataset.incomplete_groups()],
        "seed_derivation": "mix64(base_seed, purpose, N, L, run); purposes: "
        "init, ernft, gd, grad, qfim, lossdiff, frame",
    }
    manifest_path = out / "manifest.json"
    _atomic_write_text(manifest_path, _json_dumps(manifest))
    paths.append(manifest_path)
    return paths
