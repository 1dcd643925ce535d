"""Command-line front end.

Configuration precedence (lowest to highest): profile defaults, ``--config``
file, command-line flags; the ``VQA_LAB_WORKERS`` environment variable
overrides the worker count at run time.

The config file is plain text, one ``key = value`` per line, ``#`` comments;
list values are comma-separated (``n_values = 2, 4, 6``), booleans are
``true``/``false``.  Keys are the fields of ``ExperimentConfig``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .harness import (
    ExperimentConfig,
    RANK_TOL_BRACKET,
    THRESHOLDS_HEADER,
    _json_dumps,
    _write_table,
    compute_thresholds,
    desk_profile,
    export,
    load_grid,
    paper_profile,
    run_grid,
    scan_frame_potential,
    scan_gradient_variance,
    scan_loss_difference,
    scan_qfim_ranks,
    spectrum_table,
)

_PROFILES = {"desk": desk_profile, "paper": paper_profile, "custom": ExperimentConfig}

_LIST_FIELDS = {"n_values", "l_values"}
_BOOL_FIELDS = {"store_orderings"}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse the key = value config format into raw strings."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        raw[key] = value
    return raw


def coerce_overrides(raw: dict[str, str]) -> dict:
    """Convert raw config strings to the ExperimentConfig field types."""
    field_types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    out: dict = {}
    for key, value in raw.items():
        if key not in field_types:
            known = ", ".join(sorted(field_types))
            raise ValueError(f"unknown config key {key!r}; known keys: {known}")
        if key in _LIST_FIELDS:
            out[key] = [int(part.strip()) for part in value.split(",") if part.strip()]
        elif key in _BOOL_FIELDS:
            out[key] = value.strip().lower() in ("true", "1", "yes", "on")
        elif field_types[key] == "int":
            out[key] = int(value)
        elif field_types[key] == "float":
            out[key] = float(value)
        else:
            out[key] = value
    return out


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--profile", choices=sorted(_PROFILES), help="base settings profile")
    parser.add_argument("--seed", type=int, help="base seed for all derived streams")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument("--optimizer", choices=["ernft", "gd"], help="optimizer kind")
    parser.add_argument("--lr", type=float, help="gradient-descent learning rate")
    parser.add_argument("--n", type=int, help="restrict the scan to a single N")


def build_config(args: argparse.Namespace, saved: dict | None = None) -> ExperimentConfig:
    settings: dict = {}
    if saved is not None:
        settings.update(saved)
        profile_factory = ExperimentConfig
    else:
        profile_factory = _PROFILES[args.profile or "desk"]
        if args.profile:
            settings["profile"] = args.profile
    if args.config is not None:
        settings.update(coerce_overrides(parse_config_text(args.config.read_text())))
    if args.seed is not None:
        settings["base_seed"] = args.seed
    if args.out is not None:
        settings["out_dir"] = str(args.out)
    if args.workers is not None:
        settings["workers"] = args.workers
    if args.optimizer is not None:
        settings["optimizer"] = args.optimizer
    if args.lr is not None:
        settings["learning_rate"] = args.lr
    if args.n is not None:
        settings["n_values"] = [args.n]
    if saved is not None:
        return ExperimentConfig.from_dict(settings)
    return profile_factory(**settings)


def _cmd_grid(args: argparse.Namespace) -> int:
    saved = None
    if args.command == "resume":
        config_path = Path(args.out or "results") / "config.json"
        if config_path.exists() and args.config is None:
            saved = json.loads(config_path.read_text())
    config = build_config(args, saved=saved)
    dataset = run_grid(config, progress=True)
    paths = export(dataset, format=args.format)
    incomplete = dataset.incomplete_groups()
    print(f"grid complete: {len(dataset.complete_groups())} cell groups, "
          f"{len(dataset.histories)} runs")
    if incomplete:
        print(f"incomplete cell groups: {incomplete}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_thresholds(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.vth is not None:
        config = dataclasses.replace(config, v_th=args.vth)
    thresholds = compute_thresholds(config)
    out = Path(config.out_dir)
    rows = [[n, t.l_bp, t.l_op, t.r_max, t.v_th] for n, t in sorted(thresholds.items())]
    _write_table(out / "thresholds.csv", THRESHOLDS_HEADER, rows)
    # sensitivity of L_bp to the variance threshold, and the rank ceiling check
    sensitivity = {}
    for n, t in sorted(thresholds.items()):
        from .diagnostics import bp_threshold  # local import keeps the CLI thin

        curve = scan_gradient_variance(config, n)
        sensitivity[str(n)] = {
            "l_bp": t.l_bp,
            "l_bp_at_2x_vth": bp_threshold(curve, 2 * config.v_th),
            "l_op": t.l_op,
            "r_max": t.r_max,
            "rank_ceiling": 2 ** (n + 1) - 2,
            "saturated_at_ceiling": t.r_max == 2 ** (n + 1) - 2,
        }
    (out / "thresholds_sensitivity.json").write_text(_json_dumps(sensitivity), encoding="utf-8")
    for n, t in sorted(thresholds.items()):
        print(f"N={n}: L_bp={t.l_bp} L_op={t.l_op} r_max={t.r_max} v_th={t.v_th}")
    print(f"wrote {out / 'thresholds.csv'}")
    return 0


def _cmd_qfim_rank(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = []
    for n in config.n_values:
        for l, info in scan_qfim_ranks(config, n).items():
            rows.append([n, l, info["p"], info["rank"], info["rank_tol_lo"],
                         info["rank_tol_hi"], info["n_theta_samples"]])
            print(f"N={n} L={l}: rank={info['rank']} (p={info['p']})")
    out = Path(config.out_dir)
    lo, hi = RANK_TOL_BRACKET
    header = ["N", "L", "p", "rank", f"rank_reltol_{lo:g}", f"rank_reltol_{hi:g}", "n_theta_samples"]
    _write_table(out / "qfim_rank.csv", header, rows)
    print(f"wrote {out / 'qfim_rank.csv'}")
    return 0


def _cmd_grad_variance(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = []
    for n in config.n_values:
        curve = scan_gradient_variance(config, n)
        for l, var, err in zip(curve.axis, curve.variance, curve.std_error):
            rows.append([n, l, float(var), float(err), curve.n_samples])
            print(f"N={n} L={l}: Var={var:.6e} +- {err:.1e}")
    out = Path(config.out_dir)
    _write_table(out / "grad_variance.csv", ["N", "L", "variance", "std_error", "n_samples"], rows)
    print(f"wrote {out / 'grad_variance.csv'}")
    return 0


def _cmd_loss_diff_variance(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = []
    for n in config.n_values:
        curve = scan_loss_difference(config, n)
        for l, var, err in zip(curve.axis, curve.variance, curve.std_error):
            rows.append([n, l, float(var), float(err), curve.n_samples])
            print(f"N={n} L={l}: Var={var:.6e} +- {err:.1e}")
    out = Path(config.out_dir)
    _write_table(
        out / "loss_diff_variance.csv", ["N", "L", "variance", "std_error", "n_pairs"], rows
    )
    print(f"wrote {out / 'loss_diff_variance.csv'}")
    return 0


def _cmd_frame_potential(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = []
    for n in config.n_values:
        for record in scan_frame_potential(config, n):
            rows.append([record["N"], record["L"], record["f2"], record["f2_normalized"],
                         record["std_error"], record["f_haar"], record["n_a"], record["n_b"]])
            print(f"N={record['N']} L={record['L']}: normalized F2 = {record['f2_normalized']:.4e}")
    out = Path(config.out_dir)
    header = ["N", "L", "f2", "f2_normalized", "std_error", "f_haar", "n_a", "n_b"]
    _write_table(out / "frame_potential.csv", header, rows)
    print(f"wrote {out / 'frame_potential.csv'}")
    return 0


def _cmd_exact_diag(args: argparse.Namespace) -> int:
    config = build_config(args)
    rows = []
    for record in spectrum_table(config):
        rows.append([record["N"], record["J"], record["h_X"], record["h_Z"],
                     record["lambda_min"], record["lambda_max"]])
        print(f"N={record['N']}: lambda_min={record['lambda_min']:.10f} "
              f"lambda_max={record['lambda_max']:.10f}")
    out = Path(config.out_dir)
    _write_table(out / "spectrum.csv", ["N", "J", "h_X", "h_Z", "lambda_min", "lambda_max"], rows)
    print(f"wrote {out / 'spectrum.csv'}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    out = Path(args.out or "results")
    config_path = out / "config.json"
    if args.config is not None:
        config = build_config(args)
    elif config_path.exists():
        saved = json.loads(config_path.read_text())
        saved["out_dir"] = str(out)
        config = ExperimentConfig.from_dict(saved)
    else:
        print(f"error: no {config_path} found and no --config given", file=sys.stderr)
        return 2
    dataset = load_grid(config)
    for path in export(dataset, format=args.format):
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="vqa-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    handlers = {}
    for name, handler, description in [
        ("grid", _cmd_grid, "run the (N, L, run) optimization sweep and export tables"),
        ("resume", _cmd_grid, "resume an interrupted sweep (completed cells are skipped)"),
        ("thresholds", _cmd_thresholds, "compute BP/OP threshold layer counts per N"),
        ("qfim-rank", _cmd_qfim_rank, "max QFIM rank over the L grid"),
        ("grad-variance", _cmd_grad_variance, "Var(dE/dtheta_0) over the L grid"),
        ("loss-diff-variance", _cmd_loss_diff_variance, "Var(|E_A - E_B|) over the L grid"),
        ("frame-potential", _cmd_frame_potential, "second-order frame potential vs Haar"),
        ("exact-diag", _cmd_exact_diag, "dump exact TLFIM extremal eigenvalues"),
        ("export", _cmd_export, "re-export tables from an existing output directory"),
    ]:
        sp = sub.add_parser(name, help=description)
        _add_common_flags(sp)
        if name in ("grid", "resume", "export"):
            sp.add_argument("--format", choices=["csv", "json"], default="csv")
        if name == "thresholds":
            sp.add_argument("--vth", type=float, help="normalized-variance threshold override")
        handlers[name] = handler

    args = parser.parse_args(argv)
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
