"""Command line interface.

Subcommands: simulate (write a synthetic run), reconstruct (full analysis of
a dataset file), budget (combine an efficiency factor table), report (merge
reconstruction and budget outputs into one document).

Defaults may be overridden by a key=value config file named by the
FOCKTOMO_CONFIG environment variable; explicit flags always win.

Exit codes: 0 success, 2 usage error, 3 invalid input or file format,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .budget import combine, default_factors, load_factors
from .errors import DatasetFormatError, NumericsError, ValidationError
from .pipeline import ReconstructionConfig, reconstruct_dataset
from .report import (
    budget_to_kv,
    build_report,
    merge_reports,
    parse_budget_kv,
    write_histogram_table,
    write_profile_table,
)
from .simulator import DetectorModel, RunSpec, generate_run, read_dataset, write_dataset

ENV_CONFIG = "FOCKTOMO_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICS = 4

# Keys the env config file may set, with their types and built-in defaults.
_CONFIG_SCHEMA: dict[str, tuple[type, object]] = {
    "eta": (float, 0.553),
    "n_vacuum": (int, 200000),
    "n_fock": (int, 12000),
    "seed": (int, 42),
    "scale": (float, 1.0),
    "offset": (float, 0.0),
    "dark_fraction": (float, 0.0),
    "bandwidth_scale": (float, 1.0),
    "fit_method": (str, "mle"),
    "grid_max": (float, 6.0),
    "grid_points": (int, 2401),
}


def _load_env_config() -> dict:
    path = os.environ.get(ENV_CONFIG)
    if not path:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path!r}: {exc}") from exc
    config: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_SCHEMA:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        caster = _CONFIG_SCHEMA[key][0]
        try:
            config[key] = caster(value.strip())
        except ValueError as exc:
            raise ValidationError(f"config line {lineno}: {exc}") from exc
    return config


def _resolve(args: argparse.Namespace, config: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _CONFIG_SCHEMA[key][1]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focktomo",
        description="Simulate and reconstruct phase-randomized homodyne runs "
                    "of a single-photon state.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic run and write it to a file")
    p_sim.add_argument("--eta", type=float, help="true efficiency of the signal block")
    p_sim.add_argument("--n-vacuum", type=int, dest="n_vacuum", help="vacuum block size")
    p_sim.add_argument("--n-fock", type=int, dest="n_fock", help="signal block size")
    p_sim.add_argument("--seed", type=int, help="run seed")
    p_sim.add_argument("--scale", type=float, help="detector scale")
    p_sim.add_argument("--offset", type=float, help="detector offset")
    p_sim.add_argument("--dark-fraction", type=float, dest="dark_fraction",
                       help="fraction of signal events replaced by vacuum draws")
    p_sim.add_argument("-o", "--output", required=True, help="dataset file to write")

    p_rec = sub.add_parser("reconstruct", help="run the full analysis on a dataset file")
    p_rec.add_argument("dataset", help="dataset file written by simulate")
    p_rec.add_argument("--bandwidth-scale", type=float, dest="bandwidth_scale",
                       help="multiplier on the rule-based smoothing bandwidth")
    p_rec.add_argument("--fit-method", choices=("mle", "hist"), dest="fit_method",
                       help="efficiency fit method")
    p_rec.add_argument("--grid-max", type=float, dest="grid_max",
                       help="half-width of the smoothing grid")
    p_rec.add_argument("--grid-points", type=int, dest="grid_points",
                       help="number of smoothing grid points (odd)")
    p_rec.add_argument("-o", "--output", required=True,
                       help="output directory for report and tables")

    p_bud = sub.add_parser("budget", help="combine an efficiency factor table")
    p_bud.add_argument("--factors", help="factor table file; omit for the built-in table")
    p_bud.add_argument("-o", "--output", help="write the result here as key=value text")

    p_rep = sub.add_parser("report", help="merge reconstruction and budget outputs")
    p_rep.add_argument("--reconstruction", required=True,
                       help="report.json from a reconstruct run")
    p_rep.add_argument("--budget", help="budget key=value file")
    p_rep.add_argument("-o", "--output", required=True,
                       help="output directory for the merged document")
    return parser


def cmd_simulate(args: argparse.Namespace, config: dict) -> int:
    spec = RunSpec(
        eta_true=_resolve(args, config, "eta"),
        n_vacuum=_resolve(args, config, "n_vacuum"),
        n_fock=_resolve(args, config, "n_fock"),
        detector=DetectorModel(
            scale=_resolve(args, config, "scale"),
            offset=_resolve(args, config, "offset"),
            dark_fraction=_resolve(args, config, "dark_fraction"),
        ),
        seed=_resolve(args, config, "seed"),
    )
    dataset = generate_run(spec)
    write_dataset(dataset, args.output)
    print(f"wrote {dataset.n_samples} samples "
          f"(vacuum {spec.n_vacuum}, signal {spec.n_fock}) to {args.output}")
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace, config: dict) -> int:
    dataset = read_dataset(args.dataset)
    rc = ReconstructionConfig(
        fit_method=_resolve(args, config, "fit_method"),
        bandwidth_scale=_resolve(args, config, "bandwidth_scale"),
        grid_max=_resolve(args, config, "grid_max"),
        grid_points=_resolve(args, config, "grid_points"),
    )
    summary = reconstruct_dataset(dataset, rc)
    report = build_report(summary, dataset, dataset_path=str(args.dataset))

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.txt").write_text(report.to_text())
    (outdir / "report.json").write_text(report.to_json())
    table_header = {
        "report_version": report.to_dict()["report_version"],
        "dataset": str(args.dataset),
        "bandwidth": summary.density.bandwidth,
        "eta_hat": summary.efficiency.eta_hat,
    }
    write_profile_table(summary.profile, outdir / "wigner_profile.txt", table_header)
    write_histogram_table(summary.histogram, outdir / "marginal_histogram.txt", table_header)

    rho11 = summary.diagonals[1]
    print(f"eta_hat={summary.efficiency.eta_hat:.4f} "
          f"+- {summary.efficiency.eta_stderr:.4f} ({summary.efficiency.method}), "
          f"rho_11={rho11.rho_nn:.4f} +- {rho11.sigma_nn:.4f}, "
          f"W(0) reconstructed={summary.wigner_origin_reconstructed:.4f}")
    print(f"reports written to {outdir}")
    return EXIT_OK


def cmd_budget(args: argparse.Namespace, config: dict) -> int:
    factors = load_factors(args.factors) if args.factors else default_factors()
    result = combine(factors)
    text = budget_to_kv(result, factors)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args: argparse.Namespace, config: dict) -> int:
    try:
        recon = json.loads(Path(args.reconstruction).read_text())
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"cannot parse {args.reconstruction!r}: {exc}") from exc
    budget = None
    if args.budget:
        budget = parse_budget_kv(Path(args.budget).read_text())
    merged = merge_reports(recon, budget)

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "merged_report.txt").write_text(merged.to_text())
    (outdir / "merged_report.json").write_text(merged.to_json())
    print(f"merged report written to {outdir}")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "budget": cmd_budget,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_env_config()
        return _COMMANDS[args.command](args, config)
    except (DatasetFormatError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValidationError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
