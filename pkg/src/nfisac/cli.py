"""Command line front end.

Exit codes: 0 success, 2 configuration error (unknown experiment, missing or
malformed sections, unreadable file), 3 runtime failure inside an experiment.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .config import EXPERIMENT_SECTIONS, ConfigError, load_config
from .experiments import list_experiment_names, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfisac",
        description="Near-field wideband ISAC simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and write CSV artifacts")
    run_p.add_argument("--config", required=True, help="YAML scenario file")
    run_p.add_argument("--out", required=True, help="output directory (created if missing)")

    val_p = sub.add_parser("validate", help="check a scenario file without running it")
    val_p.add_argument("--config", required=True, help="YAML scenario file")

    sub.add_parser("list-experiments", help="print known experiment names")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(Path(args.config))
    except ConfigError as exc:
        print(str(exc.report), file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(cfg, Path(args.out))
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return EXIT_RUNTIME
    print(f"experiment: {result.name}")
    print(f"output dir: {args.out}")
    for name in result.csv_files:
        print(f"wrote {name}")
    print(json.dumps(result.summary, indent=2, sort_keys=True, default=str))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(Path(args.config))
    except ConfigError as exc:
        print(str(exc.report), file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: experiment '{cfg.name}' (seed {cfg.seed})")
    return EXIT_OK


def _cmd_list(_args: argparse.Namespace) -> int:
    for name in list_experiment_names():
        sections = ", ".join(sorted(EXPERIMENT_SECTIONS[name]["required"]))
        print(f"{name}  (requires: {sections})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "list-experiments": _cmd_list,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
