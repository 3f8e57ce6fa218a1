"""Deterministic CSV, metadata sidecar, and plot-description emission.

Floats are written with repr (shortest round-trip form), newlines are always
LF, and sidecars carry no timestamps, so identical (config, seed) runs emit
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if bool(value) else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    text = str(value)
    if "," in text or "\n" in text:
        raise ValueError("cell values must not contain commas or newlines")
    return text


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sidecar(
    outdir, experiment: str, config_hash: str, seed: int, csv_files: Sequence[str]
) -> str:
    """meta.json capturing what produced the CSVs; no timestamps by design."""
    from . import __version__

    payload = {
        "experiment": experiment,
        "config_sha256_16": config_hash,
        "seed": seed,
        "artifact_version": __version__,
        "csv_files": sorted(csv_files),
    }
    path = Path(outdir) / "meta.json"
    write_json(path, payload)
    return str(path)


def write_plot_description(outdir, payload: dict) -> str:
    """Declarative plot spec (axes, series, labels); rendering happens elsewhere."""
    path = Path(outdir) / "plot.json"
    write_json(path, payload)
    return str(path)
