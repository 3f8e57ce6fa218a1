#!/usr/bin/env python3
"""Render plot.json descriptions left behind by experiment runs.

Optional helper: requires matplotlib, which is not a package dependency.
"""

import argparse
import csv
import json
import sys
from pathlib import Path


def load_columns(csv_path):
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    cols = {}
    for key in rows[0]:
        vals = [r[key] for r in rows]
        try:
            cols[key] = [float(v) for v in vals]
        except ValueError:
            cols[key] = vals
    return cols


def render(run_dir: Path, plt) -> Path:
    spec = json.loads((run_dir / "plot.json").read_text())
    cols = load_columns(run_dir / spec["csv"])
    fig, ax = plt.subplots(figsize=(6, 4))
    x, y = spec["x"], spec["y"]
    group = spec.get("group")
    if group:
        seen = []
        for g in cols[group]:
            if g not in seen:
                seen.append(g)
        for g in seen:
            idx = [i for i, v in enumerate(cols[group]) if v == g]
            ax.plot([cols[x][i] for i in idx], [cols[y][i] for i in idx],
                    marker="o", label=str(g))
        ax.legend()
    else:
        ax.plot(cols[x], cols[y], marker="o")
    if spec.get("xscale"):
        ax.set_xscale(spec["xscale"])
    if spec.get("yscale"):
        ax.set_yscale(spec["yscale"])
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(spec.get("title", run_dir.name))
    ax.grid(True, alpha=0.3)
    out = run_dir / "plot.png"
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="root output directory to scan")
    args = parser.parse_args()
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is not installed; skipping plots", file=sys.stderr)
        return 0

    count = 0
    for plot_json in sorted(Path(args.out).glob("*/plot.json")):
        png = render(plot_json.parent, plt)
        print(f"rendered {png}")
        count += 1
    if count == 0:
        print(f"no plot.json files under {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
