#!/usr/bin/env python3
"""Render belief/uncertainty band plots from an exported series CSV.

Expects the CSV written by `slgraph infer --plot-export` (columns t, node,
b, d, u, P) and writes one PNG per node: the belief line with a shaded band
of height u above it.  Requires matplotlib (install the `plots` extra).
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="series.csv written by infer --plot-export")
    parser.add_argument("--out", default="plots", help="directory for the PNGs")
    args = parser.parse_args()

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = defaultdict(list)
    with open(args.csv, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            series[row["node"]].append(
                (float(row["t"]), float(row["b"]), float(row["u"]))
            )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for node, points in sorted(series.items()):
        points.sort()
        ts = [p[0] for p in points]
        beliefs = [p[1] for p in points]
        uppers = [p[1] + p[2] for p in points]
        fig, ax = plt.subplots(figsize=(8, 3))
        ax.plot(ts, beliefs, linewidth=1.2, label="belief")
        ax.fill_between(ts, beliefs, uppers, alpha=0.3, label="uncertainty")
        ax.set_ylim(0.0, 1.0)
        ax.set_xlabel("t")
        ax.set_title(node)
        ax.legend(loc="lower left")
        fig.tight_layout()
        fig.savefig(out_dir / f"{node}.png", dpi=120)
        plt.close(fig)
        print(out_dir / f"{node}.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
