#!/usr/bin/env python3
"""Plot mse_unweighted over time from one or more emitted metrics CSVs."""
import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    ts, mse = [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            ts.append(int(row["t"]))
            mse.append(float(row["mse_unweighted"]))
    return ts, mse


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csvs", nargs="+", help="mean.csv / seed_<n>.csv files")
    ap.add_argument("--out", default="mse.png", help="output image path")
    ap.add_argument("--logy", action="store_true", help="log-scale the error axis")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for path in args.csvs:
        ts, mse = load(path)
        ax.plot(ts, mse, label=Path(path).parent.name + "/" + Path(path).name, lw=1.2)
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel("tick")
    ax.set_ylabel("MSE (unweighted)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
