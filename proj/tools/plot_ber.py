#!/usr/bin/env python3
"""Plot BER curves from uwbsim CSV output.

Usage: plot_ber.py results.csv [more.csv ...] [-o out.png]

Simulated curves are drawn solid, theory bounds dashed; one curve per
(source, detector, M) group.
"""

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="CSV files from uwbsim sweep/theory")
    ap.add_argument("-o", "--out", default="ber.png", help="output image")
    ap.add_argument("--title", default="DSTBC-UWB BER")
    args = ap.parse_args()

    frames = [pd.read_csv(path) for path in args.csv]
    data = pd.concat(frames, ignore_index=True)
    data = data[data["ber"] > 0]

    fig, ax = plt.subplots(figsize=(7, 5))
    for (source, detector, m), group in data.groupby(["source", "detector", "M"]):
        group = group.sort_values("ebn0_db")
        style = "--" if source == "theory" else "-"
        marker = "" if source == "theory" else "o"
        label = f"{detector} M={m}" + (" (bound)" if source == "theory" else "")
        ax.semilogy(group["ebn0_db"], group["ber"], style, marker=marker,
                    markersize=4, label=label)
        if source != "theory":
            lo = (group["ber"] - group["ci95"]).clip(lower=1e-12)
            hi = group["ber"] + group["ci95"]
            ax.fill_between(group["ebn0_db"], lo, hi, alpha=0.15)

    ax.set_xlabel(r"$E_b/N_0$ (dB)")
    ax.set_ylabel("BER")
    ax.set_title(args.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
