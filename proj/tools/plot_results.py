#!/usr/bin/env python3
"""Plot the convergence and alpha-sweep summary CSVs written by `qdsa`."""

import argparse
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    header, data = rows[0], rows[1:]
    return header, data


def plot_convergence(results_dir, out_dir):
    path = os.path.join(results_dir, "convergence_summary.csv")
    if not os.path.exists(path):
        return
    _, data = read_rows(path)
    it = [int(r[0]) for r in data]
    vqc = [float(r[1]) / 1e3 for r in data]
    mlp = [float(r[2]) / 1e3 for r in data]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(it, vqc, label="quantum (VQC)", linewidth=1.2)
    ax.plot(it, mlp, label="classical (MLP)", linewidth=1.2, linestyle="--")
    ax.set_xlabel("training iteration")
    ax.set_ylabel("running-average throughput (kbps)")
    ax.set_title("Convergence (median across seeds)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out = os.path.join(out_dir, "convergence.png")
    fig.savefig(out, dpi=150)
    print(out)


def plot_sweep(results_dir, out_dir):
    path = os.path.join(results_dir, "sweep_alpha_summary.csv")
    if not os.path.exists(path):
        return
    _, data = read_rows(path)
    series = {}
    for alpha, agent, med, lo, hi in data:
        series.setdefault(agent, []).append((float(alpha), float(med) / 1e3,
                                             float(lo) / 1e3, float(hi) / 1e3))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = {"vqc": ("quantum (VQC)", "-o"), "mlp": ("classical (MLP)", "--s")}
    for agent, points in series.items():
        points.sort()
        a = [p[0] for p in points]
        med = [p[1] for p in points]
        lo = [p[2] for p in points]
        hi = [p[3] for p in points]
        label, style = styles.get(agent, (agent, "-"))
        ax.plot(a, med, style, label=label, markersize=4)
        ax.fill_between(a, lo, hi, alpha=0.15)
    ax.set_xlabel("UE spectrum-access probability alpha")
    ax.set_ylabel("final running-average throughput (kbps)")
    ax.set_title("Throughput vs access probability (median, min-max band)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out = os.path.join(out_dir, "alpha_sweep.png")
    fig.savefig(out, dpi=150)
    print(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("results_dir", help="directory holding the summary CSVs")
    ap.add_argument("-o", "--out-dir", default=None, help="where to write PNGs")
    args = ap.parse_args()
    out_dir = args.out_dir or args.results_dir
    os.makedirs(out_dir, exist_ok=True)
    plot_convergence(args.results_dir, out_dir)
    plot_sweep(args.results_dir, out_dir)


if __name__ == "__main__":
    main()
