"""Log-log convergence plot from a series of CLI reports.

Takes two or more reports of the same experiment at different N, plots the
abs_err value against N on log-log axes with a least-squares slope fit and a
reference slope -1 line, and prints the fitted slope.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from zollcut_viz.io import VizDataError, read_report


def _extract_point(path: str, report: dict) -> Tuple[int, float]:
    params = report["params"]
    if "N" not in params:
        raise VizDataError(f"{path}: report params carry no N")
    errs = [v["value"] for v in report["values"] if v.get("label") == "abs_err"]
    if not errs:
        raise VizDataError(f"{path}: report has no abs_err value")
    return int(params["N"]), float(errs[0])


def render_convergence(paths: Sequence[str], out: str) -> float:
    """Plot error vs N for the given reports; returns the fitted slope."""
    if len(paths) < 2:
        raise VizDataError("need at least 2 reports to plot convergence")
    reports = [(p, read_report(p)) for p in paths]
    names = {r["name"] for _, r in reports}
    if len(names) != 1:
        raise VizDataError(f"mixed experiment names {sorted(names)}; pass one series")
    name = names.pop()
    points = [_extract_point(p, r) for p, r in reports]
    ns = np.array([n for n, _ in points], dtype=float)
    errs = np.array([e for _, e in points])
    if len(set(ns)) < 2:
        raise VizDataError("reports share a single N; need a range to fit a slope")
    if np.any(errs <= 0):
        raise VizDataError("nonpositive errors cannot be drawn on log axes")
    order = np.argsort(ns)
    ns, errs = ns[order], errs[order]

    slope, intercept = np.polyfit(np.log(ns), np.log(errs), 1)
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(ns, errs, "o", label="measured")
    ax.loglog(ns, np.exp(intercept) * ns**slope, "-", label=f"fit slope {slope:.2f}")
    ax.loglog(ns, errs[0] * (ns / ns[0]) ** -1.0, "--", label="slope -1")
    ax.set_xlabel("N")
    ax.set_ylabel("abs_err")
    ax.set_title(name)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=100)
    plt.close(fig)
    return float(slope)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-convergence",
        description="Log-log error-vs-N plot from same-experiment CLI reports.",
    )
    parser.add_argument("reports", nargs="+", help="report JSON files, one per N")
    parser.add_argument("--out", default="convergence.png", metavar="PNG")
    args = parser.parse_args(argv)
    try:
        slope = render_convergence(args.reports, args.out)
    except VizDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.out} slope={slope:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
