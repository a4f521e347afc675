"""Contour panels of density grids in the (x, p) plane.

A panel spec is a JSON file:

    {
      "out": "figure.png",
      "panels": [
        {"csv": "husimi_t0.csv", "meta": "husimi_t0.json", "subtitle": "t = 0"},
        ...
      ],
      "levels": 10,           optional, contour level count
      "shared_scale": false,  optional, one color scale for all panels
      "energy": 1.0,          optional, disk energy for the boundary circle
      "saddle_levels": false  optional, overlay x^2 - p^2 = -1, 0, 1
    }

Each panel is filled-contoured at `levels` evenly spaced heights up to its
own maximum (up to the global maximum with shared_scale, which also requires
every panel to share grid bounds), with the boundary circle x^2 + p^2 = 2E
drawn on top.  Axes always contain the disk with margin 0.5.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from zollcut_viz.io import VizDataError, read_grid_csv, read_meta

SPEC_KEYS = {"out", "panels", "levels", "shared_scale", "energy", "saddle_levels"}
PANEL_KEYS = {"csv", "meta", "subtitle"}
BOUNDS_KEYS = ("xmin", "xmax", "pmin", "pmax", "nx", "np")


@dataclass(frozen=True)
class PanelEntry:
    csv: str
    meta: str
    subtitle: str


@dataclass(frozen=True)
class PanelSpec:
    """What to draw: one subplot per entry, written to one image."""

    panels: Tuple[PanelEntry, ...]
    out: str
    levels: int = 10
    shared_scale: bool = False
    energy: float = 1.0
    saddle_levels: bool = False

    def __post_init__(self):
        if not self.panels:
            raise ValueError("panel spec needs at least one panel")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if not self.energy > 0:
            raise ValueError(f"energy must be > 0, got {self.energy}")


def load_panel_spec(path: str) -> PanelSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise VizDataError(f"{path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise VizDataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise VizDataError(f"{path}: expected a JSON object")
    unknown = set(raw) - SPEC_KEYS
    if unknown:
        raise VizDataError(f"{path}: unknown keys {sorted(unknown)}")
    if "out" not in raw or "panels" not in raw:
        raise VizDataError(f"{path}: spec needs 'out' and 'panels'")
    entries = []
    for i, p in enumerate(raw["panels"]):
        if not isinstance(p, dict) or set(p) - PANEL_KEYS or "csv" not in p or "meta" not in p:
            raise VizDataError(f"{path}: panel {i} must map csv/meta/subtitle")
        entries.append(PanelEntry(p["csv"], p["meta"], p.get("subtitle", "")))
    try:
        return PanelSpec(
            panels=tuple(entries),
            out=raw["out"],
            levels=int(raw.get("levels", 10)),
            shared_scale=bool(raw.get("shared_scale", False)),
            energy=float(raw.get("energy", 1.0)),
            saddle_levels=bool(raw.get("saddle_levels", False)),
        )
    except ValueError as exc:
        raise VizDataError(f"{path}: {exc}") from exc


def _axis_limits(xs: np.ndarray, ps: np.ndarray, energy: float):
    r = math.sqrt(2.0 * energy) + 0.5
    return (
        (min(float(xs[0]), -r), max(float(xs[-1]), r)),
        (min(float(ps[0]), -r), max(float(ps[-1]), r)),
    )


def render_panels(spec: PanelSpec) -> str:
    """Draw the spec, return the written image path."""
    loaded = []
    for entry in spec.panels:
        xs, ps, values = read_grid_csv(entry.csv)
        meta = read_meta(entry.meta)
        loaded.append((entry, xs, ps, values, meta))

    if spec.shared_scale:
        first = loaded[0][4]
        bounds0 = tuple(first[k] for k in BOUNDS_KEYS)
        for entry, _, _, _, meta in loaded[1:]:
            if tuple(meta[k] for k in BOUNDS_KEYS) != bounds0:
                raise VizDataError(
                    f"{entry.meta}: grid bounds differ from {loaded[0][0].meta}; "
                    "a shared color scale needs matching grids"
                )
        global_max = max(float(values.max()) for _, _, _, values, _ in loaded)

    n = len(loaded)
    fig, axes = plt.subplots(1, n, figsize=(4.0 * n, 4.2), squeeze=False)
    for ax, (entry, xs, ps, values, _) in zip(axes[0], loaded):
        top = global_max if spec.shared_scale else float(values.max())
        if top <= 0:
            top = 1.0  # all-zero grid still renders, with trivial levels
        heights = np.linspace(0.0, top, spec.levels + 1)[1:]
        # values are indexed [x, p]; contourf wants the first axis vertical
        ax.contourf(xs, ps, values.T, levels=np.concatenate(([0.0], heights)))
        theta = np.linspace(0.0, 2.0 * math.pi, 256)
        r = math.sqrt(2.0 * spec.energy)
        ax.plot(r * np.cos(theta), r * np.sin(theta), color="black", linewidth=1.0)
        if spec.saddle_levels:
            gx, gp = np.meshgrid(xs, ps, indexing="ij")
            ax.contour(
                xs,
                ps,
                (gx * gx - gp * gp).T,
                levels=[-1.0, 0.0, 1.0],
                colors="white",
                linewidths=0.8,
                linestyles="dashed",
            )
        xlim, plim = _axis_limits(xs, ps, spec.energy)
        ax.set_xlim(*xlim)
        ax.set_ylim(*plim)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("p")
        if entry.subtitle:
            ax.set_title(entry.subtitle)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=100)
    plt.close(fig)
    return spec.out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-panels",
        description="Render density-grid CSV artifacts as contour panels.",
    )
    parser.add_argument("spec", help="panel spec JSON file")
    args = parser.parse_args(argv)
    try:
        out = render_panels(load_panel_spec(args.spec))
    except (VizDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
