"""Readers for the simulator's artifact formats.

Grid CSVs have the header x,p,density and one row per grid node; the sidecar
JSON carries the run parameters and grid bounds.  Reports are the JSON files
the CLI writes, schema {name, params, values, refs, provenance, pass}.
Every reader raises VizDataError naming the offending file.
"""

from __future__ import annotations

import csv
import json
from typing import Tuple

import numpy as np


class VizDataError(Exception):
    """Missing or malformed artifact file; the message names the file."""


def read_grid_csv(path: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse a density CSV into (x_axis, p_axis, values[nx, np]).

    The file must be a complete rectangular grid; axes come back sorted
    ascending and values finite and nonnegative.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise VizDataError(f"{path}: cannot read ({exc})") from exc
    if not rows or rows[0] != ["x", "p", "density"]:
        raise VizDataError(f"{path}: expected header x,p,density")
    body = rows[1:]
    if not body:
        raise VizDataError(f"{path}: no data rows")
    triples = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 3:
            raise VizDataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            triples.append((float(row[0]), float(row[1]), float(row[2])))
        except ValueError as exc:
            raise VizDataError(f"{path}:{lineno}: {exc}") from exc
    xs = np.array(sorted({t[0] for t in triples}))
    ps = np.array(sorted({t[1] for t in triples}))
    if len(triples) != xs.size * ps.size:
        raise VizDataError(
            f"{path}: {len(triples)} rows do not fill a {xs.size} x {ps.size} grid"
        )
    xi = {v: i for i, v in enumerate(xs)}
    pj = {v: j for j, v in enumerate(ps)}
    values = np.full((xs.size, ps.size), np.nan)
    for x, p, d in triples:
        values[xi[x], pj[p]] = d
    if np.any(np.isnan(values)):
        raise VizDataError(f"{path}: duplicate grid nodes leave holes in the grid")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise VizDataError(f"{path}: densities must be finite and nonnegative")
    return xs, ps, values


def read_meta(path: str) -> dict:
    """Sidecar JSON for a grid CSV; must carry the grid bounds."""
    try:
        with open(path) as fh:
            meta = json.load(fh)
    except OSError as exc:
        raise VizDataError(f"{path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise VizDataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(meta, dict):
        raise VizDataError(f"{path}: expected a JSON object")
    missing = {"xmin", "xmax", "pmin", "pmax", "nx", "np"} - set(meta)
    if missing:
        raise VizDataError(f"{path}: missing keys {sorted(missing)}")
    return meta


def read_report(path: str) -> dict:
    """One CLI report; must carry name, params and values."""
    try:
        with open(path) as fh:
            report = json.load(fh)
    except OSError as exc:
        raise VizDataError(f"{path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise VizDataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(report, dict):
        raise VizDataError(f"{path}: expected a JSON object")
    missing = {"name", "params", "values"} - set(report)
    if missing:
        raise VizDataError(f"{path}: missing keys {sorted(missing)}")
    return report
