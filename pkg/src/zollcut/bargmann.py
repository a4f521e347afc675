"""Bargmann-space states, coherent states and Husimi densities.

The model space is spanned by the weighted monomials

    b_n(z) = z^n / sqrt(hbar^n n!),        hbar = 1/N,

orthonormal for the Gaussian-weighted inner product; a state is a finite
coefficient vector (c_0, ..., c_M) against this basis.  The coherent state
centered at w has coefficients

    c_n = conj(w)^n e^{-|w|^2/(2 hbar)} / sqrt(n! hbar^n),

a Poisson-shaped profile peaked near n = |w|^2/hbar, and its Husimi density

    |psi|_H(z) = |psi(z)| e^{-|z|^2/(2 hbar)}

is exactly the Gaussian e^{-|z - w|^2/(2 hbar)} before truncation.  Both the
coefficients and the density are evaluated in log-magnitude/phase form: the
raw factors z^n / sqrt(hbar^n n!) overflow float64 near n = N for N in the
hundreds, while the assembled terms are tame.

Grid evaluation is chunked and optionally threaded; the chunk layout is fixed
independently of the worker count, and every chunk reduces its coefficient sum
in index order, so grids are bit-identical for any ZOLLCUT_THREADS setting.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

# exp(x) underflows to exactly 0.0 below the subnormal range
_LOG_TINY = -745.0


class UnderflowError(ValueError):
    """All retained coefficients of a state underflow to zero."""


@dataclass(frozen=True)
class SimulationScale:
    """Semiclassical scale: integer N with hbar = 1/N.

    Index arithmetic (cutoffs, dimensions, propagation phases) always uses
    the integer N, never 1/hbar, so it is exact by construction.
    """

    N: int

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise TypeError(f"N must be an integer, got {self.N!r}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def hbar(self) -> float:
        return 1.0 / self.N


@dataclass(frozen=True)
class BargmannState:
    """Finite coefficient vector against the weighted-monomial basis."""

    scale: SimulationScale
    coeffs: NDArray[np.complex128]

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def norm2(self) -> float:
        """Squared norm, sum |c_n|^2."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    @classmethod
    def basis(cls, scale: SimulationScale, n: int, dim: Optional[int] = None) -> "BargmannState":
        """The normalized basis element b_n, embedded in dimension dim."""
        if dim is None:
            dim = n + 1
        if not 0 <= n < dim:
            raise ValueError(f"need 0 <= n < dim, got n={n}, dim={dim}")
        c = np.zeros(dim, dtype=complex)
        c[n] = 1.0
        return cls(scale, c)

    def __add__(self, other: "BargmannState") -> "BargmannState":
        if not isinstance(other, BargmannState):
            return NotImplemented
        if other.scale.N != self.scale.N:
            raise ValueError(
                f"scale mismatch: N={self.scale.N} vs N={other.scale.N}"
            )
        d = max(self.dim, other.dim)
        c = np.zeros(d, dtype=complex)
        c[: self.dim] += self.coeffs
        c[: other.dim] += other.coeffs
        return BargmannState(self.scale, c)

    def __mul__(self, alpha: complex) -> "BargmannState":
        return BargmannState(self.scale, self.coeffs * complex(alpha))

    __rmul__ = __mul__


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, p) evaluation grid, inclusive of its bounds."""

    nx: int
    np: int
    xmin: float
    xmax: float
    pmin: float
    pmax: float

    def __post_init__(self):
        if self.nx < 2 or self.np < 2:
            raise ValueError(f"need nx, np >= 2, got {self.nx}, {self.np}")
        bounds = (self.xmin, self.xmax, self.pmin, self.pmax)
        if not all(math.isfinite(b) for b in bounds):
            raise ValueError(f"grid bounds must be finite, got {bounds}")
        if not (self.xmax > self.xmin and self.pmax > self.pmin):
            raise ValueError(f"grid bounds must be ordered, got {bounds}")

    def x_axis(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.nx)

    def p_axis(self) -> np.ndarray:
        return np.linspace(self.pmin, self.pmax, self.np)


@dataclass(frozen=True)
class HusimiGrid:
    """Husimi density sampled on a GridSpec; values[i, j] at (x_i, p_j)."""

    spec: GridSpec
    values: NDArray[np.float64]
    scale_n: int
    center: Optional[complex] = None  # source coherent-state center, if any
    time: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.shape != (self.spec.nx, self.spec.np):
            raise ValueError(
                f"values shape {v.shape} does not match grid ({self.spec.nx}, {self.spec.np})"
            )
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("Husimi values must be finite and >= 0")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def write_csv(self, csv_path, meta_path=None) -> None:
        """Write `x,p,density` rows plus the sidecar JSON metadata file."""
        csv_path = os.fspath(csv_path)
        if meta_path is None:
            meta_path = os.path.splitext(csv_path)[0] + ".json"
        xs = [float(v) for v in self.spec.x_axis()]
        ps = [float(v) for v in self.spec.p_axis()]
        lines = ["x,p,density"]
        for i in range(self.spec.nx):
            row = self.values[i]
            for j in range(self.spec.np):
                lines.append(f"{xs[i]!r},{ps[j]!r},{float(row[j])!r}")
        with open(csv_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        meta = {
            "N": self.scale_n,
            "w_re": None if self.center is None else self.center.real,
            "w_im": None if self.center is None else self.center.imag,
            "t": self.time,
            "nx": self.spec.nx,
            "np": self.spec.np,
            "xmin": self.spec.xmin,
            "xmax": self.spec.xmax,
            "pmin": self.spec.pmin,
            "pmax": self.spec.pmax,
        }
        with open(meta_path, "w") as fh:
            fh.write(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def coherent_state(w: complex, scale: SimulationScale, cutoff: int) -> BargmannState:
    """Coherent state at Bargmann center w, truncated to indices 0..cutoff.

    Coefficients are assembled in log space; the truncated norm^2 equals the
    Poisson CDF at mean |w|^2/hbar, so the state is close to unit norm once
    cutoff comfortably exceeds |w|^2/hbar.  Raises UnderflowError when every
    retained coefficient underflows (cutoff far below the Poisson peak).
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    w = complex(w)
    hbar = scale.hbar
    n = np.arange(cutoff + 1)
    mu = abs(w) ** 2 / hbar
    if w == 0:
        c = np.zeros(cutoff + 1, dtype=complex)
        c[0] = 1.0
        return BargmannState(scale, c)
    # log|c_n| = n log|w| - mu/2 - (n log hbar + lgamma(n+1))/2
    logmag = (
        n * math.log(abs(w))
        - 0.5 * mu
        - 0.5 * (n * math.log(hbar) + np.array([math.lgamma(k + 1.0) for k in n]))
    )
    if logmag.max() < _LOG_TINY:
        raise UnderflowError(
            f"all coefficients below n = {cutoff} underflow for |w|^2/hbar = {mu:.3g}; "
            f"the Poisson profile peaks near n = {mu:.0f}, increase the cutoff"
        )
    phase = -n * np.angle(w)  # conj(w)^n
    with np.errstate(under="ignore"):
        c = np.exp(logmag) * np.exp(1j * phase)
    return BargmannState(scale, c)


def inner(a: BargmannState, b: BargmannState) -> complex:
    """Inner product sum_n a_n conj(b_n) (linear in the first argument)."""
    if a.scale.N != b.scale.N:
        raise ValueError(f"scale mismatch: N={a.scale.N} vs N={b.scale.N}")
    d = min(a.dim, b.dim)
    return complex(np.sum(a.coeffs[:d] * np.conj(b.coeffs[:d])))


def _worker_count(njobs: int) -> int:
    raw = os.environ.get("ZOLLCUT_THREADS", "0").strip()
    try:
        k = int(raw) if raw else 0
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return max(1, min(k, njobs))


def _husimi_chunk(zflat, coeffs, hbar, lo, hi, out):
    """Fill out[lo:hi] with the Husimi density at the points zflat[lo:hi]."""
    z = zflat[lo:hi]
    n = np.arange(coeffs.size)
    # per-coefficient base: log|c_n| - (n log hbar + lgamma(n+1))/2
    with np.errstate(divide="ignore"):
        logc = np.log(np.abs(coeffs))
    base = logc - 0.5 * (n * math.log(hbar) + np.array([math.lgamma(k + 1.0) for k in n]))
    argc = np.angle(coeffs)
    with np.errstate(divide="ignore"):
        logz = np.log(np.abs(z))
    argz = np.angle(z)
    # terms: base_n + n log|z|; the n = 0 column must stay finite at z = 0
    with np.errstate(invalid="ignore"):
        L = logz[:, None] * n[None, :]
    L[:, 0] = 0.0
    L += base[None, :]
    peak = L.max(axis=1)
    with np.errstate(under="ignore", invalid="ignore"):
        mags = np.exp(L - peak[:, None])
    mags[~np.isfinite(mags)] = 0.0  # rows with peak = -inf
    phases = argc[None, :] + argz[:, None] * n[None, :]
    s = np.sum(mags * np.exp(1j * phases), axis=1)  # fixed index-order reduction
    gauss = np.abs(z) ** 2 / (2.0 * hbar)
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        logv = peak + np.log(np.abs(s)) - gauss
        vals = np.exp(logv)
    vals[~np.isfinite(logv)] = 0.0  # underflow and empty rows clamp to zero
    out[lo:hi] = vals


def husimi(state: BargmannState, grid: GridSpec) -> HusimiGrid:
    """Evaluate |psi(z)| e^{-|z|^2/(2 hbar)} of the state on the grid.

    Stable for N in the hundreds: all growth is kept in log space and the
    oscillatory coefficient sum is performed on O(1)-sized terms.  Points
    whose density underflows evaluate to exactly 0.
    """
    xs = grid.x_axis()
    ps = grid.p_axis()
    zgrid = (xs[:, None] - 1j * ps[None, :]) / math.sqrt(2.0)
    zflat = zgrid.ravel()
    out = np.empty(zflat.size, dtype=float)

    # chunk layout depends only on the problem size, never on the worker count
    chunk = max(1, min(zflat.size, 4_000_000 // max(1, state.dim)))
    bounds = [(lo, min(lo + chunk, zflat.size)) for lo in range(0, zflat.size, chunk)]
    workers = _worker_count(len(bounds))
    if workers == 1:
        for lo, hi in bounds:
            _husimi_chunk(zflat, state.coeffs, state.scale.hbar, lo, hi, out)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(
                pool.map(
                    lambda b: _husimi_chunk(
                        zflat, state.coeffs, state.scale.hbar, b[0], b[1], out
                    ),
                    bounds,
                )
            )
    return HusimiGrid(
        spec=grid,
        values=out.reshape(grid.nx, grid.np),
        scale_n=state.scale.N,
    )
