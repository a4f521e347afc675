"""Experiment drivers: trace asymptotics, propagation checks, peak splitting.

Every driver returns an ExperimentReport whose reference values carry a
provenance tag:

    "closed-form"       hand-derived exact values (trace identities, exact
                        flows, commutator entry formulas)
    "quadrature-oracle" disk integrals evaluated by the classical quadrature
    "paper"             qualitative targets read off the source figures
                        (peak counts of the splitting experiment)

Reports serialize to JSON with the fixed schema
{name, params, values[], refs[], provenance[], pass} and print one PASS/FAIL
line per checked row.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from zollcut.bargmann import (
    BargmannState,
    GridSpec,
    HusimiGrid,
    SimulationScale,
    coherent_state,
    husimi,
)
from zollcut.operators import (
    BandedHermitian,
    build_oscillator_matrix,
    build_projector,
    build_q_matrix,
    commutator,
    cut_operator,
    edge_symbol_error,
    fiber_toeplitz,
)
from zollcut.phase import (
    HARMONIC,
    SADDLE,
    Domain,
    Hamiltonian,
    PhasePoint,
    disk_integral,
    hamilton_flow,
    orbit_fourier_coeffs,
    poisson_bracket,
)
from zollcut.spectral import eigendecompose, propagate

PROVENANCE_TAGS = ("paper", "closed-form", "quadrature-oracle")

# scalar functions admitted by the trace experiments; the catalog is closed
F_CATALOG: Dict[str, Callable] = {
    "id": lambda lam: lam,
    "square": lambda lam: lam**2,
    "quartic": lambda lam: lam**4,
    "cos": np.cos,
}


@dataclass(frozen=True)
class CheckRow:
    """One measured value compared against a tagged reference."""

    label: str
    value: float
    reference: float
    tolerance: float
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")

    @property
    def abs_err(self) -> float:
        return abs(self.value - self.reference)

    @property
    def passed(self) -> bool:
        return self.abs_err <= self.tolerance

    def summary(self, experiment: str) -> str:
        word = "PASS" if self.passed else "FAIL"
        return (
            f"{word} {experiment}.{self.label}: value={self.value:.8g} "
            f"ref={self.reference:.8g} err={self.abs_err:.3g} "
            f"tol={self.tolerance:.3g} [{self.provenance}]"
        )


@dataclass
class ExperimentReport:
    """Named parameter set, free measurements, and checked reference rows."""

    name: str
    params: dict
    values: List[Tuple[str, float]] = field(default_factory=list)
    checks: List[CheckRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary_lines(self) -> List[str]:
        return [c.summary(self.name) for c in self.checks]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "values": [{"label": l, "value": v} for l, v in self.values],
            "refs": [
                {
                    "label": c.label,
                    "value": c.value,
                    "reference": c.reference,
                    "tolerance": c.tolerance,
                    "provenance": c.provenance,
                    "abs_err": c.abs_err,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
            "provenance": sorted({c.provenance for c in self.checks}),
            "pass": self.passed,
        }

    def write(self, path) -> None:
        with open(os.fspath(path), "w") as fh:
            fh.write(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")


def cutoff_for_energy(scale: SimulationScale, energy: float) -> int:
    """Highest retained level for an energy-E disk: n with n <= E N.

    Keeps eigenvalues hbar(n + 1/2) up to E + hbar/2; at E = 1 this retains
    levels 0..N, dimension N + 1.
    """
    if energy <= 0:
        raise ValueError(f"energy must be > 0, got {energy}")
    c = int(math.floor(energy * scale.N + 1e-9))
    return max(c, 0)


def _saddle_cut(scale: SimulationScale, energy: float = 1.0) -> BandedHermitian:
    cut = cutoff_for_energy(scale, energy)
    q = build_q_matrix(scale, cut + 1)
    proj = build_projector(scale, cut)
    return cut_operator(q, proj)


def szego_check(
    f: str, N: int, E: float = 1.0, nr: int = 64, ntheta: int = 256
) -> ExperimentReport:
    """Compare the cut-observable trace of f with its disk-integral law.

    lhs = sum of f over the spectrum of the cut saddle matrix; rhs is the
    leading term (N / 2 pi) * disk_integral(f o Q).  For f = square at E = 1
    the error is exactly 2/(3N) (closed form); the report checks that, and
    otherwise checks |lhs - rhs| against the O(log N) remainder bound.  The
    reported normalized error is |lhs - rhs| * log N / N, the remainder
    measured against the leading order; it decreases along N for every f in
    the catalog.
    """
    if f not in F_CATALOG:
        raise ValueError(f"unknown f {f!r}; catalog: {sorted(F_CATALOG)}")
    scale = SimulationScale(N)
    func = F_CATALOG[f]
    cut = _saddle_cut(scale, E)
    lam = eigendecompose(cut).eigenvalues
    lhs = float(np.sum(func(lam)))
    dom = Domain(E)
    rhs = (N / (2.0 * math.pi)) * disk_integral(
        lambda x, p: func(x * x - p * p), dom, nr=nr, ntheta=ntheta
    )
    err = abs(lhs - rhs)
    # remainder scaled by log N / N: the trace law's correction is O(log N)
    # against a leading term of order N, so this is the bounded quantity
    normalized = err * math.log(N) / N if N > 1 else err

    report = ExperimentReport(
        name="szego",
        params={"N": N, "E": E, "f": f, "nr": nr, "ntheta": ntheta},
        values=[
            ("trace", lhs),
            ("integral", rhs),
            ("abs_err", err),
            ("normalized_err", normalized),
        ],
    )
    if f == "square" and E == 1.0:
        # exact error of the trace law for the squared observable: 2/(3N)
        report.checks.append(
            CheckRow(
                label="err_vs_closed_form",
                value=err,
                reference=2.0 / (3.0 * N),
                tolerance=0.1 * 2.0 / (3.0 * N),
                provenance="closed-form",
            )
        )
    else:
        # the remainder is O(log N) with an O(1) constant part that does not
        # vanish for generic f (measured ~4.0 for quartic, ~0.87 for cos);
        # frozen bound 2.5 log N covers both with 2x margin
        report.checks.append(
            CheckRow(
                label="trace_vs_integral",
                value=lhs,
                reference=rhs,
                tolerance=2.5 * math.log(max(N, 2)),
                provenance="quadrature-oracle",
            )
        )
    return report


def _quantize(h: Hamiltonian, scale: SimulationScale, dim: int) -> BandedHermitian:
    """Matrix of a built-in observable; only the closed catalog is supported."""
    if h.tag == "harmonic":
        return build_oscillator_matrix(scale, dim)
    if h.tag == "saddle":
        return build_q_matrix(scale, dim)
    raise ValueError(f"no quantization rule for Hamiltonian tag {h.tag!r}")


def boundary_distance(w: complex, energy: float = 1.0) -> float:
    """Euclidean (x, p)-distance from the point with Bargmann coordinate w
    to the boundary circle of the energy-E disk (negative outside)."""
    return math.sqrt(2.0 * energy) - math.sqrt(2.0) * abs(w)


def egorov_check(
    generator: Hamiltonian,
    observable: Hamiltonian,
    w: complex,
    t: float,
    N: int,
    energy: float = 1.0,
) -> ExperimentReport:
    """Propagate a projected coherent state and compare the quantum
    expectation of the observable with its classical transport.

    Restricted to generators that Poisson-commute with the oscillator (the
    generator's flow then preserves the disk and the projector commutes with
    the propagator up to edge effects); the center must sit at least
    3 sqrt(hbar) inside the boundary so the coherent state clears the edge.
    The tolerance is 3 sqrt(hbar) times a local gradient bound for the
    observable along the classical orbit: the coherent state has width
    ~sqrt(hbar) and the expectation smears the symbol over it.
    """
    scale = SimulationScale(N)
    # strict-tolerance regime: generator must be a function of the oscillator
    for xx in np.linspace(-1.2, 1.2, 5):
        for pp in np.linspace(-1.2, 1.2, 5):
            br = poisson_bracket(HARMONIC, generator, PhasePoint(xx, pp))
            if abs(br) > 1e-10:
                raise ValueError(
                    f"generator {generator.tag!r} does not commute with the "
                    f"oscillator ({{P, gen}} = {br:.3g} at x={xx:.2g}, p={pp:.2g}); "
                    "the strict propagation check only covers that case"
                )
    dist = boundary_distance(w, energy)
    guard = 3.0 * math.sqrt(scale.hbar)
    if dist < guard:
        raise ValueError(
            f"center w = {w} sits {dist:.4g} from the disk boundary, "
            f"closer than the coherent width guard 3 sqrt(hbar) = {guard:.4g}"
        )

    cut = cutoff_for_energy(scale, energy)
    dim = cut + 1
    gen_mat = _quantize(generator, scale, dim)
    obs_mat = _quantize(observable, scale, dim)
    state0 = coherent_state(w, scale, cut)
    state_t = propagate(gen_mat, state0, t)
    c = state_t.coeffs
    quantum = float(np.real(np.conj(c) @ (obs_mat.mat @ c)) / np.real(np.conj(c) @ c))

    start = PhasePoint.from_bargmann(w)
    if generator.exact_flow is not None:
        moved = generator.exact_flow(start, t)
    else:
        moved = hamilton_flow(generator, start, t)
    classical = float(observable.value(moved.x, moved.p))

    # gradient bound along the generator orbit through w (sampled)
    gmax = 1.0
    for s in np.linspace(0.0, 2.0 * math.pi, 64):
        pt = (
            generator.exact_flow(start, s)
            if generator.exact_flow is not None
            else hamilton_flow(generator, start, s, dt=1e-2)
        )
        gx, gp = observable.grad(pt.x, pt.p)
        gmax = max(gmax, math.hypot(gx, gp))
    tol = guard * gmax

    report = ExperimentReport(
        name="egorov",
        params={
            "N": N,
            "E": energy,
            "generator": generator.tag,
            "observable": observable.tag,
            "w_re": w.real,
            "w_im": w.imag,
            "t": t,
        },
        values=[
            ("quantum", quantum),
            ("classical", classical),
            ("gradient_bound", gmax),
            ("norm2", state_t.norm2()),
        ],
        checks=[
            CheckRow(
                label="transport",
                value=quantum,
                reference=classical,
                tolerance=tol,
                provenance="closed-form",
            )
        ],
    )
    return report


def reversibility_check(N: int, w: complex, t: float, energy: float = 1.0) -> ExperimentReport:
    """Propagate forward then backward and measure the return error."""
    scale = SimulationScale(N)
    cut = _saddle_cut(scale, energy)
    state0 = coherent_state(w, scale, cut.dim - 1)
    forward = propagate(cut, state0, t)
    back = propagate(cut, forward, -t)
    norm_drift = abs(forward.norm() - state0.norm())
    roundtrip = float(np.linalg.norm(back.coeffs - state0.coeffs))
    return ExperimentReport(
        name="reversibility",
        params={"N": N, "E": energy, "w_re": w.real, "w_im": w.imag, "t": t},
        values=[("norm0", state0.norm()), ("norm_t", forward.norm())],
        checks=[
            CheckRow(
                label="norm_drift",
                value=norm_drift,
                reference=0.0,
                tolerance=1e-10,
                provenance="closed-form",
            ),
            CheckRow(
                label="roundtrip_error",
                value=roundtrip,
                reference=0.0,
                tolerance=1e-8,
                provenance="closed-form",
            ),
        ],
    )


def find_peaks(values: np.ndarray, rel_floor: float = 0.5) -> List[Tuple[int, int]]:
    """Grid peaks: strictly above all 8 neighbors and above rel_floor * max.

    Border cells are excluded (they lack a full neighborhood); returned in
    row-major order.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] < 3:
        raise ValueError(f"need a 2-d grid at least 3x3, got shape {v.shape}")
    c = v[1:-1, 1:-1]
    higher = np.ones_like(c, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            shifted = v[1 + di : v.shape[0] - 1 + di, 1 + dj : v.shape[1] - 1 + dj]
            higher &= c > shifted
    higher &= c > rel_floor * v.max()
    return [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(higher))]


def _expected_peaks(t: float) -> Optional[int]:
    # one lobe before the saddle flow tears the state, two once it has
    if t <= 0.15:
        return 1
    if 0.4 <= t <= 0.6:
        return 2
    return None


def splitting_experiment(
    N: int,
    w: complex,
    times: Sequence[float],
    grid: GridSpec,
    energy: float = 1.0,
) -> Tuple[List[HusimiGrid], ExperimentReport]:
    """Propagate a coherent state under the cut saddle observable and count
    the lobes of its Husimi density at each requested time.

    Checks, where applicable: a single peak for t <= 0.15 located at the
    starting center, two peaks for t in [0.4, 0.6] that lie inside the disk
    and share the same classical saddle value to within 0.1.
    """
    scale = SimulationScale(N)
    cut = _saddle_cut(scale, energy)
    state0 = coherent_state(w, scale, cut.dim - 1)
    xs = None
    report = ExperimentReport(
        name="splitting",
        params={
            "N": N,
            "E": energy,
            "w_re": w.real,
            "w_im": w.imag,
            "times": [float(t) for t in times],
            "nx": grid.nx,
            "np": grid.np,
        },
    )
    grids: List[HusimiGrid] = []
    for t in times:
        state_t = propagate(cut, state0, float(t))
        hg = husimi(state_t, grid)
        hg = dataclasses.replace(hg, center=w, time=float(t))
        grids.append(hg)
        peaks = find_peaks(hg.values)
        report.values.append((f"peak_count_t{t:g}", float(len(peaks))))
        if xs is None:
            xs = grid.x_axis()
            ps = grid.p_axis()
        expected = _expected_peaks(float(t))
        if expected is not None:
            report.checks.append(
                CheckRow(
                    label=f"peak_count_t{t:g}",
                    value=float(len(peaks)),
                    reference=float(expected),
                    tolerance=0.0,
                    provenance="paper",
                )
            )
            inside = all(
                0.5 * (xs[i] ** 2 + ps[j] ** 2) <= energy for i, j in peaks
            )
            report.checks.append(
                CheckRow(
                    label=f"peaks_inside_disk_t{t:g}",
                    value=1.0 if inside else 0.0,
                    reference=1.0,
                    tolerance=0.0,
                    provenance="paper",
                )
            )
        if t == 0 and peaks:
            # before any propagation the single lobe sits on the center
            start = PhasePoint.from_bargmann(w)
            i0 = int(np.argmin(np.abs(xs - start.x)))
            j0 = int(np.argmin(np.abs(ps - start.p)))
            iargmax, jargmax = np.unravel_index(np.argmax(hg.values), hg.values.shape)
            offset = float(max(abs(int(iargmax) - i0), abs(int(jargmax) - j0)))
            report.checks.append(
                CheckRow(
                    label=f"argmax_at_center_t{t:g}",
                    value=offset,
                    reference=0.0,
                    tolerance=2.0,
                    provenance="closed-form",
                )
            )
        if expected == 2 and len(peaks) == 2:
            (i1, j1), (i2, j2) = peaks
            q1 = xs[i1] ** 2 - ps[j1] ** 2
            q2 = xs[i2] ** 2 - ps[j2] ** 2
            report.checks.append(
                CheckRow(
                    label=f"equal_saddle_value_t{t:g}",
                    value=float(abs(q1 - q2)),
                    reference=0.0,
                    tolerance=0.1,
                    provenance="paper",
                )
            )
    return grids, report


def commutator_check(N: int) -> ExperimentReport:
    """Locate and size the nonzeros of [projector, saddle matrix].

    In an ambient space of dimension N + 3 the commutator has exactly four
    nonzero entries, straddling the cutoff at (N-1, N+1), (N, N+2) and their
    transposes, with magnitudes hbar sqrt(N(N+1)) and hbar sqrt((N+1)(N+2)).
    """
    scale = SimulationScale(N)
    dim = N + 3
    q = build_q_matrix(scale, dim)
    proj = build_projector(scale, N, dim)
    c = commutator(proj, q)
    nz = list(zip(*np.nonzero(c)))
    positions = {(int(i), int(j)) for i, j in nz}
    expected = {(N - 1, N + 1), (N, N + 2), (N + 1, N - 1), (N + 2, N)}
    mag_outer = scale.hbar * math.sqrt((N + 1) * (N + 2))
    mag_inner = scale.hbar * math.sqrt(N * (N + 1))
    report = ExperimentReport(
        name="commutator",
        params={"N": N, "dim": dim},
        values=[
            ("nonzero_count", float(len(nz))),
            ("max_magnitude", float(np.max(np.abs(c))) if nz else 0.0),
        ],
        checks=[
            CheckRow(
                label="nonzero_count",
                value=float(len(nz)),
                reference=4.0,
                tolerance=0.0,
                provenance="closed-form",
            ),
            CheckRow(
                label="positions_straddle_cutoff",
                value=1.0 if positions == expected else 0.0,
                reference=1.0,
                tolerance=0.0,
                provenance="closed-form",
            ),
            CheckRow(
                label="outer_entry_magnitude",
                value=float(abs(c[N, N + 2])),
                reference=mag_outer,
                tolerance=1e-12,
                provenance="closed-form",
            ),
            CheckRow(
                label="inner_entry_magnitude",
                value=float(abs(c[N - 1, N + 1])),
                reference=mag_inner,
                tolerance=1e-12,
                provenance="closed-form",
            ),
            CheckRow(
                label="exact_antisymmetry",
                value=float(np.max(np.abs(c + c.T))),
                reference=0.0,
                tolerance=0.0,
                provenance="closed-form",
            ),
        ],
    )
    return report


def _corner(mat: np.ndarray, K: int) -> np.ndarray:
    """K x K corner counted inward from the last row/column."""
    return mat[-K:, -K:][::-1, ::-1]


def edge_symbol_check(N: int, K: int = 6, energy: float = 1.0) -> ExperimentReport:
    """Edge universality of the cut matrix against its Toeplitz model.

    Compares the K x K cutoff corner with the Toeplitz matrix of the
    boundary symbol at N and 2N (deviation bound (K+2)/N, halving in N), and
    the corner of the squared cut matrix with the squared model (inner
    truncation 64), also halving.
    """
    dom = Domain(energy)
    coeffs = orbit_fourier_coeffs(SADDLE, dom, kmax=4)
    fiber = fiber_toeplitz(coeffs, K)
    inner_K = 64
    big = fiber_toeplitz(coeffs, inner_K)
    big_sq = big.mat @ big.mat
    comp_K = 4

    def at(n: int) -> Tuple[float, float]:
        cut = _saddle_cut(SimulationScale(n), energy)
        err = edge_symbol_error(cut, fiber, K)
        sq = cut.mat @ cut.mat
        comp = float(np.max(np.abs(_corner(sq, comp_K) - big_sq[:comp_K, :comp_K])))
        return err, comp

    err_n, comp_n = at(N)
    err_2n, comp_2n = at(2 * N)
    report = ExperimentReport(
        name="edge_symbol",
        params={"N": N, "K": K, "E": energy, "inner_truncation": inner_K},
        values=[
            ("corner_err", err_n),
            ("corner_err_2N", err_2n),
            ("composition_err", comp_n),
            ("composition_err_2N", comp_2n),
        ],
        checks=[
            CheckRow(
                label="corner_err_bound",
                value=err_n,
                reference=0.0,
                tolerance=(K + 2) / N,
                provenance="closed-form",
            ),
            CheckRow(
                label="corner_err_halves",
                value=err_2n / err_n if err_n else 0.0,
                reference=0.5,
                tolerance=0.1,
                provenance="closed-form",
            ),
            CheckRow(
                label="composition_err_bound",
                value=comp_n,
                reference=0.0,
                tolerance=12.0 / N,
                provenance="closed-form",
            ),
            CheckRow(
                label="composition_err_halves",
                value=comp_2n / comp_n if comp_n else 0.0,
                reference=0.5,
                tolerance=0.1,
                provenance="closed-form",
            ),
        ],
    )
    return report
