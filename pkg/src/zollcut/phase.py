"""Classical phase-space layer: points, Hamiltonians, flows, disk quadrature.

Conventions
-----------
A point (x, p) of the plane maps to the Bargmann variable

    z = (x - i p) / sqrt(2),

so the harmonic-oscillator energy (x^2 + p^2)/2 equals |z|^2 and the
boundary of the energy-E disk is the circle |z| = sqrt(E).  Hamilton's
equations use the sign convention

    dx/dt = dH/dp,    dp/dt = -dH/dx,

under which the oscillator flow rotates z counterclockwise, z(t) = z0 e^{it},
and the boundary orbit of the energy-E disk is parameterized by flow time as
theta -> sqrt(E) e^{i theta}.

Two Hamiltonians are built in: HARMONIC, (x^2 + p^2)/2, whose orbits are the
circles above, and SADDLE, x^2 - p^2, whose orbits are hyperbolas with
stable/unstable axes x + p = 0 and x - p = 0.  Both carry closed-form flows
used as oracles for the fixed-step RK4 integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

_SQRT2 = math.sqrt(2.0)

# hamilton_flow refuses to take more than this many RK4 steps
MAX_FLOW_STEPS = 10_000_000


class IntegrationError(RuntimeError):
    """Raised when the RK4 state stops being finite mid-trajectory."""


@dataclass(frozen=True)
class PhasePoint:
    """A point of the classical phase plane."""

    x: float
    p: float

    @property
    def z(self) -> complex:
        """Bargmann coordinate (x - i p)/sqrt(2)."""
        return complex(self.x / _SQRT2, -self.p / _SQRT2)

    @classmethod
    def from_bargmann(cls, z: complex) -> "PhasePoint":
        z = complex(z)
        return cls(_SQRT2 * z.real, -_SQRT2 * z.imag)

    def oscillator_energy(self) -> float:
        """(x^2 + p^2)/2, which equals |z|^2."""
        return 0.5 * (self.x * self.x + self.p * self.p)


@dataclass(frozen=True)
class Hamiltonian:
    """A classical observable with an explicit gradient.

    Parameters
    ----------
    tag : str
        Short identifier ("harmonic" and "saddle" name the built-ins).
    value : callable
        (x, p) -> H(x, p).  Must accept numpy arrays elementwise.
    grad : callable
        (x, p) -> (dH/dx, dH/dp).
    exact_flow : callable, optional
        (PhasePoint, t) -> PhasePoint closed-form flow, available for the
        built-in quadratic Hamiltonians and used as an integrator oracle.
    """

    tag: str
    value: Callable
    grad: Callable
    exact_flow: Optional[Callable] = None


def _harmonic_flow(pt: PhasePoint, t: float) -> PhasePoint:
    c, s = math.cos(t), math.sin(t)
    return PhasePoint(pt.x * c + pt.p * s, pt.p * c - pt.x * s)


def _saddle_flow(pt: PhasePoint, t: float) -> PhasePoint:
    # decouples along u = x + p (contracting) and v = x - p (expanding)
    u = (pt.x + pt.p) * math.exp(-2.0 * t)
    v = (pt.x - pt.p) * math.exp(2.0 * t)
    return PhasePoint(0.5 * (u + v), 0.5 * (u - v))


HARMONIC = Hamiltonian(
    tag="harmonic",
    value=lambda x, p: 0.5 * (x * x + p * p),
    grad=lambda x, p: (x, p),
    exact_flow=_harmonic_flow,
)

SADDLE = Hamiltonian(
    tag="saddle",
    value=lambda x, p: x * x - p * p,
    grad=lambda x, p: (2.0 * x, -2.0 * p),
    exact_flow=_saddle_flow,
)


@dataclass(frozen=True)
class Domain:
    """The closed phase-space disk {(x^2 + p^2)/2 <= energy}."""

    energy: float

    def __post_init__(self):
        if not (self.energy > 0):
            raise ValueError(f"domain energy must be > 0, got {self.energy}")

    def contains(self, x: float, p: float) -> bool:
        return 0.5 * (x * x + p * p) <= self.energy

    def boundary_point(self, theta: float) -> PhasePoint:
        """Point sqrt(E) e^{i theta} of the boundary orbit, in (x, p)."""
        r = math.sqrt(2.0 * self.energy)
        return PhasePoint(r * math.cos(theta), -r * math.sin(theta))

    @property
    def bargmann_radius(self) -> float:
        """Radius of the disk in the z variable, sqrt(E)."""
        return math.sqrt(self.energy)


def hamilton_flow(
    h: Hamiltonian,
    start: PhasePoint,
    t: float,
    dt: float = 1e-3,
    return_path: bool = False,
):
    """Integrate Hamilton's equations with classic fixed-step RK4.

    Steps have size dt (the final one possibly shorter) and signed direction
    sign(t); the endpoint error for smooth H is O(dt^4 |t|).  Requires
    dt > 0 and |t|/dt <= 1e7.

    Returns the endpoint, or (endpoint, path) with path an (nsteps+1, 2)
    array of the visited (x, p) samples when return_path is set.

    Raises IntegrationError naming the step index if the state stops being
    finite (e.g. finite-time blowup of a non-quadratic H).
    """
    if not (dt > 0):
        raise ValueError(f"dt must be > 0, got {dt}")
    ratio = abs(t) / dt
    if ratio > MAX_FLOW_STEPS:
        raise ValueError(
            f"|t|/dt = {ratio:.3g} exceeds the step cap {MAX_FLOW_STEPS:g}; "
            "increase dt or split the interval"
        )

    nsteps = max(0, math.ceil(ratio - 1e-9))
    sign = 1.0 if t >= 0 else -1.0
    x, p = float(start.x), float(start.p)
    path = [(x, p)] if return_path else None
    gx = h.grad

    for i in range(nsteps):
        # last step absorbs the remainder so the endpoint lands exactly on t
        step = sign * dt if i < nsteps - 1 else t - sign * dt * (nsteps - 1)
        k1x, k1p = gx(x, p)
        k2x, k2p = gx(x + 0.5 * step * k1p, p - 0.5 * step * k1x)
        k3x, k3p = gx(x + 0.5 * step * k2p, p - 0.5 * step * k2x)
        k4x, k4p = gx(x + step * k3p, p - step * k3x)
        x = x + (step / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        p = p - (step / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        if not (math.isfinite(x) and math.isfinite(p)):
            raise IntegrationError(
                f"non-finite state at step {i + 1} of {nsteps} "
                f"(t = {sign * dt * i + step:.6g}): x = {x}, p = {p}"
            )
        if return_path:
            path.append((x, p))

    end = PhasePoint(x, p)
    if return_path:
        return end, np.array(path)
    return end


def poisson_bracket(h1: Hamiltonian, h2: Hamiltonian, at: PhasePoint) -> float:
    """{h1, h2} = dh1/dx dh2/dp - dh1/dp dh2/dx at the given point."""
    g1x, g1p = h1.grad(at.x, at.p)
    g2x, g2p = h2.grad(at.x, at.p)
    return g1x * g2p - g1p * g2x


def disk_integral(f, domain: Domain, nr: int = 64, ntheta: int = 256) -> float:
    """Integrate f(x, p) over the disk with respect to dx dp.

    Gauss-Legendre in the radial variable after the substitution u = r^2
    (which makes polynomial integrands polynomial in u, so low-degree
    integrands are integrated exactly), times a trapezoid/DFT sum in theta.
    Requires nr >= 4 and ntheta >= 4.
    """
    if nr < 4 or ntheta < 4:
        raise ValueError(f"need nr >= 4 and ntheta >= 4, got nr={nr}, ntheta={ntheta}")
    # int f dx dp = 1/2 int_0^{2E} du int_0^{2pi} f(sqrt(u) cos, sqrt(u) sin) dth
    nodes, weights = np.polynomial.legendre.leggauss(nr)
    u = domain.energy * (nodes + 1.0)  # [-1,1] -> [0, 2E]
    wu = domain.energy * weights
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    r = np.sqrt(u)
    xg = r[:, None] * np.cos(theta)[None, :]
    pg = r[:, None] * np.sin(theta)[None, :]
    try:
        vals = np.broadcast_to(np.asarray(f(xg, pg), dtype=float), xg.shape)
    except (TypeError, ValueError):
        vals = np.vectorize(f, otypes=[float])(xg, pg)  # scalar-only integrand
    inner_sum = vals.sum(axis=1) * (2.0 * np.pi / ntheta)
    return float(0.5 * np.dot(wu, inner_sum))


@dataclass(frozen=True)
class FourierCoefficients:
    """Fourier table c_j, j = -kmax..kmax, with h(theta) = sum c_j e^{ij theta}."""

    kmax: int
    values: np.ndarray  # complex, length 2*kmax + 1, ordered j = -kmax..kmax

    def __getitem__(self, j: int) -> complex:
        if abs(j) > self.kmax:
            raise IndexError(f"|j| = {abs(j)} exceeds kmax = {self.kmax}")
        return complex(self.values[j + self.kmax])


def orbit_fourier_coeffs(
    h: Hamiltonian, domain: Domain, kmax: int, nsamples: Optional[int] = None
) -> FourierCoefficients:
    """Fourier coefficients of h restricted to the boundary orbit.

    The orbit is theta -> sqrt(E) e^{i theta} (oscillator flow time), and the
    convention is unnormalized: h(theta) = sum_j c_j e^{ij theta}.  Sampling
    uses a plain DFT on nsamples >= 4*kmax + 4 equispaced angles, exact for
    trigonometric polynomials of degree <= kmax without aliasing from degrees
    up to 3*kmax + 3.  Coefficients of a real h satisfy c_{-j} = conj(c_j).
    """
    if kmax < 0:
        raise ValueError(f"kmax must be >= 0, got {kmax}")
    if nsamples is None:
        nsamples = 4 * kmax + 4
    if nsamples < 4 * kmax + 4:
        raise ValueError(
            f"nsamples = {nsamples} too small for kmax = {kmax}; need >= {4 * kmax + 4}"
        )
    theta = 2.0 * np.pi * np.arange(nsamples) / nsamples
    r = math.sqrt(2.0 * domain.energy)
    vals = np.asarray(h.value(r * np.cos(theta), -r * np.sin(theta)), dtype=float)
    spec = np.fft.fft(vals) / nsamples  # spec[j] = c_j for 0 <= j < nsamples, wrapped
    out = np.empty(2 * kmax + 1, dtype=complex)
    for j in range(-kmax, kmax + 1):
        out[j + kmax] = spec[j % nsamples]
    return FourierCoefficients(kmax=kmax, values=out)
