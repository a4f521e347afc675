"""Spectral decomposition, matrix functions, and coherent-state propagation.

Propagation is spectral, not time-stepped: for a cut observable M and the
scale N, the evolved coefficient vector is V e^{-i t N Lambda} V^T c.  The
phase matrix is exactly unitary up to the orthogonality defect of V, so norms
are preserved to ~1e-14 regardless of t, and forward/backward evolution
cancels phase by phase.

Decompositions are cached on the matrix object; repeated propagation at many
times costs one dense eigendecomposition total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from zollcut.bargmann import BargmannState
from zollcut.operators import BandedHermitian


class EigenConvergenceError(RuntimeError):
    """Eigendecomposition failed to converge."""


class NonFiniteFunctionError(ValueError):
    """A matrix function produced a non-finite value on some eigenvalue."""


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues ascending; eigenvectors as columns, sign-normalized."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float, copy=True)
        vec = np.array(self.eigenvectors, dtype=float, copy=True)
        if lam.ndim != 1 or vec.shape != (lam.size, lam.size):
            raise ValueError(
                f"inconsistent shapes: {lam.shape} eigenvalues, {vec.shape} vectors"
            )
        if np.any(np.diff(lam) < 0):
            raise ValueError("eigenvalues must be ascending")
        lam.flags.writeable = False
        vec.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", vec)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def eigendecompose(m: BandedHermitian) -> EigenSystem:
    """Full symmetric eigendecomposition with a deterministic gauge.

    Eigenvalues ascending; each eigenvector is flipped so its largest-|.|
    component (first such index on ties) is positive.  The result is cached
    on the matrix, so repeated calls are free.
    """
    if m._eig_cache is not None:
        return m._eig_cache[0]
    try:
        lam, vec = np.linalg.eigh(m.mat)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"eigendecomposition did not converge: dim={m.dim}, "
            f"max|entry|={np.max(np.abs(m.mat)):.3g}, bandwidth={m.bandwidth}: {exc}"
        ) from exc
    # deterministic sign gauge, stable under LAPACK build differences
    anchor = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[anchor, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    vec = vec * signs
    system = EigenSystem(eigenvalues=lam, eigenvectors=vec)
    object.__setattr__(m, "_eig_cache", (system,))
    return system


def apply_function(m: BandedHermitian, f: Callable) -> np.ndarray:
    """V f(Lambda) V^T for a scalar function f applied to the spectrum.

    Raises NonFiniteFunctionError naming the offending eigenvalue if f
    produces inf or nan on it.
    """
    system = eigendecompose(m)
    lam = system.eigenvalues
    try:
        fvals = np.asarray(f(lam), dtype=float)
        if fvals.shape != lam.shape:
            raise TypeError
    except (TypeError, ValueError):
        fvals = np.array([float(f(v)) for v in lam])
    bad = np.flatnonzero(~np.isfinite(fvals))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteFunctionError(
            f"f({lam[i]!r}) = {fvals[i]!r} is not finite (eigenvalue index {i})"
        )
    v = system.eigenvectors
    return (v * fvals) @ v.T


def propagate(m: BandedHermitian, state: BargmannState, t: float) -> BargmannState:
    """Evolve a state by e^{-i t N M}: coefficients V e^{-i t N Lambda} V^T c.

    The state is zero-padded to the matrix dimension; a state longer than the
    matrix, or built at a different scale, is an error.
    """
    if state.scale.N != m.scale.N:
        raise ValueError(f"scale mismatch: state N={state.scale.N}, matrix N={m.scale.N}")
    if state.dim > m.dim:
        raise ValueError(
            f"state dimension {state.dim} exceeds matrix dimension {m.dim}"
        )
    system = eigendecompose(m)
    c = np.zeros(m.dim, dtype=complex)
    c[: state.dim] = state.coeffs
    v = system.eigenvectors
    phases = np.exp(-1j * t * m.scale.N * system.eigenvalues)
    out = v @ (phases * (v.T @ c))
    return BargmannState(state.scale, out)
