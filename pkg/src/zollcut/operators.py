"""Cut observables as banded Hermitian matrices, and their edge Toeplitz models.

On the weighted-monomial basis b_n the two built-in observables act as

    oscillator:  diag(hbar (n + 1/2))                       (bandwidth 0)
    saddle:      A[n+2, n] = A[n, n+2] = hbar sqrt((n+1)(n+2)), zero diagonal
                                                            (bandwidth 2)

with hbar = 1/N.  The spectral projector onto indices 0..cutoff is a 0/1
diagonal, and cutting an observable means truncating it to that block.  All
entries are real, so Hermitian means exactly symmetric here, and symmetry and
band support are enforced at construction rather than trusted.

The edge of a cut matrix is modeled by a Toeplitz matrix built from the
boundary-orbit Fourier coefficients of the classical symbol: rows and columns
are counted inward from the cutoff corner, T[j, k] = c_{k - j}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from zollcut.bargmann import SimulationScale
from zollcut.phase import FourierCoefficients


@dataclass(frozen=True)
class BandedHermitian:
    """Real symmetric matrix with declared bandwidth (enforced, not assumed)."""

    scale: SimulationScale
    mat: NDArray[np.float64]
    bandwidth: int
    _eig_cache: Optional[tuple] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        m = np.array(self.mat, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"matrix must be square and nonempty, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        if not np.array_equal(m, m.T):
            raise ValueError("matrix must be exactly symmetric")
        if self.bandwidth < 0:
            raise ValueError(f"bandwidth must be >= 0, got {self.bandwidth}")
        d = m.shape[0]
        for k in range(self.bandwidth + 1, d):
            if np.any(np.diagonal(m, k) != 0.0):
                raise ValueError(
                    f"entry outside declared bandwidth {self.bandwidth} on diagonal {k}"
                )
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dense(self) -> np.ndarray:
        """Writable copy of the full matrix."""
        return self.mat.copy()

    def entry(self, m: int, n: int) -> float:
        return float(self.mat[m, n])

    def trace(self) -> float:
        return float(np.trace(self.mat))

    def nonzeros(self) -> Iterator[Tuple[int, int, float]]:
        """(i, j, value) triples of nonzero entries, row-major order."""
        for i, j in zip(*np.nonzero(self.mat)):
            yield int(i), int(j), float(self.mat[i, j])


def build_q_matrix(scale: SimulationScale, dim: int) -> BandedHermitian:
    """Matrix of the saddle observable x^2 - p^2 on basis indices 0..dim-1.

    Zero diagonal, entries hbar sqrt((n+1)(n+2)) two off the diagonal; the
    trace of any truncation is exactly 0.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    m = np.zeros((dim, dim))
    if dim > 2:
        n = np.arange(dim - 2, dtype=float)
        off = np.sqrt((n + 1.0) * (n + 2.0)) / scale.N
        idx = np.arange(dim - 2)
        m[idx + 2, idx] = off
        m[idx, idx + 2] = off
    return BandedHermitian(scale=scale, mat=m, bandwidth=2)


def build_oscillator_matrix(scale: SimulationScale, dim: int) -> BandedHermitian:
    """Diagonal matrix of the oscillator, eigenvalues hbar (n + 1/2)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    n = np.arange(dim, dtype=float)
    return BandedHermitian(scale=scale, mat=np.diag((n + 0.5) / scale.N), bandwidth=0)


def build_projector(
    scale: SimulationScale, cutoff_index: int, dim: Optional[int] = None
) -> BandedHermitian:
    """Spectral projector onto oscillator levels 0..cutoff_index.

    dim is the ambient dimension (default cutoff_index + 1); commutator
    experiments need dim >= cutoff_index + 3 or the straddling entries of
    [projector, observable] fall outside the matrix.
    """
    if cutoff_index < 0:
        raise ValueError(f"cutoff_index must be >= 0, got {cutoff_index}")
    if dim is None:
        dim = cutoff_index + 1
    if dim < cutoff_index + 1:
        raise ValueError(f"dim = {dim} cannot hold cutoff_index = {cutoff_index}")
    diag = np.zeros(dim)
    diag[: cutoff_index + 1] = 1.0
    return BandedHermitian(scale=scale, mat=np.diag(diag), bandwidth=0)


def _projector_cutoff(proj: BandedHermitian) -> int:
    """Cutoff index of a 0/1 prefix projector; rejects anything else."""
    d = proj.mat.diagonal()
    if np.any(proj.mat - np.diag(d)):
        raise ValueError("projector must be diagonal")
    ones = int(np.sum(d == 1.0))
    expected = np.zeros(proj.dim)
    expected[:ones] = 1.0
    if ones == 0 or not np.array_equal(d, expected):
        raise ValueError("projector diagonal must be 1,...,1,0,...,0 with at least one 1")
    return ones - 1


def cut_operator(op: BandedHermitian, proj: BandedHermitian) -> BandedHermitian:
    """Compress an observable by a prefix projector: the block 0..cutoff.

    Equals proj @ op @ proj restricted to the range of the projector; the
    dropped rows/columns are exactly the ones the projector kills.
    """
    if op.dim != proj.dim:
        raise ValueError(f"dimension mismatch: op is {op.dim}, projector is {proj.dim}")
    if op.scale.N != proj.scale.N:
        raise ValueError(f"scale mismatch: N={op.scale.N} vs N={proj.scale.N}")
    c = _projector_cutoff(proj)
    block = op.mat[: c + 1, : c + 1]
    return BandedHermitian(
        scale=op.scale, mat=block, bandwidth=min(op.bandwidth, c)
    )


def commutator(a: BandedHermitian, b: BandedHermitian) -> np.ndarray:
    """[a, b] = ab - ba, exactly antisymmetric in floating point.

    For symmetric a, b the product ba equals (ab)^T entrywise, so the
    commutator is computed as C - C^T of the single product C = ab; exact
    antisymmetry then holds by construction, not up to rounding.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    c = a.mat @ b.mat
    return c - c.T


@dataclass(frozen=True)
class ToeplitzFiber:
    """Toeplitz model of the cut-matrix edge: T[j, k] = c_{k-j}."""

    coeffs: FourierCoefficients
    K: int
    mat: NDArray[np.complex128]

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex, copy=True)
        if m.shape != (self.K, self.K):
            raise ValueError(f"matrix shape {m.shape} does not match K = {self.K}")
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)


def fiber_toeplitz(coeffs: FourierCoefficients, K: int) -> ToeplitzFiber:
    """K x K Toeplitz matrix of the symbol h(theta) = sum c_j e^{ij theta}."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    m = np.zeros((K, K), dtype=complex)
    for j in range(K):
        for k in range(K):
            d = k - j
            if abs(d) <= coeffs.kmax:
                m[j, k] = coeffs[d]
    return ToeplitzFiber(coeffs=coeffs, K=K, mat=m)


def edge_symbol_error(cut: BandedHermitian, fiber: ToeplitzFiber, K: int) -> float:
    """Max deviation between the cutoff corner of a cut matrix and its model.

    Corner indices count inward from the last row/column: entry (j, k) of the
    model is compared with cut[c - j, c - k], c = cut.dim - 1.  Requires
    K <= cut.dim and K <= fiber.K.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K > cut.dim or K > fiber.K:
        raise ValueError(
            f"K = {K} exceeds the available corner (cut dim {cut.dim}, fiber K {fiber.K})"
        )
    c = cut.dim - 1
    corner = cut.mat[c - K + 1 :, c - K + 1 :][::-1, ::-1]  # corner[j, k] = cut[c-j, c-k]
    return float(np.max(np.abs(corner - fiber.mat[:K, :K])))
