import math

import numpy as np
import pytest

from zollcut.bargmann import BargmannState, SimulationScale, coherent_state
from zollcut.operators import (
    BandedHermitian,
    build_oscillator_matrix,
    build_projector,
    build_q_matrix,
    cut_operator,
)
from zollcut.spectral import (
    NonFiniteFunctionError,
    apply_function,
    eigendecompose,
    propagate,
)

RNG = np.random.default_rng(555001)


def random_symmetric(scale, dim, rng=RNG):
    a = rng.normal(size=(dim, dim))
    return BandedHermitian(scale=scale, mat=a + a.T, bandwidth=dim - 1)


def charpoly_coefficients(m):
    """Leverrier-Faddeev recursion; no eigensolver involved."""
    d = m.shape[0]
    coeffs = [1.0]
    mk = np.array(m, dtype=float)
    for k in range(1, d + 1):
        ck = -np.trace(mk) / k
        coeffs.append(ck)
        if k < d:
            mk = m @ (mk + ck * np.eye(d))
    return np.array(coeffs)


def series_expm(a, terms=80):
    """Plain Taylor series for e^A; oracle for small ||A||."""
    d = a.shape[0]
    out = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def saddle_cut(N):
    s = SimulationScale(N)
    return cut_operator(build_q_matrix(s, N + 1), build_projector(s, N))


def test_eigenvalues_ascending_and_orthonormal():
    for dim in (3, 10, 41):
        m = random_symmetric(SimulationScale(7), dim)
        sys_ = eigendecompose(m)
        lam, v = sys_.eigenvalues, sys_.eigenvectors
        assert np.all(np.diff(lam) >= 0)
        assert np.max(np.abs(v.T @ v - np.eye(dim))) <= 1e-10
        # reconstruction M V = V Lambda
        resid = np.max(np.abs(m.mat @ v - v * lam))
        assert resid <= 1e-9 * np.max(np.abs(m.mat)) * dim


def test_eigendecompose_diagonal_is_exact():
    s = SimulationScale(10)
    m = build_oscillator_matrix(s, 6)
    sys_ = eigendecompose(m)
    assert np.array_equal(sys_.eigenvalues, np.diag(m.mat))
    assert np.array_equal(sys_.eigenvectors, np.eye(6))


def test_eigendecompose_sign_gauge_and_cache():
    m = saddle_cut(30)
    first = eigendecompose(m)
    assert eigendecompose(m) is first  # cached
    # largest-|component| entry of every eigenvector is positive
    v = first.eigenvectors
    anchors = np.argmax(np.abs(v), axis=0)
    assert np.all(v[anchors, np.arange(v.shape[1])] > 0)
    # identical matrix built separately decomposes to identical bits
    again = eigendecompose(saddle_cut(30))
    assert np.array_equal(first.eigenvalues, again.eigenvalues)
    assert np.array_equal(first.eigenvectors, again.eigenvectors)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_eigenvalues_match_characteristic_polynomial(dim):
    # independent oracle: char-poly roots via the companion matrix
    for _ in range(6):
        m = random_symmetric(SimulationScale(3), dim)
        lam = eigendecompose(m).eigenvalues
        roots = np.sort(np.roots(charpoly_coefficients(m.mat)).real)
        assert np.max(np.abs(lam - roots)) <= 1e-10


def test_saddle_spectrum_is_symmetric():
    # the cut saddle matrix anticommutes with parity: spectrum symmetric
    lam = eigendecompose(saddle_cut(40)).eigenvalues
    assert np.max(np.abs(lam + lam[::-1])) <= 1e-12


def test_apply_function_identity_and_square():
    m = saddle_cut(25)
    ident = apply_function(m, lambda lam: np.ones_like(lam))
    assert np.max(np.abs(ident - np.eye(m.dim))) <= 1e-10
    recon = apply_function(m, lambda lam: lam)
    assert np.max(np.abs(recon - m.mat)) <= 1e-10
    sq = apply_function(m, lambda lam: lam**2)
    assert np.max(np.abs(sq - m.mat @ m.mat)) <= 1e-9


def test_apply_function_product_law():
    m = saddle_cut(20)
    f = lambda lam: np.cos(lam)
    g = lambda lam: lam**2 + 0.5
    fg = apply_function(m, lambda lam: f(lam) * g(lam))
    sep = apply_function(m, f) @ apply_function(m, g)
    assert np.max(np.abs(fg - sep)) <= 1e-9


def test_apply_function_scalar_callable():
    m = saddle_cut(8)
    via_math = apply_function(m, lambda lam: math.exp(lam))
    via_numpy = apply_function(m, np.exp)
    assert np.max(np.abs(via_math - via_numpy)) <= 1e-12


def test_apply_function_nonfinite_names_eigenvalue():
    s = SimulationScale(5)
    m = build_oscillator_matrix(s, 4)  # eigenvalues 0.1, 0.3, ...
    with pytest.raises(NonFiniteFunctionError, match="0.1"):
        with np.errstate(divide="ignore"):
            apply_function(m, lambda lam: 1.0 / (lam - 0.1))


def test_propagate_matches_series_exponential():
    # spectral propagation against a brute-force Taylor series at small N
    N = 6
    m = saddle_cut(N)
    scale = SimulationScale(N)
    state = coherent_state(complex(0.3, -0.2), scale, m.dim - 1)
    t = 0.37
    u = series_expm(-1j * t * N * m.mat)
    expect = u @ state.coeffs
    got = propagate(m, state, t)
    assert np.max(np.abs(got.coeffs - expect)) <= 1e-10


def test_propagate_preserves_norm():
    m = saddle_cut(120)
    scale = SimulationScale(120)
    for trial in range(4):
        c = RNG.normal(size=m.dim) + 1j * RNG.normal(size=m.dim)
        state = BargmannState(scale, c)
        for t in (0.5, 2.0, 17.0):
            out = propagate(m, state, t)
            assert abs(out.norm() - state.norm()) <= 1e-10


def test_propagate_reversibility():
    m = saddle_cut(100)
    scale = SimulationScale(100)
    state = coherent_state(complex(-0.25, -0.6), scale, m.dim - 1)
    for t in (0.25, 1.0, 3.0):
        back = propagate(m, propagate(m, state, t), -t)
        assert np.linalg.norm(back.coeffs - state.coeffs) <= 1e-8


def test_propagate_group_law():
    m = saddle_cut(60)
    scale = SimulationScale(60)
    state = coherent_state(complex(0.4, 0.2), scale, m.dim - 1)
    one = propagate(m, state, 0.7)
    two = propagate(m, propagate(m, state, 0.3), 0.4)
    assert np.max(np.abs(one.coeffs - two.coeffs)) <= 1e-9


def test_propagate_zero_pads_short_states():
    m = saddle_cut(12)
    scale = SimulationScale(12)
    short = BargmannState(scale, np.array([1.0 + 0j, 0.5]))
    out = propagate(m, short, 0.3)
    assert out.dim == m.dim
    full = BargmannState(scale, np.pad(short.coeffs, (0, m.dim - 2)))
    ref = propagate(m, full, 0.3)
    assert np.array_equal(out.coeffs, ref.coeffs)


def test_propagate_mismatch_errors():
    m = saddle_cut(12)
    with pytest.raises(ValueError, match="scale"):
        propagate(m, BargmannState(SimulationScale(13), np.ones(3, dtype=complex)), 0.1)
    with pytest.raises(ValueError, match="dimension"):
        propagate(m, BargmannState(SimulationScale(12), np.ones(50, dtype=complex)), 0.1)


def test_oscillator_propagation_is_diagonal_phases():
    # diagonal generator: c_n(t) = e^{-i t N hbar (n+1/2)} c_n = e^{-i t (n+1/2)} c_n
    N = 50
    scale = SimulationScale(N)
    m = build_oscillator_matrix(scale, N + 1)
    state = coherent_state(complex(0.3, 0.1), scale, N)
    t = 1.3
    out = propagate(m, state, t)
    n = np.arange(N + 1)
    expect = state.coeffs * np.exp(-1j * t * (n + 0.5))
    assert np.max(np.abs(out.coeffs - expect)) <= 1e-12
