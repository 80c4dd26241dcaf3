import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connlap.errors import MassDegenerateError
from connlap.geometry import preset_circle
from connlap.laplacian import OperatorPencil, assemble_degree0
from connlap.simplicial import Cochain
from connlap.spectra import Spectrum, solve_pencil, verify_spectrum
from oracles import circle_untwisted_eigenvalues


def _random_pencil(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Y = rng.standard_normal((n, n))
    return X @ X.conj().T, Y @ Y.T + n * np.eye(n)


def test_diagonal_example():
    s = solve_pencil((np.diag([0.0, 1.0, 4.0]), np.eye(3)))
    np.testing.assert_allclose(s.eigenvalues, [0, 1, 4], atol=1e-14)


def test_two_by_two_example():
    S = np.array([[2.0, -1.0], [-1.0, 2.0]])
    M = np.array([[2.0, 1.0], [1.0, 2.0]]) / 3
    np.testing.assert_allclose(solve_pencil((S, M)).eigenvalues, [1.0, 9.0], atol=1e-12)


def test_circle_pencil_matches_circulant():
    P = assemble_degree0(preset_circle(16), Cochain(1, np.zeros(16)))
    s = solve_pencil(P)
    np.testing.assert_allclose(s.eigenvalues, circle_untwisted_eigenvalues(16), atol=1e-9)
    assert verify_spectrum(P, s).passed


def test_subset_equals_full_prefix():
    S, M = _random_pencil(30, 0)
    full = solve_pencil((S, M)).eigenvalues
    part = solve_pencil((S, M), 7).eigenvalues
    np.testing.assert_allclose(part, full[:7], rtol=1e-10, atol=1e-10)


def test_non_pd_mass_rejected():
    with pytest.raises(MassDegenerateError):
        solve_pencil((np.eye(2), np.diag([1.0, -1.0])))
    with pytest.raises(MassDegenerateError):
        solve_pencil((np.eye(2), np.diag([1.0, 1e-14])))


def test_verify_detects_perturbed_eigenvalue():
    S, M = _random_pencil(12, 1)
    P = OperatorPencil(S, M, 0)
    s = solve_pencil(P)
    report = verify_spectrum(P, s)
    assert report.passed and report.max_orthogonality_defect <= 1e-9
    w = s.eigenvalues.copy()
    w[3] += 1e-3
    bad = verify_spectrum(P, Spectrum(w, s.eigenvectors, s.residual_norms))
    assert not bad.passed
    assert bad.max_residual > 1e-9


def test_deterministic():
    S, M = _random_pencil(20, 2)
    a, b = solve_pencil((S, M)), solve_pencil((S, M))
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10 ** 6))
def test_permutation_similarity(n, seed):
    S, M = _random_pencil(n, seed)
    p = np.random.default_rng(seed).permutation(n)
    w1 = solve_pencil((S, M)).eigenvalues
    w2 = solve_pencil((S[np.ix_(p, p)], M[np.ix_(p, p)])).eigenvalues
    np.testing.assert_allclose(w1, w2, atol=1e-10 * max(1.0, abs(w1).max()))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10 ** 6), st.floats(1e-3, 1e3))
def test_scaling_invariance(n, seed, c):
    S, M = _random_pencil(n, seed)
    w1 = solve_pencil((S, M)).eigenvalues
    w2 = solve_pencil((c * S, c * M)).eigenvalues
    np.testing.assert_allclose(w1, w2, rtol=1e-9, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10 ** 6))
def test_solutions_always_verify(n, seed):
    S, M = _random_pencil(n, seed)
    s = solve_pencil((S, M))
    assert verify_spectrum((S, M), s).passed
    assert np.all(np.diff(s.eigenvalues) >= 0)
