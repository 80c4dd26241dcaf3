from math import pi

import numpy as np
import pytest

from connlap.bundle import (almost_projection_defect, big_I, connection_pencil, flat_line_bundle_circle,
                            holonomy, i_pointwise, injectivity_check, nabla_K, projector_defect,
                            reference_points, trivial_bundle, twisted_de_rham, vector_form, weighted_mass)
from connlap.errors import InvalidInputError
from connlap.forms import SmoothForm, one_form
from connlap.geometry import preset_circle, preset_torus
from connlap.laplacian import assemble_degree0, cochain_from_smooth
from connlap.quadrature import simplex_quadrature
from connlap.simplicial import Cochain, coboundary_matrix
from connlap.spectra import solve_pencil, verify_spectrum
from connlap.whitney import mass_matrix
from oracles import shifted_squares

THETA = 0.6


def _bundle(n, theta=THETA):
    return preset_circle(n), flat_line_bundle_circle(theta, n)


def test_reference_points():
    T = preset_torus(3)
    K = T.complex
    edges = reference_points(T, 1)
    e = 4
    t = T.owner[1][e]
    loc = T.local[1][e]
    np.testing.assert_allclose(edges[e], T.coords[t][list(loc)].mean(axis=0))
    np.testing.assert_allclose(reference_points(T, 2), T.coords.mean(axis=1))
    verts = reference_points(T)[0]
    assert verts.shape == (K.count(0), 2)
    np.testing.assert_allclose(verts, T.vertex_points())


def test_trivial_pointwise_projection_is_identity():
    G = preset_circle(8)
    E = trivial_bundle(G, rank=2)
    _, _, P = i_pointwise(E, np.array([[0.1], [2.0]]))
    np.testing.assert_allclose(P, np.broadcast_to(np.eye(2), P.shape))


def test_flat_bundle_projection_trace_and_overlap_point():
    _, E = _bundle(16)
    x = np.linspace(0, 2 * pi, 101)[:, None]
    _, _, P = i_pointwise(E, x)
    np.testing.assert_allclose(np.trace(P, axis1=1, axis2=2), 1.0, atol=1e-14)
    np.testing.assert_allclose(P @ P, P, atol=1e-14)
    ix, _, P = i_pointwise(E, np.array([[pi]]))
    np.testing.assert_allclose(np.abs(ix[0, :, 0]), 1 / np.sqrt(2), atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(P[0]), [0.0, 1.0], atol=1e-14)


def test_embedding_isometric_at_samples():
    _, E = _bundle(32)
    x = np.random.default_rng(0).uniform(-1, 7, size=(1000, 1))
    ix, adj, _ = i_pointwise(E, x)
    np.testing.assert_allclose(adj @ ix, 1.0, atol=1e-12)
    for chart in E.charts:
        f = chart.frame(x)
        np.testing.assert_allclose(np.conj(np.swapaxes(f, 1, 2)) @ f, 1.0, atol=1e-12)


def test_partition_sums_and_supports():
    G, E = _bundle(32)
    nodes = np.einsum("mj,tjn->tmn", simplex_quadrature(1, 8).points, G.coords)
    np.testing.assert_allclose(E.partition_sum(nodes.reshape(-1, 1)), 1.0, atol=1e-12)
    for chart in E.charts:
        outside = [t for t in range(G.n_top) if t not in chart.support]
        assert outside
        vals = chart.partition(np.concatenate([nodes[outside].reshape(-1, 1), G.coords[outside].reshape(-1, 1)]))
        assert np.all(vals == 0)
        assert np.all(chart.partition(nodes.reshape(-1, 1)) >= 0)


def test_frames_continuous_on_support():
    G, E = _bundle(16)
    for chart in E.charts:
        for t in chart.support:
            f = chart.frame(G.coords[t])
            assert abs(f[0, 0, 0] - f[1, 0, 0]) < 0.2


def test_too_coarse_rejected():
    with pytest.raises(InvalidInputError):
        flat_line_bundle_circle(THETA, 5)


def test_big_I_single_chart_identity():
    G = preset_circle(8)
    E = trivial_bundle(G)
    for q in (0, 1):
        np.testing.assert_array_equal(big_I(G, E, q).toarray(), np.eye(G.complex.count(q)))


def test_big_I_degree0_is_vertex_evaluation():
    G, E = _bundle(16)
    c = np.random.default_rng(1).standard_normal(16) + 0j
    Ic = (big_I(G, E, 0) @ c).reshape(16, 2)
    iv = E.i(G.vertex_points())[:, :, 0]
    np.testing.assert_allclose(Ic, iv * c[:, None], atol=1e-15)


def test_big_I_constant_frames_scale_edges():
    G = preset_circle(8)
    U = np.array([[0.6, 0.0], [0.0, 1.0], [0.8, 0.0]], dtype=complex)
    E = trivial_bundle(G, lambda x: np.broadcast_to(U, (x.shape[0], 3, 2)).copy(), rank=2, ambient_dim=3)
    np.testing.assert_allclose(big_I(G, E, 1).toarray(), np.kron(np.eye(8), U))


def test_adjoint_is_conjugate_transpose():
    G, E = _bundle(16)
    rng = np.random.default_rng(2)
    for q in (0, 1):
        I = big_I(G, E, q)
        c = rng.standard_normal(I.shape[1]) + 1j * rng.standard_normal(I.shape[1])
        w = rng.standard_normal(I.shape[0]) + 1j * rng.standard_normal(I.shape[0])
        assert np.vdot(w, I @ c) == pytest.approx(np.vdot(I.conj().T @ w, c))


def test_nabla_single_chart_is_coboundary():
    G = preset_circle(9)
    E = trivial_bundle(G)
    d = coboundary_matrix(G.complex, 0).toarray()
    np.testing.assert_allclose(nabla_K(G, E).toarray(), d)
    assert np.abs(nabla_K(G, E) @ np.ones(9)).max() == 0


def test_no_parallel_section_with_holonomy():
    G, E = _bundle(16)
    c = np.ones(16, dtype=complex)
    assert np.linalg.norm(nabla_K(G, E) @ c) > 1e-3


def test_weighted_mass_trivial_matches_mass():
    G = preset_circle(10)
    E = trivial_bundle(G)
    for q in (0, 1):
        np.testing.assert_allclose(weighted_mass(G, E, q), mass_matrix(G, q).toarray(), atol=1e-14)


def test_weighted_mass_hermitian_psd():
    G, E = _bundle(16)
    for q in (0, 1):
        M = weighted_mass(G, E, q)
        np.testing.assert_allclose(M, M.conj().T, atol=1e-15)
        assert np.linalg.eigvalsh(M)[0] > 0


def test_injectivity():
    G, E = _bundle(32)
    assert injectivity_check(G, E, 0) > 0
    assert injectivity_check(G, E, 1) > 0
    Gt = preset_circle(12)
    assert injectivity_check(Gt, trivial_bundle(Gt), 1) == pytest.approx(
        np.linalg.eigvalsh(mass_matrix(Gt, 1).toarray())[0])


def test_trivial_pencil_matches_untwisted_laplacian():
    G = preset_circle(12)
    P = connection_pencil(G, trivial_bundle(G))
    Q = assemble_degree0(G, Cochain(1, np.zeros(12)))
    np.testing.assert_allclose(P.S, Q.S, atol=1e-13)
    np.testing.assert_allclose(P.M, Q.M, atol=1e-14)


def test_zero_holonomy_has_parallel_section():
    # with theta = 0 the constant section is parallel exactly: the connection terms
    # telescope to half the change of sum psi_l^2 along each edge
    for n in (16, 32, 64):
        G, E = _bundle(n, 0.0)
        assert np.abs(nabla_K(G, E) @ np.ones(n)).max() <= 1e-14
        assert abs(solve_pencil(connection_pencil(G, E), 1).eigenvalues[0]) <= 1e-10


def test_flat_bundle_lowest_eigenvalue():
    n = 64
    P = connection_pencil(*_bundle(n))
    s = solve_pencil(P, 3)
    assert verify_spectrum(P, s).passed
    assert abs(s.eigenvalues[0] - (THETA / (2 * pi)) ** 2) <= 2 * pi / n
    np.testing.assert_allclose(s.eigenvalues, shifted_squares(THETA / (2 * pi), 3), atol=0.05)


def test_holonomy():
    G, E = _bundle(256)
    U = holonomy(E, G.vertex_points())
    assert abs(U[0, 0] - np.exp(1j * THETA)) <= 1e-2
    G0, E0 = _bundle(64, 0.0)
    assert abs(holonomy(E0, G0.vertex_points())[0, 0] - 1) <= 1e-12


def _test_form(q):
    return vector_form([lambda x: np.cos(x[:, 0]), lambda x: np.sin(2 * x[:, 0]) + 0.3], q)


def test_almost_projection_degree0_identity():
    for n in (16, 40):
        G, E = _bundle(n)
        assert almost_projection_defect(G, E, 0, _test_form(0)) <= 1e-12


def test_almost_projection_degree1_decays():
    vals = [almost_projection_defect(*_bundle(n), 1, _test_form(1)) for n in (16, 32, 64, 128)]
    assert np.all(np.diff(vals) < 0)
    assert np.log2(vals[-2] / vals[-1]) >= 0.9


def test_almost_projection_trivial_chart():
    G = preset_circle(16)
    E = trivial_bundle(G)
    f = SmoothForm(1, lambda x: np.sin(x[:, 0]))
    for q in (0, 1):
        form = SmoothForm(q, f.func)
        assert almost_projection_defect(G, E, q, form) <= 1e-12


def test_projector_defect_decreases():
    vals = [projector_defect(*_bundle(n), 1) for n in (16, 32, 64, 128)]
    assert np.all(np.diff(vals) < 0)
    assert projector_defect(*_bundle(32), 0) <= 1e-14


def test_twisted_de_rham_of_section():
    G, E = _bundle(16)
    f = SmoothForm(0, lambda x: np.exp(1j * x[:, 0]))
    c = twisted_de_rham(G, E, f).values
    np.testing.assert_allclose(c, np.exp(1j * G.vertex_points()[:, 0]), atol=1e-14)


def test_cross_scheme_consistency():
    phi = lambda x: 0.5 * np.sin(x[:, 0])  # noqa: E731
    A = one_form(lambda x: 0.5 * np.cos(x[:, 0])[:, None])
    gaps = []
    for n in (32, 64):
        G = preset_circle(n)
        E = trivial_bundle(G, lambda x: np.exp(1j * phi(x))[:, None, None])
        w1 = solve_pencil(connection_pencil(G, E), 3).eigenvalues
        w2 = solve_pencil(assemble_degree0(G, cochain_from_smooth(G, A)), 3).eigenvalues
        gaps.append(np.abs(w1 - w2).max())
    assert gaps[0] / gaps[1] >= 1.8
