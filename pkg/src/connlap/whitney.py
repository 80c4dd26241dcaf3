"""Whitney and de Rham maps, exact simplex moments and Whitney mass matrices.

On a top simplex with barycentric coordinates ``mu_0..mu_N`` the Whitney form of
a q-face ``[v_0..v_q]`` is

    q! * sum_i (-1)^i mu_i dmu_0 ^ ... ^ (omit dmu_i) ^ ... ^ dmu_q,

which is affine in the ``mu``. Everything below works with its coefficients on
``mu_j``: ``W(x) = sum_j mu_j(x) * coef[j]``.
"""

from __future__ import annotations

from itertools import combinations
from math import comb, factorial

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateMetricError, InvalidInputError
from .forms import SmoothForm, exterior_derivative_constant, form_basis
from .geometry import GeometricComplex
from .quadrature import points_for_degree, simplex_quadrature
from .simplicial import Cochain, coboundary_matrix

DEFAULT_QUAD_ORDER = 8


def local_faces(N: int, q: int) -> list[tuple[int, ...]]:
    return list(combinations(range(N + 1), q + 1))


def simplex_moment(G: GeometricComplex, top: int, exponents) -> float:
    """Exact integral of ``prod_i mu_i^k_i`` over a top simplex."""
    k = [int(e) for e in exponents]
    if len(k) != G.dim + 1 or min(k) < 0:
        raise InvalidInputError("need one non-negative exponent per vertex")
    num = factorial(G.dim)
    for e in k:
        num *= factorial(e)
    return float(G.volumes[top]) * num / factorial(G.dim + sum(k))


def whitney_coefficients(G: GeometricComplex, q: int) -> np.ndarray:
    """Array ``(n_top, F, N+1, C(N,q))`` of Whitney-form coefficients on each ``mu_j``."""
    key = ("whitney_coef", q)
    if key in G._cache:
        return G._cache[key]
    N = G.dim
    faces = local_faces(N, q)
    basis = form_basis(N, q)
    coef = np.zeros((G.n_top, len(faces), N + 1, len(basis)))
    if q == 0:
        for f, (v,) in enumerate(faces):
            coef[:, f, v, 0] = 1.0
    else:
        for f, face in enumerate(faces):
            for i, v in enumerate(face):
                rest = list(face[:i] + face[i + 1:])
                sign = factorial(q) * (-1) ** i
                for c, I in enumerate(basis):
                    sub = G.grad[:, rest][:, :, list(I)]
                    coef[:, f, v, c] += sign * np.linalg.det(sub)
    G._cache[key] = coef
    return coef


def _gather(G: GeometricComplex, values: np.ndarray, q: int, fiber: int) -> np.ndarray:
    """Cochain values arranged per top simplex: ``(n_top, F, fiber)``."""
    return values.reshape(-1, fiber)[G.complex.face_index[q]]


def whitney_field(G: GeometricComplex, values: np.ndarray, q: int, bary: np.ndarray,
                  fiber: int = 1) -> np.ndarray:
    """Evaluate ``W c`` on every top simplex at barycentric points ``(m, N+1)``.

    Returns ``(n_top, m, C(N,q), fiber)``.
    """
    coef = whitney_coefficients(G, q)
    local = _gather(G, np.asarray(values), q, fiber)
    return np.einsum("tfjc,mj,tfe->tmce", coef, bary, local)


def whitney_derivative(G: GeometricComplex, values: np.ndarray, q: int, fiber: int = 1) -> np.ndarray:
    """``d(W c)`` on every top simplex (constant there): ``(n_top, C(N,q+1), fiber)``.

    Computed from the partial derivatives of the affine coefficients, not from
    the coboundary.
    """
    coef = whitney_coefficients(G, q)
    local = _gather(G, np.asarray(values), q, fiber)
    partials = np.einsum("tjk,tfjc,tfe->tekc", G.grad, coef, local)
    return np.moveaxis(exterior_derivative_constant(partials, G.dim, q), 1, -1)


def _check_bary(G: GeometricComplex, point) -> np.ndarray:
    b = np.asarray(point, dtype=float)
    if b.shape != (G.dim + 1,) or abs(b.sum() - 1) > 1e-12 or b.min() < -1e-12:
        raise InvalidInputError(f"{point} is not a barycentric point of a top simplex")
    return b


def whitney_eval(G: GeometricComplex, c: Cochain, top: int, point) -> np.ndarray:
    """Value of ``W c`` at one barycentric point of top simplex ``top``.

    Returns the ``C(N,q)`` chart components (``(C(N,q), fiber)`` for vector cochains).
    For ``q = 0`` this is ``sum_v c(v) mu_v``.
    """
    b = _check_bary(G, point)
    c.check(G.complex)
    coef = whitney_coefficients(G, c.degree)[top]
    local = np.asarray(c.values).reshape(-1, c.fiber_dim)[G.complex.face_index[c.degree][top]]
    val = np.einsum("fjc,j,fe->ce", coef, b, local)
    return val[:, 0] if c.fiber_dim == 1 else val


def mass_matrix(G: GeometricComplex, q: int, fiber_dim: int = 1) -> sp.csr_matrix:
    """Gram matrix of Whitney forms, ``<W sigma, W tau>_{L^2}``, in closed form.

    Uses ``int mu_a mu_b = vol (1 + delta_ab) / ((N+1)(N+2))`` and
    ``<dmu_A, dmu_B> = det(grad_gram[A, B])``. Vector cochains get the Kronecker
    extension ``M_q (x) I``.
    """
    N = G.dim
    if not 0 <= q <= N:
        raise InvalidInputError(f"degree {q} out of range")
    key = ("mass", q)
    if key not in G._cache:
        faces = local_faces(N, q)
        F = len(faces)
        mom = (np.ones((N + 1, N + 1)) + np.eye(N + 1)) / ((N + 1) * (N + 2))
        mom = G.volumes[:, None, None] * mom
        local = np.zeros((G.n_top, F, F))
        gg = G.grad_gram
        qf2 = factorial(q) ** 2
        for a, fa in enumerate(faces):
            for b, fb in enumerate(faces):
                if q == 0:
                    local[:, a, b] = mom[:, fa[0], fb[0]]
                    continue
                acc = np.zeros(G.n_top)
                for i, vi in enumerate(fa):
                    ra = list(fa[:i] + fa[i + 1:])
                    for k, vk in enumerate(fb):
                        rb = list(fb[:k] + fb[k + 1:])
                        det = np.linalg.det(gg[:, ra][:, :, rb])
                        acc += (-1) ** (i + k) * mom[:, vi, vk] * det
                local[:, a, b] = qf2 * acc
        if F and np.linalg.eigvalsh(local).min(axis=1).min() <= 1e-14 * np.abs(local).max():
            raise DegenerateMetricError(f"Whitney mass matrix in degree {q} is not positive definite")
        fi = G.complex.face_index[q]
        rows = np.repeat(fi, F, axis=1).ravel()
        cols = np.tile(fi, (1, F)).ravel()
        n = G.complex.count(q)
        M = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        G._cache[key] = 0.5 * (M + M.T)
    M = G._cache[key]
    if fiber_dim == 1:
        return M
    return sp.kron(M, sp.identity(fiber_dim), format="csr")


def _pullback_minors(points: np.ndarray, N: int) -> np.ndarray:
    """``det(E[:, I])`` for edge vectors ``E`` of simplices with vertices ``points[..., q+1, N]``."""
    q = points.shape[-2] - 1
    E = points[..., 1:, :] - points[..., :1, :]
    out = np.empty(points.shape[:-2] + (comb(N, q),))
    for c, I in enumerate(form_basis(N, q)):
        out[..., c] = np.linalg.det(E[..., list(I)]) if q else 1.0
    return out


def integrate_over_simplices(points: np.ndarray, field, order: int) -> np.ndarray:
    """Integrate a q-form over simplices given by chart vertices ``(k, q+1, N)``.

    ``field(x)`` receives points ``(k, m, N)`` and returns ``(k, m, C(N,q), fiber)``.
    Returns ``(k, fiber)``.
    """
    k, qp1, N = points.shape
    q = qp1 - 1
    rule = simplex_quadrature(q, order)
    x = np.einsum("mj,sjn->smn", rule.points, points)
    vals = field(x)
    minors = _pullback_minors(points, N)
    return np.einsum("m,smce,sc->se", rule.weights, vals, minors) / factorial(q)


def _smooth_field(form: SmoothForm):
    def field(x):
        k, m, N = x.shape
        return form(x.reshape(k * m, N)).reshape(k, m, -1, form.fiber_dim)
    return field


def de_rham(G: GeometricComplex, form: SmoothForm, order: int = DEFAULT_QUAD_ORDER) -> Cochain:
    """Integrate a smooth q-form over every q-simplex (vertex evaluation for q = 0)."""
    q = form.degree
    if not 0 <= q <= G.dim:
        raise InvalidInputError(f"form degree {q} out of range")
    pts = G.simplex_points(q)
    if q == 0:
        vals = form(pts[:, 0, :])[:, 0, :]
    else:
        vals = integrate_over_simplices(pts, _smooth_field(form), order)
    fiber = form.fiber_dim
    out = vals.ravel()
    if not np.iscomplexobj(out):
        out = out.astype(float)
    return Cochain(q, out, fiber)


def _local_whitney_integrals(G: GeometricComplex, q: int):
    """``R W`` restricted to each top simplex: ``(n_top, F_target, F_source)``."""
    faces = local_faces(G.dim, q)
    coef = whitney_coefficients(G, q)
    rule = simplex_quadrature(q, points_for_degree(2))
    out = np.empty((G.n_top, len(faces), len(faces)))
    for g, face in enumerate(faces):
        bary = np.zeros((rule.points.shape[0], G.dim + 1))
        bary[:, list(face)] = rule.points
        vals = np.einsum("tfjc,mj->tmfc", coef, bary)
        minors = _pullback_minors(G.coords[:, list(face)], G.dim)
        out[:, g, :] = np.einsum("m,tmfc,tc->tf", rule.weights, vals, minors) / factorial(q)
    return out


def rw_identity_check(G: GeometricComplex, q: int) -> float:
    """Max defect of ``R W c - c`` over basis cochains, in every coface chart."""
    local = _local_whitney_integrals(G, q)
    eye = np.eye(local.shape[1])
    return float(np.abs(local - eye).max())


def de_rham_of_whitney(G: GeometricComplex, values: np.ndarray, q: int) -> np.ndarray:
    """``R(W c)`` using owner charts (exact polynomial integration)."""
    pts = G.simplex_points(q)
    rule_order = points_for_degree(1)
    owner = G.owner[q]

    def field(x):
        return _field_on_owner(G, values, q, owner, x)

    return integrate_over_simplices(pts, field, rule_order)[:, 0]


def _field_on_owner(G, values, q, owner, x):
    """Evaluate ``W c`` at chart points ``x`` (k, m, N) lying in top simplices ``owner``."""
    coef = whitney_coefficients(G, q)[owner]
    local = _gather(G, np.asarray(values), q, 1)[owner]
    bary = barycentric(G, owner, x)
    return np.einsum("kfjc,kmj,kfe->kmce", coef, bary, local)


def barycentric(G: GeometricComplex, tops: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Barycentric coordinates ``(k, m, N+1)`` of chart points ``x`` (k, m, N) in ``tops``."""
    rel = x - G.coords[tops][:, None, 0, :]
    tail = np.einsum("kmn,kjn->kmj", rel, G.grad[tops][:, 1:, :])
    return np.concatenate([1 - tail.sum(-1, keepdims=True), tail], axis=-1)


def stokes_check(G: GeometricComplex, q: int) -> float:
    """Max defect of ``R(d W c) - d^K c`` over basis cochains, in every coface chart."""
    N = G.dim
    if not 0 <= q < N:
        raise InvalidInputError("stokes check needs q < N")
    faces_up = local_faces(N, q + 1)
    coef = whitney_coefficients(G, q)
    partials = np.einsum("tjk,tfjc->tfkc", G.grad, coef)
    dW = exterior_derivative_constant(partials, N, q)
    D = coboundary_matrix(G.complex, q).tocsr()
    fi_q = G.complex.face_index[q]
    fi_up = G.complex.face_index[q + 1]
    worst = 0.0
    for g, face in enumerate(faces_up):
        minors = _pullback_minors(G.coords[:, list(face)], N)
        integral = np.einsum("tfc,tc->tf", dW, minors) / factorial(q + 1)
        rows = fi_up[:, g]
        expected = np.array([[D[r, c] for c in fi_q[t]] for t, r in enumerate(rows)], dtype=float)
        worst = max(worst, float(np.abs(integral - expected).max()))
    return worst
