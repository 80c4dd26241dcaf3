"""Graded-commutative simplicial cup product and twisted coboundaries.

Two canonical simplices ``s1`` (degree p) and ``s2`` (degree q) have a nonzero
product only when they share exactly one vertex ``v`` and together span a
(p+q)-simplex ``t``; then ``s1 u s2 = eps * p! q! / (p+q+1)! * t``.

The sign ``eps`` is fixed as follows: move ``v`` to the end of ``s1`` (parity
``s_1``), to the front of ``s2`` (parity ``s_2``), concatenate the two sequences
keeping one copy of ``v`` and compare with the canonical order of ``t``
(parity ``s_3``); ``eps = s_1 s_2 s_3``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInputError
from .forms import SmoothForm, wedge
from .geometry import GeometricComplex
from .quadrature import points_for_degree
from .simplicial import Cochain, SimplicialComplex, coboundary_matrix, relative_orientation
from .whitney import DEFAULT_QUAD_ORDER, barycentric, de_rham, integrate_over_simplices, whitney_coefficients, whitney_field


def cup_sign(s1: tuple[int, ...], s2: tuple[int, ...], tau: tuple[int, ...]) -> int:
    shared = set(s1) & set(s2)
    if len(shared) != 1:
        raise InvalidInputError(f"{s1} and {s2} do not meet in exactly one vertex")
    (v,) = shared
    seq1 = [x for x in s1 if x != v] + [v]
    seq2 = [v] + [x for x in s2 if x != v]
    return (
        relative_orientation(seq1, s1)
        * relative_orientation(seq2, s2)
        * relative_orientation(seq1 + seq2[1:], tau)
    )


def cup_coefficient(p: int, q: int) -> Fraction:
    return Fraction(factorial(p) * factorial(q), factorial(p + q + 1))


@lru_cache(maxsize=64)
def cup_table(K: SimplicialComplex, p: int, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All nonzero simplex products: arrays ``(tau, s1, s2, signed coefficient)``."""
    if p < 0 or q < 0 or p + q > K.dim:
        raise InvalidInputError(f"cup of degrees {p} and {q} exceeds dimension {K.dim}")
    coeff = float(cup_coefficient(p, q))
    idx1, idx2 = K.index[p], K.index[q]
    rows, c1, c2, vals = [], [], [], []
    for r, tau in enumerate(K.simplices[p + q]):
        for v in tau:
            rest = [x for x in tau if x != v]
            for part in combinations(rest, p):
                s1 = tuple(sorted(part + (v,)))
                s2 = tuple(sorted(set(rest) - set(part) | {v}))
                rows.append(r)
                c1.append(idx1[s1])
                c2.append(idx2[s2])
                vals.append(cup_sign(s1, s2, tau) * coeff)
    return (np.array(rows, dtype=np.int64), np.array(c1, dtype=np.int64),
            np.array(c2, dtype=np.int64), np.array(vals, dtype=float))


def cup_operator(K: SimplicialComplex, a: Cochain, q: int) -> sp.csr_matrix:
    """Sparse matrix of ``c -> a u c`` from degree q to degree ``a.degree + q``."""
    p = a.degree
    a.check(K)
    rows, c1, c2, vals = cup_table(K, p, q)
    data = vals * np.asarray(a.values)[c1]
    return sp.csr_matrix((data, (rows, c2)), shape=(K.count(p + q), K.count(q)))


def cup(K: SimplicialComplex, c1: Cochain, c2: Cochain) -> Cochain:
    c2.check(K)
    return Cochain(c1.degree + c2.degree, cup_operator(K, c1, c2.degree) @ np.asarray(c2.values))


def twisted_coboundary(K: SimplicialComplex, a: Cochain, q: int) -> sp.csr_matrix:
    """``d^K + i a u .`` from degree q to q+1, for a real 1-cochain ``a``."""
    if a.degree != 1:
        raise InvalidInputError("twisting cochain must have degree 1")
    d = coboundary_matrix(K, q).astype(complex)
    return (d + 1j * cup_operator(K, a, q)).tocsr()


def wedge_of_whitney(G: GeometricComplex, a: Cochain, b: Cochain, tops: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``W a ^ W b`` at chart points ``x`` (k, m, N) in top simplices ``tops``."""
    bary = barycentric(G, tops, x)
    out = []
    for c in (a, b):
        coef = whitney_coefficients(G, c.degree)[tops]
        local = np.asarray(c.values)[G.complex.face_index[c.degree][tops]]
        out.append(np.einsum("kfjc,kmj,kf->kmc", coef, bary, local))
    return wedge(out[0], out[1], G.dim, a.degree, b.degree)


def wedge_consistency_check(G: GeometricComplex, a: Cochain, b: Cochain, order: int | None = None) -> float:
    """Max ``|a u b - R(W a ^ W b)|`` with exact quadrature on owner charts."""
    p, q = a.degree, b.degree
    if p + q > G.dim:
        raise InvalidInputError("degrees exceed the dimension")
    K = G.complex
    order = points_for_degree(2) if order is None else order
    owner = G.owner[p + q]

    def field(x):
        return wedge_of_whitney(G, a, b, owner, x)[..., None]

    rhs = integrate_over_simplices(G.simplex_points(p + q), field, order)[:, 0]
    lhs = cup(K, a, b).values
    return float(np.abs(lhs - rhs).max())


def cup_wedge_defect(G: GeometricComplex, w1: SmoothForm, w2: SmoothForm,
                     order: int = DEFAULT_QUAD_ORDER) -> float:
    """Sup over top-simplex barycenters of ``|W(R w1 u R w2) - w1 ^ w2|``."""
    K = G.complex
    a, b = de_rham(G, w1, order), de_rham(G, w2, order)
    c = cup(K, a, b)
    bary = np.full((1, G.dim + 1), 1.0 / (G.dim + 1))
    discrete = whitney_field(G, c.values, c.degree, bary)[:, 0, :, 0]
    x = G.barycenters()
    exact = wedge(w1(x)[..., 0], w2(x)[..., 0], G.dim, w1.degree, w2.degree)
    return float(np.sqrt((np.abs(discrete - exact) ** 2).sum(-1)).max())
