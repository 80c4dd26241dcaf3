"""Twisted discrete Laplacians posed as Hermitian pencils ``S v = lambda M v``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .cup import twisted_coboundary
from .errors import DegenerateMetricError, InvalidInputError
from .forms import SmoothForm
from .geometry import GeometricComplex
from .quadrature import simplex_quadrature
from .simplicial import Cochain
from .whitney import DEFAULT_QUAD_ORDER, de_rham, mass_matrix, whitney_derivative, whitney_field


@dataclass(frozen=True)
class OperatorPencil:
    """Stiffness ``S`` (Hermitian PSD) and mass ``M`` (symmetric PD), both dense."""

    S: np.ndarray
    M: np.ndarray
    degree: int
    description: str = ""

    @property
    def dim(self) -> int:
        return self.S.shape[0]


def _dense(A) -> np.ndarray:
    return A.toarray() if sp.issparse(A) else np.asarray(A)


def _hermitian(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def cochain_from_smooth(G: GeometricComplex, A: SmoothForm, order: int = DEFAULT_QUAD_ORDER) -> Cochain:
    """The 1-cochain ``a = R A`` of a real smooth 1-form."""
    if A.degree != 1:
        raise InvalidInputError("connection form must have degree 1")
    a = de_rham(G, A, order)
    return Cochain(1, np.real(a.values).astype(float))


def assemble_degree0(G: GeometricComplex, a: Cochain) -> OperatorPencil:
    """``S = D_a^H M_1 D_a``, ``M = M_0``."""
    if np.iscomplexobj(a.values) and np.abs(np.imag(a.values)).max() > 0:
        raise InvalidInputError("twisting cochain must be real")
    a = Cochain(1, np.real(a.values))
    D = twisted_coboundary(G.complex, a, 0)
    S = (D.conj().T @ mass_matrix(G, 1) @ D)
    return OperatorPencil(_hermitian(_dense(S)), _dense(mass_matrix(G, 0)), 0, "twisted Laplacian, degree 0")


def assemble_general(G: GeometricComplex, a: Cochain, q: int) -> OperatorPencil:
    """Full twisted Hodge Laplacian in degree q (out-of-range terms omitted).

    ``S = D_q^H M_{q+1} D_q + M_q D_{q-1} M_{q-1}^{-1} D_{q-1}^H M_q``.
    """
    N = G.dim
    if not 0 <= q <= N:
        raise InvalidInputError(f"degree {q} out of range")
    a = Cochain(1, np.real(a.values))
    K = G.complex
    Mq = mass_matrix(G, q)
    S = np.zeros((K.count(q), K.count(q)), dtype=complex)
    if q < N:
        D = twisted_coboundary(K, a, q)
        S += _dense(D.conj().T @ mass_matrix(G, q + 1) @ D)
    if q > 0:
        D = twisted_coboundary(K, a, q - 1)
        Mlow = _dense(mass_matrix(G, q - 1))
        try:
            factor = la.cho_factor(Mlow)
        except la.LinAlgError as exc:
            raise DegenerateMetricError(f"mass matrix in degree {q - 1} is singular") from exc
        B = _dense(D.conj().T @ Mq)
        S += B.conj().T @ la.cho_solve(factor, B)
    return OperatorPencil(_hermitian(S), _dense(Mq), q, f"twisted Hodge Laplacian, degree {q}")


def commutation_defects(G: GeometricComplex, A: SmoothForm, a: Cochain, omega: SmoothForm,
                        order: int = DEFAULT_QUAD_ORDER) -> dict[str, float]:
    """L^2 norms of the three twisted commutation defects for a smooth function ``omega``.

    * ``whitney_vs_smooth_twist``: ``W d_a R w - d_A W R w``
    * ``whitney_vs_deRham_twist``: ``W d_a R w - W R d_A w``
    * ``whitney_vs_exact``: ``W d_a R w - d_A w``

    ``omega`` and ``A`` must carry exterior derivatives (``omega.derivative``).
    """
    if omega.degree != 0:
        raise InvalidInputError("test form must be a function")
    K = G.complex
    N = G.dim
    c = de_rham(G, omega, order)
    D = twisted_coboundary(K, a, 0)
    twisted = D @ c.values

    def dA_omega(x):
        return omega.d(x)[..., 0] + 1j * A(x)[..., 0] * omega(x)[:, 0, :]

    dA_form = SmoothForm(1, dA_omega)
    r_dA = de_rham(G, dA_form, order).values

    rule = simplex_quadrature(N, order)
    x = np.einsum("mj,tjn->tmn", rule.points, G.coords)
    flat = x.reshape(-1, N)
    W_twisted = whitney_field(G, twisted, 1, rule.points)[..., 0]
    W_r_dA = whitney_field(G, r_dA, 1, rule.points)[..., 0]
    Wc = whitney_field(G, c.values, 0, rule.points)[..., 0, 0]
    dWc = whitney_derivative(G, c.values, 0)[..., 0]
    A_vals = A(flat)[..., 0].reshape(x.shape[0], x.shape[1], -1)
    dA_W = dWc[:, None, :] + 1j * A_vals * Wc[..., None]
    exact = dA_omega(flat).reshape(x.shape[0], x.shape[1], -1)

    def l2(diff):
        sq = (np.abs(diff) ** 2).sum(-1)
        return float(np.sqrt(np.einsum("m,tm,t->", rule.weights, sq, G.volumes)))

    return {
        "whitney_vs_smooth_twist": l2(W_twisted - dA_W),
        "whitney_vs_deRham_twist": l2(W_twisted - W_r_dA),
        "whitney_vs_exact": l2(W_twisted - exact),
    }
