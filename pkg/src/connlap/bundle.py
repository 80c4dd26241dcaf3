"""Discrete connection Laplacians through an isometric embedding into a trivial bundle.

A Hermitian bundle E of rank d is given by an embedding ``i(x) = sum_l psi_l(x) i_l(x)``
into ``C^n = (+)_l C^{n_l}``, expressed in a fixed reference frame of E: ``i(x)`` is an
``n x d`` matrix with orthonormal columns and the connection is ``i^* d i``.
Twisted cochains store one d-vector per simplex in the same reference frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateMetricError, InvalidInputError
from .forms import SmoothForm
from .geometry import GeometricComplex, preset_circle
from .laplacian import OperatorPencil
from .quadrature import points_for_degree, simplex_quadrature
from .simplicial import Cochain, coboundary_matrix
from .whitney import DEFAULT_QUAD_ORDER, de_rham, mass_matrix, whitney_coefficients

WEIGHTED_MASS_ORDER = points_for_degree(6)


@dataclass(frozen=True)
class CoverChart:
    """One trivializing chart: a support subcomplex, a local isometry and a partition weight.

    ``frame(x)`` returns ``(m, n_l, d)`` and ``partition(x)`` returns ``(m,)`` for chart
    points ``x`` of shape ``(m, N)``. ``support`` holds top-simplex indices; the partition
    weight must vanish off these simplices.
    """

    id: int
    support: frozenset
    frame: Callable[[np.ndarray], np.ndarray]
    partition: Callable[[np.ndarray], np.ndarray]
    ambient_dim: int


@dataclass(frozen=True)
class EmbeddingData:
    charts: tuple[CoverChart, ...]
    rank: int
    holonomy_angle: float | None = None
    _meta: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ambient_dim(self) -> int:
        return sum(c.ambient_dim for c in self.charts)

    def blocks(self) -> list[slice]:
        out, start = [], 0
        for c in self.charts:
            out.append(slice(start, start + c.ambient_dim))
            start += c.ambient_dim
        return out

    def i(self, x: np.ndarray) -> np.ndarray:
        """``i(x)``: ``(m, n, d)``."""
        x = np.atleast_2d(x)
        out = np.zeros((x.shape[0], self.ambient_dim, self.rank), dtype=complex)
        for chart, rows in zip(self.charts, self.blocks()):
            psi = np.asarray(chart.partition(x), dtype=float)
            nz = psi != 0
            if np.any(nz):
                out[nz, rows, :] = psi[nz, None, None] * chart.frame(x[nz])
        return out

    def i_adjoint(self, x: np.ndarray) -> np.ndarray:
        return np.conj(np.swapaxes(self.i(x), -1, -2))

    def projection(self, x: np.ndarray) -> np.ndarray:
        """``P(x) = i(x) i(x)^*``: ``(m, n, n)``."""
        ix = self.i(x)
        return ix @ np.conj(np.swapaxes(ix, -1, -2))

    def partition_sum(self, x: np.ndarray) -> np.ndarray:
        return sum(np.asarray(c.partition(np.atleast_2d(x)), dtype=float) ** 2 for c in self.charts)


def i_pointwise(E: EmbeddingData, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(i(x), i(x)^*, P(x))`` at chart points ``x`` (m, N)."""
    ix = E.i(x)
    adj = np.conj(np.swapaxes(ix, -1, -2))
    return ix, adj, ix @ adj


def reference_points(G: GeometricComplex, q: int | None = None):
    """Barycenter of every simplex in the chart of its lowest-index top coface.

    Returns a list over degrees (or one array for a given ``q``).
    """
    if q is not None:
        return G.barycenters(q)
    return [G.barycenters(k) for k in range(G.dim + 1)]


def support_from_partition(G: GeometricComplex, partition, order: int = 4) -> frozenset:
    """Top simplices on which a partition weight is nonzero at some vertex or quadrature node."""
    rule = simplex_quadrature(G.dim, order)
    pts = np.concatenate([rule.points, np.eye(G.dim + 1)])
    x = np.einsum("mj,tjn->tmn", pts, G.coords)
    vals = np.asarray(partition(x.reshape(-1, G.dim))).reshape(G.n_top, -1)
    return frozenset(int(t) for t in np.flatnonzero(np.abs(vals).max(axis=1) > 0))


def _support_simplices(G: GeometricComplex, support: frozenset, q: int) -> np.ndarray:
    mask = np.zeros(G.complex.count(q), dtype=bool)
    tops = np.array(sorted(support), dtype=np.int64)
    if tops.size:
        mask[G.complex.face_index[q][tops].ravel()] = True
    return mask


def _block_matrix(blocks: np.ndarray) -> sp.csr_matrix:
    """Block-diagonal sparse matrix from ``(k, r, c)`` blocks."""
    k, r, c = blocks.shape
    rows = (np.arange(k)[:, None, None] * r + np.arange(r)[None, :, None]) + np.zeros((1, 1, c), dtype=np.int64)
    cols = (np.arange(k)[:, None, None] * c + np.arange(c)[None, None, :]) + np.zeros((1, r, 1), dtype=np.int64)
    return sp.csr_matrix((blocks.ravel(), (rows.ravel(), cols.ravel())), shape=(k * r, k * c))


def big_I_blocks(G: GeometricComplex, E: EmbeddingData, q: int) -> np.ndarray:
    """Per-simplex blocks ``(n_q, n, d)`` of ``I^K = sum_l I_l^K Psi_l^K``.

    Cupping a q-cochain with a 0-cochain on the left multiplies it by the vertex
    average of the 0-cochain, so on each q-simplex chart l contributes
    ``avg(i_l) * avg(psi_l)``.
    """
    key = ("big_I", id(E), q)
    if key in G._cache:
        return G._cache[key][1]
    K = G.complex
    verts = np.array(K.simplices[q], dtype=np.int64)
    vpts = G.vertex_points()
    out = np.zeros((K.count(q), E.ambient_dim, E.rank), dtype=complex)
    for chart, rows in zip(E.charts, E.blocks()):
        mask = _support_simplices(G, chart.support, q)
        vmask = _support_simplices(G, chart.support, 0)
        if not mask.any():
            continue
        vidx = np.flatnonzero(vmask)
        frame_v = np.zeros((K.count(0), chart.ambient_dim, E.rank), dtype=complex)
        psi_v = np.zeros(K.count(0))
        frame_v[vidx] = chart.frame(vpts[vidx])
        psi_v[vidx] = chart.partition(vpts[vidx])
        sel = verts[mask]
        avg_frame = frame_v[sel].mean(axis=1)
        avg_psi = psi_v[sel].mean(axis=1)
        out[mask, rows, :] = avg_frame * avg_psi[:, None, None]
    G._cache[key] = (E, out)
    return out


def big_I(G: GeometricComplex, E: EmbeddingData, q: int) -> sp.csr_matrix:
    """Sparse ``I^K : C^q(K, E) -> C^q(K, V)``; its adjoint is ``big_I(...).conj().T``."""
    return _block_matrix(big_I_blocks(G, E, q))


def small_i(G: GeometricComplex, E: EmbeddingData, q: int) -> sp.csr_matrix:
    """``i^K``: pointwise ``i(p_sigma)`` at the reference points."""
    return _block_matrix(E.i(reference_points(G, q)))


def nabla_K(G: GeometricComplex, E: EmbeddingData) -> sp.csr_matrix:
    """``(I^K)^* (d^K (x) 1_n) I^K`` on 0-cochains with values in E."""
    I0 = big_I(G, E, 0)
    I1 = big_I(G, E, 1)
    d = sp.kron(coboundary_matrix(G.complex, 0), sp.identity(E.ambient_dim), format="csr")
    return (I1.conj().T @ d @ I0).tocsr()


def projected_whitney_gram(G: GeometricComplex, E: EmbeddingData, q: int,
                           order: int = WEIGHTED_MASS_ORDER) -> sp.csr_matrix:
    """``int <W sigma, W tau> P_ab`` on ``C^q(K, V)``, by quadrature on top simplices."""
    N = G.dim
    n = E.ambient_dim
    rule = simplex_quadrature(N, order)
    coef = whitney_coefficients(G, q)
    vals = np.einsum("tfjc,mj->tmfc", coef, rule.points)
    gram = np.einsum("tmfc,tmgc->tmfg", vals, vals)
    x = np.einsum("mj,tjn->tmn", rule.points, G.coords).reshape(-1, N)
    P = E.projection(x).reshape(G.n_top, rule.points.shape[0], n, n)
    local = np.einsum("m,t,tmfg,tmab->tfagb", rule.weights, G.volumes, gram, P)
    fi = G.complex.face_index[q]
    F = fi.shape[1]
    gidx = fi[:, :, None] * n + np.arange(n)[None, None, :]
    gidx = gidx.reshape(G.n_top, F * n)
    rows = np.repeat(gidx, F * n, axis=1).ravel()
    cols = np.tile(gidx, (1, F * n)).ravel()
    size = G.complex.count(q) * n
    M = sp.coo_matrix((local.reshape(G.n_top, -1).ravel(), (rows, cols)), shape=(size, size)).tocsr()
    return 0.5 * (M + M.conj().T)


def weighted_mass(G: GeometricComplex, E: EmbeddingData, q: int,
                  order: int = WEIGHTED_MASS_ORDER) -> np.ndarray:
    """Twisted Whitney mass ``(I^K)^H G_P I^K`` on ``C^q(K, E)`` (dense, Hermitian PSD)."""
    I = big_I(G, E, q)
    M = (I.conj().T @ projected_whitney_gram(G, E, q, order) @ I).toarray()
    return 0.5 * (M + M.conj().T)


def injectivity_check(G: GeometricComplex, E: EmbeddingData, q: int,
                      order: int = WEIGHTED_MASS_ORDER) -> float:
    """Smallest eigenvalue of the twisted Whitney mass; positive iff the twisted Whitney map is injective."""
    return float(np.linalg.eigvalsh(weighted_mass(G, E, q, order))[0])


def connection_pencil(G: GeometricComplex, E: EmbeddingData,
                      order: int = WEIGHTED_MASS_ORDER) -> OperatorPencil:
    """``S = nabla^H M~_1 nabla``, ``M = M~_0`` for the discrete connection Laplacian."""
    M0 = weighted_mass(G, E, 0, order)
    M1 = weighted_mass(G, E, 1, order)
    for q, M in ((0, M0), (1, M1)):
        lo = np.linalg.eigvalsh(M)[0]
        if lo <= 1e-14 * np.abs(np.diag(M)).max():
            raise DegenerateMetricError(
                f"twisted Whitney map not injective in degree {q} (min eigenvalue {lo:.3e}); refine the mesh"
            )
    nab = nabla_K(G, E).toarray()
    S = nab.conj().T @ M1 @ nab
    return OperatorPencil(0.5 * (S + S.conj().T), M0, 0, "discrete connection Laplacian, degree 0")


def twisted_de_rham(G: GeometricComplex, E: EmbeddingData, f: SmoothForm,
                    order: int = DEFAULT_QUAD_ORDER) -> Cochain:
    """``(I^K)^* R(i f)`` for an E-valued form given in the reference frame."""
    if f.fiber_dim != E.rank:
        raise InvalidInputError("form fiber dimension must equal the bundle rank")

    def lifted(x):
        return np.einsum("mnd,mcd->mcn", E.i(x), f(x))

    form = SmoothForm(f.degree, lifted, fiber_dim=E.ambient_dim)
    r = de_rham(G, form, order).values
    return Cochain(f.degree, big_I(G, E, f.degree).conj().T @ r, E.rank)


def almost_projection(G: GeometricComplex, E: EmbeddingData, q: int) -> sp.csr_matrix:
    """``P^K = I^K (I^K)^*`` on ``C^q(K, V)``."""
    I = big_I(G, E, q)
    return (I @ I.conj().T).tocsr()


def almost_projection_defect(G: GeometricComplex, E: EmbeddingData, q: int, omega: SmoothForm,
                             order: int = DEFAULT_QUAD_ORDER) -> float:
    """Whitney norm of ``P^K R w - R(P w)`` for a V-valued q-form ``w``."""
    n = E.ambient_dim
    if omega.degree != q or omega.fiber_dim != n:
        raise InvalidInputError("omega must be a V-valued form of degree q")

    def projected(x):
        return np.einsum("mab,mcb->mca", E.projection(x), omega(x))

    r = de_rham(G, omega, order).values
    rp = de_rham(G, SmoothForm(q, projected, fiber_dim=n), order).values
    delta = almost_projection(G, E, q) @ r - rp
    M = mass_matrix(G, q, n)
    return float(np.sqrt(max(np.real(np.vdot(delta, M @ delta)), 0.0)))


def projector_defect(G: GeometricComplex, E: EmbeddingData, q: int) -> float:
    """Operator norm of ``(P^K)^2 - P^K`` in the canonical inner product."""
    B = big_I_blocks(G, E, q)
    P = B @ np.conj(np.swapaxes(B, -1, -2))
    D = P @ P - P
    return float(np.linalg.norm(D, ord=2, axis=(1, 2)).max()) if D.size else 0.0


def holonomy(E: EmbeddingData, loop_points: np.ndarray) -> np.ndarray:
    """Unitary part of ``prod_k i(x_{k+1})^* i(x_k)`` around a closed loop of chart points."""
    pts = np.atleast_2d(loop_points)
    ix = E.i(pts)
    T = np.eye(E.rank, dtype=complex)
    for k in range(len(pts)):
        nxt = (k + 1) % len(pts)
        T = ix[nxt].conj().T @ ix[k] @ T
    U, _, Vh = np.linalg.svd(T)
    return U @ Vh


def trivial_bundle(G: GeometricComplex, frame: Callable | None = None, rank: int = 1,
                   ambient_dim: int | None = None) -> EmbeddingData:
    """One chart covering everything, ``psi = 1``; ``frame`` defaults to the identity."""
    ambient_dim = rank if ambient_dim is None else ambient_dim
    if frame is None:
        if ambient_dim != rank:
            raise InvalidInputError("an identity frame needs ambient_dim == rank")
        def frame(x):
            return np.broadcast_to(np.eye(rank, dtype=complex), (x.shape[0], rank, rank)).copy()
    chart = CoverChart(0, frozenset(range(G.n_top)), frame, lambda x: np.ones(x.shape[0]), ambient_dim)
    return EmbeddingData((chart,), rank)


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3 - 2 * t)


def flat_line_bundle_circle(theta: float, n: int, overlap: float = pi / 8) -> EmbeddingData:
    """Flat line bundle with holonomy ``exp(i theta)`` over ``preset_circle(n)``.

    Two arc charts ``(-w, pi + w)`` and ``(pi - w, 2 pi + w)`` with ``w = overlap``.
    Each carries a parallel unit frame; the frames agree on the overlap near ``pi``
    and differ by ``exp(i theta)`` on the overlap near ``0``. The partition is
    ``(cos phi, sin phi)`` with ``phi`` a C^1 ramp across each overlap.
    """
    if not 0 < overlap < pi / 2:
        raise InvalidInputError("overlap half-width must lie in (0, pi/2)")
    G = preset_circle(n)
    h = 2 * pi / n
    if h >= pi / 2 - overlap:
        raise InvalidInputError(f"n={n} too coarse: chart supports would wrap around the circle")
    beta = theta / (2 * pi)
    w = overlap

    def arc1(x):
        return np.mod(np.asarray(x)[:, 0] + pi / 2, 2 * pi) - pi / 2

    def arc2(x):
        return np.mod(np.asarray(x)[:, 0] - pi / 2, 2 * pi) + pi / 2

    def angle(x):
        y = arc1(x)
        up = (pi / 2) * _smoothstep((y - (pi - w)) / (2 * w))
        down = (pi / 2) * (1 - _smoothstep((y + w) / (2 * w)))
        return np.where(y >= pi / 2, up, down)

    def psi1(x):
        # cos(pi/2) is not exactly zero in floating point; the support must be exact
        phi = angle(x)
        return np.where(phi >= pi / 2, 0.0, np.cos(phi))

    def psi2(x):
        return np.sin(angle(x))

    def frame1(x):
        return np.exp(-1j * beta * arc1(x))[:, None, None]

    def frame2(x):
        return np.exp(-1j * beta * arc2(x))[:, None, None]

    charts = (
        CoverChart(0, support_from_partition(G, psi1), frame1, psi1, 1),
        CoverChart(1, support_from_partition(G, psi2), frame2, psi2, 1),
    )
    return EmbeddingData(charts, 1, holonomy_angle=theta)


def circle_loop(G: GeometricComplex) -> np.ndarray:
    """Vertex chart points of the circle preset in cyclic order."""
    return G.vertex_points()


def vector_form(components: Sequence[Callable], q: int = 1) -> SmoothForm:
    """V-valued form on a 1-D chart from one callable per fiber component."""
    def func(x):
        return np.stack([np.asarray(c(x), dtype=complex) for c in components], axis=-1)[:, None, :]
    return SmoothForm(q, func, fiber_dim=len(components))
