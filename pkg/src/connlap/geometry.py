"""Piecewise-flat metric realization of simplicial complexes and mesh presets.

Each top simplex carries its own affine chart: the coordinates of its vertices
(in canonical vertex order) inside a flat coordinate patch. Smooth fields are
supplied as functions of these chart coordinates, so for periodic presets they
must be periodic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, pi
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateMetricError, InvalidInputError
from .simplicial import SimplicialComplex, build_complex


@dataclass(frozen=True, eq=False)
class GeometricComplex:
    """A simplicial complex with a flat metric on every top simplex.

    Array attributes are indexed by top simplex ``t`` first:

    * ``coords[t]``: ``(N+1, N)`` chart coordinates of the vertices.
    * ``gram[t]``: ``(N, N)`` Gram matrix of the edge vectors ``x_i - x_0``.
    * ``volumes[t]``: N-volume.
    * ``grad[t]``: ``(N+1, N)`` barycentric gradients in chart coordinates.
    * ``grad_gram[t]``: ``(N+1, N+1)`` matrix of ``<grad mu_i, grad mu_j>``.

    ``owner[q][i]`` is the lowest-index top simplex containing q-simplex i and
    ``local[q][i]`` the positions of its vertices inside that owner.
    """

    complex: SimplicialComplex
    coords: np.ndarray
    edge_lengths: np.ndarray
    gram: np.ndarray
    volumes: np.ndarray
    grad: np.ndarray
    grad_gram: np.ndarray
    owner: tuple[np.ndarray, ...] = field(repr=False)
    local: tuple[np.ndarray, ...] = field(repr=False)
    name: str = "custom"
    total_volume: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.complex.dim

    @property
    def n_top(self) -> int:
        return self.coords.shape[0]

    def simplex_points(self, q: int) -> np.ndarray:
        """Chart coordinates ``(n_q, q+1, N)`` of every q-simplex, in its owner's chart."""
        key = ("simplex_points", q)
        if key not in self._cache:
            own = self.owner[q]
            self._cache[key] = self.coords[own[:, None], self.local[q]]
        return self._cache[key]

    def vertex_points(self) -> np.ndarray:
        return self.simplex_points(0)[:, 0, :]

    def barycenters(self, q: int | None = None) -> np.ndarray:
        q = self.dim if q is None else q
        return self.simplex_points(q).mean(axis=1)


@dataclass(frozen=True)
class MeshReport:
    h: float
    min_fullness: float
    counts: list[int]

    def as_dict(self) -> dict:
        return {"h": self.h, "min_fullness": self.min_fullness, "counts": list(self.counts)}


def _edge_length_array(K: SimplicialComplex, edge_lengths) -> np.ndarray:
    if isinstance(edge_lengths, Mapping):
        out = np.empty(K.count(1))
        for e, length in edge_lengths.items():
            q, i, _ = K.find(e)
            if q != 1:
                raise InvalidInputError(f"{e} is not an edge")
            out[i] = length
        if len(edge_lengths) != K.count(1):
            raise InvalidInputError("edge length map does not cover every edge")
        return out
    out = np.asarray(edge_lengths, dtype=float)
    if out.shape != (K.count(1),):
        raise InvalidInputError("edge length array must have one entry per edge")
    return out


def _owners(K: SimplicialComplex) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
    from itertools import combinations

    owner, local = [], []
    for q in range(K.dim + 1):
        combos = np.array(list(combinations(range(K.dim + 1), q + 1)), dtype=np.int64)
        own = np.full(K.count(q), -1, dtype=np.int64)
        loc = np.zeros((K.count(q), q + 1), dtype=np.int64)
        fi = K.face_index[q]
        # Reverse order so the lowest top index wins.
        for t in range(fi.shape[0] - 1, -1, -1):
            own[fi[t]] = t
            loc[fi[t]] = combos
        owner.append(own)
        local.append(loc)
    return tuple(owner), tuple(local)


def realize(
    K: SimplicialComplex,
    edge_lengths: Mapping | Sequence[float] | np.ndarray,
    charts: np.ndarray | None = None,
    *,
    name: str = "custom",
    total_volume: float | None = None,
) -> GeometricComplex:
    """Piecewise-flat realization from intrinsic edge lengths.

    Args:
        K: the complex (pure, dimension N >= 1).
        edge_lengths: mapping edge -> length, or array aligned with ``K.simplices[1]``.
        charts: optional ``(n_top, N+1, N)`` vertex coordinates per top simplex; must
            reproduce the edge lengths. If omitted each simplex is placed isometrically
            with its first vertex at the origin.
    """
    N = K.dim
    if N < 1:
        raise InvalidInputError("realization needs dimension >= 1")
    lengths = _edge_length_array(K, edge_lengths)
    if np.any(lengths <= 0):
        raise DegenerateMetricError("edge lengths must be positive")
    n_top = K.count(N)
    tops = np.array(K.top, dtype=np.int64)
    e_index = K.index[1]

    def length(a, b):
        return lengths[e_index[(a, b) if a < b else (b, a)]]

    gram = np.empty((n_top, N, N))
    for t, s in enumerate(tops):
        for i in range(1, N + 1):
            for j in range(i, N + 1):
                if i == j:
                    g = length(s[0], s[i]) ** 2
                else:
                    g = 0.5 * (length(s[0], s[i]) ** 2 + length(s[0], s[j]) ** 2 - length(s[i], s[j]) ** 2)
                gram[t, i - 1, j - 1] = gram[t, j - 1, i - 1] = g

    det = np.linalg.det(gram)
    scale = np.max(lengths) ** (2 * N)
    if np.any(det <= 1e-24 * scale):
        raise DegenerateMetricError("degenerate simplex: Cayley-Menger volume is not positive")
    volumes = np.sqrt(det) / factorial(N)

    if charts is None:
        L = np.linalg.cholesky(gram)
        coords = np.concatenate([np.zeros((n_top, 1, N)), L], axis=1)
    else:
        coords = np.asarray(charts, dtype=float)
        if coords.shape != (n_top, N + 1, N):
            raise InvalidInputError(f"charts must have shape {(n_top, N + 1, N)}")
        edges = coords[:, 1:, :] - coords[:, :1, :]
        chart_gram = np.einsum("tik,tjk->tij", edges, edges)
        if not np.allclose(chart_gram, gram, rtol=1e-9, atol=1e-12 * np.max(lengths) ** 2):
            raise InvalidInputError("charts are inconsistent with the edge lengths")

    # Barycentric coordinates: mu = B^{-1} [1; x] with B = [[1 ... 1], [x_0 ... x_N]].
    B = np.concatenate([np.ones((n_top, 1, N + 1)), coords.transpose(0, 2, 1)], axis=1)
    grad = np.linalg.inv(B)[:, :, 1:]
    ginv = np.linalg.inv(gram)
    grad_gram = np.empty((n_top, N + 1, N + 1))
    grad_gram[:, 1:, 1:] = ginv
    grad_gram[:, 0, 1:] = -ginv.sum(axis=1)
    grad_gram[:, 1:, 0] = -ginv.sum(axis=2)
    grad_gram[:, 0, 0] = ginv.sum(axis=(1, 2))

    owner, local = _owners(K)
    return GeometricComplex(
        complex=K,
        coords=coords,
        edge_lengths=lengths,
        gram=gram,
        volumes=volumes,
        grad=grad,
        grad_gram=grad_gram,
        owner=owner,
        local=local,
        name=name,
        total_volume=total_volume,
    )


def preset_circle(n: int) -> GeometricComplex:
    """Regular n-gon of circumference 2*pi; chart coordinate is arc length.

    The closing edge ``[0, n-1]`` is charted as ``[2*pi, 2*pi - h]`` so every chart
    is an interval of the real line; fields must be 2*pi-periodic.
    """
    if n < 3:
        raise InvalidInputError("circle preset needs n >= 3")
    h = 2 * pi / n
    K = build_complex([(j, (j + 1) % n) for j in range(n)])
    coords = np.empty((n, 2, 1))
    for t, (a, b) in enumerate(K.top):
        if b == a + 1:
            coords[t, :, 0] = (a * h, b * h)
        else:
            coords[t, :, 0] = (2 * pi, b * h)
    return realize(K, np.full(K.count(1), h), coords, name="circle", total_volume=2 * pi)


def preset_torus(n: int) -> GeometricComplex:
    """Flat unit torus: n x n squares, each cut along the same diagonal."""
    if n < 3:
        raise InvalidInputError("torus preset needs n >= 3")

    def vid(i, j):
        return (i % n) + n * (j % n)

    tris = []
    for j in range(n):
        for i in range(n):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]
            for tri in corners:
                ids = [vid(*c) for c in tri]
                pts = [(c[0] / n, c[1] / n) for c in tri]
                order = np.argsort(ids)
                tris.append((tuple(ids[k] for k in order), [pts[k] for k in order]))
    K = build_complex([t for t, _ in tris])
    lookup = {t: np.array(p) for t, p in tris}
    coords = np.array([lookup[t] for t in K.top])

    lengths = np.empty(K.count(1))
    for t, s in enumerate(K.top):
        for a in range(3):
            for b in range(a + 1, 3):
                lengths[K.index[1][(s[a], s[b])]] = np.linalg.norm(coords[t, a] - coords[t, b])
    return realize(K, lengths, coords, name="torus", total_volume=1.0)


def mesh_report(G: GeometricComplex) -> MeshReport:
    """Mesh size h (max top-simplex diameter) and minimum fullness vol/diam^N."""
    pts = G.coords
    diffs = pts[:, :, None, :] - pts[:, None, :, :]
    diam = np.sqrt((diffs ** 2).sum(-1)).max(axis=(1, 2))
    fullness = G.volumes / diam ** G.dim
    return MeshReport(h=float(diam.max()), min_fullness=float(fullness.min()), counts=G.complex.counts)

