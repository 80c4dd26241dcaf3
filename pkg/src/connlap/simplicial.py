"""Oriented abstract simplicial complexes and coboundary matrices.

Every simplex is stored in canonical form, i.e. as a tuple of strictly
increasing vertex ids. Simplices of each degree are sorted lexicographically,
so the index of a simplex is a pure function of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInputError


def relative_orientation(vertex_sequence: Sequence[int], canonical_simplex: Sequence[int]) -> int:
    """Parity (+1/-1) of the permutation taking ``canonical_simplex`` to ``vertex_sequence``."""
    seq = list(vertex_sequence)
    ref = list(canonical_simplex)
    if len(seq) != len(ref) or sorted(seq) != sorted(ref) or len(set(ref)) != len(ref):
        raise InvalidInputError(f"{seq} is not a permutation of {ref}")
    pos = {v: i for i, v in enumerate(ref)}
    perm = [pos[v] for v in seq]
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Simplex:
    """An oriented simplex: a vertex sequence, possibly out of canonical order."""

    vertices: tuple[int, ...]

    @property
    def canonical(self) -> tuple[int, ...]:
        return tuple(sorted(self.vertices))

    @property
    def orientation(self) -> int:
        return relative_orientation(self.vertices, self.canonical)

    @property
    def degree(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A pure, face-closed simplicial complex with canonical simplex numbering.

    Attributes:
        dim: top dimension N.
        simplices: ``simplices[q]`` is the sorted list of canonical q-simplices.
        index: ``index[q][s]`` is the position of simplex ``s`` in ``simplices[q]``.
        face_index: ``face_index[q]`` has shape ``(n_top, C(N+1, q+1))``; row t lists the
            global indices of the q-faces of top simplex t, in the order of
            ``combinations(range(N+1), q+1)`` over its local vertices.
    """

    dim: int
    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    index: tuple[dict, ...] = field(repr=False)
    face_index: tuple[np.ndarray, ...] = field(repr=False)

    def count(self, q: int) -> int:
        return len(self.simplices[q])

    @property
    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    @property
    def top(self) -> tuple[tuple[int, ...], ...]:
        return self.simplices[self.dim]

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices[0]]

    def find(self, simplex: Sequence[int] | Simplex) -> tuple[int, int, int]:
        """Return ``(degree, index, orientation sign)`` of an oriented simplex."""
        verts = simplex.vertices if isinstance(simplex, Simplex) else tuple(simplex)
        canon = tuple(sorted(verts))
        q = len(canon) - 1
        if q < 0 or q > self.dim or canon not in self.index[q]:
            raise InvalidInputError(f"simplex {verts} is not in the complex")
        return q, self.index[q][canon], relative_orientation(verts, canon)

    def __contains__(self, simplex) -> bool:
        try:
            self.find(simplex)
        except InvalidInputError:
            return False
        return True

    def cofaces(self, simplex: Sequence[int]) -> list[tuple[tuple[int, ...], int]]:
        """Cofaces of one higher degree, with incidence signs (alternating face convention)."""
        q, i, _ = self.find(simplex)
        if q == self.dim:
            return []
        col = coboundary_matrix(self, q).tocsc()[:, i]
        return [(self.simplices[q + 1][r], int(v)) for r, v in zip(col.indices, col.data)]


def build_complex(top_simplices: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Face-close a list of equal-dimensional simplices and number them canonically."""
    tops = [tuple(int(v) for v in s) for s in top_simplices]
    if not tops:
        raise InvalidInputError("empty simplex list")
    size = len(tops[0])
    if size == 0:
        raise InvalidInputError("empty simplex")
    for s in tops:
        if len(s) != size:
            raise InvalidInputError("all top simplices must have the same dimension")
        if len(set(s)) != len(s):
            raise InvalidInputError(f"repeated vertex in simplex {s}")
    dim = size - 1
    canon_tops = sorted(set(tuple(sorted(s)) for s in tops))

    levels: list[set] = [set() for _ in range(dim + 1)]
    for s in canon_tops:
        for q in range(dim + 1):
            levels[q].update(combinations(s, q + 1))
    simplices = tuple(tuple(sorted(level)) for level in levels)
    index = tuple({s: i for i, s in enumerate(level)} for level in simplices)

    face_index = []
    for q in range(dim + 1):
        local = list(combinations(range(dim + 1), q + 1))
        arr = np.array(
            [[index[q][tuple(t[k] for k in c)] for c in local] for t in simplices[dim]],
            dtype=np.int64,
        ).reshape(len(simplices[dim]), len(local))
        face_index.append(arr)
    return SimplicialComplex(dim, simplices, index, tuple(face_index))


def coboundary_matrix(K: SimplicialComplex, q: int) -> sp.csr_matrix:
    """Signed incidence matrix ``C^q -> C^{q+1}`` with integer entries.

    The face of ``[v_0..v_{q+1}]`` obtained by omitting ``v_i`` carries sign ``(-1)^i``.
    """
    if not 0 <= q < K.dim:
        raise InvalidInputError(f"coboundary degree {q} out of range for dimension {K.dim}")
    rows, cols, vals = [], [], []
    lower = K.index[q]
    for r, tau in enumerate(K.simplices[q + 1]):
        for i in range(q + 2):
            rows.append(r)
            cols.append(lower[tau[:i] + tau[i + 1:]])
            vals.append(1 if i % 2 == 0 else -1)
    return sp.csr_matrix(
        (np.array(vals, dtype=np.int64), (rows, cols)),
        shape=(K.count(q + 1), K.count(q)),
    )


def closed_star(K: SimplicialComplex, simplex: Sequence[int] | Simplex) -> set[tuple[int, ...]]:
    """All simplices containing ``simplex`` together with all of their faces."""
    q, _, _ = K.find(simplex)
    base = set(simplex.canonical if isinstance(simplex, Simplex) else sorted(simplex))
    star = set()
    for top in K.top:
        if base <= set(top):
            for r in range(1, len(top) + 1):
                star.update(combinations(top, r))
    return star


@dataclass
class Cochain:
    """Complex coefficients on canonical q-simplices, simplex-major for fiber values.

    ``values[i * fiber_dim + k]`` is component k on simplex i.
    """

    degree: int
    values: np.ndarray
    fiber_dim: int = 1

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1 or self.values.size % self.fiber_dim:
            raise InvalidInputError("cochain values must be a flat array of length fiber_dim * count")

    def check(self, K: SimplicialComplex) -> "Cochain":
        if self.values.size != self.fiber_dim * K.count(self.degree):
            raise InvalidInputError(
                f"cochain of degree {self.degree} has {self.values.size} values, "
                f"expected {self.fiber_dim * K.count(self.degree)}"
            )
        return self

    def evaluate(self, K: SimplicialComplex, simplex: Sequence[int] | Simplex) -> np.ndarray | complex:
        """Value on an oriented simplex (negated for the opposite orientation)."""
        q, i, sign = K.find(simplex)
        if q != self.degree:
            raise InvalidInputError(f"simplex of degree {q} given to a {self.degree}-cochain")
        block = self.values[i * self.fiber_dim:(i + 1) * self.fiber_dim]
        return sign * (block[0] if self.fiber_dim == 1 else block)

    @classmethod
    def zeros(cls, K: SimplicialComplex, q: int, fiber_dim: int = 1, dtype=float) -> "Cochain":
        return cls(q, np.zeros(K.count(q) * fiber_dim, dtype=dtype), fiber_dim)

    @classmethod
    def indicator(cls, K: SimplicialComplex, simplex: Sequence[int]) -> "Cochain":
        """Basis cochain of an oriented simplex (sign follows its orientation)."""
        q, i, sign = K.find(simplex)
        c = cls.zeros(K, q)
        c.values[i] = sign
        return c
