"""Pointwise exterior algebra in chart coordinates and smooth-form containers.

A q-form value in N dimensions is stored as its components on the basis
``dx_I`` with ``I`` running over ``combinations(range(N), q)``. Charts are
isometric, so the Euclidean dot product of component vectors is the metric
inner product on forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable

import numpy as np

from .errors import InvalidInputError


@lru_cache(maxsize=None)
def form_basis(N: int, q: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(N), q))


@lru_cache(maxsize=None)
def _wedge_table(N: int, p: int, q: int) -> tuple[tuple[int, int, int, int], ...]:
    """Entries ``(i, j, k, sign)``: ``dx_I(i) ^ dx_J(j) = sign * dx_K(k)``."""
    left, right = form_basis(N, p), form_basis(N, q)
    target = {K: k for k, K in enumerate(form_basis(N, p + q))}
    table = []
    for i, I in enumerate(left):
        for j, J in enumerate(right):
            if set(I) & set(J):
                continue
            seq = I + J
            inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
            table.append((i, j, target[tuple(sorted(seq))], -1 if inversions % 2 else 1))
    return tuple(table)


def wedge(alpha: np.ndarray, beta: np.ndarray, N: int, p: int, q: int) -> np.ndarray:
    """Wedge product of component arrays ``(..., C(N,p))`` and ``(..., C(N,q))``."""
    if p + q > N:
        return np.zeros(alpha.shape[:-1] + (0,), dtype=np.result_type(alpha, beta))
    out = np.zeros(np.broadcast_shapes(alpha.shape[:-1], beta.shape[:-1]) + (comb(N, p + q),),
                   dtype=np.result_type(alpha, beta))
    for i, j, k, s in _wedge_table(N, p, q):
        out[..., k] += s * alpha[..., i] * beta[..., j]
    return out


def exterior_derivative_constant(partials: np.ndarray, N: int, q: int) -> np.ndarray:
    """d of a q-form whose coefficients have constant partials.

    ``partials[..., k, I]`` is the derivative of coefficient ``I`` along ``x_k``.
    """
    src = form_basis(N, q)
    target = {K: i for i, K in enumerate(form_basis(N, q + 1))}
    out = np.zeros(partials.shape[:-2] + (len(target),), dtype=partials.dtype)
    for k in range(N):
        for i, I in enumerate(src):
            if k in I:
                continue
            K = tuple(sorted((k,) + I))
            sign = -1 if K.index(k) % 2 else 1
            out[..., target[K]] += sign * partials[..., k, i]
    return out


@dataclass(frozen=True)
class SmoothForm:
    """A smooth (possibly vector-valued) q-form given in chart coordinates.

    ``func`` maps points ``(m, N)`` to components: ``(m,)`` or ``(m, C(N,q))`` for
    scalar forms, ``(m, C(N,q), n)`` (or ``(m, n)`` when ``q == 0``) for V-valued ones.
    ``derivative`` optionally returns the components of d(form) in the same layout.
    """

    degree: int
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    fiber_dim: int = 1

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Values normalized to shape ``(m, C(N,q), fiber_dim)``."""
        return _normalize(self.func(x), x, self.degree, self.fiber_dim)

    def d(self, x: np.ndarray) -> np.ndarray:
        if self.derivative is None:
            raise InvalidInputError("this form carries no exterior derivative")
        return _normalize(self.derivative(x), x, self.degree + 1, self.fiber_dim)


def _normalize(values, x: np.ndarray, q: int, fiber: int) -> np.ndarray:
    x = np.atleast_2d(x)
    m, N = x.shape
    size = comb(N, q)
    v = np.asarray(values)
    if v.ndim == 0:
        v = np.full(m, v)
    if fiber == 1:
        v = v.reshape(m, size, 1)
    elif q == 0 and v.shape == (m, fiber):
        v = v.reshape(m, 1, fiber)
    if v.shape != (m, size, fiber):
        raise InvalidInputError(f"form values have shape {np.shape(values)}, expected {(m, size, fiber)}")
    return v


def one_form(func, derivative=None) -> SmoothForm:
    """Scalar 1-form helper (a connection potential A, say)."""
    return SmoothForm(1, func, derivative)


def constant_form(components, q: int = 1) -> SmoothForm:
    comps = np.asarray(components, dtype=float)

    def func(x):
        return np.broadcast_to(comps, (x.shape[0],) + comps.shape).copy()

    def zero(x):
        n_out = comb(x.shape[1], q + 1)
        return np.zeros((x.shape[0], n_out))

    return SmoothForm(q, func, zero)
