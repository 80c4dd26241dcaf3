"""Collapsed Gauss-Jacobi rules on the reference simplex."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi


@dataclass(frozen=True)
class QuadratureRule:
    """Barycentric nodes and weights on a q-simplex.

    Weights sum to one; multiply by the simplex volume to integrate.
    With ``order`` Gauss points per direction the rule is exact for
    polynomials of total degree ``2 * order - 1``.
    """

    dim: int
    order: int
    points: np.ndarray
    weights: np.ndarray

    @property
    def exactness(self) -> int:
        return 2 * self.order - 1


def points_for_degree(degree: int) -> int:
    return max(1, (degree + 2) // 2)


@lru_cache(maxsize=None)
def simplex_quadrature(q: int, order: int) -> QuadratureRule:
    if q == 0:
        return QuadratureRule(0, order, np.ones((1, 1)), np.ones(1))
    # Conical product: t_k = u_k * prod_{l<k} (1 - u_l), Jacobian prod (1 - u_k)^(q-k).
    axes = []
    for k in range(1, q + 1):
        alpha = q - k
        x, w = roots_jacobi(order, alpha, 0.0)
        axes.append(((1 + x) / 2, w / 2 ** (alpha + 1)))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrid = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    t = np.empty_like(u)
    rest = np.ones(u.shape[0])
    for k in range(q):
        t[:, k] = u[:, k] * rest
        rest = rest * (1 - u[:, k])
    bary = np.concatenate([rest[:, None], t], axis=1)
    weights = w * factorial(q)
    return QuadratureRule(q, order, bary, weights)
