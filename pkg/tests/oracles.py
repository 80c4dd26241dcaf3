"""Independent reference computations used as test oracles.

Nothing here imports the package's assembly code: each oracle is derived by hand
(Fourier symbols, classical P1 element matrices, brute-force lattice sums).
"""

from __future__ import annotations

import itertools
from math import pi

import numpy as np


def circle_magnetic_eigenvalues(n: int, alpha: float) -> np.ndarray:
    """All eigenvalues of the degree-0 pencil on the n-gon with constant edge value alpha*h.

    The Fourier mode ``c_j = exp(i m j h)`` diagonalizes both matrices:
    edge symbol ``(e^{imh} - 1) + i alpha h (1 + e^{imh}) / 2`` with squared modulus
    ``(2 sin(mh/2) + alpha h cos(mh/2))^2``, stiffness weight ``1/h``, mass symbol
    ``h (2 + cos mh) / 3``.
    """
    h = 2 * pi / n
    m = np.arange(n)
    num = (2 * np.sin(m * h / 2) + alpha * h * np.cos(m * h / 2)) ** 2 / h
    den = h * (2 + np.cos(m * h)) / 3
    return np.sort(num / den)


def circle_untwisted_eigenvalues(n: int) -> np.ndarray:
    h = 2 * pi / n
    k = np.arange(n)
    return np.sort((6 / h ** 2) * (1 - np.cos(k * h)) / (2 + np.cos(k * h)))


def lattice_spectrum(alpha: float, beta: float, count: int, box: int = 12) -> np.ndarray:
    k = np.arange(-box, box + 1)
    vals = (2 * pi * k[:, None] + alpha) ** 2 + (2 * pi * k[None, :] + beta) ** 2
    return np.sort(vals.ravel())[:count]


def shifted_squares(shift: float, count: int, box: int = 50) -> np.ndarray:
    k = np.arange(-box, box + 1)
    return np.sort((k + shift) ** 2)[:count]


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def p1_element(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Classical linear triangle: stiffness from cotangents, mass area/12 * (1 + delta)."""
    P = np.asarray(points, dtype=float)
    area = 0.5 * abs(_cross2(P[1] - P[0], P[2] - P[0]))
    K = np.zeros((3, 3))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        u, v = P[j] - P[i], P[k] - P[i]
        cot = np.dot(u, v) / abs(_cross2(u, v))
        K[j, k] = K[k, j] = -0.5 * cot
    np.fill_diagonal(K, -K.sum(axis=1))
    M = area / 12 * (np.ones((3, 3)) + np.eye(3))
    return K, M, area


def barycentric_gradients(points: np.ndarray) -> np.ndarray:
    """Solve ``mu_i(x) = a_i + g_i . x`` from ``mu_i(p_j) = delta_ij`` directly."""
    P = np.asarray(points, dtype=float)
    A = np.hstack([np.ones((len(P), 1)), P])
    return np.linalg.solve(A, np.eye(len(P)))[1:].T


def non_associativity_witness(cup, K, Cochain):
    """Search indicator cochains for ``(f u g) u a != f u (g u a)``."""
    for v, w in itertools.product(K.simplices[0], repeat=2):
        f, g = Cochain.indicator(K, v), Cochain.indicator(K, w)
        for e in K.simplices[1]:
            a = Cochain.indicator(K, e)
            left = cup(K, cup(K, f, g), a).values
            right = cup(K, f, cup(K, g, a)).values
            if np.abs(left - right).max() > 0:
                return (v, w, e), float(np.abs(left - right).max())
    return None, 0.0
