"""Analytic spectra of the model operators."""

from __future__ import annotations

from math import ceil, comb, pi

import numpy as np

from ..errors import InvalidInputError


def _circle(shift: float, count: int) -> np.ndarray:
    # (k + shift)^2 for the count smallest; |k + shift| <= count + |shift| covers them
    K = count + int(ceil(abs(shift))) + 1
    k = np.arange(-K, K + 1)
    return np.sort((k + shift) ** 2)[:count]


def _torus(alpha: float, beta: float, count: int) -> np.ndarray:
    # grow the box until every lattice point outside it exceeds the count-th value found inside
    R = 1
    while True:
        k = np.arange(-R, R + 1)
        vals = np.sort(((2 * pi * k[:, None] + alpha) ** 2 + (2 * pi * k[None, :] + beta) ** 2).ravel())
        if vals.size >= count:
            outside = (2 * pi * (R + 1) - max(abs(alpha), abs(beta))) ** 2
            if vals[count - 1] < outside:
                return vals[:count]
        R += 1


def reference_spectrum(preset: str, connection, num_eigs: int, degree: int = 0) -> np.ndarray:
    """Lowest ``num_eigs`` eigenvalues (with multiplicity) of the continuum model operator.

    ``circle``: A = alpha dtheta on the circle of length 2 pi.
    ``torus``: A = alpha dx + beta dy on R^2/Z^2.
    ``bundle_circle``: flat line bundle with holonomy angle theta.
    Constant connections on flat models act componentwise on q-forms, so degree q
    repeats each value ``binom(N, q)`` times.
    """
    connection = tuple(float(c) for c in np.atleast_1d(connection))
    if num_eigs < 1:
        raise InvalidInputError("num_eigs must be at least 1")
    if preset == "circle":
        if len(connection) != 1 or degree not in (0, 1):
            raise InvalidInputError("circle takes one connection coefficient and degree 0 or 1")
        return _circle(connection[0], num_eigs)
    if preset == "bundle_circle":
        if len(connection) != 1 or degree != 0:
            raise InvalidInputError("bundle_circle takes a holonomy angle and degree 0")
        return _circle(connection[0] / (2 * pi), num_eigs)
    if preset == "torus":
        if len(connection) != 2 or degree not in (0, 1, 2):
            raise InvalidInputError("torus takes two connection coefficients and degree 0..2")
        mult = comb(2, degree)
        base = _torus(*connection, int(ceil(num_eigs / mult)))
        return np.repeat(base, mult)[:num_eigs]
    raise InvalidInputError(f"unsupported preset {preset!r}")
