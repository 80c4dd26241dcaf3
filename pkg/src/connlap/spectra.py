"""Dense generalized Hermitian eigensolver and residual verification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import MassDegenerateError, NumericalFailureError
from .laplacian import OperatorPencil

RESIDUAL_TOL = 1e-9
ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray


@dataclass(frozen=True)
class SpectrumReport:
    passed: bool
    max_residual: float
    max_orthogonality_defect: float
    sorted: bool

    def __bool__(self) -> bool:
        return self.passed


def _as_pencil(pencil) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(pencil, OperatorPencil):
        return np.asarray(pencil.S), np.asarray(pencil.M)
    S, M = pencil
    return np.asarray(S), np.asarray(M)


def solve_pencil(pencil: OperatorPencil | tuple, num_eigs: int | None = None) -> Spectrum:
    """Lowest ``num_eigs`` (or all) eigenpairs of ``S v = lambda M v``.

    ``M = L L^H`` by Cholesky, then the standard Hermitian problem
    ``L^{-1} S L^{-H}`` is solved by LAPACK's tridiagonal reduction and
    back-transformed. Eigenvectors come out M-orthonormal.
    """
    S, M = _as_pencil(pencil)
    n = M.shape[0]
    M = 0.5 * (M + M.conj().T)
    S = 0.5 * (S + S.conj().T)
    floor = 1e-12 * np.trace(M).real / n
    try:
        L = la.cholesky(M, lower=True)
    except la.LinAlgError as exc:
        raise MassDegenerateError("mass matrix is not positive definite") from exc
    if np.min(np.abs(np.diag(L))) ** 2 <= floor or la.eigvalsh(M, subset_by_index=[0, 0])[0] <= floor:
        raise MassDegenerateError("mass matrix is numerically singular")

    X = la.solve_triangular(L, S, lower=True)
    C = la.solve_triangular(L, X.conj().T, lower=True)
    C = 0.5 * (C + C.conj().T)
    k = n if num_eigs is None else min(int(num_eigs), n)
    try:
        if k < n:
            w, Y = la.eigh(C, subset_by_index=[0, k - 1], driver="evr")
        else:
            w, Y = la.eigh(C, driver="evd")
    except la.LinAlgError as exc:
        raise NumericalFailureError("Hermitian eigensolver did not converge") from exc
    V = la.solve_triangular(L.conj().T, Y, lower=False)
    res = np.linalg.norm(S @ V - (M @ V) * w, axis=0)
    return Spectrum(w, V, res)


def verify_spectrum(pencil: OperatorPencil | tuple, spectrum: Spectrum,
                    residual_tol: float = RESIDUAL_TOL, ortho_tol: float = ORTHO_TOL) -> SpectrumReport:
    """Check residuals ``|Sv - lambda Mv| <= tol (|S|_F + |lambda| |M|_F)`` and M-orthonormality."""
    S, M = _as_pencil(pencil)
    V, w = spectrum.eigenvectors, np.asarray(spectrum.eigenvalues)
    nS, nM = np.linalg.norm(S), np.linalg.norm(M)
    res = np.linalg.norm(S @ V - (M @ V) * w, axis=0)
    rel = res / (nS + np.abs(w) * nM)
    gram = V.conj().T @ M @ V
    ortho = float(np.abs(gram - np.eye(gram.shape[0])).max()) if gram.size else 0.0
    ascending = bool(np.all(np.diff(w) >= 0))
    max_rel = float(rel.max()) if rel.size else 0.0
    return SpectrumReport(
        passed=bool(max_rel <= residual_tol and ortho <= ortho_tol and ascending),
        max_residual=max_rel,
        max_orthogonality_defect=ortho,
        sorted=ascending,
    )
