"""Convergence sweeps over refinement levels and their serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from ..bundle import connection_pencil, flat_line_bundle_circle
from ..errors import NumericalFailureError
from ..forms import constant_form
from ..geometry import GeometricComplex, mesh_report, preset_circle, preset_torus
from ..laplacian import OperatorPencil, assemble_degree0, assemble_general, cochain_from_smooth
from ..spectra import solve_pencil, verify_spectrum
from .config import ExperimentConfig
from .reference import reference_spectrum

CSV_COLUMNS = ("level", "n", "h", "j", "lambda_discrete", "lambda_reference", "abs_error", "observed_order")
MIN_ORDER = 0.9


def exact_floor(lam: float) -> float:
    """Errors below this are roundoff: the discrete eigenvalue is exact."""
    return 1e-10 * (1.0 + abs(lam))


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    n: int
    h: float
    j: int
    lambda_discrete: float
    lambda_reference: float
    abs_error: float
    observed_order: float | None

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in CSV_COLUMNS}


@dataclass(frozen=True)
class ConvergenceResult:
    config: ExperimentConfig
    mesh: dict
    rows: tuple[ConvergenceRow, ...]
    summary: dict
    residual_max: float

    @property
    def passed(self) -> bool:
        return bool(self.summary["passed"])

    def errors(self, j: int) -> list[float]:
        return [r.abs_error for r in self.rows if r.j == j]

    def to_json(self) -> str:
        doc = {
            "config": self.config.to_dict(),
            "mesh": self.mesh,
            "rows": [r.as_dict() for r in self.rows],
            "summary": self.summary,
            "residual_max": self.residual_max,
        }
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                        for v in (getattr(r, c) for c in CSV_COLUMNS)])
        return buf.getvalue()

    def render(self) -> str:
        return self.to_json() if self.config.format == "json" else self.to_csv()


def build_level(cfg: ExperimentConfig, n: int) -> tuple[GeometricComplex, OperatorPencil]:
    if cfg.preset == "bundle_circle":
        G = preset_circle(n)
        E = flat_line_bundle_circle(cfg.theta, n)
        return G, connection_pencil(G, E, order=cfg.mass_quad_order)
    if cfg.preset == "circle":
        G, A = preset_circle(n), constant_form([cfg.alpha])
    else:
        G, A = preset_torus(n), constant_form([cfg.alpha, cfg.beta])
    a = cochain_from_smooth(G, A, cfg.quad_order)
    if cfg.degree == 0:
        return G, assemble_degree0(G, a)
    return G, assemble_general(G, a, cfg.degree)


def _order(e0: float, e1: float, h0: float, h1: float, lam: float) -> float | None:
    floor = exact_floor(lam)
    if e0 <= floor or e1 <= floor:
        return None
    return math.log(e0 / e1) / math.log(h0 / h1)


def _fit(errors: list[float], hs: list[float], lam: float) -> tuple[float | None, float]:
    e, h = np.asarray(errors), np.asarray(hs)
    C = float(np.dot(e, h) / np.dot(h, h))
    keep = e > exact_floor(lam)
    if keep.sum() < 2:
        return None, C
    slope = np.polyfit(np.log(h[keep]), np.log(e[keep]), 1)[0]
    return float(slope), C


def convergence_verdict(errors: list[float], orders: list[float | None], lam: float) -> tuple[bool, bool]:
    """(strictly decreasing over the last three levels, last observed order >= MIN_ORDER).

    Errors at the roundoff floor count as zero and need not decrease further.
    """
    floor = exact_floor(lam)
    tail = [0.0 if e <= floor else e for e in errors[-3:]]
    monotone = all(b < a or (a == 0.0 and b == 0.0) for a, b in zip(tail, tail[1:]))
    measured = [o for o in orders if o is not None]
    order_ok = not measured or measured[-1] >= MIN_ORDER
    return monotone, order_ok


def run_convergence(cfg: ExperimentConfig, solve_all: bool = False) -> ConvergenceResult:
    """Assemble, solve and compare against the reference spectrum at every level."""
    cfg = cfg.validated()
    ref = reference_spectrum(cfg.preset, cfg.connection(), cfg.num_eigs, cfg.degree)
    mesh = {"n": [], "h": [], "min_fullness": []}
    per_level = []
    residual_max = 0.0
    for n in cfg.levels:
        G, pencil = build_level(cfg, n)
        report = mesh_report(G)
        spec = solve_pencil(pencil, None if solve_all else cfg.num_eigs)
        check = verify_spectrum(pencil, spec)
        if not check.passed:
            raise NumericalFailureError(
                f"spectrum verification failed at n={n}: residual {check.max_residual:.2e}, "
                f"orthogonality {check.max_orthogonality_defect:.2e}"
            )
        residual_max = max(residual_max, check.max_residual)
        mesh["n"].append(n)
        mesh["h"].append(report.h)
        mesh["min_fullness"].append(report.min_fullness)
        per_level.append((n, report.h, np.asarray(spec.eigenvalues[: cfg.num_eigs], dtype=float)))

    rows = []
    for level, (n, h, lam) in enumerate(per_level):
        for j in range(min(cfg.num_eigs, lam.size)):
            err = float(abs(lam[j] - ref[j]))
            order = None
            if level > 0:
                _, h0, lam0 = per_level[level - 1]
                order = _order(float(abs(lam0[j] - ref[j])), err, h0, h, float(ref[j]))
            rows.append(ConvergenceRow(level, n, float(h), j, float(lam[j]), float(ref[j]), err, order))

    fitted_order, fitted_C, monotone, order_ok = {}, {}, {}, {}
    hs = mesh["h"]
    for j in range(cfg.num_eigs):
        jr = [r for r in rows if r.j == j]
        errs = [r.abs_error for r in jr]
        fitted_order[str(j)], fitted_C[str(j)] = _fit(errs, hs, float(ref[j]))
        if len(jr) >= 2:
            monotone[str(j)], order_ok[str(j)] = convergence_verdict(
                errs, [r.observed_order for r in jr], float(ref[j]))
    passed = all(monotone.values()) and all(order_ok.values())
    summary = {
        "fitted_order": fitted_order,
        "fitted_C": fitted_C,
        "monotone": monotone,
        "order_ok": order_ok,
        "passed": passed,
    }
    return ConvergenceResult(cfg, mesh, tuple(rows), summary, residual_max)


def run_spectrum(cfg: ExperimentConfig, n: int | None = None) -> ConvergenceResult:
    """Single-level solve; same output schema as a sweep with one level."""
    cfg = cfg.validated()
    level = cfg.levels[0] if n is None else int(n)
    return run_convergence(replace(cfg, levels=(level,)))
