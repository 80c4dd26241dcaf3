"""Invariant suites with fixed seeds; each entry reports a measured value against a tolerance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import pi
from typing import Callable

import numpy as np

from ..bundle import (almost_projection_defect, flat_line_bundle_circle, holonomy, i_pointwise,
                      injectivity_check, projector_defect, vector_form)
from ..cup import cup, cup_wedge_defect, wedge_consistency_check
from ..forms import SmoothForm, one_form
from ..geometry import preset_circle, preset_torus
from ..laplacian import cochain_from_smooth, commutation_defects
from ..quadrature import simplex_quadrature
from ..simplicial import Cochain, coboundary_matrix
from ..whitney import rw_identity_check, stokes_check

SUITES = ("algebra", "whitney", "decay", "bundle")
EXACT_TOL = 1e-12
MIN_ORDER = 0.9


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    at_least: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value >= self.tolerance if self.at_least else self.value <= self.tolerance

    def line(self) -> str:
        rel = ">=" if self.at_least else "<="
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} (need {rel} {self.tolerance:.1e})"


@dataclass(frozen=True)
class CheckReport:
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __bool__(self) -> bool:
        return self.passed

    def text(self) -> str:
        return "\n".join(r.line() for r in self.results) + "\n"


def _finest_order(values: list[float]) -> float:
    """Observed order between the two finest levels (each level halves h)."""
    a, b = values[-2], values[-1]
    return math.log2(a / b) if a > 0 and b > 0 else float("nan")


def _decreasing(values: list[float]) -> float:
    """Largest ratio of consecutive values; < 1 means strictly decreasing."""
    return max(b / a for a, b in zip(values, values[1:]))


def algebra_suite(seed: int = 0, samples: int = 100) -> list[CheckResult]:
    G = preset_torus(4)
    K = G.complex
    rng = np.random.default_rng(seed)
    dd = max(float(np.abs((coboundary_matrix(K, q + 1) @ coboundary_matrix(K, q)).toarray()).max())
             for q in range(K.dim - 1))
    comm = leib = 0.0
    pairs = [(p, q) for p in range(3) for q in range(3 - p)]
    for s in range(samples):
        p, q = pairs[s % len(pairs)]
        a = Cochain(p, rng.standard_normal(K.count(p)))
        b = Cochain(q, rng.standard_normal(K.count(q)))
        ab = cup(K, a, b).values
        comm = max(comm, float(np.abs(ab - (-1) ** (p * q) * cup(K, b, a).values).max()))
        if p + q < K.dim:
            da = Cochain(p + 1, coboundary_matrix(K, p) @ a.values)
            db = Cochain(q + 1, coboundary_matrix(K, q) @ b.values)
            lhs = coboundary_matrix(K, p + q) @ ab
            rhs = cup(K, da, b).values + (-1) ** p * cup(K, a, db).values
            leib = max(leib, float(np.abs(lhs - rhs).max()))
    idem = 0.0
    for v in range(K.count(0)):
        e = Cochain.indicator(K, (v,))
        idem = max(idem, float(np.abs(cup(K, e, e).values - e.values).max()))
    return [
        CheckResult("coboundary squares to zero (torus n=4)", dd, 0.0),
        CheckResult("cup graded commutativity", comm, EXACT_TOL),
        CheckResult("cup Leibniz rule", leib, EXACT_TOL),
        CheckResult("vertex cup idempotence", idem, EXACT_TOL),
    ]


def whitney_suite() -> list[CheckResult]:
    out = []
    for label, G in (("circle n=8", preset_circle(8)), ("torus n=4", preset_torus(4))):
        for q in range(G.dim + 1):
            out.append(CheckResult(f"de Rham of Whitney is identity, degree {q} ({label})",
                                   rw_identity_check(G, q), EXACT_TOL))
        for q in range(G.dim):
            out.append(CheckResult(f"Stokes for Whitney forms, degree {q} ({label})",
                                   stokes_check(G, q), EXACT_TOL))
    G = preset_torus(4)
    rng = np.random.default_rng(1)
    for p, q in ((0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)):
        a = Cochain(p, rng.standard_normal(G.complex.count(p)))
        b = Cochain(q, rng.standard_normal(G.complex.count(q)))
        out.append(CheckResult(f"cup equals de Rham of Whitney wedge ({p},{q})",
                               wedge_consistency_check(G, a, b), 1e-10))
    return out


def _cup_wedge_orders() -> list[float]:
    w1 = one_form(lambda x: np.stack([np.sin(2 * pi * x[:, 0]), 0 * x[:, 0]], -1))
    w2 = SmoothForm(0, lambda x: np.cos(2 * pi * x[:, 1]))
    return [cup_wedge_defect(preset_torus(n), w1, w2) for n in (4, 8, 16, 32)]


def _commutation_orders() -> dict[str, list[float]]:
    A = one_form(lambda x: (0.3 + 0.2 * np.sin(x[:, 0]))[:, None])
    f = SmoothForm(0, lambda x: np.cos(2 * x[:, 0]), lambda x: (-2 * np.sin(2 * x[:, 0]))[:, None])
    out: dict[str, list[float]] = {}
    for n in (16, 32, 64, 128):
        G = preset_circle(n)
        for k, v in commutation_defects(G, A, cochain_from_smooth(G, A), f).items():
            out.setdefault(k, []).append(v)
    return out


def _bundle_test_form(q: int) -> SmoothForm:
    return vector_form([lambda x: np.cos(x[:, 0]), lambda x: np.sin(2 * x[:, 0]) + 0.3], q)


def decay_suite() -> list[CheckResult]:
    out = []
    vals = _cup_wedge_orders()
    out.append(CheckResult("cup/wedge sup defect order (torus n=4..32)", _finest_order(vals), MIN_ORDER, True))
    for name, vals in _commutation_orders().items():
        out.append(CheckResult(f"twisted commutation {name} order (circle n=16..128)",
                               _finest_order(vals), MIN_ORDER, True))
    levels = (16, 32, 64, 128)
    vals = [almost_projection_defect(preset_circle(n), flat_line_bundle_circle(0.6, n), 1, _bundle_test_form(1))
            for n in levels]
    out.append(CheckResult("almost projection defect order, degree 1 (circle n=16..128)",
                           _finest_order(vals), MIN_ORDER, True))
    return out


def bundle_suite(theta: float = 0.6) -> list[CheckResult]:
    out = []
    n = 32
    G, E = preset_circle(n), flat_line_bundle_circle(theta, n)
    x = np.random.default_rng(2).uniform(0, 2 * pi, size=(1000, 1))
    ix, _, P = i_pointwise(E, x)
    iso = float(np.abs(np.conj(np.swapaxes(ix, 1, 2)) @ ix - 1).max())
    out.append(CheckResult("embedding is isometric at 1000 samples", iso, EXACT_TOL))
    out.append(CheckResult("pointwise projection is idempotent", float(np.abs(P @ P - P).max()), 1e-10))
    for chart in E.charts:
        frames = chart.frame(x)
        out.append(CheckResult(f"chart {chart.id} frame is isometric",
                               float(np.abs(np.conj(np.swapaxes(frames, 1, 2)) @ frames - 1).max()), 1e-10))
    nodes = np.einsum("mj,tjn->tmn", simplex_quadrature(1, 8).points, G.coords).reshape(-1, 1)
    out.append(CheckResult("partition squares sum to one at quadrature nodes",
                           float(np.abs(E.partition_sum(nodes) - 1).max()), 1e-10))
    out.append(CheckResult("almost projection commutes with de Rham, degree 0",
                           almost_projection_defect(G, E, 0, _bundle_test_form(0)), EXACT_TOL))
    for q in (0, 1):
        out.append(CheckResult(f"twisted Whitney map injective, degree {q} (n={n})",
                               injectivity_check(G, E, q), 1e-12, True))
    Gf = preset_circle(256)
    U = holonomy(flat_line_bundle_circle(theta, 256), Gf.vertex_points())
    out.append(CheckResult("holonomy matches exp(i theta) (n=256)",
                           float(abs(U[0, 0] - np.exp(1j * theta))), 1e-2))
    levels = (16, 32, 64, 128)
    proj = [projector_defect(preset_circle(m), flat_line_bundle_circle(theta, m), 1) for m in levels]
    out.append(CheckResult("projector defect decreasing (max consecutive ratio)", _decreasing(proj), 1.0))
    return out


SUITE_FUNCS: dict[str, Callable[[], list[CheckResult]]] = {
    "algebra": algebra_suite,
    "whitney": whitney_suite,
    "decay": decay_suite,
    "bundle": bundle_suite,
}


def run_checks(suite: str = "all") -> CheckReport:
    names = SUITES if suite == "all" else (suite,)
    results: list[CheckResult] = []
    for name in names:
        if name not in SUITE_FUNCS:
            raise ValueError(f"unknown suite {name!r}")
        results.extend(CheckResult(f"[{name}] {r.name}", r.value, r.tolerance, r.at_least)
                       for r in SUITE_FUNCS[name]())
    return CheckReport(tuple(results))
