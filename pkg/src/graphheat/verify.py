"""Invariant suites run by ``graphheat verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectral
from .graph import (
    MetricGraph,
    add_dirichlet,
    attach_pendant,
    interval,
    lengthen_edge,
    midpoint_loop_cut,
    mirror,
    scale,
    subdivide,
)
from .heat import EvalConfig, hadamard_derivative, heat_content, heat_content_remainder, small_time_bound

SUITES = ("identities", "inequalities", "oracle", "asymptotics")


@dataclass
class Check:
    name: str
    passed: bool | None
    detail: str = ""

    def line(self) -> str:
        tag = "SKIP" if self.passed is None else ("PASS" if self.passed else "FAIL")
        return f"{tag} {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _q(g, t, cfg):
    return heat_content(g, t, cfg)


def _equal(name, a, b, factor=1.0) -> Check:
    gap = abs(a.value - factor * b.value)
    tol = a.error_bound + factor * b.error_bound
    return Check(name, gap <= tol, f"gap={gap:.3e} bound={tol:.3e}")


def identities(g: MetricGraph, cfg: EvalConfig, times=(0.1, 1.0)) -> list[Check]:
    out = []
    e0 = g.edge(0)
    sub = subdivide(g, 0, 0.37 * e0.length)
    mir_set = set(g.standard)
    for t in times:
        q = _q(g, t, cfg)
        out.append(_equal(f"subdivision t={t}", _q(sub, t, cfg), q))
        out.append(_equal(f"scaling t={t}", _q(scale(g, 2.0), t, cfg), _q(g, t / 4, cfg), 2.0))
        if mir_set:
            out.append(_equal(f"mirroring m=2 t={t}", _q(mirror(g, mir_set, 2), t, cfg), q, 2.0))
        for e in g.edges:
            if e.is_loop:
                out.append(_equal(f"loop cut edge {e.id} t={t}", _q(midpoint_loop_cut(g, e.id), t, cfg), q))
    return out


def inequalities(g: MetricGraph, cfg: EvalConfig, times=(0.1, 0.5, 2.0)) -> list[Check]:
    out = []
    grid = np.geomspace(0.01, 10.0, 12)
    qs = [_q(g, t, cfg) for t in grid]
    ok = all(0 < q.value - q.error_bound and q.value + q.error_bound < g.volume for q in qs)
    out.append(Check("0 < Q_t < |G| on grid", ok))
    mono = all(b.value + b.error_bound < a.value - a.error_bound for a, b in zip(qs, qs[1:]))
    out.append(Check("Q_t strictly decreasing on grid", mono))
    leaves = [v for v in g.standard if g.degree(v) == 1]
    hub = next(iter(sorted(g.standard, key=lambda v: -g.degree(v))), None)
    dir_edges = [eid for v in g.dirichlet for eid, _ in g.incident(v)]
    for t in times:
        q = _q(g, t, cfg)
        if leaves:
            r = _q(add_dirichlet(g, leaves[0]), t, cfg)
            out.append(Check(f"add Dirichlet decreases t={t}", q.value - r.value > q.error_bound + r.error_bound))
        else:
            out.append(Check(f"add Dirichlet decreases t={t}", None, "no standard leaf"))
        if hub is not None:
            r = _q(attach_pendant(g, hub, interval(0.5, 0), 0), t, cfg)
            out.append(Check(f"attach pendant increases t={t}", r.value - q.value > q.error_bound + r.error_bound))
        if dir_edges:
            ell = 0.5
            r = _q(lengthen_edge(g, dir_edges[0], ell), t, cfg)
            lower = spectral.closed_form_heat_content(spectral.ClosedForm("interval_dirichlet", ell), t)
            gain = r.value - q.value
            out.append(
                Check(
                    f"Dirichlet-side lengthening gain t={t}",
                    gain - lower > q.error_bound + r.error_bound,
                    f"gain={gain:.6g} lower={lower:.6g}",
                )
            )
    return out


def oracle(g: MetricGraph, cfg: EvalConfig, times=(0.1, 1.0), max_nodes: int = 600) -> list[Check]:
    out = []
    h = spectral.default_mesh(g, max_nodes)
    m1, m2 = spectral.build(g, h), spectral.build(g, h / 2)
    for t in times:
        ps = _q(g, t, cfg)
        q1, q2 = spectral.eigen_heat_content(m1, t), spectral.eigen_heat_content(m2, t)
        gap = abs(ps.value - q2)
        ok = gap <= abs(q1 - q2) + ps.error_bound + 1e-12
        out.append(Check(f"path sum vs spectral t={t}", ok, f"gap={gap:.3e} mesh step={abs(q1 - q2):.3e}"))
    l1, lam1 = spectral.lambda1(m1), spectral.lambda1(m2)
    # extrapolated eigenvalue with the mesh step as slack; the bound is sharp on an interval
    lam_x = (4 * lam1 - l1) / 3
    floor = math.pi**2 / (4 * g.volume**2)
    out.append(Check("lambda_1 >= pi^2/(4|G|^2)", lam_x + abs(lam1 - l1) >= floor, f"lambda_1={lam_x:.9g} floor={floor:.9g}"))
    for t in times:
        ps = _q(g, t, cfg)
        out.append(Check(f"Q_t < exp(-lambda_1 t)|G| t={t}", ps.value + ps.error_bound < math.exp(-lam1 * t) * g.volume))
    T = spectral.torsional_rigidity(m2)
    out.append(Check("lambda_1 T < |G|", lam1 * T < g.volume, f"lambda_1 T={lam1 * T:.6g}"))
    return out


def asymptotics(g: MetricGraph, cfg: EvalConfig) -> list[Check]:
    out = []
    d, lmin = g.d_max, g.l_min
    window = lmin * lmin / (2 * math.log(d)) if d > 1 else lmin * lmin / 2
    for frac in (0.5, 0.25, 0.125):
        t = window * frac
        r = heat_content_remainder(g, t, EvalConfig(tolerance=1e-30, max_terms=cfg.max_terms))
        b = small_time_bound(g, t)
        out.append(Check(f"small-time bound t={t:.4g}", abs(r.value) + r.error_bound < b, f"|R|={abs(r.value):.3e} bound={b:.3e}"))
    t0 = lmin * lmin / 100
    for e in g.edges[:3]:
        hd = hadamard_derivative(g, e.id, t0, cfg)
        out.append(Check(f"Hadamard derivative -> 1 edge {e.id}", abs(hd.value - 1) <= 1e-6 + hd.error_bound))
    m = spectral.build(g, spectral.default_mesh(g, 600))
    lam1 = spectral.lambda1(m)
    t = 50 / lam1
    rate = spectral.large_time_rate(m, np.linspace(0.5 * t, 1.5 * t, 21))
    out.append(Check("large-time decay rate -> lambda_1", abs(rate / lam1 - 1) < 0.01, f"rate={rate:.6g} lambda_1={lam1:.6g}"))
    return out


RUNNERS: dict[str, Callable[[MetricGraph, EvalConfig], list[Check]]] = {
    "identities": identities,
    "inequalities": inequalities,
    "oracle": oracle,
    "asymptotics": asymptotics,
}


def run_suites(g: MetricGraph, suites, cfg: EvalConfig | None = None) -> list[Check]:
    cfg = cfg or EvalConfig(tolerance=1e-11, method="path_sum")
    out = []
    for s in suites:
        out.extend(RUNNERS[s](g, cfg))
    return out
