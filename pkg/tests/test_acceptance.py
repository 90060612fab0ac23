"""Acceptance criteria 1-13, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary)
or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from collections import Counter
from functools import lru_cache
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from graphheat import (  # noqa: E402
    EvalConfig,
    PathClass,
    RegionSpec,
    add_dirichlet,
    attach_pendant,
    boundary_flux,
    enumerate_paths,
    extensions,
    hadamard_derivative,
    heat_content,
    heat_content_intermediate,
    heat_content_remainder,
    interval,
    lasso,
    lengthen_edge,
    load_graph,
    midpoint_loop_cut,
    mirror,
    scale,
    small_time_bound,
    star,
)
from graphheat import spectral  # noqa: E402
from graphheat.heat import KernelSeries, flux_remainder_bound  # noqa: E402

from oracles import gauss_panels, interval_series  # noqa: E402

GRAPHS = Path(__file__).resolve().parent.parent / "graphs"
PS = EvalConfig(tolerance=1e-12, method="path_sum")
RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title}" + (f" [{detail}]" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def _agree(a, b, factor=1.0) -> tuple[bool, float, float]:
    gap = abs(a.value - factor * b.value)
    tol = a.error_bound + factor * b.error_bound
    return gap <= tol, gap, tol


def test_criterion_01_interval_closed_form():
    worst = 0.0
    start = time.perf_counter()
    for ends in (1, 2):
        g = interval(3.0, ends)
        for t in (0.01, 0.1, 1.0, 10.0):
            hv = heat_content(g, t, PS)
            worst = max(worst, abs(hv.value - interval_series(3.0, t, both_dirichlet=ends == 2)))
    elapsed = time.perf_counter() - start
    record(1, "interval closed form", worst <= 1e-10 and elapsed < 1.0, f"max |diff|={worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_star_closed_form():
    g = star([1.0] * 5, range(5))
    worst = max(abs(heat_content(g, t, PS).value - 5 * interval_series(1.0, t)) for t in (0.05, 0.5))
    record(2, "equilateral star closed form", worst <= 1e-10, f"max |diff|={worst:.2e}")


def test_criterion_03_mirroring():
    g = star([1.0, 1.0, 1.0], [0])
    ok, worst = True, 0.0
    for m in (2, 3):
        gm = mirror(g, {0}, m)
        for t in (0.1, 1.0):
            good, gap, _ = _agree(heat_content(gm, t, PS), heat_content(g, t, PS), m)
            ok &= good
            worst = max(worst, gap)
    record(3, "mirroring identity", ok, f"max gap={worst:.2e}")


def test_criterion_04_loop_cut():
    g = lasso(1, 2)
    c = midpoint_loop_cut(g, 1)
    ok, worst = True, 0.0
    for t in (0.05, 0.5, 2.0):
        good, gap, _ = _agree(heat_content(c, t, PS), heat_content(g, t, PS))
        ok &= good
        worst = max(worst, gap)
    record(4, "midpoint loop cut", ok, f"max gap={worst:.2e}")


def test_criterion_05_scaling():
    g = lasso(1, 2)
    g2 = scale(g, 2.0)
    ok, worst = True, 0.0
    for t in (0.2, 2.0):
        good, gap, _ = _agree(heat_content(g2, t, PS), heat_content(g, t / 4, PS), 2.0)
        ok &= good
        worst = max(worst, gap)
    record(5, "scaling", ok, f"max gap={worst:.2e}")


def test_criterion_06_small_time_bound():
    g = lasso(1, 2)
    ok, parts = True, []
    for t in (0.005, 0.01, 0.02):
        bound = small_time_bound(g, t)
        # remainder evaluated directly, so |G| does not swamp it in rounding
        r = heat_content_remainder(g, t, EvalConfig(tolerance=1e-3 * bound, method="path_sum"))
        ok &= abs(r.value) + r.error_bound < bound
        parts.append(f"t={t}: {abs(r.value):.1e}+{r.error_bound:.1e} < {bound:.1e}")
    record(6, "small-time bound", ok, "; ".join(parts))


def test_criterion_07_hadamard():
    g = lasso(1, 2)
    ok, worst_fd, worst_lim = True, 0.0, 0.0
    h = 1e-4
    for e in range(g.n_edges):
        fd = (heat_content(lengthen_edge(g, e, h), 0.3, PS).value - heat_content(lengthen_edge(g, e, -h), 0.3, PS).value) / (2 * h)
        worst_fd = max(worst_fd, abs(hadamard_derivative(g, e, 0.3, PS).value - fd))
        worst_lim = max(worst_lim, abs(hadamard_derivative(g, e, 1e-3, PS).value - 1.0))
    ok = worst_fd <= 1e-6 and worst_lim <= 1e-6
    record(7, "Hadamard derivative", ok, f"FD gap={worst_fd:.1e}, |value-1| at t=1e-3: {worst_lim:.1e}")


@lru_cache(maxsize=None)
def _model(name: str, h: float):
    return spectral.build(load_graph(GRAPHS / f"{name}.json"), h)


def test_criterion_08_oracle_agreement():
    ok, worst, ratios = True, 0.0, []
    for name in ("interval", "star", "lasso", "figure_eight"):
        g = load_graph(GRAPHS / f"{name}.json")
        for t in (0.1, 1.0):
            ps = heat_content(g, t, PS).value
            e_fine = abs(ps - spectral.eigen_heat_content(_model(name, 2.5e-3), t))
            e_coarse = abs(ps - spectral.eigen_heat_content(_model(name, 5e-3), t))
            ratio = e_coarse / e_fine
            ratios.append(ratio)
            worst = max(worst, e_fine)
            ok &= e_fine <= 1e-4 and 3.5 <= ratio <= 4.5
    record(8, "finite-difference oracle", ok, f"max gap={worst:.1e}, error ratios {min(ratios):.3f}..{max(ratios):.3f}")


def test_criterion_09_caccioppoli():
    g = star([3.0, 1.0, 1.0], [1])
    region = RegionSpec.parse("0:1:2")
    t = 1e-3
    hv = boundary_flux(g, region, t, PS)
    scale_ = math.sqrt(math.pi / t)
    dev = abs(scale_ * hv.value - 2.0)
    R = flux_remainder_bound(g, region, t)
    # the bound lies far below double resolution, so the certified rounding of the flux is added
    ok = R < 1e-3 and dev <= R + scale_ * hv.error_bound
    record(9, "perimeter limit of the flux", ok, f"|dev|={dev:.1e}, remainder bound={R:.1e}, rounding={scale_ * hv.error_bound:.1e}")


def test_criterion_10_inequalities():
    g = star([1.0, 1.0, 1.0], [0])
    ok, margins = True, []
    for t in (0.1, 0.5, 2.0):
        q = heat_content(g, t, PS)
        d = heat_content(add_dirichlet(g, 2), t, PS)
        p = heat_content(attach_pendant(g, 0, interval(0.5, 0), 0), t, PS)
        ell = 0.5
        lg = heat_content(lengthen_edge(g, 0, ell), t, PS)
        lower = interval_series(ell, t, both_dirichlet=True)
        m1 = q.value - d.value - (q.error_bound + d.error_bound)
        m2 = p.value - q.value - (p.error_bound + q.error_bound)
        m3 = (lg.value - q.value) - lower - (lg.error_bound + q.error_bound)
        ok &= m1 > 0 and m2 > 0 and m3 > 0
        margins.append(min(m1, m2, m3))
    record(10, "surgery inequalities", ok, f"smallest net margin={min(margins):.2e}")


def test_criterion_11_spectral_identities():
    g = lasso(1, 2)
    checks = {}
    grid = np.geomspace(0.01, 10.0, 20)
    qs = [heat_content(g, t, PS) for t in grid]
    checks["monotone"] = all(b.value + b.error_bound < a.value - a.error_bound for a, b in zip(qs, qs[1:]))
    m1, m2 = spectral.build(g, 5e-3), spectral.build(g, 2.5e-3)
    l1, l2 = spectral.lambda1(m1), spectral.lambda1(m2)
    lam = (4 * l2 - l1) / 3
    checks["Q<exp(-lt)|G|"] = all(heat_content(g, t, PS).value < math.exp(-lam * t) * g.volume for t in (0.1, 1.0, 5.0))
    m = spectral.build(g, 1 / 100)
    gaps = [abs(a - b) for a, b in (spectral.l2_mass_identity(m, t) for t in (0.1, 1.0))]
    checks["Q_2t=|u_t|^2"] = max(gaps) <= 1e-8
    T = spectral.torsional_rigidity(m2)
    checks["lT<|G|"] = lam * T < g.volume
    checks["l>=pi^2/4|G|^2"] = lam >= math.pi**2 / (4 * g.volume**2)
    t = 50 / lam
    # Q_t is near 1e-22 here, below the absolute resolution of the path sum, so use the log-space eigen-sum
    literal = -spectral.eigen_log_heat_content(m2, t) / t
    checks["-logQ/t~l"] = abs(literal / lam - 1) <= 0.01
    slope = spectral.large_time_rate(m2, np.linspace(0.5 * t, 1.5 * t, 21))
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"lambda_1={lam:.6f}, lambda_1 T={lam * T:.4f}, L2 gap={max(gaps):.1e}, "
        f"-log Q/t / lambda_1 - 1={literal / lam - 1:+.4f}, log-slope / lambda_1 - 1={slope / l2 - 1:+.1e}"
        + (f"; failing: {', '.join(failed)}" if failed else "")
    )
    record(11, "spectral identities", not failed, detail)


def test_criterion_12_combinatorial_identities():
    ok, n_paths = True, 0
    for g in (lasso(1, 2), star([1.0, 1.0, 1.0], [0])):
        L = 6.0
        vd = set(g.dirichlet)
        paths = list(enumerate_paths(g, PathClass(), L, keep_zero=True))
        n_paths += len(paths)
        for p in paths:
            pre = math.fsum(q.alpha for q in extensions(g, p, "pre"))
            post = math.fsum(q.alpha for q in extensions(g, p, "post"))
            ok &= abs(pre - (-p.alpha if p.start in vd else p.alpha)) <= 1e-12
            ok &= abs(post - (-p.alpha if p.end(g) in vd else p.alpha)) <= 1e-12
        everything = set(paths)
        for W in [{v} for v in range(g.n_vertices)] + [vd]:
            starting = {p for p in everything if p.start in W}
            ending = {p for p in everything if p.end(g) in W}
            post_ext = [r for q in starting for r in extensions(g, q, "post") if r in everything]
            pre_ext = [r for q in ending for r in extensions(g, q, "pre") if r in everything]
            singles_s = {p for p in starting if p.n == 1}
            singles_e = {p for p in ending if p.n == 1}
            ok &= len(post_ext) == len(set(post_ext)) and set(post_ext).isdisjoint(singles_s)
            ok &= set(post_ext) | singles_s == starting
            ok &= len(pre_ext) == len(set(pre_ext)) and set(pre_ext).isdisjoint(singles_e)
            ok &= set(pre_ext) | singles_e == ending
        counts = Counter(p.n for p in paths if p.start in vd and p.end(g) in vd)
        ok &= all(c <= 2 * g.d_max ** (n - 1) for n, c in counts.items())
    record(12, "combinatorial identities", ok, f"{n_paths} paths checked")


def test_criterion_13_consistency():
    g = star([1.0, 1.3], [0])
    t = 0.5
    q = heat_content(g, t, PS).value
    errs = [abs(heat_content_intermediate(g, t, L) - q) for L in (1.0, 2.0, 4.0, 8.0, 12.0)]
    conv = errs[-1] < 1e-10 and errs[0] > errs[2] > errs[-1]
    gi = interval(3.0, 1)
    tk = 0.1
    xs, w = gauss_panels(0, 3.0, 40, 12)
    ks = KernelSeries(gi, 0, 0, tk, PS)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    vals, _ = ks.evaluate(X.ravel(), Y.ravel())
    dq = float(w @ vals.reshape(X.shape) @ w)
    gap = abs(dq - heat_content(gi, tk, PS).value)
    record(13, "expansion and kernel consistency", conv and gap <= 1e-6, f"intermediate errors {errs[0]:.1e} -> {errs[-1]:.1e}, kernel quadrature gap={gap:.1e}")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
