"""Path-sum evaluators for heat content and related quantities.

Every evaluator returns a :class:`HeatValue` whose ``error_bound`` covers
the truncated tail (a priori bound) plus an estimate of floating-point
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import spectral
from .graph import (
    GraphPoint,
    InvalidGraph,
    MetricGraph,
    RegionSpec,
    require_valid,
    subdivide_region,
)
from .paths import (
    BudgetExceeded,
    LengthClasses,
    bond_length,
    bridge_sums,
    dirichlet_walk_sums,
)
from .special import INV_SQRT_PI, SQRT_PI, H, counted_tail, erfc, small_time_majorant

EPS = np.finfo(float).eps
TAIL_SHARE = 0.9


@dataclass(frozen=True)
class HeatValue:
    value: float
    error_bound: float
    terms_used: int
    cutoff_length: float
    method: str = "path_sum"

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error_bound", float(self.error_bound))
        object.__setattr__(self, "cutoff_length", float(self.cutoff_length))

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class EvalConfig:
    tolerance: float = 1e-10
    max_terms: int = 10_000_000
    method: str = "auto"
    threads: int = 1

    def __post_init__(self):
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ValueError("tolerance must be positive and finite")
        if self.method not in ("path_sum", "spectral", "auto"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


def _check_t(t: float) -> float:
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"time must be positive and finite, got {t!r}")
    return t


def choose_cutoff(tail, target: float, l_min: float, start: float | None = None) -> tuple[float, float]:
    """Smallest cutoff on a grid of step l_min/4 whose tail bound meets ``target``."""
    L = max(l_min, start or 0.0)
    step = l_min / 4
    for _ in range(200_000):
        b = tail(L)
        if b <= target:
            return L, b
        L += step
    raise BudgetExceeded("no cutoff meets the requested tail budget")


def _sum_components(graphs: Sequence[MetricGraph], fn) -> HeatValue:
    parts = [fn(g) for g in graphs]
    return HeatValue(
        math.fsum(p.value for p in parts),
        math.fsum(p.error_bound for p in parts),
        sum(p.terms_used for p in parts),
        max(p.cutoff_length for p in parts),
        "+".join(sorted({p.method for p in parts})),
    )


# ---------------------------------------------------------------------------
# heat content


def heat_content_nt(g: MetricGraph, t: float) -> float:
    """Non-topological part |G| - (2 sqrt t/sqrt pi) #E + 2 sqrt t sum_e H(l_e / 2 sqrt t)."""
    t = _check_t(t)
    st = math.sqrt(t)
    hs = H(np.array([e.length for e in g.edges]) / (2 * st))
    return math.fsum([g.volume, -2 * st * INV_SQRT_PI * g.n_edges, 2 * st * math.fsum(hs)])


def _dirichlet_series(g: MetricGraph, t: float, cfg: EvalConfig) -> HeatValue:
    """4 sqrt(t) sum_p alpha(p) H(l(p) / 2 sqrt t) over Dirichlet-to-Dirichlet paths."""
    st = math.sqrt(t)
    nd = len(g.dirichlet)
    d, lmin = g.d_max, g.l_min

    def tail(L):
        return 4 * st * INV_SQRT_PI * counted_tail(nd, d, lmin, t, L)

    L, tb = choose_cutoff(tail, TAIL_SHARE * cfg.tolerance, lmin)
    classes = LengthClasses(g)
    terms = dirichlet_walk_sums(g, L, classes, cfg.max_terms, cfg.threads)
    if not terms:
        return HeatValue(0.0, tb, 0, L)
    lens = np.array([classes.length(tm.counts) for tm in terms])
    hv = H(lens / (2 * st))
    alpha = np.array([tm.alpha for tm in terms])
    absa = np.array([tm.abs_alpha for tm in terms])
    nb = np.array([tm.n for tm in terms], dtype=float)
    s = 4 * st * math.fsum(alpha * hv)
    rounding = EPS * 4 * st * float(np.sum(absa * hv * (nb + 8)))
    return HeatValue(s, tb + rounding, len(terms), L)


def heat_content_remainder(g: MetricGraph, t: float, cfg: EvalConfig | None = None) -> HeatValue:
    """Q_t - |G| + 2 sqrt(t/pi) #V_D, evaluated without cancellation against |G|."""
    cfg = cfg or EvalConfig()
    t = _check_t(t)
    require_valid(g)
    return _dirichlet_series(g, t, cfg)


def _path_sum_heat_content(g: MetricGraph, t: float, cfg: EvalConfig) -> HeatValue:
    st = math.sqrt(t)
    base = [g.volume, -2 * st * INV_SQRT_PI * len(g.dirichlet)]
    rem = _dirichlet_series(g, t, cfg)
    value = math.fsum(base + [rem.value])
    rounding = 4 * EPS * (abs(base[0]) + abs(base[1]) + abs(rem.value))
    return HeatValue(value, rem.error_bound + rounding, rem.terms_used, rem.cutoff_length)


def _spectral_heat_content(g: MetricGraph, t: float, cfg: EvalConfig) -> HeatValue:
    val, err, h = spectral.extrapolated_heat_content(g, t)
    if err > cfg.tolerance and cfg.method == "auto":
        raise BudgetExceeded(
            f"path sum exceeded {cfg.max_terms} states and the spectral estimate "
            f"({err:.3g}) misses tolerance {cfg.tolerance:.3g}"
        )
    return HeatValue(val, err, 0, h, "spectral")


def heat_content(g: MetricGraph | Sequence[MetricGraph], t: float, cfg: EvalConfig | None = None) -> HeatValue:
    """Heat content Q_t of a graph (or the sum over a list of components)."""
    cfg = cfg or EvalConfig()
    t = _check_t(t)
    if not isinstance(g, MetricGraph):
        return _sum_components(list(g), lambda c: heat_content(c, t, cfg))
    require_valid(g)
    if cfg.method == "spectral":
        return _spectral_heat_content(g, t, cfg)
    try:
        return _path_sum_heat_content(g, t, cfg)
    except BudgetExceeded:
        if cfg.method == "path_sum":
            raise
    return _spectral_heat_content(g, t, cfg)


def small_time_bound(g: MetricGraph, t: float) -> float:
    """Upper bound on |Q_t - |G| + 2 sqrt(t/pi) #V_D| for small t."""
    t = _check_t(t)
    d, lmin = g.d_max, g.l_min
    if d > 1 and not t < lmin * lmin / (2 * math.log(d)):
        raise ValueError(f"t={t!r} outside the validity window t < {lmin * lmin / (2 * math.log(d))!r}")
    return small_time_majorant(d, lmin, t)


def hadamard_derivative(g: MetricGraph, edge: int, t: float, cfg: EvalConfig | None = None) -> HeatValue:
    """d/ds of Q_t when ``edge`` is lengthened by s, at s = 0."""
    cfg = cfg or EvalConfig()
    t = _check_t(t)
    require_valid(g)
    g.edge(edge)
    st = math.sqrt(t)
    nd = len(g.dirichlet)
    d, lmin = g.d_max, g.l_min

    def tail(L):
        # erfc(x) <= exp(-x^2) and #_e p <= #p
        return 2 * counted_tail(nd, d, lmin, t, L, power=1)

    L, tb = choose_cutoff(tail, TAIL_SHARE * cfg.tolerance, lmin)
    classes = LengthClasses(g, separate=[edge])
    k0 = classes.of_edge[edge]
    terms = [tm for tm in dirichlet_walk_sums(g, L, classes, cfg.max_terms, cfg.threads) if tm.counts[k0]]
    if not terms:
        return HeatValue(1.0, tb + EPS, 0, L)
    lens = np.array([classes.length(tm.counts) for tm in terms])
    ef = erfc(lens / (2 * st))
    w = np.array([tm.counts[k0] for tm in terms], dtype=float)
    alpha = np.array([tm.alpha for tm in terms])
    absa = np.array([tm.abs_alpha for tm in terms])
    nb = np.array([tm.n for tm in terms], dtype=float)
    s = math.fsum(alpha * w * ef)
    rounding = EPS * (2 + 2 * float(np.sum(absa * w * ef * (nb + 8))))
    return HeatValue(math.fsum([1.0, -2 * s]), tb + rounding, len(terms), L)


# ---------------------------------------------------------------------------
# edge pair integrals and the intermediate expansion


def pair_mass(a: float, b: float, mid, t: float):
    """Integral over [0,a]x[0,b] of exp(-(x + mid + y)^2 / 4t)."""
    st2 = 2 * math.sqrt(t)
    mid = np.asarray(mid, dtype=float)
    parts = (H(mid / st2), -H((a + mid) / st2), -H((b + mid) / st2), H((a + b + mid) / st2))
    if mid.ndim == 0:
        val = math.fsum(float(p) for p in parts)
    else:
        val = np.sum(np.stack(parts), axis=0)
    return 2 * SQRT_PI * t * val


def edge_pair_mass(g: MetricGraph, exit_bond: int, entry_bond: int, mid_length: float, t: float) -> float:
    t = _check_t(t)
    return float(pair_mass(bond_length(g, exit_bond), bond_length(g, entry_bond), mid_length, t))


def _pair_arrays(g: MetricGraph, classes: LengthClasses, terms):
    a = np.array([bond_length(g, tm.first) for tm in terms])
    b = np.array([bond_length(g, tm.last) for tm in terms])
    mid = np.array([classes.length(tm.mid) for tm in terms])
    alpha = np.array([tm.alpha for tm in terms])
    absa = np.array([tm.abs_alpha for tm in terms])
    nb = np.array([tm.n_mid + 2 for tm in terms], dtype=float)
    return a, b, mid, alpha, absa, nb


def _pair_mass_vec(a, b, mid, t):
    st2 = 2 * math.sqrt(t)
    val = H(mid / st2) - H((a + mid) / st2) - H((b + mid) / st2) + H((a + b + mid) / st2)
    return 2 * SQRT_PI * t * val


def heat_content_intermediate(g: MetricGraph, t: float, L_max: float) -> float:
    """Q^NT plus the edge-pair expansion over paths with at least two bonds,
    keeping those whose interior part has length <= L_max."""
    t = _check_t(t)
    require_valid(g)
    classes = LengthClasses(g)
    terms = bridge_sums(g, list(range(2 * g.n_edges)), lambda b: True, L_max, classes)
    nt = heat_content_nt(g, t)
    if not terms:
        return nt
    a, b, mid, alpha, _, _ = _pair_arrays(g, classes, terms)
    s = math.fsum(alpha * _pair_mass_vec(a, b, mid, t))
    return math.fsum([nt, s / math.sqrt(4 * math.pi * t)])


# ---------------------------------------------------------------------------
# heat kernel


def _check_interior(g: MetricGraph, p: GraphPoint) -> None:
    e = g.edge(p.edge)
    if not 0 <= p.offset <= e.length:
        raise InvalidGraph(f"offset {p.offset!r} outside edge {p.edge}")
    if (p.offset == 0 and g.is_dirichlet(e.u)) or (p.offset == e.length and g.is_dirichlet(e.v)):
        raise InvalidGraph("heat kernel points must not be Dirichlet vertices")


class KernelSeries:
    """Truncated path expansion of p_t(x, y) for x on edge e and y on edge f."""

    def __init__(self, g: MetricGraph, e: int, f: int, t: float, cfg: EvalConfig | None = None):
        cfg = cfg or EvalConfig()
        self.t = t = _check_t(t)
        require_valid(g, require_dirichlet=False)
        self.g, self.e, self.f = g, e, f
        self.le, self.lf = g.edge(e).length, g.edge(f).length
        d, lmin = g.d_max, g.l_min
        pref = 1 / math.sqrt(4 * math.pi * t)

        def tail(L):
            return pref * counted_tail(2, d, lmin, t, L, shift=1)

        self.cutoff, tb = choose_cutoff(tail, TAIL_SHARE * cfg.tolerance, lmin, start=0.0)
        classes = LengthClasses(g)
        terms = bridge_sums(
            g, [2 * e, 2 * e + 1], lambda b: b >> 1 == f, self.cutoff, classes, cfg.max_terms, cfg.threads
        )
        self.first_fwd = np.array([tm.first & 1 == 0 for tm in terms], dtype=bool)
        self.last_fwd = np.array([tm.last & 1 == 0 for tm in terms], dtype=bool)
        self.mid = np.array([classes.length(tm.mid) for tm in terms])
        self.alpha = np.array([tm.alpha for tm in terms])
        self.abs_alpha = np.array([tm.abs_alpha for tm in terms])
        self.nb = np.array([tm.n_mid + 2 for tm in terms], dtype=float)
        self.tail_bound = tb
        self.terms_used = len(terms)
        self.pref = pref

    def evaluate(self, x, y):
        """Kernel values and error bounds at offsets ``x`` (edge e), ``y`` (edge f)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x, y = np.broadcast_arrays(x, y)
        dx = np.where(self.first_fwd[None, :], self.le - x[:, None], x[:, None])
        dy = np.where(self.last_fwd[None, :], y[:, None], self.lf - y[:, None])
        ln = dx + self.mid[None, :] + dy
        g4 = np.exp(-(ln * ln) / (4 * self.t))
        contrib = self.alpha[None, :] * g4
        s = np.array([math.fsum(row) for row in contrib]) if contrib.size else np.zeros(len(x))
        if self.e == self.f:
            s = s + np.exp(-((x - y) ** 2) / (4 * self.t))
        rounding = EPS * (1 + (self.abs_alpha[None, :] * g4 * (self.nb[None, :] + 8)).sum(axis=1))
        return self.pref * s, self.pref * rounding + self.tail_bound


def heat_kernel(g: MetricGraph, x: GraphPoint, y: GraphPoint, t: float, cfg: EvalConfig | None = None) -> HeatValue:
    """Heat kernel p_t(x, y) with Dirichlet conditions on V_D and Kirchhoff elsewhere."""
    _check_interior(g, x)
    _check_interior(g, y)
    ks = KernelSeries(g, x.edge, y.edge, t, cfg)
    v, err = ks.evaluate(x.offset, y.offset)
    return HeatValue(float(v[0]), float(err[0]), ks.terms_used, ks.cutoff)


# ---------------------------------------------------------------------------
# boundary flux


def boundary_flux(g: MetricGraph, region: RegionSpec, t: float, cfg: EvalConfig | None = None) -> HeatValue:
    """Integral of p_t(x, y) over x in the region and y outside it."""
    cfg = cfg or EvalConfig()
    t = _check_t(t)
    require_valid(g, require_dirichlet=False)
    h, inside, _ = subdivide_region(g, region)
    d, lmin, lmax = h.d_max, h.l_min, h.l_max
    pref = 1 / math.sqrt(4 * math.pi * t)
    c = min(lmax * lmax, 2 * t)

    def tail(L):
        return pref * c * counted_tail(2 * len(inside), d, lmin, t, L, shift=1)

    L, tb = choose_cutoff(tail, TAIL_SHARE * cfg.tolerance, lmin, start=0.0)
    classes = LengthClasses(h)
    firsts = sorted(b for e in inside for b in (2 * e, 2 * e + 1))
    terms = bridge_sums(h, firsts, lambda b: (b >> 1) not in inside, L, classes, cfg.max_terms, cfg.threads)
    if not terms:
        return HeatValue(0.0, tb, 0, L)
    a, b, mid, alpha, absa, nb = _pair_arrays(h, classes, terms)
    m = _pair_mass_vec(a, b, mid, t)
    value = pref * math.fsum(alpha * m)
    # each pair mass combines four H values, each contributing at most 2t
    rounding = pref * EPS * float(np.sum(absa * (np.abs(m) * (nb + 8) + 8 * t)))
    return HeatValue(value, tb + rounding, len(terms), L)


def flux_remainder_bound(g: MetricGraph, region: RegionSpec, t: float) -> float:
    """Explicit bound on |sqrt(pi/t) * flux - #boundary| from the small-time analysis."""
    t = _check_t(t)
    h, inside, boundary = subdivide_region(g, region)
    # distance from the boundary points to the vertices of the original graph
    delta = math.inf
    for eid, a, b in region.intervals:
        le = g.edge(eid).length
        for p in (a, b):
            if 0 < p < le:
                delta = min(delta, p, le - p)
    if not math.isfinite(delta):
        delta = 0.0
    nb = len(boundary)
    d, lmin = g.d_max, g.l_min
    vol_h = math.fsum(h.edge(e).length for e in inside)
    vol_c = h.volume - vol_h
    e_delta = math.exp(-delta * delta / (4 * t))
    first = 3 * nb * e_delta
    series = e_delta
    n = 1
    while True:
        term = d**n * math.exp(-(n * n * lmin * lmin + delta * delta) / (4 * t))
        series += term
        if n > 2 and term <= 1e-17 * series:
            break
        n += 1
        if n > 10_000:
            return math.inf
    second = math.sqrt(math.pi / t) * vol_h * vol_c / math.sqrt(4 * math.pi * t) * d * series
    return first + second
