"""Finite-difference reference solver for the heat equation on metric graphs.

Independent of the path-sum code: the Laplacian is discretized with nodes
on every edge, Kirchhoff rows at standard vertices and eliminated Dirichlet
nodes. Heat content then follows from the eigen-expansion or from implicit
time stepping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu, spsolve
from scipy.special import logsumexp

from .graph import InvalidGraph, MetricGraph, require_valid

DENSE_LIMIT = 3000


@dataclass
class SpectralModel:
    """Discrete Laplacian ``W^{-1} K`` with lumped weights ``w``."""

    h: float
    K: sp.csr_matrix
    w: np.ndarray
    edge_nodes: list[np.ndarray]
    n_dirichlet: int
    volume: float
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.w)

    def eigenpairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and squared mass coefficients (sum_j w_j phi_k(x_j))^2."""
        if self._eig is None:
            if self.size > DENSE_LIMIT:
                raise RuntimeError(f"{self.size} nodes exceed the dense eigensolver limit {DENSE_LIMIT}")
            s = 1 / np.sqrt(self.w)
            A = (self.K.toarray() * s[:, None]) * s[None, :]
            lam, psi = sla.eigh(A)
            coef = (np.sqrt(self.w) @ psi) ** 2
            self._eig = (lam, coef)
        return self._eig


def build(g: MetricGraph, h: float) -> SpectralModel:
    """Second-order discretization with mesh width at most ``h`` on every edge."""
    require_valid(g, require_dirichlet=False)
    if not h < g.l_min / 4:
        raise InvalidGraph(f"mesh too coarse: h={h!r} must be below l_min/4={g.l_min / 4!r}")
    node_of_vertex: dict[int, int] = {}
    n = 0
    for v in range(g.n_vertices):
        if not g.is_dirichlet(v):
            node_of_vertex[v] = n
            n += 1
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    w: list[float] = [0.0] * n
    edge_nodes = []
    for e in g.edges:
        m = max(int(math.ceil(e.length / h - 1e-9)), 2)
        he = e.length / m
        interior = list(range(n, n + m - 1))
        n += m - 1
        w.extend([0.0] * (m - 1))
        chain = [node_of_vertex.get(e.u, -1)] + interior + [node_of_vertex.get(e.v, -1)]
        edge_nodes.append(np.array(chain))
        for a, b in zip(chain, chain[1:]):
            k = 1.0 / he
            for x in (a, b):
                if x >= 0:
                    rows.append(x)
                    cols.append(x)
                    vals.append(k)
                    w[x] += he / 2
            if a >= 0 and b >= 0:
                rows += [a, b]
                cols += [b, a]
                vals += [-k, -k]
    K = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return SpectralModel(h, K, np.array(w), edge_nodes, len(g.dirichlet), g.volume)


def lambda1(model: SpectralModel) -> float:
    return float(model.eigenpairs()[0][0])


def eigen_heat_content(model: SpectralModel, t: float, k_max: int | None = None) -> float:
    """sum_k exp(-lambda_k t) (int phi_k)^2 over the discrete spectrum."""
    if not t > 0:
        raise ValueError("t must be positive")
    lam, coef = model.eigenpairs()
    if k_max is not None:
        lam, coef = lam[:k_max], coef[:k_max]
    return math.fsum(coef * np.exp(-lam * t))


def eigen_log_heat_content(model: SpectralModel, t: float) -> float:
    lam, coef = model.eigenpairs()
    keep = coef > 0
    return float(logsumexp(np.log(coef[keep]) - lam[keep] * t))


class _CrankNicolson:
    """Adaptive Crank-Nicolson for W u' = -K u.

    Steps are powers of two so factorizations can be reused. The step-doubling
    error is measured on the mass and squared-norm functionals: stiff modes
    left undamped by the scheme carry almost no mass and would otherwise pin
    the step at the mesh scale.
    """

    def __init__(self, model: SpectralModel, tol: float):
        self.m = model
        self.tol = tol
        self.W = sp.diags(model.w).tocsc()
        self.K = model.K.tocsc()
        self._lu: dict[float, tuple] = {}

    def _step(self, u, dt):
        if dt not in self._lu:
            A = (self.W + 0.5 * dt * self.K).tocsc()
            B = (self.W - 0.5 * dt * self.K).tocsr()
            self._lu[dt] = (splu(A), B)
        lu, B = self._lu[dt]
        return lu.solve(B @ u)

    def _gap(self, a, b) -> float:
        w = self.m.w
        return max(abs(math.fsum(w * (a - b))), abs(math.fsum(w * (a * a - b * b)))) / 3

    def run(self, u, t_end: float):
        lam_max = 4.0 / (self.m.h * self.m.h)
        dt = 2.0 ** math.floor(math.log2(0.1 / lam_max))
        t = 0.0
        while t < t_end:
            step = min(dt, t_end - t)
            full = self._step(u, step)
            half = self._step(self._step(u, step / 2), step / 2)
            err = self._gap(full, half)
            if err > self.tol and step > 1e-14:
                dt = step / 2 if step < dt else dt / 2
                continue
            u = half
            t += step
            if err < self.tol / 20 and step == dt:
                dt *= 2
        return u


def stepper_solution(model: SpectralModel, t: float, tol: float = 1e-11) -> np.ndarray:
    if not t > 0:
        raise ValueError("t must be positive")
    return _CrankNicolson(model, tol).run(np.ones(model.size), t)


def stepper_heat_content(model: SpectralModel, t: float, tol: float = 1e-11) -> float:
    """Discrete L1 mass at time t of the solution started from u = 1."""
    u = stepper_solution(model, t, tol)
    return math.fsum(model.w * u)


def l2_mass_identity(model: SpectralModel, t: float, tol: float = 1e-11) -> tuple[float, float]:
    """(Q_{2t}, ||u(t)||^2) from the time stepper; equal for the exact semigroup."""
    q2 = stepper_heat_content(model, 2 * t, tol)
    u = stepper_solution(model, t, tol)
    return q2, math.fsum(model.w * u * u)


def torsional_rigidity(model: SpectralModel) -> float:
    """Integral of the solution of -u'' = 1 with the graph's vertex conditions."""
    if model.n_dirichlet == 0:
        raise InvalidGraph("torsional rigidity needs at least one Dirichlet vertex")
    u = spsolve(model.K.tocsc(), model.w)
    return math.fsum(model.w * u)


def large_time_rate(model: SpectralModel, t_grid) -> float:
    """Least-squares slope of -log Q_t over the second half of ``t_grid``."""
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    tail = ts[len(ts) // 2:] if len(ts) >= 4 else ts
    logq = np.array([eigen_log_heat_content(model, t) for t in tail])
    if not np.all(np.isfinite(logq)):
        raise FloatingPointError("heat content underflow on the grid")
    slope, _ = np.polyfit(tail, -logq, 1)
    return float(slope)


def default_mesh(g: MetricGraph, max_nodes: int = 1400) -> float:
    return min(g.l_min / 8, g.volume / max_nodes)


def extrapolated_heat_content(g: MetricGraph, t: float) -> tuple[float, float, float]:
    """Richardson value from meshes h and h/2 with an error estimate."""
    h = default_mesh(g)
    q1 = eigen_heat_content(build(g, h), t)
    q2 = eigen_heat_content(build(g, h / 2), t)
    val = (4 * q2 - q1) / 3
    return val, abs(q2 - q1) / 3, h


# ---------------------------------------------------------------------------
# closed forms


FAMILIES = ("interval_mixed", "interval_dirichlet", "star_all_dirichlet", "pumpkin_chain", "mirrored_half_star")


@dataclass(frozen=True)
class ClosedForm:
    family: str
    length: float
    count: int = 1
    n_dirichlet: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown closed-form family {self.family!r}")
        if not (self.length > 0 and self.count >= 1 and self.n_dirichlet in (1, 2)):
            raise ValueError("closed-form parameters must be positive")


def _odd_series(prefactor: float, rate: float, t: float) -> float:
    """prefactor * sum_k exp(-t (rate (2k+1))^2) / (2k+1)^2, cut once a term drops below 1e-17 of the sum."""
    terms: list[float] = []
    partial = 0.0
    k = 0
    while True:
        j = 2 * k + 1
        term = math.exp(-t * (rate * j) ** 2) / (j * j)
        if k > 0 and term < 1e-17 * partial:
            break
        terms.append(term)
        partial += term
        k += 1
    return prefactor * math.fsum(terms)


def closed_form_heat_content(form: ClosedForm, t: float) -> float:
    if not t > 0:
        raise ValueError("t must be positive")
    l = form.length
    pi2 = math.pi**2
    if form.family == "interval_mixed":
        return _odd_series(8 * l / pi2, math.pi / (2 * l), t)
    if form.family == "interval_dirichlet":
        return _odd_series(8 * l / pi2, math.pi / l, t)
    if form.family == "star_all_dirichlet":
        return _odd_series(8 * form.count * l / pi2, math.pi / (2 * l), t)
    if form.family == "pumpkin_chain":
        return _odd_series(8 * form.count * l / pi2, math.pi * form.n_dirichlet / (2 * l), t)
    return _odd_series(16 * form.count * l / pi2, math.pi / (4 * l), t)
