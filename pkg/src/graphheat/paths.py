"""Directed paths with their scattering coefficients, plus aggregated path sums.

Bond ``b`` of edge ``e`` is ``2*e`` (forward, u -> v) or ``2*e + 1``
(backward); the reversal of ``b`` is ``b ^ 1``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .graph import InvalidGraph, MetricGraph

FORWARD = 0
BACKWARD = 1


class BudgetExceeded(RuntimeError):
    """The requested accuracy needs more work than the configured budget."""


@dataclass(frozen=True, order=True)
class Bond:
    edge: int
    direction: int = FORWARD

    @property
    def index(self) -> int:
        return 2 * self.edge + self.direction

    @classmethod
    def from_index(cls, b: int) -> "Bond":
        return cls(b >> 1, b & 1)

    def reversed(self) -> "Bond":
        return Bond(self.edge, 1 - self.direction)

    def __str__(self) -> str:
        return f"{self.edge}{'+' if self.direction == FORWARD else '-'}"


def bond_index(b: Bond | int) -> int:
    return b.index if isinstance(b, Bond) else int(b)


def initial(g: MetricGraph, b: Bond | int) -> int:
    b = bond_index(b)
    e = g.edges[b >> 1]
    return e.u if b & 1 == 0 else e.v


def final(g: MetricGraph, b: Bond | int) -> int:
    b = bond_index(b)
    e = g.edges[b >> 1]
    return e.v if b & 1 == 0 else e.u


def bond_length(g: MetricGraph, b: Bond | int) -> float:
    return g.edges[bond_index(b) >> 1].length


def outgoing(g: MetricGraph, v: int) -> list[int]:
    """Bond indices leaving ``v``; a loop contributes both directions."""
    out = []
    for eid, end in g.incident(v):
        # leaving through end 0 means forward
        out.append(2 * eid + end)
    return sorted(out)


def incoming(g: MetricGraph, v: int) -> list[int]:
    return sorted(b ^ 1 for b in outgoing(g, v))


def beta(g: MetricGraph, incoming_bond: Bond | int, outgoing_bond: Bond | int) -> float:
    """Vertex scattering factor for the transition ``incoming -> outgoing``."""
    bi, bo = bond_index(incoming_bond), bond_index(outgoing_bond)
    u = final(g, bi)
    if initial(g, bo) != u:
        raise InvalidGraph(f"bonds {Bond.from_index(bi)} and {Bond.from_index(bo)} are not consecutive")
    if g.is_dirichlet(u):
        return -1.0
    return 2.0 / g.degree(u) - (1.0 if bo == bi ^ 1 else 0.0)


class DirectedPath:
    """Immutable bond sequence stored as a parent-linked node."""

    __slots__ = ("parent", "bond", "start", "length", "alpha", "n")

    def __init__(self, parent: "DirectedPath | None", bond: int | None, start: int, length: float, alpha: float, n: int):
        self.parent = parent
        self.bond = bond
        self.start = start
        self.length = length
        self.alpha = alpha
        self.n = n

    @classmethod
    def trivial(cls, v: int) -> "DirectedPath":
        return cls(None, None, v, 0.0, 1.0, 0)

    @classmethod
    def from_bonds(cls, g: MetricGraph, bonds: Sequence[Bond | int], start: int | None = None) -> "DirectedPath":
        bonds = [bond_index(b) for b in bonds]
        if not bonds:
            if start is None:
                raise InvalidGraph("trivial path needs a start vertex")
            return cls.trivial(start)
        p = cls(None, bonds[0], initial(g, bonds[0]), bond_length(g, bonds[0]), 1.0, 1)
        for b in bonds[1:]:
            p = p.extend(g, b)
        return p

    def extend(self, g: MetricGraph, b: int) -> "DirectedPath":
        if self.bond is None:
            if initial(g, b) != self.start:
                raise InvalidGraph("bond does not leave the start vertex")
            return DirectedPath(self, b, self.start, bond_length(g, b), 1.0, 1)
        a = self.alpha * beta(g, self.bond, b)
        return DirectedPath(self, b, self.start, self.length + bond_length(g, b), a, self.n + 1)

    @property
    def bonds(self) -> tuple[int, ...]:
        out = []
        p = self
        while p is not None and p.bond is not None:
            out.append(p.bond)
            p = p.parent
        return tuple(reversed(out))

    def end(self, g: MetricGraph) -> int:
        return self.start if self.bond is None else final(g, self.bond)

    def edge_counts(self) -> dict[int, int]:
        c: dict[int, int] = {}
        for b in self.bonds:
            c[b >> 1] = c.get(b >> 1, 0) + 1
        return c

    def vertex_hits(self, g: MetricGraph) -> dict[int, int]:
        """Interior passages plus one for each endpoint."""
        bs = self.bonds
        hits: dict[int, int] = {}
        for b in bs[:-1]:
            w = final(g, b)
            hits[w] = hits.get(w, 0) + 1
        for w in (self.start, self.end(g)):
            hits[w] = hits.get(w, 0) + 1
        return hits

    def key(self) -> tuple:
        return (self.start, self.bonds)

    def __eq__(self, other) -> bool:
        return isinstance(other, DirectedPath) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        bs = " ".join(str(Bond.from_index(b)) for b in self.bonds)
        return f"DirectedPath(start={self.start}, [{bs}], length={self.length!r}, alpha={self.alpha!r})"


def scattering_coefficient(g: MetricGraph, path: DirectedPath | Sequence[Bond | int]) -> float:
    bonds = path.bonds if isinstance(path, DirectedPath) else [bond_index(b) for b in path]
    a = 1.0
    for x, y in zip(bonds, bonds[1:]):
        a *= beta(g, x, y)
    return a


def reverse(g: MetricGraph, path: DirectedPath) -> DirectedPath:
    if path.bond is None:
        return path
    return DirectedPath.from_bonds(g, [b ^ 1 for b in reversed(path.bonds)])


def extensions(g: MetricGraph, path: DirectedPath, side: str) -> list[DirectedPath]:
    """Paths obtained by prepending (``'pre'``) or appending (``'post'``) one bond."""
    bonds = path.bonds
    if not bonds:
        raise InvalidGraph("extensions are defined for nontrivial paths")
    if side == "post":
        return [DirectedPath.from_bonds(g, bonds + (b,)) for b in outgoing(g, final(g, bonds[-1]))]
    if side == "pre":
        return [DirectedPath.from_bonds(g, (b,) + bonds) for b in incoming(g, initial(g, bonds[0]))]
    raise ValueError("side must be 'pre' or 'post'")


@dataclass(frozen=True)
class PathClass:
    """Selector for enumerated paths; ``None`` fields do not constrain."""

    start: frozenset[int] | None = None
    end: frozenset[int] | None = None
    min_bonds: int = 1
    max_bonds: int | None = None

    @classmethod
    def dirichlet(cls, g: MetricGraph) -> "PathClass":
        vd = frozenset(g.dirichlet)
        return cls(start=vd, end=vd)

    def __and__(self, other: "PathClass") -> "PathClass":
        def meet(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return a & b

        mb = [x for x in (self.max_bonds, other.max_bonds) if x is not None]
        return PathClass(
            meet(self.start, other.start),
            meet(self.end, other.end),
            max(self.min_bonds, other.min_bonds),
            min(mb) if mb else None,
        )

    def accepts(self, g: MetricGraph, p: DirectedPath) -> bool:
        if p.n < self.min_bonds or (self.max_bonds is not None and p.n > self.max_bonds):
            return False
        if self.start is not None and p.start not in self.start:
            return False
        if self.end is not None and p.end(g) not in self.end:
            return False
        return True


def enumerate_paths(
    g: MetricGraph,
    cls: PathClass,
    L_max: float,
    first_bond: int | None = None,
    keep_zero: bool = False,
) -> Iterator[DirectedPath]:
    """Best-first enumeration of the nontrivial paths in ``cls`` with length <= L_max.

    Paths come out in non-decreasing metric length. ``first_bond`` restricts
    to one work split. Zero-coefficient paths are pruned unless ``keep_zero``.
    """
    starts = range(g.n_vertices) if cls.start is None else sorted(cls.start)
    heap: list[tuple[float, int, DirectedPath]] = []
    tie = itertools.count()
    slack = 1e-12 * max(1.0, L_max)
    for v in starts:
        for b in outgoing(g, v):
            if first_bond is not None and b != first_bond:
                continue
            p = DirectedPath(None, b, v, bond_length(g, b), 1.0, 1)
            if p.length <= L_max + slack:
                heapq.heappush(heap, (p.length, next(tie), p))
    while heap:
        _, _, p = heapq.heappop(heap)
        if cls.accepts(g, p):
            yield p
        if cls.max_bonds is not None and p.n >= cls.max_bonds:
            continue
        for b in outgoing(g, final(g, p.bond)):
            q = p.extend(g, b)
            if q.alpha == 0.0 and not keep_zero:
                continue
            if q.length <= L_max + slack:
                heapq.heappush(heap, (q.length, next(tie), q))


def dump_paths(paths: Iterable[DirectedPath]) -> str:
    """One ``length alpha bond_ids...`` line per path."""
    lines = []
    for p in paths:
        lines.append(" ".join([repr(p.length), repr(p.alpha)] + [str(b) for b in p.bonds]))
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# aggregated sums
#
# Evaluators never need individual paths: the summands depend only on the
# multiset of traversed edge lengths and on the first and last bonds. Paths
# are therefore aggregated by (last bond, traversal counts per length class)
# with summed coefficients, which turns exponential path growth into
# polynomial state growth.


class LengthClasses:
    """Partition of edges into classes of equal length."""

    def __init__(self, g: MetricGraph, separate: Iterable[int] = ()):
        sep = set(separate)
        lens: list[float] = []
        keys: dict[object, int] = {}
        self.of_edge: list[int] = []
        for e in g.edges:
            key = ("edge", e.id) if e.id in sep else e.length
            if key not in keys:
                keys[key] = len(lens)
                lens.append(e.length)
            self.of_edge.append(keys[key])
        self.lengths = tuple(lens)
        self.size = len(lens)

    def unit(self, eid: int) -> tuple[int, ...]:
        c = [0] * self.size
        c[self.of_edge[eid]] = 1
        return tuple(c)

    def length(self, counts: Sequence[int]) -> float:
        return math.fsum(k * l for k, l in zip(counts, self.lengths) if k)


def _transitions(g: MetricGraph) -> list[list[tuple[int, float]]]:
    """For each bond the nonzero (next bond, beta) pairs."""
    out = []
    for b in range(2 * g.n_edges):
        u = final(g, b)
        nxt = []
        for c in outgoing(g, u):
            x = beta(g, b, c)
            if x != 0.0:
                nxt.append((c, x))
        out.append(nxt)
    return out


@dataclass
class WalkTerm:
    counts: tuple[int, ...]
    alpha: float
    abs_alpha: float
    n: int


def _walk_split(g, trans, classes, first: int, L: float, budget: list[int], emit_at) -> dict:
    slack = 1e-12 * max(1.0, L)
    c0 = classes.unit(first >> 1)
    front: dict[tuple, list[float]] = {(first, c0): [1.0, 1.0]}
    acc: dict[tuple, list[float]] = {}
    clen = classes.lengths
    while front:
        for (b, c), (a, aa) in front.items():
            if emit_at(b):
                r = acc.setdefault(c, [0.0, 0.0])
                r[0] += a
                r[1] += aa
        nxt: dict[tuple, list[float]] = {}
        for (b, c), (a, aa) in front.items():
            base = classes.length(c)
            for nb, x in trans[b]:
                k = classes.of_edge[nb >> 1]
                if base + clen[k] > L + slack:
                    continue
                nc = c[:k] + (c[k] + 1,) + c[k + 1:]
                key = (nb, nc)
                r = nxt.get(key)
                if r is None:
                    nxt[key] = [a * x, aa * abs(x)]
                else:
                    r[0] += a * x
                    r[1] += aa * abs(x)
        budget[0] += len(nxt)
        if budget[0] > budget[1]:
            raise BudgetExceeded(f"path aggregation exceeded {budget[1]} states at cutoff {L!r}")
        front = nxt
    return acc


def _run_splits(fn, splits: Sequence, threads: int) -> list:
    if threads > 1 and len(splits) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, splits))
    return [fn(s) for s in splits]


def dirichlet_walk_sums(
    g: MetricGraph,
    L: float,
    classes: LengthClasses | None = None,
    max_states: int = 10_000_000,
    threads: int = 1,
) -> list[WalkTerm]:
    """Aggregate the Dirichlet-to-Dirichlet directed paths of length <= L.

    Returns one term per traversal-count vector, sorted by count vector, with
    the summed coefficient and the summed absolute coefficient.
    """
    classes = classes or LengthClasses(g)
    trans = _transitions(g)
    vd = set(g.dirichlet)
    firsts = [b for v in sorted(vd) for b in outgoing(g, v)]
    used: list[list[int]] = []

    def emit_at(b):
        return final(g, b) in vd

    def run(first):
        local = [0, max_states]
        res = _walk_split(g, trans, classes, first, L, local, emit_at)
        used.append(local)
        return res

    parts = _run_splits(run, firsts, threads)
    total = sum(x[0] for x in used)
    if total > max_states:
        raise BudgetExceeded(f"path aggregation exceeded {max_states} states at cutoff {L!r}")
    merged: dict[tuple, list[list[float]]] = {}
    for part in parts:
        for c, (a, aa) in part.items():
            m = merged.setdefault(c, [[], []])
            m[0].append(a)
            m[1].append(aa)
    out = []
    for c in sorted(merged):
        a, aa = merged[c]
        out.append(WalkTerm(c, math.fsum(a), math.fsum(aa), sum(c)))
    return out


@dataclass
class BridgeTerm:
    first: int
    last: int
    mid: tuple[int, ...]
    alpha: float
    abs_alpha: float
    n_mid: int


def bridge_sums(
    g: MetricGraph,
    first_bonds: Sequence[int],
    last_ok: Callable[[int], bool],
    L_mid: float,
    classes: LengthClasses | None = None,
    max_states: int = 10_000_000,
    threads: int = 1,
) -> list[BridgeTerm]:
    """Aggregate paths with at least two bonds by (first bond, last bond, middle counts).

    The middle part excludes the first and the last bond and is cut at
    metric length ``L_mid``.
    """
    classes = classes or LengthClasses(g)
    trans = _transitions(g)
    zero = tuple([0] * classes.size)
    slack = 1e-12 * max(1.0, L_mid)
    used = []

    def run(first):
        # state: (last bond, counts of bonds after the first one)
        front: dict[tuple, list[float]] = {(first, zero): [1.0, 1.0]}
        acc: dict[tuple, list[float]] = {}
        states = 0
        while front:
            nxt: dict[tuple, list[float]] = {}
            for (b, c), (a, aa) in front.items():
                if classes.length(c) > L_mid + slack:
                    continue
                for nb, x in trans[b]:
                    k = classes.of_edge[nb >> 1]
                    nc = c[:k] + (c[k] + 1,) + c[k + 1:]
                    key = (nb, nc)
                    r = nxt.get(key)
                    if r is None:
                        nxt[key] = [a * x, aa * abs(x)]
                    else:
                        r[0] += a * x
                        r[1] += aa * abs(x)
                    if last_ok(nb):
                        r2 = acc.setdefault((nb, c), [0.0, 0.0])
                        r2[0] += a * x
                        r2[1] += aa * abs(x)
            states += len(nxt)
            if states > max_states:
                raise BudgetExceeded(f"path aggregation exceeded {max_states} states at cutoff {L_mid!r}")
            front = nxt
        used.append(states)
        return acc

    parts = _run_splits(run, list(first_bonds), threads)
    if sum(used) > max_states:
        raise BudgetExceeded(f"path aggregation exceeded {max_states} states at cutoff {L_mid!r}")
    out = []
    for first, part in zip(first_bonds, parts):
        for (last, mid) in sorted(part):
            a, aa = part[(last, mid)]
            out.append(BridgeTerm(first, last, mid, a, aa, sum(mid)))
    return out
