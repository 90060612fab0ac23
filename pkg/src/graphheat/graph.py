"""Compact metric graphs with Dirichlet vertices, plus validation and surgery."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra


class InvalidGraph(ValueError):
    """Raised when a graph, point or region violates the standing assumptions."""


class VertexKind(str, Enum):
    DIRICHLET = "dirichlet"
    STANDARD = "standard"


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    length: float

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class GraphPoint:
    edge: int
    offset: float


@dataclass(frozen=True)
class RegionSpec:
    """Union of closed sub-intervals ``(edge, a, b)`` of edges."""

    intervals: tuple[tuple[int, float, float], ...]

    @classmethod
    def parse(cls, text: str) -> "RegionSpec":
        items = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            if len(parts) != 3:
                raise InvalidGraph(f"region entry {chunk!r} is not of the form edge:a:b")
            try:
                items.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise InvalidGraph(f"region entry {chunk!r}: {exc}") from None
        if not items:
            raise InvalidGraph("empty region")
        return cls(tuple(items))


@dataclass(frozen=True)
class Issue:
    message: str
    vertex: int | None = None
    edge: int | None = None


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def messages(self) -> list[str]:
        return [i.message for i in self.issues]

    def __bool__(self) -> bool:
        return self.ok


class MetricGraph:
    """Immutable finite metric graph.

    Vertices are ``0..n-1`` with a kind each; edges are stored with their
    id equal to their list position and oriented from ``u`` (offset 0) to
    ``v`` (offset ``length``).
    """

    __slots__ = ("_kinds", "_edges", "_incident", "_degree")

    def __init__(self, kinds: Sequence[VertexKind | str], edges: Iterable[Edge | tuple]):
        self._kinds = tuple(VertexKind(k) for k in kinds)
        es = []
        for i, e in enumerate(edges):
            if isinstance(e, Edge):
                u, v, length = e.u, e.v, e.length
            else:
                u, v, length = e
            es.append(Edge(i, int(u), int(v), float(length)))
        self._edges = tuple(es)
        n = len(self._kinds)
        inc: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in self._edges:
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise InvalidGraph(f"edge {e.id} references an unknown vertex")
            # (edge id, end) with end 0 at u and 1 at v
            inc[e.u].append((e.id, 0))
            inc[e.v].append((e.id, 1))
        self._incident = tuple(tuple(x) for x in inc)
        self._degree = tuple(len(x) for x in inc)

    # basic accessors
    @property
    def kinds(self) -> tuple[VertexKind, ...]:
        return self._kinds

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def n_vertices(self) -> int:
        return len(self._kinds)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def edge(self, e: int) -> Edge:
        if not 0 <= e < len(self._edges):
            raise InvalidGraph(f"unknown edge {e}")
        return self._edges[e]

    def kind(self, v: int) -> VertexKind:
        self._check_vertex(v)
        return self._kinds[v]

    def is_dirichlet(self, v: int) -> bool:
        return self._kinds[v] is VertexKind.DIRICHLET

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self._degree[v]

    def incident(self, v: int) -> tuple[tuple[int, int], ...]:
        return self._incident[v]

    @property
    def dirichlet(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self._kinds) if k is VertexKind.DIRICHLET)

    @property
    def standard(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self._kinds) if k is VertexKind.STANDARD)

    @property
    def volume(self) -> float:
        return math.fsum(e.length for e in self._edges)

    @property
    def l_min(self) -> float:
        return min(e.length for e in self._edges)

    @property
    def l_max(self) -> float:
        return max(e.length for e in self._edges)

    @property
    def d_max(self) -> int:
        return max(self._degree)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < len(self._kinds):
            raise InvalidGraph(f"unknown vertex {v}")

    def with_edges(self, edges: Sequence[tuple]) -> "MetricGraph":
        return MetricGraph(self._kinds, edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MetricGraph)
            and self._kinds == other._kinds
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self._kinds, self._edges))

    def __repr__(self) -> str:
        vd = len(self.dirichlet)
        return f"MetricGraph(V={self.n_vertices}, E={self.n_edges}, #V_D={vd}, |G|={self.volume!r})"


def _standard_components(g: MetricGraph) -> list[tuple[set[int], set[int]]]:
    """Components of G minus V_D as (standard vertices, edges)."""
    parent = list(range(g.n_vertices + g.n_edges))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    nv = g.n_vertices
    for e in g.edges:
        for w in (e.u, e.v):
            if not g.is_dirichlet(w):
                union(nv + e.id, w)
    groups: dict[int, tuple[set[int], set[int]]] = {}
    for v in g.standard:
        groups.setdefault(find(v), (set(), set()))[0].add(v)
    for e in g.edges:
        groups.setdefault(find(nv + e.id), (set(), set()))[1].add(e.id)
    return [groups[k] for k in sorted(groups)]


def validate(g: MetricGraph, require_dirichlet: bool = True) -> ValidationReport:
    """Report every violated standing assumption (empty list when valid)."""
    rep = ValidationReport()
    for e in g.edges:
        if not (math.isfinite(e.length) and e.length > 0):
            rep.issues.append(Issue(f"edge {e.id} has nonpositive or non-finite length {e.length!r}", edge=e.id))
    if g.n_edges == 0:
        rep.issues.append(Issue("graph has no edges (zero volume)"))
    if require_dirichlet and not g.dirichlet:
        rep.issues.append(Issue("no Dirichlet vertex (V_D is empty)"))
    for v in range(g.n_vertices):
        d = g.degree(v)
        if g.is_dirichlet(v) and d != 1:
            rep.issues.append(Issue(f"Dirichlet vertex {v} has degree {d}, expected 1", vertex=v))
        if not g.is_dirichlet(v) and d == 0:
            rep.issues.append(Issue(f"standard vertex {v} is isolated", vertex=v))
    if g.n_edges and len(_standard_components(g)) > 1:
        rep.issues.append(Issue("G minus the Dirichlet vertices is disconnected"))
    return rep


def require_valid(g: MetricGraph, require_dirichlet: bool = True) -> MetricGraph:
    rep = validate(g, require_dirichlet)
    if not rep.ok:
        raise InvalidGraph("; ".join(rep.messages()))
    return g


def degree(g: MetricGraph, v: int) -> int:
    return g.degree(v)


def _edge_tuples(g: MetricGraph) -> list[tuple[int, int, float]]:
    return [(e.u, e.v, e.length) for e in g.edges]


def subdivide(g: MetricGraph, edge: int, offset: float) -> MetricGraph:
    """Insert a standard degree-2 vertex at ``offset`` along ``edge``."""
    e = g.edge(edge)
    if not 0 < offset < e.length:
        raise InvalidGraph(f"subdivision offset {offset!r} not strictly inside edge {edge}")
    w = g.n_vertices
    edges = _edge_tuples(g)
    edges[edge] = (e.u, w, offset)
    edges.append((w, e.v, e.length - offset))
    return MetricGraph(list(g.kinds) + [VertexKind.STANDARD], edges)


def _reindex(kinds: Sequence[VertexKind], edges: list[tuple], keep: Sequence[int]) -> MetricGraph:
    new_id = {v: i for i, v in enumerate(keep)}
    return MetricGraph([kinds[v] for v in keep], [(new_id[u], new_id[v], l) for u, v, l in edges])


def suppress_degree_two(g: MetricGraph) -> MetricGraph:
    """Merge the two edges at every standard vertex of degree 2 (loops excepted)."""
    kinds = list(g.kinds)
    edges: list[tuple | None] = list(_edge_tuples(g))
    alive = set(range(g.n_vertices))
    changed = True
    while changed:
        changed = False
        inc: dict[int, list[tuple[int, int]]] = {v: [] for v in alive}
        for i, ed in enumerate(edges):
            if ed is None:
                continue
            inc[ed[0]].append((i, 0))
            inc[ed[1]].append((i, 1))
        for w in sorted(alive):
            if kinds[w] is not VertexKind.STANDARD or len(inc[w]) != 2:
                continue
            (a, ea), (b, eb) = inc[w]
            if a == b:
                continue
            ua = edges[a]
            ub = edges[b]
            x = ua[1 - ea]
            y = ub[1 - eb]
            edges[a] = (x, y, ua[2] + ub[2])
            edges[b] = None
            alive.discard(w)
            changed = True
            break
    keep = sorted(alive)
    return _reindex(kinds, [e for e in edges if e is not None], keep)


def midpoint_loop_cut(g: MetricGraph, loop_edge: int) -> MetricGraph:
    """Replace a loop by two pendant edges of half its length."""
    e = g.edge(loop_edge)
    if not e.is_loop:
        raise InvalidGraph(f"edge {loop_edge} is not a loop")
    a, b = g.n_vertices, g.n_vertices + 1
    edges = _edge_tuples(g)
    edges[loop_edge] = (e.u, a, e.length / 2)
    edges.append((e.u, b, e.length / 2))
    return MetricGraph(list(g.kinds) + [VertexKind.STANDARD] * 2, edges)


def mirror(g: MetricGraph, reflection_set: Iterable[int], m: int) -> MetricGraph:
    """Glue ``m`` copies of ``g`` along the vertices of ``reflection_set``."""
    S = set(reflection_set)
    if m < 1:
        raise InvalidGraph("mirror multiplicity must be >= 1")
    for v in S:
        g._check_vertex(v)
        if g.is_dirichlet(v):
            raise InvalidGraph(f"cannot mirror at Dirichlet vertex {v}")
    kinds = list(g.kinds)
    copies = [list(range(g.n_vertices))]
    for _ in range(1, m):
        cmap = []
        for v in range(g.n_vertices):
            if v in S:
                cmap.append(v)
            else:
                cmap.append(len(kinds))
                kinds.append(g.kinds[v])
        copies.append(cmap)
    edges = [(c[e.u], c[e.v], e.length) for c in copies for e in g.edges]
    return MetricGraph(kinds, edges)


def attach_pendant(g: MetricGraph, at: int, pendant: MetricGraph, pendant_root: int) -> MetricGraph:
    """Glue ``pendant_root`` of a Dirichlet-free pendant onto standard vertex ``at``."""
    g._check_vertex(at)
    pendant._check_vertex(pendant_root)
    if g.is_dirichlet(at):
        raise InvalidGraph(f"cannot attach at Dirichlet vertex {at}")
    if pendant.dirichlet:
        raise InvalidGraph("pendant graphs must not carry Dirichlet vertices")
    kinds = list(g.kinds)
    pmap = []
    for v in range(pendant.n_vertices):
        if v == pendant_root:
            pmap.append(at)
        else:
            pmap.append(len(kinds))
            kinds.append(pendant.kinds[v])
    edges = _edge_tuples(g) + [(pmap[e.u], pmap[e.v], e.length) for e in pendant.edges]
    return MetricGraph(kinds, edges)


def components(g: MetricGraph) -> list[MetricGraph]:
    """Split along the components of G minus V_D, duplicating shared Dirichlet points."""
    comps = _standard_components(g)
    if len(comps) <= 1:
        return [g]
    out = []
    for _, eids in comps:
        kinds: list[VertexKind] = []
        vmap: dict[int, int] = {}
        edges = []
        for eid in sorted(eids):
            e = g.edge(eid)
            ends = []
            for w in (e.u, e.v):
                if g.is_dirichlet(w) or w not in vmap:
                    vmap[w] = len(kinds)
                    kinds.append(g.kinds[w])
                ends.append(vmap[w])
            edges.append((ends[0], ends[1], e.length))
        out.append(MetricGraph(kinds, edges))
    return out


def add_dirichlet(g: MetricGraph, v: int) -> MetricGraph | list[MetricGraph]:
    """Turn the standard degree-1 vertex ``v`` into a Dirichlet vertex.

    Returns a list of component graphs when G minus V_D falls apart.
    """
    if g.is_dirichlet(v):
        raise InvalidGraph(f"vertex {v} is already Dirichlet")
    if g.degree(v) != 1:
        raise InvalidGraph(f"vertex {v} has degree {g.degree(v)}; cut at an edge point instead")
    kinds = list(g.kinds)
    kinds[v] = VertexKind.DIRICHLET
    h = MetricGraph(kinds, _edge_tuples(g))
    parts = components(h)
    return parts[0] if len(parts) == 1 else parts


def dirichlet_cut(g: MetricGraph, edge: int, offset: float) -> MetricGraph | list[MetricGraph]:
    """Cut ``edge`` at an interior point into two Dirichlet ends."""
    e = g.edge(edge)
    if not 0 < offset < e.length:
        raise InvalidGraph(f"cut offset {offset!r} not strictly inside edge {edge}")
    a, b = g.n_vertices, g.n_vertices + 1
    edges = _edge_tuples(g)
    edges[edge] = (e.u, a, offset)
    edges.append((b, e.v, e.length - offset))
    h = MetricGraph(list(g.kinds) + [VertexKind.DIRICHLET] * 2, edges)
    parts = components(h)
    return parts[0] if len(parts) == 1 else parts


def lengthen_edge(g: MetricGraph, edge: int, s: float) -> MetricGraph:
    e = g.edge(edge)
    if not e.length + s > 0:
        raise InvalidGraph("lengthening would make the edge length nonpositive")
    edges = _edge_tuples(g)
    edges[edge] = (e.u, e.v, e.length + s)
    return MetricGraph(g.kinds, edges)


def scale(g: MetricGraph, s: float) -> MetricGraph:
    if not s > 0:
        raise InvalidGraph("scale factor must be positive")
    return MetricGraph(g.kinds, [(e.u, e.v, e.length * s) for e in g.edges])


def _check_point(g: MetricGraph, p: GraphPoint) -> None:
    e = g.edge(p.edge)
    if not 0 <= p.offset <= e.length:
        raise InvalidGraph(f"offset {p.offset!r} outside edge {p.edge} of length {e.length!r}")


def vertex_distances(g: MetricGraph) -> np.ndarray:
    rows, cols, vals = [], [], []
    for e in g.edges:
        if not e.is_loop:
            rows += [e.u, e.v]
            cols += [e.v, e.u]
            vals += [e.length, e.length]
    n = g.n_vertices
    if not rows:
        D = np.full((n, n), np.inf)
        np.fill_diagonal(D, 0.0)
        return D
    # duplicates would be summed by the sparse constructor, so keep the minimum
    best: dict[tuple[int, int], float] = {}
    for r, c, w in zip(rows, cols, vals):
        best[(r, c)] = min(w, best.get((r, c), math.inf))
    keys = list(best)
    A = coo_matrix(([best[k] for k in keys], ([k[0] for k in keys], [k[1] for k in keys])), shape=(n, n))
    return dijkstra(A.tocsr(), directed=False)


def shortest_distance(g: MetricGraph, x: GraphPoint, y: GraphPoint) -> float:
    """Geodesic distance between two edge points."""
    _check_point(g, x)
    _check_point(g, y)
    D = vertex_distances(g)
    ex, ey = g.edge(x.edge), g.edge(y.edge)
    best = math.inf
    if x.edge == y.edge:
        best = abs(x.offset - y.offset)
    for u, du in ((ex.u, x.offset), (ex.v, ex.length - x.offset)):
        for w, dw in ((ey.u, y.offset), (ey.v, ey.length - y.offset)):
            best = min(best, du + D[u, w] + dw)
    return float(best)


def _to_nx(g: MetricGraph) -> nx.MultiGraph:
    G = nx.MultiGraph()
    for v, k in enumerate(g.kinds):
        G.add_node(v, kind=k.value)
    for e in g.edges:
        G.add_edge(e.u, e.v, length=e.length)
    return G


def is_isomorphic(a: MetricGraph, b: MetricGraph, rel_tol: float = 1e-9) -> bool:
    """Isomorphism of metric graphs after suppressing degree-2 vertices."""
    A, B = _to_nx(suppress_degree_two(a)), _to_nx(suppress_degree_two(b))
    if sorted(d for _, d in A.degree()) != sorted(d for _, d in B.degree()):
        return False

    def edge_match(d1, d2):
        l1 = sorted(x["length"] for x in d1.values())
        l2 = sorted(x["length"] for x in d2.values())
        return len(l1) == len(l2) and all(math.isclose(p, q, rel_tol=rel_tol) for p, q in zip(l1, l2))

    return nx.is_isomorphic(A, B, node_match=lambda p, q: p["kind"] == q["kind"], edge_match=edge_match)


def subdivide_region(g: MetricGraph, region: RegionSpec) -> tuple[MetricGraph, frozenset[int], tuple[int, ...]]:
    """Subdivide ``g`` at the boundary of ``region``.

    Returns the subdivided graph, the ids of edges inside the region and the
    boundary vertices.
    """
    per_edge: dict[int, list[tuple[float, float]]] = {}
    for eid, a, b in region.intervals:
        e = g.edge(eid)
        if not (0 <= a < b <= e.length):
            raise InvalidGraph(f"region interval {eid}:{a}:{b} is not a positive sub-interval of [0, {e.length!r}]")
        per_edge.setdefault(eid, []).append((a, b))
    merged: dict[int, list[tuple[float, float]]] = {}
    for eid, ivs in per_edge.items():
        ivs.sort()
        out: list[list[float]] = []
        for a, b in ivs:
            if out and a < out[-1][1]:
                raise InvalidGraph(f"region intervals on edge {eid} overlap")
            if out and a == out[-1][1]:
                out[-1][1] = b
            else:
                out.append([a, b])
        merged[eid] = [(a, b) for a, b in out]

    kinds = list(g.kinds)
    edges: list[tuple[int, int, float]] = []
    inside: set[int] = set()
    for e in g.edges:
        ivs = merged.get(e.id, [])
        cuts = sorted({p for a, b in ivs for p in (a, b) if 0 < p < e.length})
        pts = [0.0] + cuts + [e.length]
        verts = [e.u]
        for _ in cuts:
            verts.append(len(kinds))
            kinds.append(VertexKind.STANDARD)
        verts.append(e.v)
        for k in range(len(pts) - 1):
            lo, hi = pts[k], pts[k + 1]
            mid = 0.5 * (lo + hi)
            if any(a <= mid <= b for a, b in ivs):
                inside.add(len(edges))
            edges.append((verts[k], verts[k + 1], hi - lo))
    h = MetricGraph(kinds, edges)
    if not inside:
        raise InvalidGraph("empty region")
    if len(inside) == h.n_edges:
        raise InvalidGraph("region covers the whole graph")
    boundary = []
    for v in range(h.n_vertices):
        flags = {eid in inside for eid, _ in h.incident(v)}
        if True in flags and h.is_dirichlet(v):
            raise InvalidGraph(f"region touches Dirichlet vertex {v}")
        if flags == {True, False}:
            if h.degree(v) != 2:
                raise InvalidGraph(f"region boundary at vertex {v} of degree {h.degree(v)}")
            boundary.append(v)
    # connectivity of the closed region
    parent = {eid: eid for eid in inside}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for v in range(h.n_vertices):
        ins = [eid for eid, _ in h.incident(v) if eid in inside]
        for a in ins[1:]:
            ra, rb = find(a), find(ins[0])
            if ra != rb:
                parent[ra] = rb
    if len({find(eid) for eid in inside}) > 1:
        raise InvalidGraph("region is not connected")
    return h, frozenset(inside), tuple(boundary)


# ---------------------------------------------------------------------------
# file format


class GraphFormatError(InvalidGraph):
    pass


def _item_lines(text: str, key: str) -> list[int]:
    """Line numbers of the elements of the top-level array ``key``."""
    dec = json.JSONDecoder()
    idx = text.find(f'"{key}"')
    if idx < 0:
        return []
    idx = text.find("[", idx)
    if idx < 0:
        return []
    idx += 1
    lines = []
    n = len(text)
    while idx < n:
        while idx < n and text[idx] in " \t\r\n,":
            idx += 1
        if idx >= n or text[idx] == "]":
            break
        lines.append(text.count("\n", 0, idx) + 1)
        try:
            _, idx = dec.raw_decode(text, idx)
        except json.JSONDecodeError:
            break
    return lines


def loads_graph(text: str, require_dirichlet: bool = True) -> MetricGraph:
    """Parse the JSON graph format; errors carry ``line N:`` prefixes."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise GraphFormatError("line 1: document must be an object with 'vertices' and 'edges'")
    vlines = _item_lines(text, "vertices")
    elines = _item_lines(text, "edges")

    def vline(i):
        return vlines[i] if i < len(vlines) else 1

    def eline(i):
        return elines[i] if i < len(elines) else 1

    errors = []
    verts = doc["vertices"]
    edges = doc["edges"]
    if not isinstance(verts, list) or not isinstance(edges, list):
        raise GraphFormatError("line 1: 'vertices' and 'edges' must be lists")
    kinds: dict[int, VertexKind] = {}
    vpos: dict[int, int] = {}
    for i, item in enumerate(verts):
        try:
            vid = item["id"]
            if not isinstance(vid, int) or isinstance(vid, bool) or vid < 0:
                raise ValueError(f"vertex id {vid!r} is not a non-negative integer")
            if vid in kinds:
                raise ValueError(f"duplicate vertex id {vid}")
            kinds[vid] = VertexKind(str(item["kind"]).lower())
            vpos[vid] = i
        except (KeyError, TypeError) as exc:
            errors.append(f"line {vline(i)}: malformed vertex entry ({exc})")
        except ValueError as exc:
            errors.append(f"line {vline(i)}: {exc}")
    if kinds and sorted(kinds) != list(range(len(kinds))):
        errors.append(f"line {vline(0)}: vertex ids must be 0..{len(kinds) - 1}")
    etuples: dict[int, tuple[int, int, float]] = {}
    epos: dict[int, int] = {}
    for i, item in enumerate(edges):
        try:
            eid = item["id"]
            if not isinstance(eid, int) or isinstance(eid, bool) or eid < 0:
                raise ValueError(f"edge id {eid!r} is not a non-negative integer")
            if eid in etuples:
                raise ValueError(f"duplicate edge id {eid}")
            u, v, length = item["u"], item["v"], item["length"]
            if u not in kinds or v not in kinds:
                raise ValueError(f"edge {eid} references an unknown vertex")
            length = float(length)
            if not (math.isfinite(length) and length > 0):
                raise ValueError(f"edge {eid} has nonpositive or non-finite length {length!r}")
            etuples[eid] = (u, v, length)
            epos[eid] = i
        except (KeyError, TypeError) as exc:
            errors.append(f"line {eline(i)}: malformed edge entry ({exc})")
        except ValueError as exc:
            errors.append(f"line {eline(i)}: {exc}")
    if etuples and sorted(etuples) != list(range(len(etuples))):
        errors.append(f"line {eline(0)}: edge ids must be 0..{len(etuples) - 1}")
    if errors:
        raise GraphFormatError("\n".join(errors))
    g = MetricGraph([kinds[i] for i in range(len(kinds))], [etuples[i] for i in range(len(etuples))])
    rep = validate(g, require_dirichlet)
    if not rep.ok:
        msgs = []
        for iss in rep.issues:
            if iss.vertex is not None:
                line = vline(vpos[iss.vertex])
            elif iss.edge is not None:
                line = eline(epos[iss.edge])
            else:
                line = 1
            msgs.append(f"line {line}: {iss.message}")
        raise GraphFormatError("\n".join(msgs))
    return g


def load_graph(path: str | Path, require_dirichlet: bool = True) -> MetricGraph:
    return loads_graph(Path(path).read_text(encoding="utf-8"), require_dirichlet)


def dumps_graph(g: MetricGraph) -> str:
    lines = ["{", '  "vertices": [']
    vs = [f'    {{"id": {i}, "kind": "{k.value}"}}' for i, k in enumerate(g.kinds)]
    lines.append(",\n".join(vs))
    lines.append("  ],")
    lines.append('  "edges": [')
    es = [f'    {{"id": {e.id}, "u": {e.u}, "v": {e.v}, "length": {e.length!r}}}' for e in g.edges]
    lines.append(",\n".join(es))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_graph(g: MetricGraph, path: str | Path) -> None:
    Path(path).write_text(dumps_graph(g), encoding="utf-8")


# ---------------------------------------------------------------------------
# reference graphs


def interval(length: float, dirichlet_ends: int = 1) -> MetricGraph:
    """[0, length] with Dirichlet at 0 (and at ``length`` when ``dirichlet_ends == 2``)."""
    if dirichlet_ends not in (0, 1, 2):
        raise ValueError("dirichlet_ends must be 0, 1 or 2")
    k0 = VertexKind.DIRICHLET if dirichlet_ends >= 1 else VertexKind.STANDARD
    k1 = VertexKind.DIRICHLET if dirichlet_ends == 2 else VertexKind.STANDARD
    return MetricGraph([k0, k1], [(0, 1, length)])


def star(lengths: Sequence[float], dirichlet_leaves: Iterable[int] = ()) -> MetricGraph:
    """Star with standard center 0 and leaf ``i+1`` at the end of arm ``i``."""
    dl = set(dirichlet_leaves)
    kinds = [VertexKind.STANDARD] + [VertexKind.DIRICHLET if i in dl else VertexKind.STANDARD for i in range(len(lengths))]
    return MetricGraph(kinds, [(0, i + 1, l) for i, l in enumerate(lengths)])


def lasso(pendant: float = 1.0, loop: float = 2.0) -> MetricGraph:
    """Dirichlet pendant edge 0 -> 1 with a loop at vertex 1."""
    return MetricGraph([VertexKind.DIRICHLET, VertexKind.STANDARD], [(0, 1, pendant), (1, 1, loop)])


def figure_eight(pendant: float = 1.0, loops: Sequence[float] = (1.5, 2.0)) -> MetricGraph:
    return MetricGraph(
        [VertexKind.DIRICHLET, VertexKind.STANDARD],
        [(0, 1, pendant)] + [(1, 1, l) for l in loops],
    )


def pumpkin_chain(lengths: Sequence[float], m: int, dirichlet_ends: int = 1) -> MetricGraph:
    """``m`` copies of the path with the given segment lengths glued at interior cross-sections.

    With one Dirichlet end the far end is glued too.
    """
    n = len(lengths)
    kinds = [VertexKind.DIRICHLET] + [VertexKind.STANDARD] * (n - 1)
    kinds.append(VertexKind.DIRICHLET if dirichlet_ends == 2 else VertexKind.STANDARD)
    path = MetricGraph(kinds, [(i, i + 1, l) for i, l in enumerate(lengths)])
    refl = set(range(1, n)) | ({n} if dirichlet_ends == 1 else set())
    return mirror(path, refl, m)
