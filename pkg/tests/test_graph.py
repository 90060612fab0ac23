from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphheat import (
    GraphPoint,
    InvalidGraph,
    MetricGraph,
    RegionSpec,
    add_dirichlet,
    attach_pendant,
    degree,
    dirichlet_cut,
    dumps_graph,
    figure_eight,
    interval,
    is_isomorphic,
    lasso,
    lengthen_edge,
    loads_graph,
    midpoint_loop_cut,
    mirror,
    pumpkin_chain,
    scale,
    shortest_distance,
    star,
    subdivide,
    suppress_degree_two,
    validate,
)
from graphheat.graph import GraphFormatError, subdivide_region


def test_degree_counts_loops_twice():
    g = lasso(1, 2)
    assert degree(g, 1) == 3
    assert degree(g, 0) == 1
    only_loop = MetricGraph(["standard"], [(0, 0, 1.0)])
    assert degree(only_loop, 0) == 2


def test_star_degree_and_basics():
    g = star([1, 2, 3], [0])
    assert degree(g, 0) == 3
    assert g.volume == 6
    assert g.l_min == 1 and g.l_max == 3 and g.d_max == 3
    assert g.dirichlet == (1,)


def test_unknown_vertex_rejected():
    with pytest.raises(InvalidGraph):
        degree(interval(1), 5)


def test_validate_reports_every_issue():
    g = MetricGraph(["dirichlet", "dirichlet", "standard"], [(0, 2, 1.0), (1, 2, -1.0), (0, 2, 1.0)])
    msgs = validate(g).messages()
    assert any("Dirichlet vertex 0 has degree 2" in m for m in msgs)
    assert any("edge 1" in m for m in msgs)


def test_validate_requires_dirichlet_by_default():
    g = interval(1.0, 0)
    assert not validate(g).ok
    assert validate(g, require_dirichlet=False).ok


def test_validate_detects_disconnected_standard_part():
    g = MetricGraph(["standard", "standard", "standard", "standard", "dirichlet"], [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
    assert any("disconnected" in m for m in validate(g).messages())


def test_roundtrip_file_format():
    g = figure_eight(1, (1.5, 2))
    assert loads_graph(dumps_graph(g)) == g


def test_parser_error_is_line_anchored():
    text = """{
  "vertices": [
    {"id": 0, "kind": "dirichlet"},
    {"id": 1, "kind": "standard"}
  ],
  "edges": [
    {"id": 0, "u": 0, "v": 1, "length": 1.0},
    {"id": 1, "u": 1, "v": 1, "length": -2.0}
  ]
}
"""
    with pytest.raises(GraphFormatError, match=r"^line 8: edge 1 has nonpositive"):
        loads_graph(text)


def test_parser_validation_error_points_at_vertex_line():
    text = """{
  "vertices": [
    {"id": 0, "kind": "standard"},
    {"id": 1, "kind": "dirichlet"},
    {"id": 2, "kind": "standard"}
  ],
  "edges": [
    {"id": 0, "u": 0, "v": 1, "length": 1.0},
    {"id": 1, "u": 1, "v": 2, "length": 1.0}
  ]
}
"""
    with pytest.raises(GraphFormatError, match=r"line 4: Dirichlet vertex 1 has degree 2"):
        loads_graph(text)


def test_parser_syntax_error_reports_line():
    with pytest.raises(GraphFormatError, match=r"^line 3:"):
        loads_graph('{\n"vertices": [],\n"edges": [,]\n}')


def test_parser_rejects_unknown_kind_and_sparse_ids():
    bad_kind = '{"vertices": [{"id": 0, "kind": "robin"}], "edges": []}'
    with pytest.raises(GraphFormatError):
        loads_graph(bad_kind)
    sparse = '{"vertices": [{"id": 0, "kind": "dirichlet"}, {"id": 2, "kind": "standard"}], "edges": []}'
    with pytest.raises(GraphFormatError, match="vertex ids"):
        loads_graph(sparse)


def test_subdivide_preserves_volume_and_adds_degree_two_vertex():
    g = star([1, 2, 3], [0])
    h = subdivide(g, 2, 0.4)
    assert h.n_vertices == g.n_vertices + 1
    assert h.volume == pytest.approx(g.volume, abs=1e-15)
    assert degree(h, h.n_vertices - 1) == 2
    assert is_isomorphic(g, h)
    with pytest.raises(InvalidGraph):
        subdivide(g, 2, 3.0)


def test_suppress_degree_two_inverts_subdivide():
    g = lasso(1, 2)
    h = subdivide(subdivide(g, 0, 0.3), 1, 0.5)
    assert suppress_degree_two(h).n_edges == g.n_edges
    assert is_isomorphic(h, g)


def test_midpoint_loop_cut_structure():
    g = lasso(1, 2)
    c = midpoint_loop_cut(g, 1)
    assert c.n_edges == 3 and c.volume == g.volume
    assert is_isomorphic(c, star([1, 1, 1], [0]))
    with pytest.raises(InvalidGraph):
        midpoint_loop_cut(g, 0)


def test_mirror_structure():
    g = star([1, 1, 1], [0])
    m3 = mirror(g, {0}, 3)
    assert m3.n_edges == 9
    assert degree(m3, 0) == 9
    assert len(m3.dirichlet) == 3
    assert m3.volume == 3 * g.volume
    with pytest.raises(InvalidGraph):
        mirror(g, {1}, 2)


def test_attach_pendant_and_dirichlet_surgeries():
    g = star([1, 1, 1], [0])
    a = attach_pendant(g, 2, interval(0.5, 0), 0)
    assert a.volume == g.volume + 0.5 and degree(a, 2) == 2
    with pytest.raises(InvalidGraph):
        attach_pendant(g, 1, interval(0.5, 0), 0)
    with pytest.raises(InvalidGraph):
        attach_pendant(g, 2, interval(0.5, 1), 1)
    d = add_dirichlet(g, 2)
    assert d.dirichlet == (1, 2)
    with pytest.raises(InvalidGraph):
        add_dirichlet(g, 0)


def test_add_dirichlet_splitting_returns_components():
    g = MetricGraph(["dirichlet", "standard", "standard"], [(0, 1, 1.0), (1, 2, 1.0)])
    assert isinstance(add_dirichlet(g, 2), MetricGraph)
    # the outer half of the cut arm becomes its own component
    parts = dirichlet_cut(star([1, 1, 1], [0, 1]), 2, 0.5)
    assert sorted(p.volume for p in parts) == [0.5, 2.5]
    assert isinstance(dirichlet_cut(lasso(1, 2), 1, 0.5), MetricGraph)
    split = dirichlet_cut(interval(2.0, 1), 0, 1.0)
    assert isinstance(split, list) and len(split) == 2
    assert sum(p.volume for p in split) == 2.0


def test_lengthen_and_scale():
    g = lasso(1, 2)
    assert lengthen_edge(g, 1, 0.5).edge(1).length == 2.5
    with pytest.raises(InvalidGraph):
        lengthen_edge(g, 0, -1.0)
    assert scale(g, 2).volume == 6
    with pytest.raises(InvalidGraph):
        scale(g, 0)


def test_pumpkin_chain_structure():
    g = pumpkin_chain([1.0, 0.5], 3, dirichlet_ends=1)
    assert len(g.dirichlet) == 3
    assert g.n_edges == 6
    assert g.volume == pytest.approx(4.5)


def test_shortest_distance_on_lasso():
    g = lasso(1, 2)
    # across the loop the geodesic takes the shorter arc
    assert shortest_distance(g, GraphPoint(1, 0.5), GraphPoint(1, 1.7)) == pytest.approx(0.8)
    assert shortest_distance(g, GraphPoint(1, 0.2), GraphPoint(1, 1.9)) == pytest.approx(0.3)
    assert shortest_distance(g, GraphPoint(0, 0.25), GraphPoint(1, 1.5)) == pytest.approx(0.75 + 0.5)


points = st.tuples(st.integers(0, 2), st.floats(0, 1))


@given(points, points, points)
@settings(max_examples=150, deadline=None)
def test_distance_is_a_metric(p, q, r):
    g = star([1.0, 1.0, 1.0], [0])
    x, y, z = (GraphPoint(e, o) for e, o in (p, q, r))
    dxy = shortest_distance(g, x, y)
    assert dxy == pytest.approx(shortest_distance(g, y, x), abs=1e-14)
    assert dxy >= 0
    assert dxy <= shortest_distance(g, x, z) + shortest_distance(g, z, y) + 1e-12


def test_isomorphism_distinguishes_lengths_and_kinds():
    assert not is_isomorphic(star([1, 2, 3], [0]), star([1, 2, 3], [1]))
    assert is_isomorphic(star([1, 2, 3], [0]), star([3, 1, 2], [1]))
    assert not is_isomorphic(lasso(1, 2), lasso(1, 2.5))


def test_region_subdivision():
    g = star([3, 1, 1], [1])
    h, inside, boundary = subdivide_region(g, RegionSpec.parse("0:1:2"))
    assert len(inside) == 1 and len(boundary) == 2
    assert math.isclose(h.volume, g.volume)
    with pytest.raises(InvalidGraph, match="degree 3"):
        subdivide_region(g, RegionSpec.parse("0:0:2"))
    with pytest.raises(InvalidGraph, match="Dirichlet"):
        subdivide_region(g, RegionSpec.parse("1:0.5:1"))
    with pytest.raises(InvalidGraph, match="overlap"):
        subdivide_region(g, RegionSpec.parse("0:1:2,0:1.5:2.5"))
    with pytest.raises(InvalidGraph, match="not connected"):
        subdivide_region(g, RegionSpec.parse("0:0.5:1,0:2:2.5"))
    with pytest.raises(InvalidGraph):
        RegionSpec.parse("0:1")
