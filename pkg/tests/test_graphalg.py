"""Labeled graph constructors, expression parsing, and isomorphism checks."""

from __future__ import annotations

import pytest

from quadforge import graphalg
from quadforge.emap import Graph
from quadforge.errors import StructuralError


def degrees(g: Graph) -> list:
    return sorted(g.degree(v) for v in g.vertices)


def test_complete_and_bipartite_counts():
    assert len(graphalg.complete(6).edges) == 15
    k = graphalg.complete_bipartite(6, 3)
    assert len(k.vertices) == 9
    assert len(k.edges) == 18
    assert degrees(k) == [3, 3, 3, 3, 3, 3, 6, 6, 6]


def test_join_and_complement():
    j = graphalg.join(graphalg.empty_graph(2), graphalg.empty_graph(3))
    assert len(j.edges) == 6
    c = graphalg.complement(graphalg.complete(4))
    assert len(c.edges) == 0
    assert len(c.vertices) == 4


def test_delete_edges_and_vertex():
    g = graphalg.delete_edges(graphalg.complete(4), [(0, 1)])
    assert not g.has_edge(0, 1)
    assert len(g.edges) == 5
    h = graphalg.delete_vertex(graphalg.complete(4), 3)
    assert len(h.vertices) == 3
    assert len(h.edges) == 3


def test_subdivide_edge():
    g = graphalg.subdivide_edge(graphalg.complete(3), 0, 1, "m")
    assert not g.has_edge(0, 1)
    assert g.has_edge(0, "m") and g.has_edge(1, "m")
    assert g.degree("m") == 2


def test_block_graphs():
    # Deleting i edges from K4 / K8 in a fixed order.
    assert len(graphalg.h_graph(0).edges) == 6
    assert len(graphalg.h_graph(2).edges) == 4
    assert len(graphalg.h_graph(4).edges) == 2
    assert len(graphalg.j_graph(0).edges) == 28
    assert len(graphalg.j_graph(4).edges) == 24
    assert len(graphalg.j_graph(8).edges) == 20


def test_apex_target_shapes():
    for i in (0, 2, 4):
        g = graphalg.phi_target(f"phi_7_{i}_plus")
        assert len(g.vertices) == 8
        assert len(g.edges) == 22 - i
        assert g.degree("x") == 6 and g.degree("y") == 6
        assert g.degree("z") == 2
        assert g.degree(0) == 6
    for i in (0, 4, 8):
        g = graphalg.phi_target(f"phi_11_{i}_plus_star")
        assert len(g.vertices) == 12
        assert len(g.edges) == 56 - i


def test_degree2_deleted_targets():
    parent = graphalg.phi_target("phi_7_0_plus")
    child = graphalg.phi_target("q7_1")
    assert len(child.vertices) == len(parent.vertices) - 1
    assert "z" not in child.vertices
    assert len(child.edges) == len(parent.edges) - 2


def test_isomorphism():
    a = graphalg.complete_bipartite(2, 3)
    b = graphalg.relabel(a, {v: f"n{v}" for v in a.vertices})
    assert graphalg.are_isomorphic(a, b)
    assert not graphalg.are_isomorphic(a, graphalg.complete(5))


def test_parse_expr_basic():
    assert graphalg.parse_expr("K(5)").eval() == graphalg.complete(5)
    assert graphalg.parse_expr("Kmn(6,3)").eval() == graphalg.complete_bipartite(6, 3)
    assert graphalg.parse_expr("H(2)").eval() == graphalg.h_graph(2)


def test_parse_expr_compound():
    got = graphalg.parse_expr("join(empty(2), empty(3))").eval()
    assert got == graphalg.join(graphalg.empty_graph(2), graphalg.empty_graph(3))
    got = graphalg.parse_expr("delete(K(4), 0-1)").eval()
    assert not got.has_edge(0, 1)


def test_parse_expr_rejects_garbage():
    with pytest.raises(StructuralError):
        graphalg.parse_expr("frobnicate(3)")
    with pytest.raises(StructuralError):
        graphalg.parse_expr("K(4")
