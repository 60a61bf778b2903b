import pytest

import oracles as O
from kainen.current_graphs import (
    CurrentGraphError, derive, format_current_graph, iter_current_graphs, ladder_skeleton,
    parse_current_graph,
    trace_circuits, validate,
)
from kainen.drawings import completion_possible
from kainen.search import BUDGET, FOUND, SearchError, find_current_graph
from kainen.surfaces import Graph, SurfaceId

THETA = """\
group: Z7
index: 1
arc 1: u0 -> u1 current 1
arc 2: u0 -> u1 current 2
arc 3: u0 -> u1 current 4
u0. +1 +2 +3
u1. -1 -2 -3
"""

VORTICES = """\
group: Z7
index: 1
arc 1: u0 -> x current 1
arc 2: u0 -> y current 2
arc 3: u0 -> z current 4
u0. +1 +2 +3
x. -1
y. -2
z. -3
vortex x letter x type V3
vortex y letter y type V3
vortex z letter z type V3
"""

PROJECTIVE = """\
group: Z5
index: 1
arc 1: u0 -> u0 current 1 twisted
arc 2: u0 -> x current 2
u0. +1 -1 +2
x. -2
vortex x letter x type V3
"""


def oracle_check(emb):
    rs = emb.rotation_system
    rot = {v: list(r) for v, r in rs.rotation.items()}
    faces = O.trace(rot, list(rs.twisted))
    return O.surface(rot, list(rs.twisted)), sorted(len(f) for f in faces)


def test_text_roundtrip():
    cg = parse_current_graph(VORTICES)
    assert parse_current_graph(format_current_graph(cg)) == cg


def test_theta_derives_k7_on_torus():
    cg = parse_current_graph(THETA)
    assert validate(cg).ok and len(trace_circuits(cg)) == 1
    emb = derive(cg)
    assert emb.graph == Graph.complete(7) and emb.surface == SurfaceId.S(1) and emb.is_triangular
    assert oracle_check(emb) == (("S", 1), [3] * 14)


def test_vortices_derive_k10_minus_triangle():
    emb = derive(parse_current_graph(VORTICES))
    g = emb.graph
    assert len(g.vertices) == 10 and len(g.edges) == 42
    missing = [(a, b) for a, b in [("x", "y"), ("x", "z"), ("y", "z")]]
    assert all(not g.has_edge(*e) for e in missing)
    assert oracle_check(emb) == (("S", 3), [3] * 28)
    assert not completion_possible(emb, missing)


def test_twisted_loop_derives_k6_in_projective_plane():
    emb = derive(parse_current_graph(PROJECTIVE))
    g = emb.graph
    assert len(g.vertices) == 6 and len(g.edges) == 15 and "x" in g.vertices
    assert emb.surface == SurfaceId.N(1) and emb.is_triangular
    assert oracle_check(emb) == (("N", 1), [3] * 10)


def test_kcl_violation_detected():
    bad = parse_current_graph(THETA.replace("current 4", "current 3"))
    rep = validate(bad)
    assert not rep.ok
    with pytest.raises(CurrentGraphError):
        derive(bad)


def test_wrong_index_detected():
    rep = validate(parse_current_graph(THETA.replace("index: 1", "index: 7")))
    assert not rep.ok and any(name.startswith("C1") for name, _ in rep.checks.failures)


@pytest.mark.parametrize("text, fragment", [
    ("group: Q7\nindex: 1\n", "bad group"),
    ("group: Z7\n", "missing"),
    ("group: Z7\nindex: 1\nu0. +1 x\n", "signed arc"),
    ("group: Z7\nindex: 1\nnonsense\n", "line 3"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(CurrentGraphError, match=fragment):
        parse_current_graph(text)


class TestSearch:
    def test_finds_k7(self):
        out = find_current_graph(7, 1)
        assert out.status == FOUND
        cg, emb = out.witness
        assert validate(cg).ok and emb.graph == Graph.complete(7) and emb.is_triangular

    def test_finds_vortex_version(self):
        out = find_current_graph(7, 1, ["V3", "V3", "V3"])
        cg, emb = out.witness
        assert emb.surface == SurfaceId.S(3) and len(emb.graph.edges) == 42
        assert validate(cg).ok

    def test_order_is_fixed(self):
        a = [format_current_graph(cg) for cg, _ in iter_current_graphs(7, 1)]
        b = [format_current_graph(cg) for cg, _ in iter_current_graphs(7, 1)]
        assert a == b and a

    def test_budget(self):
        assert find_current_graph(7, 1, node_budget=0).status == BUDGET

    def test_index_must_divide(self):
        with pytest.raises(SearchError):
            find_current_graph(7, 2)


def _arc_kcl(cg):
    net = {v: 0 for v in cg.vertices}
    for a in cg.arcs:
        net[a.tail] -= a.current
        net[a.head] += a.current
    return all(x % cg.group_order == 0 for x in net.values())


def test_index2_ladder_two_rungs():
    cg = ladder_skeleton(2, 2, [4, 1], 60)
    assert O.dart_faces(cg.rot) == 2
    assert not any(name.startswith("C1") for name, _ in validate(cg).checks.failures)
    assert _arc_kcl(cg)


def test_index3_ladder_two_rung_pairs():
    cg = ladder_skeleton(3, 4, [1, 4, 7, 10], 60, strict=True)
    rings = sorted(int(v[1:]) for v in cg.vertices if v.startswith("p") and v[1:].isdigit())
    assert rings in ([0, 2], [1, 3])
    assert O.dart_faces(cg.rot) == 3 == len(trace_circuits(cg))
    assert _arc_kcl(cg)


@pytest.mark.parametrize("rungs", [3, 5, 7])
def test_index1_ladder_odd_rungs(rungs):
    cg = ladder_skeleton(1, rungs, [3 * i + 1 for i in range(rungs)], 90)
    assert O.dart_faces(cg.rot) == 1
    assert _arc_kcl(cg)


def test_strict_ladder_rejects_non_arithmetic_currents():
    with pytest.raises(CurrentGraphError, match="arithmetic"):
        ladder_skeleton(2, 4, [1, 4, 8, 10], 60, strict=True)


def test_ladder_parity_obstruction_reported():
    with pytest.raises(CurrentGraphError, match="circuits"):
        ladder_skeleton(2, 3, [1, 4, 7], 60)
