from collections import Counter

import pytest

import oracles as O
from kainen.catalog import load_table
from kainen.surfaces import (
    BIPARTITE_EXCEPTIONS, COMPLETE_EXCEPTIONS, Cross, EmbeddingError, Graph, RotationSystem,
    SurfaceId, bipartite_profile, complete_profile, from_faces, girth, kainen_lower_bound,
    minimal_triangulation_order, parse_rotation_text, parse_vertex, format_rotation_text,
    trace_faces,
)

K4_PLANAR = {0: [1, 2, 3], 1: [0, 3, 2], 2: [0, 1, 3], 3: [0, 2, 1]}


def face_census(faces):
    return Counter(O.face_key(list(f)) for f in faces)


def as_oracle(rs):
    return {v: list(r) for v, r in rs.rotation.items()}, [tuple(e) for e in rs.twisted]


class TestSurfaceId:
    def test_parse_and_format(self):
        assert SurfaceId.parse("S3") == SurfaceId.S(3)
        assert SurfaceId.parse("N2") == SurfaceId.N(2)
        assert str(SurfaceId.S(4)) == "S4" and str(SurfaceId.N(9)) == "N9"

    def test_euler_characteristic(self):
        assert SurfaceId.S(0).euler_characteristic == 2
        assert SurfaceId.S(3).euler_characteristic == -4
        assert SurfaceId.N(1).euler_characteristic == 1
        assert SurfaceId.from_euler(-4, True) == SurfaceId.S(3)
        assert SurfaceId.from_euler(-7, False) == SurfaceId.N(9)

    @pytest.mark.parametrize("bad", ["", "S", "T2", "N0", "S-1", "Sx"])
    def test_rejects_garbage(self, bad):
        with pytest.raises(ValueError):
            SurfaceId.parse(bad)

    def test_odd_orientable_chi_rejected(self):
        with pytest.raises(ValueError):
            SurfaceId.from_euler(1, True)


class TestGraph:
    def test_complete_and_bipartite(self):
        assert len(Graph.complete(7).edges) == 21
        g = Graph.complete_bipartite(3, 4)
        assert len(g.edges) == 12 and g.bipartition is not None
        assert girth(g) == 4 and girth(Graph.complete(5)) == 3

    def test_relabel_and_edit(self):
        g = Graph.complete(4).without_edges([(0, 1)])
        assert not g.has_edge(0, 1) and len(g.edges) == 5
        h = g.relabel({0: "p", 1: "q", 2: 2, 3: 3})
        assert not h.has_edge("p", "q") and h.has_edge("p", 2)
        assert g.with_edges([(0, 1)]) == Graph.complete(4)


class TestRotationText:
    def test_roundtrip(self):
        rs = RotationSystem(K4_PLANAR, twisted=[(0, 1)])
        assert parse_rotation_text(format_rotation_text(rs)) == rs

    def test_comments_and_twisted_section(self):
        rs = parse_rotation_text("# c\n0. 1 2 3\n1. 0 3 2\n2. 0 1 3\n3. 0 2 1\ntwisted: (0,1) (2,3)\n")
        assert rs.twisted == {(0, 1), (2, 3)}

    def test_crossing_tokens(self):
        assert parse_vertex("*3") == Cross(3)
        assert parse_vertex("12") == 12 and parse_vertex("w0") == "w0"

    @pytest.mark.parametrize("text, fragment", [
        ("0. 1 2\n0. 1 2\n", "duplicate"),
        ("0. 1\n1. 2\n2. 1\n", "asymmetric"),
        ("0. 0 1\n1. 0\n", "loop"),
        ("0. 1 &\n", "bad vertex"),
        ("", "no rotation"),
    ])
    def test_errors_name_the_problem(self, text, fragment):
        with pytest.raises(EmbeddingError, match=fragment):
            parse_rotation_text(text)


class TestTracing:
    def test_k4_planar(self):
        emb = trace_faces(RotationSystem(K4_PLANAR))
        assert emb.surface == SurfaceId.S(0) and emb.is_triangular and len(emb.faces) == 4

    def test_twisting_one_edge_gives_projective_plane(self):
        emb = trace_faces(RotationSystem(K4_PLANAR, twisted=[(0, 1)]))
        assert emb.surface == SurfaceId.N(1)

    @pytest.mark.parametrize("name", ["table-1", "table-2", "table-3", "table-4"])
    def test_tables_agree_with_oracle(self, name):
        emb = load_table(name)
        rot, tw = as_oracle(emb.rotation_system)
        assert face_census(emb.faces) == face_census(O.trace(rot, tw))
        kind, k = O.surface(rot, tw)
        assert (kind == "S") == emb.orientable and k == (emb.surface.genus if emb.orientable else emb.surface.crosscaps)

    def test_every_edge_side_used_once(self):
        emb = load_table("table-2")
        sides = Counter()
        for _, _, (a, b) in emb.face_sides():
            sides[frozenset((a, b))] += 1
        assert set(sides.values()) == {2} and len(sides) == len(emb.graph.edges)

    def test_flipping_vertices_keeps_faces(self):
        emb = load_table("table-3")
        rs = emb.rotation_system.flipped([0, 3, 7])
        assert face_census(trace_faces(rs).faces) == face_census(emb.faces)
        assert face_census(trace_faces(rs.mirror()).faces) == face_census(emb.faces)

    def test_disconnected_rejected(self):
        with pytest.raises(EmbeddingError):
            trace_faces(RotationSystem({0: [1], 1: [0], 2: [3], 3: [2]}))


class TestFromFaces:
    @pytest.mark.parametrize("name", ["table-1", "table-4"])
    def test_roundtrip(self, name):
        emb = load_table(name)
        again = from_faces(emb.faces)
        assert again.surface == emb.surface
        assert face_census(again.faces) == face_census(emb.faces)

    def test_rejects_edge_used_three_times(self):
        with pytest.raises(EmbeddingError):
            from_faces([[0, 1, 2], [0, 1, 2], [0, 1, 2]])

    def test_rejects_pinched_vertex(self):
        # two disjoint fans at vertex 0
        faces = [[0, 1, 2], [0, 2, 1], [0, 3, 4], [0, 4, 3]]
        with pytest.raises(EmbeddingError):
            from_faces(faces)

    def test_degree_two_vertex_nonorientable(self):
        emb = trace_faces(RotationSystem(K4_PLANAR, twisted=[(0, 1)]))
        faces = [list(f) for f in emb.faces]
        # subdivide edge (2,3) with a new vertex
        out = []
        for f in faces:
            k = len(f)
            g = []
            for i in range(k):
                g.append(f[i])
                if {f[i], f[(i + 1) % k]} == {2, 3}:
                    g.append(9)
            out.append(g)
        sub = from_faces(out)
        assert sub.surface == SurfaceId.N(1) and sub.graph.degree(9) == 2


class TestProfiles:
    def test_complete_matches_closed_form(self):
        for n in range(3, 101):
            p = complete_profile(n)
            H, h, Hp, hp, t, tp = O.complete_closed_form(n)
            assert (p.H, p.h, p.Hprime, p.hprime, p.t, p.tprime) == (H, h, Hp, hp, t, tp), n
            assert p.t == O.T_BY_RESIDUE_12[n % 12]

    def test_bipartite_matches_closed_form(self):
        for m in range(3, 51):
            for n in range(m, 51):
                p = bipartite_profile(m, n)
                H, h, Hp, hp, t, tp = O.bipartite_closed_form(m, n)
                assert (p.H, p.h, p.Hprime, p.hprime, p.t, p.tprime) == (H, h, Hp, hp, t, tp), (m, n)
                assert p.t == O.t_bipartite_by_residue(m, n)

    def test_lower_bound_matches_euler_count(self):
        for n in range(4, 40):
            g = Graph.complete(n)
            for s in (SurfaceId.S(complete_profile(n).h), SurfaceId.N(max(1, complete_profile(n).hprime))):
                want = O.kainen_bound(n, len(g.edges), s.euler_characteristic, 3)
                assert kainen_lower_bound(g, s) == want

    def test_minimal_triangulation_order(self):
        for g in range(0, 400):
            assert minimal_triangulation_order(g) == O.min_triangulation_order(g)

    def test_exception_tables(self):
        assert COMPLETE_EXCEPTIONS == {(9, True): 4, (7, False): 1, (8, False): 2}
        assert BIPARTITE_EXCEPTIONS[(3, 5)] == 4 and BIPARTITE_EXCEPTIONS[(5, 5)] == 2

