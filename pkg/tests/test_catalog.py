import json
import logging
from dataclasses import replace

import pytest

import oracles as O
from kainen import catalog
from kainen.catalog import (
    CatalogError, ExceptionalCase, UnsupportedError, bipartite_target, cached, complete_target,
    construct_bipartite, construct_complete, k55_two_crossing_drawing, load_table, quad_bipartite,
    table_entry, transpose,
)
from kainen.drawings import Drawing, responsibility, verify_drawing, verify_kainen
from kainen.search import SearchSpec, search_embeddings
from kainen.surfaces import Graph, SurfaceId


@pytest.fixture
def private_cache(tmp_path):
    catalog.set_cache_dir(tmp_path)
    yield tmp_path
    catalog.set_cache_dir(None)


class TestTables:
    @pytest.mark.parametrize("name, surface, v, e", [
        ("table-1", SurfaceId.S(4), 11, 51),
        ("table-2", SurfaceId.S(22), 21, 189),
        ("table-3", SurfaceId.S(4), 11, 51),
        ("table-4", SurfaceId.S(8), 14, 84),
    ])
    def test_facts(self, name, surface, v, e):
        emb = load_table(name)
        assert emb.surface == surface and emb.is_triangular
        assert (len(emb.graph.vertices), len(emb.graph.edges)) == (v, e)
        assert 3 * len(emb.faces) == 2 * e

    def test_unknown_name(self):
        with pytest.raises(CatalogError, match="unknown table"):
            load_table("table-9")

    def test_corrupt_payload_detected(self, monkeypatch):
        entry = table_entry("table-1")
        lines = entry.payload.splitlines()
        i = next(k for k, s in enumerate(lines) if s.startswith("1."))
        head, *nbrs = lines[i].split()
        nbrs[0], nbrs[1] = nbrs[1], nbrs[0]
        lines[i] = " ".join([head, *nbrs])
        bad = replace(entry, payload="\n".join(lines) + "\n")
        monkeypatch.setattr(catalog, "table_entry", lambda name: bad)
        with pytest.raises(CatalogError, match="is corrupt"):
            load_table("table-1")


class TestCache:
    def _build(self, calls):
        def build():
            calls.append(1)
            emb = search_embeddings(SearchSpec(Graph.complete(7), SurfaceId.S(1))).witness
            return Drawing.from_embedding(emb), {"note": "test"}
        return build

    def test_roundtrip_builds_once(self, private_cache):
        calls = []
        a = cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        b = cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        assert len(calls) == 1 and a == b
        meta = json.loads(next(private_cache.glob("*.json")).read_text())
        assert meta["key"] == "K7 torus" and meta["surface"] == "S1" and meta["crossings"] == 0
        assert not list(private_cache.glob("*.tmp"))

    def test_tampered_entry_rebuilt(self, private_cache, caplog):
        calls = []
        cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        rot = next(private_cache.glob("*.rot"))
        rot.write_text(rot.read_text().replace("0. 1", "0. 2", 1))
        with caplog.at_level(logging.WARNING, logger="kainen"):
            cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        assert len(calls) == 2 and "corrupt" in caplog.text

    def test_wrong_checksum_metadata(self, private_cache, caplog):
        calls = []
        cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        meta = next(private_cache.glob("*.json"))
        info = json.loads(meta.read_text())
        info["sha256"] = "0" * 64
        meta.write_text(json.dumps(info))
        cached("K7 torus", Graph.complete(7), SurfaceId.S(1), self._build(calls))
        assert len(calls) == 2

    def test_invalid_build_refused(self, private_cache):
        def build():
            emb = search_embeddings(SearchSpec(Graph.complete(7), SurfaceId.S(1))).witness
            return Drawing.from_embedding(emb), {}
        with pytest.raises(CatalogError, match="fails verification"):
            cached("K7 wrong", Graph.complete(7), SurfaceId.S(2), build)
        assert not list(private_cache.iterdir())


class TestComplete:
    def test_targets(self):
        assert complete_target(11) == (SurfaceId.S(4), 4)
        assert complete_target(9) == (SurfaceId.S(2), 4)
        assert complete_target(7, False) == (SurfaceId.N(2), 1)
        assert complete_target(8, False) == (SurfaceId.N(3), 2)
        assert complete_target(10, genus_offset=-1)[0] == SurfaceId.S(3)
        with pytest.raises(UnsupportedError):
            complete_target(4, genus_offset=-1)
        with pytest.raises(UnsupportedError):
            complete_target(2)

    @pytest.mark.parametrize("n", range(3, 15))
    @pytest.mark.parametrize("orientable", [True, False], ids=["S", "N"])
    def test_small_orders(self, n, orientable):
        d = construct_complete(n, orientable)
        s, c = complete_target(n, orientable)
        g = Graph.complete(n)
        _, h, _, hp, t, tp = O.complete_closed_form(n)
        special = {(9, True): 4, (7, False): 1, (8, False): 2}
        if orientable:
            assert (s, c) == (SurfaceId.S(h), special.get((n, True), t))
        else:
            # N_0 is read as the sphere
            assert s == (SurfaceId.N(hp) if hp else SurfaceId.S(0))
            assert c == special.get((n, False), tp)
        assert verify_drawing(d, g, s, c, strict=True).ok

    def test_current_graph_builder(self):
        d = construct_complete(7)
        assert d.crossings == 0 and d.surface == SurfaceId.S(1)


class TestBipartite:
    def test_exceptions_raise_with_value(self):
        with pytest.raises(ExceptionalCase) as info:
            bipartite_target(3, 5)
        assert info.value.value == 4 and info.value.surface == SurfaceId.S(0)
        with pytest.raises(ExceptionalCase) as info:
            bipartite_target(5, 5)
        assert info.value.value == 2 and "k55_two_crossing_drawing" in str(info.value)
        with pytest.raises(ExceptionalCase) as info:
            bipartite_target(6, 3, genus_offset=-1)
        assert info.value.value == 6

    def test_quad_orientability_rules(self):
        with pytest.raises(UnsupportedError):
            quad_bipartite(3, 5)
        with pytest.raises(UnsupportedError):
            quad_bipartite(5, 5, orientable=False)
        assert quad_bipartite(4, 6).base.is_uniform(4)

    def test_transpose_swaps_sides(self):
        d = construct_bipartite(4, 7)
        t = transpose(d)
        assert t.original_graph == Graph.complete_bipartite(7, 4)
        assert t.crossings == d.crossings and t.surface == d.surface

    @pytest.mark.parametrize("m, n", [(3, 7), (4, 5), (5, 7), (7, 4), (6, 9), (5, 8), (9, 9), (12, 13)])
    def test_orientable(self, m, n):
        d = construct_bipartite(m, n)
        p = O.bipartite_closed_form(m, n)
        g = Graph.complete_bipartite(m, n)
        assert verify_drawing(d, g, SurfaceId.S(p[1]), p[4], strict=True).ok

    @pytest.mark.parametrize("m, n", [(3, 3), (5, 7), (9, 11)])
    def test_nonorientable_odd(self, m, n):
        d = construct_bipartite(m, n, orientable=False)
        assert verify_kainen(d, Graph.complete_bipartite(m, n), SurfaceId.N(O.bipartite_closed_form(m, n)[3])).ok
        assert d.crossings == 1

    @pytest.mark.parametrize("m, n", [(4, 4), (6, 5), (4, 8), (10, 4), (7, 6)])
    def test_one_genus_down(self, m, n):
        d = construct_bipartite(m, n, genus_offset=-1)
        assert d.crossings == 4 and d.surface == SurfaceId.S(O.bipartite_closed_form(m, n)[0] - 1)
        d = construct_bipartite(m, n, orientable=False, genus_offset=-1)
        assert d.crossings == 2 and d.surface == SurfaceId.N(O.bipartite_closed_form(m, n)[2] - 1)

    def test_side_limit(self):
        with pytest.raises(UnsupportedError):
            construct_bipartite(3, 14)

    def test_k55_two_crossings(self):
        d = k55_two_crossing_drawing()
        g = Graph.complete_bipartite(5, 5)
        assert verify_drawing(d, g, SurfaceId.S(2), 2, max_responsibility=2).ok
        assert responsibility(d, ("a", 0)) == 2
        assert not verify_drawing(d, g, SurfaceId.S(2), 2).ok
