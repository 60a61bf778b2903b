"""Bundled rotation tables, a verified cache of searched bases, and construction drivers."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
from collections import Counter
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from .drawings import (
    Drawing,
    complete_kainen,
    format_drawing,
    insert_with_crossing,
    insert_with_route,
    parse_drawing,
    slackers,
    verify_drawing,
)
from .surfaces import (
    BIPARTITE_EXCEPTIONS,
    COMPLETE_EXCEPTIONS,
    Embedding,
    EmbeddingError,
    Graph,
    SurfaceId,
    bipartite_profile,
    complete_profile,
    edge,
    format_vertex,
    letter_name,
    parse_rotation_text,
    sort_edges,
    sort_vertices,
    trace_faces,
)

log = logging.getLogger(__name__)

CACHE_ENV = "KAINEN_CACHE"


class CatalogError(EmbeddingError):
    """Bundled or cached data failed verification, or a base could not be produced."""


class UnsupportedError(CatalogError):
    """The requested construction is outside the supported range."""


class SearchBudgetError(CatalogError):
    """Nothing cached and the search for a base ran out of budget."""


class ExceptionalCase(CatalogError):
    """The formula value does not hold; ``value`` is the true crossing number."""

    def __init__(self, message: str, value: int, surface: SurfaceId):
        super().__init__(message)
        self.value = value
        self.surface = surface


# ---------------------------------------------------------------------------
# Bundled tables


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    payload: str
    vertices: tuple
    missing: tuple
    surface: SurfaceId
    note: str

    @property
    def graph(self) -> Graph:
        vs = self.vertices
        full = {edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]}
        return Graph(frozenset(vs), frozenset(full - set(self.missing)))


def _table2_missing():
    out = [("w0", "w1"), ("w0", "x"), ("w1", "x")]
    out += [(i, "w1" if i % 2 == 0 else "w0") for i in range(18)]
    return tuple(sort_edges(out))


_TABLES = {
    "table-1": ("table1.rot", tuple(range(1, 12)), tuple(sort_edges((i, 11) for i in (7, 8, 9, 10))),
                SurfaceId.S(4), "K11 minus a star at 11"),
    "table-2": ("table2.rot", tuple(range(18)) + ("w0", "w1", "x"), _table2_missing(),
                SurfaceId.S(22), "21 vertices; merging w0 and w1 yields K20 less a path"),
    "table-3": ("table3.rot", tuple(range(11)), tuple(sort_edges([(0, 1), (5, 7), (6, 7), (6, 8)])),
                SurfaceId.S(4), "K11 minus K2 and P3"),
    "table-4": ("table4.rot", tuple(range(14)),
                tuple(sort_edges([(0, 1), (5, 7), (5, 8), (6, 8), (10, 12), (10, 13), (11, 13)])),
                SurfaceId.S(8), "K14 minus K2 and two copies of P3"),
}

TABLE_NAMES = tuple(_TABLES)


def table_entry(name: str) -> CatalogEntry:
    if name not in _TABLES:
        raise CatalogError(f"unknown table {name!r}; known: {', '.join(TABLE_NAMES)}")
    fname, vs, missing, surface, note = _TABLES[name]
    payload = (files("kainen") / "data" / fname).read_text()
    return CatalogEntry(name, payload, vs, missing, surface, note)


def load_table(name: str) -> Embedding:
    """Parse, trace and check a bundled table against its expected facts."""
    entry = table_entry(name)
    try:
        emb = trace_faces(parse_rotation_text(entry.payload))
    except (EmbeddingError, ValueError) as exc:
        raise CatalogError(f"{name}: payload does not parse: {exc}") from exc
    problems = []
    if emb.graph != entry.graph:
        problems.append("graph differs from the expected one")
    if emb.surface != entry.surface:
        problems.append(f"surface {emb.surface}, expected {entry.surface}")
    if not emb.is_triangular:
        problems.append("not triangular")
    if problems:
        raise CatalogError(f"{name} is corrupt: " + "; ".join(problems))
    return emb


# ---------------------------------------------------------------------------
# Cache of searched bases

_cache_override: Path | None = None


def set_cache_dir(path) -> None:
    """Use ``path`` as the cache root, overriding the environment (``None`` restores it)."""
    global _cache_override
    _cache_override = Path(path) if path is not None else None


def cache_dir() -> Path:
    if _cache_override is not None:
        return _cache_override
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "kainen"


def _entry_stem(key: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9]+", "_", key).strip("_")[:48]
    return f"{slug}-{hashlib.sha256(key.encode()).hexdigest()[:12]}"


def _graph_json(g: Graph) -> dict:
    return {"vertices": [format_vertex(v) for v in sort_vertices(g.vertices)],
            "edges": [[format_vertex(a), format_vertex(b)] for a, b in sort_edges(g.edges)]}


def _problems(d: Drawing, target: Graph, surface: SurfaceId, crossings: int, face_counts) -> list:
    rep = verify_drawing(d, target, surface, crossings)
    out = [f"{n}: {msg}" for n, msg in rep.failures]
    if face_counts is not None:
        got = dict(Counter(len(f) for f in d.base.faces))
        if got != dict(face_counts):
            out.append(f"face lengths {got}, expected {dict(face_counts)}")
    return out


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_entry(stem: str, key: str, target, surface, crossings, face_counts) -> Drawing | None:
    root = cache_dir()
    rot, meta = root / f"{stem}.rot", root / f"{stem}.json"
    if not (rot.exists() and meta.exists()):
        return None
    try:
        text = rot.read_text()
        info = json.loads(meta.read_text())
        if info.get("key") != key:
            raise CatalogError("key mismatch")
        if info.get("sha256") != hashlib.sha256(text.encode()).hexdigest():
            raise CatalogError("checksum mismatch")
        d = parse_drawing(text, target)
        bad = _problems(d, target, surface, crossings, face_counts)
        if bad:
            raise CatalogError("; ".join(bad))
        return d
    except (OSError, ValueError, EmbeddingError) as exc:
        log.warning("discarding corrupt cache entry %s: %s", stem, exc)
        for p in (rot, meta):
            try:
                p.unlink()
            except OSError:
                pass
        return None


def _write_entry(stem: str, key: str, d: Drawing, surface, face_counts, stats) -> None:
    root = cache_dir()
    text = format_drawing(d)
    info = {"key": key, "graph": _graph_json(d.original_graph), "surface": str(surface),
            "faces": {str(k): v for k, v in sorted(face_counts.items())} if face_counts else None,
            "crossings": d.crossings, "sha256": hashlib.sha256(text.encode()).hexdigest(),
            "stats": stats}
    try:
        root.mkdir(parents=True, exist_ok=True)
        _atomic_write(root / f"{stem}.rot", text)
        _atomic_write(root / f"{stem}.json", json.dumps(info, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        log.warning("cache directory %s is not writable: %s", root, exc)


def cached(key: str, target: Graph, surface: SurfaceId, build, crossings: int = 0,
           face_counts: dict | None = None) -> Drawing:
    """Return the verified cache entry for ``key``, building and storing it if absent.

    ``build`` returns ``(drawing, stats)``.  Entries that fail any check are
    deleted and rebuilt; a build that fails the same checks raises.
    """
    stem = _entry_stem(key)
    d = _read_entry(stem, key, target, surface, crossings, face_counts)
    if d is not None:
        return d
    d, stats = build()
    bad = _problems(d, target, surface, crossings, face_counts)
    if bad:
        raise CatalogError(f"{key}: built object fails verification: " + "; ".join(bad))
    _write_entry(stem, key, d, surface, face_counts, stats)
    return d


# ---------------------------------------------------------------------------
# Searched bases

DEFAULT_BUDGET = 600.0


def _stats(out) -> dict:
    s = {k: out.stats[k] for k in ("nodes", "prunes", "leaves", "units") if k in out.stats}
    s.update(status=out.status, elapsed=round(out.elapsed, 3))
    return s


def _searched(key: str, target: Graph, surface: SurfaceId, crossings: int, search,
              face_counts: dict | None = None) -> Drawing:
    def build():
        out = search()
        if not out.found:
            err = SearchBudgetError if out.status == "budget-exceeded" else CatalogError
            raise err(f"{key}: nothing cached and the search ended with status {out.status}")
        w = out.witness
        d = Drawing(w.base, w.ledger, target) if isinstance(w, Drawing) else Drawing.from_embedding(w, target)
        return d, _stats(out)
    return cached(key, target, surface, build, crossings, face_counts)


def _require(d: Drawing, target: Graph, s: SurfaceId, crossings: int, what: str) -> Drawing:
    rep = verify_drawing(d, target, s, crossings)
    if not rep.ok:
        raise CatalogError(f"{what} failed verification:\n{rep}")
    return d


def _canonical_complete(d: Drawing) -> Drawing:
    from .transforms import relabel_drawing

    order = sort_vertices(d.original_graph.vertices)
    mapping = {v: i for i, v in enumerate(order)}
    if all(mapping[v] == v for v in order):
        return d
    return relabel_drawing(d, mapping)


# ---------------------------------------------------------------------------
# Table pipelines


def table1_drawing() -> Drawing:
    """K11 with four crossings in S4: complete the star missing from table 1."""
    emb = load_table("table-1")
    g = Graph(frozenset(range(1, 12)), frozenset(e for e in Graph.complete(12).edges if 0 not in e))
    d = complete_kainen(Drawing.from_embedding(emb, g))
    if d is None:
        raise CatalogError("table-1: the missing star cannot be completed")
    return _require(d, g, SurfaceId.S(4), 4, "table-1 completion")


K20_FREED_PATH = ((16, 0), (0, 1), (1, 17))
K20_CROSSINGS = (((0, 1), (2, 6)), ((0, 16), (4, 5)), ((1, 17), (4, 13)))


def table2_drawing() -> Drawing:
    """K20 with four crossings in S22 from table 2 by merging w0 and w1.

    The crossing of the re-inserted edge (w, x) is chosen by the completion
    search and is recorded as the last ledger entry.
    """
    from .transforms import merge_vertices

    emb = load_table("table-2")
    merged = merge_vertices(emb, "w0", "w1", K20_FREED_PATH, new_name="w")
    vs = tuple(range(18)) + ("w", "x")
    target = Graph(frozenset(vs), frozenset(edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]))
    expected_missing = sort_edges([("w", "x")] + list(K20_FREED_PATH))
    if sort_edges(target.edges - merged.graph.edges) != expected_missing or not merged.is_triangular:
        raise CatalogError("table-2: the merge did not produce K20 less the freed path and (w,x)")
    d = Drawing.from_embedding(merged, target)
    for (u, v), crossed in K20_CROSSINGS:
        d = insert_with_crossing(d, u, v, crossed)
    done = complete_kainen(d)
    if done is None:
        raise CatalogError("table-2: (w,x) cannot be inserted with one crossing")
    log.info("K20: (w,x) crosses %s", done.ledger[-1].crossed)
    return _require(done, target, SurfaceId.S(22), 4, "table-2 completion")


def table3_drawing() -> Drawing:
    """K11 with one crossing in N9: a crosscap at 4 absorbs the P3, then (0,1) crosses (2,3)."""
    from .transforms import add_crosscap_p3

    emb = add_crosscap_p3(load_table("table-3"), 4, (5, 6, 7, 8))
    g = Graph.complete(11)
    d = insert_with_crossing(Drawing.from_embedding(emb, g), 0, 1, (2, 3))
    return _require(d, g, SurfaceId.N(9), 1, "table-3 pipeline")


def table4_drawing() -> Drawing:
    """K14 with one crossing in N18: two crosscaps, then (0,1) crosses (2,3)."""
    from .transforms import add_crosscap_p3

    emb = add_crosscap_p3(load_table("table-4"), 4, (5, 6, 7, 8))
    emb = add_crosscap_p3(emb, 9, (10, 11, 12, 13))
    g = Graph.complete(14)
    d = insert_with_crossing(Drawing.from_embedding(emb, g), 0, 1, (2, 3))
    return _require(d, g, SurfaceId.N(18), 1, "table-4 pipeline")


# ---------------------------------------------------------------------------
# Complete graphs


def _current_graph_drawing(n: int, k: int, plan, orientable: bool) -> Drawing:
    from .search import find_current_graph

    out = find_current_graph(n, k, plan, orientable)
    if not out.found:
        raise CatalogError(f"no current graph over Z{n} of the requested shape")
    emb = out.witness[1]
    return _canonical_complete(Drawing.from_embedding(emb))


_COMPLETE_BUILDERS = {
    (7, True): lambda: _current_graph_drawing(7, 1, None, True),
    (6, False): lambda: _current_graph_drawing(5, 1, ["V3"], False),
    (11, True): table1_drawing,
    (20, True): table2_drawing,
    (11, False): table3_drawing,
    (14, False): table4_drawing,
}

SEARCHED_COMPLETE = tuple(range(3, 15))


def complete_target(n: int, orientable: bool = True, genus_offset: int = 0) -> tuple[SurfaceId, int]:
    """Surface and crossing count a construction of K_n aims for."""
    from .surfaces import kainen_lower_bound

    if n < 3:
        raise UnsupportedError("complete graphs need n >= 3")
    if genus_offset not in (0, -1):
        raise UnsupportedError("genus offset must be 0 or -1")
    p = complete_profile(n)
    if genus_offset == 0:
        s = SurfaceId.S(p.h) if orientable else SurfaceId.N(p.hprime)
        return s, COMPLETE_EXCEPTIONS.get((n, orientable), p.t if orientable else p.tprime)
    g = (p.H if orientable else p.Hprime) - 1
    if g < 0:
        raise UnsupportedError(f"K{n} is planar; there is no surface below the sphere")
    s = SurfaceId.S(g) if orientable else SurfaceId.N(g)
    return s, kainen_lower_bound(Graph.complete(n), s)


def construct_complete(n: int, orientable: bool = True, genus_offset: int = 0,
                       time_budget: float | None = DEFAULT_BUDGET, threads: int = 1) -> Drawing:
    """A verified drawing of K_n in S_h(n) (or N_h'(n)) with the minimum number of crossings.

    Tables and current graphs are used where available; other orders are
    searched within ``time_budget`` and cached.
    """
    from .search import find_drawing

    s, c = complete_target(n, orientable, genus_offset)
    g = Graph.complete(n)
    builder = _COMPLETE_BUILDERS.get((n, orientable)) if genus_offset == 0 else None
    if builder is not None:
        d = builder()
    else:
        key = f"K{n} {s} {c} crossings"
        try:
            d = _searched(key, g, s, c, lambda: find_drawing(g, s, c, time_budget=time_budget, threads=threads))
        except CatalogError as exc:
            raise UnsupportedError(
                f"K{n} in {s} with {c} crossings is unsupported: its construction relies on current "
                f"graphs available only as figures, and search failed ({exc})") from exc
    return _require(_canonical_complete(d), g, s, c, f"K{n} construction")


# ---------------------------------------------------------------------------
# Complete bipartite graphs
#
# Drawings are kept with lettered left vertices and numbered right vertices
# in sorted order; every helper returns that canonical labeling.

MAX_SIDE = 13


def _relabel_sides(d: Drawing, left_names, right_names) -> Drawing:
    from .transforms import named_bipartition, relabel_drawing

    g = d.original_graph if d.original_graph.bipartition else named_bipartition(d.original_graph)
    left, right = g.bipartition
    mapping = dict(zip(sort_vertices(left), left_names))
    mapping.update(zip(sort_vertices(right), right_names))
    out = relabel_drawing(Drawing(d.base, d.ledger, g), mapping)
    og = out.original_graph
    bp = (frozenset(mapping[v] for v in left), frozenset(mapping[v] for v in right))
    return Drawing(out.base, out.ledger, Graph(og.vertices, og.edges, bp))


def _canonical_bipartite(d: Drawing) -> Drawing:
    left, right = d.original_graph.bipartition
    return _relabel_sides(d, [letter_name(i) for i in range(len(left))], range(len(right)))


def transpose(d: Drawing) -> Drawing:
    """Swap the sides of a drawing of K_{m,n}, giving one of K_{n,m}."""
    left, right = d.original_graph.bipartition
    flipped = _relabel_sides(d, [f"__l{i}" for i in range(len(left))], [f"__r{i}" for i in range(len(right))])
    og = flipped.original_graph
    swapped = Drawing(flipped.base, flipped.ledger, Graph(og.vertices, og.edges, og.bipartition[::-1]))
    return _canonical_bipartite(swapped)


def _side(d: Drawing, side: str) -> list:
    left, right = d.original_graph.bipartition
    return sort_vertices(left if side == "left" else right)


def diamond(d1: Drawing, d2: Drawing, side: str) -> Drawing:
    """Diamond sum of two bipartite drawings at their first slackers on ``side``."""
    from .transforms import diamond_sum

    s1 = sort_vertices(slackers(d1, side))
    s2 = sort_vertices(slackers(d2, side))
    if not s1 or not s2:
        raise CatalogError(f"diamond sum needs a {side} slacker in both drawings")
    return _canonical_bipartite(diamond_sum(d1, s1[0], d2, s2[0]))


def _double(d: Drawing, side: str, count: int, keep_slacker: str | None = None) -> Drawing:
    """Double ``count`` distinct original vertices on ``side``, slackers first."""
    from .transforms import TransformError, double_vertex

    originals = _side(d, side)
    for _ in range(count):
        free = slackers(d)
        order = [v for v in originals if v in free] + [v for v in originals if v not in free]
        for v in order:
            try:
                d = double_vertex(d, v, keep_slacker=keep_slacker)
            except TransformError:
                continue
            originals.remove(v)
            break
        else:
            raise CatalogError(f"no {side} vertex can be doubled")
    return _canonical_bipartite(d)


def _surface(orientable: bool, g: int) -> SurfaceId:
    return SurfaceId.S(g) if orientable else SurfaceId.N(g)


_budget = DEFAULT_BUDGET


def quad_bipartite(m: int, n: int, orientable: bool = True) -> Drawing:
    """Quadrangular embedding of K_{m,n} as a crossing-free drawing.

    Bases with both sides at most 6 are searched and cached; larger ones are
    diamond sums with K_{m,6}.  Without orientability the result is
    nonorientable unless the graph is planar.
    """
    q = (m - 2) * (n - 2)
    if min(m, n) < 2:
        raise UnsupportedError("quadrangular embeddings need both sides >= 2")
    if orientable and q % 4:
        raise UnsupportedError(f"K{m},{n} has no orientable quadrangular embedding")
    if not orientable and m % 2 and n % 2:
        raise UnsupportedError(f"K{m},{n} has no nonorientable quadrangular embedding")
    return _quad(m, n, orientable or q == 0)


_memo: dict = {}


def _memoized(fn):
    def wrapper(*args):
        key = (fn.__name__, args, str(cache_dir()))
        if key not in _memo:
            _memo[key] = fn(*args)
        return _memo[key]
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def clear_memo() -> None:
    _memo.clear()


@_memoized
def _quad(m: int, n: int, orientable: bool) -> Drawing:
    from .search import SearchSpec, search_embeddings

    if m > n:
        return transpose(_quad(n, m, orientable))
    if n >= 7 and m >= 3:
        return diamond(_quad(m, n - 4, orientable), _quad(m, 6, orientable), "right")
    g = Graph.complete_bipartite(m, n)
    q = (m - 2) * (n - 2)
    s = _surface(orientable, q // 4 if orientable else q // 2)
    fc = {4: len(g.edges) // 2}
    spec = SearchSpec(g, s, face_counts=fc, time_budget=_budget)
    return _searched(f"quad K{m},{n} {s}", g, s, 0, lambda: search_embeddings(spec), fc)


_FIGURES = {
    # drawings known only from figures; searched with the missing star fixed
    (5, 7): (3, [("a", 0), ("a", 1), ("a", 2)], "right"),
    (5, 9): (1, [("a", 0)], "right"),
    (6, 5): (4, [("a", 0), ("b", 0), ("c", 0), ("d", 0)], "right"),
}


@_memoized
def _figure(m: int, n: int) -> Drawing:
    from .search import find_drawing

    c, missing, side = _FIGURES[(m, n)]
    g = Graph.complete_bipartite(m, n)
    q = (m - 2) * (n - 2)
    s = SurfaceId.S(q // 4 if c < 4 else q // 4 - 1)
    d = _searched(f"figure K{m},{n} {s} {c} crossings", g, s, c,
                  lambda: find_drawing(g, s, c, time_budget=_budget, missing_sets=[missing], slacker=side))
    if not slackers(d, side):
        raise CatalogError(f"K{m},{n} drawing lacks a {side} slacker")
    return _canonical_bipartite(d)


@_memoized
def _kainen(m: int, n: int) -> Drawing:
    """Orientable drawing of K_{m,n} with t(m,n) crossings in S_h(m,n)."""
    if m > n:
        return transpose(_kainen(n, m))
    if (m, n) in ((3, 5), (5, 5)):
        raise ExceptionalCase(f"K{m},{n} is exceptional", BIPARTITE_EXCEPTIONS[(m, n)],
                              SurfaceId.S(bipartite_profile(m, n).h))
    if (m - 2) * (n - 2) % 4 == 0:
        return _quad(m, n, True)
    if m == 3:
        base = 4 * ((n - 2) // 4) + 2
        return _double(_quad(3, base, True), "right", n - base, keep_slacker="left")
    if m == 4:
        return _double(_quad(4, n - 1, True), "right", 1)
    if m == 5 and n in (7, 9):
        return _figure(5, n)
    if m == 5 and n == 8:
        return diamond(_kainen(3, 8), _kainen(4, 8), "left")
    if n >= 10:
        return diamond(_kainen(m, n - 4), _quad(m, 6, True), "right")
    if m == 7:
        return diamond(_quad(6, n, True), _kainen(3, n), "left")
    if m == 8:
        return transpose(diamond(_quad(6, 8, True), _kainen(5, 8), "left"))
    return diamond(_quad(6, 9, True), _kainen(5, 9), "left")


@_memoized
def _kainen_non(m: int, n: int) -> Drawing:
    """Nonorientable drawing of K_{m,n}, both sides odd, with one crossing in N_h'(m,n)."""
    if m > n:
        return transpose(_kainen_non(n, m))
    if m == 3:
        return _double(_quad(3, n - 1, n == 3), "right", 1, keep_slacker="left")
    return diamond(_kainen_non(3, n), _quad(m - 1, n, False), "left")


@_memoized
def _four(m: int, n: int) -> Drawing:
    """Orientable drawing with four crossings in S_{H-1}, for (m-2)(n-2) divisible by 4."""
    if m % 4 == 0 and n % 4 == 0:
        if m > n:
            return transpose(_four(n, m))
        return diamond(transpose(_kainen(3, m)), _kainen(m, n - 1), "right")
    if 6 not in (m, n) and m % 4 != 2:
        return transpose(_four(n, m))
    if m != 6 and n == 6:
        return transpose(_four(n, m))
    # m is 6, or m is 2 mod 4 and at least 10
    if m == 6:
        if n == 4:
            return _double(_quad(4, 4, True), "left", 2)
        if n == 5:
            return _figure(6, 5)
        return diamond(_figure(6, 5), _quad(6, n - 3, True), "right")
    d = _double(_quad(m - 4, 3, True), "left", 4, keep_slacker="right")
    return d if n == 3 else diamond(d, _quad(m, n - 1, True), "right")


@_memoized
def _two(m: int, n: int) -> Drawing:
    """Nonorientable drawing with two crossings in N_{H'-1}, one side even."""
    if m > n:
        return transpose(_two(n, m))
    if m == 3:
        return _double(_quad(3, n - 2, n == 4), "right", 2, keep_slacker="left")
    if m % 2 == 0 and n % 2 == 0:
        return diamond(_two(3, n), _quad(m - 1, n, False), "left")
    if m % 2 == 0:
        return diamond(_kainen_non(3, n), _kainen_non(m - 1, n), "left")
    return transpose(diamond(_kainen_non(3, m), _kainen_non(n - 1, m), "left"))


def bipartite_target(m: int, n: int, orientable: bool = True, genus_offset: int = 0) -> tuple[SurfaceId, int]:
    """Surface and crossing count of the construction; raises for the exceptional cases."""
    if min(m, n) < 3:
        raise UnsupportedError("both sides must have at least 3 vertices")
    if genus_offset not in (0, -1):
        raise UnsupportedError("genus offset must be 0 or -1")
    p = bipartite_profile(m, n)
    q = (m - 2) * (n - 2)
    if orientable:
        if genus_offset == -1 and q % 4 == 0:
            if {m, n} == {3, 6}:
                raise ExceptionalCase("K3,6 needs 6 crossings in the plane, not 4", 6, SurfaceId.S(0))
            return SurfaceId.S(p.H - 1), 4
        if (m, n) in BIPARTITE_EXCEPTIONS:
            v = BIPARTITE_EXCEPTIONS[(m, n)]
            where = SurfaceId.S(p.h)
            hint = (" (the missing edge of a quadrangular K5,5-K2 can be routed across two edges"
                    " at a right vertex; see k55_two_crossing_drawing)" if {m, n} == {5} else "")
            raise ExceptionalCase(f"K{m},{n} needs {v} crossings in {where}, not {p.t}{hint}", v, where)
        return SurfaceId.S(p.h), p.t
    if genus_offset == -1 and q % 2 == 0:
        return SurfaceId.N(p.Hprime - 1), 2
    return SurfaceId.N(p.hprime), p.tprime


def construct_bipartite(m: int, n: int, orientable: bool = True, genus_offset: int = 0,
                        time_budget: float | None = DEFAULT_BUDGET, max_side: int = MAX_SIDE) -> Drawing:
    """A verified Kainen drawing of K_{m,n} built from quadrangular bases.

    With ``genus_offset=-1`` the surface is one genus lower than the genus of
    K_{m,n} and the drawing has four crossings (two without orientability);
    where that surface coincides with the usual one the usual drawing is
    returned.
    """
    global _budget
    if max(m, n) > max_side:
        raise UnsupportedError(f"sides above {max_side} are outside the supported range")
    s, c = bipartite_target(m, n, orientable, genus_offset)
    q = (m - 2) * (n - 2)
    _budget = time_budget
    low = genus_offset == -1
    try:
        if orientable:
            d = _four(m, n) if low and q % 4 == 0 else _kainen(m, n)
        elif low and q % 2 == 0:
            d = _two(m, n)
        elif m % 2 and n % 2:
            d = _kainen_non(m, n)
        else:
            d = _quad(m, n, False)
    finally:
        _budget = DEFAULT_BUDGET
    return _require(d, Graph.complete_bipartite(m, n), s, c, f"K{m},{n} construction")


def k55_two_crossing_drawing(time_budget: float | None = DEFAULT_BUDGET) -> Drawing:
    """K5,5 in S2 with two crossings: one edge routed across two edges at a common vertex.

    The inserted edge crosses twice, so this is not a Kainen drawing.
    """
    from itertools import combinations, permutations

    from .drawings import DrawingError
    from .search import SearchSpec, search_embeddings

    g = Graph.complete_bipartite(5, 5)
    sub = g.without_edges([("a", 0)])
    s = SurfaceId.S(2)
    fc = {4: len(sub.edges) // 2}
    spec = SearchSpec(sub, s, face_counts=fc, time_budget=time_budget)
    base = _searched(f"quad K5,5-(a,0) {s}", sub, s, 0, lambda: search_embeddings(spec), fc)
    d = Drawing(base.base, (), g)
    for r in range(1, 5):
        for x, y in combinations("bcde", 2):
            for route in permutations([(x, r), (y, r)]):
                try:
                    out = insert_with_route(d, "a", 0, route)
                except (DrawingError, EmbeddingError):
                    continue
                if verify_drawing(out, g, s, 2, max_responsibility=2).ok:
                    return out
    raise CatalogError("no two-crossing route for the missing edge of K5,5")
