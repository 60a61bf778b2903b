"""Exhaustive and witness-seeking searches over face-constrained embeddings.

Work is split into ordered *units* (missing-edge set, surface, face-length
multiset, anchor rotation).  Units are independent, so they may run in worker
processes; results are always merged in unit order, which makes outcomes and
statistics independent of the number of workers.  The first witness reported
is the one from the lowest-numbered unit.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterator

import networkx as nx

from .drawings import Drawing, complete_kainen, slackers, verify_drawing
from .engine import BudgetExceeded, EngineStats, FaceEngine, anchor_rotations, choose_anchor
from .surfaces import (
    Embedding,
    EmbeddingError,
    Graph,
    SurfaceId,
    euler_edge_bound,
    from_faces,
    girth,
    kainen_lower_bound,
    minimal_triangulation_order,
    sort_edges,
    sort_vertices,
)

FOUND = "found"
NONE = "exhausted-none"
BUDGET = "budget-exceeded"
INCONCLUSIVE = "inconclusive"


class SearchError(ValueError):
    """Ill-posed search request."""


@dataclass
class SearchSpec:
    """What to search for.

    ``face_counts`` fixes the exact multiset of face lengths; when omitted,
    every multiset compatible with the Euler count and the girth is tried.
    """

    graph: Graph
    surface: SurfaceId
    face_counts: dict | None = None
    remove_edges: int = 0
    completion: str = "none"
    symmetry: bool = True
    node_budget: int | None = None
    time_budget: float | None = None
    threads: int = 1
    checkpoint: str | None = None

    def __post_init__(self):
        if self.completion not in ("none", "kainen"):
            raise SearchError("completion must be 'none' or 'kainen'")
        if self.remove_edges < 0:
            raise SearchError("remove_edges must be nonnegative")


@dataclass
class SearchOutcome:
    status: str
    witness: object = None
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0
    detail: str = ""

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def report(self) -> str:
        s = self.stats
        lines = [f"status: {self.status}",
                 f"nodes: {s.get('nodes', 0)}", f"prunes: {s.get('prunes', 0)}",
                 f"leaves: {s.get('leaves', 0)}", f"units: {s.get('units', 0)}",
                 f"elapsed: {self.elapsed:.2f}s"]
        if self.detail:
            lines.append(f"detail: {self.detail}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Face-length multisets


def face_multisets(n_edges: int, n_faces: int, min_len: int, max_len: int | None = None) -> list[dict]:
    """All multisets of ``n_faces`` lengths >= ``min_len`` summing to ``2 * n_edges``."""
    total = 2 * n_edges
    excess = total - min_len * n_faces
    if n_faces <= 0 or excess < 0:
        return []
    out = []

    def rec(k, remaining, cap, acc):
        # distribute `remaining` extra length over at most k faces, nonincreasing
        if remaining == 0:
            counts = {}
            for x in acc:
                counts[min_len + x] = counts.get(min_len + x, 0) + 1
            counts[min_len] = counts.get(min_len, 0) + (n_faces - len(acc))
            out.append({L: c for L, c in sorted(counts.items()) if c})
            return
        if k == 0:
            return
        for x in range(min(cap, remaining), 0, -1):
            if max_len is not None and min_len + x > max_len:
                continue
            rec(k - 1, remaining - x, x, acc + [x])

    rec(n_faces, excess, excess, [])
    out.sort(key=lambda d: sorted(d.items()))
    return out


def euler_face_count(g: Graph, s: SurfaceId) -> int:
    return s.euler_characteristic - len(g.vertices) + len(g.edges)


def default_face_counts(g: Graph, s: SurfaceId) -> list[dict]:
    f = euler_face_count(g, s)
    try:
        ell = girth(g)
    except EmbeddingError:
        return []
    return face_multisets(len(g.edges), f, ell)


# ---------------------------------------------------------------------------
# Missing-edge sets up to symmetry


def _marked(g: Graph, es) -> nx.Graph:
    h = nx.Graph()
    for v in g.vertices:
        side = 0
        if g.bipartition is not None:
            side = 0 if v in g.bipartition[0] else 1
        h.add_node(v, side=side)
    h.add_edges_from(es)
    return h


def missing_edge_sets(g: Graph, r: int) -> list[list]:
    """Representatives of the ``r``-edge subsets of ``g`` up to isomorphism.

    Exact for complete and complete bipartite graphs (whose automorphisms are
    all vertex permutations preserving the sides); for other graphs the
    classes are those of the marked subgraph and may merge inequivalent sets.
    """
    if r == 0:
        return [[]]
    if r > len(g.edges):
        return []
    complete_like = _is_complete_like(g)
    if not complete_like:
        return [list(c) for c in combinations(sort_edges(g.edges), r)]
    nm = nx.algorithms.isomorphism.categorical_node_match("side", 0)
    level = [[]]
    for _ in range(r):
        buckets: dict = {}
        nxt = []
        for base in level:
            used = set(base)
            for e in sort_edges(g.edges):
                if e in used:
                    continue
                cand = sort_edges(base + [e])
                h = _marked(g, cand)
                key = nx.weisfeiler_lehman_graph_hash(h, node_attr="side")
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(h, o, node_match=nm) for o in bucket):
                    continue
                bucket.append(h)
                nxt.append(cand)
        level = nxt
    level.sort(key=lambda es: (_shape_key(es), es and [tuple(map(str, e)) for e in es]))
    return level


def _shape_key(es):
    degs: dict = {}
    for u, v in es:
        degs[u] = degs.get(u, 0) + 1
        degs[v] = degs.get(v, 0) + 1
    return (len(degs), sorted(degs.values()))


def _is_complete_like(g: Graph) -> bool:
    n = len(g.vertices)
    if g.bipartition is None:
        return len(g.edges) == n * (n - 1) // 2
    a, b = g.bipartition
    return len(g.edges) == len(a) * len(b)


# ---------------------------------------------------------------------------
# Units and workers


@dataclass(frozen=True)
class Unit:
    graph: Graph
    surface: SurfaceId
    face_counts: tuple
    anchor: object
    rotation: tuple
    missing: tuple
    completion: str
    slacker: str | None = None

    def describe(self) -> str:
        return (f"missing={list(self.missing)} surface={self.surface} faces={dict(self.face_counts)} "
                f"anchor={self.anchor} rotation={list(self.rotation)}")


def _anchor_units(g: Graph, s: SurfaceId, fc: dict, missing, completion: str, symmetry: bool,
                  slacker: str | None = None) -> list[Unit]:
    v0 = choose_anchor(g)
    if symmetry:
        rots = anchor_rotations(g, v0)
    else:
        nb = sort_vertices(g.neighbors(v0))
        rots = [(nb[0],) + p for p in permutations(nb[1:])]
    fct = tuple(sorted(fc.items()))
    return [Unit(g, s, fct, v0, tuple(r), tuple(missing), completion, slacker) for r in rots]


def run_unit(unit: Unit, node_cap: int | None = None, deadline: float | None = None,
             want: str = "first") -> dict:
    """Run one unit; return status, statistics and witness faces (if any)."""
    g, s = unit.graph, unit.surface
    oriented = s.orientable
    eng = FaceEngine(g, dict(unit.face_counts), oriented)
    i0 = eng.index[unit.anchor]
    rot = [eng.index[x] for x in unit.rotation]
    witnesses = []
    status = NONE
    accepted = 0
    target = g.with_edges(unit.missing) if unit.missing else g
    try:
        for _ in eng.seed_rotation(i0, rot):
            for faces in eng.run(node_cap, deadline):
                emb = from_faces(faces)
                if emb.surface != s:
                    continue
                accepted += 1
                if unit.completion == "kainen":
                    start = Drawing.from_embedding(emb, target)
                    if unit.slacker is None:
                        d = complete_kainen(start, list(unit.missing))
                    else:
                        d = next((x for x in complete_kainen(start, list(unit.missing), first_only=False)
                                  if slackers(x, unit.slacker)), None)
                    if d is None:
                        continue
                    witnesses.append(d)
                else:
                    witnesses.append(emb)
                if want == "first":
                    status = FOUND
                    raise StopIteration
    except StopIteration:
        pass
    except BudgetExceeded:
        status = BUDGET
    if want == "all" and witnesses and status != BUDGET:
        status = FOUND
    stats = eng.stats.as_dict()
    stats["embeddings"] = accepted
    return {"status": status, "stats": stats, "witnesses": witnesses}


def _worker(args):
    unit, node_cap, deadline, want = args
    return run_unit(unit, node_cap, deadline, want)


def _spec_key(units: list[Unit], extra: str = "") -> str:
    h = hashlib.sha256()
    for u in units:
        h.update(u.describe().encode())
        h.update(str(sorted(map(str, u.graph.edges))).encode())
    h.update(extra.encode())
    return h.hexdigest()[:16]


def load_checkpoint(path: str | None, key: str) -> dict:
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("version") != 1 or data.get("key") != key:
        raise SearchError(f"checkpoint {path} belongs to a different search")
    return {int(k): v for k, v in data.get("done", {}).items()}


def save_checkpoint(path: str | None, key: str, done: dict):
    if not path:
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump({"version": 1, "key": key, "done": {str(k): v for k, v in sorted(done.items())}}, fh, indent=1)
    os.replace(tmp, path)


def run_units(units: list[Unit], node_budget: int | None = None, time_budget: float | None = None,
              threads: int = 1, want: str = "first", checkpoint: str | None = None) -> SearchOutcome:
    """Process units in order and merge results deterministically."""
    t0 = time.monotonic()
    deadline = None if time_budget is None else t0 + time_budget
    key = _spec_key(units, f"{want}")
    done = load_checkpoint(checkpoint, key)
    total = EngineStats()
    witnesses = []
    n_units = 0
    n_emb = 0

    def tasks():
        for i, u in enumerate(units):
            if i in done and done[i]["status"] == NONE:
                continue
            yield i, (u, node_budget, deadline, want)

    pending = list(tasks())
    if threads > 1 and len(pending) > 1:
        ex = ProcessPoolExecutor(max_workers=threads)
        it = ex.map(_worker, [a for _, a in pending], chunksize=1)
    else:
        ex = None
        it = (_worker(a) for _, a in pending)
    idx_iter = iter(i for i, _ in pending)
    status = NONE
    try:
        for i, u in enumerate(units):
            n_units += 1
            if i in done and done[i]["status"] == NONE:
                res = {"status": NONE, "stats": done[i]["stats"], "witnesses": []}
            else:
                j = next(idx_iter)
                assert j == i
                res = next(it)
            st = res["stats"]
            total.add(EngineStats(st["nodes"], st["prunes"], st["leaves"]))
            n_emb += st.get("embeddings", 0)
            if res["status"] == NONE:
                done[i] = {"status": NONE, "stats": st}
                save_checkpoint(checkpoint, key, done)
            if res["status"] == BUDGET or (node_budget is not None and total.nodes > node_budget):
                status = BUDGET
                break
            if res["witnesses"]:
                witnesses.extend(res["witnesses"])
                if want == "first":
                    status = FOUND
                    break
        else:
            status = FOUND if witnesses else NONE
    finally:
        if ex is not None:
            ex.shutdown(wait=True, cancel_futures=True)
    stats = total.as_dict()
    stats["units"] = n_units
    stats["embeddings"] = n_emb
    stats["units_total"] = len(units)
    if status == FOUND and want == "first":
        wit = witnesses[0]
    elif want == "all":
        wit = witnesses
    else:
        wit = None
    return SearchOutcome(status, wit, stats, time.monotonic() - t0)


# ---------------------------------------------------------------------------
# Public operations


def _check_graph(g: Graph):
    if not g.is_connected():
        raise SearchError("graph must be connected")
    if any(g.degree(v) < 2 for v in g.vertices):
        raise SearchError("search requires minimum degree at least 2")


def _units_for(g: Graph, s: SurfaceId, counts: list[dict], missing, completion, symmetry,
               slacker: str | None = None) -> list[Unit]:
    _check_graph(g)
    out = []
    for fc in counts:
        if sum(L * c for L, c in fc.items()) != 2 * len(g.edges):
            raise SearchError(f"face multiset {fc} does not match 2|E| = {2 * len(g.edges)}")
        if sum(fc.values()) != euler_face_count(g, s):
            raise SearchError(f"face multiset {fc} has the wrong number of faces for {s}")
        out.extend(_anchor_units(g, s, fc, missing, completion, symmetry, slacker))
    return out


def enumerate_embeddings(spec: SearchSpec) -> Iterator[Embedding]:
    """Emit every embedding meeting ``spec`` (up to the enabled symmetry), in a fixed order."""
    g, s = spec.graph, spec.surface
    counts = [spec.face_counts] if spec.face_counts else default_face_counts(g, s)
    if not counts:
        return
    for unit in _units_for(g, s, counts, (), "none", spec.symmetry):
        res = run_unit(unit, spec.node_budget, None, want="all")
        if res["status"] == BUDGET:
            raise BudgetExceeded
        yield from res["witnesses"]


def search_embeddings(spec: SearchSpec, want: str = "first") -> SearchOutcome:
    g, s = spec.graph, spec.surface
    counts = [spec.face_counts] if spec.face_counts else default_face_counts(g, s)
    if not counts:
        return SearchOutcome(NONE, detail=f"no face-length multiset fits {s} (Euler count)")
    units = _units_for(g, s, counts, (), "none", spec.symmetry)
    return run_units(units, spec.node_budget, spec.time_budget, spec.threads, want, spec.checkpoint)


def find_drawing(graph: Graph, s: SurfaceId, crossings: int, node_budget=None, time_budget=None,
                 threads: int = 1, checkpoint=None, symmetry: bool = True,
                 face_counts: dict | None = None, missing_sets=None,
                 slacker: str | None = None) -> SearchOutcome:
    """Search for a drawing with ``crossings`` crossings, one per deleted edge.

    Every subgraph ``graph - H`` with ``|H| = crossings`` (up to symmetry) is
    embedded with any admissible face multiset and the edges of ``H`` are then
    inserted with one crossing each.  ``missing_sets`` restricts the sets
    ``H`` tried; ``slacker`` demands a slacker on that side of a bipartite
    graph in the completed drawing.
    """
    units = []
    if missing_sets is None:
        missing_sets = missing_edge_sets(graph, crossings)
    for miss in missing_sets:
        miss = sort_edges(miss)
        if len(miss) != crossings:
            raise SearchError(f"missing set {miss} does not have {crossings} edges")
        sub = graph.without_edges(miss)
        if any(sub.degree(v) < 2 for v in sub.vertices) or not sub.is_connected():
            continue
        counts = [face_counts] if face_counts else default_face_counts(sub, s)
        units.extend(_units_for(sub, s, counts, miss, "kainen", symmetry, slacker))
    if not units:
        return SearchOutcome(NONE, detail="no subgraph fits the Euler count")
    out = run_units(units, node_budget, time_budget, threads, "first", checkpoint)
    if out.found:
        out.witness = Drawing(out.witness.base, out.witness.ledger, graph)
    return out


def find_kainen(graph: Graph, s: SurfaceId, node_budget=None, time_budget=None, threads: int = 1,
                checkpoint=None, symmetry: bool = True) -> SearchOutcome:
    """Search for a Kainen drawing of ``graph`` in ``s``."""
    delta = kainen_lower_bound(graph, s)
    out = find_drawing(graph, s, delta, node_budget, time_budget, threads, checkpoint, symmetry)
    if out.found:
        rep = verify_drawing(out.witness, graph, s)
        if not rep.ok:
            raise SearchError(f"search produced an invalid drawing:\n{rep}")
    out.detail = f"Kainen bound {delta}"
    return out


def surfaces_within(s: SurfaceId) -> list[SurfaceId]:
    """Surfaces into which a cellular embedding can fall when a graph embeds in ``s``."""
    chi = s.euler_characteristic
    out = [s]
    for c in range(chi + 1, 3):
        if (2 - c) % 2 == 0:
            out.append(SurfaceId.S((2 - c) // 2))
        if not s.orientable and c <= 1:
            out.append(SurfaceId.N(2 - c))
    seen, uniq = set(), []
    for x in out:
        if x not in seen:
            seen.add(x)
            uniq.append(x)
    return uniq


def prove_nonexistence(graph: Graph, s: SurfaceId, max_crossings: int, node_budget=None,
                       time_budget=None, threads: int = 1, checkpoint=None) -> SearchOutcome:
    """Exhaustively refute drawings of ``graph`` in ``s`` with at most ``max_crossings`` crossings.

    Deleting one edge per crossing leaves an embedding of ``graph - H`` with
    ``|H| <= max_crossings``.  Each such subgraph is enumerated in every
    surface it could cellularly occupy.  A case closes when it is
    Euler-infeasible, has no embedding at all, or (for one deleted edge)
    admits no one-crossing insertion.  With two or more deleted edges only
    the first two kinds of closure count, because the inserted edges could
    cross each other or share a crossed edge; such a case with surviving
    embeddings makes the verdict ``inconclusive``.
    """
    t0 = time.monotonic()
    simple, multi = [], []
    for r in range(max_crossings + 1):
        for miss in missing_edge_sets(graph, r):
            sub = graph.without_edges(miss)
            if not sub.is_connected() or any(sub.degree(v) < 2 for v in sub.vertices):
                return SearchOutcome(INCONCLUSIVE, elapsed=time.monotonic() - t0,
                                     detail=f"H={miss} leaves a subgraph outside the search model")
            ell = girth(sub)
            for s2 in surfaces_within(s):
                if len(sub.edges) > euler_edge_bound(len(sub.vertices), s2.euler_characteristic, ell):
                    continue
                counts = default_face_counts(sub, s2)
                if counts:
                    bucket = simple if r <= 1 else multi
                    bucket.extend(_units_for(sub, s2, counts, miss, "kainen" if r else "none", True))
    if not simple and not multi:
        return SearchOutcome(NONE, stats={"nodes": 0, "prunes": 0, "leaves": 0, "units": 0, "embeddings": 0},
                             elapsed=time.monotonic() - t0, detail="every case is Euler-infeasible")
    out = run_units(simple + multi, node_budget, time_budget, threads, "first", checkpoint)
    out.elapsed = time.monotonic() - t0
    if out.status == NONE:
        if multi and _multi_embeddings(out, simple, multi, node_budget, threads):
            out.status = INCONCLUSIVE
            out.detail = "subgraphs with several deleted edges embed; restricted completion found nothing"
        else:
            out.detail = f"exhausted {out.stats['units']} units"
    return out


def _multi_embeddings(out, simple, multi, node_budget, threads) -> bool:
    if out.stats.get("embeddings", 0) == 0:
        return False
    res = run_units(multi, node_budget, None, threads, "first")
    return res.stats.get("embeddings", 0) > 0


def conjecture_check(g: int, node_budget=None, time_budget=None, threads: int = 1,
                     checkpoint=None) -> SearchOutcome:
    """Look for a Kainen drawing of K_M(g) in S_g."""
    if g < 0:
        raise SearchError("g must be nonnegative")
    if g == 2:
        raise SearchError("g = 2 is excluded: K_9 has no Kainen drawing in S_2")
    n = minimal_triangulation_order(g)
    out = find_kainen(Graph.complete(n), SurfaceId.S(g), node_budget, time_budget, threads, checkpoint)
    out.detail = f"M({g}) = {n}; " + out.detail
    return out


def find_current_graph(n: int, k: int, vortex_plan=None, orientable: bool = True,
                       node_budget: int | None = None) -> SearchOutcome:
    """First current graph over Z_n with index ``k`` whose derived embedding validates."""
    from .current_graphs import CurrentGraphError, iter_current_graphs

    if k < 1 or n % k:
        raise SearchError(f"index {k} does not divide {n}")
    t0 = time.monotonic()
    try:
        for cg, emb in iter_current_graphs(n, k, vortex_plan, orientable, node_budget=node_budget):
            return SearchOutcome(FOUND, (cg, emb), {"units": 1}, time.monotonic() - t0,
                                 f"{emb.surface}, {len(emb.graph.edges)} edges")
    except BudgetExceeded:
        return SearchOutcome(BUDGET, stats={"nodes": node_budget, "units": 1},
                             elapsed=time.monotonic() - t0, detail="node budget exhausted")
    except CurrentGraphError as exc:
        raise SearchError(str(exc)) from exc
    return SearchOutcome(NONE, stats={"units": 1}, elapsed=time.monotonic() - t0,
                         detail="no current graph of this shape derives")
