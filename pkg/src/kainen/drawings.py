"""Drawings with crossings, stored as embeddings of planarized graphs.

Every crossing is an auxiliary degree-4 vertex (:class:`Cross`).  Surgery is
done on face lists: subdividing the crossed edge and adding chords through
the two faces on either side keeps every face a disk, so the Euler
characteristic of the base surface never changes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .surfaces import (
    Cross,
    Embedding,
    EmbeddingError,
    Graph,
    RotationSystem,
    SurfaceId,
    edge,
    face_key,
    format_rotation_text,
    from_faces,
    kainen_lower_bound,
    parse_pairs,
    parse_rotation_text,
    sort_edges,
    trace_faces,
)


class DrawingError(EmbeddingError):
    """Invalid insertion or malformed drawing."""


@dataclass(frozen=True)
class CrossingRecord:
    inserted: tuple
    crossed: tuple

    def __post_init__(self):
        object.__setattr__(self, "inserted", edge(*self.inserted))
        object.__setattr__(self, "crossed", edge(*self.crossed))

    def __str__(self):
        (u, v), (x, y) = self.inserted, self.crossed
        return f"({u},{v}) over ({x},{y})"


@dataclass(frozen=True, eq=False)
class Drawing:
    """A planarized embedding, its ordered crossing ledger and the graph it draws."""

    base: Embedding
    ledger: tuple = ()
    original_graph: Graph | None = None

    def __post_init__(self):
        object.__setattr__(self, "ledger", tuple(self.ledger))
        if self.original_graph is None:
            object.__setattr__(self, "original_graph", unplanarize(self.base))

    @classmethod
    def from_embedding(cls, emb: Embedding, original_graph: Graph | None = None) -> "Drawing":
        g = emb.graph if original_graph is None else original_graph
        if original_graph is not None and not emb.graph.edges <= g.edges:
            raise DrawingError("embedded graph is not a subgraph of the original graph")
        return cls(emb, (), g)

    @property
    def crossings(self) -> int:
        return sum(1 for v in self.base.graph.vertices if isinstance(v, Cross))

    @property
    def surface(self) -> SurfaceId:
        return self.base.surface

    @property
    def drawn_edges(self) -> frozenset:
        return unplanarize(self.base).edges

    def missing_edges(self) -> list:
        return sort_edges(self.original_graph.edges - self.drawn_edges)

    def __eq__(self, other):
        if not isinstance(other, Drawing):
            return NotImplemented
        return (self.base == other.base and self.ledger == other.ledger
                and self.original_graph == other.original_graph)

    def __hash__(self):
        return hash((self.base, self.ledger))

    def __repr__(self):
        return f"Drawing({self.base.surface}, crossings={self.crossings}, ledger={len(self.ledger)})"


def _next_cross(emb: Embedding) -> int:
    idx = [v.index for v in emb.graph.vertices if isinstance(v, Cross)]
    return max(idx, default=-1) + 1


def unplanarize(emb: Embedding) -> Graph:
    """Original graph obtained by walking straight through every crossing vertex."""
    rs = emb.rotation_system
    vs = [v for v in rs.rotation if not isinstance(v, Cross)]
    es = set()
    for v in vs:
        for w in rs.rotation[v]:
            prev, cur = v, w
            steps = 0
            while isinstance(cur, Cross):
                r = rs.rotation[cur]
                if len(r) != 4:
                    raise DrawingError(f"crossing vertex {cur} has degree {len(r)}")
                nxt = r[(rs.position(cur, prev) + 2) % 4]
                prev, cur = cur, nxt
                steps += 1
                if steps > len(rs.rotation):
                    raise DrawingError("edge path through crossings does not terminate")
            if cur == v:
                raise DrawingError(f"edge path from {v!r} returns to itself")
            es.add(edge(v, cur))
    return Graph(frozenset(vs), frozenset(es))


def edge_paths(emb: Embedding) -> dict:
    """Map each original edge to the crossing vertices met along its drawn path."""
    rs = emb.rotation_system
    out = {}
    for v in rs.rotation:
        if isinstance(v, Cross):
            continue
        for w in rs.rotation[v]:
            path = []
            prev, cur = v, w
            while isinstance(cur, Cross):
                path.append(cur)
                r = rs.rotation[cur]
                prev, cur = cur, r[(rs.position(cur, prev) + 2) % 4]
            e = edge(v, cur)
            if e not in out:
                out[e] = tuple(path) if (v, cur) == e else tuple(reversed(path))
    return out


def responsibility(d: Drawing, e) -> int:
    """Number of crossings on the original edge ``e`` (as inserted or as crossed edge)."""
    e = edge(*e)
    if e not in d.original_graph.edges:
        raise DrawingError(f"{e!r} is not an edge of the original graph")
    return sum((rec.inserted == e) + (rec.crossed == e) for rec in d.ledger)


def _responsibilities(d: Drawing) -> dict:
    r = {}
    for rec in d.ledger:
        r[rec.inserted] = r.get(rec.inserted, 0) + 1
        r[rec.crossed] = r.get(rec.crossed, 0) + 1
    return r


def slackers(d: Drawing, side: str | None = None) -> set:
    """Original vertices none of whose edges are involved in a crossing."""
    busy = set()
    for e in _responsibilities(d):
        busy.update(e)
    g = d.original_graph
    pool = g.vertices
    if side is not None:
        if g.bipartition is None:
            raise DrawingError("side selection needs a bipartite original graph")
        if side not in ("left", "right"):
            raise DrawingError("side must be 'left' or 'right'")
        pool = g.bipartition[0] if side == "left" else g.bipartition[1]
    return {v for v in pool if v not in busy}


# ---------------------------------------------------------------------------
# Face-list surgery


@dataclass(frozen=True)
class _Tok:
    """Placeholder for a subdivision vertex on one side of an edge."""

    step: int
    side: int


def _subdivide(faces: list, x, y, step: int) -> list:
    out = []
    side = 0
    for f in faces:
        k = len(f)
        g = []
        for j in range(k):
            a, b = f[j], f[(j + 1) % k]
            g.append(a)
            if {a, b} == {x, y}:
                g.append(_Tok(step, side))
                side += 1
        out.append(g)
    if side != 2:
        raise DrawingError(f"edge ({x},{y}) is not on exactly two face sides")
    return out


def _chords(faces: list, a, b) -> list:
    """All ways to split a face by a chord joining a corner at ``a`` and a corner at ``b``."""
    out = []
    for i, f in enumerate(faces):
        if b not in f or a not in f:
            continue
        k = len(f)
        for ja, jb in ((i1, i2) for i1 in range(k) if f[i1] == a for i2 in range(k) if f[i2] == b):
            f1 = [f[(ja + t) % k] for t in range((jb - ja) % k + 1)]
            f2 = [f[(jb + t) % k] for t in range((ja - jb) % k + 1)]
            if len(f1) < 3 or len(f2) < 3:
                continue
            out.append(faces[:i] + [f1, f2] + faces[i + 1:])
    return out


def route_faces(faces, u, v, crossed: list, first_index: int = 0):
    """Yield face lists realizing ``u-v`` drawn through the listed edges in order.

    Each crossed edge gets one subdivision vertex ``Cross(first_index + i)``.
    Candidates are yielded in a fixed order.
    """
    work = [list(f) for f in faces]
    for i, (x, y) in enumerate(crossed):
        work = _subdivide(work, x, y, i)

    def rec(fs, cur, i):
        if i == len(crossed):
            yield from _chords(fs, cur, v)
            return
        for side in (0, 1):
            for nxt in _chords(fs, cur, _Tok(i, side)):
                yield from rec(nxt, _Tok(i, 1 - side), i + 1)

    names = {_Tok(i, s): Cross(first_index + i) for i in range(len(crossed)) for s in (0, 1)}
    for fs in rec(work, u, 0):
        yield [tuple(names.get(x, x) for x in f) for f in fs]


def _realize(base: Embedding, u, v, crossed: list) -> Embedding:
    first = _next_cross(base)
    for fs in route_faces(base.faces, u, v, crossed, first):
        try:
            return from_faces(fs)
        except EmbeddingError:
            continue
    raise DrawingError(f"cannot route ({u},{v}) across {crossed}")


def _check_new_edge(d: Drawing, u, v):
    if u == v:
        raise DrawingError("edge endpoints must differ")
    if u not in d.original_graph.vertices or v not in d.original_graph.vertices:
        raise DrawingError(f"({u},{v}) has an endpoint outside the graph")
    if edge(u, v) in d.drawn_edges:
        raise DrawingError(f"edge ({u},{v}) is already drawn")


def insertion_sites(d: Drawing, u, v) -> list:
    """Original, crossing-free edges across which ``u-v`` can be drawn with one crossing."""
    _check_new_edge(d, u, v)
    base = d.base
    resp = _responsibilities(d)
    orig = d.original_graph.edges
    sides = {}
    members = [set(f) for f in base.faces]
    for i, _, (a, b) in base.face_sides():
        sides.setdefault(edge(a, b), []).append(i)
    out = []
    for e in sort_edges(sides):
        x, y = e
        if e not in orig or resp.get(e, 0) or isinstance(x, Cross) or isinstance(y, Cross):
            continue
        if x in (u, v) or y in (u, v):
            continue
        i1, i2 = sides[e]
        m1, m2 = members[i1], members[i2]
        if (u in m1 and v in m2) or (v in m1 and u in m2):
            out.append(e)
    return out


def insert_with_crossing(d: Drawing, u, v, crossed) -> Drawing:
    """Draw ``u-v`` across ``crossed``; the crossed edge must have responsibility 0."""
    crossed = edge(*crossed)
    if crossed not in insertion_sites(d, u, v):
        raise DrawingError(f"({u},{v}) cannot be drawn across {crossed} with one crossing")
    base = _realize(d.base, u, v, [crossed])
    return Drawing(base, d.ledger + (CrossingRecord((u, v), crossed),), d.original_graph)


def insert_with_route(d: Drawing, u, v, crossed_edges) -> Drawing:
    """Draw ``u-v`` through several original crossing-free edges in order.

    Used only where one edge is allowed to cross more than once, so the
    result is not a Kainen drawing in general.
    """
    _check_new_edge(d, u, v)
    crossed = [edge(*e) for e in crossed_edges]
    resp = _responsibilities(d)
    for e in crossed:
        if e not in d.original_graph.edges or resp.get(e, 0) or e not in d.drawn_edges:
            raise DrawingError(f"{e} is not a crossing-free original edge")
        if u in e or v in e:
            raise DrawingError(f"{e} shares an endpoint with ({u},{v})")
    if len(set(crossed)) != len(crossed):
        raise DrawingError("an edge may be crossed only once")
    base = _realize(d.base, u, v, crossed)
    recs = tuple(CrossingRecord((u, v), e) for e in crossed)
    return Drawing(base, d.ledger + recs, d.original_graph)


def add_edge_in_face(d: Drawing, u, v) -> Drawing:
    """Draw ``u-v`` through a face containing both ends, without crossings."""
    _check_new_edge(d, u, v)
    for fs in _chords([list(f) for f in d.base.faces], u, v):
        try:
            return Drawing(from_faces(fs), d.ledger, d.original_graph)
        except EmbeddingError:
            continue
    raise DrawingError(f"no face contains both {u!r} and {v!r}")


def remove_last_insertion(d: Drawing) -> Drawing:
    """Undo the final inserted edge (all its ledger records), restoring the preceding drawing."""
    if not d.ledger:
        raise DrawingError("ledger is empty")
    ins = d.ledger[-1].inserted
    k = len(d.ledger)
    while k > 0 and d.ledger[k - 1].inserted == ins:
        k -= 1
    path = edge_paths(d.base).get(ins)
    if not path or len(path) != len(d.ledger) - k:
        raise DrawingError("final ledger records do not match the drawn crossings")
    rs = d.base.rotation_system
    chain = [ins[0], *path, ins[1]]
    rot = {w: list(r) for w, r in rs.rotation.items() if w not in path}
    tw = {e for e in rs.twisted if not (set(e) & set(path))}
    for i, z in enumerate(path):
        nz = rs.rotation[z]
        p, q = [w for w in nz if w not in (chain[i], chain[i + 2])]
        if isinstance(p, Cross) or isinstance(q, Cross):
            raise DrawingError("crossed edge is itself subdivided")
        rot[p] = [q if w == z else w for w in rot[p]]
        rot[q] = [p if w == z else w for w in rot[q]]
        if rs.signature(p, z) * rs.signature(z, q) < 0:
            tw.add(edge(p, q))
    for end in ins:
        rot[end] = [w for w in rot[end] if w not in path]
    emb = trace_faces(RotationSystem(rot, tw))
    return Drawing(emb, d.ledger[:k], d.original_graph)


# ---------------------------------------------------------------------------
# Verification


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def failures(self) -> list:
        return [(n, d) for n, ok, d in self.checks if not ok]

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in self.checks]

    def __str__(self):
        return "\n".join(self.lines())


def _graph_diff(a: Graph, b: Graph) -> str:
    extra = sort_edges(a.edges - b.edges)
    miss = sort_edges(b.edges - a.edges)
    parts = []
    if a.vertices != b.vertices:
        parts.append(f"vertex sets differ ({len(a.vertices)} vs {len(b.vertices)})")
    if miss:
        parts.append(f"missing edges {miss[:6]}{' ...' if len(miss) > 6 else ''}")
    if extra:
        parts.append(f"unexpected edges {extra[:6]}{' ...' if len(extra) > 6 else ''}")
    return "; ".join(parts)


def verify_drawing(d: Drawing, target: Graph, s: SurfaceId, expected_crossings: int | None = None,
                   strict: bool = False, max_responsibility: int = 1) -> VerificationReport:
    """Check a drawing from its rotation system alone, independently of how it was built."""
    rep = VerificationReport()
    try:
        emb = trace_faces(d.base.rotation_system)
        consistent = sorted(map(len, emb.faces)) == sorted(map(len, d.base.faces))
        rep.add("base embedding", consistent, f"{emb.surface}, V={len(emb.graph.vertices)}, "
                f"E={len(emb.graph.edges)}, F={len(emb.faces)}")
        drawn = unplanarize(emb)
    except EmbeddingError as exc:
        rep.add("base embedding", False, str(exc))
        return rep
    diff = _graph_diff(drawn, target)
    rep.add("graph identity", not diff, diff or f"|V|={len(target.vertices)}, |E|={len(target.edges)}")
    rep.add("surface", emb.surface == s, f"drawn in {emb.surface}, expected {s}")
    ncross = sum(1 for v in emb.graph.vertices if isinstance(v, Cross))
    if expected_crossings is None:
        try:
            expected_crossings = kainen_lower_bound(target, s)
            label = "Kainen bound"
        except EmbeddingError as exc:
            rep.add("crossing count", False, str(exc))
            expected_crossings = None
            label = ""
    else:
        label = "expected"
    if expected_crossings is not None:
        rep.add("crossing count", ncross == expected_crossings, f"{ncross} crossings, {label} {expected_crossings}")
    paths = edge_paths(emb)
    resp = {e: len(p) for e, p in paths.items()}
    # every crossing vertex is shared by exactly two edge paths
    by_cross = {}
    for e, p in paths.items():
        for z in p:
            by_cross.setdefault(z, []).append(e)
    bad_cross = [z for z, es in by_cross.items() if len(es) != 2]
    rep.add("crossing structure", not bad_cross and len(by_cross) == ncross,
            f"{len(by_cross)} crossing vertices, each on two edges" if not bad_cross
            else f"malformed crossings {bad_cross[:4]}")
    worst = max(resp.values(), default=0)
    over = sort_edges(e for e, r in resp.items() if r > max_responsibility)
    rep.add("responsibility", not over, f"max {worst}" + (f"; over limit: {over[:6]}" if over else ""))
    if strict:
        rep.add("ledger replay", *_replay(d))
    return rep


def verify_kainen(d: Drawing, target: Graph, s: SurfaceId, strict: bool = False) -> VerificationReport:
    """Report whether ``d`` is a Kainen drawing of ``target`` in ``s``."""
    return verify_drawing(d, target, s, None, strict)


def strip_crossings(d: Drawing) -> Drawing:
    """Remove every crossing: delete inserted edges and heal the crossed ones."""
    cur = d
    while cur.ledger:
        cur = remove_last_insertion(cur)
    return cur


def _replay(d: Drawing) -> tuple[bool, str]:
    recs = d.ledger
    if len(recs) != d.crossings:
        return False, f"ledger has {len(recs)} records for {d.crossings} crossings"
    try:
        groups = []
        for rec in recs:
            if groups and groups[-1][0] == rec.inserted:
                groups[-1][1].append(rec.crossed)
            else:
                groups.append((rec.inserted, [rec.crossed]))
        cur = strip_crossings(d)
        for (u, v), cs in groups:
            if len(cs) == 1:
                cur = insert_with_crossing(cur, u, v, cs[0])
            else:
                cur = insert_with_route(cur, u, v, cs)
    except EmbeddingError as exc:
        return False, f"replay failed: {exc}"
    same = sorted(map(len, cur.base.faces)) == sorted(map(len, d.base.faces)) and cur.drawn_edges == d.drawn_edges
    return same, f"{len(groups)} insertions replayed in ledger order"


# ---------------------------------------------------------------------------
# Completion search


def complete_kainen(d: Drawing, edges=None, first_only: bool = True):
    """Insert the missing edges one crossing each, trying every order and site.

    Returns the first completed drawing (or all of them if ``first_only`` is
    false); ``None`` if no completion exists.
    """
    todo = sort_edges(edges if edges is not None else d.missing_edges())
    found = []
    seen = set()

    def rec(cur, remaining):
        if not remaining:
            found.append(cur)
            return first_only
        key = (frozenset(remaining), frozenset(f for f in map(_fkey, cur.base.faces)))
        if key in seen:
            return False
        seen.add(key)
        for i, (u, v) in enumerate(remaining):
            for site in insertion_sites(cur, u, v):
                nxt = insert_with_crossing(cur, u, v, site)
                if rec(nxt, remaining[:i] + remaining[i + 1:]):
                    return True
        return False

    rec(d, todo)
    if first_only:
        return found[0] if found else None
    return found


def _fkey(f):
    return face_key(f)


def completion_possible(emb: Embedding, missing) -> bool:
    return complete_kainen(Drawing.from_embedding(emb, emb.graph.with_edges(missing)), missing) is not None


# ---------------------------------------------------------------------------
# Text format


def format_drawing(d: Drawing) -> str:
    text = format_rotation_text(d.base.rotation_system)
    extra = sort_edges(d.original_graph.edges - d.drawn_edges)
    if extra:
        text += "missing: " + " ".join(f"({a},{b})" for a, b in extra) + "\n"
    text += "crossings:\n"
    for rec in d.ledger:
        text += str(rec) + "\n"
    return text


_CROSS_LINE = re.compile(r"^\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)\s+over\s+\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)$")


def parse_drawing(text: str, original_graph: Graph | None = None) -> Drawing:
    """Parse a rotation file with an optional ``crossings:`` section.

    Crossing vertices are written ``*<k>``.
    """
    rot_lines, cross_lines, missing = [], [], []
    section = "rot"
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("crossings:"):
            section = "cross"
            rest = line[len("crossings:"):].strip()
            if rest:
                cross_lines.append(rest)
            continue
        if line.startswith("missing:"):
            missing.extend(parse_pairs(line[len("missing:"):]))
            continue
        if section == "cross":
            if line:
                cross_lines.append(line)
        else:
            rot_lines.append(raw)
    rs = parse_rotation_text("\n".join(rot_lines))
    emb = trace_faces(rs)
    recs = []
    for line in cross_lines:
        m = _CROSS_LINE.match(line)
        if not m:
            raise DrawingError(f"bad crossing line {line!r}")
        (a, b), (x, y) = parse_pairs(f"({m.group(1)},{m.group(2)}) ({m.group(3)},{m.group(4)})")
        recs.append(CrossingRecord((a, b), (x, y)))
    g = unplanarize(emb)
    if missing:
        g = g.with_edges(missing)
    if original_graph is not None:
        g = original_graph
    return Drawing(emb, tuple(recs), g)
