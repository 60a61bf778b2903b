"""Embedding surgeries on face lists.

Each operation edits the list of face boundary walks and rebuilds the
embedding with :func:`from_faces`, which re-traces the result, so any
surgery that does not produce a closed surface is rejected rather than
silently accepted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .drawings import (
    CrossingRecord,
    Drawing,
    complete_kainen,
    slackers,
)
from .surfaces import (
    Cross,
    Embedding,
    EmbeddingError,
    Graph,
    edge,
    from_faces,
    letter_name,
    parse_pairs,
    parse_vertex,
    sort_vertices,
)


class TransformError(EmbeddingError):
    """A surgery precondition failed or no valid local completion exists."""


# ---------------------------------------------------------------------------
# Face-list helpers


def _rot(face, i):
    return list(face[i:]) + list(face[:i])


def _side_positions(faces, u, v):
    out = []
    for i, f in enumerate(faces):
        k = len(f)
        for j in range(k):
            if {f[j], f[(j + 1) % k]} == {u, v}:
                out.append((i, j))
    return out


def _outside_path(face, j):
    """Walk of ``face`` from ``face[j+1]`` around to ``face[j]``, avoiding the side at ``j``."""
    k = len(face)
    return [face[(j + 1 + t) % k] for t in range(k)]


def merge_along_edge(faces, u, v) -> list:
    """Delete edge ``u-v``, joining the two faces on its sides."""
    sides = _side_positions(faces, u, v)
    if len(sides) != 2:
        raise TransformError(f"edge ({u},{v}) is not on two face sides")
    (i1, j1), (i2, j2) = sides
    if i1 == i2:
        raise TransformError(f"edge ({u},{v}) has the same face on both sides")
    p1 = _outside_path(faces[i1], j1)
    p2 = _outside_path(faces[i2], j2)
    if p2[0] != p1[-1]:
        p2 = p2[::-1]
    merged = p1[:-1] + p2[:-1]
    rest = [f for i, f in enumerate(faces) if i not in (i1, i2)]
    return rest + [merged]


def delete_vertex(faces, v) -> list:
    """Delete ``v`` and its edges; the faces around it fuse into one."""
    around = [(i, f.index(v)) for i, f in enumerate(faces) if v in f]
    for i, j in around:
        if list(faces[i]).count(v) != 1:
            raise TransformError(f"vertex {v!r} occurs twice on one face")
    if not around:
        raise TransformError(f"{v!r} is not a vertex")
    paths = {}
    for i, j in around:
        f = faces[i]
        k = len(f)
        a, b = f[j - 1], f[(j + 1) % k]
        walk = [f[(j + 1 + t) % k] for t in range(k - 1)]  # b ... a
        paths[i] = (a, b, walk)
    # chain the outside walks around v
    order = [around[0][0]]
    a0, b0, w0 = paths[order[0]]
    chain = list(w0)  # from b0 to a0
    used = {order[0]}
    end = chain[-1]
    while len(used) < len(around):
        for i, (a, b, walk) in paths.items():
            if i in used:
                continue
            if b == end:
                chain.extend(walk[1:])
            elif a == end:
                chain.extend(walk[::-1][1:])
            else:
                continue
            used.add(i)
            end = chain[-1]
            break
        else:
            raise TransformError(f"faces around {v!r} do not form a disk")
    if chain[-1] == chain[0] and len(chain) > 1:
        chain.pop()
    rest = [f for i, f in enumerate(faces) if i not in used]
    return rest + [chain]


def _apply_faces(faces) -> Embedding:
    try:
        return from_faces(faces)
    except EmbeddingError as exc:
        raise TransformError(f"surgery does not yield a closed surface: {exc}") from None


# ---------------------------------------------------------------------------
# Flips


@dataclass(frozen=True)
class FlipStep:
    delete_edge: tuple
    add_edge: tuple

    def __str__(self):
        (u, v), (x, y) = self.delete_edge, self.add_edge
        return f"flip ({u},{v}) -> ({x},{y})"


def flip(e: Embedding, delete, add) -> Embedding:
    """Replace an edge by the other diagonal of the face formed when it is removed."""
    u, v = delete
    x, y = add
    g = e.graph
    if not g.has_edge(u, v):
        raise TransformError(f"edge ({u},{v}) is not present")
    if x == y:
        raise TransformError("apexes coincide")
    if g.has_edge(x, y):
        raise TransformError(f"edge ({x},{y}) is already present")
    merged_faces = merge_along_edge([list(f) for f in e.faces], u, v)
    merged = merged_faces[-1]
    rest = merged_faces[:-1]
    if x not in merged or y not in merged:
        raise TransformError(f"({x},{y}) are not opposite corners of the merged face")
    k = len(merged)
    for ix in [i for i in range(k) if merged[i] == x]:
        for iy in [i for i in range(k) if merged[i] == y]:
            f1 = [merged[(ix + t) % k] for t in range((iy - ix) % k + 1)]
            f2 = [merged[(iy + t) % k] for t in range((ix - iy) % k + 1)]
            if len(f1) < 3 or len(f2) < 3:
                continue
            try:
                return from_faces(rest + [f1, f2])
            except EmbeddingError:
                continue
    raise TransformError(f"({x},{y}) cannot split the merged face")


def flip_sequence(e: Embedding, steps) -> Embedding:
    """Apply flips one after another, each checked against the current embedding."""
    cur = e
    for st in steps:
        if not isinstance(st, FlipStep):
            st = FlipStep(*st)
        cur = flip(cur, st.delete_edge, st.add_edge)
    return cur


def invert_flips(steps) -> list[FlipStep]:
    return [FlipStep(s.add_edge, s.delete_edge) for s in reversed([
        s if isinstance(s, FlipStep) else FlipStep(*s) for s in steps])]


# ---------------------------------------------------------------------------
# Handles


def add_handle(e: Embedding, face_a: int, face_b: int, new_edges, twisted: bool = False) -> Embedding:
    """Attach a tube between two faces and draw ``new_edges`` along it.

    The edges are listed in their cyclic order around the tube; each joins a
    corner of face ``face_a`` to a corner of face ``face_b``.  An untwisted
    tube lowers the Euler characteristic by 2 and keeps orientability.
    """
    faces = [list(f) for f in e.faces]
    if face_a == face_b:
        raise TransformError("a handle needs two distinct faces")
    for i in (face_a, face_b):
        if not 0 <= i < len(faces):
            raise TransformError(f"no face with index {i}")
    new_edges = [tuple(x) for x in new_edges]
    if not new_edges:
        raise TransformError("a handle without edges leaves an annular face (not cellular)")
    A, B = faces[face_a], faces[face_b]
    g = e.graph
    seen = set()
    ends = []
    for u, w in new_edges:
        if u in A and w in B:
            pass
        elif w in A and u in B:
            u, w = w, u
        else:
            raise TransformError(f"edge ({u},{w}) does not join the two faces")
        if u == w or g.has_edge(u, w) or edge(u, w) in seen:
            raise TransformError(f"edge ({u},{w}) would not be simple")
        seen.add(edge(u, w))
        ends.append((u, w))
    if twisted:
        B = B[::-1]
    rest = [f for i, f in enumerate(faces) if i not in (face_a, face_b)]
    k = len(ends)
    # corner choices for vertices that repeat on a face
    for pa in _cyclic_positions(A, [u for u, _ in ends]):
        for pb in _cyclic_positions(B[::-1], [w for _, w in ends]):
            pbr = [len(B) - 1 - p for p in pb]
            new = []
            for i in range(k):
                i2 = (i + 1) % k
                arc_a = _arc(A, pa[i], pa[i2], full=(k == 1))
                arc_b = _arc(B, pbr[i2], pbr[i], full=(k == 1))
                new.append(arc_a + arc_b)
            try:
                out = from_faces(rest + new)
            except EmbeddingError:
                continue
            if out.chi == e.chi - 2:
                return out
    raise TransformError("the listed edges cannot be drawn along one tube in this order")


def _arc(face, i, j, full=False):
    k = len(face)
    n = (j - i) % k
    if n == 0 and full:
        n = k
    return [face[(i + t) % k] for t in range(n + 1)]


def _cyclic_positions(face, verts):
    """Position choices for ``verts`` that appear in cyclic order along ``face``."""
    k = len(face)
    opts = [[i for i in range(k) if face[i] == v] for v in verts]

    def rec(idx, acc):
        if idx == len(verts):
            if _cyclically_ordered(acc, k):
                yield list(acc)
            return
        for p in opts[idx]:
            if p in acc and len(verts) > 1:
                continue
            acc.append(p)
            yield from rec(idx + 1, acc)
            acc.pop()

    yield from rec(0, [])


def _cyclically_ordered(pos, k):
    if len(pos) <= 2:
        return len(set(pos)) == len(pos)
    shifted = [(p - pos[0]) % k for p in pos]
    return all(shifted[i] < shifted[i + 1] for i in range(len(shifted) - 1))


# ---------------------------------------------------------------------------
# Crosscap with a path on three edges


def _corner_p3(g: Graph, corners):
    absent = [(x, y) for x, y in combinations(corners, 2) if not g.has_edge(x, y)]
    if len(absent) != 3:
        raise TransformError(f"corners {corners} must miss exactly three edges among them, found {absent}")
    deg = {}
    for x, y in absent:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
    if sorted(deg.values()) != [1, 1, 2, 2]:
        raise TransformError(f"missing edges {absent} do not form a path on the corners")
    return [edge(x, y) for x, y in absent]


def add_crosscap_p3(e: Embedding, v, corners) -> Embedding:
    """Add the three missing edges among four neighbors of ``v`` through a new crosscap.

    The triangles around ``v`` are removed, leaving a disk bounded by the link
    cycle of ``v``.  The disk is refilled, now with a crosscap inside, by a new
    link for ``v`` that may use the new edges, plus triangles on the leftover
    edge sides.  The first refilling (in a fixed enumeration order) whose
    result is a triangular embedding with Euler characteristic one lower is
    returned.
    """
    if not e.is_triangular:
        raise TransformError("crosscap addition needs a triangular embedding")
    g = e.graph
    corners = tuple(corners)
    if len(set(corners)) != 4:
        raise TransformError("four distinct corners are required")
    for c in corners:
        if c not in g.neighbors(v):
            raise TransformError(f"corner {c!r} is not adjacent to {v!r}")
    chords = _corner_p3(g, corners)
    faces = [list(f) for f in e.faces]
    link = _link_cycle(e, v)
    outside = [f for f in faces if v not in f]
    cyc_edges = [edge(link[i], link[(i + 1) % len(link)]) for i in range(len(link))]
    avail = {x: 1 for x in cyc_edges}
    for c in chords:
        avail[c] = 2
    adj = {}
    for a, b in avail:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    for new_link in _hamiltonian_cycles(link, adj):
        left = dict(avail)
        for i in range(len(new_link)):
            left[edge(new_link[i], new_link[(i + 1) % len(new_link)])] -= 1
        left = {x: c for x, c in left.items() if c}
        for tris in _triangle_covers(left):
            new_faces = outside + [[v, new_link[i], new_link[(i + 1) % len(new_link)]]
                                   for i in range(len(new_link))] + [list(t) for t in tris]
            try:
                out = from_faces(new_faces)
            except EmbeddingError:
                continue
            if out.chi == e.chi - 1 and not out.orientable and out.is_triangular:
                return out
    raise TransformError(f"no crosscap completion at {v!r} with corners {corners}")


def _link_cycle(e: Embedding, v) -> list:
    rs = e.rotation_system
    return list(rs.rotation[v])


def _hamiltonian_cycles(order, adj):
    start = order[0]
    n = len(order)
    path = [start]
    on = {start}
    seen = set()

    def rec():
        last = path[-1]
        if len(path) == n:
            if start in adj[last]:
                key = min(tuple(path), tuple([path[0]] + path[:0:-1]))
                if key not in seen:
                    seen.add(key)
                    yield list(path)
            return
        for w in sorted(adj.get(last, ()), key=order.index):
            if w not in on:
                path.append(w)
                on.add(w)
                yield from rec()
                on.discard(w)
                path.pop()

    yield from rec()


def _triangle_covers(sides: dict):
    """Partitions of the edge-side multiset into triangles."""
    if not sides:
        yield []
        return
    first = min(sides, key=lambda x: (str(x[0]), str(x[1])))
    a, b = first
    nbr = {}
    for x, y in sides:
        nbr.setdefault(x, set()).add(y)
        nbr.setdefault(y, set()).add(x)
    for c in sorted(nbr.get(a, set()) & nbr.get(b, set()), key=str):
        e1, e2 = edge(a, c), edge(b, c)
        rest = dict(sides)
        ok = True
        for x in (first, e1, e2):
            rest[x] = rest.get(x, 0) - 1
            if rest[x] < 0:
                ok = False
        if not ok:
            continue
        rest = {x: k for x, k in rest.items() if k}
        for more in _triangle_covers(rest):
            yield [(a, b, c)] + more


# ---------------------------------------------------------------------------
# Vertex relabeling helpers


def _fresh_names(taken, olds):
    """Map ``olds`` to unused names of the same kind (integers, letters, crossings)."""
    ints = [x for x in taken if isinstance(x, int)]
    nxt_int = max(ints, default=-1) + 1
    crosses = [x.index for x in taken if isinstance(x, Cross)]
    nxt_cross = max(crosses, default=-1) + 1
    used = set(taken)
    out = {}
    li = 0
    for v in sort_vertices(olds):
        if isinstance(v, int):
            out[v] = nxt_int
            nxt_int += 1
        elif isinstance(v, Cross):
            out[v] = Cross(nxt_cross)
            nxt_cross += 1
        else:
            while letter_name(li) in used:
                li += 1
            out[v] = letter_name(li)
            used.add(out[v])
            li += 1
    return out


def relabel_embedding(e: Embedding, mapping) -> Embedding:
    return from_faces([[mapping.get(x, x) for x in f] for f in e.faces])


def relabel_drawing(d: Drawing, mapping) -> Drawing:
    f = lambda x: mapping.get(x, x)
    base = relabel_embedding(d.base, mapping)
    ledger = tuple(CrossingRecord((f(a), f(b)), (f(x), f(y)))
                   for (a, b), (x, y) in ((r.inserted, r.crossed) for r in d.ledger))
    return Drawing(base, ledger, d.original_graph.relabel(mapping))


# ---------------------------------------------------------------------------
# Diamond sums


def named_bipartition(g: Graph) -> Graph:
    """Attach the bipartition given by the naming convention (letters vs integers) when it fits."""
    if g.bipartition is not None:
        return g
    left = frozenset(v for v in g.vertices if isinstance(v, str))
    right = frozenset(v for v in g.vertices if isinstance(v, int))
    if left and right and len(left) + len(right) == len(g.vertices) and all(
            isinstance(a, str) != isinstance(b, str) for a, b in g.edges):
        return Graph(g.vertices, g.edges, (left, right))
    return g


def _as_drawing(x) -> tuple[Drawing, bool]:
    if isinstance(x, Drawing):
        if x.original_graph.bipartition is None:
            return Drawing(x.base, x.ledger, named_bipartition(x.original_graph)), True
        return x, True
    if isinstance(x, Embedding):
        return Drawing.from_embedding(x, named_bipartition(x.graph)), False
    raise TypeError("expected an Embedding or a Drawing")


def _star_faces(faces, v):
    """Faces at ``v`` keyed by the unordered pair of neighbors at the corner."""
    out = {}
    for i, f in enumerate(faces):
        if v not in f:
            continue
        if list(f).count(v) != 1:
            raise TransformError(f"{v!r} occurs twice on a face")
        j = list(f).index(v)
        k = len(f)
        a, b = f[j - 1], f[(j + 1) % k]
        walk = [f[(j + 1 + t) % k] for t in range(k - 1)]  # b ... a
        out[frozenset((a, b))] = (i, a, b, walk)
    return out


def diamond_pairings(e1, v1, e2, v2) -> list[dict]:
    """Every map from the neighbors of ``v1`` to those of ``v2`` matching the rotations cyclically."""
    r1 = list(_as_drawing(e1)[0].base.rotation_system.rotation[v1])
    r2 = list(_as_drawing(e2)[0].base.rotation_system.rotation[v2])
    if len(r1) != len(r2):
        raise TransformError(f"degree mismatch: {len(r1)} vs {len(r2)}")
    d = len(r1)
    out = []
    for rev in (True, False):
        seq = r2[::-1] if rev else r2
        for s in range(d):
            out.append({r1[i]: seq[(i + s) % d] for i in range(d)})
    return out


def diamond_sum(e1, v1, e2, v2, pairing: dict | None = None, relabel: dict | None = None):
    """Excise stars of equal-degree vertices and glue along the boundaries.

    ``pairing`` maps each neighbor of ``v1`` to the neighbor of ``v2`` it is
    identified with; identified vertices keep their names from ``e1``.  Other
    vertices of ``e2`` keep their names unless they clash, in which case they
    are renamed (or renamed by ``relabel``).  When no pairing is given the
    first one (in :func:`diamond_pairings` order) giving a simple graph with
    the right orientability is used.  Drawings must be summed at slackers.
    """
    d1, is_d1 = _as_drawing(e1)
    d2, is_d2 = _as_drawing(e2)
    for d, v in ((d1, v1), (d2, v2)):
        if v not in d.original_graph.vertices:
            raise TransformError(f"{v!r} is not a vertex")
        if v not in slackers(d):
            raise TransformError(f"{v!r} is not a slacker")
    deg1, deg2 = d1.original_graph.degree(v1), d2.original_graph.degree(v2)
    if deg1 != deg2:
        raise TransformError(f"degree mismatch: deg({v1})={deg1}, deg({v2})={deg2}")
    pairings = [pairing] if pairing is not None else diamond_pairings(d1, v1, d2, v2)
    want_orientable = d1.base.orientable and d2.base.orientable
    last_err = None
    for pi in pairings:
        try:
            out = _diamond(d1, v1, d2, v2, pi, relabel)
        except EmbeddingError as exc:
            last_err = exc
            continue
        if out.base.orientable != want_orientable:
            last_err = TransformError("pairing reverses orientation")
            continue
        if out.base.chi != d1.base.chi + d2.base.chi - 2:
            last_err = TransformError("Euler characteristic is not additive")
            continue
        return out if (is_d1 or is_d2) else out.base
    raise TransformError(f"no valid diamond sum: {last_err}")


def _diamond(d1: Drawing, v1, d2: Drawing, v2, pi: dict, relabel: dict | None) -> Drawing:
    n1 = set(d1.original_graph.neighbors(v1))
    n2 = set(d2.original_graph.neighbors(v2))
    if set(pi) != n1 or set(pi.values()) != n2:
        raise TransformError("pairing must biject the neighborhoods")
    inv = {b: a for a, b in pi.items()}
    taken = set(d1.base.graph.vertices)
    others = [x for x in d2.base.graph.vertices if x not in n2 and x != v2]
    if relabel is None:
        clash = [x for x in others if x in taken]
        mapping = _fresh_names(taken | set(others), clash)
    else:
        mapping = dict(relabel)
    mapping.update(inv)
    mapping[v2] = v2
    if any(mapping.get(x, x) in taken for x in others):
        raise TransformError("relabeled vertices of the second embedding clash with the first")
    faces1 = [list(f) for f in d1.base.faces]
    faces2 = [[mapping.get(x, x) for x in f] for f in d2.base.faces]
    s1 = _star_faces(faces1, v1)
    s2 = _star_faces(faces2, v2)
    if set(s1) != set(s2):
        raise TransformError("pairing does not match consecutive neighbors")
    new = []
    for key, (i, a, b, walk) in s1.items():
        _, a2, b2, walk2 = s2[key]
        # walk runs b..a; continue from a back to b through the second face
        w2 = walk2 if walk2[0] == a else walk2[::-1]
        if w2[0] != a or w2[-1] != b:
            raise TransformError("face walks do not join")
        new.append(walk + w2[1:-1])
    used1 = {i for i, *_ in s1.values()}
    used2 = {i for i, *_ in s2.values()}
    faces = ([f for i, f in enumerate(faces1) if i not in used1]
             + [f for i, f in enumerate(faces2) if i not in used2] + new)
    base = from_faces(faces)
    f = lambda x: mapping.get(x, x)
    g2 = d2.original_graph
    es = {e for e in d1.original_graph.edges if v1 not in e}
    for a, b in g2.edges:
        if v2 in (a, b):
            continue
        es.add(edge(f(a), f(b)))
    vs = (set(d1.original_graph.vertices) - {v1}) | {f(x) for x in g2.vertices if x != v2}
    bip = None
    if d1.original_graph.bipartition is not None and g2.bipartition is not None:
        l1, r1 = d1.original_graph.bipartition
        l2, r2 = g2.bipartition
        left = (set(l1) - {v1}) | {f(x) for x in l2 if x != v2}
        right = (set(r1) - {v1}) | {f(x) for x in r2 if x != v2}
        if not left & right:
            bip = (frozenset(left), frozenset(right))
    og = Graph(frozenset(vs), frozenset(es), bip)
    ledger = d1.ledger + tuple(CrossingRecord((f(a), f(b)), (f(x), f(y)))
                               for (a, b), (x, y) in ((r.inserted, r.crossed) for r in d2.ledger))
    return Drawing(base, ledger, og)


# ---------------------------------------------------------------------------
# Doubling


def double_vertex(d, v, new_name=None, keep_slacker: str | None = None,
                  avoid: set | None = None) -> Drawing:
    """Add a twin of a degree-3 or degree-4 vertex at the cost of ``deg - 2`` crossings.

    The twin is placed in a face at ``v`` and joined to the two neighbors of
    ``v`` on that face without crossings; the other edges are inserted with
    one crossing each.  Placements are tried in a fixed order and the first
    one whose completion keeps a slacker on ``keep_slacker`` (if requested)
    and leaves the vertices in ``avoid`` as slackers is returned.
    """
    d, _ = _as_drawing(d)
    g = d.original_graph
    if g.bipartition is None:
        raise TransformError("doubling is defined for bipartite graphs")
    if v not in g.vertices:
        raise TransformError(f"{v!r} is not a vertex")
    deg = g.degree(v)
    if deg not in (3, 4):
        raise TransformError(f"doubling a vertex of degree {deg} is unsupported (only 3 or 4)")
    if d.missing_edges():
        raise TransformError("the drawing must be complete before doubling")
    if new_name is None:
        new_name = _fresh_names(set(d.base.graph.vertices), [v])[v]
    if new_name in d.base.graph.vertices:
        raise TransformError(f"{new_name!r} is already a vertex")
    left, right = g.bipartition
    side_left = v in left
    newg = Graph(g.vertices | {new_name}, g.edges | {edge(new_name, w) for w in g.neighbors(v)},
                 (left | {new_name}, right) if side_left else (left, right | {new_name}))
    faces = [list(f) for f in d.base.faces]
    tried = set()
    for i, f in enumerate(faces):
        if v not in f:
            continue
        k = len(f)
        j = f.index(v)
        p, q = f[j - 1], f[(j + 1) % k]
        if isinstance(p, Cross) or isinstance(q, Cross) or (i, p, q) in tried:
            continue
        tried.add((i, p, q))
        walk = [f[(j + 1 + t) % k] for t in range(k)]  # q ... p v
        f1 = [p, v, q, new_name]
        f2 = walk[:-1] + [new_name]
        try:
            base = from_faces(faces[:i] + faces[i + 1:] + [f1, f2])
        except EmbeddingError:
            continue
        start = Drawing(base, d.ledger, newg)
        rest = [edge(new_name, w) for w in sort_vertices(g.neighbors(v)) if w not in (p, q)]
        for cand in complete_kainen(start, rest, first_only=False) or []:
            if keep_slacker and not slackers(cand, keep_slacker):
                continue
            if avoid and not set(avoid) <= slackers(cand):
                continue
            return cand
    raise TransformError(f"no placement of a twin of {v!r} meets the requirements")


# ---------------------------------------------------------------------------
# Merging two vertices


def merge_vertices(e: Embedding, w0, w1, freed_path, new_name="w") -> Embedding:
    """Replace ``w0`` and ``w1`` by one vertex adjacent to both neighborhoods.

    Both vertices and the edges of ``freed_path`` are deleted; the faces they
    bounded must fuse into a single face containing every former neighbor,
    where the new vertex is placed and joined to them.
    """
    g = e.graph
    if g.has_edge(w0, w1):
        raise TransformError(f"{w0!r} and {w1!r} are adjacent")
    n0, n1 = g.neighbors(w0), g.neighbors(w1)
    if n0 & n1:
        raise TransformError(f"neighborhoods of {w0!r} and {w1!r} overlap: {sort_vertices(n0 & n1)}")
    if new_name in g.vertices and new_name not in (w0, w1):
        raise TransformError(f"{new_name!r} is already a vertex")
    path = [edge(*x) for x in freed_path]
    for a, b in path:
        if not g.has_edge(a, b):
            raise TransformError(f"path edge ({a},{b}) is not present")
        if {a, b} & {w0, w1}:
            raise TransformError("the freed path must avoid the merged vertices")
    faces = [list(f) for f in e.faces]
    faces = delete_vertex(faces, w0)
    faces = delete_vertex(faces, w1)
    for a, b in path:
        faces = merge_along_edge(faces, a, b)
    targets = n0 | n1
    region = [f for f in faces if targets <= set(f)]
    if not region:
        raise TransformError("no single face contains every former neighbor")
    f = region[0]
    rest = [x for x in faces if x is not f]
    for new in _fan_choices(f, targets, new_name):
        try:
            out = from_faces(rest + new)
        except EmbeddingError:
            continue
        if out.chi == e.chi and set(out.graph.neighbors(new_name)) == targets:
            return out
    raise TransformError("no placement of the merged vertex closes the surface")


def _fan_choices(face, targets, w):
    """Split ``face`` by joining ``w`` to one corner of each target vertex."""
    k = len(face)
    opts = [[i for i in range(k) if face[i] == t] for t in sort_vertices(targets)]
    from itertools import product

    for pick in product(*opts):
        pos = sorted(pick)
        if len(set(pos)) != len(pos):
            continue
        new = []
        for i in range(len(pos)):
            a, b = pos[i], pos[(i + 1) % len(pos)]
            span = (b - a) % k or k
            new.append([face[(a + t) % k] for t in range(span + 1)] + [w])
        yield new


# ---------------------------------------------------------------------------
# Scripts


_FLIP = re.compile(r"^flip\s+(\(.*?\))\s*->\s*(\(.*?\))$")
_HANDLE = re.compile(r"^handle\s+(\d+)\s+(\d+)\s+add\s+(.*)$")
_CROSSCAP = re.compile(r"^crosscap\s+v=(\S+)\s+corners=\((.*?)\)$")
_DOUBLE = re.compile(r"^double\s+(\S+)$")
_MERGE = re.compile(r"^merge\s+(\S+)\s+(\S+)\s+path\s+(.*)$")


def parse_script(text: str) -> list[tuple]:
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _FLIP.match(line):
                (a,), (b,) = parse_pairs(m.group(1)), parse_pairs(m.group(2))
                ops.append(("flip", FlipStep(a, b)))
            elif m := _HANDLE.match(line):
                ops.append(("handle", int(m.group(1)), int(m.group(2)), parse_pairs(m.group(3))))
            elif m := _CROSSCAP.match(line):
                cs = tuple(parse_vertex(t) for t in m.group(2).split(","))
                ops.append(("crosscap", parse_vertex(m.group(1)), cs))
            elif m := _DOUBLE.match(line):
                ops.append(("double", parse_vertex(m.group(1))))
            elif m := _MERGE.match(line):
                ops.append(("merge", parse_vertex(m.group(1)), parse_vertex(m.group(2)), parse_pairs(m.group(3))))
            else:
                raise TransformError("unknown operation")
        except (EmbeddingError, ValueError) as exc:
            raise TransformError(f"line {lineno}: {exc}") from None
    return ops


def apply_script(obj, text: str):
    """Run a surgery script on an embedding or drawing, returning the final object."""
    cur = obj
    for op in parse_script(text):
        kind = op[0]
        if kind == "double":
            cur = double_vertex(cur, op[1])
            continue
        emb = cur.base if isinstance(cur, Drawing) else cur
        if isinstance(cur, Drawing) and cur.ledger:
            raise TransformError(f"{kind} applies to embeddings without crossings")
        if kind == "flip":
            emb = flip(emb, op[1].delete_edge, op[1].add_edge)
        elif kind == "handle":
            emb = add_handle(emb, op[1], op[2], op[3])
        elif kind == "crosscap":
            emb = add_crosscap_p3(emb, op[1], op[2])
        elif kind == "merge":
            emb = merge_vertices(emb, op[1], op[2], op[3])
        cur = emb
    return cur
