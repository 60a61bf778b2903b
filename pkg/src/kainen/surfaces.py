"""Graphs, rotation systems, face tracing, surfaces and the closed-form formulas.

A rotation system (per-vertex cyclic neighbor orders plus a set of twisted
edges) is the only representation of an embedding.  Rotations are read
clockwise and faces are traced counterclockwise: arriving at ``v`` from ``u``
with the local orientation intact, the walk leaves along the neighbor that
follows ``u`` in the rotation of ``v``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import Hashable, Iterable, Mapping, Sequence

Vertex = Hashable
Edge = tuple


class EmbeddingError(ValueError):
    """Malformed graph, rotation system or face set."""


@dataclass(frozen=True, order=True)
class Cross:
    """Auxiliary degree-4 vertex standing for a crossing in a planarized drawing."""

    index: int

    def __str__(self) -> str:
        return f"*{self.index}"

    def __repr__(self) -> str:
        return f"Cross({self.index})"


def vertex_key(v):
    """Total order on vertex ids: numbered, then lettered, then crossing vertices."""
    if isinstance(v, bool):
        raise TypeError("booleans are not vertex ids")
    if isinstance(v, int):
        return (0, v, "")
    if isinstance(v, str):
        return (1, 0, v)
    if isinstance(v, Cross):
        return (2, v.index, "")
    raise TypeError(f"unsupported vertex id {v!r}")


def edge(u, v) -> Edge:
    """Canonical (sorted) form of the undirected edge ``{u, v}``."""
    return (u, v) if vertex_key(u) <= vertex_key(v) else (v, u)


def sort_vertices(vs: Iterable) -> list:
    return sorted(vs, key=vertex_key)


def sort_edges(es: Iterable) -> list:
    return sorted((edge(*e) for e in es), key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))


def letter_name(i: int) -> str:
    """'a', 'b', ..., 'z', 'aa', 'ab', ..."""
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(ord("a") + r) + s
    return s


# ---------------------------------------------------------------------------
# Graphs


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple graph with an optional (left, right) bipartition."""

    vertices: frozenset
    edges: frozenset
    bipartition: tuple | None = None

    def __post_init__(self):
        vs = frozenset(self.vertices)
        es = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise EmbeddingError(f"loop at {u!r}")
            if u not in vs or v not in vs:
                raise EmbeddingError(f"edge {e!r} has an endpoint outside the vertex set")
            c = edge(u, v)
            if c in es:
                raise EmbeddingError(f"parallel edge {c!r}")
            es.add(c)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", frozenset(es))
        if self.bipartition is not None:
            left, right = (frozenset(s) for s in self.bipartition)
            if left & right or (left | right) != vs:
                raise EmbeddingError("bipartition must partition the vertex set")
            for u, v in es:
                if (u in left) == (v in left):
                    raise EmbeddingError(f"edge {(u, v)!r} does not cross the bipartition")
            object.__setattr__(self, "bipartition", (left, right))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @classmethod
    def complete(cls, n: int) -> "Graph":
        vs = range(n)
        return cls(frozenset(vs), frozenset((i, j) for i in vs for j in vs if i < j))

    @classmethod
    def complete_bipartite(cls, m: int, n: int) -> "Graph":
        """K_{m,n} with lettered left vertices a, b, ... and numbered right vertices 0, 1, ..."""
        left = [letter_name(i) for i in range(m)]
        right = list(range(n))
        es = frozenset(edge(a, b) for a in left for b in right)
        return cls(frozenset(left) | frozenset(right), es, (frozenset(left), frozenset(right)))

    @cached_property
    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    def neighbors(self, v) -> frozenset:
        return self.adjacency[v]

    def degree(self, v) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u, v) -> bool:
        return edge(u, v) in self.edges

    def without_edges(self, es: Iterable) -> "Graph":
        drop = {edge(*e) for e in es}
        missing = drop - self.edges
        if missing:
            raise EmbeddingError(f"edges not in graph: {sort_edges(missing)}")
        return Graph(self.vertices, self.edges - drop, self.bipartition)

    def with_edges(self, es: Iterable) -> "Graph":
        return Graph(self.vertices, self.edges | {edge(*e) for e in es}, self.bipartition)

    def relabel(self, mapping: Mapping) -> "Graph":
        f = lambda v: mapping.get(v, v)
        bp = None
        if self.bipartition is not None:
            bp = tuple(frozenset(f(v) for v in s) for s in self.bipartition)
        return Graph(frozenset(f(v) for v in self.vertices),
                     frozenset(edge(f(u), f(v)) for u, v in self.edges), bp)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = next(iter(self.vertices))
        seen = {start}
        todo = [start]
        while todo:
            for w in self.adjacency[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)


def girth(g: Graph) -> int:
    """Length of a shortest cycle; raises ``EmbeddingError`` on forests."""
    best = None
    adj = g.adjacency
    for s in g.vertices:
        dist = {s: 0}
        parent = {s: None}
        q = deque([s])
        while q:
            u = q.popleft()
            if best is not None and 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    c = dist[u] + dist[w] + 1
                    if best is None or c < best:
                        best = c
    if best is None:
        raise EmbeddingError("graph is acyclic; girth is infinite")
    return best


# ---------------------------------------------------------------------------
# Surfaces


@dataclass(frozen=True, order=True)
class SurfaceId:
    """S_g (orientable) or N_k (nonorientable, k >= 1)."""

    orientable: bool
    genus: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        if not self.orientable and self.genus == 0:
            raise ValueError("N_0 is not a surface; use S_0 for the sphere")

    @classmethod
    def S(cls, g: int) -> "SurfaceId":
        return cls(True, g)

    @classmethod
    def N(cls, k: int) -> "SurfaceId":
        """N_k; ``N(0)`` is read as the sphere."""
        return cls(True, 0) if k == 0 else cls(False, k)

    @classmethod
    def from_euler(cls, chi: int, orientable: bool) -> "SurfaceId":
        if orientable:
            if chi % 2 or chi > 2:
                raise EmbeddingError(f"no orientable surface has Euler characteristic {chi}")
            return cls(True, (2 - chi) // 2)
        if chi > 1:
            raise EmbeddingError(f"no nonorientable surface has Euler characteristic {chi}")
        return cls(False, 2 - chi)

    @classmethod
    def parse(cls, text: str) -> "SurfaceId":
        m = re.fullmatch(r"\s*([SN])(\d+)\s*", text)
        if not m:
            raise ValueError(f"bad surface token {text!r}; expected S<g> or N<k>")
        k = int(m.group(2))
        if m.group(1) == "S":
            return cls(True, k)
        if k == 0:
            raise ValueError("N0 is not a surface")
        return cls(False, k)

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus if self.orientable else 2 - self.genus

    def __str__(self) -> str:
        return f"{'S' if self.orientable else 'N'}{self.genus}"


# ---------------------------------------------------------------------------
# Rotation systems


def _rotate_to_min(seq: Sequence) -> tuple:
    if not seq:
        return ()
    i = min(range(len(seq)), key=lambda j: vertex_key(seq[j]))
    return tuple(seq[i:]) + tuple(seq[:i])


class RotationSystem:
    """Cyclic neighbor order at every vertex plus the set of twisted edges.

    Each rotation is stored starting from its smallest neighbor, so equal
    rotation systems compare equal literally.
    """

    __slots__ = ("rotation", "twisted", "_pos", "_graph", "_hash")

    def __init__(self, rotation: Mapping, twisted: Iterable = ()):
        rot = {v: _rotate_to_min(list(r)) for v, r in rotation.items()}
        for v, r in rot.items():
            if len(set(r)) != len(r):
                raise EmbeddingError(f"rotation of {v!r} repeats a neighbor")
            if v in r:
                raise EmbeddingError(f"rotation of {v!r} contains a loop")
            for w in r:
                if w not in rot:
                    raise EmbeddingError(f"{w!r} in rotation of {v!r} is not a vertex")
        pos = {v: {w: i for i, w in enumerate(r)} for v, r in rot.items()}
        for v, r in rot.items():
            for w in r:
                if v not in pos[w]:
                    raise EmbeddingError(f"asymmetric adjacency: {w!r} in rotation of {v!r} but not vice versa")
        tw = frozenset(edge(*e) for e in twisted)
        for u, v in tw:
            if u not in pos or v not in pos[u]:
                raise EmbeddingError(f"twisted edge {(u, v)!r} is not an edge")
        self.rotation = rot
        self.twisted = tw
        self._pos = pos
        self._graph = None
        self._hash = None

    def __eq__(self, other):
        if not isinstance(other, RotationSystem):
            return NotImplemented
        return self.rotation == other.rotation and self.twisted == other.twisted

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.rotation.items()), self.twisted))
        return self._hash

    def __repr__(self):
        return f"RotationSystem(|V|={len(self.rotation)}, twisted={len(self.twisted)})"

    @property
    def vertices(self) -> list:
        return sort_vertices(self.rotation)

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            es = frozenset(edge(v, w) for v, r in self.rotation.items() for w in r)
            self._graph = Graph(frozenset(self.rotation), es)
        return self._graph

    def signature(self, u, v) -> int:
        return -1 if edge(u, v) in self.twisted else 1

    def succ(self, v, u):
        r = self.rotation[v]
        return r[(self._pos[v][u] + 1) % len(r)]

    def pred(self, v, u):
        r = self.rotation[v]
        return r[(self._pos[v][u] - 1) % len(r)]

    def position(self, v, u) -> int:
        return self._pos[v][u]

    def flipped(self, vs: Iterable) -> "RotationSystem":
        """Reverse the rotations at ``vs`` and toggle the signature of edges with one end flipped."""
        vs = set(vs)
        rot = {v: (tuple(reversed(r)) if v in vs else r) for v, r in self.rotation.items()}
        tw = set(self.twisted)
        for v in vs:
            for w in self.rotation[v]:
                if w not in vs:
                    tw ^= {edge(v, w)}
        return RotationSystem(rot, tw)

    def mirror(self) -> "RotationSystem":
        return RotationSystem({v: tuple(reversed(r)) for v, r in self.rotation.items()}, self.twisted)


def _resign_to_tree(rs: RotationSystem) -> tuple[RotationSystem, bool]:
    """Vertex-flip so every spanning-forest edge is normal; report orientability."""
    sign = {}
    flip = []
    for root in rs.vertices:
        if root in sign:
            continue
        sign[root] = 1
        q = deque([root])
        while q:
            u = q.popleft()
            for w in rs.rotation[u]:
                if w not in sign:
                    sign[w] = sign[u] * rs.signature(u, w)
                    if sign[w] < 0:
                        flip.append(w)
                    q.append(w)
    out = rs.flipped(flip) if flip else rs
    return out, not out.twisted


def is_orientable(rs: RotationSystem) -> bool:
    """True iff every cycle carries an even number of twisted edges."""
    if not rs.graph.is_connected():
        raise EmbeddingError("orientability is defined here for connected graphs only")
    sign = {}
    for root in rs.vertices:
        if root in sign:
            continue
        sign[root] = 1
        q = deque([root])
        while q:
            u = q.popleft()
            for w in rs.rotation[u]:
                s = sign[u] * rs.signature(u, w)
                if w not in sign:
                    sign[w] = s
                    q.append(w)
                elif sign[w] != s:
                    return False
    return True


def normalize_signature(rs: RotationSystem) -> RotationSystem:
    """Equivalent rotation system whose twisted edges all lie off a BFS spanning tree.

    Orientable inputs come back with no twisted edges at all.
    """
    return _resign_to_tree(rs)[0]


def _trace_orientable(rs: RotationSystem) -> list[tuple]:
    seen = set()
    faces = []
    for u in rs.vertices:
        for v in rs.rotation[u]:
            if (u, v) in seen:
                continue
            face = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                face.append(a)
                a, b = b, rs.succ(b, a)
            faces.append(tuple(face))
    return faces


def _trace_signed(rs: RotationSystem) -> list[tuple]:
    rot, pos, tw = rs.rotation, rs._pos, rs.twisted
    seen = set()
    faces = []
    for v in rs.vertices:
        for u in rot[v]:
            for o in (1, -1):
                start = (v, u, o)
                if start in seen:
                    continue
                cur = start
                walk = []
                while True:
                    seen.add(cur)
                    x, y, ox = cur
                    r = rot[x]
                    w = r[(pos[x][y] + ox) % len(r)]
                    seen.add((x, w, -ox))
                    walk.append(x)
                    cur = (w, x, -ox if edge(x, w) in tw else ox)
                    if cur == start:
                        break
                faces.append(tuple(walk))
    return faces


@dataclass(frozen=True, eq=False)
class Embedding:
    """Cellular embedding: a rotation system together with its traced faces."""

    rotation_system: RotationSystem
    faces: tuple
    chi: int
    surface: SurfaceId

    @property
    def graph(self) -> Graph:
        return self.rotation_system.graph

    @property
    def orientable(self) -> bool:
        return self.surface.orientable

    @property
    def face_lengths(self) -> list[int]:
        return sorted(len(f) for f in self.faces)

    def is_uniform(self, length: int) -> bool:
        return all(len(f) == length for f in self.faces)

    @property
    def is_triangular(self) -> bool:
        return self.is_uniform(3)

    def face_sides(self):
        """Yield ``(face_index, position, (a, b))`` for every traversal of an edge by a face."""
        for i, f in enumerate(self.faces):
            k = len(f)
            for j in range(k):
                yield i, j, (f[j], f[(j + 1) % k])

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.rotation_system == other.rotation_system

    def __hash__(self):
        return hash(self.rotation_system)

    def __repr__(self):
        return (f"Embedding(V={len(self.graph.vertices)}, E={len(self.graph.edges)}, "
                f"F={len(self.faces)}, {self.surface})")


def trace_faces(rs: RotationSystem) -> Embedding:
    """Trace all faces of ``rs`` and identify the surface."""
    if not rs.graph.is_connected():
        raise EmbeddingError("face tracing requires a connected graph")
    norm, orientable = _resign_to_tree(rs)
    faces = _trace_orientable(norm) if orientable else _trace_signed(norm)
    g = norm.graph
    chi = len(g.vertices) - len(g.edges) + len(faces)
    surface = SurfaceId.from_euler(chi, orientable)
    return Embedding(norm, tuple(faces), chi, surface)


def face_key(face: Sequence) -> tuple:
    """Canonical key of a cyclic vertex sequence up to rotation and reversal."""
    k = len(face)
    best = None
    for seq in (list(face), list(reversed(face))):
        for i in range(k):
            cand = tuple(vertex_key(x) for x in seq[i:] + seq[:i])
            if best is None or cand < best:
                best = cand
    return best


def from_faces(faces: Iterable[Sequence], vertices: Iterable = ()) -> Embedding:
    """Build the embedding whose faces are the given closed walks.

    Every edge must be traversed exactly twice and the corners at each vertex
    must link its neighbors into a single cycle.  The result is re-traced and
    compared against the input, so a returned embedding is always consistent.
    """
    faces = [tuple(f) for f in faces]
    side_count = {}
    link = {v: {} for v in vertices}
    for f in faces:
        k = len(f)
        if k < 3:
            raise EmbeddingError(f"face {f!r} is shorter than 3")
        for j in range(k):
            p, v, n = f[j - 1], f[j], f[(j + 1) % k]
            if p == v or v == n:
                raise EmbeddingError(f"face {f!r} has a loop")
            e = edge(v, n)
            side_count[e] = side_count.get(e, 0) + 1
            lk = link.setdefault(v, {})
            lk.setdefault(p, []).append(n)
            lk.setdefault(n, []).append(p)
    bad = [e for e, c in side_count.items() if c != 2]
    if bad:
        raise EmbeddingError(f"edges not on exactly two face sides: {sort_edges(bad)[:5]}")
    rotation = {}
    for v, lk in link.items():
        if not lk:
            raise EmbeddingError(f"isolated vertex {v!r}")
        for w, ns in lk.items():
            if len(ns) != 2:
                raise EmbeddingError(f"vertex {v!r}: neighbor {w!r} in {len(ns)} corners")
        start = min(lk, key=vertex_key)
        cyc = [start]
        prev, cur = None, start
        while True:
            a, b = lk[cur]
            nxt = b if a == prev else a
            if prev is not None and a == prev and b == prev:
                nxt = a
            if nxt == start:
                break
            cyc.append(nxt)
            prev, cur = cur, nxt
            if len(cyc) > len(lk):
                break
        if len(cyc) != len(lk):
            raise EmbeddingError(f"link of {v!r} is not a single cycle (pinched vertex)")
        rotation[v] = cyc

    # try a coherent orientation of the faces first
    sides = {}
    for i, f in enumerate(faces):
        k = len(f)
        for j in range(k):
            a, b = f[j], f[(j + 1) % k]
            sides.setdefault(edge(a, b), []).append((i, 1 if edge(a, b) == (a, b) else -1))
    orient = [0] * len(faces)
    orientable = True
    for s0 in range(len(faces)):
        if orient[s0] or not orientable:
            continue
        orient[s0] = 1
        todo = [s0]
        while todo and orientable:
            i = todo.pop()
            f = faces[i]
            for j in range(len(f)):
                (i1, d1), (i2, d2) = sides[edge(f[j], f[(j + 1) % len(f)])]
                if i1 == i2:
                    if d1 == d2:
                        orientable = False
                        break
                    continue
                other, d_mine, d_other = (i2, d1, d2) if i1 == i else (i1, d2, d1)
                want = -orient[i] * d_mine * d_other
                if orient[other] == 0:
                    orient[other] = want
                    todo.append(other)
                elif orient[other] != want:
                    orientable = False
                    break

    if orientable:
        rot = {}
        for i, f in enumerate(faces):
            g = f if orient[i] > 0 else tuple(reversed(f))
            k = len(g)
            for j in range(k):
                rot.setdefault(g[j], {})[g[j - 1]] = g[(j + 1) % k]
        rotation = {}
        for v, succ in rot.items():
            start = min(succ, key=vertex_key)
            cyc = [start]
            while succ[cyc[-1]] != start:
                cyc.append(succ[cyc[-1]])
                if len(cyc) > len(succ):
                    raise EmbeddingError(f"link of {v!r} is not a single cycle")
            if len(cyc) != len(succ):
                raise EmbeddingError(f"link of {v!r} is not a single cycle (pinched vertex)")
            rotation[v] = cyc
        rs = RotationSystem(rotation)
    else:
        if any(len(r) < 2 for r in rotation.values()):
            raise EmbeddingError("nonorientable face sets with vertices of degree 1 are unsupported")
        pos = {v: {w: i for i, w in enumerate(r)} for v, r in rotation.items()}
        # a degree-2 vertex has two corners; the rotation alone cannot tell them
        # apart, so the first corner fixes the sense and the other must run backwards
        first_corner = {}
        for i, f in enumerate(faces):
            for j, v in enumerate(f):
                if len(rotation[v]) == 2 and v not in first_corner:
                    first_corner[v] = (i, j, f[j - 1], f[(j + 1) % len(f)])

        def o_at(i, j):
            f = faces[i]
            p, v, n = f[j - 1], f[j], f[(j + 1) % len(f)]
            r = rotation[v]
            if len(r) > 2:
                return 1 if r[(pos[v][p] + 1) % len(r)] == n else -1
            i0, j0, p0, n0 = first_corner[v]
            if (i0, j0) == (i, j):
                return 1
            return 1 if (p, n) == (n0, p0) else -1

        twisted = set()
        done = set()
        for i, f in enumerate(faces):
            k = len(f)
            for j in range(k):
                a, b = f[j], f[(j + 1) % k]
                e = edge(a, b)
                if e in done:
                    continue
                done.add(e)
                lam = o_at(i, j) * o_at(i, (j + 1) % k)
                if lam < 0:
                    twisted.add(e)
        rs = RotationSystem(rotation, twisted)

    emb = trace_faces(rs)
    if sorted(face_key(f) for f in emb.faces) != sorted(face_key(f) for f in faces):
        raise EmbeddingError("face set is not realized by any rotation system (not a closed surface)")
    return emb


# ---------------------------------------------------------------------------
# Closed-form formulas


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def euler_edge_bound(v_count: int, chi: int, girth_len: int) -> int:
    """Largest edge count of a simple graph with this girth embeddable with this Euler characteristic."""
    if girth_len < 3:
        raise ValueError("girth must be at least 3")
    return (girth_len * (v_count - chi)) // (girth_len - 2)


def kainen_lower_bound(g: Graph, s: SurfaceId) -> int:
    """Kainen's crossing lower bound, clamped at 0 and rounded up to an integer."""
    if not g.is_connected():
        raise EmbeddingError("Kainen's bound needs a connected graph")
    ell = girth(g)
    delta = len(g.edges) - Fraction(ell, ell - 2) * (len(g.vertices) - s.euler_characteristic)
    return max(0, _ceil_div(delta.numerator, delta.denominator))


@dataclass(frozen=True)
class GenusProfile:
    """Genus values and Kainen crossing bounds of K_n or K_{m,n}."""

    size: tuple
    H: int
    h: int
    Hprime: int
    hprime: int
    t: int
    tprime: int


def complete_profile(n: int) -> GenusProfile:
    if n < 3:
        raise ValueError("complete_profile needs n >= 3")
    q = (n - 3) * (n - 4)
    return GenusProfile(
        size=(n,),
        H=_ceil_div(q, 12),
        h=q // 12,
        Hprime=_ceil_div(q, 6),
        hprime=q // 6,
        t=(q // 2) % 6,
        tprime=(q // 2) % 3,
    )


def bipartite_profile(m: int, n: int) -> GenusProfile:
    if m < 2 or n < 2:
        raise ValueError("bipartite_profile needs m, n >= 2")
    q = (m - 2) * (n - 2)
    return GenusProfile(
        size=(m, n),
        H=_ceil_div(q, 4),
        h=q // 4,
        Hprime=_ceil_div(q, 2),
        hprime=q // 2,
        t=q % 4,
        tprime=1 if (m % 2 and n % 2) else 0,
    )


# crossing numbers that differ from the formulas above
COMPLETE_EXCEPTIONS = {(9, True): 4, (7, False): 1, (8, False): 2}
BIPARTITE_EXCEPTIONS = {(3, 5): 4, (5, 3): 4, (5, 5): 2}


def minimal_triangulation_order(g: int) -> int:
    """M(g) = ceil((7 + sqrt(1 + 48 g)) / 2) in exact integer arithmetic."""
    if g < 0:
        raise ValueError("g must be nonnegative")
    d = 1 + 48 * g
    r = isqrt(d)
    if r * r != d:
        r += 1
    # 2n - 7 >= sqrt(d)  <=>  2n - 7 >= ceil(sqrt(d))
    return _ceil_div(7 + r, 2)


# ---------------------------------------------------------------------------
# Text format


_TOKEN = re.compile(r"^(-?\d+|[A-Za-z][A-Za-z0-9_]*|\*\d+)$")
_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def parse_vertex(tok: str):
    tok = tok.strip()
    if not _TOKEN.match(tok):
        raise EmbeddingError(f"bad vertex token {tok!r}")
    if tok.startswith("*"):
        return Cross(int(tok[1:]))
    return int(tok) if tok.lstrip("-").isdigit() else tok


def format_vertex(v) -> str:
    return str(v)


def parse_pairs(text: str) -> list[Edge]:
    pairs = [(parse_vertex(a), parse_vertex(b)) for a, b in _PAIR.findall(text)]
    leftover = _PAIR.sub("", text).strip()
    if leftover:
        raise EmbeddingError(f"unparsed text {leftover!r}")
    return pairs


def parse_rotation_text(text: str) -> RotationSystem:
    """Parse ``v. n1 n2 ...`` lines plus an optional ``twisted: (u,v) ...`` section."""
    rotation = {}
    twisted = []
    in_twisted = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("twisted:"):
            in_twisted = True
            line = line[len("twisted:"):]
            try:
                twisted.extend(parse_pairs(line))
            except EmbeddingError as exc:
                raise EmbeddingError(f"line {lineno}: {exc}") from None
            continue
        if in_twisted and line.startswith("("):
            twisted.extend(parse_pairs(line))
            continue
        m = re.match(r"^(\S+?)\.\s*(.*)$", line)
        if not m:
            raise EmbeddingError(f"line {lineno}: expected '<vertex>. <neighbors>'")
        try:
            v = parse_vertex(m.group(1))
            nbrs = [parse_vertex(t) for t in m.group(2).split()]
        except EmbeddingError as exc:
            raise EmbeddingError(f"line {lineno}: {exc}") from None
        if v in rotation:
            raise EmbeddingError(f"line {lineno}: duplicate rotation for {v!r}")
        rotation[v] = nbrs
    if not rotation:
        raise EmbeddingError("no rotation lines found")
    return RotationSystem(rotation, twisted)


def format_rotation_text(rs: RotationSystem) -> str:
    lines = [f"{format_vertex(v)}. " + " ".join(format_vertex(w) for w in rs.rotation[v])
             for v in rs.vertices]
    if rs.twisted:
        lines.append("twisted: " + " ".join(f"({format_vertex(a)},{format_vertex(b)})"
                                            for a, b in sort_edges(rs.twisted)))
    return "\n".join(lines) + "\n"
