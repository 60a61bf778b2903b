"""Backtracking enumeration of closed-surface embeddings with prescribed face lengths.

Faces are added one at a time.  Each vertex keeps its partial link (the graph
on its neighbors whose edges are the corners placed so far) as a union of
paths; a corner that would close a cycle is accepted only when the cycle
spans every neighbor.  When all links are closed cycles the faces form a
closed surface.  In orientable mode faces are directed and adjacent faces
must traverse their common edge in opposite directions.

Every face is a simple cycle.  For face lengths 3 and 4 in graphs of minimum
degree at least 2 this loses nothing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Sequence

from .surfaces import Graph, sort_vertices


class BudgetExceeded(Exception):
    pass


@dataclass
class EngineStats:
    nodes: int = 0
    prunes: int = 0
    leaves: int = 0

    def add(self, other: "EngineStats"):
        self.nodes += other.nodes
        self.prunes += other.prunes
        self.leaves += other.leaves

    def as_dict(self):
        return {"nodes": self.nodes, "prunes": self.prunes, "leaves": self.leaves}


class FaceEngine:
    """Search state over a graph relabeled to ``0..N-1``.

    Parameters
    ----------
    graph:
        The graph to embed (must be connected with minimum degree >= 2).
    face_counts:
        Exact multiset of face lengths as ``{length: count}``.
    oriented:
        Directed faces with coherent orientation (orientable surfaces only).
    """

    def __init__(self, graph: Graph, face_counts: dict, oriented: bool):
        self.labels = sort_vertices(graph.vertices)
        self.index = {v: i for i, v in enumerate(self.labels)}
        n = self.n = len(self.labels)
        self.nbrs = [sorted(self.index[w] for w in graph.neighbors(v)) for v in self.labels]
        self.deg = [len(x) for x in self.nbrs]
        self.adj = [[False] * n for _ in range(n)]
        for u in range(n):
            for w in self.nbrs[u]:
                self.adj[u][w] = True
        self.ld = [[0] * n for _ in range(n)]
        self.le = [list(range(n)) for _ in range(n)]
        for v in range(n):
            self.le[v] = list(range(n))
        self.lcnt = [0] * n
        self.tr = [[False] * n for _ in range(n)]
        self.rem = dict(face_counts)
        self.lengths = sorted(k for k in face_counts)
        self.oriented = oriented
        self.faces: list[tuple] = []
        self.undo: list = []
        self.stats = EngineStats()

    # -- corner primitives -------------------------------------------------

    def corner_ok(self, p, v, q) -> bool:
        ldv = self.ld[v]
        if ldv[p] >= 2 or ldv[q] >= 2:
            return False
        if ldv[p] == 1 and self.le[v][p] == q:
            return self.lcnt[v] == self.deg[v] - 1
        return True

    def _apply_corner(self, p, v, q, log):
        ldv = self.ld[v]
        lev = self.le[v]
        ep, eq = lev[p], lev[q]
        if ep == q and ldv[p] == 1:
            log.append((v, p, q, -1, 0, 0))
        else:
            log.append((v, p, q, ep, lev[ep], lev[eq]))
            lev[ep] = eq
            lev[eq] = ep
        ldv[p] += 1
        ldv[q] += 1
        self.lcnt[v] += 1

    def push_face(self, face: Sequence[int]):
        log = []
        k = len(face)
        for j in range(k):
            self._apply_corner(face[j - 1], face[j], face[(j + 1) % k], log)
        if self.oriented:
            tr = self.tr
            for j in range(k):
                a, b = face[j], face[(j + 1) % k]
                if self.ld[a][b] == 1:
                    tr[a][b] = True
        self.rem[k] -= 1
        self.faces.append(tuple(face))
        self.undo.append(log)

    def pop_face(self):
        face = self.faces.pop()
        log = self.undo.pop()
        k = len(face)
        self.rem[k] += 1
        if self.oriented:
            tr = self.tr
            for j in range(k):
                a, b = face[j], face[(j + 1) % k]
                if self.ld[a][b] == 1:
                    tr[a][b] = False
        for v, p, q, ep, old_ep, old_eq in reversed(log):
            ldv = self.ld[v]
            ldv[p] -= 1
            ldv[q] -= 1
            self.lcnt[v] -= 1
            if ep >= 0:
                lev = self.le[v]
                eq = lev[ep]
                lev[eq] = old_eq
                lev[ep] = old_ep

    # -- candidate faces ---------------------------------------------------

    def _dir_ok(self, a, b) -> bool:
        # a new face traversing a->b must oppose an existing traversal
        return self.ld[a][b] == 0 or self.tr[b][a]

    def extend(self, seed: Sequence[int]) -> list[tuple]:
        """All admissible faces beginning with the directed vertex sequence ``seed``."""
        out = []
        ld, adj = self.ld, self.adj
        oriented = self.oriented
        for j in range(1, len(seed) - 1):
            if not self.corner_ok(seed[j - 1], seed[j], seed[j + 1]):
                return out
        for j in range(len(seed) - 1):
            a, b = seed[j], seed[j + 1]
            if not adj[a][b] or ld[a][b] >= 2 or (oriented and not self._dir_ok(a, b)):
                return out
        on = set(seed)
        s0, s1 = seed[0], seed[1]
        path = list(seed)
        for L in self.lengths:
            if self.rem[L] <= 0 or L < len(seed):
                continue
            if L == len(seed):
                if self._closes(path, oriented):
                    out.append(tuple(path))
                continue
            self._dfs(path, on, L, out, s0, s1)
        return out

    def _closes(self, path, oriented) -> bool:
        a, b = path[-1], path[0]
        if not self.adj[a][b] or self.ld[a][b] >= 2:
            return False
        if oriented and not self._dir_ok(a, b):
            return False
        return self.corner_ok(path[-2], a, b) and self.corner_ok(a, b, path[1])

    def _dfs(self, path, on, L, out, s0, s1):
        last = path[-1]
        prev = path[-2]
        ld, adj = self.ld, self.adj
        oriented = self.oriented
        need_close = len(path) + 1 == L
        for w in self.nbrs[last]:
            if w in on or ld[last][w] >= 2:
                continue
            if oriented and not (ld[last][w] == 0 or self.tr[w][last]):
                continue
            if not self.corner_ok(prev, last, w):
                continue
            if need_close:
                if not adj[w][s0] or ld[w][s0] >= 2:
                    continue
                if oriented and not (ld[w][s0] == 0 or self.tr[s0][w]):
                    continue
                if not self.corner_ok(last, w, s0) or not self.corner_ok(w, s0, s1):
                    continue
                out.append(tuple(path) + (w,))
            else:
                path.append(w)
                on.add(w)
                self._dfs(path, on, L, out, s0, s1)
                on.discard(w)
                path.pop()

    # -- branching ---------------------------------------------------------

    def open_edge_candidates(self, a, b) -> list[tuple]:
        """Faces for the second side of edge ``a-b`` (which has exactly one face)."""
        if self.oriented:
            # the existing face runs a->b iff tr[a][b]
            seed = (b, a) if self.tr[a][b] else (a, b)
        else:
            seed = (b, a)
        return self.extend(seed)

    def choose(self) -> list[tuple] | None:
        """Candidate faces at the most constrained open edge; ``None`` when the surface is closed."""
        best_v, best_c = -1, -1
        ld, lcnt, deg = self.ld, self.lcnt, self.deg
        for v in range(self.n):
            c = lcnt[v]
            if 0 < c < deg[v] and c > best_c:
                best_v, best_c = v, c
        if best_v < 0:
            return None
        best = None
        ldv = ld[best_v]
        for w in self.nbrs[best_v]:
            if ldv[w] == 1:
                cands = self.open_edge_candidates(best_v, w)
                if best is None or len(cands) < len(best):
                    best = cands
                    if len(best) <= 1:
                        break
        return best if best is not None else []

    def complete(self) -> bool:
        return all(self.lcnt[v] == self.deg[v] for v in range(self.n))

    def run(self, node_cap: int | None = None, deadline: float | None = None) -> Iterator[list]:
        """Depth-first enumeration from the current state; yields face lists in original labels.

        The state is restored when the generator is exhausted or closed.
        """
        stats = self.stats
        root = self.choose()
        if root is None:
            if self.complete():
                stats.leaves += 1
                yield self.labelled_faces()
            return
        frames = [iter(root)]
        depth0 = len(self.faces)
        tick = 0
        try:
            while frames:
                nxt = next(frames[-1], None)
                if nxt is None:
                    frames.pop()
                    if frames:
                        self.pop_face()
                    continue
                self.push_face(nxt)
                stats.nodes += 1
                if node_cap is not None and stats.nodes > node_cap:
                    raise BudgetExceeded
                if deadline is not None:
                    tick += 1
                    if tick >= 1024:
                        tick = 0
                        if time.monotonic() > deadline:
                            raise BudgetExceeded
                c = self.choose()
                if c is None:
                    if self.complete():
                        stats.leaves += 1
                        yield self.labelled_faces()
                    self.pop_face()
                elif not c:
                    stats.prunes += 1
                    self.pop_face()
                else:
                    frames.append(iter(c))
        finally:
            while len(self.faces) > depth0:
                self.pop_face()

    def labelled_faces(self) -> list[tuple]:
        lab = self.labels
        return [tuple(lab[x] for x in f) for f in self.faces]

    def seed_rotation(self, v0: int, rotation: Sequence[int]) -> Iterator[None]:
        """Place every face at ``v0`` so that its link is ``rotation``; yields once per placement."""
        k = len(rotation)

        def rec(i):
            if i == k:
                yield None
                return
            p, q = rotation[i], rotation[(i + 1) % k]
            for f in self.extend((p, v0, q)):
                self.push_face(f)
                self.stats.nodes += 1
                yield from rec(i + 1)
                self.pop_face()

        yield from rec(0)


# ---------------------------------------------------------------------------
# Symmetry: rotations of the anchor vertex up to twin classes and reversal


def twin_classes(graph: Graph, v0) -> list[list]:
    """Partition the neighbors of ``v0`` into classes of mutual twins (relative to ``v0``).

    Two neighbors are twins when swapping them is an automorphism fixing
    ``v0``; for simple graphs that means equal neighborhoods up to each other.
    """
    nb = sort_vertices(graph.neighbors(v0))
    classes: list[list] = []
    for w in nb:
        nw = graph.neighbors(w) - {w}
        for cl in classes:
            x = cl[0]
            nx = graph.neighbors(x)
            if (nw - {x}) == (nx - {w}) and _side(graph, w) == _side(graph, x):
                cl.append(w)
                break
        else:
            classes.append([w])
    return classes


def _side(graph: Graph, v):
    if graph.bipartition is None:
        return 0
    return 0 if v in graph.bipartition[0] else 1


def anchor_rotations(graph: Graph, v0) -> list[tuple]:
    """Representatives of the cyclic orders at ``v0`` up to twin swaps and reversal."""
    classes = twin_classes(graph, v0)
    labels = []
    for i, cl in enumerate(classes):
        labels.extend([i] * len(cl))
    d = len(labels)
    if d < 3:
        return [tuple(v for cl in classes for v in cl)]
    first = labels[0]
    rest = labels[1:]
    seen = set()
    reps = []
    for perm in _multiset_perms(rest):
        seq = (first,) + perm
        key = _dihedral_min(seq)
        if key in seen:
            continue
        seen.add(key)
        reps.append(key)
    reps.sort()
    out = []
    for key in reps:
        pools = [list(cl) for cl in classes]
        out.append(tuple(pools[c].pop(0) for c in key))
    return out


def _multiset_perms(items):
    items = sorted(items)
    n = len(items)
    if n == 0:
        yield ()
        return
    used = [False] * n
    cur = []

    def rec():
        if len(cur) == n:
            yield tuple(cur)
            return
        last = None
        for i in range(n):
            if used[i] or items[i] == last:
                continue
            last = items[i]
            used[i] = True
            cur.append(items[i])
            yield from rec()
            cur.pop()
            used[i] = False

    yield from rec()


def _dihedral_min(seq):
    k = len(seq)
    best = None
    for s in (seq, tuple(reversed(seq))):
        for i in range(k):
            c = s[i:] + s[:i]
            if best is None or c < best:
                best = c
    return best


def choose_anchor(graph: Graph):
    """Maximum-degree vertex with the fewest twin classes among its neighbors."""
    best = None
    for v in sort_vertices(graph.vertices):
        key = (-graph.degree(v), len(twin_classes(graph, v)))
        if best is None or key < best[0]:
            best = (key, v)
    return best[1]
