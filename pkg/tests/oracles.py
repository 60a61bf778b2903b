"""Independent reference computations used to check the library.

Nothing here imports the package: face tracing works on plain dicts of
neighbor lists, counts come from exhaustive enumeration, and closed forms
are written out from scratch.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations, product
from math import ceil, floor


# ---------------------------------------------------------------------------
# closed forms


def complete_closed_form(n):
    """(H, h, H', h', t, t') for K_n computed with exact rationals."""
    x = Fraction((n - 3) * (n - 4))
    H, h = ceil(x / 12), floor(x / 12)
    Hp, hp = ceil(x / 6), floor(x / 6)
    e = n * (n - 1) // 2
    t = e - (3 * n - 6 + 6 * h)          # edges beyond a triangulation of S_h
    tp = e - (3 * n - 6 + 3 * hp)        # same in N_h'
    return H, h, Hp, hp, t, tp


def bipartite_closed_form(m, n):
    """(H, h, H', h', t, t') for K_{m,n}."""
    x = Fraction((m - 2) * (n - 2))
    H, h = ceil(x / 4), floor(x / 4)
    Hp, hp = ceil(x / 2), floor(x / 2)
    e = m * n
    t = e - (2 * (m + n) - 4 + 4 * h)
    tp = e - (2 * (m + n) - 4 + 2 * hp)
    return H, h, Hp, hp, t, tp


# crossing counts by residue, as tabulated
T_BY_RESIDUE_12 = {0: 0, 3: 0, 4: 0, 7: 0, 2: 1, 5: 1, 1: 3, 6: 3, 9: 3, 10: 3, 8: 4, 11: 4}


def t_bipartite_by_residue(m, n):
    if m % 4 == 2 or n % 4 == 2 or (m % 2 == 0 and n % 2 == 0):
        return 0
    if (m % 4, n % 4) in ((1, 1), (3, 3)):
        return 1
    if (m % 4 == 0 and n % 2) or (m % 2 and n % 4 == 0):
        return 2
    return 3


def min_triangulation_order(g):
    n = 4
    while (n - 3) * (n - 4) < 12 * g:
        n += 1
    return n


def kainen_bound(v, e, chi, girth):
    """Edges beyond the Euler bound for a cellular embedding with all faces of length >= girth."""
    cap = floor(Fraction(girth, girth - 2) * (v - chi))
    return max(0, e - cap)


# ---------------------------------------------------------------------------
# face tracing on signed rotation systems


def trace(rot, twisted=()):
    """Faces of a signed rotation system given as ``{v: [neighbors in cyclic order]}``.

    Each face is walked in both directions, so every walk found is reported
    once per direction; the list returned keeps one walk per face.
    """
    tw = {frozenset(e) for e in twisted}
    seen = set()
    walks = []
    for v in rot:
        for w in rot[v]:
            for o in (1, -1):
                if (v, w, o) in seen:
                    continue
                walk = []
                cur = (v, w, o)
                while cur not in seen:
                    seen.add(cur)
                    a, b, s = cur
                    walk.append(a)
                    if frozenset((a, b)) in tw:
                        s = -s
                    r = rot[b]
                    cur = (b, r[(r.index(a) + s) % len(r)], s)
                walks.append(walk)
    keyed = Counter(face_key(w) for w in walks)
    out = []
    for k, c in sorted(keyed.items(), key=repr):
        out.extend([list(k)] * (c // 2))
    return out


def face_key(walk):
    k = len(walk)
    cands = []
    for seq in (walk, walk[::-1]):
        for i in range(k):
            cands.append(tuple(seq[i:] + seq[:i]))
    return min(cands, key=repr)


def orientable(rot, twisted=()):
    tw = {frozenset(e) for e in twisted}
    color = {}
    for s in rot:
        if s in color:
            continue
        color[s] = 0
        todo = [s]
        while todo:
            v = todo.pop()
            for w in rot[v]:
                want = color[v] ^ (frozenset((v, w)) in tw)
                if w not in color:
                    color[w] = want
                    todo.append(w)
                elif color[w] != want:
                    return False
    return True


def surface(rot, twisted=()):
    """('S', g) or ('N', k)."""
    v = len(rot)
    e = sum(len(r) for r in rot.values()) // 2
    f = len(trace(rot, twisted))
    chi = v - e + f
    if orientable(rot, twisted):
        return ("S", (2 - chi) // 2)
    return ("N", 2 - chi)


# ---------------------------------------------------------------------------
# brute-force census of embeddings


def _cyclic_orders(nbrs):
    nbrs = sorted(nbrs, key=repr)
    first, rest = nbrs[0], nbrs[1:]
    for p in permutations(rest):
        yield [first, *p]


def _spanning_tree(adj):
    root = min(adj, key=repr)
    tree, seen, todo = set(), {root}, [root]
    while todo:
        v = todo.pop()
        for w in sorted(adj[v], key=repr):
            if w not in seen:
                seen.add(w)
                tree.add(frozenset((v, w)))
                todo.append(w)
    return tree


def census(vertices, edges, nonorientable=False):
    """Counts of embeddings by (surface, face-length multiset), simple faces only.

    Orientable: number of rotation systems (an embedding and its mirror
    image count separately).  Nonorientable: number of distinct face sets.
    """
    adj = {v: set() for v in vertices}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    vs = sorted(adj, key=repr)
    orders = [list(_cyclic_orders(adj[v])) for v in vs]
    out = Counter()
    if not nonorientable:
        for combo in product(*orders):
            rot = dict(zip(vs, combo))
            faces = trace(rot)
            if any(len(set(f)) != len(f) for f in faces):
                continue
            out[(surface(rot), tuple(sorted(Counter(map(len, faces)).items())))] += 1
        return out
    tree = _spanning_tree(adj)
    cotree = [frozenset(e) for e in edges if frozenset(e) not in tree]
    seen = set()
    for combo in product(*orders):
        rot = dict(zip(vs, combo))
        for bits in product((0, 1), repeat=len(cotree)):
            tw = [tuple(e) for e, b in zip(cotree, bits) if b]
            if not tw or orientable(rot, tw):
                continue
            faces = trace(rot, tw)
            if any(len(set(f)) != len(f) for f in faces):
                continue
            key = tuple(sorted((face_key(f) for f in faces), key=repr))
            if key in seen:
                continue
            seen.add(key)
            out[(surface(rot, tw), tuple(sorted(Counter(map(len, faces)).items())))] += 1
    return out


# ---------------------------------------------------------------------------
# drawings


def crossing_audit(rot, twisted=()):
    """For a planarized rotation system whose crossing vertices are strings starting with '*':
    the original edges and the number of crossings on each.
    """
    cross = {v for v in rot if isinstance(v, str) and v.startswith("*")}
    counts = Counter()
    edges = set()
    for v in rot:
        if v in cross:
            continue
        for w in rot[v]:
            path = [v, w]
            while path[-1] in cross:
                c = path[-1]
                r = rot[c]
                path.append(r[(r.index(path[-2]) + 2) % 4])
            e = frozenset((path[0], path[-1]))
            edges.add(e)
            counts[e] = len(path) - 2
    return edges, counts


def complete_edges(vertices):
    return {frozenset(p) for p in combinations(vertices, 2)}


def edge_subset_orbits(n, r, sides=None):
    """Orbits of r-edge subsets of K_n (or K_{a,b} when ``sides=(a, b)``) under relabeling."""
    if sides is None:
        vs = list(range(n))
        edges = sorted(complete_edges(vs), key=sorted)
        perms = [dict(zip(vs, p)) for p in permutations(vs)]
    else:
        a, b = sides
        left, right = list(range(a)), list(range(a, a + b))
        edges = [frozenset((x, y)) for x in left for y in right]
        perms = [dict(zip(left + right, p + q)) for p in permutations(left) for q in permutations(right)]
    seen = set()
    orbits = 0
    for sub in combinations(edges, r):
        key = frozenset(sub)
        if key in seen:
            continue
        orbits += 1
        for p in perms:
            seen.add(frozenset(frozenset(p[v] for v in e) for e in sub))
    return orbits


def map_automorphisms(faces, vertices):
    """Vertex permutations carrying the face set onto itself."""
    target = Counter(face_key(list(f)) for f in faces)
    count = 0
    for p in permutations(vertices):
        m = dict(zip(vertices, p))
        if Counter(face_key([m[v] for v in f]) for f in faces) == target:
            count += 1
    return count


# ---------------------------------------------------------------------------
# skeletons with loops and parallel arcs


def dart_faces(rotation):
    """Number of faces of a rotation given as ``{v: [signed arc ids]}``.

    ``+a`` is the tail end of arc ``a`` and ``-a`` its head end.
    """
    where = {d: (v, i) for v, ds in rotation.items() for i, d in enumerate(ds)}
    seen = set()
    faces = 0
    for start in where:
        if start in seen:
            continue
        faces += 1
        d = start
        while d not in seen:
            seen.add(d)
            w, i = where[-d]
            d = rotation[w][(i + 1) % len(rotation[w])]
    return faces
