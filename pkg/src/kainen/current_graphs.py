"""Current graphs over cyclic groups and their derived embeddings.

A skeleton may have loops and parallel edges, so it is stored with arc
identifiers: the rotation at a skeleton vertex lists signed arc ids, where
``+a`` is the end at which arc ``a`` leaves (its tail) and ``-a`` the end at
which it arrives (its head).  Only ``alpha(e+)`` is stored per arc; the
reverse arc carries ``-alpha`` on an untwisted edge and ``alpha`` on a
twisted one.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd

from .drawings import VerificationReport
from .surfaces import (
    Embedding,
    EmbeddingError,
    RotationSystem,
    format_vertex,
    parse_vertex,
    sort_vertices,
    trace_faces,
)

VORTEX_TYPES = ("V3", "V4", "V5")


class CurrentGraphError(EmbeddingError):
    """Malformed current graph, or one whose derivation fails."""


@dataclass(frozen=True)
class Arc:
    id: int
    tail: object
    head: object
    current: int
    twisted: bool = False


@dataclass(frozen=True)
class CurrentGraph:
    group_order: int
    index: int
    arcs: tuple
    rotation: tuple  # ((vertex, (signed arc ids ...)), ...)
    vortices: tuple = ()  # ((vertex, letter, type), ...)

    def __post_init__(self):
        n, k = self.group_order, self.index
        if n < 2:
            raise CurrentGraphError(f"group order must be at least 2, got {n}")
        if k < 1 or n % k:
            raise CurrentGraphError(f"index {k} does not divide the group order {n}")
        ends = {}
        for v, r in self.rotation:
            for s in r:
                if s == 0:
                    raise CurrentGraphError(f"arc id 0 at vertex {v!r}")
                if s in ends:
                    raise CurrentGraphError(f"arc end {s:+d} appears twice")
                ends[s] = v
        ids = set()
        for a in self.arcs:
            if a.id in ids:
                raise CurrentGraphError(f"arc {a.id} defined twice")
            ids.add(a.id)
            if a.current % n == 0:
                raise CurrentGraphError(f"arc {a.id} has current 0 in Z{n}")
            if ends.get(a.id) != a.tail or ends.get(-a.id) != a.head:
                raise CurrentGraphError(f"arc {a.id} ({a.tail} -> {a.head}) does not match the rotations")
        dangling = sorted({abs(s) for s in ends} - ids)
        if dangling:
            raise CurrentGraphError(f"rotations refer to undefined arcs {dangling}")
        verts = {v for v, _ in self.rotation}
        for v, letter, typ in self.vortices:
            if v not in verts:
                raise CurrentGraphError(f"vortex {v!r} is not a skeleton vertex")
            if typ not in VORTEX_TYPES:
                raise CurrentGraphError(f"unknown vortex type {typ!r}")

    @property
    def arc(self) -> dict:
        return {a.id: a for a in self.arcs}

    @property
    def rot(self) -> dict:
        return dict(self.rotation)

    @property
    def vortex(self) -> dict:
        return {v: (letter, typ) for v, letter, typ in self.vortices}

    @property
    def vertices(self) -> list:
        return [v for v, _ in self.rotation]

    def degree(self, v) -> int:
        return len(self.rot[v])

    def end_current(self, s: int) -> int:
        """Current read when leaving through end ``s``."""
        a = self.arc[abs(s)]
        if s > 0:
            return a.current % self.group_order
        return (a.current if a.twisted else -a.current) % self.group_order

    def excess(self, v) -> int:
        """Sum of the currents arriving at ``v``."""
        n = self.group_order
        total = 0
        for s in self.rot[v]:
            # arriving through end s means traversing the arc that ends there
            total += self.end_current(-s)
        return total % n

    @property
    def orientable(self) -> bool:
        return not any(a.twisted for a in self.arcs)


# ---------------------------------------------------------------------------
# Text format

_HDR = re.compile(r"^(group|index)\s*:\s*(\S+)$")
_ARC = re.compile(r"^arc\s+(\d+)\s*:\s*(\S+)\s*->\s*(\S+)\s+current\s+(-?\d+)(\s+twisted)?$")
_ROT = re.compile(r"^(\S+)\.\s*(.*)$")
_VORTEX = re.compile(r"^vortex\s+(\S+)\s+letter\s+(\S+)\s+type\s+(\S+)$")


def parse_current_graph(text: str) -> CurrentGraph:
    n = k = None
    arcs, rot, vort = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _HDR.match(line):
                if m.group(1) == "group":
                    g = m.group(2)
                    if not re.fullmatch(r"Z\d+", g):
                        raise CurrentGraphError(f"bad group {g!r} (expected Z<n>)")
                    n = int(g[1:])
                else:
                    k = int(m.group(2))
            elif m := _ARC.match(line):
                arcs.append(Arc(int(m.group(1)), parse_vertex(m.group(2)), parse_vertex(m.group(3)),
                                int(m.group(4)), bool(m.group(5))))
            elif m := _VORTEX.match(line):
                vort.append((parse_vertex(m.group(1)), m.group(2), m.group(3)))
            elif m := _ROT.match(line):
                ids = []
                for tok in m.group(2).split():
                    if not re.fullmatch(r"[+-]\d+", tok):
                        raise CurrentGraphError(f"bad signed arc id {tok!r}")
                    ids.append(int(tok))
                rot.append((parse_vertex(m.group(1)), tuple(ids)))
            else:
                raise CurrentGraphError("unrecognized line")
        except (CurrentGraphError, EmbeddingError, ValueError) as exc:
            raise CurrentGraphError(f"line {lineno}: {exc}") from None
    if n is None or k is None:
        raise CurrentGraphError("missing 'group:' or 'index:' header")
    return CurrentGraph(n, k, tuple(arcs), tuple(rot), tuple(vort))


def format_current_graph(cg: CurrentGraph) -> str:
    lines = [f"group: Z{cg.group_order}", f"index: {cg.index}"]
    for a in sorted(cg.arcs, key=lambda a: a.id):
        tw = " twisted" if a.twisted else ""
        lines.append(f"arc {a.id}: {format_vertex(a.tail)} -> {format_vertex(a.head)} current {a.current}{tw}")
    for v, r in cg.rotation:
        lines.append(f"{format_vertex(v)}. " + " ".join(f"{s:+d}" for s in r))
    for v, letter, typ in cg.vortices:
        lines.append(f"vortex {format_vertex(v)} letter {letter} type {typ}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class Step:
    vertex: object  # vertex left
    end: int  # signed arc end used
    current: int
    twisted: bool
    sense: int = 1  # local orientation after the traversal


def _other_end(cg: CurrentGraph, v, i):
    rot = cg.rot
    s = rot[v][i]
    a = cg.arc[abs(s)]
    w = a.head if s > 0 else a.tail
    j = rot[w].index(-s)
    return w, j


def trace_circuits(cg: CurrentGraph) -> list[list[Step]]:
    """Face boundary walks of the skeleton, each a list of traversed arcs."""
    rot = cg.rot
    seen = set()
    out = []
    for v in cg.vertices:
        for i in range(len(rot[v])):
            for o in (1, -1):
                if (v, i, o) in seen or (o == -1 and cg.orientable):
                    continue
                walk = []
                state = (v, i, o)
                while state not in seen:
                    seen.add(state)
                    x, p, q = state
                    s = rot[x][p]
                    tw = cg.arc[abs(s)].twisted
                    q2 = -q if tw else q
                    # read with the local orientation in force after crossing the edge
                    walk.append(Step(x, s, cg.end_current(s) * q2 % cg.group_order, tw, q2))
                    w, j = _other_end(cg, x, p)
                    seen.add((w, j, -q2))
                    state = (w, (j + q2) % len(rot[w]), q2)
                out.append(walk)
    return out


def circuit_labels(cg: CurrentGraph, circuits) -> tuple[list[int] | None, list[str]]:
    """Labels forced by the rule alpha(e+) = b - a (mod k), starting from label 0."""
    k = cg.index
    where = {}
    for c, walk in enumerate(circuits):
        for st in walk:
            where.setdefault(st.end, c)
    labels = [None] * len(circuits)
    problems = []
    if not circuits:
        return None, ["no circuits"]
    labels[0] = 0
    changed = True
    while changed:
        changed = False
        for a in cg.arcs:
            ca, cb = where.get(a.id), where.get(-a.id)
            if ca is None or cb is None:
                continue
            if labels[ca] is not None and labels[cb] is None:
                labels[cb] = (labels[ca] + a.current) % k
                changed = True
            elif labels[cb] is not None and labels[ca] is None:
                labels[ca] = (labels[cb] - a.current) % k
                changed = True
    for a in cg.arcs:
        ca, cb = where.get(a.id), where.get(-a.id)
        if ca is None or cb is None or labels[ca] is None or labels[cb] is None:
            continue
        if (a.current - (labels[cb] - labels[ca])) % k:
            problems.append(f"arc {a.id}: current {a.current} is not {labels[cb]}-{labels[ca]} mod {k}")
    if None in labels:
        problems.append("some circuits cannot be labeled from the arcs")
        return None, problems
    return labels, problems


@dataclass(frozen=True)
class CircuitLog:
    label: int
    entries: tuple  # ints (group elements) and str (letters)

    def elements(self) -> list[int]:
        return [x for x in self.entries if isinstance(x, int)]

    def letters(self) -> list[str]:
        return [x for x in self.entries if isinstance(x, str)]


def _corner_letter(cg: CurrentGraph, w, j_in: int) -> str | None:
    """Letter spliced at the corner of vortex ``w`` entered through rotation slot ``j_in``."""
    vt = cg.vortex.get(w)
    if vt is None:
        return None
    letter, typ = vt
    if typ == "V5":
        return f"{letter}{j_in}"
    return letter


def circuit_logs(cg: CurrentGraph) -> list[CircuitLog]:
    """Logs of the circuits ordered by label, with vortex letters spliced in.

    At a degree-one vertex the walk turns back along the same edge; the two
    readings coincide (the current has order two) and are recorded once.
    """
    circuits = trace_circuits(cg)
    if len(circuits) != cg.index:
        raise CurrentGraphError(f"skeleton has {len(circuits)} circuits, index is {cg.index}")
    labels, problems = circuit_labels(cg, circuits)
    if labels is None or problems:
        raise CurrentGraphError("; ".join(problems))
    logs = []
    vortex = cg.vortex
    for c, walk in enumerate(circuits):
        entries = []
        for t, st in enumerate(walk):
            prev = walk[t - 1]
            if cg.degree(st.vertex) == 1 and st.vertex not in vortex:
                continue  # return leg of a 2-gon
            if st.vertex in vortex:
                entries.append(_corner_letter(cg, st.vertex, cg.rot[st.vertex].index(-prev.end)))
            entries.append(st.current)
        logs.append(CircuitLog(labels[c], tuple(entries)))
    return sorted(logs, key=lambda lg: lg.label)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    checks: VerificationReport = field(default_factory=VerificationReport)
    types: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.checks.ok and all(t is not None for t in self.types.values())

    def lines(self) -> list[str]:
        out = self.checks.lines()
        for v in sort_vertices(self.types):
            t = self.types[v]
            out.append(f"vertex {format_vertex(v)}: {t if t else 'unclassified'}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _order(x: int, n: int) -> int:
    return n // gcd(x % n, n)


def classify_vertex(cg: CurrentGraph, v, circuits=None) -> tuple[str | None, str]:
    """Vertex type and an explanation when it fails to be one."""
    n, k = cg.group_order, cg.index
    d = cg.degree(v)
    ex = cg.excess(v)
    if circuits is None:
        circuits = trace_circuits(cg)
    touching = {c for c, walk in enumerate(circuits) for st in walk if st.vertex == v}
    if v in cg.vortex:
        letter, typ = cg.vortex[v]
        if typ == "V3":
            if d != k:
                return None, f"V3 vortex has degree {d}, index is {k}"
            if len(touching) != k:
                return None, "V3 vortex is not incident with every circuit"
            if gcd(ex, n) != k:
                return None, f"excess {ex} does not generate the index-{k} subgroup"
            return "V3", ""
        if typ == "V4":
            if d != 3 or k != 3:
                return None, "V4 needs degree 3 and index 3"
            if len(touching) != k:
                return None, "V4 vortex is not incident with every circuit"
            if _order(ex, n) != 3:
                return None, f"excess {ex} does not have order 3"
            return "V4", ""
        if d != 3 or k != 1:
            return None, "V5 needs degree 3 and index 1"
        if gcd(ex, n) != 3:
            return None, f"excess {ex} does not generate the multiples of 3"
        incoming = [cg.end_current(-s) for s in cg.rot[v]]
        if len({x % 3 for x in incoming}) != 1:
            return None, f"incident currents {incoming} are not congruent mod 3"
        return "V5", ""
    if d == 3:
        if ex == 0:
            return "V1", ""
        return None, f"degree-3 vertex with excess {ex} (Kirchhoff's law fails)"
    if d == 1:
        if ex != 0 and _order(ex, n) == 2:
            return "V2", ""
        return None, f"degree-1 vertex with excess {ex}: excess not of order 2"
    return None, f"degree-{d} unlabeled vertex"


def validate(cg: CurrentGraph) -> ValidationReport:
    rep = ValidationReport()
    n, k = cg.group_order, cg.index
    circuits = trace_circuits(cg)
    rep.checks.add("C1", len(circuits) == k, f"{len(circuits)} circuits, index {k}")
    labels, problems = circuit_labels(cg, circuits)
    rep.checks.add("C3", labels is not None and not problems, "; ".join(problems) or "all arcs consistent")
    if len(circuits) == k and labels is not None and not problems:
        for lg in circuit_logs(cg):
            els = lg.elements()
            dup = sorted({x for x in els if els.count(x) > 1})
            miss = sorted(set(range(1, n)) - set(els))
            detail = []
            if miss:
                detail.append(f"missing {miss}")
            if dup:
                detail.append(f"duplicated {dup}")
            rep.checks.add(f"C2 circuit [{lg.label}]", not detail, "; ".join(detail) or "each nonzero element once")
    for v in cg.vertices:
        t, why = classify_vertex(cg, v, circuits)
        rep.types[v] = t
        if t is None:
            rep.checks.add(f"vertex {format_vertex(v)}", False, why)
    return rep


# ---------------------------------------------------------------------------
# Derivation


def derive(cg: CurrentGraph) -> Embedding:
    """Derived embedding: numbered vertices Z_n plus one lettered vertex per vortex face."""
    rep = validate(cg)
    if not rep.ok:
        raise CurrentGraphError("invalid current graph: " + "; ".join(
            f"{a}: {b}" for a, b in rep.checks.failures) or "unclassified vertex")
    n, k = cg.group_order, cg.index
    logs = circuit_logs(cg)
    twisted_el = _twisted_elements(cg)
    rot = {}
    twisted = set()
    for i in range(n):
        lg = logs[i % k]
        r = []
        for x in lg.entries:
            if isinstance(x, int):
                w = (i + x) % n
                r.append(w)
                if x in twisted_el[i % k]:
                    twisted.add((i, w))
            else:
                r.append(x)
        rot[i] = r
    letters = sorted({x for lg in logs for x in lg.letters()})
    for letter in letters:
        cycles = _letter_cycles(rot, letter)
        if len(cycles) == 1:
            rot[letter] = cycles[0]
            continue
        for r, cyc in enumerate(sorted(cycles, key=lambda c: min(c))):
            name = f"{letter}{r}"
            if name in rot or name in letters:
                raise CurrentGraphError(f"letter {name!r} is ambiguous")
            for v in cyc:
                rot[v] = [name if x == letter else x for x in rot[v]]
            rot[name] = cyc
    for v, r in rot.items():
        if len(set(r)) != len(r):
            raise CurrentGraphError(f"derived graph is not simple at vertex {v!r}")
    try:
        emb = trace_faces(RotationSystem(rot, twisted))
    except EmbeddingError as exc:
        raise CurrentGraphError(f"derived rotation system is malformed: {exc}") from None
    bad = [f for f in emb.faces if len(f) != 3]
    if bad:
        raise CurrentGraphError(f"derived embedding has {len(bad)} non-triangular faces, e.g. {bad[0]}")
    return emb


def _twisted_elements(cg: CurrentGraph) -> list[set]:
    out = [set() for _ in range(cg.index)]
    if cg.orientable:
        return out
    circuits = trace_circuits(cg)
    labels, _ = circuit_labels(cg, circuits)
    for c, walk in enumerate(circuits):
        for st in walk:
            if st.twisted:
                out[labels[c]].add(st.current)
    return out


def _letter_cycles(rot: dict, letter) -> list[list]:
    """Rotations for a lettered vertex: each neighbor i is followed by ``succ_i(letter)``'s predecessor chain."""
    nxt = {}
    for i, r in rot.items():
        if letter in r:
            p = r.index(letter)
            s = r[(p + 1) % len(r)]
            nxt[s] = i  # succ_letter(s) = i
    cycles = []
    left = set(nxt)
    while left:
        start = min(left, key=lambda x: (isinstance(x, str), str(x) if isinstance(x, str) else x))
        cyc = [start]
        left.discard(start)
        cur = nxt.get(start)
        while cur != start:
            if cur is None or cur not in left:
                raise CurrentGraphError(f"corners at letter {letter!r} do not close up")
            cyc.append(cur)
            left.discard(cur)
            cur = nxt.get(cur)
        cycles.append(cyc)
    return cycles


# ---------------------------------------------------------------------------
# Ladders


def _arith_step(vals: list[int], n: int) -> int | None:
    steps = {(b - a) % n for a, b in zip(vals, vals[1:])}
    if len(steps) == 1 and steps <= {3 % n, -3 % n}:
        return steps.pop()
    return None


def ladder_skeleton(index: int, rungs: int, rung_currents, group_order: int,
                    end_current: int | None = None, strict: bool = False) -> CurrentGraph:
    """A ladder with alternating rungs, closed at both ends.

    Top vertices ``t0..`` and bottom vertices ``b0..`` are joined by rungs;
    rung ``i`` points down when ``i`` is even.  The left end edge runs from
    ``b0`` up to ``t0`` and the right one from the last top vertex down.
    Index 2 ladders use a checkerboard of rotations.  Index 3 ladders turn
    every other rung into a ring: two curved arcs between extra vertices
    ``p<i>`` and ``q<i>``, one carrying the horizontal current next to it.
    When the circuit count has the wrong parity, the right end edge becomes
    a ring ``pe``/``qe`` as well.  Rotation patterns are tried in a fixed
    order and the first giving ``index`` circuits is returned.

    KCL fixes every current once the left end current is chosen; when it is
    not given, the smallest value keeping all currents nonzero is used.
    """
    n = group_order
    if index not in (1, 2, 3):
        raise CurrentGraphError("ladder index must be 1, 2 or 3")
    if rungs < 2:
        raise CurrentGraphError("a ladder needs at least 2 rungs")
    rc = [c % n for c in rung_currents]
    if len(rc) != rungs:
        raise CurrentGraphError(f"expected {rungs} rung currents, got {len(rc)}")
    if any(c == 0 for c in rc):
        raise CurrentGraphError("rung currents must be nonzero")
    if strict and _arith_step(rc, n) is None:
        raise CurrentGraphError(f"rung currents {list(rung_currents)} are not an arithmetic sequence of step 3 or -3")
    into_top = [(-c if i % 2 == 0 else c) % n for i, c in enumerate(rc)]

    def solve(e_left):
        top = [(e_left + into_top[0]) % n]
        bottom = [(-into_top[0] - e_left) % n]
        for i in range(1, rungs - 1):
            top.append((top[-1] + into_top[i]) % n)
            bottom.append((bottom[-1] - into_top[i]) % n)
        e_right = (top[-1] + into_top[-1]) % n
        if (bottom[-1] - into_top[-1] + e_right) % n:
            raise CurrentGraphError("KCL contradiction at the right end")
        return top, bottom, e_right

    choices = [end_current % n] if end_current is not None else range(1, n)
    for e_left in choices:
        top, bottom, e_right = solve(e_left)
        if e_left and e_right and all(top) and all(bottom):
            break
    else:
        raise CurrentGraphError("KCL forces a zero current on the ladder")
    layouts = [(1, False), (0, False), (0, True), (1, True)] if index == 3 else [(None, False)]
    for ring, ring_end in layouts:
        spins = ((0, 0), (0, 1), (1, 0), (1, 1)) if ring is not None else ((0, 0),)
        for spin in spins:
            for phase in ((0, 1), (1, 0), (0, 0), (1, 1)):
                try:
                    cg = _ladder(index, rungs, rc, top, bottom, e_left, e_right, n,
                                 phase, ring, ring_end, spin)
                except CurrentGraphError:
                    break
                if len(trace_circuits(cg)) == index:
                    return cg
    raise CurrentGraphError(f"no ladder rotation pattern gives {index} circuits with {rungs} rungs")


def _ladder(index, r, rc, top, bottom, e_left, e_right, n, phase,
            ring=None, ring_end=False, spin=(0, 0)) -> CurrentGraph:
    arcs = []
    extra = {}

    def ring_arcs(aid, src, dst, cur, c1, tag):
        # src -> p, two curved arcs p -> q, q -> dst
        p, q = f"p{tag}", f"q{tag}"
        c2 = (cur - c1) % n
        if c1 == 0 or c2 == 0:
            raise CurrentGraphError(f"ring {tag} would carry a zero current")
        arcs.extend([Arc(aid, src, p, cur), Arc(aid + 1, p, q, c1),
                     Arc(aid + 2, p, q, c2), Arc(aid + 3, q, dst, cur)])
        rp, rq = (-aid, aid + 1, aid + 2), (-(aid + 1), aid + 3, -(aid + 2))
        extra[p] = rp[::-1] if spin[0] else rp
        extra[q] = rq[::-1] if spin[1] else rq
        return aid, -(aid + 3)

    t = [f"t{i}" for i in range(r)]
    b = [f"b{i}" for i in range(r)]
    arcs.append(Arc(1, b[0], t[0], e_left))
    aid = 3
    if ring_end:
        right = dict(zip((t[-1], b[-1]), ring_arcs(aid, t[-1], b[-1], e_right, top[-1], "e")))
        aid += 4
    else:
        arcs.append(Arc(2, t[-1], b[-1], e_right))
        right = {t[-1]: 2, b[-1]: -2}
    left = {t[0]: -1, b[0]: 1}
    for i in range(r - 1):
        arcs.append(Arc(aid, t[i], t[i + 1], top[i]))
        right[t[i]], left[t[i + 1]] = aid, -aid
        arcs.append(Arc(aid + 1, b[i], b[i + 1], bottom[i]))
        right[b[i]], left[b[i + 1]] = aid + 1, -(aid + 1)
        aid += 2
    vert = {}
    for i in range(r):
        down = i % 2 == 0
        src, dst = (t[i], b[i]) if down else (b[i], t[i])
        if index == 3 and i % 2 == ring:
            out_end, in_end = ring_arcs(aid, src, dst, rc[i], top[min(i, r - 2)], i)
            aid += 4
        else:
            arcs.append(Arc(aid, src, dst, rc[i]))
            out_end, in_end = aid, -aid
            aid += 1
        vert[src], vert[dst] = out_end, in_end
    rot = {}
    for i in range(r):
        rt = [left[t[i]], right[t[i]], vert[t[i]]]
        rb = [left[b[i]], vert[b[i]], right[b[i]]]
        pt, pb = phase
        if index == 2:
            # checkerboard: neighbors in a row or a column differ
            if i % 2 == pt:
                rt = rt[::-1]
            if i % 2 != pb:
                rb = rb[::-1]
        else:
            if pt:
                rt = rt[::-1]
            if pb:
                rb = rb[::-1]
        rot[t[i]], rot[b[i]] = tuple(rt), tuple(rb)
    rot.update(extra)
    order = t + b + sorted(extra)
    return CurrentGraph(n, index, tuple(arcs), tuple((v, rot[v]) for v in order))


# ---------------------------------------------------------------------------
# Enumeration


def _vortex_plan(plan) -> list[tuple[str, str]]:
    if plan is None:
        return []
    if isinstance(plan, dict):
        items = list(plan.items())
    else:
        items = []
        names = iter("xyzuvwrst")
        for p in plan:
            items.append(p if isinstance(p, tuple) else (next(names), p))
    for letter, typ in items:
        if typ not in VORTEX_TYPES:
            raise CurrentGraphError(f"unknown vortex type {typ!r}")
    return items


def skeleton_shapes(n: int, k: int, plan, leaves: int) -> tuple[int, int] | None:
    """Edge count and number of KCL vertices forced by the log lengths, or None."""
    twice = k * (n - 1) + leaves
    if twice % 2:
        return None
    e = twice // 2
    vdeg = sum(k if t == "V3" else 3 for _, t in plan)
    rest = 2 * e - leaves - vdeg
    if rest < 0 or rest % 3:
        return None
    return e, rest // 3


def _stub_matchings(owners: list, loops_ok: set):
    m = len(owners)
    used = [False] * m

    def rec(acc):
        try:
            i = used.index(False)
        except ValueError:
            yield list(acc)
            return
        used[i] = True
        for j in range(i + 1, m):
            if used[j]:
                continue
            if owners[i] == owners[j] and owners[i] not in loops_ok:
                continue
            used[j] = True
            acc.append((i, j))
            yield from rec(acc)
            acc.pop()
            used[j] = False
        used[i] = False

    yield from rec([])


def _skeletons(kinds: dict, degs: dict):
    """Connected multigraphs with the given degrees, one per isomorphism class."""
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_node_match

    owners = [v for v in kinds for _ in range(degs[v])]
    loops_ok = {v for v in kinds if kinds[v] == "V1"}
    reps = {}
    nm = categorical_node_match("kind", None)
    for match in _stub_matchings(owners, loops_ok):
        g = nx.MultiGraph()
        for v in kinds:
            g.add_node(v, kind=kinds[v])
        for i, j in match:
            g.add_edge(owners[i], owners[j])
        if not nx.is_connected(g):
            continue
        h = nx.weisfeiler_lehman_graph_hash(nx.Graph(g), node_attr="kind")
        key = (h, tuple(sorted(d for _, d in g.degree())), g.number_of_edges())
        bucket = reps.setdefault(key, [])
        if any(nx.is_isomorphic(g, r, node_match=nm) for r, _ in bucket):
            continue
        bucket.append((g, match))
        yield [(owners[i], owners[j]) for i, j in match]


def _cyclic_orders(items):
    from itertools import permutations

    if len(items) <= 2:
        yield tuple(items)
        return
    first, rest = items[0], items[1:]
    for p in permutations(rest):
        yield (first,) + p


def iter_current_graphs(n: int, k: int, vortex_plan=None, orientable: bool = True,
                        leaves: int | None = None, node_budget: int | None = None):
    """Current graphs with group Z_n and index k that validate and derive, in a fixed order."""
    from itertools import product

    if k < 1 or n % k:
        raise CurrentGraphError(f"index {k} does not divide the group order {n}")
    plan = _vortex_plan(vortex_plan)
    leaf_opts = [leaves] if leaves is not None else range(0, 3)
    nodes = 0
    for lv in leaf_opts:
        shape = skeleton_shapes(n, k, plan, lv)
        if shape is None:
            continue
        e, c = shape
        kinds, degs = {}, {}
        for i in range(c):
            kinds[f"u{i}"], degs[f"u{i}"] = "V1", 3
        for i in range(lv):
            kinds[f"l{i}"], degs[f"l{i}"] = "V2", 1
        vmark = []
        for letter, typ in plan:
            kinds[letter], degs[letter] = typ, (k if typ == "V3" else 3)
            vmark.append((letter, letter, typ))
        for edges in _skeletons(kinds, degs):
            inc = {v: [] for v in kinds}
            for aid, (a, b) in enumerate(edges, 1):
                inc[a].append(aid)
                inc[b].append(-aid)
            sign_opts = [(False,)] if orientable else [(False, True)] * len(edges)
            for rots in product(*(_cyclic_orders(inc[v]) for v in kinds)):
                for tw in product(*sign_opts) if not orientable else [(False,) * len(edges)]:
                    if not orientable and not any(tw):
                        continue
                    base = CurrentGraph(n, k, tuple(Arc(i, a, b, 1, tw[i - 1]) for i, (a, b) in enumerate(edges, 1)),
                                        tuple(zip(kinds, rots)), tuple(vmark))
                    circuits = trace_circuits(base)
                    if len(circuits) != k:
                        continue
                    for cg in _assign_currents(base, circuits):
                        nodes += 1
                        if node_budget is not None and nodes > node_budget:
                            from .engine import BudgetExceeded
                            raise BudgetExceeded
                        try:
                            emb = derive(cg)
                        except CurrentGraphError:
                            continue
                        if emb.orientable == orientable:
                            yield cg, emb


def _assign_currents(base: CurrentGraph, circuits):
    n = base.group_order
    arcs = list(base.arcs)
    where = {}
    for c, walk in enumerate(circuits):
        for t, st in enumerate(walk):
            collapsed = base.degree(st.vertex) == 1 and st.vertex not in base.vortex
            where.setdefault(abs(st.end), []).append((c, collapsed, st.sense, st.end))
    used = [set() for _ in circuits]
    cur = {}
    inc = {v: r for v, r in base.rotation}
    kcl = [v for v in inc if len(inc[v]) == 3 and v not in base.vortex]

    def reading(s, x, tw):
        return x if s > 0 or tw else (-x) % n

    def kcl_ok(v):
        ids = [abs(s) for s in inc[v]]
        if any(i not in cur for i in ids):
            return True
        tot = 0
        for s in inc[v]:
            a = arcs[abs(s) - 1]
            tot += reading(-s, cur[abs(s)], a.twisted)
        return tot % n == 0

    def rec(i):
        if i == len(arcs):
            yield CurrentGraph(n, base.index, tuple(Arc(a.id, a.tail, a.head, cur[a.id], a.twisted) for a in arcs),
                               base.rotation, base.vortices)
            return
        a = arcs[i]
        for x in range(1, n):
            marks = []
            ok = True
            for c, collapsed, sense, s in where[a.id]:
                if collapsed:
                    continue
                r = reading(s, x, a.twisted) * sense % n
                if r in used[c]:
                    ok = False
                    break
                used[c].add(r)
                marks.append((c, r))
            if ok:
                cur[a.id] = x
                if all(kcl_ok(v) for v in (a.tail, a.head) if v in kcl):
                    yield from rec(i + 1)
                del cur[a.id]
            for c, r in marks:
                used[c].discard(r)

    yield from rec(0)
