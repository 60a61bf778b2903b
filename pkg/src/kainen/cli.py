"""Command-line front end.

Exit codes: 0 verified or found, 1 refuted or nothing found, 2 input error,
3 budget exceeded or otherwise undecided.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from . import catalog
from .current_graphs import CurrentGraphError, derive, parse_current_graph, validate
from .drawings import Drawing, DrawingError, complete_kainen, format_drawing, parse_drawing, verify_kainen
from .search import BUDGET, FOUND, INCONCLUSIVE, NONE, SearchError, conjecture_check, find_drawing, find_kainen
from .surfaces import (
    Cross,
    EmbeddingError,
    Graph,
    SurfaceId,
    bipartite_profile,
    complete_profile,
    format_rotation_text,
    format_vertex,
    kainen_lower_bound,
    sort_edges,
    sort_vertices,
)

OK, REFUTED, INPUT_ERROR, UNDECIDED = 0, 1, 2, 3

_STATUS_CODES = {FOUND: OK, NONE: REFUTED, BUDGET: UNDECIDED, INCONCLUSIVE: UNDECIDED}


class InputError(Exception):
    pass


def parse_graph_spec(text: str) -> Graph:
    """``K<n>`` or ``K<m>,<n>``."""
    m = re.fullmatch(r"\s*K(\d+)(?:,(\d+))?\s*", text)
    if not m:
        raise InputError(f"bad graph spec {text!r}; expected K<n> or K<m>,<n>")
    a = int(m.group(1))
    if m.group(2) is None:
        if a < 1:
            raise InputError("K<n> needs n >= 1")
        return Graph.complete(a)
    b = int(m.group(2))
    if a < 1 or b < 1:
        raise InputError("K<m>,<n> needs m, n >= 1")
    return Graph.complete_bipartite(a, b)


def parse_surface_spec(text: str) -> SurfaceId:
    try:
        return SurfaceId.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _align(d: Drawing, target: Graph) -> tuple[Drawing, str | None]:
    """Rename the drawing's vertices onto the target's, in sorted order, when the sets differ."""
    from .transforms import relabel_drawing

    have = d.original_graph.vertices
    if have == target.vertices or len(have) != len(target.vertices):
        return d, None
    mapping = {}
    for kind in (int, str):
        src = sort_vertices(v for v in have if isinstance(v, kind))
        dst = sort_vertices(v for v in target.vertices if isinstance(v, kind))
        if len(src) != len(dst):
            src = sort_vertices(have)
            dst = sort_vertices(target.vertices)
            mapping = dict(zip(src, dst))
            break
        mapping.update(zip(src, dst))
    note = ", ".join(f"{format_vertex(a)}->{format_vertex(b)}" for a, b in mapping.items() if a != b)
    return relabel_drawing(d, mapping), note


def _bound_name(target: Graph, s: SurfaceId) -> str | None:
    n = len(target.vertices)
    if target == Graph.complete(n) and n >= 3:
        p = complete_profile(n)
        if s == SurfaceId.S(p.h):
            return f"t({n})"
        if not s.orientable and s.genus == p.hprime:
            return f"t'({n})"
    bp = target.bipartition
    if bp is not None and min(map(len, bp)) >= 2:
        a, b = (len(x) for x in bp)
        if target == Graph.complete_bipartite(a, b):
            p = bipartite_profile(a, b)
            if s == SurfaceId.S(p.h):
                return f"t({a},{b})"
            if not s.orientable and s.genus == p.hprime:
                return f"t'({a},{b})"
    return None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_verify_embedding(args) -> int:
    d = parse_drawing(_read(args.file))
    emb = d.base
    g = emb.graph
    lengths = {}
    for f in emb.faces:
        lengths[len(f)] = lengths.get(len(f), 0) + 1
    print(f"vertices: {len(g.vertices)}")
    print(f"edges: {len(g.edges)}")
    print(f"faces: {len(emb.faces)} ({', '.join(f'{c}x{k}' for k, c in sorted(lengths.items()))})")
    print(f"euler characteristic: {emb.chi}")
    print(f"surface: {emb.surface}")
    print(f"triangular: {'yes' if emb.is_triangular else 'no'}")
    status = OK
    if args.surface is not None:
        want = parse_surface_spec(args.surface)
        ok = emb.surface == want
        print(f"{'PASS' if ok else 'FAIL'} surface: expected {want}")
        status = status if ok else REFUTED
    if args.graph is not None:
        target = parse_graph_spec(args.graph)
        aligned, _ = _align(d, target)
        ok = aligned.base.graph == target
        print(f"{'PASS' if ok else 'FAIL'} graph identity: expected {args.graph}")
        status = status if ok else REFUTED
    return status


def cmd_verify_kainen(args) -> int:
    target = parse_graph_spec(args.graph)
    s = parse_surface_spec(args.surface)
    d = parse_drawing(_read(args.file))
    d, note = _align(d, target)
    if note:
        print(f"relabel: {note}")
    d = Drawing(d.base, d.ledger, target)
    if not d.drawn_edges <= target.edges:
        print("FAIL graph identity: the file draws edges outside the target graph")
        return REFUTED
    missing = d.missing_edges()
    if missing:
        done = complete_kainen(d, missing)
        if done is None:
            print(f"FAIL completion: {len(missing)} missing edges cannot be inserted with one crossing each")
            return REFUTED
        print(f"completion: inserted {len(missing)} edges")
        for rec in done.ledger[len(d.ledger):]:
            print(f"  {rec}")
        d = done
    rep = verify_kainen(d, target, s, strict=args.strict)
    for line in rep.lines():
        print(line)
    if not rep.ok:
        return REFUTED
    name = _bound_name(target, s)
    delta = kainen_lower_bound(target, s)
    print(f"result: Kainen drawing, {d.crossings} crossings = {name or f'Kainen bound {delta}'}")
    if args.output:
        _write(format_drawing(d), args.output)
    return OK


def cmd_derive(args) -> int:
    try:
        cg = parse_current_graph(_read(args.file))
    except CurrentGraphError as exc:
        raise InputError(str(exc)) from None
    rep = validate(cg)
    for line in rep.lines():
        print(line, file=sys.stderr)
    if not rep.ok:
        print("current graph does not validate", file=sys.stderr)
        return REFUTED
    emb = derive(cg)
    print(f"derived: {len(emb.graph.vertices)} vertices, {len(emb.graph.edges)} edges, {emb.surface}, "
          f"{'triangular' if emb.is_triangular else 'not triangular'}", file=sys.stderr)
    _write(format_rotation_text(emb.rotation_system), args.output)
    return OK


def _emit_drawing(d: Drawing, args) -> None:
    print(f"surface: {d.surface}", file=sys.stderr)
    print(f"crossings: {d.crossings}", file=sys.stderr)
    _write(format_drawing(d), args.output)


def cmd_construct_complete(args) -> int:
    d = catalog.construct_complete(args.n, not args.nonorientable, args.genus_offset,
                                   time_budget=args.time_budget, threads=args.threads)
    _emit_drawing(d, args)
    return OK


def cmd_construct_bipartite(args) -> int:
    d = catalog.construct_bipartite(args.m, args.n, not args.nonorientable, args.genus_offset,
                                    time_budget=args.time_budget)
    _emit_drawing(d, args)
    return OK


def _report_outcome(out, args) -> int:
    print(f"status: {out.status}")
    for k in ("units", "nodes", "prunes", "leaves", "embeddings"):
        if k in out.stats:
            print(f"{k}: {out.stats[k]}")
    if out.detail:
        print(f"detail: {out.detail}")
    print(f"elapsed: {out.elapsed:.2f}s", file=sys.stderr)
    if out.found and getattr(args, "output", None):
        w = out.witness
        _write(format_drawing(w) if isinstance(w, Drawing) else format_rotation_text(w.rotation_system),
               args.output)
    return _STATUS_CODES[out.status]


def cmd_search_subembedding(args) -> int:
    g = parse_graph_spec(args.graph)
    s = parse_surface_spec(args.surface)
    tb = None if args.exhaustive else args.time_budget
    if args.crossings is None:
        out = find_kainen(g, s, args.node_budget, tb, args.threads, args.checkpoint)
    else:
        out = find_drawing(g, s, args.crossings, args.node_budget, tb, args.threads, args.checkpoint)
    if out.status == NONE and not args.exhaustive:
        out.detail = (out.detail + "; " if out.detail else "") + "search space exhausted"
    return _report_outcome(out, args)


def cmd_search_conjecture(args) -> int:
    out = conjecture_check(args.g, args.node_budget, args.time_budget, args.threads, args.checkpoint)
    return _report_outcome(out, args)


def _json_vertex(v):
    return str(v) if isinstance(v, Cross) else v


def drawing_to_json(d: Drawing) -> dict:
    """JSON mirror of the drawing file format."""
    rs = d.base.rotation_system
    return {
        "format": "kainen-drawing/1",
        "rotation": [[_json_vertex(v), [_json_vertex(w) for w in rs.rotation[v]]] for v in rs.vertices],
        "twisted": [[_json_vertex(a), _json_vertex(b)] for a, b in sort_edges(rs.twisted)],
        "missing": [[a, b] for a, b in d.missing_edges()],
        "crossings": [{"inserted": list(r.inserted), "crossed": list(r.crossed)} for r in d.ledger],
    }


def drawing_from_json(data: dict) -> Drawing:
    if data.get("format") != "kainen-drawing/1":
        raise InputError("unknown JSON format")

    def tok(v):
        return format_vertex(v)

    lines = [f"{tok(v)}. " + " ".join(tok(w) for w in nbrs) for v, nbrs in data["rotation"]]
    if data.get("twisted"):
        lines.append("twisted: " + " ".join(f"({tok(a)},{tok(b)})" for a, b in data["twisted"]))
    if data.get("missing"):
        lines.append("missing: " + " ".join(f"({tok(a)},{tok(b)})" for a, b in data["missing"]))
    lines.append("crossings:")
    for c in data.get("crossings", []):
        (a, b), (x, y) = c["inserted"], c["crossed"]
        lines.append(f"({tok(a)},{tok(b)}) over ({tok(x)},{tok(y)})")
    return parse_drawing("\n".join(lines) + "\n")


def cmd_export(args) -> int:
    d = parse_drawing(_read(args.file))
    _write(json.dumps(drawing_to_json(d), indent=1) + "\n", args.output)
    return OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kainen", description="Embeddings and Kainen drawings in closed surfaces.")
    p.add_argument("--threads", type=int, default=1, help="worker processes for searches")
    p.add_argument("--cache-dir", help="cache root (overrides $KAINEN_CACHE)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def budgets(q, time_default=None):
        q.add_argument("--node-budget", type=int, help="abort after this many search nodes")
        q.add_argument("--time-budget", type=float, default=time_default, help="abort after this many seconds")
        q.add_argument("--checkpoint", help="file recording finished search units")
        q.add_argument("-o", "--output", help="write the witness here")

    v = sub.add_parser("verify", help="check an embedding or a drawing")
    vs = v.add_subparsers(dest="what", required=True)
    ve = vs.add_parser("embedding", help="trace faces and identify the surface")
    ve.add_argument("file")
    ve.add_argument("--graph")
    ve.add_argument("--surface")
    ve.set_defaults(func=cmd_verify_embedding)
    vk = vs.add_parser("kainen", help="check a (sub)drawing against the Kainen bound")
    vk.add_argument("file")
    vk.add_argument("--graph", required=True)
    vk.add_argument("--surface", required=True)
    vk.add_argument("--strict", action="store_true", help="also replay the crossing ledger")
    vk.add_argument("-o", "--output", help="write the completed drawing here")
    vk.set_defaults(func=cmd_verify_kainen)

    d = sub.add_parser("derive", help="derived embedding of a current graph")
    d.add_argument("file")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_derive)

    c = sub.add_parser("construct", help="build a verified drawing")
    cs = c.add_subparsers(dest="family", required=True)
    cc = cs.add_parser("complete")
    cc.add_argument("--n", type=int, required=True)
    cb = cs.add_parser("bipartite")
    cb.add_argument("--m", type=int, required=True)
    cb.add_argument("--n", type=int, required=True)
    for q, fn in ((cc, cmd_construct_complete), (cb, cmd_construct_bipartite)):
        q.add_argument("--nonorientable", action="store_true")
        q.add_argument("--genus-offset", type=int, default=0, choices=(0, -1))
        q.add_argument("--time-budget", type=float, default=catalog.DEFAULT_BUDGET)
        q.add_argument("-o", "--output")
        q.set_defaults(func=fn)

    s = sub.add_parser("search", help="search for drawings")
    ss = s.add_subparsers(dest="what", required=True)
    se = ss.add_parser("subembedding", help="Kainen subembeddings of a graph in a surface")
    se.add_argument("--graph", required=True)
    se.add_argument("--surface", required=True)
    se.add_argument("--crossings", type=int, help="look for this many crossings instead of the Kainen bound")
    se.add_argument("--exhaustive", action="store_true", help="no time budget; a miss is a refutation")
    budgets(se, time_default=600.0)
    se.set_defaults(func=cmd_search_subembedding)
    sc = ss.add_parser("conjecture", help="Kainen drawing of K_M(g) in S_g")
    sc.add_argument("--g", type=int, required=True)
    budgets(sc)
    sc.set_defaults(func=cmd_search_conjecture)

    e = sub.add_parser("export", help="convert a drawing file")
    e.add_argument("--format", choices=("json",), default="json")
    e.add_argument("file")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.cache_dir:
        catalog.set_cache_dir(args.cache_dir)
    try:
        return args.func(args)
    except catalog.ExceptionalCase as exc:
        print(f"error: {exc} (true value {exc.value} in {exc.surface})", file=sys.stderr)
        return INPUT_ERROR
    except catalog.UnsupportedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except catalog.SearchBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNDECIDED
    except catalog.CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return REFUTED
    except (InputError, SearchError, CurrentGraphError, DrawingError, EmbeddingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    finally:
        if args.cache_dir:
            catalog.set_cache_dir(None)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
