"""Command-line front end.

Subcommands: gen, verify, search, surgery, catalog, dual, kmn, sweep.
All embeddings cross the process boundary as emap text; every command that
produces an embedding also prints its certificate.  Exit codes: 0 success,
1 domain failure (inadmissible parameters, unsatisfiable search, failed
expectation), 2 I/O or format error.
"""

from __future__ import annotations

import argparse
import sys

from . import catalog, emap, graphalg, planner, search, serialize, surgery
from .errors import FormatError, QuadforgeError
from .serialize import _parse_label


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except QuadforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadforge")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress all output except certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a minimal face-simple quadrangulation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--kind", choices=("orientable", "nonorientable"), required=True)
    p.add_argument("--plan-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify", help="certify an emap file")
    p.add_argument("file")
    p.add_argument("--expect", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("search", help="search for an embedding matching a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=("exact", "anneal", "random"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("surgery", help="apply a surgery operation to emap files")
    ops = p.add_subparsers(dest="op", required=True)

    q = ops.add_parser("diamond", help="diamond sum of two embeddings")
    q.add_argument("file_a")
    q.add_argument("vertex_a")
    q.add_argument("file_b")
    q.add_argument("vertex_b")
    q.add_argument("--offset", type=int, default=0)
    q.add_argument("--reflect", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=_cmd_diamond)

    q = ops.add_parser("handle", help="augment along a 4-cycle of new edges")
    q.add_argument("file")
    q.add_argument("cycle", nargs=4)
    q.add_argument("--out")
    q.set_defaults(func=_cmd_handle)

    q = ops.add_parser("delete2", help="remove a degree-2 vertex, merging its faces")
    q.add_argument("file")
    q.add_argument("vertex")
    q.add_argument("--out")
    q.set_defaults(func=_cmd_delete2)

    q = ops.add_parser("insert2", help="split a face with a new degree-2 vertex")
    q.add_argument("file")
    q.add_argument("face", nargs=4)
    q.add_argument("corner")
    q.add_argument("--out")
    q.set_defaults(func=_cmd_insert2)

    p = sub.add_parser("catalog", help="manage the witness catalog")
    p.add_argument("action", choices=("build", "verify", "list"))
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("dual", help="print the dual multigraph of an embedding")
    p.add_argument("file")
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("kmn", help="build a complete-bipartite quadrangulation")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kmn)

    p = sub.add_parser("sweep", help="exhaustive minimality sweep on a surface")
    p.add_argument("--surface", choices=("sphere", "projective"), required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    return parser


# ---------------------------------------------------------------------------
# Shared output helpers.
# ---------------------------------------------------------------------------

def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _emit(args, emb: emap.Embedding) -> None:
    """Write the emap (to --out or stdout) and print the certificate."""
    text = serialize.write_emap(emb)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        _say(args, f"wrote {out}")
    elif not args.quiet:
        sys.stdout.write(text)
    sys.stdout.write(emap.certify(emb).to_text())


def _load(path: str) -> emap.Embedding:
    with open(path) as fh:
        return serialize.parse_emap(fh.read())


# ---------------------------------------------------------------------------
# Subcommand bodies.
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    req = planner.ParamRequest(n=args.n, t=args.t, kind=args.kind)
    if not planner.admissible(req):
        print(f"error: {planner._inadmissible_reason(req)}", file=sys.stderr)
        return 1
    if args.plan_only:
        print(planner.plan_text(planner.plan(req)), end="")
        return 0
    emb, cert, node = planner.generate(req)
    _say(args, planner.plan_text(node).rstrip("\n"))
    _emit(args, emb)
    return 0


def _cmd_verify(args) -> int:
    emb = _load(args.file)
    cert = emap.certify(emb)
    text = cert.to_text()
    sys.stdout.write(text)
    have = dict(line.split("=", 1) for line in text.splitlines())
    failed = []
    for item in args.expect:
        if "=" not in item:
            print(f"error: malformed --expect {item!r}", file=sys.stderr)
            return 2
        key, want = item.split("=", 1)
        if key not in have:
            print(f"error: unknown certificate key {key!r}", file=sys.stderr)
            return 2
        if have[key] != want:
            failed.append(f"{key}: expected {want}, got {have[key]}")
    if failed:
        for line in failed:
            print(f"mismatch: {line}", file=sys.stderr)
        return 1
    return 0


def _parse_spec_file(text: str) -> search.WitnessSpec:
    graph = None
    chi = None
    orientable = None
    predicates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "graph":
            graph = graphalg.parse_expr(rest).eval()
        elif key == "chi":
            chi = int(rest)
        elif key == "orientable":
            if rest not in ("true", "false", "either"):
                raise FormatError(f"line {lineno}: orientable must be true/false/either")
            orientable = None if rest == "either" else rest == "true"
        elif key == "predicate":
            name, *toks = rest.split()
            predicates.append(_parse_predicate(name, toks, lineno))
        else:
            raise FormatError(f"line {lineno}: unknown spec key {key!r}")
    if graph is None or chi is None:
        raise FormatError("spec file needs both a graph and a chi line")
    return search.WitnessSpec(graph=graph, chi=chi, orientable=orientable,
                              predicates=tuple(predicates))


def _parse_predicate(name: str, toks: list, lineno: int) -> tuple:
    labels = tuple(_parse_label(t) for t in toks)
    if name in ("face_simple", "universal_vertex",
                "nearly_face_simple_except_some_universal"):
        if labels:
            raise FormatError(f"line {lineno}: {name} takes no arguments")
        return (name,)
    if name in ("nearly_face_simple_except", "delete_degree2_face_simple"):
        if len(labels) != 1:
            raise FormatError(f"line {lineno}: {name} takes one vertex")
        return (name, labels[0])
    if name == "has_handle_site":
        if len(labels) != 4:
            raise FormatError(f"line {lineno}: {name} takes a 4-cycle")
        return (name, labels)
    if name == "double_handle":
        if len(labels) != 8:
            raise FormatError(f"line {lineno}: {name} takes two 4-cycles")
        return (name, labels[:4], labels[4:])
    raise FormatError(f"line {lineno}: unknown predicate {name!r}")


def _search_worker(payload):
    spec, method, seed, restarts = payload
    if method == "anneal":
        return search.search_anneal(spec, seed=seed, restarts=restarts)
    return search.search_randomized(spec, seed=seed, restarts=restarts)


def _cmd_search(args) -> int:
    spec = _parse_spec_file(open(args.spec).read())
    if args.method == "exact":
        result = search.search_exact(spec, args.budget)
    else:
        restarts = args.restarts if args.restarts is not None else (
            64 if args.method == "anneal" else 512)
        if args.workers > 1:
            result = _parallel_search(spec, args.method, args.seed,
                                      restarts, args.workers)
        else:
            result = _search_worker((spec, args.method, args.seed, restarts))
    if result.status == "found":
        _emit(args, result.embedding)
        return 0
    print(f"no witness: search status {result.status} "
          f"after {result.nodes} nodes", file=sys.stderr)
    return 1


def _parallel_search(spec, method, seed, restarts, workers):
    """Split restarts across worker processes; first hit wins (order of
    completion, so multi-worker runs are not reproducible)."""
    import concurrent.futures

    per = max(1, restarts // workers)
    payloads = [(spec, method, seed + k, per) for k in range(workers)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_search_worker, p) for p in payloads]
        for fut in concurrent.futures.as_completed(futures):
            result = fut.result()
            if result.status == "found":
                for other in futures:
                    other.cancel()
                return result
    return result


def _cmd_diamond(args) -> int:
    a = _load(args.file_a)
    b = _load(args.file_b)
    out = surgery.diamond_sum(a, _parse_label(args.vertex_a),
                              b, _parse_label(args.vertex_b),
                              offset=args.offset,
                              reflect=True if args.reflect else None)
    _emit(args, out)
    return 0


def _cmd_handle(args) -> int:
    emb = _load(args.file)
    cycle = tuple(_parse_label(t) for t in args.cycle)
    sites = surgery.find_handle_sites(emb, cycle)
    if not sites:
        print(f"error: no handle site for cycle {cycle}", file=sys.stderr)
        return 1
    _emit(args, surgery.handle_augment(emb, sites[0]))
    return 0


def _cmd_delete2(args) -> int:
    emb = _load(args.file)
    _emit(args, surgery.delete_degree2(emb, _parse_label(args.vertex)))
    return 0


def _cmd_insert2(args) -> int:
    emb = _load(args.file)
    face = tuple(_parse_label(t) for t in args.face)
    out, z = surgery.insert_degree2(emb, face, _parse_label(args.corner))
    _say(args, f"inserted vertex {z}")
    _emit(args, out)
    return 0


def _cmd_catalog(args) -> int:
    if args.action == "build":
        embs = catalog.build_all()
        _say(args, f"built {len(embs)} witnesses in {catalog.catalog_dir()}")
        return 0
    if args.action == "verify":
        catalog.verify_all()
        _say(args, "catalog verified")
        return 0
    for rec in sorted(catalog.record_table(), key=lambda r: r.name):
        tag = "orientable" if rec.orientable else "nonorientable"
        print(f"{rec.name} chi={rec.chi} {tag} {rec.provenance}")
    return 0


def _cmd_dual(args) -> int:
    emb = _load(args.file)
    dual = emap.dual_multigraph(emb)
    print(f"faces {dual.number_of_nodes()}")
    for fa, fb, data in sorted(dual.edges(data=True),
                               key=lambda x: (x[0], x[1], str(x[2]))):
        print(f"{fa} {fb} via {data['primal'][0]}-{data['primal'][1]}")
    return 0


def _cmd_kmn(args) -> int:
    emb = catalog.build_kmn(args.m, args.n)
    _emit(args, emb)
    return 0


def _cmd_sweep(args) -> int:
    if args.max_n > 8 and not args.force:
        print("error: sweeps beyond n=8 are expensive; pass --force to proceed",
              file=sys.stderr)
        return 1
    results = search.sweep_minimal(args.surface, args.max_n)
    for n in sorted(results):
        hits = results[n]
        print(f"n={n} face_simple_quadrangulations={len(hits)}")
        for g in hits:
            edges = " ".join(f"{u}-{v}" for u, v in g.sorted_edges())
            print(f"  witness {edges}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
