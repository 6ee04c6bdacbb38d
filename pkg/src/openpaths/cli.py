"""Command-line front end.

Machine output is always one of the JSON file formats.  When ``--out`` is
given the JSON goes to that file and a human-readable table is printed
instead.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 semantic error,
4 non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import fileio
from .cospan import OpenMatrix, compose_open, tensor_open
from .errors import NonConvergenceError, OpenPathsError, ParseError
from .generators import SEED_ENV, default_seed, make_rng, random_composable_pair
from .matrix import RMatrix, closure, closure_series_stable
from .netgraph import (
    OpenGraph,
    blackbox_graph,
    compose_open_graph,
    free_category,
    is_functional_graph,
    paths_of_length,
)
from .pathsolve import binomial_sides, blackbox, is_functional, solve_compositional, star_open
from .qnet import (
    OpenNet,
    QNet,
    blackbox_reach,
    compose_open_net,
    fire,
    is_functional_net,
    kind_from_tag,
    reachable,
    translate_net,
)
from .quantale import NUMERIC_INSTANCES, quantale_from_tag

LOG_ENV = "OPENPATHS_LOG"
log = logging.getLogger("openpaths")


class UsageError(Exception):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Everything a command needs, gathered from argv and the environment."""

    command: str
    inputs: list = field(default_factory=list)
    algo: str = "fw"
    mode: str = "auto"
    bounds: dict = field(default_factory=dict)
    out: str | None = None
    log_level: str = "WARNING"
    seed: int = 0
    args: argparse.Namespace | None = None


# -- output helpers ----------------------------------------------------------------


def render_table(M: RMatrix) -> str:
    """Aligned text table of a matrix, with row and column labels."""
    q = M.q
    cells = [[""] + list(M.cols)]
    for i, r in enumerate(M.rows):
        cells.append([r] + [q.format(M.at(i, j)) for j in range(len(M.cols))])
    widths = [max(len(row[c]) for row in cells) for c in range(len(cells[0]))]
    lines = []
    for row in cells:
        parts = [row[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, obj, table: str | None = None):
    if cfg.out:
        fileio.write_file(cfg.out, obj)
        sys.stdout.write(table if table is not None else fileio.dumps(obj))
    else:
        sys.stdout.write(fileio.dumps(obj))


def _emit_matrix(cfg, M: RMatrix):
    _emit(cfg, fileio.matrix_to_obj(M), render_table(M))


def _load_any(path):
    obj = fileio.load_file(path)
    src = os.fspath(path)
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", source=src)
    if "op" in obj:
        return fileio.expr_from_obj(obj, base_dir=os.path.dirname(src) or ".", source=src)
    if "quantale" in obj:
        if "inputs" in obj or "outputs" in obj:
            return fileio.open_matrix_from_obj(obj, source=src)
        return fileio.matrix_from_obj(obj, source=src)
    if "kind" in obj:
        return fileio.net_from_obj(obj, source=src)
    if "edges" in obj:
        return fileio.graph_from_obj(obj, source=src)
    raise ParseError("cannot tell what kind of file this is", source=src)


def _load(path, *types):
    value = _load_any(path)
    if types and not isinstance(value, types):
        names = " or ".join(t.__name__ for t in types)
        raise OpenPathsError(f"{path}: expected {names}, got {type(value).__name__}")
    return value


def _parse_marking(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"marking: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    return fileio.marking_from_obj(obj)


# -- commands ------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig):
    a = cfg.args
    if a.expr:
        expr = fileio.load_expr(a.expr)
        result = solve_compositional(expr, algo=cfg.algo, mode=cfg.mode)
        if a.check_oracle:
            glued = solve_compositional(expr, algo="series", mode="glued")
            if not glued == result:
                raise OpenPathsError("oracle disagreement: compositional result differs from "
                                     "the truncated series on the glued network")
        return _emit_matrix(cfg, result)
    if not a.file:
        raise UsageError("solve: give a matrix file or --expr PLAN")
    value = _load(a.file, RMatrix, OpenMatrix)
    M = value.mat if isinstance(value, OpenMatrix) else value
    F = closure(M, cfg.algo)
    if a.check_oracle:
        S, K = closure_series_stable(M)
        if not S == F:
            raise OpenPathsError(f"oracle disagreement: series (K={K}) differs from {cfg.algo}")
        log.info("oracle agrees (series stabilized at K=%d)", K)
    if isinstance(value, OpenMatrix):
        solved = value.with_matrix(F)
        return _emit(cfg, fileio.open_matrix_to_obj(solved), render_table(F))
    return _emit_matrix(cfg, F)


def cmd_compose(cfg):
    M = _load(cfg.args.left, OpenMatrix)
    N = _load(cfg.args.right, OpenMatrix)
    C = compose_open(M, N)
    _emit(cfg, fileio.open_matrix_to_obj(C), render_table(C.mat))


def cmd_tensor(cfg):
    M = _load(cfg.args.left, OpenMatrix)
    N = _load(cfg.args.right, OpenMatrix)
    T = tensor_open(M, N)
    _emit(cfg, fileio.open_matrix_to_obj(T), render_table(T.mat))


def cmd_blackbox(cfg):
    M = _load(cfg.args.file, OpenMatrix)
    if cfg.args.solve:
        M = star_open(M, cfg.algo)
    _emit_matrix(cfg, blackbox(M))


def cmd_check_functional(cfg):
    value = _load(cfg.args.file, OpenMatrix, OpenGraph, OpenNet)
    if isinstance(value, OpenMatrix):
        ok = is_functional(value)
    elif isinstance(value, OpenGraph):
        ok = is_functional_graph(value)
    else:
        ok = is_functional_net(value)
    _emit(cfg, {"functional": ok}, f"functional: {str(ok).lower()}\n")


def cmd_binomial_check(cfg):
    a = cfg.args
    n_max = cfg.bounds["n"]
    if a.left and a.right:
        pairs = [(_load(a.left, OpenMatrix), _load(a.right, OpenMatrix))]
    elif a.random:
        rng = make_rng(cfg.seed)
        q = quantale_from_tag(a.quantale)
        pairs = [random_composable_pair(q, rng, functional=True) for _ in range(a.random)]
    else:
        raise UsageError("binomial-check: give two open-matrix files or --random COUNT")
    rows = []
    for k, (M, N) in enumerate(pairs):
        for n in range(n_max + 1):
            lhs, rhs = binomial_sides(M, N, n)
            rows.append({"pair": k, "n": n, "equal": lhs == rhs})
    ok = all(r["equal"] for r in rows)
    table = "".join(f"pair {r['pair']} n={r['n']}: {'equal' if r['equal'] else 'DIFFERENT'}\n"
                    for r in rows)
    _emit(cfg, {"all_equal": ok, "checks": rows}, table)
    if not ok:
        raise OpenPathsError("binomial expansion mismatch")


def _paths_obj(table_items):
    return [
        {"from": x, "to": y, "paths": [{"start": p.start, "edges": list(p.edges), "end": p.end}
                                       for p in ps]}
        for (x, y), ps in table_items if ps
    ]


def cmd_graph_paths(cfg):
    G = _load(cfg.args.file, OpenGraph, fileio.Graph)
    graph = G.graph if isinstance(G, OpenGraph) else G
    if cfg.args.length is not None:
        table = paths_of_length(graph, cfg.args.length)
        items = sorted(table.items())
        K = cfg.args.length
    else:
        K = cfg.bounds["K"]
        items = sorted(free_category(graph, K).table.items())
    obj = {"K": K, "pairs": _paths_obj(items)}
    _emit(cfg, obj, "".join(f"{d['from']} -> {d['to']}: {len(d['paths'])}\n" for d in obj["pairs"]))


def cmd_graph_blackbox(cfg):
    G = _load(cfg.args.file, OpenGraph)
    table = blackbox_graph(G, cfg.bounds["K"])
    obj = {"K": table.K, "pairs": _paths_obj(table.table.items())}
    _emit(cfg, obj, "".join(f"{x} -> {y}: {n}\n" for (x, y), n in table.counts().items()))


def cmd_graph_compose(cfg):
    G = _load(cfg.args.left, OpenGraph)
    H = _load(cfg.args.right, OpenGraph)
    _emit(cfg, fileio.graph_to_obj(compose_open_graph(G, H)))


def _net_of(value):
    return value.net if isinstance(value, OpenNet) else value


def cmd_net_fire(cfg):
    net = _net_of(_load(cfg.args.file, QNet, OpenNet))
    m = _parse_marking(cfg.args.marking)
    net.validate_marking(m)
    results = sorted(fire(net, m, cfg.args.transition))
    obj = {"transition": cfg.args.transition, "results": [dict(r) for r in results]}
    _emit(cfg, obj, "".join(f"{r!r}\n" for r in results) or "not enabled\n")


def cmd_net_reach(cfg):
    net = _net_of(_load(cfg.args.file, QNet, OpenNet))
    m0 = _parse_marking(cfg.args.marking)
    res = reachable(net, m0, cfg.bounds["depth"], cfg.bounds.get("cap"))
    rows = [{"marking": dict(m), "depth": len(res.witnesses[m]),
             "witness": [t for t, _ in res.witnesses[m].steps]} for m in res.sorted()]
    obj = {"depth": res.depth, "markings": rows,
           "pruned": [dict(m) for m in sorted(res.pruned)]}
    table = "".join(f"{m!r}  (depth {len(res.witnesses[m])})\n" for m in res.sorted())
    if res.pruned:
        table += f"pruned {len(res.pruned)} markings above the cap\n"
    _emit(cfg, obj, table)


def cmd_net_compose(cfg):
    P = _load(cfg.args.left, OpenNet)
    Q = _load(cfg.args.right, OpenNet)
    _emit(cfg, fileio.net_to_obj(compose_open_net(P, Q)))


def cmd_net_blackbox(cfg):
    P = _load(cfg.args.file, OpenNet)
    rel = blackbox_reach(P, cfg.bounds["cap"], cfg.bounds["depth"])
    rows = [{"input": dict(x), "output": dict(y), "counts": list(v)}
            for (x, y), v in sorted(rel.counts.items()) if any(v)]
    obj = {"kind": P.kind.tag, "depth": rel.depth, "relation": rows}
    table = "".join(f"{x!r} => {y!r}: {sum(v)} witnesses\n"
                    for (x, y), v in sorted(rel.counts.items()) if any(v))
    _emit(cfg, obj, table)


def cmd_net_translate(cfg):
    value = _load(cfg.args.file, QNet, OpenNet)
    target = kind_from_tag(cfg.args.to)
    net = translate_net(_net_of(value), target)
    if isinstance(value, OpenNet):
        net = OpenNet(value.leg_in, value.leg_out, net)
    _emit(cfg, fileio.net_to_obj(net))


def cmd_export_dot(cfg):
    value = _load_any(cfg.args.file)
    if isinstance(value, OpenMatrix):
        text = fileio.matrix_to_dot(value.mat)
    elif isinstance(value, RMatrix):
        text = fileio.matrix_to_dot(value)
    elif isinstance(value, (OpenGraph, fileio.Graph)):
        text = fileio.graph_to_dot(value)
    elif isinstance(value, (OpenNet, QNet)):
        text = fileio.net_to_dot(value)
    else:
        raise OpenPathsError("export-dot: unsupported file")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- argument parsing ------------------------------------------------------------------


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help=f"random seed (default: ${SEED_ENV} or a fixed value)")
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        help=f"logging level (default: ${LOG_ENV} or WARNING)")
    common.add_argument("--out", "-o", default=argparse.SUPPRESS,
                        help="write JSON here and print a table")
    p = _Parser(prog="openpaths", parents=[common],
                description="Compositional path problems and net reachability.")
    p.set_defaults(seed=None, log_level=None, out=None)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve a matrix or a composition plan")
    s.add_argument("file", nargs="?")
    s.add_argument("--expr", help="composition plan file")
    s.add_argument("--algo", choices=["fw", "series", "square"], default="fw")
    s.add_argument("--mode", choices=["auto", "glued", "compositional"], default="auto")
    s.add_argument("--check-oracle", action="store_true")
    s.set_defaults(func=cmd_solve)

    for name, func, helptext in (("compose", cmd_compose, "glue two open matrices"),
                                 ("tensor", cmd_tensor, "place two open matrices side by side")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("left")
        s.add_argument("right")
        s.set_defaults(func=func)

    s = sub.add_parser("blackbox", parents=[common], help="restrict an open matrix to its boundary")
    s.add_argument("file")
    s.add_argument("--solve", action="store_true", help="solve the apex first")
    s.add_argument("--algo", choices=["fw", "series", "square"], default="fw")
    s.set_defaults(func=cmd_blackbox)

    s = sub.add_parser("check-functional", parents=[common], help="are inputs sources and outputs sinks?")
    s.add_argument("file")
    s.set_defaults(func=cmd_check_functional)

    s = sub.add_parser("binomial-check", parents=[common], help="compare both sides of the binomial expansion")
    s.add_argument("left", nargs="?")
    s.add_argument("right", nargs="?")
    s.add_argument("--n", type=_positive("n"), default=6)
    s.add_argument("--random", type=_positive("count"), default=0,
                   help="check this many seeded random functional pairs instead")
    s.add_argument("--quantale", default="tropical")
    s.set_defaults(func=cmd_binomial_check)

    g = sub.add_parser("graph", parents=[common], help="graph commands").add_subparsers(dest="sub", parser_class=_Parser)
    s = g.add_parser("paths", parents=[common], help="paths up to length K (or of one length)")
    s.add_argument("file")
    s.add_argument("--K", type=_positive("K"), default=None)
    s.add_argument("--length", type=_positive("length"), default=None)
    s.set_defaults(func=cmd_graph_paths, need_K=False)
    s = g.add_parser("blackbox", parents=[common], help="boundary path table up to length K")
    s.add_argument("file")
    s.add_argument("--K", type=_positive("K"), required=True)
    s.set_defaults(func=cmd_graph_blackbox)
    s = g.add_parser("compose", parents=[common], help="glue two open graphs")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_graph_compose)

    n = sub.add_parser("net", parents=[common], help="net commands").add_subparsers(dest="sub", parser_class=_Parser)
    s = n.add_parser("fire", parents=[common], help="fire one transition")
    s.add_argument("file")
    s.add_argument("--marking", required=True, help='JSON, e.g. \'{"p1": 1}\'')
    s.add_argument("--transition", required=True)
    s.set_defaults(func=cmd_net_fire)
    s = n.add_parser("reach", parents=[common], help="bounded reachability")
    s.add_argument("file")
    s.add_argument("--marking", required=True)
    s.add_argument("--depth", type=_positive("depth"), required=True)
    s.add_argument("--cap", type=_positive("cap"), default=None)
    s.set_defaults(func=cmd_net_reach)
    s = n.add_parser("compose", parents=[common], help="glue two open nets")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_net_compose)
    s = n.add_parser("blackbox", parents=[common], help="boundary reachability relation")
    s.add_argument("file")
    s.add_argument("--cap", type=_positive("cap"), required=True)
    s.add_argument("--depth", type=_positive("depth"), required=True)
    s.set_defaults(func=cmd_net_blackbox)
    s = n.add_parser("translate", parents=[common], help="change a natural net's resource kind")
    s.add_argument("file")
    s.add_argument("--to", required=True)
    s.set_defaults(func=cmd_net_translate)

    s = sub.add_parser("export-dot", parents=[common], help="write a matrix, graph or net as DOT")
    s.add_argument("file")
    s.set_defaults(func=cmd_export_dot)
    return p


def make_config(args) -> RunConfig:
    bounds = {}
    for key in ("K", "depth", "cap", "n"):
        v = getattr(args, key, None)
        if v is not None:
            bounds[key] = v
    if getattr(args, "func", None) is cmd_graph_paths and args.K is None and args.length is None:
        raise UsageError("graph paths: give --K or --length")
    if getattr(args, "func", None) is cmd_net_translate:
        try:
            kind_from_tag(args.to)
        except ValueError as exc:
            raise UsageError(f"net translate: {exc}") from None
    inputs = [getattr(args, k) for k in ("file", "left", "right") if getattr(args, k, None)]
    return RunConfig(
        command=args.command,
        inputs=inputs,
        algo=getattr(args, "algo", "fw"),
        mode=getattr(args, "mode", "auto"),
        bounds=bounds,
        out=args.out,
        log_level=(args.log_level or os.environ.get(LOG_ENV) or "WARNING").upper(),
        seed=args.seed if args.seed is not None else default_seed(),
        args=args,
    )


def _configure_logging(level):
    # a fresh handler per run so it writes to the current stderr
    for h in list(log.handlers):
        if getattr(h, "_openpaths", False):
            log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._openpaths = True
    log.addHandler(handler)
    log.setLevel(level)
    log.propagate = False


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_usage().strip())
        cfg = make_config(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    level = getattr(logging, cfg.log_level, None)
    if not isinstance(level, int):
        sys.stderr.write(f"openpaths: unknown log level {cfg.log_level!r}\n")
        return 1
    _configure_logging(level)
    log.debug("command=%s seed=%d", cfg.command, cfg.seed)
    try:
        cfg.args.func(cfg)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except NonConvergenceError as exc:
        where = f" after {exc.iterations} iterations" if exc.iterations is not None else ""
        sys.stderr.write(f"error: {exc}{where}\n")
        return exc.exit_code
    except OpenPathsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
