"""JSON file formats, canonical serialization, and DOT import/export.

Every writer here is deterministic: the same value always serializes to the
same bytes.  Infinity is written as the string ``"inf"`` and integral
floats as integers.
"""
from __future__ import annotations

import json
import os
import re
from pathlib import Path as FsPath

from .cospan import OpenMatrix
from .errors import ParseError
from .matrix import FiniteFunction, RMatrix
from .netgraph import Graph, OpenGraph
from .pathsolve import Compose, Leaf, Tensor
from .qnet import Marking, OpenNet, QNet, kind_from_tag
from .quantale import quantale_from_tag

__all__ = [
    "dumps",
    "loads",
    "load_file",
    "write_file",
    "matrix_to_obj",
    "matrix_from_obj",
    "open_matrix_to_obj",
    "open_matrix_from_obj",
    "graph_to_obj",
    "graph_from_obj",
    "net_to_obj",
    "net_from_obj",
    "expr_from_obj",
    "load_matrix",
    "load_open_matrix",
    "load_graph",
    "load_net",
    "load_expr",
    "matrix_to_dot",
    "graph_to_dot",
    "net_to_dot",
    "graph_from_dot",
]


# -- canonical JSON -------------------------------------------------------------


def _is_flat(v):
    return isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v)


def _is_small(v):
    """Lists of scalars and lists of such lists print on one line."""
    if _is_flat(v):
        return True
    return isinstance(v, list) and all(_is_flat(x) for x in v) and len(v) <= 1


def _is_shallow(d):
    """Dicts whose values are scalars, flat lists or dicts of scalars print on one line."""
    return all(not isinstance(x, (dict, list)) or _is_flat(x) or
               (isinstance(x, dict) and all(not isinstance(y, (dict, list)) for y in x.values()))
               for x in d.values())


def _emit(v, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if isinstance(v, dict):
        if not v:
            return "{}"
        if _is_shallow(v):
            return json.dumps(v, ensure_ascii=False)
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_emit(x, indent, level + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, list):
        if _is_small(v):
            return json.dumps(v, ensure_ascii=False)
        items = [inner + _emit(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(v, ensure_ascii=False)


def dumps(obj, indent: int = 2) -> str:
    """Canonical text: nested containers indented, rows of scalars on one line."""
    return _emit(obj, indent, 0) + "\n"


def loads(text: str, source: str | None = None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno, source=source) from None


def load_file(path):
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=path) from None
    return loads(text, source=path)


def write_file(path, obj):
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def _need(obj, key, what, source=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{what}: expected a JSON object", source=source)
    if key not in obj:
        raise ParseError(f"{what}: missing key {key!r}", source=source)
    return obj[key]


def _labels(v, what, source=None):
    if not isinstance(v, list) or not all(isinstance(x, (str, int)) for x in v):
        raise ParseError(f"{what}: expected a list of labels", source=source)
    out = [str(x) for x in v]
    if len(set(out)) != len(out):
        raise ParseError(f"{what}: duplicate labels", source=source)
    return out


def _leg(obj, key, dom, cod, what, source=None):
    mapping = _need(obj, key, what, source)
    if not isinstance(mapping, dict):
        raise ParseError(f"{what}: {key} must map boundary labels to vertices", source=source)
    mapping = {str(k): str(v) for k, v in mapping.items()}
    missing = [x for x in dom if x not in mapping]
    if missing:
        raise ParseError(f"{what}: {key} has no image for {missing}", source=source)
    bad = [v for v in mapping.values() if v not in cod]
    if bad:
        raise ParseError(f"{what}: {key} targets unknown vertices {bad}", source=source)
    return FiniteFunction(dom, cod, mapping)


# -- matrices -----------------------------------------------------------------------


def matrix_to_obj(M: RMatrix) -> dict:
    q = M.q
    obj = {"quantale": q.tag, "vertices": list(M.rows)}
    if not M.is_square:
        obj["columns"] = list(M.cols)
    obj["entries"] = [[q.dump(v) for v in row] for row in M.to_lists()]
    return obj


def matrix_from_obj(obj, source=None) -> RMatrix:
    what = "matrix"
    q = quantale_from_tag(_need(obj, "quantale", what, source))
    rows = _labels(_need(obj, "vertices", what, source), "vertices", source)
    cols = _labels(obj.get("columns", rows), "columns", source)
    entries = _need(obj, "entries", what, source)
    if not isinstance(entries, list) or len(entries) != len(rows):
        raise ParseError(f"{what}: expected {len(rows)} rows of entries", source=source)
    parsed = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != len(cols):
            raise ParseError(f"{what}: row {i} should have {len(cols)} entries", source=source)
        try:
            parsed.append([q.parse(v) for v in row])
        except ParseError as exc:
            raise ParseError(f"{what}: row {i}: {exc}", source=source) from None
    return RMatrix(rows, cols, q, parsed)


def open_matrix_to_obj(M: OpenMatrix) -> dict:
    obj = matrix_to_obj(M.mat)
    obj["inputs"] = list(M.input)
    obj["outputs"] = list(M.output)
    obj["leg_in"] = M.leg_in.as_dict()
    obj["leg_out"] = M.leg_out.as_dict()
    return obj


def open_matrix_from_obj(obj, source=None) -> OpenMatrix:
    mat = matrix_from_obj(obj, source)
    if not mat.is_square:
        raise ParseError("open matrix: apex must be square", source=source)
    X = _labels(_need(obj, "inputs", "open matrix", source), "inputs", source)
    Y = _labels(_need(obj, "outputs", "open matrix", source), "outputs", source)
    return OpenMatrix(
        _leg(obj, "leg_in", X, mat.rows, "open matrix", source),
        _leg(obj, "leg_out", Y, mat.rows, "open matrix", source),
        mat,
    )


# -- graphs -----------------------------------------------------------------------------


def graph_to_obj(G) -> dict:
    graph = G.graph if isinstance(G, OpenGraph) else G
    obj = {"vertices": list(graph.vertices), "edges": [list(e) for e in graph.edges]}
    if isinstance(G, OpenGraph):
        obj["inputs"] = list(G.input)
        obj["outputs"] = list(G.output)
        obj["leg_in"] = G.leg_in.as_dict()
        obj["leg_out"] = G.leg_out.as_dict()
    return obj


def graph_from_obj(obj, source=None):
    what = "graph"
    V = _labels(_need(obj, "vertices", what, source), "vertices", source)
    edges = _need(obj, "edges", what, source)
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 3 for e in edges):
        raise ParseError(f"{what}: edges must be [id, src, tgt] triples", source=source)
    for e in edges:
        if str(e[1]) not in V or str(e[2]) not in V:
            raise ParseError(f"{what}: edge {e[0]!r} has an unknown endpoint", source=source)
    ids = [str(e[0]) for e in edges]
    if len(set(ids)) != len(ids):
        raise ParseError(f"{what}: duplicate edge ids", source=source)
    graph = Graph(V, edges)
    if "inputs" not in obj and "outputs" not in obj:
        return graph
    X = _labels(obj.get("inputs", []), "inputs", source)
    Y = _labels(obj.get("outputs", []), "outputs", source)
    return OpenGraph(
        _leg(obj, "leg_in", X, graph.vertices, what, source) if X else FiniteFunction(X, graph.vertices, []),
        _leg(obj, "leg_out", Y, graph.vertices, what, source) if Y else FiniteFunction(Y, graph.vertices, []),
        graph,
    )


# -- nets -------------------------------------------------------------------------------------


def _marking_obj(m: Marking):
    return {p: c for p, c in m.items()}


def net_to_obj(P) -> dict:
    net = P.net if isinstance(P, OpenNet) else P
    obj = {
        "kind": net.kind.tag,
        "places": list(net.places),
        "transitions": [
            {"id": t.id, "src": _marking_obj(t.src), "tgt": _marking_obj(t.tgt)}
            for t in net.transitions
        ],
    }
    if isinstance(P, OpenNet):
        obj["inputs"] = list(P.input)
        obj["outputs"] = list(P.output)
        obj["leg_in"] = P.leg_in.as_dict()
        obj["leg_out"] = P.leg_out.as_dict()
    return obj


def marking_from_obj(obj, what="marking", source=None) -> Marking:
    if not isinstance(obj, dict) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in obj.values()):
        raise ParseError(f"{what}: expected an object of integer coefficients", source=source)
    return Marking(obj)


def net_from_obj(obj, source=None):
    what = "net"
    try:
        kind = kind_from_tag(str(_need(obj, "kind", what, source)))
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}", source=source) from None
    S = _labels(_need(obj, "places", what, source), "places", source)
    ts = _need(obj, "transitions", what, source)
    if not isinstance(ts, list):
        raise ParseError(f"{what}: transitions must be a list", source=source)
    parsed = []
    for t in ts:
        tid = _need(t, "id", "transition", source)
        src = marking_from_obj(t.get("src", {}), f"transition {tid} src", source)
        tgt = marking_from_obj(t.get("tgt", {}), f"transition {tid} tgt", source)
        for m in (src, tgt):
            for p, c in m.items():
                if p not in S:
                    raise ParseError(f"transition {tid}: unknown place {p!r}", source=source)
                if not kind.valid(c):
                    raise ParseError(f"transition {tid}: coefficient {c} invalid for {kind.tag}",
                                     source=source)
        parsed.append((str(tid), src, tgt))
    if len({t[0] for t in parsed}) != len(parsed):
        raise ParseError(f"{what}: duplicate transition ids", source=source)
    net = QNet(kind, S, parsed)
    if "inputs" not in obj and "outputs" not in obj:
        return net
    X = _labels(obj.get("inputs", []), "inputs", source)
    Y = _labels(obj.get("outputs", []), "outputs", source)
    return OpenNet(
        _leg(obj, "leg_in", X, net.places, what, source) if X else FiniteFunction(X, net.places, []),
        _leg(obj, "leg_out", Y, net.places, what, source) if Y else FiniteFunction(Y, net.places, []),
        net,
    )


# -- expressions ----------------------------------------------------------------------------


def expr_from_obj(obj, base_dir=".", source=None):
    """Build a composition expression; leaves reference open-matrix files or inline them."""
    op = _need(obj, "op", "expression", source)
    if op == "leaf":
        if "path" in obj:
            path = FsPath(base_dir) / str(obj["path"])
            return Leaf(load_open_matrix(path), name=str(obj["path"]))
        inline = obj.get("matrix", obj)
        return Leaf(open_matrix_from_obj(inline, source), name=str(obj.get("name", "")))
    if op in ("compose", "tensor"):
        left = expr_from_obj(_need(obj, "left", "expression", source), base_dir, source)
        right = expr_from_obj(_need(obj, "right", "expression", source), base_dir, source)
        return Compose(left, right) if op == "compose" else Tensor(left, right)
    raise ParseError(f"expression: unknown op {op!r}", source=source)


def load_matrix(path) -> RMatrix:
    return matrix_from_obj(load_file(path), source=os.fspath(path))


def load_open_matrix(path) -> OpenMatrix:
    return open_matrix_from_obj(load_file(path), source=os.fspath(path))


def load_graph(path):
    return graph_from_obj(load_file(path), source=os.fspath(path))


def load_net(path):
    return net_from_obj(load_file(path), source=os.fspath(path))


def load_expr(path):
    obj = load_file(path)
    return expr_from_obj(obj, base_dir=FsPath(path).parent, source=os.fspath(path))


# -- DOT --------------------------------------------------------------------------------------


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def matrix_to_dot(M: RMatrix, name: str = "M") -> str:
    """One edge per non-bottom entry, labelled with its weight."""
    q = M.q
    lines = [f"digraph {_q(name)} {{"]
    lines += [f"  {_q(v)};" for v in M.rows]
    bottom = q.bottom
    for i, u in enumerate(M.rows):
        for j, v in enumerate(M.cols):
            w = M.at(i, j)
            if not q.eq(w, bottom):
                lines.append(f"  {_q(u)} -> {_q(v)} [label={_q(q.format(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(G, name: str = "G") -> str:
    graph = G.graph if isinstance(G, OpenGraph) else G
    lines = [f"digraph {_q(name)} {{"]
    lines += [f"  {_q(v)};" for v in graph.vertices]
    lines += [f"  {_q(s)} -> {_q(t)} [label={_q(e)}];" for e, s, t in graph.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def net_to_dot(P, name: str = "N") -> str:
    """Places as circles, transitions as boxes, arcs labelled by coefficient."""
    net = P.net if isinstance(P, OpenNet) else P
    lines = [f"digraph {_q(name)} {{"]
    lines += [f"  {_q(p)} [shape=circle];" for p in net.places]
    for t in net.transitions:
        tid = "t:" + t.id
        lines.append(f"  {_q(tid)} [shape=box,label={_q(t.id)}];")
        for p, c in t.src.items():
            lines.append(f"  {_q(p)} -> {_q(tid)} [label={_q(c)}];")
        for p, c in t.tgt.items():
            lines.append(f"  {_q(tid)} -> {_q(p)} [label={_q(c)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_ID = r'(?:"(?:[^"\\]|\\.)*"|[A-Za-z0-9_.:]+)'
_EDGE = re.compile(rf"^\s*({_ID})\s*->\s*({_ID})\s*(\[(.*)\])?\s*;?\s*$")
_NODE = re.compile(rf"^\s*({_ID})\s*(\[(.*)\])?\s*;?\s*$")
_LABEL = re.compile(rf"label\s*=\s*({_ID})")


def _unq(s):
    if s.startswith('"'):
        return re.sub(r"\\(.)", r"\1", s[1:-1])
    return s


def graph_from_dot(text: str, source: str | None = None) -> Graph:
    """Read a ``digraph`` using node and edge statements only.

    Edge ids come from ``label`` attributes, falling back to ``e0, e1, ...``.
    """
    lines = text.splitlines()
    vertices, edges = [], []
    started = False
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("//")[0].strip()
        if not line:
            continue
        if not started:
            if re.match(r"^(strict\s+)?digraph\b", line) and line.endswith("{"):
                started = True
                continue
            raise ParseError("expected 'digraph ... {'", line=lineno, column=1, source=source)
        if line == "}":
            break
        m = _EDGE.match(line)
        if m:
            s, t = _unq(m.group(1)), _unq(m.group(2))
            for v in (s, t):
                if v not in vertices:
                    vertices.append(v)
            lab = _LABEL.search(m.group(4) or "")
            edges.append((_unq(lab.group(1)) if lab else f"e{len(edges)}", s, t))
            continue
        m = _NODE.match(line)
        if m and not re.match(r"^(graph|node|edge)\b", line):
            v = _unq(m.group(1))
            if v not in vertices:
                vertices.append(v)
            continue
        raise ParseError(f"unsupported DOT statement {line!r}", line=lineno, column=1, source=source)
    else:
        raise ParseError("missing closing '}'", line=len(lines), column=1, source=source)
    ids = [e for e, _, _ in edges]
    if len(set(ids)) != len(ids):
        edges = [(f"e{k}", s, t) for k, (_, s, t) in enumerate(edges)]
    return Graph(vertices, edges)
