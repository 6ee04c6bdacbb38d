"""Directed graphs, their truncated path categories, and open graphs.

Every path semantics here is cut off at an explicit length bound ``K``.
The free category on a graph is infinite as soon as a cycle is reachable,
so ``K`` is always a required argument.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .cospan import coproduct_labels, pushout
from .errors import BoundaryMismatchError, DimensionMismatchError
from .matrix import FiniteFunction, VertexSet, _as_vertexset

__all__ = [
    "Graph",
    "Path",
    "PathTable",
    "OpenGraph",
    "GlueResult",
    "paths_of_length",
    "free_category",
    "glue_open_graphs",
    "compose_open_graph",
    "identity_open_graph",
    "blackbox_graph",
    "profunctor_compose",
    "is_functional_graph",
    "path_counts",
]


class Graph:
    """A finite directed multigraph with labeled vertices and edges."""

    __slots__ = ("vertices", "edges", "_src", "_tgt", "_out", "_in")

    def __init__(self, vertices, edges: Iterable = ()):
        self.vertices = _as_vertexset(vertices)
        self.edges = tuple((str(e), str(s), str(t)) for e, s, t in edges)
        ids = [e for e, _, _ in self.edges]
        if len(set(ids)) != len(ids):
            raise DimensionMismatchError("edge ids must be unique")
        self._src, self._tgt = {}, {}
        self._out = {v: [] for v in self.vertices}
        self._in = {v: [] for v in self.vertices}
        for e, s, t in self.edges:
            if s not in self.vertices or t not in self.vertices:
                raise DimensionMismatchError(f"edge {e!r} has an unknown endpoint")
            self._src[e], self._tgt[e] = s, t
            self._out[s].append(e)
            self._in[t].append(e)

    def src(self, e):
        return self._src[e]

    def tgt(self, e):
        return self._tgt[e]

    def out_edges(self, v):
        return self._out[v]

    def in_edges(self, v):
        return self._in[v]

    @property
    def edge_ids(self):
        return [e for e, _, _ in self.edges]

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and sorted(self.edges) == sorted(other.edges))

    __hash__ = None

    def __repr__(self):
        return f"Graph({list(self.vertices)}, {list(self.edges)})"


@dataclass(frozen=True, order=False)
class Path:
    """An edge sequence from ``start`` to ``end``; no edges means an identity path."""

    start: str
    edges: tuple
    end: str

    def __len__(self):
        return len(self.edges)

    def sort_key(self):
        return (len(self.edges), self.edges, self.start, self.end)

    def then(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise ValueError("paths do not meet")
        return Path(self.start, self.edges + other.edges, other.end)

    def __repr__(self):
        if not self.edges:
            return f"id({self.start})"
        return f"{self.start}-[{' '.join(self.edges)}]->{self.end}"


def _canon(paths):
    return tuple(sorted(set(paths), key=Path.sort_key))


@dataclass(frozen=True)
class PathTable:
    """Boundary pairs to canonically ordered, duplicate-free path lists."""

    rows: VertexSet
    cols: VertexSet
    K: int
    table: dict = field(compare=False, hash=False)

    def __post_init__(self):
        clean = {}
        for x in self.rows:
            for y in self.cols:
                clean[(x, y)] = _canon(self.table.get((x, y), ()))
        object.__setattr__(self, "table", clean)

    def __getitem__(self, key):
        return self.table[key]

    def count(self, x, y, length=None):
        ps = self.table[(x, y)]
        if length is None:
            return len(ps)
        return sum(1 for p in ps if len(p) == length)

    def counts(self):
        return {k: len(v) for k, v in self.table.items()}

    def truncate(self, K):
        return PathTable(self.rows, self.cols, K,
                         {k: [p for p in v if len(p) <= K] for k, v in self.table.items()})

    def __eq__(self, other):
        return (isinstance(other, PathTable) and self.rows == other.rows
                and self.cols == other.cols and self.K == other.K
                and self.table == other.table)

    __hash__ = None

    def __repr__(self):
        nz = {f"{x},{y}": len(v) for (x, y), v in self.table.items() if v}
        return f"PathTable(K={self.K}, counts={nz})"


def paths_of_length(G: Graph, n: int) -> dict:
    """All length-``n`` edge sequences, keyed by ``(start, end)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    frontier = [Path(v, (), v) for v in G.vertices]
    for _ in range(n):
        frontier = [Path(p.start, p.edges + (e,), G.tgt(e))
                    for p in frontier for e in G.out_edges(p.end)]
    out = defaultdict(list)
    for p in frontier:
        out[(p.start, p.end)].append(p)
    return {k: list(_canon(v)) for k, v in out.items()}


def path_counts(G: Graph, n: int) -> dict:
    """Number of length-``n`` paths per vertex pair, by dynamic programming."""
    counts = {(v, v): 1 for v in G.vertices}
    for _ in range(n):
        nxt = defaultdict(int)
        for (u, v), c in counts.items():
            for e in G.out_edges(v):
                nxt[(u, G.tgt(e))] += c
        counts = dict(nxt)
    return counts


def _paths_upto(G: Graph, starts, K):
    """Paths of length <= K from each start vertex."""
    out = []
    frontier = [Path(v, (), v) for v in dict.fromkeys(starts)]
    for k in range(K + 1):
        out.extend(frontier)
        if k == K:
            break
        frontier = [Path(p.start, p.edges + (e,), G.tgt(e))
                    for p in frontier for e in G.out_edges(p.end)]
    return out


def free_category(G: Graph, K: int) -> PathTable:
    """Paths of length at most ``K`` between every pair of vertices."""
    if K < 0:
        raise ValueError("K must be >= 0")
    table = defaultdict(list)
    for p in _paths_upto(G, G.vertices, K):
        table[(p.start, p.end)].append(p)
    return PathTable(G.vertices, G.vertices, K, table)


@dataclass(frozen=True)
class OpenGraph:
    """A cospan of vertex maps ``X -> V(G) <- Y``."""

    leg_in: FiniteFunction
    leg_out: FiniteFunction
    graph: Graph

    def __post_init__(self):
        if self.leg_in.codomain != self.graph.vertices or self.leg_out.codomain != self.graph.vertices:
            raise DimensionMismatchError("legs must land in the graph's vertices")

    @classmethod
    def build(cls, graph: Graph, inputs, outputs, leg_in, leg_out):
        return cls(FiniteFunction(inputs, graph.vertices, leg_in),
                   FiniteFunction(outputs, graph.vertices, leg_out), graph)

    @property
    def input(self):
        return self.leg_in.domain

    @property
    def output(self):
        return self.leg_out.domain


@dataclass(frozen=True)
class GlueResult:
    """A composite open graph plus where each component's vertices and edges went."""

    composite: OpenGraph
    left_vertex: FiniteFunction
    right_vertex: FiniteFunction
    left_edge: dict
    right_edge: dict

    def left_path(self, p: Path) -> Path:
        return Path(self.left_vertex(p.start), tuple(self.left_edge[e] for e in p.edges),
                    self.left_vertex(p.end))

    def right_path(self, p: Path) -> Path:
        return Path(self.right_vertex(p.start), tuple(self.right_edge[e] for e in p.edges),
                    self.right_vertex(p.end))


def glue_open_graphs(G: OpenGraph, H: OpenGraph) -> GlueResult:
    """Glue along the shared boundary: pushout on vertices, disjoint union on edges."""
    if G.output != H.input:
        raise BoundaryMismatchError(
            f"boundary mismatch: {list(G.output)} vs {list(H.input)}",
            left=list(G.output), right=list(H.input),
        )
    po = pushout(G.leg_out, H.leg_in)
    eg, eh = coproduct_labels(G.graph.edge_ids, H.graph.edge_ids)
    left_edge = dict(zip(G.graph.edge_ids, eg))
    right_edge = dict(zip(H.graph.edge_ids, eh))
    edges = [(left_edge[e], po.left_leg(s), po.left_leg(t)) for e, s, t in G.graph.edges]
    edges += [(right_edge[e], po.right_leg(s), po.right_leg(t)) for e, s, t in H.graph.edges]
    graph = Graph(po.quotient, edges)
    comp = OpenGraph(G.leg_in.then(po.left_leg), H.leg_out.then(po.right_leg), graph)
    return GlueResult(comp, po.left_leg, po.right_leg, left_edge, right_edge)


def compose_open_graph(G: OpenGraph, H: OpenGraph) -> OpenGraph:
    return glue_open_graphs(G, H).composite


def identity_open_graph(X) -> OpenGraph:
    X = _as_vertexset(X)
    ident = FiniteFunction.identity(X)
    return OpenGraph(ident, ident, Graph(X))


def blackbox_graph(C: OpenGraph, K: int) -> PathTable:
    """Paths of length <= ``K`` from each input's vertex to each output's vertex."""
    if K < 0:
        raise ValueError("K must be >= 0")
    by_pair = defaultdict(list)
    for p in _paths_upto(C.graph, [C.leg_in(x) for x in C.input], K):
        by_pair[(p.start, p.end)].append(p)
    table = {(x, y): by_pair.get((C.leg_in(x), C.leg_out(y)), [])
             for x in C.input for y in C.output}
    return PathTable(C.input, C.output, K, table)


def profunctor_compose(P: PathTable, Q: PathTable, left=None, right=None, K=None) -> PathTable:
    """Concatenate ``p`` from ``P(x, y)`` with ``q`` from ``Q(y, z)`` over all ``y``.

    ``left`` and ``right`` map component paths into a common graph (for
    instance :meth:`GlueResult.left_path`); without them paths are joined
    as they are.  Duplicates are removed and, if ``K`` is given, paths
    longer than ``K`` are dropped.
    """
    if P.cols != Q.rows:
        raise BoundaryMismatchError("profunctors do not share a boundary",
                                    left=list(P.cols), right=list(Q.rows))
    left = left or (lambda p: p)
    right = right or (lambda p: p)
    bound = P.K + Q.K if K is None else K
    table = {}
    for x in P.rows:
        for z in Q.cols:
            acc = []
            for y in P.cols:
                for p in P[(x, y)]:
                    lp = left(p)
                    for q in Q[(y, z)]:
                        if len(p) + len(q) <= bound:
                            acc.append(Path(lp.start, lp.edges + right(q).edges, right(q).end))
            table[(x, z)] = acc
    return PathTable(P.rows, Q.cols, bound, table)


def is_functional_graph(C: OpenGraph) -> bool:
    """Inputs land on sources and outputs on sinks."""
    G = C.graph
    return (all(not G.in_edges(C.leg_in(x)) for x in C.input)
            and all(not G.out_edges(C.leg_out(y)) for y in C.output))
