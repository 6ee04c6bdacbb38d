"""Seeded random instances for property tests and the acceptance suite.

Tropical and capacity weights are drawn from a small integer grid so that
every sum and comparison is exact in floating point.
"""
from __future__ import annotations

import os

import numpy as np

from .cospan import OpenMatrix
from .matrix import FiniteFunction, RMatrix
from .netgraph import Graph, OpenGraph
from .qnet import NATURAL, OpenNet, QNet, ResourceKind
from .quantale import (
    BooleanQuantale,
    CapacityQuantale,
    INF,
    Quantale,
    TropicalQuantale,
    TruncatedLanguage,
    ViterbiQuantale,
)

DEFAULT_SEED = 20200601
SEED_ENV = "OPENPATHS_SEED"

__all__ = [
    "DEFAULT_SEED",
    "SEED_ENV",
    "default_seed",
    "make_rng",
    "random_value",
    "random_matrix",
    "random_open",
    "random_composable_pair",
    "make_functional",
    "random_open_graph_pair",
    "random_open_net_pair",
]


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def make_rng(seed=None) -> np.random.Generator:
    return np.random.default_rng(default_seed() if seed is None else seed)


def random_value(q: Quantale, rng, density: float = 0.5):
    """A random element; ``density`` is the chance of a non-bottom value."""
    if rng.random() >= density:
        return q.bottom
    if isinstance(q, TropicalQuantale):
        return float(rng.integers(0, 10))
    if isinstance(q, CapacityQuantale):
        return INF if rng.random() < 0.1 else float(rng.integers(1, 10))
    if isinstance(q, ViterbiQuantale):
        return 1.0 if rng.random() < 0.1 else float(rng.uniform(0.05, 1.0))
    if isinstance(q, BooleanQuantale):
        return True
    if isinstance(q, TruncatedLanguage):
        words = q.all_words()
        k = int(rng.integers(1, 3))
        return frozenset(words[int(i)] for i in rng.integers(0, len(words), size=k))
    raise TypeError(f"no generator for {q!r}")


def random_matrix(q: Quantale, n: int, rng, density: float = 0.5, prefix: str = "v") -> RMatrix:
    labels = [f"{prefix}{i}" for i in range(n)]
    rows = [[random_value(q, rng, density) for _ in range(n)] for _ in range(n)]
    return RMatrix.square(labels, q, rows)


def _leg(rng, dom, cod, injective):
    if injective:
        idx = rng.permutation(len(cod))[: len(dom)]
    else:
        idx = rng.integers(0, len(cod), size=len(dom))
    return FiniteFunction(dom, cod, [int(i) for i in idx])


def random_open(q, rng, n, inputs, outputs, functional=False, density=0.5,
                prefix="v", injective_in=False, injective_out=False) -> OpenMatrix:
    """Random open matrix; ``functional`` clears input columns and output rows."""
    M = random_matrix(q, n, rng, density, prefix)
    leg_in = _leg(rng, inputs, M.rows, injective_in)
    leg_out = _leg(rng, outputs, M.rows, injective_out)
    out = OpenMatrix(leg_in, leg_out, M)
    return make_functional(out) if functional else out


def _matched_legs(rng, Y, cod_m, cod_n):
    """Legs out of ``Y`` that identify the same points on both sides."""
    blocks = int(rng.integers(1, min(len(Y), len(cod_m), len(cod_n)) + 1))
    labels = [int(b) for b in rng.integers(0, blocks, size=len(Y))]
    ids = {b: k for k, b in enumerate(dict.fromkeys(labels))}
    labels = [ids[b] for b in labels]
    pm = rng.permutation(len(cod_m))
    pn = rng.permutation(len(cod_n))
    return (FiniteFunction(Y, cod_m, [int(pm[b]) for b in labels]),
            FiniteFunction(Y, cod_n, [int(pn[b]) for b in labels]))


def random_composable_pair(q, rng, max_size=6, functional=False, density=0.5,
                           boundary="free"):
    """``M: X -> Y`` and ``N: Y -> Z`` with carriers of at most ``max_size`` vertices.

    ``boundary`` controls the two legs out of ``Y``: ``"free"`` (independent
    random maps), ``"matched"`` (they identify the same points of ``Y``) or
    ``"injective"``.
    """
    nm = int(rng.integers(1, max_size + 1))
    nn = int(rng.integers(1, max_size + 1))
    ny_cap = min(nm, nn, 3) if boundary == "injective" else 3
    X = [f"x{i}" for i in range(int(rng.integers(1, 4)))]
    Y = [f"y{i}" for i in range(int(rng.integers(1, ny_cap + 1)))]
    Z = [f"z{i}" for i in range(int(rng.integers(1, 4)))]
    inj = boundary == "injective"
    M = random_open(q, rng, nm, X, Y, False, density, "m", injective_out=inj)
    N = random_open(q, rng, nn, Y, Z, False, density, "n", injective_in=inj)
    if boundary == "matched":
        lm, ln = _matched_legs(rng, Y, M.carrier, N.carrier)
        M = OpenMatrix(M.leg_in, lm, M.mat)
        N = OpenMatrix(ln, N.leg_out, N.mat)
    if functional:
        M, N = make_functional(M), make_functional(N)
    return M, N


def make_functional(M: OpenMatrix) -> OpenMatrix:
    """Clear the columns of input vertices and the rows of output vertices."""
    q = M.q
    A = M.mat.entries.copy()
    A[:, list(M.leg_in.image)] = q.bottom
    A[list(M.leg_out.image), :] = q.bottom
    return M.with_matrix(RMatrix(M.carrier, M.carrier, q, A))


def _random_graph(rng, n, n_edges, prefix, forbid_in=(), forbid_out=()):
    V = [f"{prefix}{i}" for i in range(n)]
    edges = []
    for k in range(n_edges):
        srcs = [v for v in V if v not in forbid_out]
        tgts = [v for v in V if v not in forbid_in]
        if not srcs or not tgts:
            break
        s = srcs[int(rng.integers(0, len(srcs)))]
        t = tgts[int(rng.integers(0, len(tgts)))]
        edges.append((f"{prefix}e{k}", s, t))
    return Graph(V, edges)


def _random_open_graph(rng, X, Y, prefix, functional, max_vertices, injective_in, injective_out):
    n = int(rng.integers(max(1, len(X) if injective_in else 1, len(Y) if injective_out else 1),
                         max_vertices + 1))
    V = [f"{prefix}{i}" for i in range(n)]
    leg_in = _leg(rng, X, V, injective_in)
    leg_out = _leg(rng, Y, V, injective_out)
    forbid_in = {V[i] for i in leg_in.image} if functional else ()
    forbid_out = {V[i] for i in leg_out.image} if functional else ()
    G = _random_graph(rng, n, int(rng.integers(0, 2 * n + 1)), prefix, forbid_in, forbid_out)
    return OpenGraph(FiniteFunction(X, G.vertices, list(leg_in.image)),
                     FiniteFunction(Y, G.vertices, list(leg_out.image)), G)


def random_open_graph_pair(rng, max_vertices=5, functional=True, injective_y=True):
    """Open graphs ``G: X -> Y`` and ``H: Y -> Z`` with at most ``max_vertices`` each."""
    X = [f"x{i}" for i in range(int(rng.integers(1, 3)))]
    Y = [f"y{i}" for i in range(int(rng.integers(1, 3)))]
    Z = [f"z{i}" for i in range(int(rng.integers(1, 3)))]
    G = _random_open_graph(rng, X, Y, "g", functional, max_vertices, False, injective_y)
    H = _random_open_graph(rng, Y, Z, "h", functional, max_vertices, injective_y, False)
    return G, H


def _random_marking(rng, places, lo, hi):
    k = int(rng.integers(1, min(2, len(places)) + 1))
    chosen = rng.choice(len(places), size=k, replace=False)
    return {places[int(i)]: int(rng.integers(lo, hi + 1)) for i in chosen}


def _random_open_net(rng, X, Y, prefix, functional, kind, max_places, max_transitions,
                     injective_in, injective_out):
    need = max(1, len(X) if injective_in else 1, len(Y) if injective_out else 1)
    n = int(rng.integers(need, max_places + 1))
    S = [f"{prefix}{i}" for i in range(n)]
    leg_in = _leg(rng, X, S, injective_in)
    leg_out = _leg(rng, Y, S, injective_out)
    ins = {S[i] for i in leg_in.image}
    outs = {S[i] for i in leg_out.image}
    src_ok = [p for p in S if not (functional and p in outs)]
    tgt_ok = [p for p in S if not (functional and p in ins)]
    ts = []
    for k in range(int(rng.integers(1, max_transitions + 1))):
        if not src_ok or not tgt_ok:
            break
        src = _random_marking(rng, src_ok, 1, 2)
        tgt = _random_marking(rng, tgt_ok, 1, 2) if rng.random() < 0.9 else {}
        ts.append((f"{prefix}t{k}", src, tgt))
    net = QNet(kind, S, ts)
    return OpenNet(leg_in, leg_out, net)


def random_open_net_pair(rng, kind: ResourceKind = NATURAL, max_places=3, max_transitions=2,
                         functional=True, injective_y=True):
    """Open nets ``P: X -> Y`` and ``Q: Y -> Z``; every transition consumes something."""
    X = [f"x{i}" for i in range(int(rng.integers(1, 3)))]
    Y = [f"y{i}" for i in range(int(rng.integers(1, 3)))]
    Z = [f"z{i}" for i in range(int(rng.integers(1, 3)))]
    P = _random_open_net(rng, X, Y, "p", functional, kind, max_places, max_transitions,
                         False, injective_y)
    Q = _random_open_net(rng, Y, Z, "q", functional, kind, max_places, max_transitions,
                         injective_y, False)
    return P, Q
