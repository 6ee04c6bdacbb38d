"""Finite-set pushouts and open matrices (cospans with a matrix on the apex)."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundaryMismatchError, DimensionMismatchError
from .matrix import (
    FiniteFunction,
    RMatrix,
    VertexSet,
    _as_vertexset,
    identity_matrix,
    mat_join,
    mat_leq,
    pushforward,
    zero_matrix,
)

__all__ = [
    "UnionFind",
    "coproduct_labels",
    "coproduct",
    "PushoutResult",
    "pushout",
    "OpenMatrix",
    "compose_open",
    "identity_open",
    "tensor_open",
    "TwoCellCheck",
    "check_two_morphism",
    "find_relabeling",
    "isomorphic",
]


class UnionFind:
    def __init__(self, items=()):
        self.parent = {}
        for x in items:
            self.parent[x] = x

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            x, parent[x] = parent[x], root
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry
        return ry


def coproduct_labels(A, B, prefixes=("l:", "r:")):
    """Names for the elements of ``A ⊔ B``.

    Labels that occur on only one side keep their name; colliding labels get
    an origin prefix (repeated until every name is unique).
    """
    A, B = list(A), list(B)
    clash = set(A) & set(B)
    left = [prefixes[0] + a if a in clash else a for a in A]
    right = [prefixes[1] + b if b in clash else b for b in B]
    if len(set(left) | set(right)) != len(left) + len(right):
        return coproduct_labels(left, right, prefixes)
    return left, right


def coproduct(A, B):
    """Disjoint union ``A ⊔ B`` with its two injections."""
    A, B = _as_vertexset(A), _as_vertexset(B)
    left, right = coproduct_labels(A, B)
    S = VertexSet(left + right)
    n = len(A)
    return (
        S,
        FiniteFunction(A, S, range(n)),
        FiniteFunction(B, S, range(n, n + len(B))),
    )


@dataclass(frozen=True)
class PushoutResult:
    quotient: VertexSet
    left_leg: FiniteFunction
    right_leg: FiniteFunction

    def classes(self):
        """Members of each quotient element, as ``("A", label)`` / ``("B", label)`` pairs."""
        out = {x: [] for x in self.quotient}
        for a in self.left_leg.domain:
            out[self.left_leg(a)].append(("A", a))
        for b in self.right_leg.domain:
            out[self.right_leg(b)].append(("B", b))
        return out


def pushout(f: FiniteFunction, g: FiniteFunction) -> PushoutResult:
    """Pushout of ``A <-f- Z -g-> B`` in finite sets.

    The quotient of ``A ⊔ B`` by ``f(z) ~ g(z)``.  Classes are ordered by their
    first member (scanning ``A`` then ``B``) and named after their
    lexicographically least member name.  When two classes would get the
    same name, those classes use origin-prefixed names (``l:``/``r:``).
    """
    if f.domain != g.domain:
        raise DimensionMismatchError("pushout legs must share their domain")
    A, B = f.codomain, g.codomain
    nA = len(A)
    uf = UnionFind(range(nA + len(B)))
    for fi, gi in zip(f.image, g.image):
        uf.union(fi, nA + gi)
    left_names, right_names = coproduct_labels(A, B)
    names = left_names + right_names

    root_order, members = [], {}
    for e in range(nA + len(B)):
        r = uf.find(e)
        if r not in members:
            members[r] = []
            root_order.append(r)
        members[r].append(e)
    class_of = {r: k for k, r in enumerate(root_order)}
    raw = list(A) + list(B)
    labels = [min(raw[e] for e in members[r]) for r in root_order]
    if len(set(labels)) != len(labels):
        # a plain name shared by two classes: prefix the clashing ones
        clash = {x for x in labels if labels.count(x) > 1}
        labels = [min(names[e] for e in members[r]) if lab in clash else lab
                  for lab, r in zip(labels, root_order)]
        if len(set(labels)) != len(labels):
            labels = [min(names[e] for e in members[r]) for r in root_order]
    Q = VertexSet(labels)
    left = FiniteFunction(A, Q, [class_of[uf.find(i)] for i in range(nA)])
    right = FiniteFunction(B, Q, [class_of[uf.find(nA + j)] for j in range(len(B))])
    return PushoutResult(Q, left, right)


@dataclass(frozen=True)
class OpenMatrix:
    """A cospan ``X -leg_in-> V <-leg_out- Y`` with a square matrix on ``V``."""

    leg_in: FiniteFunction
    leg_out: FiniteFunction
    mat: RMatrix

    def __post_init__(self):
        if not self.mat.is_square:
            raise DimensionMismatchError("apex matrix of an open matrix must be square")
        if self.leg_in.codomain != self.mat.rows or self.leg_out.codomain != self.mat.rows:
            raise DimensionMismatchError("legs must land in the apex vertex set")

    @classmethod
    def build(cls, mat: RMatrix, inputs, outputs, leg_in, leg_out):
        """Convenience constructor from label lists and ``{boundary: vertex}`` dicts."""
        return cls(
            FiniteFunction(inputs, mat.rows, leg_in),
            FiniteFunction(outputs, mat.rows, leg_out),
            mat,
        )

    @property
    def input(self) -> VertexSet:
        return self.leg_in.domain

    @property
    def output(self) -> VertexSet:
        return self.leg_out.domain

    @property
    def carrier(self) -> VertexSet:
        return self.mat.rows

    @property
    def q(self):
        return self.mat.q

    def with_matrix(self, mat: RMatrix) -> "OpenMatrix":
        if mat.rows != self.carrier:
            raise DimensionMismatchError("replacement matrix has a different carrier")
        return OpenMatrix(self.leg_in, self.leg_out, mat)

    def __repr__(self):
        return (
            f"OpenMatrix({list(self.input)} -> {list(self.output)}, "
            f"in={self.leg_in.as_dict()}, out={self.leg_out.as_dict()}, {self.mat!r})"
        )


def compose_open(M: OpenMatrix, N: OpenMatrix) -> OpenMatrix:
    """Glue ``M: X -> Y`` and ``N: Y -> Z`` along ``Y``.

    The apex is the pushout of the carriers and its matrix is the join of
    the two pushed-forward matrices.
    """
    M.q.check_same(N.q)
    if M.output != N.input:
        raise BoundaryMismatchError(
            f"boundary mismatch: {list(M.output)} vs {list(N.input)}",
            left=list(M.output),
            right=list(N.input),
        )
    po = pushout(M.leg_out, N.leg_in)
    mat = mat_join(pushforward(po.left_leg, M.mat), pushforward(po.right_leg, N.mat))
    return OpenMatrix(M.leg_in.then(po.left_leg), N.leg_out.then(po.right_leg), mat)


def identity_open(X, q, category=False) -> OpenMatrix:
    """Identity cospan on ``X``: bottom apex, or the identity matrix if ``category``."""
    X = _as_vertexset(X)
    mat = identity_matrix(X, q) if category else zero_matrix(X, X, q)
    ident = FiniteFunction.identity(X)
    return OpenMatrix(ident, ident, mat)


def tensor_open(M: OpenMatrix, N: OpenMatrix) -> OpenMatrix:
    """Parallel placement: disjoint union of everything, block-diagonal apex."""
    q = M.q
    q.check_same(N.q)
    V, jM, jN = coproduct(M.carrier, N.carrier)
    X = VertexSet(sum(coproduct_labels(M.input, N.input), []))
    Y = VertexSet(sum(coproduct_labels(M.output, N.output), []))
    n = len(M.carrier)
    A = q.full((len(V), len(V)), q.bottom)
    A[:n, :n] = M.mat.entries
    A[n:, n:] = N.mat.entries

    def leg(dom, lm, ln):
        return FiniteFunction(dom, V, [jM.image[i] for i in lm.image] + [jN.image[i] for i in ln.image])

    leg_in = leg(X, M.leg_in, N.leg_in)
    leg_out = leg(Y, M.leg_out, N.leg_out)
    return OpenMatrix(leg_in, leg_out, RMatrix(V, V, q, A))


@dataclass(frozen=True)
class TwoCellCheck:
    ok: bool
    reason: str = "ok"

    def __bool__(self):
        return self.ok


def check_two_morphism(f: FiniteFunction, g: FiniteFunction, h: FiniteFunction,
                       M: OpenMatrix, N: OpenMatrix) -> TwoCellCheck:
    """Is ``(f, g, h)`` a 2-cell from ``M`` to ``N``?

    Both leg squares must commute and ``g_*(M) <= N`` must hold.
    """
    if f.domain != M.input or f.codomain != N.input:
        return TwoCellCheck(False, "input-map-shape")
    if h.domain != M.output or h.codomain != N.output:
        return TwoCellCheck(False, "output-map-shape")
    if g.domain != M.carrier or g.codomain != N.carrier:
        return TwoCellCheck(False, "carrier-map-shape")
    if M.q != N.q:
        return TwoCellCheck(False, "quantale-mismatch")
    if M.leg_in.then(g) != f.then(N.leg_in):
        return TwoCellCheck(False, "input-square")
    if M.leg_out.then(g) != h.then(N.leg_out):
        return TwoCellCheck(False, "output-square")
    if not mat_leq(pushforward(g, M.mat), N.mat):
        return TwoCellCheck(False, "matrix-order")
    return TwoCellCheck(True)


def find_relabeling(M: OpenMatrix, N: OpenMatrix):
    """Search for a carrier bijection ``M -> N`` matching legs and matrices exactly.

    Returns the bijection as a dict of labels, or ``None``.
    """
    if (M.input != N.input or M.output != N.output or M.q != N.q
            or len(M.carrier) != len(N.carrier)):
        return None
    n = len(M.carrier)
    forced = {}
    for leg_m, leg_n in ((M.leg_in, N.leg_in), (M.leg_out, N.leg_out)):
        for i, j in zip(leg_m.image, leg_n.image):
            if forced.setdefault(i, j) != j:
                return None
    if len(set(forced.values())) != len(forced):
        return None
    A, B = M.mat.entries, N.mat.entries
    eq = M.q.eq_array

    def consistent(assign, i):
        j = assign[i]
        for k, l in assign.items():
            if not (eq(A[i, k], B[j, l]) and eq(A[k, i], B[l, j])):
                return False
        return True

    assign = {}
    for i, j in forced.items():
        assign[i] = j
        if not consistent(assign, i):
            return None
    free = [i for i in range(n) if i not in assign]
    targets = [j for j in range(n) if j not in set(assign.values())]

    def search(pos, used):
        if pos == len(free):
            return True
        i = free[pos]
        for j in targets:
            if j in used:
                continue
            assign[i] = j
            if consistent(assign, i) and search(pos + 1, used | {j}):
                return True
            del assign[i]
        return False

    if not search(0, frozenset()):
        return None
    return {M.carrier[i]: N.carrier[j] for i, j in sorted(assign.items())}


def isomorphic(M: OpenMatrix, N: OpenMatrix) -> bool:
    """Equal up to a bijective relabeling of the carrier."""
    return find_relabeling(M, N) is not None
