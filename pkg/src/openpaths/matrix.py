"""Quantale-valued matrices over labeled finite vertex sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatchError, NonConvergenceError
from .quantale import Quantale

__all__ = [
    "VertexSet",
    "FiniteFunction",
    "RMatrix",
    "mat_mul",
    "mat_join",
    "mat_leq",
    "mat_power",
    "identity_matrix",
    "zero_matrix",
    "pushforward",
    "pushforward_rect",
    "closure_fw",
    "closure_series",
    "closure_series_stable",
    "closure_fix",
    "closure",
    "is_rcategory",
]


class VertexSet:
    """An ordered set of distinct string labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str] = ()):
        labels = tuple(str(x) for x in labels)
        index = {}
        for i, x in enumerate(labels):
            if x in index:
                raise ValueError(f"duplicate vertex label {x!r}")
            index[x] = i
        self.labels = labels
        self._index = index

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def __contains__(self, label):
        return label in self._index

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def __eq__(self, other):
        return isinstance(other, VertexSet) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"VertexSet({list(self.labels)!r})"


def _as_vertexset(x) -> VertexSet:
    return x if isinstance(x, VertexSet) else VertexSet(x)


class FiniteFunction:
    """A total function between vertex sets, stored as an index array."""

    __slots__ = ("domain", "codomain", "image")

    def __init__(self, domain, codomain, mapping):
        self.domain = _as_vertexset(domain)
        self.codomain = _as_vertexset(codomain)
        if isinstance(mapping, Mapping):
            missing = [x for x in self.domain if x not in mapping]
            if missing:
                raise ValueError(f"function undefined on {missing!r}")
            image = tuple(self.codomain.index(mapping[x]) for x in self.domain)
        else:
            image = tuple(int(i) for i in mapping)
            if len(image) != len(self.domain):
                raise ValueError("image length does not match domain")
            for i in image:
                if not 0 <= i < len(self.codomain):
                    raise ValueError(f"image index {i} out of range")
        self.image = image

    @classmethod
    def identity(cls, X):
        X = _as_vertexset(X)
        return cls(X, X, range(len(X)))

    @classmethod
    def inclusion(cls, X, Y):
        X, Y = _as_vertexset(X), _as_vertexset(Y)
        return cls(X, Y, {x: x for x in X})

    def __call__(self, label):
        return self.codomain[self.image[self.domain.index(label)]]

    def then(self, g: "FiniteFunction") -> "FiniteFunction":
        """Composite ``g ∘ self``."""
        if self.codomain != g.domain:
            raise DimensionMismatchError("cannot compose: codomain != domain")
        return FiniteFunction(self.domain, g.codomain, [g.image[i] for i in self.image])

    def as_dict(self):
        return {x: self.codomain[i] for x, i in zip(self.domain, self.image)}

    def preimage(self, j) -> list[int]:
        return [i for i, k in enumerate(self.image) if k == j]

    def is_injective(self):
        return len(set(self.image)) == len(self.image)

    def is_surjective(self):
        return set(self.image) == set(range(len(self.codomain)))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteFunction)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.image == other.image
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, self.image))

    def __repr__(self):
        return f"FiniteFunction({self.as_dict()!r})"


class RMatrix:
    """A rectangular matrix of quantale elements indexed by two vertex sets.

    Instances are treated as immutable; the backing array is read-only.
    """

    __slots__ = ("rows", "cols", "q", "entries")

    def __init__(self, rows, cols, q: Quantale, entries):
        self.rows = _as_vertexset(rows)
        self.cols = _as_vertexset(cols)
        self.q = q
        if not isinstance(entries, np.ndarray) or entries.dtype != np.dtype(q.dtype):
            entries = q.array(entries) if len(self.rows) else q.full((0, len(self.cols)), q.bottom)
        if entries.shape != (len(self.rows), len(self.cols)):
            raise DimensionMismatchError(
                f"entries shape {entries.shape} != ({len(self.rows)}, {len(self.cols)})"
            )
        entries.flags.writeable = False
        self.entries = entries

    @classmethod
    def square(cls, vertices, q, entries):
        vertices = _as_vertexset(vertices)
        return cls(vertices, vertices, q, entries)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, key):
        i, j = key
        return self.at(self.rows.index(i), self.cols.index(j))

    def at(self, i: int, j: int):
        v = self.entries[i, j]
        return v if self.q.dtype is object else v.item()

    def to_lists(self):
        return [[self.at(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def __eq__(self, other):
        if not isinstance(other, RMatrix):
            return NotImplemented
        return (
            self.q == other.q
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.all(self.q.eq_array(self.entries, other.entries)))
        )

    __hash__ = None

    def identical(self, other) -> bool:
        """Exact equality, ignoring the quantale's comparison tolerance."""
        if self.q != other.q or self.rows != other.rows or self.cols != other.cols:
            return False
        if self.q.dtype is object:
            return self == other
        return bool(np.array_equal(self.entries, other.entries))

    def relabel(self, rows=None, cols=None):
        return RMatrix(rows or self.rows, cols or self.cols, self.q, self.entries)

    def transpose(self):
        return RMatrix(self.cols, self.rows, self.q, self.entries.T.copy())

    def permute(self, order: Sequence[str]):
        """Reorder a square matrix's vertices to ``order`` (a permutation of labels)."""
        idx = [self.rows.index(x) for x in order]
        return RMatrix.square(order, self.q, self.entries[np.ix_(idx, idx)].copy())

    def submatrix(self, row_idx, col_idx, rows=None, cols=None):
        rows = rows if rows is not None else [self.rows[i] for i in row_idx]
        cols = cols if cols is not None else [self.cols[j] for j in col_idx]
        sub = self.entries[np.ix_(list(row_idx), list(col_idx))].copy()
        return RMatrix(rows, cols, self.q, sub)

    def __repr__(self):
        body = "; ".join(
            " ".join(self.q.format(v) for v in row) for row in self.to_lists()
        )
        return f"RMatrix<{self.q.tag} {list(self.rows)}x{list(self.cols)}: {body}>"


def _check_q(*mats):
    q = mats[0].q
    for m in mats[1:]:
        q.check_same(m.q)
    return q


def mat_mul(M: RMatrix, N: RMatrix) -> RMatrix:
    """Matrix product ``(MN)(i,k) = join_j M(i,j) N(j,k)``."""
    q = _check_q(M, N)
    if M.cols != N.rows:
        raise DimensionMismatchError(
            f"cannot multiply: {list(M.cols)} vs {list(N.rows)}"
        )
    A, B = M.entries, N.entries
    prod = q.umul(A[:, :, None], B[None, :, :])
    out = q.join_reduce(np.asarray(prod, dtype=A.dtype), axis=1)
    return RMatrix(M.rows, N.cols, q, np.asarray(out, dtype=A.dtype))


def mat_join(M: RMatrix, N: RMatrix) -> RMatrix:
    q = _check_q(M, N)
    if M.rows != N.rows or M.cols != N.cols:
        raise DimensionMismatchError("cannot join matrices of different shapes")
    out = np.asarray(q.ujoin(M.entries, N.entries), dtype=M.entries.dtype)
    return RMatrix(M.rows, M.cols, q, out)


def mat_leq(M: RMatrix, N: RMatrix) -> bool:
    q = _check_q(M, N)
    if M.rows != N.rows or M.cols != N.cols:
        raise DimensionMismatchError("cannot compare matrices of different shapes")
    joined = np.asarray(q.ujoin(M.entries, N.entries), dtype=M.entries.dtype)
    return bool(np.all(q.eq_array(joined, N.entries)))


def identity_matrix(X, q: Quantale) -> RMatrix:
    X = _as_vertexset(X)
    out = q.full((len(X), len(X)), q.bottom)
    for i in range(len(X)):
        out[i, i] = q.unit
    return RMatrix(X, X, q, out)


def zero_matrix(X, Y, q: Quantale) -> RMatrix:
    """The all-bottom matrix (the quantale's zero, e.g. ``inf`` for tropical)."""
    X, Y = _as_vertexset(X), _as_vertexset(Y)
    return RMatrix(X, Y, q, q.full((len(X), len(Y)), q.bottom))


def mat_power(M: RMatrix, n: int) -> RMatrix:
    if not M.is_square:
        raise DimensionMismatchError("power of a non-square matrix")
    P = identity_matrix(M.rows, M.q)
    for _ in range(n):
        P = mat_mul(P, M)
    return P


def pushforward_rect(f: FiniteFunction, g: FiniteFunction, M: RMatrix) -> RMatrix:
    """Push rows along ``f`` and columns along ``g``, joining over preimages."""
    if f.domain != M.rows or g.domain != M.cols:
        raise DimensionMismatchError("pushforward: function domain does not match matrix")
    q = M.q
    out = q.full((len(f.codomain), len(g.codomain)), q.bottom)
    A = M.entries
    for i, fi in enumerate(f.image):
        for j, gj in enumerate(g.image):
            out[fi, gj] = q.join(out[fi, gj], A[i, j])
    return RMatrix(f.codomain, g.codomain, q, out)


def pushforward(f: FiniteFunction, M: RMatrix) -> RMatrix:
    """``f_*(M)(y, y') = join of M(x, x')`` over ``f(x) = y, f(x') = y'``."""
    if not M.is_square:
        raise DimensionMismatchError("square pushforward needs a square matrix")
    return pushforward_rect(f, f, M)


def _require_square(M):
    if not M.is_square:
        raise DimensionMismatchError("closure needs a square matrix")


def closure_fw(M: RMatrix, max_iters=None) -> RMatrix:
    """Solve the algebraic path problem by generalized Floyd-Warshall elimination.

    Pivots are eliminated in label order; for pivot ``k`` every entry is
    updated to ``A[i,j] v A[i,k] A[k,k]* A[k,j]`` using the previous round's
    values, and the identity is joined in at the end.
    """
    _require_square(M)
    q = M.q
    A = M.entries.copy()
    dt = A.dtype
    for k in range(A.shape[0]):
        s = q.star(A[k, k] if dt == object else A[k, k].item(), max_iters=max_iters)
        col = np.asarray(q.umul(A[:, k], s), dtype=dt)
        through = np.asarray(q.umul(col[:, None], A[k, :][None, :]), dtype=dt)
        A = np.asarray(q.ujoin(A, through), dtype=dt)
    A = np.asarray(q.ujoin(A, identity_matrix(M.rows, q).entries), dtype=dt)
    return RMatrix(M.rows, M.cols, q, A)


def closure_series(M: RMatrix, K: int) -> RMatrix:
    """Join of ``M^n`` for ``0 <= n <= K`` (Horner form ``S <- 1 v M S``)."""
    _require_square(M)
    if K < 0:
        raise ValueError("K must be >= 0")
    one = identity_matrix(M.rows, M.q)
    S = one
    for _ in range(K):
        S = mat_join(one, mat_mul(M, S))
    return S


def closure_series_stable(M: RMatrix, max_terms=None):
    """Iterate the truncated series until it stops changing.

    Returns ``(F, K)`` where ``K`` is the first truncation with
    ``series(K) == series(K + 1)``; from there on the series is constant.
    """
    _require_square(M)
    max_terms = 4 * len(M.rows) + 8 if max_terms is None else max_terms
    one = identity_matrix(M.rows, M.q)
    S = one
    for K in range(max_terms + 1):
        nxt = mat_join(one, mat_mul(M, S))
        if nxt.identical(S):
            return S, K
        S = nxt
    raise NonConvergenceError(
        f"series did not stabilize within {max_terms} terms", iterations=max_terms
    )


def closure_fix(M: RMatrix, max_iters: int = 64) -> RMatrix:
    """Repeated squaring of ``1 v M`` until ``P = P P``."""
    _require_square(M)
    P = mat_join(identity_matrix(M.rows, M.q), M)
    for _ in range(max_iters):
        Q = mat_mul(P, P)
        if Q.identical(P):
            return P
        P = Q
    raise NonConvergenceError(
        f"squaring did not reach a fixpoint in {max_iters} iterations", iterations=max_iters
    )


def closure(M: RMatrix, algo: str = "fw", **kw) -> RMatrix:
    """Dispatch to one of the closure algorithms by name (``fw``, ``series``, ``square``)."""
    if algo == "fw":
        return closure_fw(M, **kw)
    if algo == "series":
        return closure_series_stable(M, **kw)[0]
    if algo in ("square", "fix"):
        return closure_fix(M, **kw)
    raise ValueError(f"unknown closure algorithm {algo!r}")


def is_rcategory(M: RMatrix) -> bool:
    """Identity law ``1_X <= M`` (matrix-wise) and composition law ``M M <= M``."""
    _require_square(M)
    return mat_leq(identity_matrix(M.rows, M.q), M) and mat_leq(mat_mul(M, M), M)
