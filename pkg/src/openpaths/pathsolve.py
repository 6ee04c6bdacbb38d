"""Black-boxing, solving open matrices, and the compositional solver."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cospan import OpenMatrix, compose_open, coproduct_labels, pushout, tensor_open
from .errors import BoundaryMismatchError, NotFunctionalError
from .matrix import (
    FiniteFunction,
    RMatrix,
    closure,
    mat_join,
    mat_leq,
    mat_mul,
    mat_power,
    pushforward,
    zero_matrix,
)

__all__ = [
    "blackbox",
    "star_open",
    "is_functional",
    "Leaf",
    "Compose",
    "Tensor",
    "CompositionExpr",
    "materialize",
    "solve_compositional",
    "SolveReport",
    "LaxCheck",
    "check_lax",
    "binomial_sides",
    "block_diagonal",
    "leg_kernel",
    "strict_gluing",
]

log = logging.getLogger(__name__)


def blackbox(M: OpenMatrix) -> RMatrix:
    """Restrict the apex along the legs: ``B(x, y) = M(leg_in x, leg_out y)``."""
    return M.mat.submatrix(M.leg_in.image, M.leg_out.image, rows=M.input, cols=M.output)


def star_open(M: OpenMatrix, algo: str = "fw") -> OpenMatrix:
    """Replace the apex by the solution of its path problem."""
    return M.with_matrix(closure(M.mat, algo))


def is_functional(M: OpenMatrix) -> bool:
    """Inputs land on sources (bottom columns), outputs on sinks (bottom rows)."""
    q = M.q
    A = M.mat.entries
    bottom = q.full((len(M.carrier),), q.bottom)
    for i in set(M.leg_in.image):
        if not np.all(q.eq_array(A[:, i], bottom)):
            return False
    for j in set(M.leg_out.image):
        if not np.all(q.eq_array(A[j, :], bottom)):
            return False
    return True


def leg_kernel(f: FiniteFunction) -> tuple:
    """Which boundary points share an image, as first-occurrence class numbers."""
    seen = {}
    return tuple(seen.setdefault(i, len(seen)) for i in f.image)


def strict_gluing(M: OpenMatrix, N: OpenMatrix) -> bool:
    """Functional pieces whose shared legs identify the same boundary points.

    Then gluing merges no two vertices of the same piece, and the solved
    black-box of the composite is the product of the solved black-boxes.
    """
    return (is_functional(M) and is_functional(N)
            and leg_kernel(M.leg_out) == leg_kernel(N.leg_in))


# -- composition expressions ----------------------------------------------


@dataclass(frozen=True)
class Leaf:
    value: OpenMatrix
    name: str = ""


@dataclass(frozen=True)
class Compose:
    left: "CompositionExpr"
    right: "CompositionExpr"


@dataclass(frozen=True)
class Tensor:
    left: "CompositionExpr"
    right: "CompositionExpr"


CompositionExpr = Union[Leaf, Compose, Tensor]


def materialize(expr: CompositionExpr) -> OpenMatrix:
    """Glue the whole expression into a single open matrix."""
    if isinstance(expr, Leaf):
        return expr.value
    left, right = materialize(expr.left), materialize(expr.right)
    if isinstance(expr, Compose):
        return compose_open(left, right)
    return tensor_open(left, right)


def block_diagonal(A: RMatrix, B: RMatrix) -> RMatrix:
    """Block-diagonal matrix with coproduct labels, bottom off the blocks."""
    q = A.q
    q.check_same(B.q)
    rl, rr = coproduct_labels(A.rows, B.rows)
    cl, cr = coproduct_labels(A.cols, B.cols)
    out = q.full((len(rl) + len(rr), len(cl) + len(cr)), q.bottom)
    out[: len(rl), : len(cl)] = A.entries
    out[len(rl):, len(cl):] = B.entries
    return RMatrix(rl + rr, cl + cr, q, out)


@dataclass
class SolveReport:
    """Bookkeeping from :func:`solve_compositional`."""

    fast_nodes: int = 0
    fallback_nodes: int = 0
    leaves: int = 0


@dataclass
class _Partial:
    bb: RMatrix
    functional: bool
    in_kernel: tuple
    out_kernel: tuple


def _from_open(M: OpenMatrix, algo) -> _Partial:
    return _Partial(blackbox(star_open(M, algo)), is_functional(M),
                    leg_kernel(M.leg_in), leg_kernel(M.leg_out))


def _shift(kernel, by):
    return tuple(k + by for k in kernel)


def _solve(expr, algo, mode, report) -> _Partial:
    if isinstance(expr, Leaf):
        report.leaves += 1
        return _from_open(expr.value, algo)
    left = _solve(expr.left, algo, mode, report)
    right = _solve(expr.right, algo, mode, report)
    if isinstance(expr, Tensor):
        return _Partial(
            block_diagonal(left.bb, right.bb),
            left.functional and right.functional,
            left.in_kernel + _shift(right.in_kernel, len(set(left.in_kernel))),
            left.out_kernel + _shift(right.out_kernel, len(set(left.out_kernel))),
        )
    if left.bb.cols != right.bb.rows:
        raise BoundaryMismatchError(
            f"boundary mismatch: {list(left.bb.cols)} vs {list(right.bb.rows)}",
            left=list(left.bb.cols),
            right=list(right.bb.rows),
        )
    if left.functional and right.functional and left.out_kernel == right.in_kernel:
        report.fast_nodes += 1
        return _Partial(mat_mul(left.bb, right.bb), True, left.in_kernel, right.out_kernel)
    if mode == "compositional":
        if not (left.functional and right.functional):
            raise NotFunctionalError("compose node joins a non-functional open matrix")
        raise NotFunctionalError(
            "compose node glues boundary points that its two sides identify differently")
    report.fallback_nodes += 1
    log.debug("falling back to glue-then-close at a compose node")
    return _from_open(materialize(expr), algo)


def solve_compositional(expr: CompositionExpr, algo: str = "fw", mode: str = "auto",
                        report: SolveReport | None = None) -> RMatrix:
    """Black-boxed solution of the network described by ``expr``.

    ``mode="glued"`` glues everything and closes once.  ``"auto"`` multiplies
    child black-boxes at every compose node whose children are functional
    (and whose shared legs identify the same boundary points) and glues only
    the other subtrees.  ``"compositional"`` insists on the fast path and
    raises :class:`NotFunctionalError` where it does not apply.
    """
    if mode not in ("auto", "glued", "compositional"):
        raise ValueError(f"unknown mode {mode!r}")
    report = report if report is not None else SolveReport()
    if mode == "glued":
        return blackbox(star_open(materialize(expr), algo))
    return _solve(expr, algo, mode, report).bb


# -- comparison checks -----------------------------------------------------


@dataclass(frozen=True)
class LaxCheck:
    holds: bool
    strict: bool
    product: RMatrix
    composite: RMatrix

    def __bool__(self):
        return self.holds


def check_lax(M: OpenMatrix, N: OpenMatrix, algo: str = "fw") -> LaxCheck:
    """Compare the product of solved black-boxes with the solved composite.

    ``holds`` is the inequality product <= composite; ``strict`` records that
    the two differ.
    """
    prod = mat_mul(blackbox(star_open(M, algo)), blackbox(star_open(N, algo)))
    comp = blackbox(star_open(compose_open(M, N), algo))
    holds = mat_leq(prod, comp)
    return LaxCheck(holds, holds and not prod == comp, prod, comp)


def binomial_sides(M: OpenMatrix, N: OpenMatrix, n: int):
    """Both sides of the binomial expansion of the glued apex's ``n``-th power.

    Left: the black-box of ``(a_*M v b_*N)^n``.  Right: the join over
    ``i + j = n`` of products of black-boxes of ``(a_*M)^i`` and ``(b_*N)^j``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not (is_functional(M) and is_functional(N)):
        raise NotFunctionalError("binomial expansion needs functional open matrices")
    G = compose_open(M, N)
    po = pushout(M.leg_out, N.leg_in)
    Mp = pushforward(po.left_leg, M.mat)
    Np = pushforward(po.right_leg, N.mat)
    leg_y = M.leg_out.then(po.left_leg)
    q = M.q

    left = blackbox(G.with_matrix(mat_power(G.mat, n)))
    right = zero_matrix(M.input, N.output, q)
    for i in range(n + 1):
        a = OpenMatrix(G.leg_in, leg_y, mat_power(Mp, i))
        b = OpenMatrix(leg_y, G.leg_out, mat_power(Np, n - i))
        right = mat_join(right, mat_mul(blackbox(a), blackbox(b)))
    return left, right
