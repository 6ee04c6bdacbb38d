"""Weight domains: commutative quantales with a computable local star.

Every instance exposes scalar operations (``join``, ``mul``, ``star``, ...)
and array versions used by :mod:`openpaths.matrix`.  The quantale "zero" is
always the *bottom* element (the empty join), never the numeral zero: in the
tropical instance ``bottom == inf`` and ``unit == 0.0``.
"""
from __future__ import annotations

import math
import re
from functools import reduce

import numpy as np

from .errors import NonConvergenceError, ParseError, QuantaleMismatchError

__all__ = [
    "Quantale",
    "TropicalQuantale",
    "CapacityQuantale",
    "ViterbiQuantale",
    "BooleanQuantale",
    "TruncatedLanguage",
    "TROPICAL",
    "CAPACITY",
    "VITERBI",
    "BOOLEAN",
    "NUMERIC_INSTANCES",
    "INF",
    "join",
    "mul",
    "star",
    "quantale_from_tag",
]

INF = math.inf


class Quantale:
    """Abstract weight domain.

    Subclasses set ``bottom``, ``unit``, ``dtype`` and the array ufuncs
    ``_ujoin``/``_umul``; scalar operations default to the ufuncs.
    """

    name = "abstract"
    tol = 0.0
    commutative = True
    idempotent = True
    dtype: type = object
    bottom = None
    unit = None
    _ujoin = None
    _umul = None

    # -- scalar operations ---------------------------------------------
    def join(self, a, b):
        return self._ujoin(a, b).item() if self.dtype is not object else self._ujoin(a, b)

    def mul(self, a, b):
        return self._umul(a, b).item() if self.dtype is not object else self._umul(a, b)

    def leq(self, a, b):
        return self.eq(self.join(a, b), b)

    def eq(self, a, b):
        return a == b

    def star(self, a, max_iters=None):
        # generic fallback: iterate acc <- 1 v a*acc from bottom
        max_iters = 1000 if max_iters is None else max_iters
        acc = self.bottom
        for _ in range(max_iters):
            nxt = self.join(self.unit, self.mul(a, acc))
            if self.eq(nxt, acc):
                return nxt
            acc = nxt
        raise NonConvergenceError(
            f"star did not converge in {max_iters} iterations", iterations=max_iters
        )

    def join_all(self, values):
        return reduce(self.join, values, self.bottom)

    def mul_all(self, values):
        return reduce(self.mul, values, self.unit)

    def power(self, a, n):
        return self.mul_all([a] * n)

    def validate(self, a):
        """Raise ``ValueError`` unless ``a`` is an element of this quantale."""

    def coerce(self, a):
        self.validate(a)
        return a

    # -- array operations ----------------------------------------------
    def ujoin(self, A, B):
        return self._ujoin(A, B)

    def umul(self, A, B):
        return self._umul(A, B)

    def join_reduce(self, A, axis):
        if A.shape[axis] == 0:
            shape = A.shape[:axis] + A.shape[axis + 1:]
            return self.full(shape, self.bottom)
        return self._ujoin.reduce(A, axis=axis)

    def eq_array(self, A, B):
        return np.asarray(A == B, dtype=bool)

    def full(self, shape, value):
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(value)
            return out
        return np.full(shape, value, dtype=self.dtype)

    def array(self, rows):
        """Build a 2-D array of elements from nested lists (already coerced)."""
        rows = list(rows)
        n = len(rows)
        m = len(rows[0]) if n else 0
        out = self.full((n, m), self.bottom)
        for i, row in enumerate(rows):
            if len(row) != m:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                out[i, j] = self.coerce(v)
        return out

    # -- text interface ------------------------------------------------
    @property
    def tag(self):
        return self.name

    def parse(self, literal):
        """Parse a weight literal as found in JSON files or on the command line."""
        raise NotImplementedError

    def dump(self, value):
        """JSON-serializable representation of ``value``."""
        raise NotImplementedError

    def format(self, value):
        """Short human-readable rendering used in tables."""
        return str(self.dump(value))

    def check_same(self, other):
        if self != other:
            raise QuantaleMismatchError(f"quantale mismatch: {self.tag} vs {other.tag}")

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))

    def __repr__(self):
        return f"<quantale {self.tag}>"


def _parse_extended_real(literal):
    if isinstance(literal, bool):
        raise ParseError(f"expected a number, got {literal!r}")
    if isinstance(literal, (int, float)):
        return float(literal)
    if isinstance(literal, str):
        text = literal.strip().lower()
        if text in ("inf", "+inf", "infinity", "∞"):
            return INF
        try:
            return float(text)
        except ValueError:
            pass
    raise ParseError(f"bad weight literal {literal!r}")


def _dump_real(value):
    if math.isinf(value):
        return "inf"
    if float(value).is_integer():
        return int(value)
    return float(value)


class _RealQuantale(Quantale):
    dtype = float
    lo, hi = 0.0, INF

    def join(self, a, b):
        return float(self._ujoin(a, b))

    def mul(self, a, b):
        return float(self._umul(a, b))

    def eq(self, a, b):
        if a == b:
            return True
        return abs(a - b) <= self.tol

    def eq_array(self, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        exact = A == B
        if self.tol == 0:
            return exact
        with np.errstate(invalid="ignore"):
            return exact | (np.abs(A - B) <= self.tol)

    def validate(self, a):
        if isinstance(a, bool) or not isinstance(a, (int, float, np.floating, np.integer)):
            raise ValueError(f"{self.tag}: not a number: {a!r}")
        if math.isnan(a) or not (self.lo <= a <= self.hi):
            raise ValueError(f"{self.tag}: {a!r} outside [{self.lo}, {self.hi}]")

    def coerce(self, a):
        self.validate(a)
        return float(a)

    def parse(self, literal):
        value = _parse_extended_real(literal)
        try:
            self.validate(value)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        return value

    def dump(self, value):
        return _dump_real(value)

    def format(self, value):
        if math.isinf(value):
            return "inf"
        return f"{value:g}"


class TropicalQuantale(_RealQuantale):
    """``([0, inf], min, +)``: shortest paths.  The order is reversed."""

    name = "tropical"
    bottom = INF
    unit = 0.0
    _ujoin = np.minimum
    _umul = np.add

    def leq(self, a, b):
        return b <= a

    def star(self, a, max_iters=None):
        # a >= 0 so every power a^n >= a^0 = 0
        return 0.0


class CapacityQuantale(_RealQuantale):
    """``([0, inf], max, min)``: widest (bottleneck) paths."""

    name = "capacity"
    bottom = 0.0
    unit = INF
    _ujoin = np.maximum
    _umul = np.minimum

    def leq(self, a, b):
        return a <= b

    def star(self, a, max_iters=None):
        return INF


class ViterbiQuantale(_RealQuantale):
    """``([0, 1], max, *)``: most likely paths in a Markov process."""

    name = "viterbi"
    bottom = 0.0
    unit = 1.0
    hi = 1.0
    tol = 1e-12
    _ujoin = np.maximum
    _umul = np.multiply

    def leq(self, a, b):
        return a <= b + self.tol

    def star(self, a, max_iters=None):
        return 1.0


class BooleanQuantale(Quantale):
    """``({F, T}, or, and)``: reachability / transitive closure."""

    name = "boolean"
    dtype = bool
    bottom = False
    unit = True
    _ujoin = np.logical_or
    _umul = np.logical_and

    def join(self, a, b):
        return bool(a or b)

    def mul(self, a, b):
        return bool(a and b)

    def leq(self, a, b):
        return (not a) or b

    def star(self, a, max_iters=None):
        return True

    def validate(self, a):
        if not isinstance(a, (bool, np.bool_)):
            raise ValueError(f"boolean: not a bool: {a!r}")

    def coerce(self, a):
        self.validate(a)
        return bool(a)

    def parse(self, literal):
        if isinstance(literal, bool):
            return literal
        if isinstance(literal, str) and literal.strip().lower() in ("true", "t", "1"):
            return True
        if isinstance(literal, str) and literal.strip().lower() in ("false", "f", "0"):
            return False
        raise ParseError(f"bad boolean literal {literal!r}")

    def dump(self, value):
        return bool(value)

    def format(self, value):
        return "T" if value else "F"


def _word_key(w):
    return (len(w), w)


class TruncatedLanguage(Quantale):
    """Sets of words of length at most ``max_len`` over a finite alphabet.

    Concatenation drops words longer than ``max_len``, so this is the
    quotient of the powerset quantale of all words that forgets long words.
    Concatenation is not commutative; matrix routines keep operand order.
    """

    commutative = False
    dtype = object

    def __init__(self, alphabet, max_len):
        alphabet = "".join(sorted(set(alphabet)))
        if max_len < 0:
            raise ValueError("max_len must be >= 0")
        self.alphabet = alphabet
        self.max_len = int(max_len)
        self.bottom = frozenset()
        self.unit = frozenset({""})
        self._ujoin = np.frompyfunc(self.join, 2, 1)
        self._umul = np.frompyfunc(self.mul, 2, 1)
        self._ueq = np.frompyfunc(lambda a, b: a == b, 2, 1)

    name = "language"

    @property
    def tag(self):
        return f"language({self.max_len},{self.alphabet})"

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedLanguage)
            and self.alphabet == other.alphabet
            and self.max_len == other.max_len
        )

    def __hash__(self):
        return hash((TruncatedLanguage, self.alphabet, self.max_len))

    def join(self, a, b):
        return a | b

    def mul(self, a, b):
        L = self.max_len
        return frozenset(u + v for u in a for v in b if len(u) + len(v) <= L)

    def leq(self, a, b):
        return a <= b

    def star(self, a, max_iters=None):
        # every nonempty word adds >= 1 letter, so L + 1 rounds reach the fixpoint
        budget = self.max_len + 2 if max_iters is None else max_iters
        acc = self.bottom
        for _ in range(budget):
            nxt = self.unit | self.mul(a, acc)
            if nxt == acc:
                return acc
            acc = nxt
        raise NonConvergenceError("language star did not converge", iterations=budget)

    def eq_array(self, A, B):
        if A.size == 0:
            return np.ones(A.shape, dtype=bool)
        return self._ueq(A, B).astype(bool)

    def validate(self, a):
        if not isinstance(a, frozenset):
            raise ValueError(f"{self.tag}: expected a frozenset of words, got {a!r}")
        for w in a:
            if not isinstance(w, str) or len(w) > self.max_len:
                raise ValueError(f"{self.tag}: bad word {w!r}")
            if any(ch not in self.alphabet for ch in w):
                raise ValueError(f"{self.tag}: word {w!r} uses letters outside alphabet")

    def coerce(self, a):
        if isinstance(a, (set, list, tuple)):
            a = frozenset(a)
        self.validate(a)
        return a

    def words(self, value):
        return sorted(value, key=_word_key)

    def parse(self, literal):
        if isinstance(literal, str):
            literal = [w.strip() for w in literal.strip("{}").split(",") if w.strip()]
            literal = ["" if w in ("ε", "''", '""') else w for w in literal]
        if not isinstance(literal, (list, tuple)):
            raise ParseError(f"bad word-set literal {literal!r}")
        try:
            return self.coerce(frozenset(literal))
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def dump(self, value):
        return self.words(value)

    def format(self, value):
        return "{" + ",".join(w or "ε" for w in self.words(value)) + "}"

    def all_words(self):
        """Every word of length <= max_len, in canonical order."""
        out = [""]
        frontier = [""]
        for _ in range(self.max_len):
            frontier = [w + c for w in frontier for c in self.alphabet]
            out.extend(frontier)
        return out


TROPICAL = TropicalQuantale()
CAPACITY = CapacityQuantale()
VITERBI = ViterbiQuantale()
BOOLEAN = BooleanQuantale()
NUMERIC_INSTANCES = (TROPICAL, CAPACITY, VITERBI, BOOLEAN)

_LANG_TAG = re.compile(r"^language\(\s*(\d+)\s*,\s*([^)]*)\)$")


def quantale_from_tag(tag):
    """Look up an instance from its textual tag (``"tropical"``, ``"language(2,ab)"``...)."""
    text = tag.strip().lower() if isinstance(tag, str) else tag
    for q in NUMERIC_INSTANCES:
        if text == q.name:
            return q
    if isinstance(tag, str):
        m = _LANG_TAG.match(tag.strip())
        if m:
            return TruncatedLanguage(m.group(2).strip(), int(m.group(1)))
    raise ParseError(f"unknown quantale tag {tag!r}")


def _same(q, *values):
    for v in values:
        try:
            q.validate(v)
        except ValueError as exc:
            raise QuantaleMismatchError(str(exc)) from None


def join(q, a, b):
    _same(q, a, b)
    return q.join(a, b)


def mul(q, a, b):
    _same(q, a, b)
    return q.mul(a, b)


def star(q, a, max_iters=None):
    _same(q, a)
    return q.star(a, max_iters=max_iters)
