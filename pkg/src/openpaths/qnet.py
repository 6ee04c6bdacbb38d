"""Resource nets: Petri nets and their integer and k-bounded variants.

A net's kind fixes the coefficient monoid of its markings:

* ``Natural``: multisets, the usual token game.
* ``Integer``: signed multisets; every transition is always enabled.
* ``Bounded(k)``: coefficients in ``{0, ..., k-1}`` under the wrap-around
  addition generated by ``k = 1``.  ``Bounded(2)`` is plain sets.
"""
from __future__ import annotations

import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cospan import UnionFind, coproduct_labels, pushout
from .errors import BoundaryMismatchError, DimensionMismatchError, OpenPathsError
from .matrix import FiniteFunction, VertexSet, _as_vertexset

__all__ = [
    "ResourceKind",
    "Natural",
    "Integer",
    "Bounded",
    "NATURAL",
    "INTEGER",
    "kind_from_tag",
    "Marking",
    "Transition",
    "QNet",
    "PreNet",
    "OpenNet",
    "FiringSequence",
    "ReachResult",
    "ReachRelation",
    "fire",
    "fire_steps",
    "reachable",
    "push_marking",
    "compose_open_net",
    "identity_open_net",
    "blackbox_reach",
    "compose_relations",
    "is_functional_net",
    "translate_net",
    "abelianize",
]

log = logging.getLogger(__name__)


# -- coefficient monoids -----------------------------------------------------


class ResourceKind:
    """Coefficient monoid for markings."""

    tag = "?"

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def valid(self, c) -> bool:
        raise NotImplementedError

    def sum(self, values: Iterable[int]) -> int:
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    def __eq__(self, other):
        return type(self) is type(other) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return self.tag


class Natural(ResourceKind):
    tag = "natural"

    def add(self, a, b):
        return a + b

    def valid(self, c):
        return isinstance(c, int) and c >= 0


class Integer(ResourceKind):
    tag = "integer"

    def add(self, a, b):
        return a + b

    def valid(self, c):
        return isinstance(c, int)


class Bounded(ResourceKind):
    """``{0..k-1}`` with ``a + b`` wrapping back onto ``1..k-1`` past ``k-1``."""

    def __init__(self, k: int):
        if k < 2:
            raise ValueError("bounded kind needs k >= 2")
        self.k = k
        self.tag = f"bounded:{k}"
        # addition table; small enough to precompute
        self._table = [[self._add(a, b) for b in range(k)] for a in range(k)]

    def _add(self, a, b):
        s = a + b
        return s if s <= self.k - 1 else ((s - 1) % (self.k - 1)) + 1

    def add(self, a, b):
        return self._table[a][b]

    def valid(self, c):
        return isinstance(c, int) and 0 <= c < self.k

    def values(self):
        return range(self.k)

    def reduce(self, n: int) -> int:
        """Image of a natural number under the quotient ``N -> {0..k-1}``."""
        return n if n < self.k else ((n - 1) % (self.k - 1)) + 1


NATURAL = Natural()
INTEGER = Integer()


def kind_from_tag(tag: str) -> ResourceKind:
    tag = tag.strip().lower()
    if tag == "natural":
        return NATURAL
    if tag == "integer":
        return INTEGER
    if tag.startswith("bounded:"):
        try:
            return Bounded(int(tag.split(":", 1)[1]))
        except ValueError as exc:
            raise ValueError(f"bad bounded kind {tag!r}") from exc
    raise ValueError(f"unknown resource kind {tag!r}")


# -- markings ------------------------------------------------------------------


class Marking(Mapping):
    """Finitely supported place -> coefficient map; zero entries are dropped."""

    __slots__ = ("_items", "_hash")

    def __init__(self, data=None, **kw):
        d = dict(data or {}, **kw)
        self._items = tuple(sorted((str(p), int(c)) for p, c in d.items() if c != 0))
        self._hash = hash(self._items)

    @classmethod
    def from_dense(cls, places, vec):
        return cls({p: c for p, c in zip(places, vec) if c})

    def dense(self, places: VertexSet):
        vec = [0] * len(places)
        for p, c in self._items:
            vec[places.index(p)] = c
        return tuple(vec)

    def __getitem__(self, p):
        for q, c in self._items:
            if q == p:
                return c
        return 0

    def __contains__(self, p):
        return any(q == p for q, _ in self._items)

    def __iter__(self):
        return (p for p, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == Marking(other)
        return NotImplemented

    def __lt__(self, other):
        return self._items < other._items

    def support(self):
        return [p for p, _ in self._items]

    def add(self, other: "Marking", kind: ResourceKind) -> "Marking":
        out = dict(self._items)
        for p, c in other.items():
            out[p] = kind.add(out.get(p, 0), c)
        return Marking(out)

    def __repr__(self):
        if not self._items:
            return "0"
        terms = {1: "{p}", -1: "-{p}"}
        return " + ".join(terms.get(c, "{c}{p}").format(c=c, p=p) for p, c in self._items)


def _marking(m) -> Marking:
    return m if isinstance(m, Marking) else Marking(m)


# -- nets --------------------------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    id: str
    src: Marking
    tgt: Marking


class QNet:
    """Places plus transitions with source and target markings of a fixed kind."""

    def __init__(self, kind: ResourceKind, places, transitions: Iterable):
        self.kind = kind
        self.places = _as_vertexset(places)
        ts = []
        for t in transitions:
            if isinstance(t, Transition):
                tid, src, tgt = t.id, t.src, t.tgt
            elif isinstance(t, Mapping):
                tid, src, tgt = t["id"], t.get("src", {}), t.get("tgt", {})
            else:
                tid, src, tgt = t
            ts.append(Transition(str(tid), _marking(src), _marking(tgt)))
        ids = [t.id for t in ts]
        if len(set(ids)) != len(ids):
            raise DimensionMismatchError("transition ids must be unique")
        for t in ts:
            for m in (t.src, t.tgt):
                for p, c in m.items():
                    if p not in self.places:
                        raise DimensionMismatchError(f"transition {t.id!r} uses unknown place {p!r}")
                    if not kind.valid(c):
                        raise ValueError(f"coefficient {c} is not valid for {kind.tag}")
        self.transitions = tuple(ts)
        self._by_id = {t.id: t for t in ts}

    def transition(self, tid) -> Transition:
        try:
            return self._by_id[tid]
        except KeyError:
            raise OpenPathsError(f"unknown transition {tid!r}") from None

    @property
    def transition_ids(self):
        return [t.id for t in self.transitions]

    def validate_marking(self, m: Marking):
        for p, c in m.items():
            if p not in self.places:
                raise DimensionMismatchError(f"marking uses unknown place {p!r}")
            if not self.kind.valid(c):
                raise ValueError(f"coefficient {c} is not valid for {self.kind.tag}")

    def __eq__(self, other):
        return (isinstance(other, QNet) and self.kind == other.kind
                and self.places == other.places
                and sorted(self.transitions, key=lambda t: t.id)
                == sorted(other.transitions, key=lambda t: t.id))

    __hash__ = None

    def __repr__(self):
        ts = ", ".join(f"{t.id}: {t.src!r} -> {t.tgt!r}" for t in self.transitions)
        return f"QNet<{self.kind.tag} {list(self.places)}; {ts}>"


@dataclass(frozen=True)
class PreNet:
    """Transitions with ordered lists of places as source and target."""

    places: tuple
    transitions: tuple  # of (id, [places], [places])

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(
            (str(i), tuple(s), tuple(t)) for i, s, t in self.transitions))


# -- firing ------------------------------------------------------------------------------


def _contexts(kind: Bounded, s: int, m: int):
    return [r for r in range(kind.k) if kind.add(s, r) == m]


def fire_steps(net: QNet, m, tid):
    """All ``(context, result)`` pairs for firing ``tid`` at ``m``.

    For Natural and Integer nets the context is ``None``.  Bounded nets
    list every ``r`` with ``s + r = m`` and return ``t + r`` for each.
    """
    m = _marking(m)
    t = net.transition(tid)
    kind = net.kind
    if isinstance(kind, Bounded):
        places = sorted(set(m.support()) | set(t.src.support()))
        choices = [_contexts(kind, t.src[p], m[p]) for p in places]
        out = []
        for combo in itertools.product(*choices):
            r = Marking(dict(zip(places, combo)))
            out.append((r, t.tgt.add(r, kind)))
        return out
    res = dict(m.items())
    for p, c in t.src.items():
        res[p] = res.get(p, 0) - c
        if isinstance(kind, Natural) and res[p] < 0:
            return []
    for p, c in t.tgt.items():
        res[p] = res.get(p, 0) + c
    return [(None, Marking(res))]


def fire(net: QNet, m, tid, minimal: bool = False) -> set:
    """Result markings of firing ``tid`` at ``m`` (empty if not enabled).

    ``minimal=True`` on a bounded net keeps only the result for the smallest
    context, a deterministic restriction of the full rule.
    """
    steps = fire_steps(net, m, tid)
    if minimal and isinstance(net.kind, Bounded) and steps:
        steps = [min(steps, key=lambda s: (sum(s[0].values()), s[0]._items))]
    return {res for _, res in steps}


@dataclass(frozen=True)
class FiringSequence:
    initial: Marking
    steps: tuple = ()  # of (transition id, context or None)

    def __len__(self):
        return len(self.steps)

    def extend(self, tid, ctx):
        return FiringSequence(self.initial, self.steps + ((tid, ctx),))

    def replay(self, net: QNet) -> Marking:
        m = self.initial
        for tid, ctx in self.steps:
            for r, res in fire_steps(net, m, tid):
                if r == ctx:
                    m = res
                    break
            else:
                raise OpenPathsError(f"step {tid!r} is not a valid firing")
        return m


@dataclass
class ReachResult:
    """Markings reached by a bounded search, each with one shortest witness."""

    witnesses: dict
    pruned: set = field(default_factory=set)
    depth: int = 0

    @property
    def markings(self):
        return set(self.witnesses)

    def __contains__(self, m):
        return _marking(m) in self.witnesses

    def sorted(self):
        return sorted(self.witnesses, key=lambda m: (len(self.witnesses[m]), m._items))


def _exceeds(m: Marking, cap):
    return cap is not None and any(abs(c) > cap for c in m.values())


def reachable(net: QNet, m0, depth: int, coeff_cap: int | None = None) -> ReachResult:
    """Breadth-first closure under firing, up to ``depth`` steps.

    Markings with a coefficient above ``coeff_cap`` in absolute value are
    not expanded or reported; they are collected in ``pruned`` instead.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    m0 = _marking(m0)
    net.validate_marking(m0)
    seen = {m0: FiringSequence(m0)}
    pruned = set()
    frontier = [m0]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for t in net.transitions:
                for ctx, res in fire_steps(net, m, t.id):
                    if res in seen or res in pruned:
                        continue
                    if _exceeds(res, coeff_cap):
                        pruned.add(res)
                        continue
                    seen[res] = seen[m].extend(t.id, ctx)
                    nxt.append(res)
        frontier = nxt
    if pruned:
        log.info("reachability pruned %d markings above cap %s", len(pruned), coeff_cap)
    return ReachResult(seen, pruned, depth)


# -- open nets ------------------------------------------------------------------------------


def push_marking(m: Marking, f: FiniteFunction, kind: ResourceKind) -> Marking:
    """Image of a marking along a place map, combining coefficients with the kind's addition."""
    out = {}
    for p, c in m.items():
        q = f(p)
        out[q] = kind.add(out.get(q, 0), c)
    return Marking(out)


@dataclass(frozen=True)
class OpenNet:
    leg_in: FiniteFunction
    leg_out: FiniteFunction
    net: QNet

    def __post_init__(self):
        if self.leg_in.codomain != self.net.places or self.leg_out.codomain != self.net.places:
            raise DimensionMismatchError("legs must land in the net's places")

    @classmethod
    def build(cls, net: QNet, inputs, outputs, leg_in, leg_out):
        return cls(FiniteFunction(inputs, net.places, leg_in),
                   FiniteFunction(outputs, net.places, leg_out), net)

    @property
    def input(self):
        return self.leg_in.domain

    @property
    def output(self):
        return self.leg_out.domain

    @property
    def kind(self):
        return self.net.kind


def compose_open_net(P: OpenNet, Q: OpenNet) -> OpenNet:
    """Glue places along the shared boundary; transitions are kept side by side."""
    if P.kind != Q.kind:
        raise BoundaryMismatchError(f"kind mismatch: {P.kind.tag} vs {Q.kind.tag}")
    if P.output != Q.input:
        raise BoundaryMismatchError(
            f"boundary mismatch: {list(P.output)} vs {list(Q.input)}",
            left=list(P.output), right=list(Q.input),
        )
    kind = P.kind
    po = pushout(P.leg_out, Q.leg_in)
    tl, tr = coproduct_labels(P.net.transition_ids, Q.net.transition_ids)
    ts = []
    for name, t in zip(tl, P.net.transitions):
        ts.append(Transition(name, push_marking(t.src, po.left_leg, kind),
                             push_marking(t.tgt, po.left_leg, kind)))
    for name, t in zip(tr, Q.net.transitions):
        ts.append(Transition(name, push_marking(t.src, po.right_leg, kind),
                             push_marking(t.tgt, po.right_leg, kind)))
    net = QNet(kind, po.quotient, ts)
    return OpenNet(P.leg_in.then(po.left_leg), Q.leg_out.then(po.right_leg), net)


def identity_open_net(X, kind: ResourceKind) -> OpenNet:
    X = _as_vertexset(X)
    ident = FiniteFunction.identity(X)
    return OpenNet(ident, ident, QNet(kind, X, []))


def is_functional_net(P: OpenNet) -> bool:
    """No transition produces into an input place or consumes from an output place."""
    ins = {P.leg_in(x) for x in P.input}
    outs = {P.leg_out(y) for y in P.output}
    for t in P.net.transitions:
        if ins & set(t.tgt.support()) or outs & set(t.src.support()):
            return False
    return True


# -- black-boxed reachability ----------------------------------------------------------


def _boundary_markings(X: VertexSet, kind: ResourceKind, cap: int):
    if isinstance(kind, Integer):
        rng = range(-cap, cap + 1)
    elif isinstance(kind, Bounded):
        rng = range(0, min(cap, kind.k - 1) + 1)
    else:
        rng = range(0, cap + 1)
    for combo in itertools.product(rng, repeat=len(X)):
        yield Marking(dict(zip(X, combo)))


def _split(kind: ResourceKind, c: int, r: int):
    """All ways to write ``c`` as an ordered ``r``-term sum in the kind."""
    if r == 0:
        return [()] if c == 0 else []
    if isinstance(kind, Bounded):
        return [v for v in itertools.product(range(kind.k), repeat=r) if kind.sum(v) == c]
    sign = -1 if c < 0 else 1
    n = abs(c)
    out = []
    for bars in itertools.combinations(range(n + r - 1), r - 1):
        parts, prev = [], -1
        for b in bars + (n + r - 1,):
            parts.append(sign * (b - prev - 1))
            prev = b
        out.append(tuple(parts))
    return out


def _decompose(m: Marking, leg: FiniteFunction, kind: ResourceKind):
    """Boundary markings ``y`` whose image along ``leg`` is exactly ``m``.

    Integer coefficients are split sign-coherently so the list is finite.
    """
    image = {leg.codomain[i] for i in leg.image}
    if any(p not in image for p in m.support()):
        return []
    per_place = []
    for j, p in enumerate(leg.codomain):
        pre = [leg.domain[i] for i in leg.preimage(j)]
        if not pre:
            continue
        per_place.append((pre, _split(kind, m[p], len(pre))))
    out = []
    for combo in itertools.product(*(splits for _, splits in per_place)):
        y = {}
        for (pre, _), parts in zip(per_place, combo):
            y.update(zip(pre, parts))
        out.append(Marking(y))
    return out


def _sequences(net: QNet, m0: Marking, depth: int):
    """Every firing sequence of length <= depth, with its intermediate markings."""
    out = []
    stack = [((), (m0,))]
    while stack:
        steps, marks = stack.pop()
        out.append((steps, marks))
        if len(steps) == depth:
            continue
        for t in net.transitions:
            for ctx, res in fire_steps(net, marks[-1], t.id):
                stack.append((steps + ((t.id, ctx),), marks + (res,)))
    return out


def _trace_class_counts(net: QNet, seqs):
    """Count sequences up to swapping adjacent firings that could run in parallel.

    Two neighbouring firings of ``tau`` then ``sigma`` at marking ``m`` are
    swappable when ``m`` covers ``s(tau) + s(sigma)``; the swap reaches the
    same marking.  Returns ``{(length, final marking): number of classes}``.
    """
    index = {steps: k for k, (steps, _) in enumerate(seqs)}
    uf = UnionFind(range(len(seqs)))
    src = {t.id: t.src for t in net.transitions}
    for k, (steps, marks) in enumerate(seqs):
        for i in range(len(steps) - 1):
            a, b = steps[i][0], steps[i + 1][0]
            if a == b:
                continue
            m = marks[i]
            both = src[a].add(src[b], NATURAL)
            if all(m[p] >= c for p, c in both.items()):
                swapped = steps[:i] + (steps[i + 1], steps[i]) + steps[i + 2:]
                uf.union(k, index[swapped])
    classes = defaultdict(set)
    for k, (steps, marks) in enumerate(seqs):
        classes[(len(steps), marks[-1])].add(uf.find(k))
    return {key: len(v) for key, v in classes.items()}


def _raw_counts(seqs):
    counts = defaultdict(int)
    for steps, marks in seqs:
        counts[(len(steps), marks[-1])] += 1
    return counts


@dataclass
class ReachRelation:
    """Boundary-to-boundary reachability with witness counts per sequence length.

    ``counts[(x, y)][n]`` is the number of length-``n`` witnesses from the
    image of ``x`` to the image of ``y``.  For Natural nets witnesses are
    counted up to reordering of independent firings; for Integer and
    Bounded nets every interleaving counts (Bounded steps also record the
    chosen context).
    """

    inputs: VertexSet
    outputs: VertexSet
    kind: ResourceKind
    depth: int
    sources: list
    counts: dict

    def pairs(self) -> set:
        return {k for k, v in self.counts.items() if any(v)}

    def related(self, x, y) -> bool:
        return any(self.counts.get((_marking(x), _marking(y)), ()))

    def count(self, x, y, length=None) -> int:
        v = self.counts.get((_marking(x), _marking(y)), ())
        if length is None:
            return sum(v)
        return v[length] if length < len(v) else 0

    def targets(self) -> set:
        return {y for (_, y) in self.pairs()}


def blackbox_reach(P: OpenNet, boundary_cap: int, depth: int, inputs=None) -> ReachRelation:
    """Black-boxed reachability of an open net at bounded depth.

    Input markings range over coefficients up to ``boundary_cap`` (or over
    ``inputs`` if given).  Output markings are read off every reached
    marking that lives exactly on the output legs' image.
    """
    kind = P.kind
    xs = [_marking(x) for x in inputs] if inputs is not None else list(
        _boundary_markings(P.input, kind, boundary_cap))
    counts = {}
    for x in xs:
        m0 = push_marking(x, P.leg_in, kind)
        seqs = _sequences(P.net, m0, depth)
        per_end = _trace_class_counts(P.net, seqs) if isinstance(kind, Natural) else _raw_counts(seqs)
        decomp = {}
        for (n, m), c in per_end.items():
            if m not in decomp:
                decomp[m] = _decompose(m, P.leg_out, kind)
            for y in decomp[m]:
                vec = counts.setdefault((x, y), [0] * (depth + 1))
                vec[n] += c
    counts = {k: tuple(v) for k, v in counts.items()}
    return ReachRelation(P.input, P.output, kind, depth, xs, counts)


def compose_relations(R: ReachRelation, S: ReachRelation, depth: int | None = None) -> ReachRelation:
    """Relational composite with split-sum witness counts.

    ``count[(x, z)][n] = sum over y and i + j = n of R[(x, y)][i] * S[(y, z)][j]``.
    """
    if R.outputs != S.inputs:
        raise BoundaryMismatchError("relations do not share a boundary",
                                    left=list(R.outputs), right=list(S.inputs))
    depth = R.depth + S.depth if depth is None else depth
    by_y = defaultdict(list)
    for (y, z), v in S.counts.items():
        by_y[y].append((z, v))
    out = {}
    for (x, y), u in R.counts.items():
        for z, v in by_y.get(y, ()):
            vec = out.setdefault((x, z), [0] * (depth + 1))
            for i, a in enumerate(u):
                if not a:
                    continue
                for j, b in enumerate(v):
                    if b and i + j <= depth:
                        vec[i + j] += a * b
    out = {k: tuple(v) for k, v in out.items() if any(v)}
    return ReachRelation(R.inputs, S.outputs, R.kind, depth, R.sources, out)


# -- translations -----------------------------------------------------------------------------


def translate_net(net: QNet, target: ResourceKind) -> QNet:
    """Change a Natural net's coefficient monoid.

    ``Integer`` includes the multisets unchanged; ``Bounded(k)`` applies the
    quotient map ``n -> n`` for ``n < k`` and wraps larger counts.
    """
    if not isinstance(net.kind, Natural):
        raise OpenPathsError(f"no translation from {net.kind.tag} to {target.tag}")
    if isinstance(target, Natural):
        return net
    if isinstance(target, Integer):
        conv = lambda m: m
    elif isinstance(target, Bounded):
        conv = lambda m: Marking({p: target.reduce(c) for p, c in m.items()})
    else:
        raise OpenPathsError(f"no translation to {target.tag}")
    return QNet(target, net.places,
                [Transition(t.id, conv(t.src), conv(t.tgt)) for t in net.transitions])


def translate_marking(m: Marking, target: ResourceKind) -> Marking:
    if isinstance(target, Bounded):
        return Marking({p: target.reduce(c) for p, c in m.items()})
    return m


def abelianize(pre: PreNet) -> QNet:
    """Forget the order of a pre-net's source and target words."""
    def count(word):
        out = defaultdict(int)
        for p in word:
            out[p] += 1
        return Marking(out)

    return QNet(NATURAL, pre.places, [(i, count(s), count(t)) for i, s, t in pre.transitions])
