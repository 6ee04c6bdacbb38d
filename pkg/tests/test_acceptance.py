"""End-to-end acceptance checks.

Each ``criterion_*`` function runs one check and returns ``(ok, detail)``.
Under pytest every criterion is its own test and a PASS/FAIL summary line
per criterion is printed at the end of the session.  Run this file as a
script to get the same lines without pytest:

    python3 tests/test_acceptance.py
"""
import itertools
import math
import os
import sys
import time
from pathlib import Path

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

from oracles import check_pushout_universal, edge_walks, functions
from openpaths import fileio
from openpaths.cospan import compose_open, pushout
from openpaths.generators import (
    default_seed,
    make_rng,
    random_composable_pair,
    random_matrix,
    random_open_graph_pair,
    random_open_net_pair,
)
from openpaths.matrix import FiniteFunction, closure_fix, closure_fw, closure_series_stable
from openpaths.netgraph import blackbox_graph, glue_open_graphs, profunctor_compose
from openpaths.pathsolve import binomial_sides, check_lax, strict_gluing
from openpaths.qnet import (
    Bounded,
    blackbox_reach,
    compose_open_net,
    compose_relations,
    is_functional_net,
)
from openpaths.quantale import BOOLEAN, NUMERIC_INSTANCES, TROPICAL, VITERBI

FIX = Path(__file__).parent / "fixtures"
SEED = default_seed()
RESULTS = {}


def rng_for(n):
    return make_rng([SEED, n])


def record(n, title):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            RESULTS[n] = (ok, title, f"{detail} [{time.perf_counter() - t0:.2f}s]")
            return ok, detail
        run.__name__ = fn.__name__
        run.number = n
        return run
    return wrap


# -- 1 ---------------------------------------------------------------------------------


@record(1, "worked composite reproduced byte-exact")
def criterion_1():
    t0 = time.perf_counter()
    M = fileio.load_open_matrix(FIX / "worked_M.json")
    N = fileio.load_open_matrix(FIX / "worked_N.json")
    text = fileio.dumps(fileio.open_matrix_to_obj(compose_open(M, N)))
    elapsed = time.perf_counter() - t0
    same = text.encode() == (FIX / "worked_composite.json").read_bytes()
    return same and elapsed < 1.0, f"byte-equal={same} runtime={elapsed:.3f}s (< 1s)"


# -- 2 ---------------------------------------------------------------------------------


@record(2, "closure algorithms agree")
def criterion_2():
    rng = rng_for(2)
    t0 = time.perf_counter()
    bad = []
    for q in NUMERIC_INSTANCES:
        for i in range(500):
            M = random_matrix(q, int(rng.integers(1, 9)), rng)
            F = closure_fw(M)
            S, _ = closure_series_stable(M)
            if not (F == closure_fix(M) and F == S):
                bad.append((q.tag, i))
    elapsed = time.perf_counter() - t0
    return not bad and elapsed < 30, f"2000 matrices, mismatches={len(bad)}, {elapsed:.1f}s (< 30s)"


# -- 3 ---------------------------------------------------------------------------------


@record(3, "functional pairs: black-box of composite equals product")
def criterion_3():
    rng = rng_for(3)
    fails = 0
    for q in NUMERIC_INSTANCES:
        for _ in range(500):
            M, N = random_composable_pair(q, rng, functional=True, boundary="matched")
            res = check_lax(M, N)
            fails += not (res.product == res.composite)
    # informational: functional pieces whose legs identify different boundary points
    rng = rng_for(30)
    free_strict = 0
    for _ in range(500):
        M, N = random_composable_pair(TROPICAL, rng, functional=True, boundary="free")
        if not strict_gluing(M, N):
            free_strict += check_lax(M, N).strict
    return fails == 0, (f"2000 matched-leg pairs, failures={fails}; "
                        f"free-leg pairs where product falls short: {free_strict}/500")


# -- 4 ---------------------------------------------------------------------------------


@record(4, "arbitrary pairs: product below composite, strict case seen")
def criterion_4():
    rng = rng_for(4)
    violations, strict, example = 0, 0, None
    for i in range(500):
        q = NUMERIC_INSTANCES[i % 4]
        M, N = random_composable_pair(q, rng)
        res = check_lax(M, N)
        violations += not res.holds
        if res.strict:
            strict += 1
            if example is None:
                example = (i, q.tag, res.product.to_lists(), res.composite.to_lists())
    detail = f"500 pairs, violations={violations}, strict={strict}"
    if example:
        i, tag, prod, comp = example
        detail += f"; first strict pair #{i} ({tag}): product={prod} composite={comp}"
    return violations == 0 and strict > 0, detail


# -- 5 ---------------------------------------------------------------------------------


@record(5, "binomial expansion sides agree")
def criterion_5():
    rng = rng_for(5)
    fails = 0
    for q in NUMERIC_INSTANCES:
        for _ in range(100):
            M, N = random_composable_pair(q, rng, functional=True)
            for n in range(7):
                lhs, rhs = binomial_sides(M, N, n)
                fails += not (lhs == rhs)
    return fails == 0, f"400 pairs x n=0..6, failures={fails}"


# -- 6 ---------------------------------------------------------------------------------


@record(6, "loop example: composed table smaller than composite")
def criterion_6():
    G = fileio.load_graph(FIX / "loop_G.json")
    H = fileio.load_graph(FIX / "loop_H.json")
    glue = glue_open_graphs(G, H)
    composed = profunctor_compose(blackbox_graph(G, 10), blackbox_graph(H, 10),
                                  glue.left_path, glue.right_path, K=10)
    whole = blackbox_graph(glue.composite, 10)
    C = glue.composite
    brute = [w for n in range(11)
             for w in edge_walks(C.graph.vertices, C.graph.edges, C.leg_in("a"), C.leg_out("d"), n)]
    lengths = [len(p) for p in whole[("a", "d")]]
    agree = sorted(p.edges for p in whole[("a", "d")]) == sorted(brute)
    ok = composed.count("a", "d") == 1 and lengths == [2, 6, 10] and agree
    return ok, (f"composed(a,d)={composed.count('a', 'd')} composite(a,d)={len(lengths)} "
                f"lengths={lengths} brute-force agrees={agree}")


# -- 7 ---------------------------------------------------------------------------------


@record(7, "functional graphs: path counts split over the boundary")
def criterion_7():
    rng = rng_for(7)
    count_fails = table_fails = 0
    for _ in range(100):
        G, H = random_open_graph_pair(rng, max_vertices=5, functional=True, injective_y=True)
        glue = glue_open_graphs(G, H)
        BG, BH = blackbox_graph(G, 6), blackbox_graph(H, 6)
        BC = blackbox_graph(glue.composite, 6)
        for x, z in itertools.product(G.input, H.output):
            for n in range(7):
                split = sum(BG.count(x, y, i) * BH.count(y, z, n - i)
                            for y in G.output for i in range(n + 1))
                count_fails += split != BC.count(x, z, n)
        composed = profunctor_compose(BG, BH, glue.left_path, glue.right_path, K=6)
        table_fails += not (composed == BC)
    return count_fails == 0 and table_fails == 0, (
        f"100 pairs, count mismatches={count_fails}, table mismatches={table_fails}")


# -- 8 ---------------------------------------------------------------------------------


@record(8, "functional nets: reachability composes, zig-zag strict")
def criterion_8():
    rng = rng_for(8)
    fails = active = 0
    for _ in range(100):
        P, Q = random_open_net_pair(rng, max_places=3, max_transitions=2, functional=True)
        assert is_functional_net(P) and is_functional_net(Q)
        RP = blackbox_reach(P, 2, 6)
        RQ = blackbox_reach(Q, 0, 6, inputs=RP.targets())
        RC = blackbox_reach(compose_open_net(P, Q), 2, 6)
        fails += compose_relations(RP, RQ, 6).counts != RC.counts
        active += any(any(v[1:]) for v in RC.counts.values())
    P = fileio.load_net(FIX / "zigzag_P.json")
    Q = fileio.load_net(FIX / "zigzag_Q.json")
    RP = blackbox_reach(P, 2, 6)
    RQ = blackbox_reach(Q, 0, 6, inputs=RP.targets())
    zig = compose_relations(RP, RQ, 6).pairs() < blackbox_reach(compose_open_net(P, Q), 2, 6).pairs()
    return fails == 0 and zig, (f"100 pairs ({active} with firings), mismatches={fails}; "
                                f"zig-zag strict containment={zig}")


# -- 9 ---------------------------------------------------------------------------------


def _quantale_law_failures(q, a, b, c):
    eq = q.eq
    checks = (
        eq(q.join(a, b), q.join(b, a)),
        eq(q.join(q.join(a, b), c), q.join(a, q.join(b, c))),
        eq(q.join(a, a), a),
        eq(q.join(a, q.bottom), a),
        eq(q.mul(q.mul(a, b), c), q.mul(a, q.mul(b, c))),
        eq(q.mul(a, q.unit), a) and eq(q.mul(q.unit, a), a),
        eq(q.mul(a, q.bottom), q.bottom) and eq(q.mul(q.bottom, a), q.bottom),
        eq(q.mul(a, q.join(b, c)), q.join(q.mul(a, b), q.mul(a, c))),
        eq(q.mul(q.join(b, c), a), q.join(q.mul(b, a), q.mul(c, a))),
        q.leq(a, b) == eq(q.join(a, b), b),
        eq(q.star(a), q.join(q.unit, q.mul(a, q.star(a)))),
        not q.leq(a, b) or q.leq(q.mul(a, c), q.mul(b, c)),
    )
    return sum(not ok for ok in checks)


def _sample(q, rng):
    if q is BOOLEAN:
        return bool(rng.integers(0, 2))
    if q is VITERBI:
        return float(rng.choice([0.0, 1.0])) if rng.random() < 0.1 else float(rng.random())
    if rng.random() < 0.1:
        return float(rng.choice([0.0, float("inf")]))
    # multiples of 1/64 below 20: double addition is exact there
    return int(rng.integers(0, 20 * 64)) / 64


def _real_assoc_slips(rng, n):
    """Tropical products of arbitrary doubles that associate only up to rounding."""
    slips = 0
    for _ in range(n):
        a, b, c = (float(rng.random() * 20) for _ in range(3))
        lhs, rhs = TROPICAL.mul(TROPICAL.mul(a, b), c), TROPICAL.mul(a, TROPICAL.mul(b, c))
        if lhs != rhs:
            slips += 1
            assert math.isclose(lhs, rhs, rel_tol=1e-12)
    return slips


@record(9, "quantale and bounded-monoid laws")
def criterion_9():
    rng = rng_for(9)
    qfail = 0
    for q in NUMERIC_INSTANCES:
        for _ in range(10_000):
            qfail += _quantale_law_failures(q, _sample(q, rng), _sample(q, rng), _sample(q, rng))
    bfail = 0
    for k in (2, 3, 4):
        B = Bounded(k)
        vals = range(k)
        for a, b, c in itertools.product(vals, repeat=3):
            bfail += B.add(B.add(a, b), c) != B.add(a, B.add(b, c))
        for a, b in itertools.product(vals, repeat=2):
            bfail += B.add(a, b) != B.add(b, a)
        for x in vals:
            bfail += B.add(x, 0) != x
            bfail += B.sum([x] * k) != x
    slips = _real_assoc_slips(rng, 10_000)
    return qfail == 0 and bfail == 0, (
        f"4 x 10^4 sampled triples, law failures={qfail}; "
        f"bounded k=2,3,4 exhaustive, failures={bfail}; "
        f"arbitrary-double tropical products equal within 1e-12 ({slips} differ by rounding)")


# -- 10 --------------------------------------------------------------------------------


@record(10, "pushout universal property, exhaustive up to size 3")
def criterion_10():
    configs, fails = 0, []
    for nz, na, nb in itertools.product(range(4), repeat=3):
        Z = [f"z{i}" for i in range(nz)]
        A = [f"a{i}" for i in range(na)]
        B = [f"b{i}" for i in range(nb)]
        for f in functions(nz, na):
            for g in functions(nz, nb):
                po = pushout(FiniteFunction(Z, A, f), FiniteFunction(Z, B, g))
                err = check_pushout_universal(f, g, na, nb, po.left_leg.image,
                                              po.right_leg.image, len(po.quotient))
                configs += 1
                if err:
                    fails.append((f, g, na, nb, err))
    return not fails, f"{configs} configurations, failures={len(fails)}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def summary_lines():
    lines = []
    for n in sorted(RESULTS):
        ok, title, detail = RESULTS[n]
        lines.append(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} -- {detail}")
    return lines


@pytest.mark.parametrize("check", CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_criterion(check):
    ok, detail = check()
    print(f"{'PASS' if ok else 'FAIL'} criterion {check.number}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    print(f"seed={SEED}")
    for check in CRITERIA:
        check()
        print(summary_lines()[-1] if RESULTS else "", flush=True)
    sys.exit(0 if all(ok for ok, _, _ in RESULTS.values()) else 1)
