import pytest
from hypothesis import given, settings, strategies as st

from openpaths import errors
from openpaths.cospan import OpenMatrix, compose_open, identity_open
from openpaths.generators import make_rng, random_composable_pair
from openpaths.matrix import RMatrix, identity_matrix, is_rcategory
from openpaths.pathsolve import (
    Compose,
    Leaf,
    SolveReport,
    Tensor,
    binomial_sides,
    blackbox,
    check_lax,
    is_functional,
    leg_kernel,
    materialize,
    solve_compositional,
    star_open,
    strict_gluing,
)
from openpaths.quantale import INF, NUMERIC_INSTANCES, TROPICAL

from oracles import naive_series


def worked_pair():
    M = OpenMatrix.build(
        RMatrix.square("abc", TROPICAL, [[1, 2, .1], [3, 0, .2], [INF, 1, .2]]),
        ["1", "2"], ["3"], {"1": "a", "2": "b"}, {"3": "c"})
    N = OpenMatrix.build(
        RMatrix.square("de", TROPICAL, [[6, INF], [0, 9]]),
        ["3"], ["4"], {"3": "d"}, {"4": "e"})
    return M, N


def chain(prefix, inp, out, w):
    """Three vertices in a row, functional: in -> mid -> out plus a shortcut."""
    a, b, c = (f"{prefix}{i}" for i in range(3))
    mat = RMatrix.square([a, b, c], TROPICAL,
                         [[INF, w[0], w[2]], [INF, INF, w[1]], [INF, INF, INF]])
    return OpenMatrix.build(mat, [inp], [out], {inp: a}, {out: c})


class TestBlackbox:
    def test_reads_boundary_entries(self):
        M, _ = worked_pair()
        assert blackbox(M).to_lists() == [[.1], [.2]]

    def test_category_identity(self):
        assert blackbox(identity_open("pq", TROPICAL, category=True)) == identity_matrix(
            "pq", TROPICAL)

    def test_repeated_leg_duplicates_rows(self):
        M = OpenMatrix.build(RMatrix.square("uv", TROPICAL, [[INF, 3], [INF, INF]]),
                             ["x", "x2"], ["y"], {"x": "u", "x2": "u"}, {"y": "v"})
        assert blackbox(M).to_lists() == [[3.0], [3.0]]


class TestStarOpen:
    def test_identity(self):
        I = identity_open("pq", TROPICAL)
        assert star_open(I).mat == identity_matrix("pq", TROPICAL)

    def test_glued_distance(self):
        M, N = worked_pair()
        C = star_open(compose_open(M, N))
        assert is_rcategory(C.mat)
        ref = naive_series(compose_open(M, N).mat, 8)
        # input 1 sits on a, output 4 on e
        assert blackbox(C).to_lists() == [[ref[0][3]], [ref[1][3]]]

    def test_idempotent(self):
        M, _ = worked_pair()
        assert star_open(star_open(M)).mat == star_open(M).mat


class TestFunctional:
    def test_zero_apex(self):
        assert is_functional(identity_open("pq", TROPICAL))

    def test_worked_example_is_not(self):
        M, _ = worked_pair()
        assert not is_functional(M)

    def test_single_edge(self):
        assert is_functional(chain("u", "i", "o", [1, 2, 5]))

    def test_leg_kernel(self):
        M = OpenMatrix.build(RMatrix.square("uv", TROPICAL, [[INF, INF], [INF, INF]]),
                             [], ["p", "q", "r"], {}, {"p": "v", "q": "u", "r": "v"})
        assert leg_kernel(M.leg_out) == (0, 1, 0)


class TestSolveCompositional:
    def test_functional_chain(self):
        L, R = chain("u", "i", "m", [1, 2, 5]), chain("v", "m", "o", [3, 4, 10])
        report = SolveReport()
        fast = solve_compositional(Compose(Leaf(L), Leaf(R)), report=report)
        glued = solve_compositional(Compose(Leaf(L), Leaf(R)), mode="glued")
        assert fast.identical(glued)
        assert fast.to_lists() == [[10.0]]
        assert report.fast_nodes == 1 and report.fallback_nodes == 0

    def test_single_leaf(self):
        M, _ = worked_pair()
        assert solve_compositional(Leaf(M)) == blackbox(star_open(M))

    def test_non_functional_falls_back(self):
        M, N = worked_pair()
        report = SolveReport()
        res = solve_compositional(Compose(Leaf(M), Leaf(N)), report=report)
        assert res == blackbox(star_open(compose_open(M, N)))
        assert report.fallback_nodes == 1

    def test_compositional_mode_refuses(self):
        M, N = worked_pair()
        with pytest.raises(errors.NotFunctionalError):
            solve_compositional(Compose(Leaf(M), Leaf(N)), mode="compositional")

    def test_unknown_mode(self):
        M, _ = worked_pair()
        with pytest.raises(ValueError):
            solve_compositional(Leaf(M), mode="fastest")

    def test_boundary_mismatch(self):
        L, R = chain("u", "i", "m", [1, 2, 5]), chain("v", "k", "o", [3, 4, 10])
        with pytest.raises(errors.BoundaryMismatchError):
            solve_compositional(Compose(Leaf(L), Leaf(R)))

    def test_mixed_tree(self):
        L1, R1 = chain("u", "i", "m", [1, 2, 5]), chain("v", "m", "o", [3, 4, 10])
        M, N = worked_pair()
        expr = Tensor(Compose(Leaf(L1), Leaf(R1)), Compose(Leaf(M), Leaf(N)))
        report = SolveReport()
        res = solve_compositional(expr, report=report)
        assert res == blackbox(star_open(materialize(expr)))
        assert report.fast_nodes == 1 and report.fallback_nodes == 1

    def test_longer_functional_chain(self):
        parts = [chain(f"c{k}", f"b{k}", f"b{k + 1}", [k + 1, 2, 9]) for k in range(4)]
        expr = Leaf(parts[0])
        for p in parts[1:]:
            expr = Compose(expr, Leaf(p))
        fast = solve_compositional(expr, mode="compositional")
        assert fast == solve_compositional(expr, mode="glued")


class TestLax:
    def test_identity_on_either_side(self):
        M, _ = worked_pair()
        for left, right in ((identity_open(M.input, TROPICAL), M),
                            (M, identity_open(M.output, TROPICAL))):
            res = check_lax(left, right)
            assert res.holds and not res.strict

    def test_functional_pair_is_strict_equality(self):
        res = check_lax(chain("u", "i", "m", [1, 2, 5]), chain("v", "m", "o", [3, 4, 10]))
        assert res.holds and res.product == res.composite


class TestFreeLegs:
    """Functional pieces glued along legs that identify different boundary points."""

    def pair(self):
        M = OpenMatrix.build(
            RMatrix.square(["m0", "m1", "m2", "m3"], TROPICAL,
                           [[7, INF, INF, 5], [INF] * 4, [INF] * 4, [INF, INF, 1, INF]]),
            ["x0"], ["y0", "y1", "y2"], {"x0": "m1"}, {"y0": "m2", "y1": "m1", "y2": "m2"})
        N = OpenMatrix.build(
            RMatrix.square(["n0", "n1"], TROPICAL, [[INF, INF], [INF, INF]]),
            ["y0", "y1", "y2"], ["z0", "z1"], {"y0": "n0", "y1": "n0", "y2": "n1"},
            {"z0": "n1", "z1": "n0"})
        return M, N

    def test_both_pieces_are_functional(self):
        M, N = self.pair()
        assert is_functional(M) and is_functional(N)
        assert not strict_gluing(M, N)

    def test_product_falls_short_of_composite(self):
        M, N = self.pair()
        res = check_lax(M, N)
        assert res.holds and res.strict
        assert res.composite.to_lists() == [[0.0, 0.0]]
        assert res.product.to_lists() == [[INF, 0.0]]

    def test_solver_does_not_take_the_shortcut(self):
        M, N = self.pair()
        report = SolveReport()
        res = solve_compositional(Compose(Leaf(M), Leaf(N)), report=report)
        assert res == blackbox(star_open(compose_open(M, N)))
        assert report.fast_nodes == 0
        with pytest.raises(errors.NotFunctionalError):
            solve_compositional(Compose(Leaf(M), Leaf(N)), mode="compositional")

    def test_binomial_still_holds(self):
        M, N = self.pair()
        for n in range(6):
            lhs, rhs = binomial_sides(M, N, n)
            assert lhs == rhs


class TestBinomial:
    def test_n0_is_identity_black_box(self):
        L, R = chain("u", "i", "m", [1, 2, 5]), chain("v", "m", "o", [3, 4, 10])
        lhs, rhs = binomial_sides(L, R, 0)
        assert lhs == rhs
        assert lhs.to_lists() == [[INF]]

    def test_n1_is_join_of_single_steps(self):
        L, R = chain("u", "i", "m", [1, 2, 1]), chain("v", "m", "o", [3, 4, 10])
        lhs, rhs = binomial_sides(L, R, 1)
        assert lhs == rhs

    def test_needs_functional(self):
        M, N = worked_pair()
        with pytest.raises(errors.NotFunctionalError):
            binomial_sides(M, N, 2)
        with pytest.raises(ValueError):
            binomial_sides(*TestFreeLegs().pair(), -1)


@pytest.mark.parametrize("q", NUMERIC_INSTANCES, ids=lambda q: q.tag)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_random_pairs(q, seed):
    rng = make_rng(seed)
    M, N = random_composable_pair(q, rng)
    assert check_lax(M, N).holds
    F1, F2 = random_composable_pair(q, rng, functional=True, boundary="matched")
    res = check_lax(F1, F2)
    assert res.holds and res.product == res.composite
    assert solve_compositional(Compose(Leaf(F1), Leaf(F2)), mode="compositional") == \
        res.composite
    for n in range(4):
        lhs, rhs = binomial_sides(F1, F2, n)
        assert lhs == rhs
