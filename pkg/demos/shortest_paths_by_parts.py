"""Solve a shortest-path problem one piece at a time, then glued.

Run from the repository root:

    python3 demos/shortest_paths_by_parts.py
"""
from pathlib import Path

from openpaths import (
    INF,
    TROPICAL,
    Compose,
    Leaf,
    OpenMatrix,
    RMatrix,
    SolveReport,
    blackbox,
    check_lax,
    compose_open,
    is_functional,
    solve_compositional,
    star_open,
)
from openpaths.cli import render_table
from openpaths.fileio import load_open_matrix

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def show(title, M):
    print(f"-- {title}")
    print(render_table(M).rstrip())
    print()


M = load_open_matrix(FIX / "worked_M.json")
N = load_open_matrix(FIX / "worked_N.json")

show("left piece, inputs 1,2 -> output 3", M.mat)
show("right piece, input 3 -> output 4", N.mat)

C = compose_open(M, N)
show("glued along c = d", C.mat)
show("all-pairs distances in the glued network", star_open(C).mat)

# Gluing can create routes that neither boundary table sees.  Each piece
# merges a different pair of boundary points (y0,y2 on the left, y0,y1 on
# the right), so after gluing x0 and z0 sit on the same vertex.
left = OpenMatrix.build(
    RMatrix.square(["m0", "m1", "m2", "m3"], TROPICAL,
                   [[7, INF, INF, 5], [INF] * 4, [INF] * 4, [INF, INF, 1, INF]]),
    ["x0"], ["y0", "y1", "y2"], {"x0": "m1"}, {"y0": "m2", "y1": "m1", "y2": "m2"})
right = OpenMatrix.build(
    RMatrix.square(["n0", "n1"], TROPICAL, [[INF, INF], [INF, INF]]),
    ["y0", "y1", "y2"], ["z0", "z1"], {"y0": "n0", "y1": "n0", "y2": "n1"},
    {"z0": "n1", "z1": "n0"})
res = check_lax(left, right)
print("both pieces functional:", is_functional(left), is_functional(right))
show("product of boundary tables", res.product)
show("boundary table of the glued network", res.composite)
print("product never beats glued:", res.holds, "| strictly worse somewhere:", res.strict)
print()

# Two functional chains compose exactly, so the solver never builds the glued matrix.
L = load_open_matrix(FIX / "chain_left.json")
R = load_open_matrix(FIX / "chain_right.json")
report = SolveReport()
fast = solve_compositional(Compose(Leaf(L), Leaf(R)), report=report)
slow = blackbox(star_open(compose_open(L, R)))
show("chain solved piecewise", fast)
print("matches glued solve:", fast == slow, "|", report)
