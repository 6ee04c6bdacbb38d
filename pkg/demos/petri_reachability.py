"""Token games on small nets, then reachability across a glued boundary.

    python3 demos/petri_reachability.py
"""
from pathlib import Path

from openpaths import (
    INTEGER,
    Bounded,
    blackbox_reach,
    compose_open_net,
    compose_relations,
    fire,
    reachable,
    translate_net,
)
from openpaths.fileio import load_net

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

net = load_net(FIX / "small_net.json")
print(net)
res = reachable(net, {"p1": 1, "p2": 1}, depth=3)
for m in res.sorted():
    print(f"  {m!r:12} via {[t for t, _ in res.witnesses[m].steps]}")

# The same net read with other coefficients.
print("integer, t1 from empty:", fire(translate_net(net, INTEGER), {}, "t1"))
print("sets, t2 from {p3}:", fire(translate_net(net, Bounded(2)), {"p3": 1}, "t2"))
print()

# An open net relates boundary markings, with witness counts by sequence length.
P = load_net(FIX / "open_P.json")
RP = blackbox_reach(P, 1, 3)
print("P relates:")
for (x, y), counts in sorted(RP.counts.items(), key=repr):
    if any(counts[1:]):
        print(f"  {x!r:10} ~> {y!r:10} witnesses by length {counts}")
print()

# A zig-zag: the token must cross the boundary three times, which no
# single pass through P then Q can do.
P, Q = load_net(FIX / "zigzag_P.json"), load_net(FIX / "zigzag_Q.json")
RP = blackbox_reach(P, 1, 4)
RQ = blackbox_reach(Q, 0, 4, inputs=RP.targets())
piecewise = compose_relations(RP, RQ, 4)
glued = blackbox_reach(compose_open_net(P, Q), 1, 4)
print("zig-zag, 1 ~> 5 piecewise:", piecewise.related({"1": 1}, {"5": 1}))
print("zig-zag, 1 ~> 5 glued:    ", glued.related({"1": 1}, {"5": 1}),
      "| length-4 witnesses:", glued.count({"1": 1}, {"5": 1}, 4))
