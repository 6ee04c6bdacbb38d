"""Count train routes through a hub, and watch gluing add loops.

    python3 demos/train_network.py
"""
from pathlib import Path

from openpaths import (
    blackbox_graph,
    compose_open_graph,
    free_category,
    glue_open_graphs,
    path_counts,
    profunctor_compose,
)
from openpaths.fileio import load_graph

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

north = load_graph(FIX / "trainroutes_north.json")
south = load_graph(FIX / "trainroutes_south.json")
whole = compose_open_graph(north, south)
print("stations after gluing at Union:", list(whole.graph.vertices))

G = whole.graph
for n in range(1, 9):
    print(f"  routes of {n} legs from Santa Clarita to Perris:",
          path_counts(G, n).get(("Santa Clarita", "Perris"), 0))
for p in free_category(G, 4)[("Santa Clarita", "Perris")]:
    print("  shortest:", " -> ".join(p.edges))
print()

# Two open graphs whose gluing closes a cycle through the shared boundary.
left = load_graph(FIX / "loop_G.json")
right = load_graph(FIX / "loop_H.json")
glue = glue_open_graphs(left, right)
K = 10
composed = profunctor_compose(blackbox_graph(left, K), blackbox_graph(right, K),
                              glue.left_path, glue.right_path, K=K)
glued = blackbox_graph(glue.composite, K)
print(f"paths a -> d up to length {K}")
print("  from the composed boundary tables:", [list(p.edges) for p in composed[("a", "d")]])
print("  in the glued graph:")
for p in glued[("a", "d")]:
    print(f"    length {len(p):2d}:", " ".join(p.edges))
