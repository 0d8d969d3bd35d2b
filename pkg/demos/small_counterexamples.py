"""Three small regular graphs where dense-graph Hamiltonicity heuristics break.

Each graph is built, its structural facts are checked directly, and the
exact oracle settles the question by exhaustive search.
"""

import time

from robustpart.generators import bestposs_parts, fig1i_parts, fig1ii_parts, gen_bestposs, gen_fig1i, gen_fig1ii
from robustpart.graph import connected_components, vertex_connectivity
from robustpart.hamilton import longest_cycle
from robustpart.oracle import hamilton_oracle


def show(title, g):
    print(f"\n== {title}")
    print(f"   {g.n} vertices, degrees {g.min_degree()}..{g.max_degree()}, connectivity {vertex_connectivity(g)}")


def settle(g):
    start = time.perf_counter()
    res = hamilton_oracle(g)
    verdict = "Hamiltonian" if res else "not Hamiltonian"
    print(f"   oracle: {verdict} ({time.perf_counter() - start:.2f}s)")


g = gen_fig1i(4)
show("4-regular graph with a small separating set", g)
a = fig1i_parts(4)["A"]
print(f"   deleting {len(a)} vertices {a} leaves {len(connected_components(g, a))} components")
settle(g)

g = gen_fig1ii(2)
show("5-regular graph cut by two vertices", g)
parts = fig1ii_parts(2)
cut = parts["a"] + parts["b"]
print(f"   deleting {cut} leaves components of sizes {sorted(len(c) for c in connected_components(g, cut))}")
settle(g)

g = gen_bestposs(1, 3, 2)
show("blocks hanging off one vertex (t=1, r=3, k=2)", g)
x = bestposs_parts(1, 3, 2)["X"]
print(f"   deleting {x} leaves components of sizes {sorted(len(c) for c in connected_components(g, x))}")
cyc = longest_cycle(g)
print(f"   longest cycle has {len(cyc)} of {g.n} vertices: {cyc}")
