"""A long cycle when a Hamilton cycle is out of reach.

Four dense blocks of 16 form a ring joined by single edges, so the graph is
only 2-connected. With t=2 the pipeline picks the two largest classes and
builds a cycle through both of them.
"""

from fractions import Fraction as F

from robustpart.generators import PlantedSpec, gen_planted
from robustpart.graph import vertex_connectivity
from robustpart.pipelines import long_cycle_pipeline

g, _ = gen_planted(PlantedSpec("expanders", (16, 16, 16, 16), bridge=1, seed=0))
print(f"n={g.n}, connectivity {vertex_connectivity(g)}")
out = long_cycle_pipeline(g, 2, r=5, eps=F(1, 10))
print(f"classes found: {[len(c.vertices) for c in out.partition.classes]}")
print(f"selected: {[len(c.vertices) for c in out.selected.classes]}, target {out.covered_target}, slack {out.slack}")
print(f"cycle length {out.length}; degree-based bound for r=5, eps=1/10 is {out.bound}")
for note in out.notes:
    print(f"note: {note}")
