"""Certifying robust expansion, and what a failing witness looks like."""

from fractions import Fraction as F

from robustpart.expansion import certify_bipartite_robust_expander, certify_robust_expander, is_nonexpanding
from robustpart.graph import Graph

nu, tau = F(1, 10), F(1, 4)


def complete(n, shift=0):
    return [(u + shift, v + shift) for u in range(n) for v in range(u + 1, n)]


k16 = Graph(16, complete(16))
cert = certify_robust_expander(k16, range(16), nu, tau, "exact")
print(f"K16: {cert.verdict.value}, {cert.stats['sets_examined']} sets examined")

two = Graph(16, complete(8) + complete(8, 8))
cert = certify_robust_expander(two, range(16), nu, tau, "exact")
print(f"two disjoint K8: {cert.verdict.value}, witness {sorted(cert.witness)}")
print(f"  witness replays as non-expanding: {is_nonexpanding(two, range(16), cert.witness, nu, tau)}")

bridged = Graph(16, complete(8) + complete(8, 8) + [(0, 8), (1, 9)])
for mode in ("exact", "heuristic"):
    cert = certify_robust_expander(bridged, range(16), nu, tau, mode, bound=0 if mode == "heuristic" else None, seed=3)
    print(f"two K8 plus two cross edges, {mode}: {cert.verdict.value}")

a, b = list(range(8)), list(range(8, 16))
kbip = Graph(16, [(x, y) for x in a for y in b if y - 8 != x])
cert = certify_bipartite_robust_expander(kbip, a, b, F(1, 16), tau, "exact")
print(f"K8,8 minus a perfect matching, one-sided from A: {cert.verdict.value}")
