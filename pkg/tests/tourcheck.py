"""Tour clauses checked from the definitions, independently of robustpart.paths."""

import networkx as nx


def _class_of(classes, v):
    for i, c in enumerate(classes):
        if v in c["vertices"]:
            return i
    return None


def as_classes(rp):
    out = []
    for c in rp.classes:
        entry = {"vertices": set(c.vertices)}
        if c.is_bipartite:
            entry["a"], entry["b"] = (set(s) for s in c.bipartition)
        out.append(entry)
    return out


def tour_violations(g, classes, paths, gamma=None):
    """Names of the failed clauses among T1..T4 (empty list when all hold).

    ``classes`` is a list of dicts with "vertices" and, for bipartite
    classes, "a" and "b". ``paths`` is a list of vertex lists.
    """
    bad = []
    seen = set()
    t1 = True
    for p in paths:
        if len(set(p)) != len(p) or seen & set(p):
            t1 = False
        seen |= set(p)
        if any(not g.has_edge(u, v) for u, v in zip(p, p[1:])):
            t1 = False
        if _class_of(classes, p[0]) is None or _class_of(classes, p[-1]) is None:
            t1 = False
    if not t1:
        bad.append("T1")
    if t1:
        r = nx.MultiGraph()
        r.add_nodes_from(range(len(classes)))
        for p in paths:
            r.add_edge(_class_of(classes, p[0]), _class_of(classes, p[-1]))
        if r.number_of_edges() == 0 or not nx.is_eulerian(r):
            bad.append("T2")
    else:
        bad.append("T2")
    if gamma is not None:
        if any(len(seen & c["vertices"]) > gamma * g.n for c in classes):
            bad.append("T3")
    for c in classes:
        if "a" not in c:
            continue
        ends_a = sum((p[0] in c["a"]) + (p[-1] in c["a"]) for p in paths)
        ends_b = sum((p[0] in c["b"]) + (p[-1] in c["b"]) for p in paths)
        int_a = sum(1 for p in paths for v in p[1:-1] if v in c["a"])
        int_b = sum(1 for p in paths for v in p[1:-1] if v in c["b"])
        if ends_a != ends_b or ends_a == 0 or len(c["a"]) - int_a != len(c["b"]) - int_b:
            bad.append("T4")
            break
    return bad
