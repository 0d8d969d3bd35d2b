"""Extremal constructions, random regular graphs and planted instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError
from .graph import DEFAULT_PARAMS, Graph, Params, connected_components, is_k_connected
from .structures import ComponentLabel, RobustPartition


def _complete_edges(vertices: Sequence[int]) -> list[tuple[int, int]]:
    return list(itertools.combinations(sorted(vertices), 2))


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


# ---------------------------------------------------------------------------
# two cliques around a complete bipartite core


def fig1i_parts(m: int) -> dict[str, list[int]]:
    """Vertex layout used by :func:`gen_fig1i`: cliques C1, C2 and sides A, B."""
    return {
        "C1": list(range(0, m + 1)),
        "C2": list(range(m + 1, 2 * m + 2)),
        "A": list(range(2 * m + 2, 3 * m + 2)),
        "B": list(range(3 * m + 2, 4 * m + 1)),
    }


def gen_fig1i(m: int) -> Graph:
    """m-regular, m/2-connected, non-Hamiltonian graph on 4m+1 vertices (m % 4 == 0).

    Each clique sends m/2 matching edges to A (lowest ids first). The matched
    clique vertices then have degree m+1, so m/4 disjoint edges among them
    are removed in each clique.
    """
    if m <= 0 or m % 4:
        raise InputError(f"m must be a positive multiple of 4, got {m}")
    parts = fig1i_parts(m)
    c1, c2, a, b = parts["C1"], parts["C2"], parts["A"], parts["B"]
    edges = set(_complete_edges(c1)) | set(_complete_edges(c2))
    edges |= {_edge(x, y) for x in a for y in b}
    half = m // 2
    matched = [c1[:half], c2[:half]]
    for clique_part, targets in zip(matched, (a[:half], a[half:])):
        edges |= {_edge(x, y) for x, y in zip(clique_part, targets)}
        for i in range(0, half, 2):
            edges.discard(_edge(clique_part[i], clique_part[i + 1]))
    g = Graph(4 * m + 1, sorted(edges))
    if g.min_degree() != m or g.max_degree() != m:
        raise InputError("construction is not regular")  # pragma: no cover
    if len(connected_components(g, a)) != m + 1:
        raise InputError("construction does not split into m+1 components")  # pragma: no cover
    return g


def fig1ii_parts(m: int) -> dict[str, list[int]]:
    parts: dict[str, list[int]] = {}
    sizes = (m, m - 1, m)
    for i, s in enumerate(sizes, 1):
        start = 3 * m * (i - 1)
        parts[f"Q{i}"] = list(range(start, start + 3 * m))
        parts[f"A{i}"] = list(range(start, start + s))
        parts[f"B{i}"] = list(range(start + s, start + 2 * s))
    parts["a"] = [9 * m]
    parts["b"] = [9 * m + 1]
    return parts


def gen_fig1ii(m: int) -> Graph:
    """(3m-1)-regular 2-connected graph on 9m+2 vertices; removing the two apexes leaves 3 pieces."""
    if m < 1:
        raise InputError(f"m must be at least 1, got {m}")
    parts = fig1ii_parts(m)
    apex_a, apex_b = parts["a"][0], parts["b"][0]
    edges = set()
    for i in (1, 2, 3):
        edges |= set(_complete_edges(parts[f"Q{i}"]))
        for x, y in zip(parts[f"A{i}"], parts[f"B{i}"]):
            edges.discard(_edge(x, y))
        edges |= {_edge(apex_a, x) for x in parts[f"A{i}"]}
        edges |= {_edge(apex_b, y) for y in parts[f"B{i}"]}
    g = Graph(9 * m + 2, sorted(edges))
    if g.min_degree() != 3 * m - 1 or g.max_degree() != 3 * m - 1:
        raise InputError(f"m={m}: construction is not (3m-1)-regular")
    if not is_k_connected(g, 2):
        raise InputError(f"m={m}: construction is not 2-connected")
    return g


# ---------------------------------------------------------------------------
# blocks hanging off a small cut set


def bestposs_parts(t: int, r: int, k: int) -> dict[str, list[int]]:
    degree = 2 * k * (r - 1)
    parts = {"X": list(range(t))}
    for i in range(r - 1):
        start = t + i * (degree + 1)
        parts[f"U{i + 1}"] = list(range(start, start + degree + 1))
    return parts


def gen_bestposs(t: int, r: int, k: int) -> Graph:
    """D-regular t-connected graph whose cycles meet at most t of its r-1 blocks.

    n = (r-1)(2k(r-1)+1) + t and D = 2k(r-1).
    """
    if r < 2 or t < 1 or t > r - 1:
        raise InputError(f"need r >= 2 and 1 <= t <= r-1, got t={t}, r={r}")
    if k < 2 * t:
        raise InputError(f"need k >= 2t, got k={k}, t={t}")
    degree = 2 * k * (r - 1)
    matched = t * degree // (r - 1)
    if (t * degree) % (r - 1) or matched % 2:
        raise InputError("t*D/(r-1) must be an even integer")
    parts = bestposs_parts(t, r, k)
    xs = parts["X"]
    edges = set()
    for i in range(r - 1):
        block = parts[f"U{i + 1}"]
        edges |= set(_complete_edges(block))
        ys = block[:matched]
        for j in range(0, matched, 2):
            edges.discard(_edge(ys[j], ys[j + 1]))
        for j, y in enumerate(ys):
            edges.add(_edge(xs[j % t], y))
    n = (r - 1) * (degree + 1) + t
    g = Graph(n, sorted(edges))
    if g.min_degree() != degree or g.max_degree() != degree:
        raise InputError("construction is not regular")  # pragma: no cover
    if not is_k_connected(g, t):
        raise InputError("construction is not t-connected")  # pragma: no cover
    return g


# ---------------------------------------------------------------------------
# random regular graphs


def _pairing(n: int, degree: int, rng: random.Random) -> Optional[set]:
    """One run of the configuration model that re-draws offending pairs.

    Returns None when the remaining stubs cannot be paired simply.
    """
    stubs = [v for v in range(n) for _ in range(degree)]
    edges: set = set()
    while stubs:
        for _ in range(50):
            i, j = rng.sample(range(len(stubs)), 2)
            u, v = stubs[i], stubs[j]
            if u != v and _edge(u, v) not in edges:
                break
        else:
            return None
        edges.add(_edge(u, v))
        for idx in sorted((i, j), reverse=True):
            stubs[idx] = stubs[-1]
            stubs.pop()
    return edges


def gen_random_regular(n: int, degree: int, seed: int = 0) -> Graph:
    """Random D-regular graph from the configuration model, deterministic per seed.

    Dense requests are generated as the complement of a sparse one.
    """
    if n <= 0 or degree < 0 or degree >= n:
        raise InputError(f"need 0 <= D < n, got n={n}, D={degree}")
    if (n * degree) % 2:
        raise InputError(f"n*D must be even, got n={n}, D={degree}")
    rng = random.Random(seed)
    complement = degree > (n - 1) // 2
    target = n - 1 - degree if complement else degree
    for _ in range(10_000):
        edges = _pairing(n, target, rng)
        if edges is not None:
            break
    else:  # pragma: no cover
        raise InputError("configuration model did not produce a simple graph")
    if complement:
        edges = set(_complete_edges(range(n))) - edges
    g = Graph(n, sorted(edges))
    assert g.min_degree() == degree == g.max_degree()
    return g


# ---------------------------------------------------------------------------
# planted instances


@dataclass(frozen=True)
class PlantedSpec:
    """Planted structure: ``sizes`` are class sizes (per side for bipartite classes).

    Consecutive classes are joined by matchings of width ``bridge``; with three
    or more classes the chain is closed into a cycle. Expander classes are
    cliques minus a random ``sparsity``-regular graph; bipartite classes are
    complete bipartite minus a random perfect matching.
    """

    family: str
    sizes: tuple
    bridge: int = 3
    sparsity: int = 0
    seed: int = 0
    relabel: bool = True


def gen_planted(spec: PlantedSpec, params: Params = DEFAULT_PARAMS) -> tuple[Graph, RobustPartition]:
    if spec.family not in ("expanders", "bipartite"):
        raise InputError(f"unknown planted family {spec.family!r}")
    if not spec.sizes or any(s < 8 for s in spec.sizes):
        raise InputError("planted classes need at least 8 vertices (per side)")
    rng = random.Random(spec.seed)
    edges: set = set()
    classes: list[tuple[list[int], Optional[tuple[list[int], list[int]]]]] = []
    nxt = 0
    for s in spec.sizes:
        if spec.family == "expanders":
            vs = list(range(nxt, nxt + s))
            nxt += s
            edges |= set(_complete_edges(vs))
            if spec.sparsity:
                sparse = gen_random_regular(s, spec.sparsity, rng.randrange(1 << 30))
                edges -= {_edge(vs[u], vs[v]) for u, v in sparse.edges}
            classes.append((vs, None))
        else:
            a = list(range(nxt, nxt + s))
            b = list(range(nxt + s, nxt + 2 * s))
            nxt += 2 * s
            perm = list(range(s))
            rng.shuffle(perm)
            edges |= {_edge(x, y) for i, x in enumerate(a) for j, y in enumerate(b) if perm[i] != j}
            classes.append((a + b, (a, b)))
    n = nxt
    k = len(classes)
    links = [(i, i + 1) for i in range(k - 1)]
    if k >= 3:
        links.append((k - 1, 0))
    free = [list(c[0]) for c in classes]
    for lst in free:
        rng.shuffle(lst)
    endpoints: list[list[int]] = [[] for _ in range(k)]
    for i, j in links:
        for _ in range(spec.bridge):
            if not free[i] or not free[j]:
                raise InputError("bridges need more vertices than the classes have")
            x = _pick_bridge_end(free[i], classes[i][1], endpoints[i], edges)
            y = _pick_bridge_end(free[j], classes[j][1], endpoints[j], edges)
            edges.add(_edge(x, y))
            endpoints[i].append(x)
            endpoints[j].append(y)
    # degree equalisation: remove a matching among the bridge endpoints of each class,
    # consecutive endpoints first since they were picked adjacent
    for i, ends in enumerate(endpoints):
        pool = list(ends)
        while len(pool) >= 2:
            if _edge(pool[0], pool[1]) in edges:
                edges.discard(_edge(pool[0], pool[1]))
                del pool[:2]
                continue
            x = pool.pop(0)
            for idx, y in enumerate(pool):
                if _edge(x, y) in edges:
                    edges.discard(_edge(x, y))
                    pool.pop(idx)
                    break
    perm = list(range(n))
    if spec.relabel:
        rng.shuffle(perm)
    g = Graph(n, sorted(_edge(perm[u], perm[v]) for u, v in edges))
    labels = []
    for vs, bip in classes:
        if bip is None:
            labels.append(ComponentLabel.expander(perm[v] for v in vs))
        else:
            labels.append(ComponentLabel.bipartite((perm[v] for v in bip[0]), (perm[v] for v in bip[1])))
    return g, RobustPartition(tuple(labels), params)


def _pick_bridge_end(free: list[int], sides, taken: list[int], edges: set) -> int:
    """Next bridge endpoint; bipartite classes alternate sides so removals stay
    cross edges, and every second endpoint is adjacent to the one before it."""
    a = set(sides[0]) if sides is not None else None
    want_a = None
    if a is not None:
        want_a = sum(1 for v in taken if v in a) <= sum(1 for v in taken if v not in a)
    prev = taken[-1] if len(taken) % 2 else None
    for strict in (True, False):
        for idx in range(len(free) - 1, -1, -1):
            v = free[idx]
            if want_a is not None and (v in a) != want_a:
                continue
            if strict and prev is not None and _edge(prev, v) not in edges:
                continue
            return free.pop(idx)
    return free.pop()
