"""Path systems over a family of vertex classes: tours, connectors and balancing."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import AnchoringError, ContractError, InputError, PreconditionError
from .expansion import ClauseResult
from .graph import (
    Graph,
    bipartite_matching,
    bits,
    disjoint_paths,
    e_between,
    e_inside,
    general_matching,
    is_k_connected,
    iter_bits,
    mask_of,
)
from .structures import ComponentLabel, PathSystem, RobustPartition


# ---------------------------------------------------------------------------
# counting on path systems


def path_edges(ps: PathSystem) -> list[tuple[int, int]]:
    return [(u, v) for p in ps.paths for u, v in zip(p, p[1:])]


def edges_inside(ps: PathSystem, xm: int) -> int:
    return sum(1 for u, v in path_edges(ps) if xm >> u & 1 and xm >> v & 1)


def edges_across(ps: PathSystem, xm: int, ym: int) -> int:
    return sum(
        1 for u, v in path_edges(ps) if (xm >> u & 1 and ym >> v & 1) or (xm >> v & 1 and ym >> u & 1)
    )


def balance_lhs(ps: PathSystem, am: int, bm: int, wm: Optional[int] = None, n: Optional[int] = None) -> int:
    """2 e_P(A) - 2 e_P(B) + e_P(A, outside W) - e_P(B, outside W); W defaults to A u B."""
    wm = (am | bm) if wm is None else wm
    top = max([v for p in ps.paths for v in p] + [wm.bit_length(), n or 0]) + 1
    out = ((1 << top) - 1) & ~wm
    return 2 * edges_inside(ps, am) - 2 * edges_inside(ps, bm) + edges_across(ps, am, out) - edges_across(ps, bm, out)


def is_balanced(ps: PathSystem, a: Iterable[int], b: Iterable[int]) -> bool:
    """Equal positive endpoint counts in a and b, and equal uncovered residues."""
    a, b = set(a), set(b)
    end_a, end_b = ps.end_count(a), ps.end_count(b)
    if end_a != end_b or end_a == 0:
        return False
    return len(a) - ps.int_count(a) == len(b) - ps.int_count(b)


def edges_to_paths(edges: Iterable[tuple[int, int]]) -> PathSystem:
    """Assemble an edge set of maximum degree two and no cycles into paths."""
    adj: dict = {}
    es = set()
    for u, v in edges:
        e = (min(u, v), max(u, v))
        if e in es or u == v:
            raise InputError(f"repeated or degenerate edge {e}")
        es.add(e)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(nb) > 2 for nb in adj.values()):
        raise InputError("edge set has a vertex of degree above two")
    seen: set = set()
    paths = []
    for start in sorted(adj):
        if start in seen or len(adj[start]) != 1:
            continue
        path = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            path.append(cur)
            seen.add(cur)
        paths.append(path)
    if len(seen) != len(adj):
        raise InputError("edge set contains a cycle")
    return PathSystem.of(paths)


# ---------------------------------------------------------------------------
# reduced multigraph and Euler tours


@dataclass(frozen=True)
class ReducedMultigraph:
    """One edge (i, j), i <= j, per path; edge k belongs to path k."""

    parts: tuple
    edges: tuple

    def degree(self, i: int) -> int:
        return sum((e[0] == i) + (e[1] == i) for e in self.edges)


def _part_index(masks: Sequence[int], v: int) -> int:
    for i, m in enumerate(masks):
        if m >> v & 1:
            return i
    return -1


def reduced_multigraph(parts: Sequence[Iterable[int]], ps: PathSystem) -> ReducedMultigraph:
    parts = tuple(frozenset(p) for p in parts)
    masks = [mask_of(p) for p in parts]
    total = 0
    for m in masks:
        if total & m:
            raise InputError("parts must be disjoint")
        total |= m
    edges = []
    for p in ps.paths:
        i, j = _part_index(masks, p[0]), _part_index(masks, p[-1])
        if i < 0 or j < 0:
            raise AnchoringError(f"path {p[0]}..{p[-1]} has an endpoint outside every part")
        edges.append((min(i, j), max(i, j)))
    return ReducedMultigraph(parts, tuple(edges))


def euler_tour(rm: ReducedMultigraph) -> Optional[list[tuple[int, int, int]]]:
    """Closed walk using every edge once and visiting every part (Hierholzer).

    Returns a list of (edge index, from part, to part) or None.
    """
    k = len(rm.parts)
    if k == 0 or not rm.edges:
        return None
    inc: list[list[int]] = [[] for _ in range(k)]
    for idx, (i, j) in enumerate(rm.edges):
        inc[i].append(idx)
        if j != i:
            inc[j].append(idx)
    for i in range(k):
        if rm.degree(i) == 0 or rm.degree(i) % 2:
            return None
    used = [False] * len(rm.edges)
    ptr = [0] * k
    stack: list[tuple[int, Optional[int]]] = [(0, None)]
    circuit: list[tuple[int, Optional[int]]] = []
    while stack:
        v, via = stack[-1]
        while ptr[v] < len(inc[v]) and used[inc[v][ptr[v]]]:
            ptr[v] += 1
        if ptr[v] == len(inc[v]):
            circuit.append(stack.pop())
            continue
        e = inc[v][ptr[v]]
        used[e] = True
        i, j = rm.edges[e]
        stack.append((j if v == i else i, e))
    if not all(used):
        return None  # disconnected
    circuit.reverse()
    out = []
    for (u, _), (w, e) in zip(circuit, circuit[1:]):
        out.append((e, u, w))
    return out


def reduced_multigraph_euler(parts, ps: PathSystem):
    rm = reduced_multigraph(parts, ps)
    return rm, euler_tour(rm)


def is_extension(base: PathSystem, ext: PathSystem, parts: Sequence[Iterable[int]]) -> bool:
    """Extension laws: new edges inside a part; each old path in exactly one
    new path; each new path holds at most one old path."""
    masks = [mask_of(p) for p in parts]
    old_edges = set(base.edges)
    for u, v in ext.edges:
        if (u, v) in old_edges:
            continue
        i = _part_index(masks, u)
        if i < 0 or not masks[i] >> v & 1:
            return False
    holders = []
    for p in ext.paths:
        holders.append([q for q in base.paths if _contains_subpath(p, q)])
    for q in base.paths:
        if sum(1 for h in holders if q in h) != 1:
            return False
    return all(len(h) <= 1 for h in holders)


def _contains_subpath(p: Sequence[int], q: Sequence[int]) -> bool:
    if len(q) > len(p):
        return False
    idx = {v: i for i, v in enumerate(p)}
    if q[0] not in idx:
        return False
    i = idx[q[0]]
    fwd = list(p[i : i + len(q)])
    bwd = list(p[max(0, i - len(q) + 1) : i + 1])[::-1]
    return fwd == list(q) or bwd == list(q)


# ---------------------------------------------------------------------------
# tour validation


@dataclass
class TourReport:
    clauses: dict
    footprint: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def failed(self) -> list[str]:
        return [k for k, c in self.clauses.items() if not c.passed]


def validate_tour(g: Graph, sub: RobustPartition, ps: PathSystem, gamma=None) -> TourReport:
    """Independent check of (T1)-(T4). ``gamma=None`` skips the footprint bound."""
    clauses: dict = {}
    parts = [c.vertices for c in sub.classes]
    masks = [mask_of(p) for p in parts]
    in_g = ps.is_in(g)
    anchored = all(_part_index(masks, v) >= 0 for v in ps.endpoints)
    clauses["T1"] = ClauseResult(in_g and anchored, "" if in_g else "a path uses a non-edge")
    tour = None
    if anchored:
        tour = euler_tour(reduced_multigraph(parts, ps))
    clauses["T2"] = ClauseResult(tour is not None, "" if tour is not None else "reduced multigraph has no Euler tour")
    vset = ps.vertex_mask
    footprint = {min(c.vertices): (vset & m).bit_count() for c, m in zip(sub.classes, masks)}
    if gamma is None:
        clauses["T3"] = ClauseResult(True, "footprint bound not requested")
    else:
        gamma = Fraction(gamma)
        bad = [f"class {k}: {v}" for k, v in footprint.items() if v > gamma * g.n]
        clauses["T3"] = ClauseResult(not bad, "; ".join(bad))
    bad = []
    for c in sub.bipartites:
        a, b = c.bipartition
        if not is_balanced(ps, a, b):
            bad.append(f"class {min(c.vertices)} not balanced")
    clauses["T4"] = ClauseResult(not bad, "; ".join(bad))
    return TourReport(clauses, footprint)


# ---------------------------------------------------------------------------
# matchings and the regular identity


def menger_matching(g: Graph, a: Iterable[int], k: int) -> PathSystem:
    """A matching of size >= k between a and its complement in a k-connected graph."""
    am = g.check_vertices(a, "a")
    bm = g.full_mask & ~am
    if am.bit_count() < k or bm.bit_count() < k:
        raise PreconditionError(f"both sides need at least {k} vertices")
    if not is_k_connected(g, k):
        raise PreconditionError(f"graph is not {k}-connected")
    m = bipartite_matching(g, bits(am), bits(bm))
    if len(m) < k:
        raise ContractError("flow found fewer disjoint edges than connectivity guarantees")  # pragma: no cover
    return PathSystem.of([list(e) for e in m])


def bounded_matching(g: Graph, host_edges: Iterable[tuple[int, int]]) -> PathSystem:
    """Maximum matching of the edge set H; at least ceil(e(H) / (max degree + 1))."""
    es = sorted({(min(u, v), max(u, v)) for u, v in host_edges})
    if not es:
        return PathSystem(())
    verts = sorted({v for e in es for v in e})
    h = Graph(max(verts) + 1, es)
    m = general_matching(h)
    need = -(-len(es) // (h.max_degree() + 1))
    assert len(m) >= need, "matching smaller than the edge-colouring bound"
    return PathSystem.of([list(e) for e in m])


def regular_partition_identity(g: Graph, a, b, v) -> tuple[int, int]:
    """(2(e(A) - e(B)) + e(A,V) - e(B,V), (|A| - |B|) D) for a regular g."""
    am, bm, vm = g.check_vertices(a, "a"), g.check_vertices(b, "b"), g.check_vertices(v, "v")
    if am & bm or am & vm or bm & vm or (am | bm | vm) != g.full_mask:
        raise InputError("a, b, v must partition the vertex set")
    if not g.is_regular():
        raise InputError("graph is not regular")
    degree = g.degree(0) if g.n else 0
    lhs = 2 * (e_inside(g, am) - e_inside(g, bm)) + e_between(g, am, vm) - e_between(g, bm, vm)
    return lhs, (am.bit_count() - bm.bit_count()) * degree


# ---------------------------------------------------------------------------
# connectors for at most three classes


def _check_partition(g: Graph, parts) -> list[int]:
    masks = [g.check_vertices(p, "part") for p in parts]
    total = 0
    for m in masks:
        if total & m:
            raise InputError("parts overlap")
        total |= m
    if total != g.full_mask:
        raise InputError("parts must cover the vertex set")
    return masks


def connector_clauses(ps: PathSystem, masks: Sequence[int]) -> bool:
    """(i) at most 4 crossing edges, (ii) Euler tour, (iii) degree counts."""
    edges = path_edges(ps)
    if len(edges) > 4:
        return False
    if len(masks) > 1:
        for u, v in edges:
            if _part_index(masks, u) == _part_index(masks, v):
                return False
    if euler_tour(reduced_multigraph([bits(m) for m in masks], ps)) is None:
        return False
    for m in masks:
        c1 = sum(1 for v in iter_bits(m) if v in ps.vertex_set and ps.degree(v) == 1)
        c2 = sum(1 for v in iter_bits(m) if v in ps.vertex_set and ps.degree(v) == 2)
        if c1 + 2 * c2 not in (2, 4) or c2 > 1:
            return False
    return True


def three_part_connector(g: Graph, parts: Sequence[Iterable[int]]) -> PathSystem:
    """Crossing path system whose reduced multigraph is an Euler tour, for 1-3 parts."""
    masks = _check_partition(g, parts)
    if not 1 <= len(masks) <= 3:
        raise InputError("need one to three parts")
    if any(m.bit_count() < 3 for m in masks):
        raise PreconditionError("every part needs at least 3 vertices")
    if not is_k_connected(g, 3):
        raise PreconditionError("graph is not 3-connected")
    if len(masks) == 1:
        if not g.edges:
            raise PreconditionError("graph has no edges")  # pragma: no cover
        out = PathSystem.of([list(g.edges[0])])
    elif len(masks) == 2:
        m = bipartite_matching(g, bits(masks[0]), bits(masks[1]))
        out = PathSystem.of([list(e) for e in m[:2]])
    else:
        out = _connect_three(g, masks)
    if not connector_clauses(out, masks):
        raise ContractError("connector output violates its clauses")  # pragma: no cover
    return out


def _connect_three(g: Graph, masks: list[int]) -> PathSystem:
    first = bipartite_matching(g, bits(masks[0]), bits(masks[1] | masks[2]))[:3]
    # relabel so that part 2 receives at least two of these edges
    into = [_part_index(masks, y) for _, y in first]
    p2 = 1 if into.count(1) >= 2 else 2
    p3 = 3 - p2
    v1, v2, v3 = masks[0], masks[p2], masks[p3]
    m12 = [(x, y) for x, y in first if v2 >> y & 1][:2]
    # matching of size three between v3 and v1 u v2
    third = bipartite_matching(g, bits(v3), bits(v1 | v2))[:3]
    m13 = [(y, z) for z, y in third if v1 >> y & 1]  # (v1 vertex, v3 vertex)
    m23 = [(y, z) for z, y in third if v2 >> y & 1]  # (v2 vertex, v3 vertex)
    if len(m13) < len(m23):
        # swap the roles of the first two parts; m12 is symmetric
        v1, v2 = v2, v1
        m12 = [(y, x) for x, y in m12]
        m13, m23 = m23, m13
    if len(m13) == 3:
        used = {x for x, _ in m12}
        free = [e for e in m13 if e[0] not in used]
        if len(free) >= 2:
            return edges_to_paths(m12 + free[:2])
        # exactly two edges of m13 meet m12 in v1
        (u1, u2), (w1, w2) = m12
        e_w = next(e for e in m13 if e[0] == w1)
        spare = next(e for e in m13 if e[0] not in used)
        return PathSystem.of([[u1, u2], [w2, w1, e_w[1]], [spare[0], spare[1]]])
    # two edges into v1, one into v2
    v2v, v3v = m23[0]
    w = next(e for e in m12 if e[1] != v2v)
    x = next(e for e in m13 if e[0] != w[0])
    return PathSystem.of([[w[0], w[1]], [v2v, v3v], [x[1], x[0]]])


# ---------------------------------------------------------------------------
# balancing a bipartite class


def path_cover_balance(
    g: Graph, a: Iterable[int], b: Iterable[int], ps: PathSystem, rho, *, strict: bool = True
) -> PathSystem:
    """Extend ps inside U = a u b so that it becomes (a, b)-balanced.

    ``strict`` enforces the quantitative hypotheses (size difference,
    cross degree, footprint); the structural ones (balance equation, an
    endpoint in U, room for the neighbour sets) are always enforced.
    """
    rho = Fraction(rho)
    am, bm = g.check_vertices(a, "a"), g.check_vertices(b, "b")
    if am & bm:
        raise InputError("a and b must be disjoint")
    n = g.n
    um = am | bm
    vset = ps.vertex_mask
    if strict:
        if abs(am.bit_count() - bm.bit_count()) > rho * n:
            raise PreconditionError("size difference: ||A|-|B|| exceeds rho*n")
        cross = min([(g.adj[x] & bm).bit_count() for x in iter_bits(am)] + [(g.adj[x] & am).bit_count() for x in iter_bits(bm)])
        if not cross > 9 * rho * n:
            raise PreconditionError("cross degree: min degree of G[A,B] is not above 9*rho*n")
        if (vset & um).bit_count() > rho * n:
            raise PreconditionError("footprint: |V(P) n U| exceeds rho*n")
    if not any(um >> v & 1 for v in ps.endpoints):
        raise PreconditionError("endpoint: the path system has no endpoint in U")
    if balance_lhs(ps, am, bm, um, g.n) != 2 * (am.bit_count() - bm.bit_count()):
        raise PreconditionError("balance equation fails")
    if am.bit_count() < bm.bit_count():
        out = _cover_balance(g, bm, am, ps)
    else:
        out = _cover_balance(g, am, bm, ps)
    if not is_balanced(out, bits(am), bits(bm)):
        raise ContractError("balancing produced an unbalanced system")  # pragma: no cover
    return out


def _cover_balance(g: Graph, am: int, bm: int, ps: PathSystem) -> PathSystem:
    """The construction with |A| >= |B|."""
    vset = ps.vertex_mask
    a0 = vset & am
    b0 = vset & bm
    target = am.bit_count() - bm.bit_count()
    diff = a0.bit_count() - b0.bit_count()
    if diff < target:
        extra = bits(am & ~vset)[: target - diff]
        if len(extra) < target - diff:
            raise PreconditionError("not enough free vertices in A")
        a0 |= mask_of(extra)
    elif diff > target:
        extra = bits(bm & ~vset)[: diff - target]
        if len(extra) < diff - target:
            raise PreconditionError("not enough free vertices in B")
        b0 |= mask_of(extra)
    taken = vset | a0 | b0
    new_nbrs: dict = {}
    for x in bits(a0 | b0):
        need = 2 - (ps.degree(x) if vset >> x & 1 else 0)
        if vset >> x & 1 and need == 2:
            need = 2  # trivial path: both sides open
        other = (bm & ~b0) if am >> x & 1 else (am & ~a0)
        cands = bits(g.adj[x] & other & ~taken)[:need]
        if len(cands) < need:
            raise PreconditionError(f"no room: vertex {x} lacks {need} free neighbours on the other side")
        taken |= mask_of(cands)
        new_nbrs[x] = cands
    paths = [list(p) for p in ps.paths]
    holder = {v: i for i, p in enumerate(paths) for v in p}
    for x, nbrs in new_nbrs.items():
        if not nbrs:
            continue
        if x in holder:
            p = paths[holder[x]]
            if len(p) == 1:
                p[:] = [nbrs[0], x, nbrs[1]]
            elif p[0] == x and p[-1] == x:  # pragma: no cover - impossible for simple paths
                raise ContractError("degenerate path")
            elif p[0] == x:
                p.insert(0, nbrs[0])
            else:
                p.append(nbrs[0])
            for y in nbrs:
                holder[y] = holder[x]
        else:
            paths.append([nbrs[0], x, nbrs[1]])
            for y in (x, *nbrs):
                holder[y] = len(paths) - 1
    return PathSystem.of(paths)


def balance_extend(
    g: Graph, sub: RobustPartition, ps: PathSystem, rho, *, strict: bool = True
) -> PathSystem:
    """Balance every bipartite class in turn; the result is a tour of the classes."""
    rho = Fraction(rho)
    parts = [c.vertices for c in sub.classes]
    rm, tour = reduced_multigraph_euler(parts, ps)
    if tour is None:
        raise PreconditionError("reduced multigraph is not a non-empty Euler tour")
    if strict:
        for c in sub.classes:
            if (ps.vertex_mask & c.mask).bit_count() > rho * g.n:
                raise PreconditionError(f"footprint in class {min(c.vertices)} exceeds rho*n")
    for c in sub.bipartites:
        a, b = (mask_of(s) for s in c.bipartition)
        if balance_lhs(ps, a, b, a | b, g.n) != 2 * (a.bit_count() - b.bit_count()):
            raise PreconditionError(f"balance equation fails for class {min(c.vertices)}")
    out = ps
    for c in sub.bipartites:
        a, b = c.bipartition
        out = path_cover_balance(g, a, b, out, rho, strict=strict)
    report = validate_tour(g, sub, out, 9 * rho if strict else None)
    if not report.ok:
        raise ContractError("balanced system is not a tour: " + ", ".join(report.failed()))
    return out


# ---------------------------------------------------------------------------
# tours for a single bipartite class and for one class of each kind


def _edge_list(g: Graph, xm: int, ym: Optional[int] = None) -> list[tuple[int, int]]:
    if ym is None:
        return [(u, v) for u, v in g.edges if xm >> u & 1 and xm >> v & 1]
    return [(u, v) for u, v in g.edges if (xm >> u & 1 and ym >> v & 1) or (xm >> v & 1 and ym >> u & 1)]


def tour_one_bipartite(g: Graph, label: ComponentLabel, rho, *, strict: bool = True) -> PathSystem:
    """Tour for a graph whose partition is a single bipartite class."""
    a, b = (mask_of(s) for s in label.bipartition)
    if a.bit_count() == b.bit_count():
        e = next(((u, v) for u, v in _edge_list(g, a, b)), None)
        if e is None:
            raise PreconditionError("no edge between the two sides")
        return PathSystem.of([list(e)])
    big, small = (a, b) if a.bit_count() > b.bit_count() else (b, a)
    need = big.bit_count() - small.bit_count()
    m = bounded_matching(g, _edge_list(g, big))
    if len(m) < need:
        raise PreconditionError(f"the larger side has no matching of size {need}")
    start = PathSystem(m.paths[:need])
    sub = RobustPartition((label,), _params_for(rho))
    return balance_extend(g, sub, start, 2 * Fraction(rho), strict=strict)


def _params_for(rho):
    from .graph import Params

    rho = Fraction(rho)
    return Params(rho, max(rho, Fraction(1, 10)) if rho <= Fraction(1, 10) else rho, max(Fraction(1, 5), rho))


def _vw_paths(ps: PathSystem, vm: int, wm: int) -> int:
    return sum(1 for p in ps.paths if (vm >> p[0] & 1 and wm >> p[-1] & 1) or (wm >> p[0] & 1 and vm >> p[-1] & 1))


def _one_each_ok(ps: PathSystem, vm: int, am: int, bm: int) -> bool:
    lhs = 2 * edges_inside(ps, am) - 2 * edges_inside(ps, bm) + edges_across(ps, am, vm) - edges_across(ps, bm, vm)
    return lhs == 2 * (am.bit_count() - bm.bit_count()) and _vw_paths(ps, vm, am | bm) > 0


def _try_paths(edges) -> Optional[PathSystem]:
    try:
        return edges_to_paths(edges)
    except InputError:
        return None


def seed_one_each(g: Graph, v: Iterable[int], a: Iterable[int], b: Iterable[int]) -> PathSystem:
    """Path system with the balance equation and a crossing path, for one
    expander class V and one bipartite class (A, B)."""
    vm, am, bm = mask_of(v), mask_of(a), mask_of(b)
    if am.bit_count() < bm.bit_count():
        am, bm = bm, am
    degree = g.min_degree()
    diff = am.bit_count() - bm.bit_count()
    out = _seed_one_each(g, vm, am, bm, degree, diff)
    if out is None or not _one_each_ok(out, vm, am, bm):
        raise PreconditionError("could not build the seed path system for one class of each kind")
    return out


def _matching(g: Graph, xm: int, ym: int) -> list[tuple[int, int]]:
    return bipartite_matching(g, bits(xm), bits(ym))


def _seed_one_each(g, vm, am, bm, degree, diff):
    if diff == 0:
        for x, y in ((am, bm), (bm, am)):
            mxv = _matching(g, x, vm)
            if len(mxv) >= 2:
                inside = _edge_list(g, y)
                if inside:
                    return _try_paths(mxv[:2] + [inside[0]])
                for e in _edge_list(g, x, vm):
                    for f in _edge_list(g, y, vm):
                        if not set(e) & set(f):
                            return _try_paths([e, f])
        return None
    e_a = e_inside(g, am)
    if 5 * e_a < degree:
        mav = bounded_matching(g, _edge_list(g, am, vm))
        if len(mav) < 2 * diff:
            return None
        return PathSystem(mav.paths[: 2 * diff])
    ell = min(-(-2 * e_a // (degree + 2)), diff)
    m_full = [tuple(p) for p in bounded_matching(g, _edge_list(g, am)).paths]
    if ell == diff:
        m = m_full[:ell]
        mav = _matching(g, am, vm)
        if len(mav) >= 2:
            mav = mav[:2]
            u, u2 = mav[0][0], mav[1][0]
            drop = next((e for e in m if set(e) == {u, u2}), m[0] if m else None)
            rest = [e for e in m if e != drop]
            return _try_paths(rest + mav)
        mbv = _matching(g, bm, vm)[:2]
        spare = next((e for e in _edge_list(g, am) if e not in m), None)
        if len(mbv) < 2 or spare is None:
            return None
        return _try_paths(mbv + m + [spare])
    mav = bounded_matching(g, _edge_list(g, am, vm))
    if len(mav) < 2 * (diff - ell):
        return None
    mav = [tuple(p) for p in mav.paths[: 2 * (diff - ell)]]
    if len(m_full) >= ell + 1:
        m = m_full[: ell + 1]
        plus = _try_paths(m + mav)
        if plus is not None and _vw_paths(plus, vm, am | bm) > 0:
            return _try_paths(m[1:] + mav)
        touched = {x for e in mav for x in e}
        e = next((e for e in m if set(e) & touched), m[0])
        return _try_paths([f for f in m if f != e] + mav)
    m = m_full[:ell]
    covered = {x for e in m for x in e}
    for y in sorted(covered):
        free = [x for x in iter_bits(g.adj[y] & am) if x not in covered]
        if not free:
            continue
        x = free[0]
        z = next(w for e in m if y in e for w in e if w != y)
        minus = [e for e in m if y not in e]
        for mi in (minus + [(x, y)], minus + [(y, z)]):
            cand = _try_paths(mi + mav)
            if cand is not None and _one_each_ok(cand, vm, am, bm):
                return cand
        on_mav = {w for f in mav for w in f}
        inner = [e for e in minus if set(e) <= on_mav]
        e = inner[0] if inner else (minus[0] if minus else None)
        return _try_paths([(x, y), (y, z)] + [f for f in minus if f != e] + mav)
    return None


def tour_one_each(g: Graph, sub: RobustPartition, rho, *, strict: bool = True) -> PathSystem:
    exp = sub.expanders[0]
    bip = sub.bipartites[0]
    a, b = bip.bipartition
    seed = seed_one_each(g, exp.vertices, a, b)
    return balance_extend(g, sub, seed, 4 * Fraction(rho), strict=strict)


# ---------------------------------------------------------------------------
# connectors for t classes and pruning


def _first_path(g: Graph, um: int) -> list[int]:
    for u, v in g.edges:
        if um >> u & 1 and um >> v & 1:
            return [u, v]
    # shortest path between two vertices of U through the outside
    for s in iter_bits(um):
        prev = {s: None}
        frontier = [s]
        while frontier:
            nxt = []
            for x in frontier:
                for y in iter_bits(g.adj[x]):
                    if y in prev:
                        continue
                    prev[y] = x
                    if um >> y & 1:
                        path = [y]
                        while prev[path[-1]] is not None:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(y)
            frontier = nxt
    raise PreconditionError("no path joins two vertices of the first class")


def cycle_connector(g: Graph, parts: Sequence[Iterable[int]]) -> PathSystem:
    """Anchored path system whose reduced multigraph is a cycle through all parts."""
    masks = [g.check_vertices(p, "part") for p in parts]
    t = len(masks)
    if t == 0:
        raise InputError("need at least one part")
    total = 0
    for m in masks:
        if total & m:
            raise InputError("parts overlap")
        total |= m
    if any(m.bit_count() < 2 * t for m in masks):
        raise PreconditionError(f"every part needs at least {2 * t} vertices")
    if not is_k_connected(g, t):
        raise PreconditionError(f"graph is not {t}-connected")
    paths = [_first_path(g, masks[0])]  # paths[j] joins order[j] to order[j+1]
    order = [0]
    for i in range(1, t):
        um = masks[i]
        paths, order = _insert_part(g, paths, order, um, i)
    out = PathSystem.of(_shorten(p, masks) for p in paths)
    rm = reduced_multigraph([bits(m) for m in masks], out)
    if euler_tour(rm) is None or len(rm.edges) != t:
        raise ContractError("connector is not a cycle through the parts")  # pragma: no cover
    return out


def _shorten(p: list[int], masks: Sequence[int]) -> list[int]:
    """Shortest stretch of p still joining the parts of its two ends."""
    i, j = _part_index(masks, p[0]), _part_index(masks, p[-1])
    if i == j:
        hits = [idx for idx, v in enumerate(p) if masks[i] >> v & 1]
        return p[: hits[1] + 1] if len(hits) > 1 else p
    first_j = next(idx for idx, v in enumerate(p) if masks[j] >> v & 1)
    last_i = max(idx for idx, v in enumerate(p[: first_j + 1]) if masks[i] >> v & 1)
    return p[last_i : first_j + 1]


def _insert_part(g: Graph, paths, order, um: int, label: int):
    for j, p in enumerate(paths):
        hits = [idx for idx, v in enumerate(p) if um >> v & 1]
        if len(hits) >= 2:
            first, second = hits[0], hits[1]
            new = paths[:j] + [p[: first + 1], p[second:]] + paths[j + 1 :]
            return new, order[: j + 1] + [label] + order[j + 1 :]
    used = mask_of(v for p in paths for v in p)
    free = um & ~used
    fan = disjoint_paths(g, bits(used), bits(free), limit=len(paths) + 1)
    if len(fan) < len(paths) + 1:
        raise PreconditionError("not enough disjoint paths to reach the next part")
    where = {}
    for j, p in enumerate(paths):
        for idx, v in enumerate(p):
            where[v] = (j, idx)
    by_path: dict = {}
    for r in fan:
        j, idx = where[r[0]]
        by_path.setdefault(j, []).append((idx, r))
    j = min(k for k, rs in by_path.items() if len(rs) >= 2)
    (i1, r1), (i2, r2) = sorted(by_path[j])[:2]
    p = paths[j]
    first = p[:i1] + r1
    second = r2[::-1] + p[i2 + 1 :]
    new = paths[:j] + [first, second] + paths[j + 1 :]
    return new, order[: j + 1] + [label] + order[j + 1 :]


def prune_path_system(parts: Sequence[Iterable[int]], ps: PathSystem) -> PathSystem:
    """Cut subpaths so that every part meets the system in at most 2t vertices.

    Every output edge lies on an input path; trivial paths created by the
    cuts are dropped unless the tour needs them.
    """
    parts = [frozenset(p) for p in parts]
    if any(not p for p in parts):
        raise InputError("parts must be non-empty")
    masks = [mask_of(p) for p in parts]
    rm, tour = reduced_multigraph_euler(parts, ps)
    if tour is None:
        raise PreconditionError("reduced multigraph is not an Euler tour")
    s = len(parts)
    paths = [list(p) for p in ps.paths]
    if s == 1:
        p = paths[0]
        hits = [i for i, v in enumerate(p) if masks[0] >> v & 1]
        return PathSystem.of([p[: hits[1] + 1]] if len(hits) > 1 else [p])
    # drop paths with both ends in one part while the tour survives
    kept = list(paths)
    for p in paths:
        if _part_index(masks, p[0]) == _part_index(masks, p[-1]):
            trial = [q for q in kept if q is not p]
            if trial and euler_tour(reduced_multigraph(parts, PathSystem.of(trial))) is not None:
                kept = trial
    pieces: list[list[int]] = []
    for p in kept:
        pieces.extend(_prune_one(p, masks))
    out = PathSystem.of(pieces)
    nontrivial = out.nontrivial()
    if nontrivial.paths and euler_tour(reduced_multigraph(parts, nontrivial)) is not None:
        out = nontrivial
    if euler_tour(reduced_multigraph(parts, out)) is None:
        raise ContractError("pruning broke the Euler tour")  # pragma: no cover
    return out


def _prune_one(path: list[int], masks: Sequence[int]) -> list[list[int]]:
    segs = [list(path)]
    for _ in range(len(masks) + 1):
        counts = [sum(1 for sg in segs for v in sg if m >> v & 1) for m in masks]
        over = next((i for i, c in enumerate(counts) if c >= 3), None)
        if over is None:
            return segs
        wm = masks[over]
        touching = [j for j, sg in enumerate(segs) if any(wm >> v & 1 for v in sg)]
        j, j2 = touching[0], touching[-1]
        w = next(idx for idx, v in enumerate(segs[j]) if wm >> v & 1)
        w2 = max(idx for idx, v in enumerate(segs[j2]) if wm >> v & 1)
        segs = segs[:j] + [segs[j][: w + 1], segs[j2][w2:]] + segs[j2 + 1 :]
    raise ContractError("pruning did not terminate")  # pragma: no cover


def trim_for_balance(ps: PathSystem, label: ComponentLabel, n: int) -> tuple[frozenset, frozenset, int]:
    """Remove uncovered vertices from one side until the balance equation holds.

    Returns the new sides and the number of removed vertices.
    """
    am, bm = (mask_of(s) for s in label.bipartition)
    lhs = balance_lhs(ps, am, bm, am | bm, n)
    if lhs % 2:
        raise PreconditionError("balance left side is odd; the reduced multigraph is not an Euler tour")
    want = lhs // 2
    have = am.bit_count() - bm.bit_count()
    used = ps.vertex_mask
    removed = 0
    if have > want:
        drop = bits(am & ~used)[::-1][: have - want]
        if len(drop) < have - want:
            raise PreconditionError("not enough uncovered vertices to trim")
        am &= ~mask_of(drop)
        removed = len(drop)
    elif have < want:
        drop = bits(bm & ~used)[::-1][: want - have]
        if len(drop) < want - have:
            raise PreconditionError("not enough uncovered vertices to trim")
        bm &= ~mask_of(drop)
        removed = len(drop)
    return frozenset(bits(am)), frozenset(bits(bm)), removed


def subpartition_tour(
    g: Graph, sub: RobustPartition, t: int, *, strict: bool = True
) -> tuple[RobustPartition, PathSystem]:
    """Adjust the bipartite classes slightly and build a tour of the result."""
    if sub.k + sub.ell > t:
        raise PreconditionError(f"k + l = {sub.k + sub.ell} exceeds t = {t}")
    if strict and not g.is_regular():
        raise PreconditionError("graph is not regular")
    if not is_k_connected(g, t):
        raise PreconditionError(f"graph is not {t}-connected")
    rho = sub.params.rho
    parts = [c.vertices for c in sub.classes]
    star = cycle_connector(g, parts)
    ps = prune_path_system(parts, star)
    labels = []
    for c in sub.classes:
        if not c.is_bipartite:
            labels.append(c)
            continue
        a, b, removed = trim_for_balance(ps, c, g.n)
        if strict and removed > 2 * rho * g.n:
            raise PreconditionError(f"trimming class {min(c.vertices)} needs {removed} > 2*rho*n vertices")
        labels.append(ComponentLabel.bipartite(a, b))
    adjusted = RobustPartition(tuple(labels), sub.params, sub.tags)
    tour = balance_extend(g, adjusted, ps, rho, strict=strict) if adjusted.ell else ps
    report = validate_tour(g, adjusted, tour, 54 * rho if strict else None)
    if not report.ok:
        raise ContractError("tour fails " + ", ".join(report.failed()))
    return adjusted, tour
