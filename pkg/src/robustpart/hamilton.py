"""Linking terminal pairs by spanning paths and assembling Hamilton cycles from tours."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from .errors import AssemblyError, InputError, PreconditionError
from .graph import DEFAULT_PARAMS, Digraph, Graph, bipartite_matching, bits, iter_bits, mask_of, reach_mask
from .oracle import DEFAULT_ORACLE_BOUND, CycleResult, hamilton_oracle, verify_cycle
from .paths import reduced_multigraph_euler, validate_tour, is_balanced
from .structures import ComponentLabel, PathSystem, RobustPartition


# ---------------------------------------------------------------------------
# short paths


def _bfs(adj: Sequence[int], x: int, y: int, within: int) -> Optional[list[int]]:
    prev = {x: None}
    frontier = [x]
    while frontier:
        nxt = []
        for u in frontier:
            for w in iter_bits(adj[u] & within):
                if w in prev:
                    continue
                prev[w] = u
                if w == y:
                    path = [y]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                nxt.append(w)
        frontier = nxt
    return None


def _cross_adj(g: Graph, am: int, bm: int) -> list[int]:
    return [g.adj[v] & (bm if am >> v & 1 else am if bm >> v & 1 else 0) for v in range(g.n)]


def short_path(
    g: Union[Graph, Digraph],
    x: int,
    y: int,
    nu=None,
    sides: Optional[tuple] = None,
) -> list[int]:
    """Shortest x-y path; in bipartite mode only edges between the two sides are used.

    The length is checked against 1/nu vertices (4/nu in bipartite mode); a
    longer shortest path means the host was not the expander it was taken for.
    """
    nu = Fraction(nu) if nu is not None else DEFAULT_PARAMS.nu
    if x == y:
        raise InputError("x and y must be distinct")
    if not (0 <= x < g.n and 0 <= y < g.n):
        raise InputError("vertex out of range")
    if sides is not None:
        am, bm = mask_of(sides[0]), mask_of(sides[1])
        adj = _cross_adj(g, am, bm)
        limit = 4 / nu
    else:
        adj = g.out if isinstance(g, Digraph) else g.adj
        limit = 1 / nu
    path = _bfs(adj, x, y, (1 << g.n) - 1)
    if path is None:
        raise PreconditionError(f"no path from {x} to {y}")
    if len(path) > limit:
        raise PreconditionError(f"shortest path has {len(path)} vertices, above the bound {limit}")
    return path


# ---------------------------------------------------------------------------
# matching-driven auxiliary digraph


@dataclass(frozen=True)
class AuxDigraph:
    """Digraph on local indices of ``b_order``; ``partner`` maps each b to its matched a."""

    digraph: Digraph
    b_order: tuple
    partner: dict

    def lift(self, cycle: Sequence[int]) -> list[int]:
        out = []
        for i in cycle:
            v = self.b_order[i]
            out.extend((v, self.partner[v]))
        return out


def m_auxiliary_digraph(g: Graph, a: Iterable[int], b: Iterable[int], matching) -> AuxDigraph:
    """Arc v -> x (v, x in b) iff x is a neighbour of the partner of v, x != v."""
    am, bm = mask_of(a), mask_of(b)
    partner: dict = {}
    for u, v in matching:
        if am >> u & 1 and bm >> v & 1:
            x, y = u, v
        elif am >> v & 1 and bm >> u & 1:
            x, y = v, u
        else:
            raise InputError(f"matching edge ({u},{v}) does not join the two sides")
        if not g.has_edge(x, y):
            raise InputError(f"matching edge ({u},{v}) is not an edge")
        if y in partner or x in partner.values():
            raise InputError("not a matching")
        partner[y] = x
    if len(partner) != bm.bit_count() or am.bit_count() != bm.bit_count():
        raise InputError("matching is not perfect")
    order = tuple(bits(bm))
    local = {v: i for i, v in enumerate(order)}
    arcs = []
    for v in order:
        for x in iter_bits(g.adj[partner[v]] & bm):
            if x != v:
                arcs.append((local[v], local[x]))
    return AuxDigraph(Digraph(len(order), arcs), order, partner)


# ---------------------------------------------------------------------------
# spanning linkage


@dataclass
class LinkResult:
    paths: Optional[list]
    linked: bool
    route: str
    notes: list = field(default_factory=list)


def _check_pairs(g: Graph, hm: int, pairs) -> list[tuple[int, int]]:
    pairs = [(int(x), int(y)) for x, y in pairs]
    flat = [v for p in pairs for v in p]
    if len(set(flat)) != len(flat):
        raise InputError("terminal vertices must be distinct")
    if any(not hm >> v & 1 for v in flat):
        raise InputError("terminals must lie in the host")
    return pairs


def hamilton_p_linked(
    g: Graph,
    host: Iterable[int],
    pairs: Sequence[tuple[int, int]],
    *,
    sides: Optional[tuple] = None,
    nu=None,
    override: bool = False,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> LinkResult:
    """Vertex-disjoint paths, the i-th from y_i to y_i', together spanning the host.

    With ``sides`` only edges between the two sides are used and the
    terminals must be split evenly between them. ``linked`` is False only
    when exhaustive search shows that no such paths exist.
    """
    hm = g.check_vertices(host, "host")
    pairs = _check_pairs(g, hm, pairs)
    nu = Fraction(nu) if nu is not None else DEFAULT_PARAMS.nu
    p = len(pairs)
    if p == 0:
        raise InputError("need at least one pair")
    cap = max(1, math.floor(nu**4 * hm.bit_count()))
    if p > cap and not override:
        raise PreconditionError(f"{p} pairs exceed the linkage budget {cap}; pass override to try anyway")
    if sides is not None:
        am, bm = mask_of(sides[0]) & hm, mask_of(sides[1]) & hm
        if am & bm or (am | bm) != hm:
            raise InputError("sides must partition the host")
        flat = [v for pr in pairs for v in pr]
        if sum(am >> v & 1 for v in flat) != sum(bm >> v & 1 for v in flat):
            raise InputError("terminals must be split evenly between the sides")
        if am.bit_count() != bm.bit_count():
            raise InputError("sides must have equal size")
        paths = _bipartite_link(g, am, bm, pairs, bound)
        if paths is not None:
            return LinkResult(paths, True, "bipartite")
        adj = _cross_adj(g, am, bm)
        paths = _general_link(adj, hm, pairs, bound)
        return LinkResult(paths, paths is not None, "bipartite-exhaustive")
    paths = _general_link(list(g.adj), hm, pairs, bound)
    return LinkResult(paths, paths is not None, "general")


def _general_link(adj: Sequence[int], hm: int, pairs, bound: int) -> Optional[list[list[int]]]:
    """Merge y_i' with y_{i+1} into one vertex with in-arcs of the first and
    out-arcs of the second; an ordered Hamilton cycle then splits into the paths."""
    p = len(pairs)
    host = bits(hm)
    starts = [x for x, _ in pairs]
    ends = [y for _, y in pairs]
    # z_i merges ends[i] (entered) with starts[i+1] (left)
    merged = {}
    for i in range(p):
        merged[ends[i]] = i
        merged[starts[(i + 1) % p]] = i
    plain = [v for v in host if v not in merged]
    local = {v: p + j for j, v in enumerate(plain)}
    size = p + len(plain)
    if size == 1:
        x, y = pairs[0]
        return [[x, y]] if adj[x] >> y & 1 else None

    def node_in(v: int) -> Optional[int]:
        # node that an arc *into* v reaches
        if v in local:
            return local[v]
        i = merged[v]
        return i if ends[i] == v else None

    def node_out(v: int) -> Optional[int]:
        if v in local:
            return local[v]
        i = merged[v]
        return i if starts[(i + 1) % p] == v else None

    arcs = set()
    for u in host:
        src = node_out(u)
        if src is None:
            continue
        for w in iter_bits(adj[u] & hm):
            dst = node_in(w)
            if dst is not None and dst != src:
                arcs.add((src, dst))
    d = Digraph(size, sorted(arcs))
    res = hamilton_oracle(d, order=list(range(p)) if p > 1 else None, bound=bound)
    if res is None:
        return None
    cyc = list(res.cycle)
    k = cyc.index(0)
    cyc = cyc[k:] + cyc[:k]
    # between z_i and z_{i+1} lies the path of pair i+1
    back = {j: v for v, j in local.items()}
    paths = []
    segment: list[int] = []
    current = 0
    for node in cyc[1:] + [0]:
        if node < p:
            nxt = (current + 1) % p
            paths.append((nxt, [starts[nxt]] + segment + [ends[nxt]]))
            segment = []
            current = node
        else:
            segment.append(back[node])
    out = [path for _, path in sorted(paths)]
    return out


def _bipartite_link(g: Graph, am: int, bm: int, pairs, bound: int) -> Optional[list[list[int]]]:
    """Short paths for all pairs but the last, then one spanning path through
    the rest via a perfect matching and the auxiliary digraph."""
    adj = _cross_adj(g, am, bm)
    terminals = mask_of(v for pr in pairs for v in pr)
    free = am | bm
    paths = []
    for x, y in pairs[:-1]:
        path = _bfs(adj, x, y, (free & ~terminals) | (1 << y))
        if path is None:
            return None
        paths.append(path)
        free &= ~mask_of(path)
    x, y = pairs[-1]
    last = _spanning_path(g, adj, am & free, bm & free, x, y, bound)
    if last is None:
        return None
    return paths + [last]


def _spanning_path(g: Graph, adj, am: int, bm: int, x: int, y: int, bound: int) -> Optional[list[int]]:
    if am >> y & 1 and am >> x & 1 or bm >> y & 1 and bm >> x & 1:
        # both ends on one side: step from y to a neighbour on the other side
        for w in iter_bits(adj[y] & (am | bm) & ~(1 << x)):
            rest = _spanning_path(g, adj, am & ~(1 << y), bm & ~(1 << y), x, w, bound)
            if rest is not None:
                return rest + [y]
        return None
    if am.bit_count() != bm.bit_count():
        return None
    if (am | bm).bit_count() == 2:
        return [x, y] if adj[x] >> y & 1 else None
    a_end, b_end = (x, y) if am >> x & 1 else (y, x)
    rest_a, rest_b = am & ~(1 << a_end), bm & ~(1 << b_end)
    cross = Graph(g.n, [(u, v) for u in iter_bits(am | bm) for v in iter_bits(adj[u]) if u < v])
    m = bipartite_matching(cross, bits(rest_a), bits(rest_b))
    if len(m) != rest_a.bit_count():
        return None
    virtual = cross.with_edges([(min(a_end, b_end), max(a_end, b_end))]) if not cross.has_edge(a_end, b_end) else cross
    aux = m_auxiliary_digraph(virtual, bits(am), bits(bm), m + [(a_end, b_end)])
    if aux.digraph.n == 1:
        return [x, y] if adj[x] >> y & 1 else None
    res = hamilton_oracle(aux.digraph, bound=bound)
    if res is None:
        return None
    cyc = aux.lift(res.cycle)
    k = cyc.index(b_end)
    cyc = cyc[k:] + cyc[:k]  # b_end, a_end, ...
    path = cyc[1:] + [cyc[0]]  # a_end ... b_end
    return path if path[0] == x else path[::-1]


def verify_linkage(g: Graph, host, pairs, paths, sides=None) -> bool:
    hm = mask_of(host)
    seen = 0
    if len(paths) != len(pairs):
        return False
    for (x, y), path in zip(pairs, paths):
        if path[0] != x or path[-1] != y:
            return False
        for u, v in zip(path, path[1:]):
            if not g.has_edge(u, v):
                return False
            if sides is not None and (mask_of(sides[0]) >> u & 1) == (mask_of(sides[0]) >> v & 1):
                return False
        pm = mask_of(path)
        if pm & seen or pm.bit_count() != len(path):
            return False
        seen |= pm
    return seen == hm


# ---------------------------------------------------------------------------
# assembly


def _orient_along_tour(sub: RobustPartition, tour: PathSystem) -> list[tuple[list[int], int, int]]:
    parts = [c.vertices for c in sub.classes]
    _, euler = reduced_multigraph_euler(parts, tour)
    masks = [c.mask for c in sub.classes]
    out = []
    for idx, frm, to in euler:
        p = list(tour.paths[idx])
        if not masks[frm] >> p[0] & 1 or not masks[to] >> p[-1] & 1:
            p = p[::-1]
        out.append((p, frm, to))
    return out


def _drop_trivial(sub: RobustPartition, tour: PathSystem) -> PathSystem:
    out = tour
    for p in tour.paths:
        if len(p) == 1:
            trial = PathSystem(tuple(q for q in out.paths if q != p))
            if trial.paths and reduced_multigraph_euler([c.vertices for c in sub.classes], trial)[1] is not None:
                out = trial
    if any(len(p) == 1 for p in out.paths):
        raise AssemblyError("a one-vertex path carries the tour and cannot be linked")
    return out


def assemble_hamilton(
    g: Graph,
    sub: RobustPartition,
    tour: PathSystem,
    gamma=None,
    *,
    link_graph: Optional[Graph] = None,
    bound: int = DEFAULT_ORACLE_BOUND,
) -> CycleResult:
    """Cycle through every tour edge and every vertex of the classes.

    Tour paths are walked in Euler order; inside each class the gaps between
    consecutive paths are filled by a spanning linkage of what the tour leaves
    free. ``link_graph`` (default g) supplies the edges used for linking.
    """
    report = validate_tour(g, sub, tour, gamma)
    if not report.ok:
        raise PreconditionError("not a tour: " + ", ".join(report.failed()))
    link_graph = link_graph or g
    tour = _drop_trivial(sub, tour)
    seq = _orient_along_tour(sub, tour)
    used = tour.vertex_mask
    m = len(seq)
    link_paths: dict = {}
    for ci, cls in enumerate(sub.classes):
        slots = [s for s in range(m) if seq[s][2] == ci]
        pairs = [(seq[s][0][-1], seq[(s + 1) % m][0][0]) for s in slots]
        ends = mask_of(v for pr in pairs for v in pr)
        host = (cls.mask & ~used) | ends
        sides = None
        if cls.is_bipartite:
            a, b = cls.bipartition
            sides = (mask_of(a) & host, mask_of(b) & host)
            sides = (bits(sides[0]), bits(sides[1]))
        try:
            res = hamilton_p_linked(link_graph, bits(host), pairs, sides=sides, override=True, bound=bound)
        except (InputError, PreconditionError) as exc:
            raise AssemblyError(f"class {ci}: {exc}", class_index=ci) from exc
        if not res.linked:
            raise AssemblyError(f"class {ci}: the free vertices cannot be linked", class_index=ci)
        for s, path in zip(slots, res.paths):
            link_paths[s] = path
    cycle: list[int] = []
    for s in range(m):
        cycle.extend(seq[s][0])
        cycle.extend(link_paths[s][1:-1])
    covers = mask_of(v for c in sub.classes for v in c.vertices)
    result = CycleResult(tuple(cycle), frozenset(tour.edges))
    if not verify_cycle(g, cycle, tour.edges, bits(covers)):
        raise AssemblyError("spliced cycle failed verification")  # pragma: no cover
    return result


def balanced_bipartite_hamilton(
    g: Graph,
    a: Iterable[int],
    b: Iterable[int],
    v0: Iterable[int],
    h: Graph,
    ps: PathSystem,
    *,
    eta=None,
    gamma=None,
) -> CycleResult:
    """Hamilton cycle of g containing ps whose other edges all lie in h.

    Vertices of v0 sit inside paths of ps; they are contracted away, the
    cycle is found on a u b and the contracted stretches are put back.
    """
    am, bm, vm = g.check_vertices(a, "a"), g.check_vertices(b, "b"), g.check_vertices(v0, "v0")
    if am & bm or am & vm or bm & vm or (am | bm | vm) != g.full_mask:
        raise InputError("a, b, v0 must partition the vertex set")
    if am.bit_count() != bm.bit_count():
        raise PreconditionError("sides must have equal size")
    if not ps.is_in(g):
        raise PreconditionError("path system uses a non-edge")
    if any(not ((am | bm) >> u & 1 and (am | bm) >> v & 1) or (am >> u & 1) == (am >> v & 1) for u, v in h.edges):
        raise PreconditionError("h must be a bipartite graph between a and b")
    if eta is not None:
        need = (Fraction(1, 2) + Fraction(eta)) * am.bit_count()
        if min(h.degree(v) for v in iter_bits(am | bm)) < need:
            raise PreconditionError("minimum degree of h is too small")
    if gamma is not None and (ps.vertex_mask & (am | bm)).bit_count() > Fraction(gamma) * am.bit_count():
        raise PreconditionError("path system is too large")
    if any(vm >> v & 1 for v in ps.endpoints) or any(vm >> v & 1 and v not in ps.internal for v in range(g.n)):
        raise PreconditionError("every v0 vertex must be interior to a path")
    if not is_balanced(ps, bits(am), bits(bm)):
        raise PreconditionError("path system is not balanced")
    contracted = []
    stretch: dict = {}
    for p in ps.paths:
        q = [v for v in p if not vm >> v & 1]
        for u, w in zip(q, q[1:]):
            i, j = p.index(u), p.index(w)
            stretch[(u, w)] = list(p[i : j + 1])
            stretch[(w, u)] = list(p[i : j + 1])[::-1]
        contracted.append(q)
    cps = PathSystem.of(contracted)
    virtual = [tuple(sorted(e)) for e in cps.edges]
    host = Graph(g.n, sorted(set(h.edges) | set(virtual)))
    sub = RobustPartition((ComponentLabel.bipartite(bits(am), bits(bm)),), DEFAULT_PARAMS)
    res = assemble_hamilton(host, sub, cps, link_graph=h)
    cyc = list(res.cycle)
    lifted: list[int] = []
    for i, u in enumerate(cyc):
        w = cyc[(i + 1) % len(cyc)]
        if (u, w) in stretch:
            lifted.extend(stretch[(u, w)][:-1])
        else:
            lifted.append(u)
    if not verify_cycle(g, lifted, ps.edges, range(g.n)) or len(lifted) != g.n:
        raise AssemblyError("lifted cycle failed verification")  # pragma: no cover
    own = set(ps.edges)
    steps = {tuple(sorted((lifted[i], lifted[(i + 1) % len(lifted)]))) for i in range(len(lifted))}
    if not steps - own <= set(h.edges):
        raise AssemblyError("cycle uses an edge outside h")  # pragma: no cover
    return CycleResult(tuple(lifted), frozenset(own))


# ---------------------------------------------------------------------------
# exact longest cycle


def longest_cycle(g: Graph) -> list[int]:
    """A longest cycle by branch and bound inside each block (empty if acyclic)."""
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges)
    blocks = sorted((sorted(b) for b in nx.biconnected_components(nxg) if len(b) >= 3), key=lambda b: (-len(b), b))
    best: list[int] = []
    for block in blocks:
        if len(block) <= len(best):
            break
        found = _longest_in_block(g, mask_of(block), len(best))
        if found is not None:
            best = found
    return best


def _longest_in_block(g: Graph, within: int, floor: int) -> Optional[list[int]]:
    best: Optional[list[int]] = None
    best_len = floor
    size = within.bit_count()
    for s in bits(within):
        allowed = within & ~((1 << s) - 1)
        if allowed.bit_count() <= best_len:
            break
        path = [s]
        stack = [iter(bits(g.adj[s] & allowed))]
        visited = 1 << s
        while stack:
            if best_len == size:
                return best
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                visited &= ~(1 << path.pop())
                continue
            if visited >> nxt & 1:
                continue
            path.append(nxt)
            visited |= 1 << nxt
            if len(path) >= 3 and g.adj[nxt] >> s & 1 and len(path) > best_len:
                best, best_len = list(path), len(path)
            reach = reach_mask(g.adj, nxt, allowed & ~visited | (1 << nxt))
            if len(path) - 1 + reach.bit_count() <= best_len or not reach >> nxt & 1:
                visited &= ~(1 << path.pop())
                continue
            stack.append(iter(bits(g.adj[nxt] & allowed & ~visited)))
    return best
