"""Graph representation and the counting, connectivity and matching kernels.

Vertex sets are handled internally as Python integer bitmasks (bit v set
means vertex v is present). Python integers are unbounded, so the same
representation serves every graph size; ``popcount`` is ``int.bit_count``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InputError

VertexSet = frozenset


# ---------------------------------------------------------------------------
# bitmask helpers


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> list[int]:
    """Ascending list of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def as_set(vertices: Iterable[int]) -> frozenset[int]:
    return vertices if isinstance(vertices, frozenset) else frozenset(vertices)


# ---------------------------------------------------------------------------
# graphs


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InputError(f"negative vertex count {n}")
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at {u}")
            if adj[u] >> v & 1:
                raise InputError(f"parallel edge ({u},{v})")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj: tuple[int, ...] = tuple(adj)
        self._edges: Optional[tuple[tuple[int, int], ...]] = None

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(masks)
        g.adj = tuple(masks)
        g._edges = None
        return g

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        if self._edges is None:
            self._edges = tuple(
                (u, v) for u in range(self.n) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1))
            )
        return self._edges

    @property
    def m(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(range(self.n))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degree_in(self, v: int, mask: int) -> int:
        return (self.adj[v] & mask).bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_regular(self) -> bool:
        return self.n == 0 or self.min_degree() == self.max_degree()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def check_vertices(self, vertices: Iterable[int], what: str = "vertex set") -> int:
        mask = 0
        for v in vertices:
            if not (isinstance(v, int) and 0 <= v < self.n):
                raise InputError(f"{what}: vertex id {v!r} out of range [0, {self.n})")
            mask |= 1 << v
        return mask

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns it with the old ids."""
        old = sorted(set(vertices))
        index = {v: i for i, v in enumerate(old)}
        masks = []
        keep = mask_of(old)
        for v in old:
            masks.append(mask_of(index[w] for w in iter_bits(self.adj[v] & keep)))
        return Graph.from_masks(masks), old

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        adj = list(self.adj)
        for u, v in removed:
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
        return Graph.from_masks(adj)

    def with_edges(self, added: Iterable[tuple[int, int]]) -> "Graph":
        adj = list(self.adj)
        for u, v in added:
            if u == v:
                raise InputError(f"self-loop at {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return Graph.from_masks(adj)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class Digraph:
    """Immutable loopless digraph; ``out[v]`` and ``inn[v]`` are bitmasks."""

    __slots__ = ("n", "out", "inn")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        out = [0] * n
        inn = [0] * n
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"arc ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"loop at {u}")
            out[u] |= 1 << v
            inn[v] |= 1 << u
        self.n = n
        self.out = tuple(out)
        self.inn = tuple(inn)

    @classmethod
    def from_graph(cls, g: Graph) -> "Digraph":
        d = cls.__new__(cls)
        d.n = g.n
        d.out = g.adj
        d.inn = g.adj
        return d

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.out[u])]

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def min_semidegree(self) -> int:
        if self.n == 0:
            return 0
        return min(min(o.bit_count() for o in self.out), min(i.bit_count() for i in self.inn))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={sum(o.bit_count() for o in self.out)})"


# ---------------------------------------------------------------------------
# parameters


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into an exact Fraction."""
    try:
        p, sep, q = text.strip().partition("/")
        value = Fraction(int(p), int(q)) if sep else Fraction(int(p))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational of the form p/q: {text!r}") from exc
    return value


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _unit(name: str, value) -> Optional[Fraction]:
    if value is None:
        return None
    value = Fraction(value)
    if not 0 < value <= 1:
        raise InputError(f"{name}={value} must lie in (0, 1]")
    return value


@dataclass(frozen=True)
class Params:
    """Exact threshold parameters; ``0 < rho <= nu <= tau < 1`` is enforced."""

    rho: Fraction
    nu: Fraction
    tau: Fraction
    eta: Optional[Fraction] = None
    gamma: Optional[Fraction] = None
    epsilon: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("rho", "nu", "tau", "eta", "gamma", "epsilon"):
            object.__setattr__(self, name, _unit(name, getattr(self, name)))
        if self.rho is None or self.nu is None or self.tau is None:
            raise InputError("rho, nu and tau are required")
        if not self.rho <= self.nu <= self.tau < 1:
            raise InputError(
                f"parameters must satisfy rho <= nu <= tau < 1, got {self.rho}, {self.nu}, {self.tau}"
            )

    def header(self) -> str:
        return (
            f"params rho={format_rational(self.rho)} nu={format_rational(self.nu)}"
            f" tau={format_rational(self.tau)}"
        )


DEFAULT_PARAMS = Params(Fraction(1, 20), Fraction(1, 10), Fraction(1, 5))


# ---------------------------------------------------------------------------
# counting


def edge_counts(g: Graph, a: Iterable[int], b: Iterable[int]) -> tuple[int, int, int]:
    """Return ``(e(a,b), e'(a,b), e(a))``.

    ``e(a,b)`` counts edges with one endpoint in ``a`` and the other in
    ``b`` (each edge once, even when both endpoints lie in ``a & b``), so
    ``e'(a,b) = e(a,b) + e(a & b)`` equals the sum of ``d_b(x)`` over x in a.
    """
    am = g.check_vertices(a, "a")
    bm = g.check_vertices(b, "b")
    return edge_counts_masks(g, am, bm)


def edge_counts_masks(g: Graph, am: int, bm: int) -> tuple[int, int, int]:
    e_prime = sum((g.adj[x] & bm).bit_count() for x in iter_bits(am))
    e_inside_a = sum((g.adj[x] & am).bit_count() for x in iter_bits(am)) // 2
    both = am & bm
    e_both = sum((g.adj[x] & both).bit_count() for x in iter_bits(both)) // 2
    return e_prime - e_both, e_prime, e_inside_a


def e_inside(g: Graph, mask: int) -> int:
    return sum((g.adj[x] & mask).bit_count() for x in iter_bits(mask)) // 2


def e_between(g: Graph, am: int, bm: int) -> int:
    """Edges between disjoint sets (or one endpoint in each, overlap counted once)."""
    return edge_counts_masks(g, am, bm)[0]


def cut_size(g: Graph, mask: int) -> int:
    rest = g.full_mask & ~mask
    return sum((g.adj[x] & rest).bit_count() for x in iter_bits(mask))


# ---------------------------------------------------------------------------
# components and connectivity


def connected_components(g: Graph, deleted: Iterable[int] = ()) -> list[frozenset[int]]:
    """Components of ``g - deleted``, each sorted, listed by minimum element."""
    remaining = g.full_mask & ~g.check_vertices(deleted, "deleted")
    return [frozenset(bits(c)) for c in component_masks(g, remaining)]


def component_masks(g: Graph, within: int) -> list[int]:
    comps = []
    while within:
        seen = within & -within
        frontier = seen
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= g.adj[v]
            nxt &= within & ~seen
            seen |= nxt
            frontier = nxt
        comps.append(seen)
        within &= ~seen
    return comps


def reach_mask(adj: Sequence[int], start: int, within: int) -> int:
    seen = (1 << start) & within
    frontier = seen
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= adj[v]
        nxt &= within & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_connected(g: Graph) -> bool:
    return g.n == 0 or reach_mask(g.adj, 0, g.full_mask) == g.full_mask


class _UnitFlow:
    """Unit-capacity flow network used for vertex-disjoint path computations."""

    def __init__(self, size: int):
        self.head: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int = 1) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def augment(self, s: int, t: int) -> bool:
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                if self.cap[e] > 0:
                    v = self.to[e]
                    if v not in parent:
                        parent[v] = e
                        if v == t:
                            while v != s:
                                e = parent[v]
                                self.cap[e] -= 1
                                self.cap[e ^ 1] += 1
                                v = self.to[e ^ 1]
                            return True
                        queue.append(v)
        return False

    def max_flow(self, s: int, t: int, limit: Optional[int] = None) -> int:
        flow = 0
        while (limit is None or flow < limit) and self.augment(s, t):
            flow += 1
        return flow


BIG = 1 << 30


def _split_network(g: Graph, sources: int, sinks: int, blocked: int = 0) -> tuple[_UnitFlow, int, int]:
    """Vertex-split network: v_in = 2v, v_out = 2v+1; super source/sink appended."""
    net = _UnitFlow(2 * g.n + 2)
    s, t = 2 * g.n, 2 * g.n + 1
    for v in range(g.n):
        if blocked >> v & 1:
            continue
        net.add(2 * v, 2 * v + 1, 1)
        for w in iter_bits(g.adj[v] & ~blocked):
            net.add(2 * v + 1, 2 * w, 1)
    for v in iter_bits(sources & ~blocked):
        net.add(s, 2 * v, 1)
    for v in iter_bits(sinks & ~blocked):
        net.add(2 * v + 1, t, 1)
    return net, s, t


def _extract_paths(net: _UnitFlow, g: Graph, s: int, t: int) -> list[list[int]]:
    """Read vertex paths off a flow in a network built by _split_network."""
    used_next: dict[int, int] = {}
    starts = []
    for e in net.head[s]:
        if e % 2 == 0 and net.cap[e] == 0:
            starts.append(net.to[e] // 2)
    for v in range(g.n):
        for e in net.head[2 * v + 1]:
            if e % 2 == 0 and net.cap[e] == 0 and net.to[e] != t and net.to[e] % 2 == 0:
                used_next[v] = net.to[e] // 2
    paths = []
    for v in sorted(starts):
        path = [v]
        while path[-1] in used_next:
            path.append(used_next[path[-1]])
        paths.append(path)
    return paths


def disjoint_paths(
    g: Graph, sources: Iterable[int], sinks: Iterable[int], limit: Optional[int] = None, blocked: Iterable[int] = ()
) -> list[list[int]]:
    """Maximum family of vertex-disjoint source-to-sink paths (Menger).

    Each path starts in ``sources`` and ends at its first vertex in
    ``sinks``; vertices in ``blocked`` are never used.
    """
    sm, tm, bm = mask_of(sources), mask_of(sinks), mask_of(blocked)
    net, s, t = _split_network(g, sm, tm, bm)
    net.max_flow(s, t, limit)
    paths = _extract_paths(net, g, s, t)
    trimmed = []
    for p in paths:
        # stop at the first sink and skip leading sources so paths are minimal
        first_sink = next(i for i, v in enumerate(p) if tm >> v & 1)
        p = p[: first_sink + 1]
        last_source = max(i for i, v in enumerate(p) if sm >> v & 1)
        trimmed.append(p[last_source:])
    return trimmed


def local_connectivity(g: Graph, u: int, v: int, limit: Optional[int] = None) -> int:
    """Maximum number of internally disjoint u-v paths for non-adjacent u, v."""
    net = _UnitFlow(2 * g.n)
    for x in range(g.n):
        net.add(2 * x, 2 * x + 1, BIG if x in (u, v) else 1)
        for w in iter_bits(g.adj[x]):
            net.add(2 * x + 1, 2 * w, 1)
    return net.max_flow(2 * u + 1, 2 * v, limit)


def vertex_connectivity(g: Graph) -> int:
    """Vertex connectivity by unit-capacity max-flow (complete graph gives n-1).

    Uses Even's pair schedule: only sources ``v_0..v_k`` need to be tried,
    where ``k`` is the best bound found so far, and every flow stops once it
    reaches that bound. The minimum is the same as over all non-adjacent pairs.
    """
    n = g.n
    if n < 2:
        raise InputError("vertex connectivity needs n >= 2")
    best = n - 1
    if not is_connected(g):
        return 0
    i = 0
    while i <= best and i < n:
        for j in range(i + 1, n):
            if not g.has_edge(i, j):
                best = min(best, local_connectivity(g, i, j, best))
        i += 1
    return best


def is_k_connected(g: Graph, k: int) -> bool:
    if g.n <= k:
        return False
    if k <= 0:
        return True
    if g.min_degree() < k:
        return False
    return vertex_connectivity(g) >= k


# ---------------------------------------------------------------------------
# matchings


def bipartite_matching(g: Graph, a: Iterable[int], b: Iterable[int], edge_ok=None) -> list[tuple[int, int]]:
    """Maximum matching of g[a,b] by augmenting paths; pairs are (a-side, b-side).

    Search order is ascending vertex id, so results are deterministic.
    ``edge_ok(x, y)`` can veto individual edges.
    """
    am, bm = mask_of(a), mask_of(b)
    if am & bm:
        raise InputError("bipartite matching needs disjoint sides")
    mate_b: dict[int, int] = {}
    mate_a: dict[int, int] = {}

    def options(x: int) -> list[int]:
        ys = bits(g.adj[x] & bm)
        return ys if edge_ok is None else [y for y in ys if edge_ok(x, y)]

    opts = {x: options(x) for x in iter_bits(am)}

    def try_augment(x: int, seen: set) -> bool:
        for y in opts[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in mate_b or try_augment(mate_b[y], seen):
                mate_b[y] = x
                mate_a[x] = y
                return True
        return False

    # greedy start, then augmenting phases
    for x in sorted(opts):
        for y in opts[x]:
            if y not in mate_b:
                mate_b[y] = x
                mate_a[x] = y
                break
    for x in sorted(opts):
        if x not in mate_a:
            try_augment(x, set())
    return sorted((x, y) for y, x in mate_b.items())


def general_matching(g: Graph, within: Optional[Iterable[int]] = None) -> list[tuple[int, int]]:
    """Maximum matching of g (or of g[within]) via the blossom algorithm."""
    import networkx as nx

    keep = g.full_mask if within is None else mask_of(within)
    h = nx.Graph()
    h.add_nodes_from(iter_bits(keep))
    h.add_edges_from((u, v) for u, v in g.edges if keep >> u & 1 and keep >> v & 1)
    matching = nx.max_weight_matching(h, maxcardinality=True)
    return sorted(tuple(sorted(e)) for e in matching)


def max_matching(g: Graph, a: Optional[Iterable[int]] = None, b: Optional[Iterable[int]] = None) -> list[tuple[int, int]]:
    """Maximum matching: bipartite between disjoint a, b, or general when a=b=V."""
    if a is None and b is None:
        return general_matching(g)
    am = g.check_vertices(a, "a")
    bm = g.check_vertices(b, "b")
    if am == bm == g.full_mask:
        return general_matching(g)
    if am & bm:
        raise InputError("bipartite mode needs disjoint a and b")
    return bipartite_matching(g, bits(am), bits(bm))


def is_matching(edges: Sequence[tuple[int, int]]) -> bool:
    seen = set()
    for u, v in edges:
        if u in seen or v in seen or u == v:
            return False
        seen.update((u, v))
    return True
