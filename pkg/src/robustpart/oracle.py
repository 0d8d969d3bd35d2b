"""Exact constrained Hamilton cycle search.

Required edges are contracted into units (maximal required paths); the
search extends a path of units from a fixed start unit and prunes with
degree counts, forced-edge conflicts at the path ends, and connectivity of
what remains. Branches are tried by fewest onward options, then by id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import CapabilityError, InputError
from .graph import Digraph, Graph, iter_bits

DEFAULT_ORACLE_BOUND = 64


@dataclass(frozen=True)
class CycleResult:
    cycle: tuple[int, ...]
    contains: frozenset = frozenset()

    def edges(self) -> set:
        c = self.cycle
        return {tuple(sorted((c[i], c[(i + 1) % len(c)]))) for i in range(len(c))}

    def arcs(self) -> set:
        c = self.cycle
        return {(c[i], c[(i + 1) % len(c)]) for i in range(len(c))}


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, directed: bool, n: int, out: list[int], inn: list[int], units, start_unit: int,
                 order_pos: dict, p: int, node_limit: Optional[int]):
        self.directed = directed
        self.n = n
        self.out = out
        self.inn = inn
        self.units = units  # list of vertex tuples in forward orientation
        self.unit_of: dict[int, int] = {}
        self.partner: dict[int, int] = {}
        for i, u in enumerate(units):
            s, e = u[0], u[-1]
            self.unit_of[s] = i
            self.unit_of[e] = i
            self.partner[s] = e
            if not directed:
                self.partner[e] = s
        self.start_unit = start_unit
        self.order_pos = order_pos
        self.p = p
        self.nodes = 0
        self.node_limit = node_limit
        self.back = {u[-1]: u[0] for u in units}

    # order bookkeeping: positions of order vertices along a unit in a given direction
    def _order_seq(self, unit: int, forward: bool) -> list[int]:
        vs = self.units[unit] if forward else self.units[unit][::-1]
        return [self.order_pos[v] for v in vs if v in self.order_pos]

    def _advance(self, expected: Optional[int], seq: list[int]) -> tuple[bool, Optional[int]]:
        for pos in seq:
            if expected is not None and pos != expected:
                return False, None
            expected = (pos + 1) % self.p
        return True, expected

    def run(self) -> Optional[list[tuple[int, bool]]]:
        start = self.units[self.start_unit]
        orientations = [True]
        if not self.directed and len(start) > 1 and self.p:
            orientations.append(False)
        entries = 0
        exits = 0
        for i, u in enumerate(self.units):
            if i == self.start_unit:
                continue
            entries |= 1 << u[0]
            exits |= 1 << u[-1]
            if not self.directed:
                entries |= 1 << u[-1]
                exits |= 1 << u[0]
        for forward in orientations:
            ok, expected = self._advance(None, self._order_seq(self.start_unit, forward))
            if not ok:
                continue
            head = start[0] if forward else start[-1]
            tail = start[-1] if forward else start[0]
            seq = [(self.start_unit, forward)]
            if self._dfs(seq, tail, head, entries, exits, len(self.units) - 1, expected):
                return seq
        return None

    def _dfs(self, seq, tail, head, entries, exits, remaining, expected) -> bool:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Budget()
        if remaining == 0:
            if self.n == 1:
                return True
            if self.n == 2 and not self.directed:
                return False
            return bool(self.out[tail] >> head & 1)
        options = self._prune(tail, head, entries, exits, remaining)
        if options is None:
            return False
        for y in options:
            unit = self.unit_of[y]
            u = self.units[unit]
            forward = u[0] == y
            if not forward and self.directed:
                continue
            ok, nxt_expected = self._advance(expected, self._order_seq(unit, forward)) if self.p else (True, None)
            if not ok:
                continue
            exit_v = u[-1] if forward else u[0]
            both = (1 << u[0]) | (1 << u[-1])
            seq.append((unit, forward))
            if self._dfs(seq, exit_v, head, entries & ~both, exits & ~both, remaining - 1, nxt_expected):
                return True
            seq.pop()
        return False

    def _prune(self, tail, head, entries, exits, remaining) -> Optional[list[int]]:
        out, inn = self.out, self.inn
        tail_bit, head_bit = 1 << tail, 1 << head
        cand = out[tail] & entries
        if not cand:
            return None
        if remaining == 1:
            # exactly one unit left: enter it from tail and leave it into head
            opts = [y for y in iter_bits(cand) if out[self.partner[y]] >> head & 1]
            return opts or None
        if not inn[head] & exits:
            return None
        forced_from_tail = 0
        forced_to_head = 0
        forced_entry = None
        if self.directed:
            pred_pool = exits | tail_bit
            succ_pool = entries | head_bit
            for y in iter_bits(entries):
                e = self.partner[y]
                ins = inn[y] & pred_pool & ~(1 << e)
                if not ins:
                    return None
                if ins == tail_bit:
                    forced_from_tail += 1
                    forced_entry = y
                outs = out[e] & succ_pool & ~(1 << y)
                if not outs:
                    return None
                if outs == head_bit:
                    forced_to_head += 1
        else:
            pool = entries | tail_bit | head_bit
            for v in iter_bits(entries):
                w = self.partner[v]
                nb = out[v] & pool & ~(1 << v) & ~(1 << w)
                need = 2 if v == w else 1
                cnt = nb.bit_count()
                if cnt < need:
                    return None
                if cnt == need:
                    if nb & tail_bit:
                        forced_from_tail += 1
                        forced_entry = v
                    if nb & head_bit:
                        forced_to_head += 1
        if tail == head and not self.directed:
            # nothing placed beyond a one-vertex start: its two slots are both free
            if forced_from_tail > 2:
                return None
            forced_entry = None
        elif forced_from_tail > 1 or forced_to_head > 1:
            return None
        if not self._connected(tail, head, entries, exits):
            return None
        if forced_entry is not None:
            return [forced_entry] if cand >> forced_entry & 1 else None
        opts = list(iter_bits(cand))
        if len(opts) > 1:
            pool = entries | head_bit
            opts.sort(key=lambda y: ((out[self.partner[y]] & pool).bit_count(), y))
        return opts

    def _connected(self, tail, head, entries, exits) -> bool:
        """Everything left must be reachable from tail without passing through head,
        and (for digraphs) must reach head."""
        out, partner = self.out, self.partner
        seen = 0
        frontier = out[tail] & entries
        while frontier:
            seen |= frontier
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= out[partner[v]]
            frontier = nxt & entries & ~seen
        # a unit counts once either end is reachable; its far end is not
        # marked seen, so entering from that side is still explored
        covered = seen
        for v in iter_bits(seen):
            covered |= 1 << partner[v]
        if (entries & ~covered) != 0:
            return False
        if self.directed:
            seen = 0
            frontier = self.inn[head] & exits
            back = self.back
            while frontier:
                seen |= frontier
                nxt = 0
                for v in iter_bits(frontier):
                    s = back[v]
                    seen |= 1 << s
                    nxt |= self.inn[s]
                frontier = nxt & exits & ~seen
            if (exits & ~seen) != 0:
                return False
        return True


def _build_units(n: int, required: list[tuple[int, int]], directed: bool) -> Optional[list[tuple[int, ...]]]:
    """Maximal required paths as vertex tuples; None if required edges form a cycle."""
    nxt: dict[int, list[int]] = {v: [] for v in range(n)}
    prv: dict[int, list[int]] = {v: [] for v in range(n)}
    for u, v in required:
        nxt[u].append(v)
        prv[v].append(u)
        if not directed:
            nxt[v].append(u)
            prv[u].append(v)
    limit = 1 if directed else 2
    for v in range(n):
        if len(nxt[v]) > limit or len(prv[v]) > limit:
            raise InputError(f"required edges at vertex {v} do not form disjoint paths")
    seen = set()
    units = []
    for v in range(n):
        if v in seen:
            continue
        is_start = not prv[v] if directed else len(nxt[v]) <= 1
        if not is_start:
            continue
        path = [v]
        seen.add(v)
        while True:
            options = [w for w in nxt[path[-1]] if w not in seen]
            if not options:
                break
            path.append(options[0])
            seen.add(options[0])
        units.append(tuple(path))
    if len(seen) != n:
        return None
    return units


def hamilton_oracle(
    g: Union[Graph, Digraph],
    required: Iterable[tuple[int, int]] = (),
    forbidden: Iterable[tuple[int, int]] = (),
    order: Optional[Sequence[int]] = None,
    *,
    bound: int = DEFAULT_ORACLE_BOUND,
    node_limit: Optional[int] = None,
) -> Optional[CycleResult]:
    """Hamilton cycle honouring required/forbidden edges and a cyclic vertex order.

    Returns None when exhaustive search proves that no such cycle exists.
    ``node_limit`` turns an over-long search into a CapabilityError.
    """
    directed = isinstance(g, Digraph)
    n = g.n
    if n > bound:
        raise CapabilityError(f"oracle bound is {bound} vertices (got {n})")
    required = [tuple(e) for e in required]
    forbidden = [tuple(e) for e in forbidden]
    out = list(g.out if directed else g.adj)
    inn = list(g.inn if directed else g.adj)
    for u, v in required + forbidden:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise InputError(f"bad edge ({u},{v})")
    for u, v in forbidden:
        out[u] &= ~(1 << v)
        inn[v] &= ~(1 << u)
        if not directed:
            out[v] &= ~(1 << u)
            inn[u] &= ~(1 << v)
    for u, v in required:
        if not out[u] >> v & 1:
            return None
    if len(set(map(frozenset, required)) if not directed else set(required)) != len(required):
        raise InputError("duplicate required edge")
    order = list(order) if order else []
    if len(set(order)) != len(order) or any(not 0 <= v < n for v in order):
        raise InputError("order constraint must list distinct vertices")
    if n == 0:
        return None
    if n <= 2:
        return _tiny(n, out, required, directed)
    units = _build_units(n, required, directed)
    contains = frozenset(required) if directed else frozenset(tuple(sorted(e)) for e in required)
    if units is None:
        # the required edges already form a Hamilton cycle (or a shorter cycle)
        cyc = _required_cycle(n, required, directed)
        if cyc is None:
            return None
        if order and not _order_ok(cyc, order):
            cyc = cyc[::-1] if not directed and _order_ok(cyc[::-1], order) else None
        return CycleResult(tuple(cyc), contains) if cyc else None
    order_pos = {v: i for i, v in enumerate(order)}
    if order:
        start_unit = next(i for i, u in enumerate(units) if order[0] in u)
    else:
        degs = [bin(out[u[0]]).count("1") + (bin(out[u[-1]]).count("1") if len(u) > 1 else 0) for u in units]
        start_unit = min(range(len(units)), key=lambda i: (degs[i], units[i][0]))
    search = _Search(directed, n, out, inn, units, start_unit, order_pos, len(order), node_limit)
    try:
        seq = search.run()
    except _Budget as exc:
        raise CapabilityError(f"oracle node budget {node_limit} exhausted") from exc
    if seq is None:
        return None
    cycle: list[int] = []
    for unit, forward in seq:
        cycle.extend(units[unit] if forward else units[unit][::-1])
    return CycleResult(tuple(cycle), contains)


def _tiny(n, out, required, directed) -> Optional[CycleResult]:
    if n == 1:
        return CycleResult((0,))
    # two vertices: a 2-cycle needs both arcs in a digraph; a simple graph has none
    if directed and out[0] >> 1 & 1 and out[1] >> 0 & 1:
        return CycleResult((0, 1), frozenset(required))
    return None


def _required_cycle(n, required, directed) -> Optional[list[int]]:
    nxt: dict[int, list[int]] = {}
    for u, v in required:
        nxt.setdefault(u, []).append(v)
        if not directed:
            nxt.setdefault(v, []).append(u)
    cyc = [0]
    prev = None
    while True:
        options = [w for w in nxt.get(cyc[-1], []) if w != prev]
        if not options:
            return None
        w = options[0]
        if w == cyc[0]:
            break
        prev = cyc[-1]
        cyc.append(w)
        if len(cyc) > n:
            return None
    return cyc if len(cyc) == n else None


def _order_ok(cycle: Sequence[int], order: Sequence[int]) -> bool:
    pos = [cycle.index(v) for v in order]
    shift = pos.index(min(pos))
    pos = pos[shift:] + pos[:shift]
    return pos == sorted(pos)


def verify_cycle(
    g: Union[Graph, Digraph],
    cycle: Sequence[int],
    required: Iterable[tuple[int, int]] = (),
    covers: Optional[Iterable[int]] = None,
) -> bool:
    """Independent check: simple closed walk along edges that contains ``required``."""
    cycle = list(cycle)
    if len(cycle) < 3 and not (isinstance(g, Digraph) and len(cycle) == 2):
        return len(cycle) == 1 and g.n == 1
    if len(set(cycle)) != len(cycle):
        return False
    directed = isinstance(g, Digraph)
    steps = list(zip(cycle, cycle[1:] + cycle[:1]))
    for u, v in steps:
        if not (g.has_arc(u, v) if directed else g.has_edge(u, v)):
            return False
    have = set(steps) if directed else {frozenset(s) for s in steps}
    for e in required:
        if (tuple(e) if directed else frozenset(e)) not in have:
            return False
    if covers is not None and not set(covers) <= set(cycle):
        return False
    return True
