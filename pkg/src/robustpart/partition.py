"""Iterative refinement into robust components, shuffling, and the two-copy regularisation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import CapabilityError, ContractError, InputError, PreconditionError, RefinementError
from .expansion import (
    DEFAULT_RESTARTS,
    exhaustive_bound,
    find_bipartite_witness,
    find_nonexpanding_witness,
    is_nonexpanding,
    rho_close_mask,
    rho_component_mask,
    rn_mask,
    validate_robust_partition,
)
from .graph import DEFAULT_PARAMS, Graph, Params, bits, iter_bits, mask_of
from .structures import ComponentLabel, RobustPartition

OUT_OF_REGIME = "out-of-regime"
DEFAULT_ALPHA = Fraction(1, 4)


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Level:
    rho: Fraction
    nu: Fraction


@dataclass(frozen=True)
class Schedule:
    levels: tuple[Level, ...]
    tau: Fraction
    alpha: Fraction = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.levels:
            raise InputError("schedule needs at least one level")
        for lv in self.levels:
            if not 0 < lv.rho <= lv.nu <= self.tau < 1:
                raise InputError(f"level needs 0 < rho <= nu <= tau < 1, got {lv}")

    def params(self, i: int) -> Params:
        lv = self.levels[i]
        return Params(lv.rho, lv.nu, self.tau)


def level_budget(alpha: Fraction) -> int:
    """t = 3 * ceil(2 / alpha)."""
    return 3 * math.ceil(Fraction(2) / Fraction(alpha))


def constant_schedule(params: Params = DEFAULT_PARAMS, alpha=DEFAULT_ALPHA) -> Schedule:
    """Same (rho, nu) at every level; the default at desk scale."""
    alpha = Fraction(alpha)
    lv = Level(params.rho, params.nu)
    return Schedule((lv,) * level_budget(alpha), params.tau, alpha)


def geometric_schedule(
    rho1=Fraction(1, 400), factor: int = 8, tau=Fraction(1, 5), alpha=DEFAULT_ALPHA, c=Fraction(1, 2)
) -> Schedule:
    """rho_{i+1} = min(sqrt(rho_i), c * nu_i) with nu_i = factor * rho_i, capped at tau.

    Square roots are rounded up to the next rational with denominator at most
    10^6 so that every level stays exact.
    """
    alpha, tau = Fraction(alpha), Fraction(tau)
    rho = Fraction(rho1)
    levels = []
    for _ in range(level_budget(alpha)):
        nu = min(factor * rho, tau)
        rho = min(rho, nu)
        levels.append(Level(rho, nu))
        root = Fraction(math.isqrt(math.ceil(rho * 10**12)) + 1, 10**6)
        rho = min(root, Fraction(c) * nu, tau)
    return Schedule(tuple(levels), tau, alpha)


# ---------------------------------------------------------------------------
# trace


@dataclass(frozen=True)
class Step:
    """One refinement step; sets are stored explicitly so replay is mechanical.

    kind: "split" (parent -> pieces), "bipartite" (parent -> sides),
    "orient" (bipartite class sides swapped), "move" (vertex between classes),
    "side" (vertex between sides of a bipartite class), "keep" (class accepted
    without certification, out of regime), "drop" (a class emptied by moves).
    """

    kind: str
    level: int
    parent: frozenset
    parts: tuple = ()
    vertex: Optional[int] = None
    note: str = ""


@dataclass
class RefinementTrace:
    steps: list = field(default_factory=list)
    schedule: Optional[Schedule] = None
    level_used: int = -1
    warnings: list = field(default_factory=list)
    partition: Optional[RobustPartition] = None

    def progress(self) -> list[int]:
        """2|classes| + |bipartite classes| after each split/bipartite step."""
        out = []
        k, w = 1, 0
        for s in self.steps:
            if s.kind == "split":
                k += 1
                out.append(2 * k + w)
            elif s.kind == "bipartite":
                w += 1
                out.append(2 * k + w)
        return out


@dataclass
class _Cls:
    mask: int
    sides: Optional[tuple[int, int]] = None
    frozen: bool = False


def replay_trace(g: Graph, trace: RefinementTrace) -> RobustPartition:
    """Re-apply every recorded step starting from the trivial partition."""
    state = [_Cls(g.full_mask)]

    def find(parent: frozenset) -> int:
        pm = mask_of(parent)
        for i, c in enumerate(state):
            if c.mask == pm:
                return i
        raise ContractError(f"trace refers to unknown class starting at {min(parent)}")

    def holder(v: int) -> int:
        for i, c in enumerate(state):
            if c.mask >> v & 1:
                return i
        raise ContractError(f"vertex {v} not covered")

    for s in trace.steps:
        if s.kind == "split":
            i = find(s.parent)
            old = state.pop(i)
            for part in s.parts:
                pm = mask_of(part)
                sides = None
                if old.sides is not None:
                    sides = (old.sides[0] & pm, old.sides[1] & pm)
                state.append(_Cls(pm, sides))
        elif s.kind == "bipartite":
            i = find(s.parent)
            state[i].sides = (mask_of(s.parts[0]), mask_of(s.parts[1]))
        elif s.kind == "orient":
            i = find(s.parent)
            a, b = state[i].sides
            state[i].sides = (b, a)
        elif s.kind == "move":
            v = s.vertex
            src = holder(v)
            dst = find(s.parts[0]) if s.parts else None
            _move(state, g, v, src, dst)
        elif s.kind == "side":
            i = holder(s.vertex)
            a, b = state[i].sides
            bit = 1 << s.vertex
            state[i].sides = (a ^ bit, b ^ bit)
        elif s.kind == "drop":
            i = find(s.parent)
            state.pop(i)
    params = trace.schedule.params(max(trace.level_used, 0))
    return _to_partition(state, params, ())


def _to_partition(state: Sequence[_Cls], params: Params, tags) -> RobustPartition:
    labels = []
    for c in state:
        if c.sides is None:
            labels.append(ComponentLabel.expander(bits(c.mask)))
        else:
            labels.append(ComponentLabel.bipartite(bits(c.sides[0]), bits(c.sides[1])))
    return RobustPartition(tuple(labels), params, tuple(tags))


def _move(state: list, g: Graph, v: int, src: int, dst: int) -> None:
    bit = 1 << v
    c = state[src]
    c.mask &= ~bit
    if c.sides is not None:
        c.sides = (c.sides[0] & ~bit, c.sides[1] & ~bit)
    d = state[dst]
    d.mask |= bit
    if d.sides is not None:
        a, b = d.sides
        if (g.adj[v] & b).bit_count() >= (g.adj[v] & a).bit_count():
            d.sides = (a | bit, b)
        else:
            d.sides = (a, b | bit)


# ---------------------------------------------------------------------------
# rebalancing


def bipartite_rebalance_masks(g: Graph, am: int, bm: int, log: Optional[list] = None) -> tuple[int, int]:
    """Swap vertices that see more of their own side until none does.

    Each swap lowers e(a) + e(b) by at least one, so the loop terminates.
    """
    changed = True
    while changed:
        changed = False
        for v in iter_bits(am | bm):
            bit = 1 << v
            own, other = (am, bm) if am & bit else (bm, am)
            if (g.adj[v] & own).bit_count() > (g.adj[v] & other).bit_count():
                if am & bit:
                    am, bm = am & ~bit, bm | bit
                else:
                    am, bm = am | bit, bm & ~bit
                if log is not None:
                    log.append(v)
                changed = True
                break
    return am, bm


def bipartite_rebalance(g: Graph, a: Iterable[int], b: Iterable[int]) -> tuple[frozenset, frozenset]:
    am = g.check_vertices(a, "a")
    bm = g.check_vertices(b, "b")
    if am & bm:
        raise InputError("a and b must be disjoint")
    am, bm = bipartite_rebalance_masks(g, am, bm)
    return frozenset(bits(am)), frozenset(bits(bm))


def _preferred(g: Graph, v: int, masks: Sequence[int], current: int) -> int:
    best, best_deg = current, (g.adj[v] & masks[current]).bit_count()
    for j, m in enumerate(masks):
        d = (g.adj[v] & m).bit_count()
        if d > best_deg:
            best, best_deg = j, d
    return best


def shuffle_masks(g: Graph, masks: list[int], log: Optional[list] = None) -> list[int]:
    """Relocate vertices to the class holding most of their neighbours.

    Every move strictly lowers the number of cross edges, so this reaches a
    local minimum where no vertex prefers another class.
    """
    masks = list(masks)
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            cur = next(i for i, m in enumerate(masks) if m >> v & 1)
            dst = _preferred(g, v, masks, cur)
            if dst != cur:
                masks[cur] &= ~(1 << v)
                masks[dst] |= 1 << v
                if log is not None:
                    log.append((v, cur, dst))
                changed = True
    return masks


def shuffle_partition(g: Graph, classes: Sequence[Iterable[int]]) -> list[frozenset]:
    masks = [g.check_vertices(c, "class") for c in classes]
    total = 0
    for m in masks:
        if total & m:
            raise InputError("classes overlap")
        total |= m
    if total != g.full_mask or any(m == 0 for m in masks):
        raise InputError("classes must be non-empty and cover the vertex set")
    return [frozenset(bits(m)) for m in shuffle_masks(g, masks)]


# ---------------------------------------------------------------------------
# one split


@dataclass(frozen=True)
class SplitOutcome:
    """Split(u1, u2) when kind == "split"; CloseBipartite(y, z) when kind == "bipartite"."""

    kind: str
    first: frozenset
    second: frozenset
    case: int
    valid: bool

    @property
    def parts(self) -> tuple[frozenset, frozenset]:
        return self.first, self.second


def _square_le(size: int, frac: Fraction, n: int) -> bool:
    return size * size * frac.denominator <= frac.numerator * n * n


def _split_candidates(g: Graph, um: int, sm: int, params: Params, rn: int) -> list[tuple[str, int, int, int]]:
    y = sm & ~rn
    z = rn & ~sm
    case1 = _square_le(y.bit_count(), params.nu, g.n)
    first = ("split", sm | rn & um, um & ~(sm | rn), 1)
    u1 = y | z
    u2 = um & ~u1
    second = []
    if u2 and 3 * u2.bit_count() * params.rho.denominator >= params.rho.numerator * g.n:
        second.append(("split", u1, u2, 2))
    second.append(("bipartite", y | u2, z, 2))
    ordered = [first] + second if case1 else second + [first]
    closure = _rn_closure(g, um, sm, params, rn)
    if closure != um:
        ordered.insert(0, ("split", closure, um & ~closure, 0))
    return ordered


def _rn_closure(g: Graph, um: int, sm: int, params: Params, rn: int) -> int:
    """Grow S by its robust neighbourhood inside U until nothing changes."""
    cur = sm | rn
    while True:
        nxt = cur | rn_mask(g, um, cur, params.nu)
        if nxt == cur:
            return cur
        cur = nxt


def _candidate_ok(g: Graph, kind: str, p: int, q: int, rho: Fraction) -> bool:
    if not p or not q:
        return False
    if kind == "split":
        return rho_component_mask(g, p, rho) and rho_component_mask(g, q, rho)
    return rho_close_mask(g, p, q, rho)


def _split_masks(g: Graph, um: int, sm: int, params: Params, counted: Optional[int] = None):
    rn = rn_mask(g, um, sm, params.nu, counted)
    fallback = None
    for kind, p, q, case in _split_candidates(g, um, sm, params, rn):
        if not p or not q:
            continue
        if kind == "bipartite":
            p, q = bipartite_rebalance_masks(g, p, q)
            if not p or not q:
                continue
        if _candidate_ok(g, kind, p, q, params.rho):
            return SplitOutcome(kind, frozenset(bits(p)), frozenset(bits(q)), case, True)
        if fallback is None or (fallback.kind == "split" and kind == "bipartite"):
            fallback = SplitOutcome(kind, frozenset(bits(p)), frozenset(bits(q)), case, False)
    return fallback


def split_component(g: Graph, u: Iterable[int], witness: Iterable[int], params: Params, *, strict: bool = True):
    """Split u along a non-expanding witness, or recognise it as nearly bipartite.

    Candidates are tried in the order dictated by the size of S minus its
    robust neighbourhood; nearly bipartite candidates are rebalanced before
    validation. With ``strict`` a failed validation raises RefinementError,
    otherwise the best invalid candidate is returned with ``valid=False``.
    """
    um = g.check_vertices(u, "u")
    sm = g.check_vertices(witness, "witness")
    if sm & ~um:
        raise InputError("witness must lie inside u")
    if not is_nonexpanding(g, bits(um), bits(sm), params.nu, params.tau):
        raise ContractError("witness is not a non-expanding set of u")
    out = _split_masks(g, um, sm, params)
    if out is None or not out.valid:
        if strict or out is None:
            raise RefinementError(
                "no split of the class validates", offending=frozenset(bits(um)), diagnostics={"witness": sorted(bits(sm))}
            )
    return out


def _bipartite_split(g: Graph, cls: _Cls, sm: int, params: Params) -> Optional[SplitOutcome]:
    """Split a bipartite class along a witness S on its first side.

    U1 = S plus its robust neighbourhood on the other side; both pieces keep
    their side assignment.
    """
    a, b = cls.sides
    rn = rn_mask(g, cls.mask, sm, params.nu, counted=b)
    p = sm | rn
    q = cls.mask & ~p
    if not p or not q:
        return None
    ok = all(
        rho_close_mask(g, piece & a, piece & b, params.rho) for piece in (p, q)
    )
    return SplitOutcome("split", frozenset(bits(p)), frozenset(bits(q)), 0, ok)


# ---------------------------------------------------------------------------
# engine


def _in_regime(g: Graph, alpha: Fraction) -> bool:
    return g.n >= 8 and g.min_degree() >= alpha * g.n


def _examine(g: Graph, cls: _Cls, params: Params, restarts: int, seed: int):
    """(ok, witness mask, swap) for one class at one level."""
    bound = exhaustive_bound()
    if cls.sides is None:
        w = find_nonexpanding_witness(g, bits(cls.mask), params.nu, params.tau, bound=bound, restarts=restarts, seed=seed)
        return w is None, mask_of(w or ()), False
    a, b = cls.sides
    w = find_bipartite_witness(g, bits(a), bits(b), params.nu, params.tau, bound=bound, restarts=restarts, seed=seed)
    if w is None:
        return True, 0, False
    w2 = find_bipartite_witness(g, bits(b), bits(a), params.nu, params.tau, bound=bound, restarts=restarts, seed=seed)
    if w2 is None:
        return True, 0, True
    return False, mask_of(w), False


def refine_to_robust_partition(
    g: Graph,
    schedule: Optional[Schedule] = None,
    *,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    mode: str = "auto",
) -> tuple[RobustPartition, RefinementTrace]:
    """Refine the trivial partition until every class certifies, then tidy up.

    Graphs with fewer than 8 vertices or minimum degree below alpha*n are
    processed leniently: steps that do not validate are applied anyway,
    recorded as warnings, and the result is tagged out-of-regime.
    """
    if g.n == 0:
        raise InputError("empty graph")
    schedule = schedule or constant_schedule()
    strict = _in_regime(g, schedule.alpha)
    trace = RefinementTrace(schedule=schedule)
    state = [_Cls(g.full_mask)]

    for level in range(len(schedule.levels)):
        params = schedule.params(level)
        pending = False
        nxt: list[_Cls] = []
        for cls in state:
            if cls.frozen:
                nxt.append(cls)
                continue
            ok, wm, swap = _examine(g, cls, params, restarts, seed)
            if ok:
                if swap:
                    cls.sides = (cls.sides[1], cls.sides[0])
                    trace.steps.append(Step("orient", level, frozenset(bits(cls.mask))))
                nxt.append(cls)
                continue
            pending = True
            parent = frozenset(bits(cls.mask))
            if cls.sides is None:
                out = _split_masks(g, cls.mask, wm, params)
            else:
                out = _bipartite_split(g, cls, wm, params)
            if out is None or not out.valid:
                msg = f"level {level}: class at {min(parent)} has no validating split"
                if strict:
                    raise RefinementError(msg, offending=parent, diagnostics={"witness": sorted(bits(wm))})
                trace.warnings.append(msg)
                if out is None:
                    cls.frozen = True
                    trace.steps.append(Step("keep", level, parent))
                    nxt.append(cls)
                    continue
            p, q = mask_of(out.first), mask_of(out.second)
            if out.kind == "bipartite":
                trace.steps.append(Step("bipartite", level, parent, (out.first, out.second), note=f"case {out.case}"))
                nxt.append(_Cls(cls.mask, (p, q)))
            else:
                trace.steps.append(Step("split", level, parent, (out.first, out.second), note=f"case {out.case}"))
                for piece in (p, q):
                    sides = None if cls.sides is None else (cls.sides[0] & piece, cls.sides[1] & piece)
                    nxt.append(_Cls(piece, sides))
        state = nxt
        if not pending:
            trace.level_used = level
            break
    else:
        raise RefinementError("level budget exhausted", offending=None, diagnostics={"levels": len(schedule.levels)})

    params = schedule.params(trace.level_used)
    _tidy(g, state, trace)
    tags = () if strict else (OUT_OF_REGIME,)
    rp = _to_partition(state, params, tags)
    report = validate_robust_partition(g, rp, mode, seed=seed)
    if not report.ok:
        msg = "final partition fails " + ", ".join(report.failed())
        if strict:
            raise RefinementError(msg, offending=None, diagnostics={"report": report.summary()})
        trace.warnings.append(msg)
    trace.partition = rp
    return rp, trace


def _tidy(g: Graph, state: list[_Cls], trace: RefinementTrace) -> None:
    """Shuffle vertices between classes, then fix sides inside bipartite classes."""
    level = trace.level_used
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            cur = next(i for i, c in enumerate(state) if c.mask >> v & 1)
            dst = _preferred(g, v, [c.mask for c in state], cur)
            if dst != cur:
                target = frozenset(bits(state[dst].mask))
                _move(state, g, v, cur, dst)
                trace.steps.append(Step("move", level, frozenset(), (target,), vertex=v))
                changed = True
                if state[cur].mask == 0:
                    state.pop(cur)
                    trace.steps.append(Step("drop", level, frozenset(), note="emptied"))
                    break
        for c in state:
            if c.sides is None:
                continue
            log: list = []
            a, b = bipartite_rebalance_masks(g, c.sides[0], c.sides[1], log)
            for v in log:
                trace.steps.append(Step("side", level, frozenset(), vertex=v))
            c.sides = (a, b)


# ---------------------------------------------------------------------------
# almost regular graphs


def extra_degree(n: int, gamma) -> int:
    """Smallest integer b <= n/2 with (b/n)(1 - b/n) >= gamma."""
    gamma = Fraction(gamma)
    if not 0 < gamma <= Fraction(1, 4):
        raise InputError(f"gamma must lie in (0, 1/4], got {gamma}")
    for b in range(0, n // 2 + 1):
        if b * (n - b) >= gamma * n * n:
            return b
    raise InputError(f"no admissible extra degree for n={n}, gamma={gamma}")


def sufficient_bipartite_graphic(seq: Sequence[int]) -> bool:
    """n * d_1 >= (d_1 + d_n)^2 / 4 for a non-decreasing positive sequence."""
    if not seq or seq[0] <= 0:
        return False
    return 4 * len(seq) * seq[0] >= (seq[0] + seq[-1]) ** 2


def bipartite_graphic(left: Sequence[int], right: Sequence[int]) -> bool:
    """Exact Gale-Ryser test for two degree sequences."""
    if sum(left) != sum(right) or any(d < 0 for d in list(left) + list(right)):
        return False
    a = sorted(left, reverse=True)
    for k in range(1, len(a) + 1):
        if sum(a[:k]) > sum(min(d, k) for d in right):
            return False
    return True


def realise_bipartite(left: Sequence[int], right: Sequence[int]) -> Optional[list[tuple[int, int]]]:
    """Greedy realisation: each left vertex (largest demand first) takes the
    right vertices of largest residual demand, ties by lowest index."""
    rem = list(right)
    edges = []
    order = sorted(range(len(left)), key=lambda i: (-left[i], i))
    for i in order:
        need = left[i]
        cands = sorted((j for j in range(len(rem)) if rem[j] > 0), key=lambda j: (-rem[j], j))
        if len(cands) < need:
            return None
        for j in cands[:need]:
            rem[j] -= 1
            edges.append((i, j))
    if any(rem):
        return None
    return edges


@dataclass(frozen=True)
class Regularised:
    graph: Graph
    copies: tuple[tuple[int, int], ...]  # vertex v of g -> (copy-1 id, copy-2 id)
    degree: int
    extra: int


def regularize_almost_regular(g: Graph, gamma, *, condition: str = "sufficient") -> Regularised:
    """Two copies of g plus cross edges making every vertex degree delta + b.

    Copy 1 keeps the ids of g, copy 2 shifts them by n. The cross edges
    realise the demand D + b - d(v) on both copies. ``condition`` selects the
    realisability guard: the sufficient inequality, or the exact Gale-Ryser
    test.
    """
    if condition not in ("sufficient", "exact"):
        raise InputError(f"unknown condition {condition!r}")
    n = g.n
    if n == 0:
        raise InputError("empty graph")
    gamma = Fraction(gamma)
    low, high = g.min_degree(), g.max_degree()
    if high - low > gamma * n:
        raise PreconditionError(f"max degree {high} exceeds min degree {low} + gamma*n")
    b = extra_degree(n, gamma)
    demand = [low + b - g.degree(v) for v in range(n)]
    seq = sorted(demand)
    if condition == "sufficient":
        ok = sufficient_bipartite_graphic(seq)
    else:
        ok = all(d >= 0 for d in seq) and bipartite_graphic(demand, demand)
    if not ok:
        raise CapabilityError(f"cross-degree sequence {seq} fails the {condition} bipartite-graphic test")
    cross = realise_bipartite(demand, demand)
    if cross is None:
        raise CapabilityError("greedy realisation of the cross-degree sequence failed")  # pragma: no cover
    edges = list(g.edges) + [(u + n, v + n) for u, v in g.edges] + [(i, j + n) for i, j in cross]
    big = Graph(2 * n, edges)
    assert big.is_regular() and big.min_degree() == low + b
    return Regularised(big, tuple((v, v + n) for v in range(n)), low + b, b)


def almost_regular_partition(
    g: Graph, gamma, schedule: Optional[Schedule] = None, *, seed: int = 0, condition: str = "sufficient"
) -> tuple[RobustPartition, RefinementTrace]:
    """Partition the regularised double of g and keep the classes on copy 1."""
    reg = regularize_almost_regular(g, gamma, condition=condition)
    rp, trace = refine_to_robust_partition(reg.graph, schedule, seed=seed)
    n = g.n
    kept = []
    for c in rp.classes:
        low = [v for v in c.vertices if v < n]
        if low and len(low) != len(c.vertices):
            raise RefinementError("a class straddles both copies", offending=c.vertices)
        if low:
            kept.append(c)
    trace.warnings.append("kept the copy-1 classes")
    return RobustPartition(tuple(kept), rp.params, rp.tags), trace
