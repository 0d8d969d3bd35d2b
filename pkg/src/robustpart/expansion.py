"""Certification of robust expansion, component conditions and partitions.

All threshold comparisons are exact. Because degrees and set sizes are
integers, ``d >= nu*h`` is the same as ``d >= ceil(nu*h)`` and the
expansion inequality ``|RN(S)| >= |S| + nu*h`` is the same as
``|RN(S)| - |S| >= ceil(nu*h)``; both use one integer threshold.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapabilityError, InputError
from .graph import Graph, Params, bits, cut_size, e_between, iter_bits, mask_of
from .structures import ComponentLabel, RobustPartition

DEFAULT_EXHAUSTIVE_BOUND = 22
DEFAULT_RESTARTS = 64
_CHUNK = 1 << 20


def exhaustive_bound() -> int:
    """Enumeration bound, overridable through ``RPT_EXHAUSTIVE_BOUND``."""
    raw = os.environ.get("RPT_EXHAUSTIVE_BOUND")
    if raw is None or raw.strip() == "":
        return DEFAULT_EXHAUSTIVE_BOUND
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"RPT_EXHAUSTIVE_BOUND must be a decimal integer, got {raw!r}") from exc
    if value < 0:
        raise InputError("RPT_EXHAUSTIVE_BOUND must be non-negative")
    return value


class Verdict(str, Enum):
    HOLDS_EXHAUSTIVE = "HOLDS_EXHAUSTIVE"
    FAILS = "FAILS"
    HOLDS_HEURISTIC = "HOLDS_HEURISTIC"


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    witness: Optional[frozenset] = None
    seed: int = 0
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.verdict == Verdict.FAILS) != (self.witness is not None):
            raise InputError("a FAILS certificate carries a witness and nothing else does")

    @property
    def holds(self) -> bool:
        return self.verdict != Verdict.FAILS

    def to_text(self) -> str:
        wit = " ".join(map(str, sorted(self.witness))) if self.witness is not None else ""
        return f"verdict={self.verdict.value}\nwitness={wit}\nseed={self.seed}\n"

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        fields = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            key, sep, value = line.partition("=")
            if not sep or key not in ("verdict", "witness", "seed"):
                raise InputError(f"line {lineno}: malformed certificate line {line!r}")
            fields[key] = value
        if set(fields) != {"verdict", "witness", "seed"}:
            raise InputError("certificate needs verdict, witness and seed lines")
        try:
            verdict = Verdict(fields["verdict"])
            witness = frozenset(int(x) for x in fields["witness"].split()) if verdict == Verdict.FAILS else None
            seed = int(fields["seed"])
        except ValueError as exc:
            raise InputError(f"malformed certificate: {exc}") from exc
        return cls(verdict, witness, seed)


# ---------------------------------------------------------------------------
# thresholds


def ceil_times(frac: Fraction, h: int) -> int:
    """ceil(frac * h) computed exactly."""
    return -((-frac.numerator * h) // frac.denominator)


def size_window(tau: Fraction, h: int) -> tuple[int, int]:
    """Integer sizes s with tau*h <= s <= (1-tau)*h."""
    tau = Fraction(tau)
    lo = ceil_times(tau, h)
    hi = ((tau.denominator - tau.numerator) * h) // tau.denominator
    return lo, hi


def robust_neighbourhood(g: Graph, host: Iterable[int], s: Iterable[int], nu) -> frozenset:
    """Vertices of ``host`` with at least ``nu*|host|`` neighbours in ``s`` inside g[host]."""
    hm = g.check_vertices(host, "host")
    sm = g.check_vertices(s, "s")
    if sm & ~hm:
        raise InputError("s must be a subset of host")
    return frozenset(bits(rn_mask(g, hm, sm, Fraction(nu))))


def rn_mask(g: Graph, host_mask: int, s_mask: int, nu: Fraction, counted: Optional[int] = None) -> int:
    threshold = ceil_times(nu, host_mask.bit_count())
    out = 0
    for v in iter_bits(host_mask if counted is None else counted):
        if (g.adj[v] & s_mask).bit_count() >= threshold:
            out |= 1 << v
    return out


def expansion_slack(g: Graph, host: Iterable[int], s: Iterable[int], nu) -> Fraction:
    """|RN(S)| - |S| - nu*|host|; negative exactly when S fails to expand."""
    hm, sm = mask_of(host), mask_of(s)
    nu = Fraction(nu)
    return rn_mask(g, hm, sm, nu).bit_count() - sm.bit_count() - nu * hm.bit_count()


def bipartite_slack(g: Graph, a: Iterable[int], b: Iterable[int], s: Iterable[int], nu) -> Fraction:
    """|RN(S) & B| - |S| - nu*|A u B| for S inside A."""
    am, bm, sm = mask_of(a), mask_of(b), mask_of(s)
    nu = Fraction(nu)
    h = (am | bm).bit_count()
    return rn_mask(g, am | bm, sm, nu, counted=bm).bit_count() - sm.bit_count() - nu * h


# ---------------------------------------------------------------------------
# the shared search problem: choose S inside `universe`, count RN among `counted`


class _Problem:
    def __init__(self, g: Graph, universe: Sequence[int], counted: Sequence[int], h: int, nu, tau):
        self.g = g
        self.universe = list(universe)
        self.counted = list(counted)
        self.h = h
        self.nu = Fraction(nu)
        self.tau = Fraction(tau)
        self.threshold = ceil_times(self.nu, h)
        self.lo, self.hi = size_window(self.tau, len(self.universe))
        self.umask = mask_of(self.universe)
        self.cmask = mask_of(self.counted)

    def window_empty(self) -> bool:
        return self.lo > self.hi or not self.universe

    def slack(self, s_mask: int) -> int:
        rn = 0
        for v in iter_bits(self.cmask):
            if (self.g.adj[v] & s_mask).bit_count() >= self.threshold:
                rn += 1
        return rn - s_mask.bit_count() - self.threshold

    def violates(self, s_mask: int) -> bool:
        size = s_mask.bit_count()
        return (s_mask & ~self.umask) == 0 and self.lo <= size <= self.hi and self.slack(s_mask) < 0

    def exact_deficiency(self, s_mask: int) -> Fraction:
        rn = self.slack(s_mask) + s_mask.bit_count() + self.threshold
        return rn - s_mask.bit_count() - self.nu * self.h

    # -- exhaustive enumeration -------------------------------------------

    def enumerate(self, select: str = "lex"):
        """Return (witness mask or None, number of sets examined).

        ``select="lex"`` returns the lexicographically least violating set
        (as a sorted id tuple); ``select="minimal"`` prefers the smallest
        violating set, then the most negative slack, then lexicographic order.
        """
        u = len(self.universe)
        if self.window_empty():
            return None, 0
        dtype = np.uint32 if u <= 32 else np.uint64
        local = {v: i for i, v in enumerate(self.universe)}
        nbr = []
        for c in self.counted:
            lm = 0
            for w in iter_bits(self.g.adj[c] & self.umask):
                lm |= 1 << local[w]
            nbr.append(lm)
        nbr_arr = np.array(nbr, dtype=dtype)
        examined = 0
        best = None  # (key, local mask)
        total = 1 << u
        for start in range(0, total, _CHUNK):
            masks = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64).astype(dtype)
            sizes = np.bitwise_count(masks)
            keep = (sizes >= self.lo) & (sizes <= self.hi)
            masks = masks[keep]
            sizes = sizes[keep].astype(np.int32)
            examined += int(masks.size)
            if masks.size == 0:
                continue
            rn = np.zeros(masks.size, dtype=np.int32)
            for lm in nbr_arr:
                rn += np.bitwise_count(masks & lm) >= self.threshold
            slack = rn - sizes - self.threshold
            bad = slack < 0
            if not bad.any():
                continue
            cand, cand_sizes, cand_slack = masks[bad], sizes[bad], slack[bad]
            if select == "minimal":
                smin = cand_sizes.min()
                pick = cand_sizes == smin
                cand, cand_slack = cand[pick], cand_slack[pick]
                dmin = cand_slack.min()
                cand = cand[cand_slack == dmin]
                key = (int(smin), int(dmin))
            else:
                key = ()
            winner = _lex_least(cand)
            if select == "minimal":
                if best is None or (key, _lex_key(winner)) < (best[0], _lex_key(best[1])):
                    best = (key, winner)
            else:
                if best is None or _lex_key(winner) < _lex_key(best[1]):
                    best = (key, winner)
        if best is None:
            return None, examined
        return mask_of(self.universe[i] for i in bits(best[1])), examined

    # -- local search -----------------------------------------------------

    def local_search(self, restarts: int, seed: int):
        """Seeded hill-climbing on slack; returns (mask or None, restarts used)."""
        if self.window_empty():
            return None, 0
        rng = random.Random(seed)
        seeds: list[int] = []
        for v in self.universe:
            closed = (self.g.adj[v] | (1 << v)) & self.umask
            seeds.append(closed)
            seeds.append(self.umask & ~closed)
        order = list(range(len(seeds)))
        rng.shuffle(order)
        plan = [seeds[i] for i in order[: restarts // 2]]
        while len(plan) < restarts:
            size = rng.randint(self.lo, self.hi)
            plan.append(mask_of(rng.sample(self.universe, size)))
        for used, start in enumerate(plan, 1):
            s = self._fit_window(start, rng)
            s = self._climb(s)
            if self.violates(s):
                return self.minimise(s), used
        return None, len(plan)

    def _fit_window(self, s: int, rng: random.Random) -> int:
        members = bits(s)
        while len(members) > self.hi:
            members.remove(rng.choice(members))
        outside = [v for v in self.universe if not s >> v & 1]
        rng.shuffle(outside)
        while len(members) < self.lo:
            members.append(outside.pop())
        return mask_of(members)

    def _counts(self, s: int) -> tuple[int, int, int]:
        """(mask of counted vertices at threshold-1, at threshold, rn size)."""
        below = at = 0
        rn = 0
        t = self.threshold
        for v in iter_bits(self.cmask):
            d = (self.g.adj[v] & s).bit_count()
            if d == t - 1:
                below |= 1 << v
            if d == t:
                at |= 1 << v
            if d >= t:
                rn += 1
        return below, at, rn

    def _climb(self, s: int) -> int:
        adj = self.g.adj
        t = self.threshold
        for _ in range(4 * len(self.universe) + 8):
            below, at, _rn = self._counts(s)
            size = s.bit_count()
            best_delta, best_move = 0, None
            if t >= 1:
                # adding x raises d for neighbours; d==t-1 ones join RN
                if size < self.hi:
                    for x in iter_bits(self.umask & ~s):
                        delta = (adj[x] & below).bit_count() - 1
                        if delta < best_delta:
                            best_delta, best_move = delta, (None, x)
                if size > self.lo:
                    for x in iter_bits(s):
                        delta = 1 - (adj[x] & at).bit_count()
                        if delta < best_delta:
                            best_delta, best_move = delta, (x, None)
                if best_move is None:
                    for x in iter_bits(s):
                        lose = adj[x] & at
                        for y in iter_bits(self.umask & ~s):
                            delta = (adj[y] & below & ~adj[x]).bit_count() - (lose & ~adj[y]).bit_count()
                            if delta < best_delta:
                                best_delta, best_move = delta, (x, y)
            else:
                # threshold 0: every counted vertex is in RN; grow S
                if size < self.hi:
                    x = next(iter_bits(self.umask & ~s))
                    best_move = (None, x)
            if best_move is None:
                return s
            out_v, in_v = best_move
            if out_v is not None:
                s &= ~(1 << out_v)
            if in_v is not None:
                s |= 1 << in_v
        return s

    def minimise(self, s: int) -> int:
        """Drop vertices while S stays a violating set (fewest in-S neighbours first)."""
        changed = True
        while changed:
            changed = False
            order = sorted(bits(s), key=lambda v: ((self.g.adj[v] & s).bit_count(), v))
            for v in order:
                trial = s & ~(1 << v)
                if self.violates(trial):
                    s = trial
                    changed = True
                    break
        return s


def _lex_key(local_mask: int) -> tuple[int, ...]:
    return tuple(bits(int(local_mask)))


def _lex_least(cands: np.ndarray) -> int:
    """Lexicographically least (as sorted id tuple) mask among ``cands``."""
    prefix = 0
    cands = cands.copy()
    one = cands.dtype.type(1)
    while True:
        rest = cands & ~cands.dtype.type(prefix)
        if (rest == 0).any():
            return prefix
        low = rest & (~rest + one)
        m = low.min()
        cands = cands[low == m]
        prefix |= int(m)


# ---------------------------------------------------------------------------
# public certifiers


def _check_mode(mode: str) -> None:
    if mode not in ("exact", "heuristic"):
        raise InputError(f"mode must be 'exact' or 'heuristic', got {mode!r}")


def certify_robust_expander(
    g: Graph,
    host: Iterable[int],
    nu,
    tau,
    mode: str = "exact",
    *,
    bound: Optional[int] = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Certificate:
    _check_mode(mode)
    hm = g.check_vertices(host, "host")
    universe = bits(hm)
    problem = _Problem(g, universe, universe, len(universe), nu, tau)
    return _certify(problem, mode, bound, restarts, seed)


def certify_bipartite_robust_expander(
    g: Graph,
    a: Iterable[int],
    b: Iterable[int],
    nu,
    tau,
    mode: str = "exact",
    *,
    bound: Optional[int] = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Certificate:
    _check_mode(mode)
    am = g.check_vertices(a, "a")
    bm = g.check_vertices(b, "b")
    if am & bm:
        raise InputError("bipartite sides overlap")
    problem = _Problem(g, bits(am), bits(bm), (am | bm).bit_count(), nu, tau)
    return _certify(problem, mode, bound, restarts, seed)


def _certify(problem: _Problem, mode: str, bound: Optional[int], restarts: int, seed: int) -> Certificate:
    limit = exhaustive_bound() if bound is None else bound
    size = len(problem.universe)
    if mode == "exact":
        if size > limit:
            raise CapabilityError(f"exact certification limited to {limit} vertices (got {size})")
        wit, examined = problem.enumerate("lex")
        stats = {"sets_examined": examined, "restarts": 0, "exhaustive": True}
        if wit is None:
            return Certificate(Verdict.HOLDS_EXHAUSTIVE, None, seed, stats)
        stats["deficiency"] = problem.exact_deficiency(wit)
        return Certificate(Verdict.FAILS, frozenset(bits(wit)), seed, stats)
    wit, stats = _search(problem, limit, restarts, seed)
    if wit is None:
        return Certificate(Verdict.HOLDS_HEURISTIC, None, seed, stats)
    stats["deficiency"] = problem.exact_deficiency(wit)
    return Certificate(Verdict.FAILS, frozenset(bits(wit)), seed, stats)


def _search(problem: _Problem, limit: int, restarts: int, seed: int, select: str = "minimal"):
    if len(problem.universe) <= limit:
        wit, examined = problem.enumerate(select)
        return wit, {"sets_examined": examined, "restarts": 0, "exhaustive": True}
    wit, used = problem.local_search(restarts, seed)
    return wit, {"sets_examined": used, "restarts": used, "exhaustive": False}


def find_nonexpanding_witness(
    g: Graph,
    host: Iterable[int],
    nu,
    tau,
    *,
    bound: Optional[int] = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Optional[frozenset]:
    """A verified non-expanding set of ``host``, or None.

    Small hosts are enumerated and the smallest violating set is returned
    (ties: most negative slack, then lexicographic). Larger hosts use the
    seeded local search, whose result is pruned to an inclusion-minimal
    violating set.
    """
    hm = g.check_vertices(host, "host")
    universe = bits(hm)
    problem = _Problem(g, universe, universe, len(universe), nu, tau)
    limit = exhaustive_bound() if bound is None else bound
    wit, _ = _search(problem, limit, restarts, seed)
    if wit is None:
        return None
    assert problem.violates(wit)
    return frozenset(bits(wit))


def find_bipartite_witness(
    g: Graph,
    a: Iterable[int],
    b: Iterable[int],
    nu,
    tau,
    *,
    bound: Optional[int] = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> Optional[frozenset]:
    """Witness S inside ``a`` whose robust neighbourhood in ``b`` is too small."""
    am, bm = mask_of(a), mask_of(b)
    problem = _Problem(g, bits(am), bits(bm), (am | bm).bit_count(), nu, tau)
    limit = exhaustive_bound() if bound is None else bound
    wit, _ = _search(problem, limit, restarts, seed)
    if wit is None:
        return None
    assert problem.violates(wit)
    return frozenset(bits(wit))


def is_nonexpanding(g: Graph, host: Iterable[int], s: Iterable[int], nu, tau) -> bool:
    hm, sm = mask_of(host), mask_of(s)
    universe = bits(hm)
    return _Problem(g, universe, universe, len(universe), nu, tau).violates(sm)


def is_bipartite_nonexpanding(g: Graph, a, b, s, nu, tau) -> bool:
    am, bm = mask_of(a), mask_of(b)
    return _Problem(g, bits(am), bits(bm), (am | bm).bit_count(), nu, tau).violates(mask_of(s))


# ---------------------------------------------------------------------------
# component conditions


def check_rho_component(g: Graph, u: Iterable[int], rho) -> bool:
    um = g.check_vertices(u, "u")
    return rho_component_mask(g, um, Fraction(rho))


def rho_component_mask(g: Graph, um: int, rho: Fraction) -> bool:
    n2 = g.n * g.n
    size = um.bit_count()
    big = size * size * rho.denominator >= rho.numerator * n2
    sparse_cut = cut_size(g, um) * rho.denominator <= rho.numerator * n2
    return big and sparse_cut


def rho_close_terms(g: Graph, u1m: int, u2m: int) -> int:
    """Left side of (C3): e(U1, comp U2) + e(U2, comp U1)."""
    full = g.full_mask
    return e_between(g, u1m, full & ~u2m) + e_between(g, u2m, full & ~u1m)


def check_rho_close_bipartite(g: Graph, u1: Iterable[int], u2: Iterable[int], rho) -> bool:
    u1m = g.check_vertices(u1, "u1")
    u2m = g.check_vertices(u2, "u2")
    if u1m & u2m:
        raise InputError("u1 and u2 must be disjoint")
    return rho_close_mask(g, u1m, u2m, Fraction(rho))


def rho_close_mask(g: Graph, u1m: int, u2m: int, rho: Fraction) -> bool:
    n = g.n
    p, q = rho.numerator, rho.denominator
    s1, s2 = u1m.bit_count(), u2m.bit_count()
    c1 = s1 * s1 * q >= p * n * n and s2 * s2 * q >= p * n * n
    c2 = abs(s1 - s2) * q <= p * n
    c3 = rho_close_terms(g, u1m, u2m) * q <= p * n * n
    return c1 and c2 and c3


def dense_implies_expander(g: Graph, nu, tau, epsilon) -> bool:
    """Cheap sufficient condition: min degree >= (1/2+eps)n and eps >= 2nu/tau."""
    nu, tau, epsilon = Fraction(nu), Fraction(tau), Fraction(epsilon)
    return g.min_degree() >= (Fraction(1, 2) + epsilon) * g.n and epsilon >= 2 * nu / tau


# ---------------------------------------------------------------------------
# partition validation


@dataclass
class ClauseResult:
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    clauses: dict
    k: int
    ell: int
    mode: str

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def failed(self) -> list[str]:
        return [name for name, c in self.clauses.items() if not c.passed]

    def summary(self) -> str:
        lines = [f"(k,l)=({self.k},{self.ell}) mode={self.mode}"]
        for name, c in self.clauses.items():
            lines.append(f"{name}: {'pass' if c.passed else 'FAIL'}{' - ' + c.detail if c.detail else ''}")
        return "\n".join(lines)


def _cert_mode(mode: str, size: int, bound: int) -> str:
    if mode == "auto":
        return "exact" if size <= bound else "heuristic"
    return mode


def certify_class(g: Graph, label: ComponentLabel, params: Params, mode: str = "auto", seed: int = 0) -> Certificate:
    """Expansion certificate for one labelled class (expander or bipartite)."""
    bound = exhaustive_bound()
    if label.is_bipartite:
        a, b = label.bipartition
        return certify_bipartite_robust_expander(
            g, a, b, params.nu, params.tau, _cert_mode(mode, len(a), bound), seed=seed
        )
    return certify_robust_expander(
        g, label.vertices, params.nu, params.tau, _cert_mode(mode, len(label.vertices), bound), seed=seed
    )


def d6_holds(k: int, ell: int, n: int, degree: int, rho: Fraction) -> bool:
    """k + 2l <= floor((1 + rho^(1/3)) n / D), by an exact cube comparison."""
    excess = (k + 2 * ell) * degree - n
    if excess <= 0:
        return True
    return excess**3 * rho.denominator <= rho.numerator * n**3


def validate_robust_partition(
    g: Graph,
    rp: RobustPartition,
    mode: str = "auto",
    *,
    r: Optional[int] = None,
    seed: int = 0,
) -> ValidationReport:
    """Check (D1)-(D7) clause by clause. ``D`` is the minimum degree of g."""
    if not rp.is_partition_of(g):
        raise InputError("classes do not partition the vertex set")
    if mode not in ("exact", "heuristic", "auto"):
        raise InputError(f"unknown mode {mode!r}")
    params = rp.params
    rho = params.rho
    n = g.n
    degree = g.min_degree()
    clauses: dict = {"D1": ClauseResult(True, "classes partition V(G)")}

    bad = []
    for i, c in enumerate(rp.expanders):
        if not rho_component_mask(g, c.mask, rho):
            bad.append(f"class {min(c.vertices)}: not a rho-component")
        elif not certify_class(g, c, params, mode, seed).holds:
            bad.append(f"class {min(c.vertices)}: not a robust expander")
    clauses["D2"] = ClauseResult(not bad, "; ".join(bad))

    bad = []
    for c in rp.bipartites:
        a, b = c.bipartition
        if not rho_close_mask(g, mask_of(a), mask_of(b), rho):
            bad.append(f"class {min(c.vertices)}: not rho-close to bipartite")
        elif not certify_class(g, c, params, mode, seed).holds:
            bad.append(f"class {min(c.vertices)}: not a bipartite robust expander")
    clauses["D3"] = ClauseResult(not bad, "; ".join(bad))

    masks = [c.mask for c in rp.classes]
    bad = []
    for i, cm in enumerate(masks):
        for x in iter_bits(cm):
            own = (g.adj[x] & cm).bit_count()
            for j, other in enumerate(masks):
                if j != i and (g.adj[x] & other).bit_count() > own:
                    bad.append(f"vertex {x} prefers class {j}")
                    break
    clauses["D4"] = ClauseResult(not bad, "; ".join(bad[:5]))

    bad = []
    for c in rp.bipartites:
        a, b = (mask_of(s) for s in c.bipartition)
        for x in iter_bits(a):
            if (g.adj[x] & b).bit_count() < (g.adj[x] & a).bit_count():
                bad.append(f"vertex {x} has more neighbours on its own side")
        for x in iter_bits(b):
            if (g.adj[x] & a).bit_count() < (g.adj[x] & b).bit_count():
                bad.append(f"vertex {x} has more neighbours on its own side")
    clauses["D5"] = ClauseResult(not bad, "; ".join(bad[:5]))

    ok6 = d6_holds(rp.k, rp.ell, n, degree, rho) if degree > 0 else False
    clauses["D6"] = ClauseResult(ok6, f"k+2l={rp.k + 2 * rp.ell}, D={degree}, n={n}")

    bad = []
    for cm in masks:
        low = sum(1 for x in iter_bits(cm) if (degree - (g.adj[x] & cm).bit_count()) * rho.denominator > rho.numerator * n)
        if low * rho.denominator > rho.numerator * n:
            bad.append(f"class {bits(cm)[0]}: {low} low-degree vertices")
    clauses["D7"] = ClauseResult(not bad, "; ".join(bad))

    if r is not None:
        clauses["fewstructs"] = ClauseResult(rp.k + 2 * rp.ell <= r - 1, f"k+2l <= r-1 with r={r}")
    return ValidationReport(clauses, rp.k, rp.ell, mode)


def validate_weak_subpartition(
    g: Graph, sub: RobustPartition, mode: str = "auto", *, eta=None, seed: int = 0
) -> ValidationReport:
    """Check (D1')-(D5'): disjoint classes, certified components, degree floors."""
    params = sub.params
    eta = Fraction(eta if eta is not None else (params.eta if params.eta is not None else 0))
    rho = params.rho
    n = g.n
    clauses: dict = {"D1'": ClauseResult(True, "classes are disjoint")}
    bad = []
    for c in sub.expanders:
        if not rho_component_mask(g, c.mask, rho):
            bad.append(f"class {min(c.vertices)}: not a rho-component")
        elif not certify_class(g, c, params, mode, seed).holds:
            bad.append(f"class {min(c.vertices)}: not a robust expander")
    clauses["D2'"] = ClauseResult(not bad, "; ".join(bad))
    bad = []
    for c in sub.bipartites:
        a, b = c.bipartition
        if not rho_close_mask(g, mask_of(a), mask_of(b), rho):
            bad.append(f"class {min(c.vertices)}: not rho-close to bipartite")
        elif not certify_class(g, c, params, mode, seed).holds:
            bad.append(f"class {min(c.vertices)}: not a bipartite robust expander")
    clauses["D3'"] = ClauseResult(not bad, "; ".join(bad))
    bad = []
    for c in sub.classes:
        cm = c.mask
        dmin = min((g.adj[x] & cm).bit_count() for x in iter_bits(cm))
        if dmin < eta * n:
            bad.append(f"class {min(c.vertices)}: internal min degree {dmin}")
    clauses["D4'"] = ClauseResult(not bad, "; ".join(bad))
    bad = []
    for c in sub.bipartites:
        a, b = (mask_of(s) for s in c.bipartition)
        dmin = min(
            [(g.adj[x] & b).bit_count() for x in iter_bits(a)] + [(g.adj[x] & a).bit_count() for x in iter_bits(b)]
        )
        if dmin < eta * n / 2:
            bad.append(f"class {min(c.vertices)}: cross min degree {dmin}")
    clauses["D5'"] = ClauseResult(not bad, "; ".join(bad))
    return ValidationReport(clauses, sub.k, sub.ell, mode)


def label_certifies(g: Graph, label: ComponentLabel, params: Params, mode: str = "auto") -> bool:
    return certify_class(g, label, params, mode).holds


def internal_degree_floor(g: Graph, vertices: Iterable[int]) -> int:
    m = mask_of(vertices)
    return min((g.adj[x] & m).bit_count() for x in iter_bits(m)) if m else 0
