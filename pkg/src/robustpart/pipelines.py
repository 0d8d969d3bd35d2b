"""End-to-end drivers: Hamilton cycles in dense regular graphs and long cycles in t-connected ones."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import PreconditionError, RobustPartError
from .graph import Graph, is_k_connected
from .hamilton import assemble_hamilton
from .oracle import CycleResult, verify_cycle
from .partition import RefinementTrace, Schedule, refine_to_robust_partition
from .paths import seed_one_each, balance_extend, subpartition_tour, three_part_connector, tour_one_bipartite
from .structures import PathSystem, RobustPartition


@dataclass(frozen=True)
class StabilityPartition:
    """Returned instead of a cycle; ``reason`` says why no assembly was tried."""

    partition: RobustPartition
    reason: str

    @property
    def shape(self) -> tuple[int, int]:
        return self.partition.k, self.partition.ell


@dataclass
class HamiltonOutcome:
    result: Union[CycleResult, StabilityPartition]
    partition: Optional[RobustPartition] = None
    tour: Optional[PathSystem] = None
    trace: Optional[RefinementTrace] = None

    @property
    def found(self) -> bool:
        return isinstance(self.result, CycleResult)


def _stage(name: str, exc: RobustPartError) -> RobustPartError:
    exc.stage = name
    exc.args = (f"[{name}] {exc.args[0] if exc.args else ''}",) + exc.args[1:]
    return exc


def _tour_for(g: Graph, rp: RobustPartition) -> Optional[PathSystem]:
    k, ell = rp.k, rp.ell
    rho = rp.params.rho
    if ell == 0 and 1 <= k <= 3:
        return three_part_connector(g, [c.vertices for c in rp.classes])
    if (k, ell) == (0, 1):
        return tour_one_bipartite(g, rp.classes[0], rho, strict=False)
    if (k, ell) == (1, 1):
        bip = rp.bipartites[0]
        a, b = bip.bipartition
        seed = seed_one_each(g, rp.expanders[0].vertices, a, b)
        return balance_extend(g, rp, seed, 4 * rho, strict=False)
    return None


def find_hamilton_pipeline(
    g: Graph,
    schedule: Optional[Schedule] = None,
    *,
    seed: int = 0,
    restarts: int = 64,
) -> HamiltonOutcome:
    """Partition, build a tour for the partition's shape, and assemble a Hamilton cycle.

    Shapes without a tour construction, and graphs that are not
    3-connected, come back as a StabilityPartition.
    """
    try:
        rp, trace = refine_to_robust_partition(g, schedule, seed=seed, restarts=restarts)
    except RobustPartError as exc:
        raise _stage("partition", exc)
    if not is_k_connected(g, 3):
        return HamiltonOutcome(StabilityPartition(rp, "graph is not 3-connected"), rp, None, trace)
    try:
        tour = _tour_for(g, rp)
    except RobustPartError as exc:
        raise _stage("tour", exc)
    if tour is None:
        return HamiltonOutcome(StabilityPartition(rp, f"no tour construction for (k,l)=({rp.k},{rp.ell})"), rp, None, trace)
    try:
        cyc = assemble_hamilton(g, rp, tour)
    except RobustPartError as exc:
        raise _stage("assemble", exc)
    if not verify_cycle(g, cyc.cycle, covers=range(g.n)) or len(cyc.cycle) != g.n:
        raise _stage("assemble", PreconditionError("cycle is not Hamiltonian"))  # pragma: no cover
    return HamiltonOutcome(cyc, rp, tour, trace)


@dataclass
class LongCycleOutcome:
    cycle: CycleResult
    partition: RobustPartition
    selected: RobustPartition
    tour: PathSystem
    covered_target: int
    slack: Fraction
    bound: Optional[Fraction] = None
    notes: list = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.cycle.cycle)


def circumference_bound(n: int, t: int, r: int, eps, bipartite: bool = False) -> Fraction:
    """min{t/(r-1), 1-eps} n, or min{2tn/(r-2), n} - eps n for the bipartite variant."""
    eps = Fraction(eps)
    if bipartite:
        if r <= 2:
            raise PreconditionError("bipartite bound needs r > 2")
        return min(Fraction(2 * t * n, r - 2), Fraction(n)) - eps * n
    if r <= 1:
        raise PreconditionError("bound needs r > 1")
    return min(Fraction(t, r - 1), 1 - eps) * n


def long_cycle_pipeline(
    g: Graph,
    t: int,
    schedule: Optional[Schedule] = None,
    *,
    seed: int = 0,
    r: Optional[int] = None,
    eps=None,
    restarts: int = 64,
) -> LongCycleOutcome:
    """Cycle through the t largest classes of a robust partition, minus trimmed vertices."""
    if t < 1:
        raise PreconditionError("t must be positive")
    if not is_k_connected(g, t):
        raise PreconditionError(f"graph is not {t}-connected")
    try:
        rp, _ = refine_to_robust_partition(g, schedule, seed=seed, restarts=restarts)
    except RobustPartError as exc:
        raise _stage("partition", exc)
    chosen = sorted(rp.classes, key=lambda c: (-len(c.vertices), min(c.vertices)))[:t]
    sub = RobustPartition(tuple(chosen), rp.params, rp.tags)
    try:
        adjusted, tour = subpartition_tour(g, sub, t, strict=False)
    except RobustPartError as exc:
        raise _stage("tour", exc)
    try:
        cyc = assemble_hamilton(g, adjusted, tour)
    except RobustPartError as exc:
        raise _stage("assemble", exc)
    target = sum(len(c.vertices) for c in chosen)
    slack = 2 * rp.params.rho * sub.ell * g.n
    bound = circumference_bound(g.n, t, r, eps if eps is not None else 0) if r is not None else None
    return LongCycleOutcome(cyc, rp, adjusted, tour, target, slack, bound)
