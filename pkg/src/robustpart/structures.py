"""Plain data types: component labels, partitions and path systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import InputError
from .graph import Graph, Params, mask_of


class Kind(str, Enum):
    EXPANDER = "expander"
    BIPARTITE = "bipartite"


@dataclass(frozen=True)
class ComponentLabel:
    kind: Kind
    vertices: frozenset
    bipartition: Optional[tuple[frozenset, frozenset]] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        if self.kind == Kind.BIPARTITE:
            if self.bipartition is None:
                raise InputError("bipartite class needs a bipartition")
            a, b = (frozenset(x) for x in self.bipartition)
            if a & b or (a | b) != self.vertices:
                raise InputError("bipartition sides must be disjoint and cover the class")
            object.__setattr__(self, "bipartition", (a, b))
        elif self.bipartition is not None:
            raise InputError("expander class cannot carry a bipartition")

    @classmethod
    def expander(cls, vertices: Iterable[int]) -> "ComponentLabel":
        return cls(Kind.EXPANDER, frozenset(vertices))

    @classmethod
    def bipartite(cls, a: Iterable[int], b: Iterable[int]) -> "ComponentLabel":
        a, b = frozenset(a), frozenset(b)
        return cls(Kind.BIPARTITE, a | b, (a, b))

    @property
    def is_bipartite(self) -> bool:
        return self.kind == Kind.BIPARTITE

    @property
    def mask(self) -> int:
        return mask_of(self.vertices)


@dataclass(frozen=True)
class RobustPartition:
    """Labelled classes plus the parameters they were certified against.

    Also used for weak robust subpartitions, where the classes need not
    cover the vertex set.
    """

    classes: tuple[ComponentLabel, ...]
    params: Params
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.classes, key=lambda c: min(c.vertices) if c.vertices else -1))
        object.__setattr__(self, "classes", ordered)
        seen: set = set()
        for c in ordered:
            if not c.vertices:
                raise InputError("empty class")
            if seen & c.vertices:
                raise InputError("classes overlap")
            seen |= c.vertices
        object.__setattr__(self, "tags", tuple(self.tags))

    @property
    def k(self) -> int:
        return sum(1 for c in self.classes if not c.is_bipartite)

    @property
    def ell(self) -> int:
        return sum(1 for c in self.classes if c.is_bipartite)

    @property
    def expanders(self) -> list[ComponentLabel]:
        return [c for c in self.classes if not c.is_bipartite]

    @property
    def bipartites(self) -> list[ComponentLabel]:
        return [c for c in self.classes if c.is_bipartite]

    @property
    def covered(self) -> frozenset:
        out: frozenset = frozenset()
        for c in self.classes:
            out |= c.vertices
        return out

    def is_partition_of(self, g: Graph) -> bool:
        return self.covered == frozenset(range(g.n))

    def class_of(self, v: int) -> int:
        for i, c in enumerate(self.classes):
            if v in c.vertices:
                return i
        return -1

    def with_tags(self, *tags: str) -> "RobustPartition":
        return RobustPartition(self.classes, self.params, tuple(dict.fromkeys(self.tags + tags)))


@dataclass(frozen=True)
class PathSystem:
    """Vertex-disjoint paths, each a tuple of vertex ids in path order."""

    paths: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        paths = tuple(tuple(p) for p in self.paths)
        seen: set = set()
        for p in paths:
            if not p:
                raise InputError("empty path")
            if len(set(p)) != len(p) or seen & set(p):
                raise InputError(f"paths must be simple and vertex-disjoint: {p}")
            seen.update(p)
        object.__setattr__(self, "paths", paths)

    @classmethod
    def of(cls, paths: Iterable[Sequence[int]]) -> "PathSystem":
        return cls(tuple(tuple(p) for p in paths))

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(v for p in self.paths for v in p)

    @property
    def vertex_mask(self) -> int:
        return mask_of(self.vertex_set)

    @property
    def endpoints(self) -> list[int]:
        """Endpoint multiset; a one-vertex path contributes its vertex twice."""
        out = []
        for p in self.paths:
            out.extend((p[0], p[-1]))
        return out

    @property
    def internal(self) -> frozenset:
        return frozenset(v for p in self.paths for v in p[1:-1])

    @property
    def edges(self) -> frozenset:
        return frozenset(tuple(sorted(e)) for p in self.paths for e in zip(p, p[1:]))

    def degree(self, v: int) -> int:
        for p in self.paths:
            if v in p:
                if len(p) == 1:
                    return 0
                return 1 if v in (p[0], p[-1]) else 2
        return 0

    def end_count(self, vertices) -> int:
        s = set(vertices)
        return sum(1 for v in self.endpoints if v in s)

    def int_count(self, vertices) -> int:
        s = set(vertices)
        return sum(1 for v in self.internal if v in s)

    def is_in(self, g: Graph) -> bool:
        return all(g.has_edge(u, v) for p in self.paths for u, v in zip(p, p[1:]))

    def nontrivial(self) -> "PathSystem":
        return PathSystem(tuple(p for p in self.paths if len(p) > 1))

    def canonical(self) -> "PathSystem":
        """Each path oriented to start at its smaller endpoint; paths sorted."""
        ps = [p if p[0] <= p[-1] else p[::-1] for p in self.paths]
        return PathSystem(tuple(sorted(ps)))
