"""Bit-exact text formats for graphs, partitions, path systems and cycles."""

from __future__ import annotations

from typing import Sequence

from .errors import InputError
from .graph import Graph, Params, parse_rational
from .structures import ComponentLabel, PathSystem, RobustPartition


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from exc
    if any(v < 0 or str(v) != t for v, t in zip(values, tokens)):
        raise InputError(f"line {lineno}: ids must be plain non-negative decimals")
    return values


# ---------------------------------------------------------------------------
# graph: "n m" then m lines "u v", u < v, ascending


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    if not text:
        raise InputError("line 1: empty graph file")
    if not text.endswith("\n"):
        raise InputError("graph file must be newline-terminated")
    lines = text[:-1].split("\n")
    head = lines[0].split(" ")
    if len(head) != 2:
        raise InputError(f"line 1: header must be 'n m', got {lines[0]!r}")
    n, m = _ints(head, 1)
    if len(lines) - 1 != m:
        raise InputError(f"line 1: header announces {m} edges, file has {len(lines) - 1}")
    edges = []
    prev = None
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(" ")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = _ints(parts, lineno)
        if not u < v < n:
            raise InputError(f"line {lineno}: need 0 <= u < v < n, got {u} {v}")
        if prev is not None and (u, v) <= prev:
            kind = "duplicate" if (u, v) == prev else "out-of-order"
            raise InputError(f"line {lineno}: {kind} edge {u} {v}")
        prev = (u, v)
        edges.append((u, v))
    return Graph(n, edges)


def read_graph(path: str) -> Graph:
    with open(path, encoding="ascii") as fh:
        return graph_from_text(fh.read())


def write_graph(g: Graph, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(graph_to_text(g))


# ---------------------------------------------------------------------------
# partition


def partition_to_text(rp: RobustPartition) -> str:
    lines = [rp.params.header()]
    for c in rp.classes:
        if c.is_bipartite:
            a, b = c.bipartition
            lines.append(f"bipartite {' '.join(map(str, sorted(a)))} | {' '.join(map(str, sorted(b)))}")
        else:
            lines.append(f"expander {' '.join(map(str, sorted(c.vertices)))}")
    return "\n".join(lines) + "\n"


def _sorted_ids(tokens: list[str], lineno: int) -> list[int]:
    ids = _ints(tokens, lineno)
    if not ids:
        raise InputError(f"line {lineno}: empty id list")
    if any(x >= y for x, y in zip(ids, ids[1:])):
        raise InputError(f"line {lineno}: ids must be strictly ascending")
    return ids


def partition_from_text(text: str) -> RobustPartition:
    if not text.strip():
        raise InputError("line 1: empty partition file")
    lines = text.rstrip("\n").split("\n")
    head = lines[0].split(" ")
    if len(head) != 4 or head[0] != "params":
        raise InputError("line 1: header must be 'params rho=p/q nu=p/q tau=p/q'")
    values = {}
    for token, key in zip(head[1:], ("rho", "nu", "tau")):
        name, sep, raw = token.partition("=")
        if name != key or not sep:
            raise InputError(f"line 1: expected {key}=p/q, got {token!r}")
        values[key] = parse_rational(raw)
    params = Params(values["rho"], values["nu"], values["tau"])
    classes = []
    for lineno, line in enumerate(lines[1:], 2):
        kind, _, rest = line.partition(" ")
        if kind == "expander":
            classes.append(ComponentLabel.expander(_sorted_ids(rest.split(" "), lineno)))
        elif kind == "bipartite":
            left, sep, right = rest.partition(" | ")
            if not sep:
                raise InputError(f"line {lineno}: bipartite class needs 'A | B'")
            classes.append(
                ComponentLabel.bipartite(_sorted_ids(left.split(" "), lineno), _sorted_ids(right.split(" "), lineno))
            )
        else:
            raise InputError(f"line {lineno}: unknown class kind {kind!r}")
    mins = [min(c.vertices) for c in classes]
    if mins != sorted(mins):
        raise InputError("classes must be ordered by minimum id")
    try:
        return RobustPartition(tuple(classes), params)
    except InputError as exc:
        raise InputError(f"invalid partition: {exc}") from exc


# ---------------------------------------------------------------------------
# path systems


def paths_to_text(ps: PathSystem) -> str:
    return "".join(" ".join(map(str, p)) + "\n" for p in ps.paths)


def paths_from_text(text: str) -> PathSystem:
    paths = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#") or not line.strip():
            continue
        paths.append(_ints(line.split(), lineno))
    return PathSystem.of(paths)


# ---------------------------------------------------------------------------
# cycles


def canonical_cycle(cycle: Sequence[int]) -> list[int]:
    """Rotate to start at the minimum id; orient so the second id is the smaller neighbour."""
    cycle = list(cycle)
    if not cycle:
        return cycle
    i = cycle.index(min(cycle))
    rot = cycle[i:] + cycle[:i]
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return rot


def cycle_to_text(cycle: Sequence[int]) -> str:
    return " ".join(map(str, canonical_cycle(cycle))) + "\n"


def cycle_from_text(text: str) -> list[int]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 1:
        raise InputError("cycle file must contain exactly one line")
    return _ints(lines[0].split(), 1)
