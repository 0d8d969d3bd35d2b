"""Command-line front end.

Exit statuses: 0 success, 1 negative result (non-Hamiltonian, certificate
fails, validation fails, or a construction stage fails), 2 input error,
3 capability error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import CapabilityError, InputError, PreconditionError, RobustPartError
from .expansion import certify_bipartite_robust_expander, certify_robust_expander, validate_robust_partition
from .formats import (
    cycle_to_text,
    graph_to_text,
    partition_to_text,
    paths_from_text,
    paths_to_text,
    read_graph,
    partition_from_text,
)
from .generators import PlantedSpec, gen_bestposs, gen_fig1i, gen_fig1ii, gen_planted, gen_random_regular
from .graph import Graph, Params, parse_rational
from .oracle import DEFAULT_ORACLE_BOUND, hamilton_oracle
from .partition import constant_schedule, geometric_schedule, refine_to_robust_partition
from .paths import validate_tour
from .pipelines import StabilityPartition, find_hamilton_pipeline, long_cycle_pipeline

FAMILIES = ("fig1i", "fig1ii", "bestposs", "random-regular", "planted-expanders", "planted-bipartite")
REFUSED = ("bestposs-bipartite",)


def _rational(text: str):
    try:
        return parse_rational(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _sizes(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: input error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustpart", description="Robust partitions and Hamilton cycles in dense regular graphs.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="build a graph from a named family")
    gen.add_argument("--family", required=True, choices=FAMILIES + REFUSED)
    gen.add_argument("--m", type=int)
    gen.add_argument("--t", type=int)
    gen.add_argument("--r", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--degree", type=int)
    gen.add_argument("--sizes", type=_sizes)
    gen.add_argument("--bridge", type=int, default=3)
    gen.add_argument("--sparsity", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.add_argument("--truth-out", help="planted families: write the ground-truth partition here")

    cert = sub.add_parser("certify", help="check robust expansion of a graph")
    cert.add_argument("--graph", required=True)
    cert.add_argument("--nu", type=_rational, required=True)
    cert.add_argument("--tau", type=_rational, required=True)
    cert.add_argument("--mode", choices=("exact", "heuristic", "auto"), default="auto")
    cert.add_argument("--side-a", help="bipartite mode: file or comma list with the first side")
    cert.add_argument("--seed", type=int, default=0)

    part = sub.add_parser("partition", help="compute a robust partition")
    part.add_argument("--graph", required=True)
    part.add_argument("--schedule", choices=("constant", "geometric"), default="constant")
    part.add_argument("--rho", type=_rational)
    part.add_argument("--nu", type=_rational)
    part.add_argument("--tau", type=_rational)
    part.add_argument("--seed", type=int, default=0)
    part.add_argument("--out")
    part.add_argument("--trace", action="store_true", help="print refinement steps to stderr")

    val = sub.add_parser("validate", help="check a partition (and optionally a tour) against a graph")
    val.add_argument("--graph", required=True)
    val.add_argument("--partition", required=True)
    val.add_argument("--tour", help="path-system file to check as a tour of the partition")
    val.add_argument("--gamma", type=_rational, help="footprint bound for the tour")
    val.add_argument("--mode", choices=("exact", "heuristic", "auto"), default="auto")
    val.add_argument("--seed", type=int, default=0)

    ham = sub.add_parser("hamilton", help="find a Hamilton cycle or prove there is none")
    ham.add_argument("--graph", required=True)
    ham.add_argument("--method", choices=("auto", "pipeline", "oracle"), default="auto")
    ham.add_argument("--seed", type=int, default=0)
    ham.add_argument("--tour-out", help="write the tour used by the pipeline")

    lc = sub.add_parser("longcycle", help="long cycle through the t largest classes")
    lc.add_argument("--graph", required=True)
    lc.add_argument("--t", type=int, required=True)
    lc.add_argument("--r", type=int)
    lc.add_argument("--eps", type=_rational)
    lc.add_argument("--seed", type=int, default=0)
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"family {args.family} needs --{' --'.join(missing)}")


def _cmd_generate(args) -> int:
    fam = args.family
    if fam in REFUSED:
        raise CapabilityError(f"family {fam} is not generated; only its existence is known, not an explicit construction")
    truth = None
    if fam == "fig1i":
        _need(args, "m")
        g = gen_fig1i(args.m)
    elif fam == "fig1ii":
        _need(args, "m")
        g = gen_fig1ii(args.m)
    elif fam == "bestposs":
        _need(args, "t", "r", "k")
        g = gen_bestposs(args.t, args.r, args.k)
    elif fam == "random-regular":
        _need(args, "n", "degree")
        g = gen_random_regular(args.n, args.degree, args.seed)
    else:
        _need(args, "sizes")
        spec = PlantedSpec(fam.split("-")[1], args.sizes, args.bridge, args.sparsity, args.seed)
        g, truth = gen_planted(spec)
    _emit(graph_to_text(g), args.out)
    if truth is not None and args.truth_out:
        _emit(partition_to_text(truth), args.truth_out)
    return 0


def _read_side(text: str) -> list[int]:
    try:
        with open(text, encoding="ascii") as fh:
            text = fh.read()
    except OSError:
        pass
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"side must list vertex ids, got {text!r}") from exc


def _cmd_certify(args) -> int:
    g = read_graph(args.graph)
    if args.side_a:
        a = set(_read_side(args.side_a))
        b = [v for v in range(g.n) if v not in a]
        cert = certify_bipartite_robust_expander(g, sorted(a), b, args.nu, args.tau, args.mode, seed=args.seed)
    else:
        cert = certify_robust_expander(g, range(g.n), args.nu, args.tau, args.mode, seed=args.seed)
    print(cert.verdict.value)
    if cert.witness is not None:
        print("witness " + " ".join(map(str, sorted(cert.witness))))
    return 0 if cert.holds else 1


def _schedule(args):
    if args.schedule == "geometric":
        return geometric_schedule()
    if args.rho or args.nu or args.tau:
        base = constant_schedule().params(0)
        params = Params(args.rho or base.rho, args.nu or base.nu, args.tau or base.tau)
        return constant_schedule(params)
    return constant_schedule()


def _cmd_partition(args) -> int:
    g = read_graph(args.graph)
    rp, trace = refine_to_robust_partition(g, _schedule(args), seed=args.seed)
    if args.trace:
        for s in trace.steps:
            extra = f" vertex={s.vertex}" if s.vertex is not None else ""
            print(f"step {s.kind} level={s.level}{extra} {s.note}".rstrip(), file=sys.stderr)
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if rp.tags:
        print("tags: " + " ".join(rp.tags), file=sys.stderr)
    _emit(partition_to_text(rp), args.out)
    return 0


def _cmd_validate(args) -> int:
    g = read_graph(args.graph)
    with open(args.partition, encoding="ascii") as fh:
        rp = partition_from_text(fh.read())
    ok = True
    if args.tour:
        with open(args.tour, encoding="ascii") as fh:
            tour = paths_from_text(fh.read())
        report = validate_tour(g, rp, tour, args.gamma)
        for name, c in report.clauses.items():
            print(f"{name}: {'pass' if c.passed else 'FAIL'}{' - ' + c.detail if c.detail else ''}")
        ok = report.ok
    else:
        report = validate_robust_partition(g, rp, args.mode, seed=args.seed)
        print(report.summary())
        ok = report.ok
    print("VALID" if ok else "INVALID")
    return 0 if ok else 1


def _oracle_answer(g: Graph) -> int:
    if g.n > DEFAULT_ORACLE_BOUND:
        raise CapabilityError(f"graph has {g.n} vertices; the exact search handles at most {DEFAULT_ORACLE_BOUND}")
    res = hamilton_oracle(g)
    if res is None:
        print("NON-HAMILTONIAN (exhaustive)")
        return 1
    sys.stdout.write(cycle_to_text(res.cycle))
    return 0


def _cmd_hamilton(args) -> int:
    g = read_graph(args.graph)
    if args.method == "oracle":
        return _oracle_answer(g)
    try:
        out = find_hamilton_pipeline(g, seed=args.seed)
    except RobustPartError as exc:
        if args.method == "pipeline":
            raise
        print(f"pipeline: {exc}", file=sys.stderr)
        return _oracle_answer(g)
    if isinstance(out.result, StabilityPartition):
        k, ell = out.result.shape
        print(f"pipeline: stability partition (k,l)=({k},{ell}): {out.result.reason}", file=sys.stderr)
        if args.method == "auto" and g.n <= DEFAULT_ORACLE_BOUND:
            return _oracle_answer(g)
        print(f"STABILITY k={k} l={ell}")
        sys.stdout.write(partition_to_text(out.result.partition))
        return 1
    if args.tour_out:
        _emit(paths_to_text(out.tour), args.tour_out)
    sys.stdout.write(cycle_to_text(out.result.cycle))
    return 0


def _cmd_longcycle(args) -> int:
    g = read_graph(args.graph)
    out = long_cycle_pipeline(g, args.t, seed=args.seed, r=args.r, eps=args.eps)
    print(f"length {out.length} target {out.covered_target} slack {out.slack}", file=sys.stderr)
    if out.bound is not None:
        print(f"bound {out.bound}", file=sys.stderr)
    sys.stdout.write(cycle_to_text(out.cycle.cycle))
    return 0


COMMANDS = {
    "generate": _cmd_generate,
    "certify": _cmd_certify,
    "partition": _cmd_partition,
    "validate": _cmd_validate,
    "hamilton": _cmd_hamilton,
    "longcycle": _cmd_longcycle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "seed"):
        print(f"seed: {args.seed}", file=sys.stderr)
    try:
        return COMMANDS[args.verb](args)
    except (InputError, PreconditionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except RobustPartError as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
