"""Command-line interface: ``cspp <command> [flags]``.

Exit codes: 0 on success, 1 on invalid input, 2 when ``compare`` finds the
solvers disagreeing.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time

from .graph import GraphError, read_graph, save_graph, validate
from .instances import (
    EXAMPLE_FILES,
    INSTANCE_IDS,
    InstanceError,
    example_bytes,
    instance,
    random_sparse_graph,
)
from .heap import QUEUES
from .solve import SOLVERS, MONITOR_CAVEAT, coalg_dijkstra, coalg_dijkstra_heap, valuation_to_dict
from .verify import (
    Analytic,
    FromGraph,
    Sampler,
    VerifyError,
    check_expansive,
    contraction_coalgebra,
    cross_check,
    sample_graph_for,
    witness_from_dict,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DISAGREE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 is reserved for disagreement here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _load(path):
    g = read_graph(path)
    problems = validate(g)
    if problems:
        raise GraphError("; ".join(str(p) for p in problems))
    return g


def _params(raw):
    """``--params`` as a JSON object or as ``key=value,key=value``."""
    if not raw:
        return {}
    raw = raw.strip()
    if raw.startswith("{"):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--params: invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("--params must be a JSON object")
        return doc
    out = {}
    for part in raw.split(","):
        if not part.strip():
            continue
        key, sep, val = part.partition("=")
        if not sep:
            raise UsageError(f"--params: expected key=value, got {part!r}")
        val = val.strip()
        try:
            out[key.strip()] = int(val)
        except ValueError:
            out[key.strip()] = val
    return out


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_solve(args):
    g = _load(args.graph)
    if args.algorithm == "kleene":
        res = SOLVERS["kleene"](g, max_iters=args.max_iters, tol=args.tol)
    elif args.algorithm == "dijkstra":
        res = coalg_dijkstra(g, monitor=args.monitor)
    else:
        res = coalg_dijkstra_heap(g, queue=args.queue)
    doc = valuation_to_dict(g, res, args.algorithm)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if args.monitor and args.algorithm != "dijkstra":
        print("note: --monitor only applies to the dijkstra algorithm", file=sys.stderr)
    elif args.monitor and not res.monitor:
        print(f"note: {MONITOR_CAVEAT}", file=sys.stderr)
    return EXIT_OK


def cmd_trace(args):
    g = _load(args.graph)
    res = coalg_dijkstra(g, want_trace=True)
    _emit(res.trace.render(show_active=args.show_active), args.out)
    return EXIT_OK


def cmd_compare(args):
    g = _load(args.graph)
    rep = cross_check(g, run_tree_height=None if args.run_tree_height < 0 else args.run_tree_height,
                      max_iters=args.max_iters, tol=args.tol, queue=args.queue)
    text = json.dumps(rep.to_dict(), indent=2) + "\n" if args.json else rep.render()
    _emit(text, args.out)
    return EXIT_DISAGREE if rep.disagreement else EXIT_OK


def _expansiveness(args, inst):
    if args.mode == "analytic":
        return check_expansive(inst, source=Analytic())
    if args.mode == "sample":
        return check_expansive(inst, depth=args.depth, source=Sampler(seed=args.seed, count=args.samples))
    g = _load(args.graph) if args.graph else sample_graph_for(inst)
    if g.instance.name != inst.name:
        raise UsageError(f"graph is for {g.instance.name}, not {inst.name}")
    return check_expansive(inst, depth=args.depth, source=FromGraph(g))


def cmd_check_expansive(args):
    inst = instance(args.instance, _params(args.params))
    rep = _expansiveness(args, inst)
    text = json.dumps(rep.to_dict(), indent=2) + "\n" if args.json else rep.summary() + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_counterexample(args):
    if args.witness:
        with open(args.witness) as fh:
            try:
                witness = witness_from_dict(json.load(fh))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise UsageError(f"bad witness file: {exc}") from exc
    else:
        if not args.instance:
            raise UsageError("give --witness FILE or --instance ID --search")
        inst = instance(args.instance, _params(args.params))
        rep = _expansiveness(args, inst)
        if rep.witness is None:
            print(f"no witness: {rep.summary()}", file=sys.stderr)
            return EXIT_INVALID
        witness = rep.witness
    if not witness.check():
        raise VerifyError("witness does not re-check")
    g = contraction_coalgebra(witness)
    data = save_graph(g).decode()
    report = f"witness: {witness.describe()}\n" + cross_check(g, run_tree_height=None).render()
    if args.out in (None, "-"):
        sys.stdout.write(data)
        sys.stderr.write(report)
    else:
        _emit(data, args.out)
        sys.stdout.write(report)
    return EXIT_OK


def cmd_examples(args):
    if args.list or not args.emit:
        for name in EXAMPLE_FILES:
            print(name)
        return EXIT_OK
    _emit(example_bytes(args.emit).decode(), args.out)
    return EXIT_OK


def cmd_bench(args):
    inst = instance(args.instance, _params(args.params))
    rng = random.Random(args.seed)
    g = random_sparse_graph(inst, args.v, args.e, rng)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance", "V", "E", "queue", "solver", "wall_ms", "iterations"])
        for solver in args.solvers.split(","):
            solver = solver.strip()
            if solver not in SOLVERS:
                raise UsageError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
            best, res = None, None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                if solver == "dijkstra-heap":
                    res = coalg_dijkstra_heap(g, queue=args.queue)
                else:
                    res = SOLVERS[solver](g)
                ms = (time.perf_counter() - t0) * 1000
                best = ms if best is None else min(best, ms)
            queue = args.queue if solver == "dijkstra-heap" else ""
            w.writerow([inst.name, g.V, g.E, queue, solver, f"{best:.3f}", res.iterations])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cspp", description="Shortest-path style fixed points on weighted graphs.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_, fn):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
        sp.add_argument("--out", "-o", help="write the main output here instead of stdout")
        return sp

    sp = add("solve", "compute the valuation of a graph file", cmd_solve)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--algorithm", choices=sorted(SOLVERS), default="dijkstra")
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--monitor", action="store_true", help="report applications that break expansiveness")
    sp.add_argument("--queue", choices=sorted(QUEUES), default="fib")

    sp = add("trace", "print the per-round table of the Dijkstra solver", cmd_trace)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--show-active", action="store_true", help="add the column of re-evaluated states")

    sp = add("compare", "run every solver and report disagreements (exit 2)", cmd_compare)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--run-tree-height", type=int, default=3, help="negative to skip the run-tree oracle")
    sp.add_argument("--max-iters", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--queue", choices=sorted(QUEUES), default="fib")
    sp.add_argument("--json", action="store_true")

    def expansive_flags(sp, mode_default):
        sp.add_argument("--params", help="JSON object or key=value,key=value")
        sp.add_argument("--mode", choices=["analytic", "sample", "from-graph"], default=mode_default)
        sp.add_argument("--depth", type=int, default=3)
        sp.add_argument("--samples", type=int, default=12, help="payloads drawn in sample mode")
        sp.add_argument("--graph", help="graph file for from-graph mode (default: bundled sample)")

    sp = add("check-expansive", "decide whether an instance's modality is expansive", cmd_check_expansive)
    sp.add_argument("--instance", required=True, choices=INSTANCE_IDS)
    expansive_flags(sp, "analytic")
    sp.add_argument("--json", action="store_true")

    sp = add("counterexample", "build a graph on which the Dijkstra solvers go wrong", cmd_counterexample)
    sp.add_argument("--witness", help="witness JSON file")
    sp.add_argument("--instance", choices=INSTANCE_IDS)
    sp.add_argument("--search", action="store_true", help="search the instance for a witness")
    expansive_flags(sp, "sample")

    sp = add("examples", "list or print the bundled graph files", cmd_examples)
    sp.add_argument("--emit", metavar="NAME", choices=sorted(EXAMPLE_FILES))
    sp.add_argument("--list", action="store_true")

    sp = add("bench", "time the solvers on a seeded random graph (CSV)", cmd_bench)
    sp.add_argument("--instance", default="spp", choices=INSTANCE_IDS)
    sp.add_argument("--params")
    sp.add_argument("--v", type=int, default=10_000)
    sp.add_argument("--e", type=int, default=50_000)
    sp.add_argument("--queue", choices=sorted(QUEUES), default="fib")
    sp.add_argument("--solvers", default="dijkstra,dijkstra-heap")
    sp.add_argument("--repeat", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "counterexample" and args.instance and not args.search and not args.witness:
        parser.error("counterexample: --instance needs --search")
    try:
        return args.fn(args)
    except (UsageError, GraphError, InstanceError, VerifyError, ValueError, OSError) as exc:
        print(f"cspp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
