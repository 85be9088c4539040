"""Command-line entry point.

Subcommands: enumerate, graph, verify, decompose, sample, test, hemmecke.
All reports are JSON (streams are JSON lines) and every run is deterministic
given its flags, seeds included.

Exit codes: 0 success, 1 failed check or module error, 2 usage error,
3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from math import comb
from pathlib import Path

from . import analysis, decomposition, enumeration, graphs, io, sampler, tables
from .errors import FiberGraphsError, SizeLimitExceededError

LONG_GATE_VERTEX_COUNT = 600  # connectivity sweeps above this need --long
HEMMECKE_MAX_K = 12
CONSTRAINED_TRIALS = 500


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- enumerate

def cmd_enumerate(args: argparse.Namespace) -> int:
    fiber = enumeration.enumerate_fiber(args.n, args.r, cap=args.cap)
    expected = enumeration.count_fiber(args.n, args.r)
    if len(fiber) != expected:
        raise FiberGraphsError(
            f"enumeration found {len(fiber)} tables but the counting oracle "
            f"says {expected}"
        )
    if args.out:
        text = io.fiber_to_csv(fiber) if args.format == "csv" else io.fiber_to_jsonl(fiber)
        Path(args.out).write_text(text)
    print(f"{len(fiber)} tables")
    return 0


# ---------------------------------------------------------------- graph

def cmd_graph(args: argparse.Namespace) -> int:
    fiber = enumeration.enumerate_fiber(args.n, args.r, cap=args.cap)
    graph = graphs.build_graph(fiber)
    target: graphs.FiberGraph | graphs.OrientedFiberGraph = graph
    if args.oriented:
        target = graphs.orient(graph, graphs.WeightVector.standard(args.n))
    rendered = graphs.export_graph(target, args.format)
    if args.out:
        Path(args.out).write_text(rendered)
        Path(args.out + ".vertices.json").write_text(graphs.vertex_map_json(graph))
    else:
        sys.stdout.write(rendered)
    print(
        f"{graph.vertex_count} vertices, {graph.edge_count} edges",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------- verify

CHECK_NAMES = (
    "degrees",
    "connmax",
    "maxdeg",
    "commonchoices",
    "connectivity",
    "liu",
    "diameter",
    "sink",
    "dag",
    "konig",
    "decomp-constrained",
)


class _VerifyContext:
    """Lazily built shared structures for the verify checks."""

    def __init__(self, n: int, r: int, cap: int, workers: int):
        self.n, self.r, self.cap, self.workers = n, r, cap, workers
        self._fiber = None
        self._graph = None
        self._oriented = None

    @property
    def fiber(self) -> enumeration.Fiber:
        if self._fiber is None:
            self._fiber = enumeration.enumerate_fiber(self.n, self.r, cap=self.cap)
        return self._fiber

    @property
    def graph(self) -> graphs.FiberGraph:
        if self._graph is None:
            self._graph = graphs.build_graph(self.fiber)
        return self._graph

    @property
    def oriented(self) -> graphs.OrientedFiberGraph:
        if self._oriented is None:
            self._oriented = graphs.orient(self.graph, graphs.WeightVector.standard(self.n))
        return self._oriented


def _check_degrees(ctx: _VerifyContext) -> dict:
    n, r = ctx.n, ctx.r
    floor = comb(n, 2)
    raised_floor = floor + n - 1
    degrees = ctx.graph.degrees()
    min_deg = min(degrees)
    pattern_ok = True
    others_ok = True
    for t, d in zip(ctx.fiber, degrees):
        if t.is_permutation_pattern():
            pattern_ok &= d == floor
        else:
            others_ok &= d >= raised_floor
    computed = {"min_degree": min_deg, "patterns_at_floor": pattern_ok, "others_raised": others_ok}
    expected = {"min_degree": floor, "patterns_at_floor": True, "others_raised": True}
    return {
        "expected": expected,
        "computed": computed,
        "pass": computed == expected,
        "hypothesis_met": True,
    }


def _check_connmax(ctx: _VerifyContext) -> dict:
    # removing the neighborhood of a minimum-degree pattern vertex must
    # disconnect it from the rest, witnessing kappa <= C(n,2)
    bound = comb(ctx.n, 2)
    graph = ctx.graph
    if graph.vertex_count <= bound + 1:
        return {
            "expected": {"upper_bound": bound},
            "computed": {"upper_bound_holds": True, "reason": "|V| <= bound + 1"},
            "pass": True,
            "hypothesis_met": True,
        }
    vid = ctx.fiber.index_of(tables.scaled_permutation(ctx.n, ctx.r, list(range(ctx.n))))
    cut = frozenset(graph.neighbor_lists()[vid])
    disconnects = not analysis._connected_after_removal(graph.neighbor_lists(), cut)
    return {
        "expected": {"cut_size": bound, "disconnects": True},
        "computed": {"cut_size": len(cut), "disconnects": disconnects},
        "pass": len(cut) == bound and disconnects,
        "hypothesis_met": True,
    }


def _check_maxdeg(ctx: _VerifyContext) -> dict:
    n, r = ctx.n, ctx.r
    bound = tables.max_degree_value(n, r)
    observed = max(ctx.graph.degrees())
    if bound.attained:
        ok = observed == bound.value
        expected = {"max_degree": bound.value, "attained": True}
    else:
        ok = observed < bound.value
        expected = {"strict_upper_bound": bound.value}
    return {
        "expected": expected,
        "computed": {"max_degree": observed, "attained": bound.attained},
        "pass": ok,
        "hypothesis_met": bound.attained,
    }


def _check_commonchoices(ctx: _VerifyContext) -> dict:
    floor = comb(ctx.n, 2)
    hypothesis = ctx.r > 2
    result = analysis.min_common_moves_over_close_pairs(ctx.graph)
    if result is None:
        return {
            "expected": None,
            "computed": {"pairs": 0},
            "pass": True,
            "hypothesis_met": hypothesis,
        }
    count, pair = result
    computed = {"min_common_moves": count, "pair": list(pair)}
    if not hypothesis:
        return {"expected": None, "computed": computed, "pass": True, "hypothesis_met": False}
    return {
        "expected": {"min_common_moves_at_least": floor},
        "computed": computed,
        "pass": count >= floor,
        "hypothesis_met": True,
    }


def _check_connectivity(ctx: _VerifyContext) -> dict:
    report = analysis.vertex_connectivity(ctx.graph, workers=ctx.workers)
    computed = {
        "kappa": report.kappa,
        "min_degree": report.min_degree,
        "conjecture_holds": report.conjecture_holds,
    }
    if ctx.r <= 2:
        return {"expected": None, "computed": computed, "pass": True, "hypothesis_met": False}
    expected = comb(ctx.n, 2)
    return {
        "expected": {"kappa": expected},
        "computed": computed,
        "pass": report.kappa == expected,
        "hypothesis_met": True,
    }


def _check_liu(ctx: _VerifyContext) -> dict:
    k = comb(ctx.n, 2)
    result = analysis.liu_check(ctx.graph, k, workers=ctx.workers)
    computed = {
        "min_disjoint_paths": result.min_value,
        "pair": list(result.min_pair) if result.min_pair else None,
    }
    if ctx.r <= 2:
        return {"expected": None, "computed": computed, "pass": True, "hypothesis_met": False}
    return {
        "expected": {"disjoint_paths_at_least": k},
        "computed": computed,
        "pass": result.passed,
        "hypothesis_met": True,
    }


def _check_diameter(ctx: _VerifyContext) -> dict:
    expected = (ctx.n - 1) * ctx.r
    diam = analysis.diameter(ctx.graph)
    if ctx.n >= 2:
        a, b = analysis.diameter_witness_pair(ctx.n, ctx.r)
        witness = analysis.distance_between(
            ctx.graph, ctx.fiber.index_of(a), ctx.fiber.index_of(b)
        )
    else:
        witness = 0
    return {
        "expected": {"diameter": expected, "witness_distance": expected},
        "computed": {"diameter": diam, "witness_distance": witness},
        "pass": diam == expected and witness == expected,
        "hypothesis_met": True,
    }


def _check_sink(ctx: _VerifyContext) -> dict:
    sinks = graphs.find_sinks(ctx.oriented)
    computed = {"sinks": sinks}
    ok = len(sinks) == 1
    expected: dict = {"unique_sink": True}
    if ctx.n >= 2 and ok:
        anti = tables.scaled_permutation(
            ctx.n, ctx.r, [ctx.n - 1 - i for i in range(ctx.n)]
        )
        computed["sink_is_antidiagonal"] = ctx.fiber[sinks[0]].entries == anti.entries
        if ctx.n == 3:
            expected["sink_is_antidiagonal"] = True
            ok = ok and computed["sink_is_antidiagonal"]
    return {"expected": expected, "computed": computed, "pass": ok, "hypothesis_met": True}


def _check_dag(ctx: _VerifyContext) -> dict:
    acyclic = graphs.is_acyclic(ctx.oriented)
    return {
        "expected": {"acyclic": True},
        "computed": {"acyclic": acyclic},
        "pass": acyclic,
        "hypothesis_met": True,
    }


def _check_konig(ctx: _VerifyContext) -> dict:
    failures = 0
    for t in ctx.fiber:
        if ctx.r == 0:
            continue
        dec = decomposition.decompose(t)
        if dec.resum().entries != t.entries:
            failures += 1
    return {
        "expected": {"failures": 0},
        "computed": {"tables": len(ctx.fiber), "failures": failures},
        "pass": failures == 0,
        "hypothesis_met": True,
    }


def _check_decomp_constrained(ctx: _VerifyContext) -> dict:
    if ctx.r == 0 or ctx.n < 1:
        return {
            "expected": {"failures": 0},
            "computed": {"trials": 0, "failures": 0},
            "pass": True,
            "hypothesis_met": True,
        }
    rng = random.Random(20_240_000 + ctx.n * 100 + ctx.r)
    failures = 0
    trials = CONSTRAINED_TRIALS
    fiber = ctx.fiber
    for _ in range(trials):
        t = fiber[rng.randrange(len(fiber))]
        k = rng.randint(0, ctx.r)
        budget = [row[:] for row in t.rows()]
        positions = []
        for _ in range(k):
            cells = [
                (i + 1, j + 1)
                for i in range(ctx.n)
                for j in range(ctx.n)
                if budget[i][j] > 0
            ]
            if not cells:
                break
            i, j = rng.choice(cells)
            budget[i - 1][j - 1] -= 1
            positions.append((i, j))
        dec = decomposition.decompose_constrained(t, positions)
        if dec.resum().entries != t.entries or not dec.satisfies_constraints():
            failures += 1
    return {
        "expected": {"failures": 0},
        "computed": {"trials": trials, "failures": failures},
        "pass": failures == 0,
        "hypothesis_met": True,
    }


_CHECKS = {
    "degrees": _check_degrees,
    "connmax": _check_connmax,
    "maxdeg": _check_maxdeg,
    "commonchoices": _check_commonchoices,
    "connectivity": _check_connectivity,
    "liu": _check_liu,
    "diameter": _check_diameter,
    "sink": _check_sink,
    "dag": _check_dag,
    "konig": _check_konig,
    "decomp-constrained": _check_decomp_constrained,
}

_EXPENSIVE_CHECKS = {"connectivity", "liu"}


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(CHECK_NAMES) if args.checks is None else args.checks.split(",")
    for name in names:
        if name not in _CHECKS:
            print(f"unknown check {name!r}; valid: {', '.join(CHECK_NAMES)}", file=sys.stderr)
            return 2
    ctx = _VerifyContext(args.n, args.r, args.cap, args.workers)
    vertex_count = enumeration.count_fiber(args.n, args.r)
    results = []
    overall = True
    for name in names:
        if (
            name in _EXPENSIVE_CHECKS
            and vertex_count > LONG_GATE_VERTEX_COUNT
            and not args.long
        ):
            results.append(
                {
                    "name": name,
                    "parameters": {"n": args.n, "r": args.r},
                    "skipped": True,
                    "reason": f"{vertex_count} vertices; rerun with --long",
                    "pass": True,
                }
            )
            continue
        start = time.perf_counter()
        outcome = _CHECKS[name](ctx)
        outcome["runtime_ms"] = round((time.perf_counter() - start) * 1000, 3)
        outcome["name"] = name
        outcome["parameters"] = {"n": args.n, "r": args.r}
        results.append(outcome)
        overall &= bool(outcome["pass"])
    suite = {"n": args.n, "r": args.r, "pass": overall, "results": results}
    _write_output(json.dumps(suite, indent=2) + "\n", args.out)
    return 0 if overall else 1


# ---------------------------------------------------------------- decompose

def cmd_decompose(args: argparse.Namespace) -> int:
    table = io.load_table(args.table)
    constraints = io.parse_constraints(args.constraints) if args.constraints else []
    if constraints:
        dec = decomposition.decompose_constrained(table, constraints)
    else:
        dec = decomposition.decompose(table)
    ok = dec.resum().entries == table.entries and dec.satisfies_constraints()
    payload = {
        "parts": [p.rows() for p in dec.parts],
        "constraints_satisfied": ok,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------- sample / test

def _walk_config(args: argparse.Namespace, target: str) -> sampler.WalkConfig:
    return sampler.WalkConfig(
        steps=args.steps,
        seed=args.seed,
        burn_in=args.burn_in,
        thinning=args.thin,
        target=sampler.Target(target),
    )


def cmd_sample(args: argparse.Namespace) -> int:
    table = io.load_table(args.table)
    config = _walk_config(args, args.target)
    state, samples = sampler.run_walk(table, config)
    lines = "".join(
        json.dumps({"rows": s.rows()}, separators=(",", ":")) + "\n" for s in samples
    )
    if args.emit:
        Path(args.emit).write_text(lines)
    else:
        sys.stdout.write(lines)
    summary = {
        "steps": state.step_index,
        "accepted": state.accepted_count,
        "samples": len(samples),
        "distinct_visited": state.visits.distinct_estimate(),
        "visit_count_approximate": state.visits.approximate,
    }
    print(json.dumps(summary, separators=(",", ":")), file=sys.stderr)
    return 0


def cmd_test(args: argparse.Namespace) -> int:
    rows = io.load_rows(args.table)
    observed = sampler.as_equal_margin_table(rows)
    result = sampler.exact_test(observed, _walk_config(args, "hypergeometric"))
    payload = {
        "statistic": args.statistic,
        "observed_statistic": result.observed_statistic,
        "p_value_estimate": result.p_value_estimate,
        "standard_error": result.standard_error,
        "samples_used": result.samples_used,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


# ---------------------------------------------------------------- hemmecke

def cmd_hemmecke(args: argparse.Namespace) -> int:
    if not 1 <= args.k <= HEMMECKE_MAX_K:
        raise SizeLimitExceededError(HEMMECKE_MAX_K, context=f"hemmecke k={args.k}")
    adjacency, report = analysis.hemmecke_graph(args.k)
    payload = {
        "k": args.k,
        "vertices": len(adjacency),
        "min_degree": report.min_degree,
        "kappa": report.kappa,
        "conjecture_holds": report.conjecture_holds,
        "articulation_vertices": analysis.articulation_vertices(adjacency),
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibergraphs",
        description="Fiber graphs of equal-margin contingency tables: "
        "enumeration, verification, decomposition, and sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the main output to this path")
    common.add_argument(
        "--cap", type=int, default=enumeration.DEFAULT_CAP,
        help="vertex-count resource guard (default %(default)s)",
    )
    common.add_argument(
        "--workers", type=int, default=1,
        help="worker processes for parallelizable sweeps (default 1)",
    )

    p = sub.add_parser("enumerate", parents=[common], help="enumerate a fiber")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("graph", parents=[common], help="build and export a fiber graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--format", choices=("edge-list", "dot"), default="edge-list")
    p.add_argument("--oriented", action="store_true", help="orient edges by the standard weight")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", parents=[common], help="run the theorem-instance checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument(
        "--checks", help=f"comma-separated subset of: {','.join(CHECK_NAMES)}"
    )
    p.add_argument("--long", action="store_true", help="run expensive instances")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="decompose a table into permutation parts")
    p.add_argument("--table", required=True, help="table file (.json or .csv)")
    p.add_argument("--constraints", help="JSON array of [i,j] 1-based pairs, inline or a file path")
    p.set_defaults(func=cmd_decompose)

    walk = argparse.ArgumentParser(add_help=False)
    walk.add_argument("--table", required=True, help="start table file (.json or .csv)")
    walk.add_argument("--steps", type=int, required=True)
    walk.add_argument("--burn-in", dest="burn_in", type=int, default=0)
    walk.add_argument("--thin", type=int, default=1)
    walk.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("sample", parents=[common, walk], help="random walk on a fiber")
    p.add_argument("--target", choices=("uniform", "hypergeometric"), default="uniform")
    p.add_argument("--emit", help="write the sample stream (JSON lines) to this path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("test", parents=[common, walk], help="Monte Carlo exact test")
    p.add_argument("--statistic", choices=("chisq",), default="chisq")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("hemmecke", parents=[common], help="double-cube counterexample report")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_hemmecke)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FiberGraphsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
