"""tempoc: temporal edge cover and temporal matching solvers.

Subcommands:
  solve   solve an instance and print a JSON run result
  gen     generate random, reduction and augmented instances
  verify  check a solution file against an instance
  decomp  build and write a (nice) tree decomposition
  bench   compare every method on a directory of instances

solve prints one JSON object with the keys
  instance, problem, method, value, solution, wall_time, n, m, tau, width,
  bound_factor
where solution is the --out path (or null), width is the decomposition
width for the fpt method (else null) and bound_factor the proven
approximation factor for greedy and snapshot (else null).

Exit codes: 0 success, 1 solution rejected by verify, 2 invalid flags,
3 parse or input error, 4 search budget exceeded.
"""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from approx import greedy_temporal_edge_cover, snapshot_matching_approx
from config import LOG_LEVELS, setup_logging
from exact import BudgetExceeded, brute_max_matching, brute_min_edge_cover, search_budget
from formats import (ParseError, parse_cnf, parse_decomposition, parse_set_system,
                     parse_solution, parse_temporal_graph, serialize_decomposition,
                     serialize_marks, serialize_solution, serialize_temporal_graph)
from fpt_dp import CoverProgram, DPError, MatchingProgram, dump_tables, solve as run_program
from lexer import LexicalError
from reductions import (EXAMPLE_FORMULA, Cnf22Formula, GadgetInstance, ReductionError,
                        augment_labels, random_temporal_graph, reduce_sat_to_cover,
                        reduce_sat_to_matching, reduce_setcover_inapprox,
                        reduce_setcover_to_tree_cover, reduce_setpacking_to_star_matching)
from static_alg import SetSystemError
from temporal_graph import (GraphError, SolutionKind, TemporalGraph, verify_edge_cover,
                            verify_matching)
from treedec import (BuildMode, DecompositionError, NiceTreeDecomposition,
                     build_tree_decomposition, to_nice, validate_decomposition,
                     validate_nice, width)

logger = logging.getLogger('tempoc')

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4

INSTANCE_SUFFIX = '.tg'

METHODS = {
    'cover': ('brute', 'fpt', 'greedy'),
    'matching': ('brute', 'fpt', 'snapshot'),
}

INPUT_ERRORS = (ParseError, LexicalError, GraphError, SetSystemError, DecompositionError,
                DPError, ReductionError, OSError)


class UsageError(Exception):
    """Invalid flag values or combinations."""
    pass


@dataclass
class RunResult:
    instance: str
    problem: str
    method: str
    value: int
    solution: Optional[str]
    wall_time: float
    n: int
    m: int
    tau: int
    width: Optional[int] = None
    bound_factor: Optional[str] = None


def read_text(path: str) -> str:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: not UTF-8 text (byte {e.start})") from e


def write_text(path: Optional[str], text: str):
    """Write to path, or to stdout when path is None or '-'."""
    if path is None or path == '-':
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    logger.info("wrote %s", path)


def instance_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def nice_decomposition(G: TemporalGraph, decomp_path: Optional[str] = None,
                       mode: str = 'heuristic') -> NiceTreeDecomposition:
    """Nice decomposition from a file (validated) or built from the graph."""
    if decomp_path is None:
        return to_nice(build_tree_decomposition(G.base, BuildMode(mode)))

    D = parse_decomposition(read_text(decomp_path))
    if isinstance(D, NiceTreeDecomposition):
        report = validate_nice(G.base, D)
    else:
        report = validate_decomposition(G.base, D)
    if not report.valid:
        raise DecompositionError(f"{decomp_path}: {report.violations[0]}")
    return D if isinstance(D, NiceTreeDecomposition) else to_nice(D)


def solve_instance(G: TemporalGraph, problem: str, method: str, decomp: Optional[str] = None,
                   decomp_mode: str = 'heuristic', time_limit: Optional[float] = None,
                   dump_path: Optional[str] = None):
    """Run one method; returns (solution, width, bound factor)."""
    if method not in METHODS[problem]:
        raise UsageError(f"method '{method}' does not solve problem '{problem}'")
    if dump_path is not None and method != 'fpt':
        raise UsageError("--dump-dp needs --method fpt")

    if method == 'brute':
        oracle = brute_min_edge_cover if problem == 'cover' else brute_max_matching
        _, solution = oracle(G, search_budget(time_limit))
        return solution, None, None
    if method == 'fpt':
        D = nice_decomposition(G, decomp, decomp_mode)
        program = CoverProgram(G, D) if problem == 'cover' else MatchingProgram(G, D)
        result = run_program(program)
        if dump_path is not None:
            write_text(dump_path, dump_tables(result.tables))
        return result.solution, width(D), None
    report = greedy_temporal_edge_cover(G) if method == 'greedy' else snapshot_matching_approx(G)
    return report.solution, None, str(report.bound_factor)


def verified(G: TemporalGraph, solution) -> bool:
    if solution.kind == SolutionKind.COVER:
        return verify_edge_cover(G, solution).ok
    return verify_matching(G, solution).ok


def cmd_solve(args) -> int:
    G = parse_temporal_graph(read_text(args.input))
    start = time.perf_counter()
    solution, tw, factor = solve_instance(G, args.problem, args.method, args.decomp,
                                          args.decomp_mode, args.time_limit, args.dump_dp)
    elapsed = time.perf_counter() - start

    if not verified(G, solution):
        logger.error("%s solution failed re-verification", args.method)
        return EXIT_REJECTED
    if args.out is not None:
        write_text(args.out, serialize_solution(solution))

    result = RunResult(instance_name(args.input), args.problem, args.method, solution.size,
                       args.out, round(elapsed, 6), G.n, len(G.edges), G.tau, tw, factor)
    print(json.dumps(asdict(result)))
    return EXIT_OK


def load_formula(path: Optional[str]) -> Cnf22Formula:
    if path is None:
        return EXAMPLE_FORMULA
    n, clauses = parse_cnf(read_text(path))
    return Cnf22Formula.of(n, clauses)


def write_gadget(instance: GadgetInstance, args):
    """Instance to --out, sidecar to --marks-out or <out>.marks; with the
    instance on stdout and no --marks-out the sidecar goes to stderr."""
    write_text(args.out, serialize_temporal_graph(instance.graph))
    marks = serialize_marks(instance.kind.value, instance.threshold, instance.marks)
    sidecar = args.marks_out
    if sidecar is None and args.out not in (None, '-'):
        sidecar = args.out + '.marks'
    if sidecar is None:
        sys.stderr.write(marks)
    else:
        write_text(sidecar, marks)
    logger.info("%s instance, threshold %d", instance.kind.value, instance.threshold)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == 'random':
        try:
            G = random_temporal_graph(args.n, args.p, args.tau, args.q, args.seed)
        except ReductionError as e:
            raise UsageError(str(e)) from e
        write_text(args.out, serialize_temporal_graph(G))
    elif kind == 'augment':
        if args.input is None:
            raise UsageError("gen augment needs --in")
        G = augment_labels(parse_temporal_graph(read_text(args.input)))
        write_text(args.out, serialize_temporal_graph(G))
    elif kind in ('sat-cover', 'sat-matching'):
        F = load_formula(args.formula)
        reduce = reduce_sat_to_cover if kind == 'sat-cover' else reduce_sat_to_matching
        write_gadget(reduce(F), args)
    else:
        if args.sets is None:
            raise UsageError(f"gen {kind} needs --sets")
        system = parse_set_system(read_text(args.sets))
        if kind == 'inapprox':
            instance = reduce_setcover_inapprox(system, args.k)
        elif args.k is None:
            raise UsageError(f"gen {kind} needs --k")
        elif kind == 'setcover-tree':
            instance = reduce_setcover_to_tree_cover(system, args.k)
        else:
            instance = reduce_setpacking_to_star_matching(system, args.k)
        write_gadget(instance, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    G = parse_temporal_graph(read_text(args.input))
    solution = parse_solution(read_text(args.solution))
    if args.problem is not None and solution.kind.value != args.problem:
        raise UsageError(f"solution is a {solution.kind.value}, not a {args.problem}")

    if solution.kind == SolutionKind.COVER:
        report = verify_edge_cover(G, solution)
        details = {'uncovered': [[tv.v, tv.t] for tv in report.uncovered]}
    else:
        report = verify_matching(G, solution)
        details = {'conflicts': [[list(e), list(f)] for e, f in report.conflicts]}
    print(json.dumps({'ok': report.ok, 'kind': solution.kind.value,
                      'size': solution.size, **details}))
    return EXIT_OK if report.ok else EXIT_REJECTED


def cmd_decomp(args) -> int:
    G = parse_temporal_graph(read_text(args.input))
    D = build_tree_decomposition(G.base, BuildMode(args.mode))
    if args.nice:
        D = to_nice(D)
    report = validate_nice(G.base, D) if args.nice else validate_decomposition(G.base, D)
    if args.out is not None:
        write_text(args.out, serialize_decomposition(D))
    print(json.dumps({'instance': instance_name(args.input), 'width': width(D),
                      'nodes': len(D.bags), 'nice': args.nice, 'valid': report.valid}))
    return EXIT_OK


def bench_instance(path: str, time_limit: Optional[float] = None) -> List[Dict]:
    """Every method on one instance; ratios are against brute force, as
    value/opt for cover and opt/value for matching."""
    G = parse_temporal_graph(read_text(path))
    rows = []
    for problem, methods in METHODS.items():
        optimum = None
        for method in methods:
            start = time.perf_counter()
            try:
                solution, _, _ = solve_instance(G, problem, method, time_limit=time_limit)
            except BudgetExceeded:
                rows.append({'instance': instance_name(path), 'problem': problem,
                             'method': method, 'value': None, 'ratio': None, 'time': None})
                continue
            elapsed = time.perf_counter() - start
            value = solution.size
            if method == 'brute':
                optimum = value
            ratio = None
            if optimum is not None and value and optimum:
                ratio = value / optimum if problem == 'cover' else optimum / value
            elif optimum == 0 and value == 0:
                ratio = 1.0
            rows.append({'instance': instance_name(path), 'problem': problem,
                         'method': method, 'value': value, 'ratio': ratio,
                         'time': round(elapsed, 6)})
    return rows


def cmd_bench(args) -> int:
    paths = sorted(os.path.join(args.dir, name) for name in os.listdir(args.dir)
                   if name.endswith(INSTANCE_SUFFIX))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(bench_instance, paths, [args.time_limit] * len(paths)))
    else:
        results = [bench_instance(path, args.time_limit) for path in paths]
    rows = [row for per_instance in results for row in per_instance]

    if args.json:
        print(json.dumps(rows, indent=2))
        return EXIT_OK
    print(f"{'instance':<20} {'problem':<9} {'method':<9} {'value':>6} {'ratio':>7} {'time':>10}")
    for row in rows:
        value = '-' if row['value'] is None else row['value']
        ratio = '-' if row['ratio'] is None else f"{row['ratio']:.3f}"
        spent = '-' if row['time'] is None else f"{row['time']:.4f}"
        print(f"{row['instance']:<20} {row['problem']:<9} {row['method']:<9} "
              f"{value:>6} {ratio:>7} {spent:>10}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='tempoc', description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--log-level', default='WARNING', choices=LOG_LEVELS)
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='solve an instance, print a JSON run result')
    solve.add_argument('--problem', required=True, choices=sorted(METHODS))
    solve.add_argument('--method', required=True, choices=['brute', 'fpt', 'greedy', 'snapshot'])
    solve.add_argument('--in', dest='input', required=True, help='instance file')
    solve.add_argument('--decomp', help='decomposition file for --method fpt')
    solve.add_argument('--decomp-mode', default='heuristic', choices=[m.value for m in BuildMode])
    solve.add_argument('--out', help='write the solution here')
    solve.add_argument('--dump-dp', help='write every DP table entry here')
    solve.add_argument('--time-limit', type=float, help='seconds for branch-and-bound')
    solve.set_defaults(handler=cmd_solve)

    gen = sub.add_parser('gen', help='generate an instance')
    gen.add_argument('kind', choices=['random', 'sat-cover', 'sat-matching', 'setcover-tree',
                                      'setpacking-star', 'inapprox', 'augment'])
    gen.add_argument('--n', type=int, default=6)
    gen.add_argument('--p', type=float, default=0.5)
    gen.add_argument('--tau', type=int, default=2)
    gen.add_argument('--q', type=float, default=0.5)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--formula', help='DIMACS CNF file (default: bundled 3-variable formula)')
    gen.add_argument('--sets', help='set-system file')
    gen.add_argument('--k', type=int)
    gen.add_argument('--in', dest='input', help='instance to augment')
    gen.add_argument('--out', help='instance file (default stdout)')
    gen.add_argument('--marks-out', help='gadget sidecar (default <out>.marks)')
    gen.set_defaults(handler=cmd_gen)

    verify = sub.add_parser('verify', help='check a solution')
    verify.add_argument('--problem', choices=sorted(METHODS))
    verify.add_argument('--in', dest='input', required=True)
    verify.add_argument('--solution', required=True)
    verify.set_defaults(handler=cmd_verify)

    decomp = sub.add_parser('decomp', help='write a tree decomposition')
    decomp.add_argument('--in', dest='input', required=True)
    decomp.add_argument('--mode', default='heuristic', choices=[m.value for m in BuildMode])
    decomp.add_argument('--nice', action='store_true')
    decomp.add_argument('--out', help='decomposition file')
    decomp.set_defaults(handler=cmd_decomp)

    bench = sub.add_parser('bench', help='compare methods on a directory')
    bench.add_argument('--dir', required=True)
    bench.add_argument('--jobs', type=int, default=1)
    bench.add_argument('--time-limit', type=float)
    bench.add_argument('--json', action='store_true')
    bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    setup_logging(args.log_level)

    try:
        return args.handler(args)
    except (UsageError, ValueError) as e:
        print(f"tempoc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"tempoc: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except INPUT_ERRORS as e:
        print(f"tempoc: input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
