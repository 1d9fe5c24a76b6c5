"""Command-line harness.

Exit codes: 10 SAT, 20 UNSAT, 0 UNKNOWN (solve/simulate); 0 success, 1 failure
or divergence (other commands); 1 for any usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .equivalence import run_coupled
from .experiments import (SOLVERS, BenchParams, bench_json, row_fields, rows_to_csv, run_bench,
                          sweep)
from .formula import (CnfFormula, Literal, SolveResult, brute_force_sat, emit_dimacs,
                      generate_random_ksat, parse_dimacs)
from .mp_machine import DEFAULT_DIM, MpRunConfig, mp_run
from .rng import derive_seed
from .solvers import (count_graph_reconfigurations, dpll, gsat, walksat_classic,
                      walksat_paper_variant)

EXIT_ERROR = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser, steps_default: int):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-K", "--max-steps", type=int, default=steps_default,
                   help="flip / iteration budget")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM, help="embedding dimension")
    p.add_argument("--format", choices=("human", "json", "csv"), default="human")
    p.add_argument("--trace", type=Path, help="write a JSON-lines trace here")
    p.add_argument("--no-timing", action="store_true", help="omit wall-time fields")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="satmp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write random k-SAT instances as DIMACS files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", type=Path, default=Path("."))

    s = sub.add_parser("solve", help="solve one DIMACS file")
    s.add_argument("file", help="DIMACS file or - for standard input")
    s.add_argument("--solver", choices=("walksat", "walksat-paper", "gsat", "dpll", "brute", "mp"),
                   default="dpll")
    s.add_argument("--noise", type=float, default=0.5)
    s.add_argument("--max-tries", type=int, default=10)
    _common(s, 100_000)

    sim = sub.add_parser("simulate", help="run the message-passing machine")
    sim.add_argument("file")
    _common(sim, 100_000)

    e = sub.add_parser("equiv", help="coupled MP-machine vs WalkSAT check")
    e.add_argument("file", nargs="?", help="DIMACS file or -; omit with --random")
    e.add_argument("--random", type=_int_list, metavar="N,M,K",
                   help="check --count generated instances instead of a file")
    e.add_argument("--count", type=int, default=1)
    e.add_argument("--draw-levels", type=int, help="quantise draws to force ties")
    e.add_argument("--inject-fault", choices=("tie-break",),
                   help="test hook: the machine breaks ties toward the highest literal id")
    _common(e, 1000)

    d = sub.add_parser("demo-obs1", help="DPLL graph reconfigurations vs the static MP graph")
    d.add_argument("file")
    _common(d, 1000)

    b = sub.add_parser("bench", help="batch experiment over a generator sweep")
    b.add_argument("--n", type=_int_list, required=True, help="comma-separated variable counts")
    b.add_argument("--m", type=_int_list, required=True, help="comma-separated clause counts")
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--seeds", type=int, default=10, help="seeds per parameter point")
    b.add_argument("--solvers", type=lambda t: [x for x in t.split(",") if x],
                   default=list(SOLVERS))
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", type=Path, required=True, help="output directory")
    b.add_argument("--noise", type=float, default=0.5)
    _common(b, 10_000)
    return p


def read_formula(path: str) -> CnfFormula:
    if path == "-":
        return parse_dimacs(sys.stdin.buffer.read())
    return parse_dimacs(Path(path).read_bytes())


def _result_dict(solver: str, res: SolveResult, timing: bool) -> dict:
    out = {"solver": solver, "status": res.status.value,
           "assignment": res.assignment.to_dimacs() if res.assignment else None,
           "flips": res.stats.flips, "decisions": res.stats.decisions,
           "iterations": res.stats.iterations}
    if timing:
        out["wall_time"] = res.stats.wall_time
    return out


def _print_result(solver: str, res: SolveResult, fmt: str, timing: bool):
    rec = _result_dict(solver, res, timing)
    if fmt == "json":
        print(json.dumps(rec))
    elif fmt == "csv":
        keys = list(rec)
        print(",".join(keys))
        print(",".join("" if rec[k] is None else
                       " ".join(map(str, rec[k])) if isinstance(rec[k], list) else str(rec[k])
                       for k in keys))
    else:
        print(res.status.value)
        if res.assignment is not None:
            print("v " + " ".join(map(str, res.assignment.to_dimacs())) + " 0")
        stats = f"c solver={solver} flips={res.stats.flips} decisions={res.stats.decisions} " \
                f"iterations={res.stats.iterations}"
        if timing:
            stats += f" time={res.stats.wall_time:.6f}s"
        print(stats)


def cmd_gen(args) -> int:
    if not (1 <= args.k <= args.n) or args.m < 0 or args.count < 0:
        raise UsageError(f"need n >= k >= 1, m >= 0, count >= 0 (n={args.n}, k={args.k})")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        f = generate_random_ksat(args.n, args.m, args.k, derive_seed(args.seed, i))
        name = f"rand_n{args.n}_m{args.m}_k{args.k}_s{args.seed}_{i:04d}.cnf"
        (args.out_dir / name).write_text(emit_dimacs(f))
    return 0


def _write_trace(path: Path | None, lines: str):
    if path is not None:
        path.write_text(lines)


def cmd_solve(args) -> int:
    f = read_formula(args.file)
    solver = args.solver
    trace_lines = ""
    if solver == "dpll":
        res, tr = dpll(f)
        trace_lines = "".join(json.dumps({"kind": e.kind, "literal": e.literal,
                                          "fingerprint": e.fingerprint.digest}) + "\n"
                              for e in tr.events)
    elif solver == "brute":
        res = brute_force_sat(f)
    elif solver == "walksat-paper":
        res, tr = walksat_paper_variant(f, args.seed, args.max_steps)
        trace_lines = _flip_trace_jsonl(tr)
    elif solver == "walksat":
        res, tr = walksat_classic(f, args.seed, args.noise, args.max_steps)
        trace_lines = _flip_trace_jsonl(tr)
    elif solver == "gsat":
        res = gsat(f, args.seed, args.max_steps, args.max_tries)
    else:
        res, tr = mp_run(f, MpRunConfig(args.max_steps, args.dim, args.seed),
                         trace=args.trace is not None)
        trace_lines = tr.to_jsonl()
    _write_trace(args.trace, trace_lines)
    _print_result(solver, res, args.format, not args.no_timing)
    return res.exit_code


def _flip_trace_jsonl(tr) -> str:
    return "".join(json.dumps({"k": s.k, "flipped_var": s.var,
                               "candidate_literals": [Literal.from_node_id(v).to_dimacs()
                                                      for v in sorted(s.candidates)],
                               "assignment": s.assignment.bits}) + "\n" for s in tr.steps)


def cmd_simulate(args) -> int:
    f = read_formula(args.file)
    res, tr = mp_run(f, MpRunConfig(args.max_steps, args.dim, args.seed), trace=True)
    _write_trace(args.trace, tr.to_jsonl())
    _print_result("mp", res, args.format, not args.no_timing)
    return res.exit_code


def cmd_equiv(args) -> int:
    if (args.file is None) == (args.random is None):
        raise UsageError("give exactly one of a DIMACS file or --random N,M,K")
    kwargs = dict(dim=args.dim, draw_levels=args.draw_levels,
                  mp_tie_break="highest" if args.inject_fault == "tie-break" else "lowest")
    if args.file is not None:
        rep = run_coupled(read_formula(args.file), args.seed, args.max_steps, **kwargs)
        _write_trace(args.trace, rep.to_json() + "\n")
        print(rep.to_json())
        return 0 if rep.matched else 1
    if len(args.random) != 3:
        raise UsageError("--random takes N,M,K")
    n, m, k = args.random
    if not 1 <= k <= n:
        raise UsageError("--random needs N >= K >= 1")
    reports = []
    for i in range(args.count):
        s = derive_seed(args.seed, i)
        reports.append(run_coupled(generate_random_ksat(n, m, k, s), s, args.max_steps, **kwargs))
    matched = sum(r.matched for r in reports)
    summary = {"instances": len(reports), "matched": matched,
               "reports": [r.to_dict() for r in reports]}
    _write_trace(args.trace, "".join(r.to_json() + "\n" for r in reports))
    print(json.dumps(summary))
    return 0 if matched == len(reports) else 1


def cmd_demo_obs1(args) -> int:
    f = read_formula(args.file)
    dres, dtrace = dpll(f)
    mres, mtrace = mp_run(f, MpRunConfig(args.max_steps, args.dim, args.seed), trace=True)
    rec = {"dpll_status": dres.status.value,
           "dpll_events": len(dtrace.events),
           "dpll_reconfigurations": count_graph_reconfigurations(dtrace),
           "mp_status": mres.status.value,
           "mp_iterations": len(mtrace),
           "mp_reconfigurations": count_graph_reconfigurations(mtrace)}
    if args.format == "json":
        print(json.dumps(rec))
    else:
        print(f"DPLL: {rec['dpll_status']}, {rec['dpll_events']} events, "
              f"{rec['dpll_reconfigurations']} graph reconfigurations")
        print(f"MP machine: {rec['mp_status']}, {rec['mp_iterations']} iterations, "
              f"{rec['mp_reconfigurations']} graph reconfigurations")
    return 0


def cmd_bench(args) -> int:
    unknown = [s for s in args.solvers if s not in SOLVERS]
    if unknown:
        raise UsageError(f"unknown solvers {unknown}; choose from {list(SOLVERS)}")
    for n in args.n:
        if not 1 <= args.k <= n:
            raise UsageError(f"need n >= k >= 1 (n={n}, k={args.k})")
    timing = not args.no_timing
    params = BenchParams(max_flips=args.max_steps, max_iterations=args.max_steps + 1,
                         noise_p=args.noise, dim=args.dim, timing=timing)
    instances = sweep(args.n, args.m, args.k, args.seeds, args.seed)
    rows, aggs = run_bench(instances, args.solvers, params, args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "bench.csv").write_text(rows_to_csv(rows, args.solvers, timing))
    config = {"n": args.n, "m": args.m, "k": args.k, "seeds": args.seeds, "seed": args.seed,
              "solvers": args.solvers, "max_steps": args.max_steps, "dim": args.dim,
              "noise": args.noise, "columns": row_fields(args.solvers, timing)}
    (args.out / "bench.json").write_text(bench_json(rows, aggs, config))
    if args.format == "json":
        print(json.dumps(aggs))
    else:
        for a in aggs:
            print(json.dumps(a))
    return 0


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "simulate": cmd_simulate, "equiv": cmd_equiv,
            "demo-obs1": cmd_demo_obs1, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, UsageError, OSError) as exc:
        print(f"satmp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
