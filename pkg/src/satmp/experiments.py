"""Instance corpora and the batch benchmark behind ``satmp bench``."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .formula import CnfFormula, SolveResult, Status, generate_random_ksat
from .mp_machine import MpRunConfig, mp_run
from .rng import derive_seed
from .solvers import dpll, gsat, walksat_classic, walksat_paper_variant

GROUND_TRUTH_MAX_VARS = 60
SOLVERS = ("walksat-paper", "mp", "walksat", "gsat")


@dataclass(frozen=True)
class Instance:
    id: str
    formula: CnfFormula
    seed: int
    n: int
    m: int
    k: int


def random_corpus(count: int, seed: int, n_range=(5, 20), ratio_range=(3.0, 5.0),
                  k: int = 3) -> list[Instance]:
    """Random k-SAT with n and the clause/variable ratio drawn per instance."""
    out = []
    for i in range(count):
        s = derive_seed(seed, i)
        rng = np.random.default_rng(s)
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(round(n * rng.uniform(*ratio_range)))
        out.append(Instance(f"rand-{i:04d}", generate_random_ksat(n, m, k, s), s, n, m, k))
    return out


def dpll_unsat_corpus(count: int, seed: int, n: int = 10, m: int = 60,
                      k: int = 3) -> list[Instance]:
    """First ``count`` random instances that DPLL certifies unsatisfiable."""
    out = []
    i = 0
    while len(out) < count:
        s = derive_seed(seed, i)
        f = generate_random_ksat(n, m, k, s)
        if dpll(f)[0].status is Status.UNSAT:
            out.append(Instance(f"unsat-{i:04d}", f, s, n, m, k))
        i += 1
    return out


# ---------------------------------------------------------------- bench


@dataclass(frozen=True)
class BenchParams:
    max_flips: int = 10_000
    max_iterations: int = 10_001
    noise_p: float = 0.5
    max_tries: int = 10
    dim: int = 8
    timing: bool = True


def run_solver(name: str, formula: CnfFormula, seed: int, p: BenchParams) -> SolveResult:
    if name == "walksat-paper":
        return walksat_paper_variant(formula, seed, p.max_flips)[0]
    if name == "mp":
        cfg = MpRunConfig(max_iterations=p.max_iterations, dim=p.dim, seed=seed)
        return mp_run(formula, cfg, trace=False)[0]
    if name == "walksat":
        return walksat_classic(formula, seed, p.noise_p, p.max_flips)[0]
    if name == "gsat":
        return gsat(formula, seed, p.max_flips, p.max_tries)
    raise ValueError(f"unknown solver {name!r}")


def bench_instance(inst: Instance, solvers, p: BenchParams) -> dict:
    row = {"instance_id": inst.id, "n": inst.n, "m": inst.m, "k": inst.k, "seed": inst.seed}
    if inst.n <= GROUND_TRUTH_MAX_VARS:
        row["ground_truth"] = dpll(inst.formula)[0].status.value
    else:
        row["ground_truth"] = ""
    for name in solvers:
        res = run_solver(name, inst.formula, inst.seed, p)
        row[f"{name}_status"] = res.status.value
        row[f"{name}_flips"] = res.stats.flips
        if p.timing:
            row[f"{name}_time"] = round(res.stats.wall_time, 6)
    return row


def _bench_job(args):
    return bench_instance(*args)


def sweep(n_values, m_values, k: int, seeds: int, base_seed: int) -> list[Instance]:
    out = []
    for n in n_values:
        for m in m_values:
            for s in range(base_seed, base_seed + seeds):
                out.append(Instance(f"n{n}-m{m}-k{k}-s{s}", generate_random_ksat(n, m, k, s),
                                    s, n, m, k))
    return out


def run_bench(instances: list[Instance], solvers=SOLVERS, params: BenchParams = BenchParams(),
              jobs: int = 1) -> tuple[list[dict], list[dict]]:
    """Per-instance rows (in instance order) and per-(n, m, k) aggregates."""
    work = [(inst, tuple(solvers), params) for inst in instances]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_bench_job, work))
    else:
        rows = [_bench_job(w) for w in work]
    return rows, aggregate(rows, solvers)


def aggregate(rows: list[dict], solvers) -> list[dict]:
    points: dict[tuple, list[dict]] = {}
    for r in rows:
        points.setdefault((r["n"], r["m"], r["k"]), []).append(r)
    out = []
    for (n, m, k), rs in points.items():
        sat = [r for r in rs if r["ground_truth"] == "SAT"]
        unsat = [r for r in rs if r["ground_truth"] == "UNSAT"]
        agg = {"n": n, "m": m, "k": k, "instances": len(rs),
               "ground_truth_sat": len(sat), "ground_truth_unsat": len(unsat)}
        for name in solvers:
            solved = [r for r in sat if r[f"{name}_status"] == "SAT"]
            agg[f"{name}_solve_rate"] = round(len(solved) / len(sat), 6) if sat else None
            agg[f"{name}_sat_claimed_on_unsat"] = sum(r[f"{name}_status"] == "SAT" for r in unsat)
            agg[f"{name}_unsat_certified"] = sum(r[f"{name}_status"] == "UNSAT" for r in rs)
            agg[f"{name}_median_flips"] = (statistics.median(r[f"{name}_flips"] for r in solved)
                                           if solved else None)
        out.append(agg)
    return out


def row_fields(solvers, timing: bool) -> list[str]:
    fields = ["instance_id", "n", "m", "k", "seed", "ground_truth"]
    for name in solvers:
        fields += [f"{name}_status", f"{name}_flips"]
        if timing:
            fields.append(f"{name}_time")
    return fields


def rows_to_csv(rows: list[dict], solvers, timing: bool) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=row_fields(solvers, timing), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def bench_json(rows, aggregates, config: dict) -> str:
    return json.dumps({"config": config, "rows": rows, "aggregates": aggregates}, indent=1)
