"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line (visible even without
``-s``) before asserting, so ``pytest tests/test_acceptance.py`` doubles as
the acceptance report.
"""

import itertools
import json
import random

import numpy as np
import pytest

from satmp.cli import main
from satmp.equivalence import run_coupled
from satmp.experiments import dpll_unsat_corpus, random_corpus
from satmp.formula import (CnfFormula, Status, brute_force_sat, emit_dimacs, evaluate,
                           generate_random_ksat, parse_dimacs, phi1, unsat_clauses)
from satmp.mp_machine import MpMachine, MpRunConfig, decode_assignment, mp_run
from satmp.rng import derive_seed
from satmp.solvers import dpll, walksat_paper_variant

from .conftest import edge_case_files

pytestmark = pytest.mark.slow

CORPUS_SEED = 20240611
HORIZON = 1000


def verdict(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def corpus():
    return [("phi1", phi1(), 7)] + [(i.id, i.formula, i.seed)
                                    for i in random_corpus(500, CORPUS_SEED)]


@pytest.fixture(scope="module")
def unsat_corpus():
    return dpll_unsat_corpus(100, CORPUS_SEED + 1, n=10, m=60)


@pytest.fixture(scope="module")
def sat_n15():
    out = []
    i = 0
    while len(out) < 100:
        s = derive_seed(CORPUS_SEED + 2, i)
        f = generate_random_ksat(15, 45, 3, s)
        if brute_force_sat(f).status is Status.SAT:
            out.append((f, s))
        i += 1
    return out


@pytest.fixture(scope="module")
def edge_formulas():
    return [(p.name, parse_dimacs(p.read_bytes())) for p in edge_case_files()]


def test_step_equivalence(capsys, corpus):
    failed = [name for name, f, s in corpus if not run_coupled(f, s, HORIZON).matched]
    verdict(capsys, "1 step equivalence", not failed,
            f"{len(corpus) - len(failed)}/{len(corpus)} coupled runs matched "
            f"at horizon {HORIZON}; mismatches {failed[:5]}")


def test_fixed_point_soundness(capsys, corpus, unsat_corpus, sat_n15, edge_formulas):
    runs = [(f, s) for _, f, s in corpus]
    runs += [(i.formula, i.seed) for i in unsat_corpus]
    runs += sat_n15
    runs += [(f, 0) for _, f in edge_formulas]
    sats = violations = 0
    for f, s in runs:
        for traced in (False, True):
            res, _ = mp_run(f, MpRunConfig(max_iterations=HORIZON + 1, seed=s), trace=traced)
            if res.status is Status.SAT:
                sats += 1
                violations += not evaluate(f, res.assignment)
            violations += res.status is Status.UNSAT
    verdict(capsys, "2 fixed-point soundness", violations == 0,
            f"{violations} violations over {2 * len(runs)} runs ({sats} SAT claims)")


def test_unsat_never_certified(capsys, unsat_corpus):
    outcomes = {}
    for inst in unsat_corpus:
        res, _ = mp_run(inst.formula, MpRunConfig(max_iterations=100_000, seed=inst.seed),
                        trace=False)
        outcomes[res.status] = outcomes.get(res.status, 0) + 1
    ok = outcomes == {Status.UNKNOWN: 100}
    verdict(capsys, "3 unsat non-certification", ok,
            f"{ {k.value: v for k, v in outcomes.items()} } over 100 DPLL-unsat instances, "
            f"K=1e5")


def _exhaustive_n3():
    lits = [1, -1, 2, -2, 3, -3]
    clauses = list(itertools.combinations(lits, 3))  # 20 three-literal clauses
    for size in range(5):
        for cs in itertools.combinations(clauses, size):
            yield CnfFormula.from_ints(3, cs)


def test_complete_solver_agreement(capsys):
    def agree(f):
        res = dpll(f)[0]
        if res.status is not brute_force_sat(f).status:
            return False
        return res.status is Status.UNSAT or evaluate(f, res.assignment)

    exhaustive = list(_exhaustive_n3())
    bad_a = sum(not agree(f) for f in exhaustive)
    rng = random.Random(CORPUS_SEED)
    bad_b = 0
    for i in range(10_000):
        n = rng.randint(1, 12)
        k = rng.randint(1, min(3, n))
        m = rng.randint(0, 6 * n)
        bad_b += not agree(generate_random_ksat(n, m, k, derive_seed(CORPUS_SEED + 3, i)))
    verdict(capsys, "4 dpll vs brute force", bad_a == bad_b == 0,
            f"(a) {len(exhaustive) - bad_a}/{len(exhaustive)} exhaustive n=3 formulas, "
            f"(b) {10_000 - bad_b}/10000 random n<=12")


def test_static_graph_demonstrator(capsys, tmp_path, corpus, unsat_corpus, edge_formulas):
    formulas = [(name, f) for name, f, _ in corpus]
    formulas += [(i.id, i.formula) for i in unsat_corpus]
    formulas += edge_formulas
    checked, failed = 0, []
    for name, f in formulas:
        # an empty input clause leaves DPLL nothing to do, so it is out of scope
        if f.num_clauses == 0 or any(len(c) == 0 for c in f.clauses):
            continue
        path = tmp_path / "f.cnf"
        path.write_text(emit_dimacs(f))
        code = main(["demo-obs1", str(path), "--format", "json", "-K", "20"])
        rec = json.loads(capsys.readouterr().out)
        checked += 1
        if code != 0 or rec["dpll_reconfigurations"] < 1 or rec["mp_reconfigurations"] != 0:
            failed.append(name)
    verdict(capsys, "5 static-graph demonstrator", not failed,
            f"{checked - len(failed)}/{checked} instances with DPLL >= 1 and MP = 0 "
            f"reconfigurations; failures {failed[:5]}")


def test_embedding_domain_fuzz(capsys):
    steps = violations = 0
    i = 0
    while steps < 10_000:
        s = derive_seed(CORPUS_SEED + 4, i)
        rng = np.random.default_rng(s)
        n = int(rng.integers(3, 16))
        f = generate_random_ksat(n, int(rng.integers(1, 5 * n)), int(rng.integers(1, 4)), s)
        machine = MpMachine(f, MpRunConfig(seed=s, dim=int(rng.integers(1, 9))))
        codes = machine.codebooks.clause.codes
        prev = machine.initial
        for _ in range(200):
            rep = machine.step()
            steps += 1
            try:
                decode_assignment(machine.state, machine.codebooks.literal)
            except Exception:
                violations += 1
                break
            ce = machine.state.clause_embeddings
            violations += not (((ce == codes).all(axis=1)) | ((ce == 0).all(axis=1))).all()
            semantic = {lit.node_id for j in unsat_clauses(f, prev) for lit in f.clauses[j].literals}
            violations += rep.candidates != semantic
            if rep.fixed_point:
                break
            prev = rep.assignment
        i += 1
    verdict(capsys, "6 embedding-domain fuzz", violations == 0,
            f"{violations} violations over {steps} steps on {i} instances")


def test_local_search_sanity(capsys, sat_n15):
    walk_solved, mp_solved = set(), set()
    for idx, (f, s) in enumerate(sat_n15):
        if walksat_paper_variant(f, s, 10_000)[0].status is Status.SAT:
            walk_solved.add(idx)
        res, _ = mp_run(f, MpRunConfig(max_iterations=10_001, seed=s), trace=False)
        if res.status is Status.SAT:
            mp_solved.add(idx)
    rate = len(walk_solved) / len(sat_n15)
    ok = rate >= 0.9 and walk_solved == mp_solved
    verdict(capsys, "7 local-search sanity", ok,
            f"walk solve rate {rate:.2f} (need >= 0.90); "
            f"solve sets {'identical' if walk_solved == mp_solved else 'differ'} "
            f"({len(walk_solved)} vs {len(mp_solved)})")


def test_format_fidelity(capsys, tmp_path, corpus, unsat_corpus, edge_formulas):
    formulas = [(name, f) for name, f, _ in corpus] + [(i.id, i.formula) for i in unsat_corpus]
    formulas += edge_formulas
    bad_trip, bad_code = [], []
    for name, f in formulas:
        text = emit_dimacs(f)
        if parse_dimacs(text) != f or emit_dimacs(parse_dimacs(text)) != text:
            bad_trip.append(name)
        path = tmp_path / "f.cnf"
        path.write_text(text)
        expected = 10 if brute_force_sat(f).status is Status.SAT else 20
        for solver in ("dpll", "brute"):
            if main(["solve", str(path), "--solver", solver]) != expected:
                bad_code.append((name, solver))
        if main(["solve", str(path), "--solver", "mp", "-K", "50"]) not in (0, 10):
            bad_code.append((name, "mp"))
        capsys.readouterr()
    garbage = tmp_path / "bad.cnf"
    garbage.write_text("p cnf 2 1\n1 x 0\n")
    if main(["solve", str(garbage)]) != 1:
        bad_code.append(("malformed", "dpll"))
    capsys.readouterr()
    ok = not bad_trip and not bad_code
    verdict(capsys, "8 format fidelity", ok,
            f"round-trip {len(formulas) - len(bad_trip)}/{len(formulas)}, "
            f"exit-code mismatches {bad_code[:5]}")
