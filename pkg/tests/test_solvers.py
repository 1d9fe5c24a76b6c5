import pytest
from hypothesis import given, settings

from satmp.formula import (Assignment, CnfFormula, Status, brute_force_sat, evaluate,
                           generate_random_ksat, unsat_clauses)
from satmp.rng import CoupledStream, initial_assignment
from satmp.solvers import (PaperWalkSAT, count_graph_reconfigurations, dpll, gsat,
                           walksat_classic, walksat_paper_variant)

from .conftest import formulas


def seed_with_initial(n, bits):
    return next(s for s in range(1000) if initial_assignment(n, s).values == bits)


# ---------------------------------------------------------------- coupled variant


def test_walk_unit_clause_flips_x1():
    f = CnfFormula.from_ints(1, [[1]])
    seed = seed_with_initial(1, (False,))
    res, trace = walksat_paper_variant(f, seed, 10)
    assert res.status is Status.SAT and res.assignment.values == (True,)
    assert len(trace) == 1
    assert trace[0].candidates == {0} and trace[0].var == 1


def test_walk_phi1_candidates(f1):
    seed = seed_with_initial(2, (True, False))
    walk = PaperWalkSAT(f1, seed)
    # only (~x1 v x2) is violated, its literals are ~x1 -> 1 and x2 -> 2
    assert walk.candidates() == {1, 2}
    res, _ = walksat_paper_variant(f1, seed, 100)
    assert res.status is Status.SAT


def test_walk_picks_largest_draw_lowest_on_ties(f1):
    seed = seed_with_initial(2, (True, False))
    walk = PaperWalkSAT(f1, seed, stream=CoupledStream(0, 4, levels=1))
    ev = walk.step()
    assert ev.var == 1  # all draws tie, node 1 beats node 2


def test_walk_contradiction_is_unknown(contradiction):
    res, trace = walksat_paper_variant(contradiction, 3, 50)
    assert res.status is Status.UNKNOWN and len(trace) == 50


def test_walk_empty_clause_is_stuck():
    res, trace = walksat_paper_variant(CnfFormula.from_ints(2, [[1, 2], []]), 0, 50)
    assert res.status is Status.UNKNOWN and len(trace) <= 1


def test_walk_zero_budget():
    res, trace = walksat_paper_variant(CnfFormula.from_ints(1, [[1], [-1]]), 0, 0)
    assert res.status is Status.UNKNOWN and len(trace) == 0
    with pytest.raises(ValueError):
        walksat_paper_variant(CnfFormula(1), 0, -1)


@given(formulas(max_vars=6, max_clauses=12))
@settings(max_examples=60)
def test_walk_flip_invariant(f):
    res, trace = walksat_paper_variant(f, 11, 40)
    prev = trace.initial
    for step in trace:
        bad = unsat_clauses(f, prev)
        assert bad, "flipped while satisfied"
        touched = {lit.node_id for j in bad for lit in f.clauses[j].literals}
        assert step.candidates == touched
        assert step.var in {v // 2 + 1 for v in step.candidates}
        assert step.assignment == prev.flipped(step.var)
        prev = step.assignment
    if res.status is Status.SAT:
        assert evaluate(f, res.assignment)
    assert res.status is not Status.UNSAT


def test_walk_deterministic():
    f = generate_random_ksat(12, 50, 3, 4)
    a = walksat_paper_variant(f, 9, 500)
    b = walksat_paper_variant(f, 9, 500)
    assert a[1] == b[1] and a[0].status == b[0].status


# ---------------------------------------------------------------- classic walksat, gsat


@pytest.mark.parametrize("solve", [
    lambda f, s: walksat_classic(f, s)[0],
    lambda f, s: gsat(f, s),
])
def test_local_search_examples(solve, f1, contradiction):
    res = solve(f1, 0)
    assert res.status is Status.SAT and evaluate(f1, res.assignment)
    assert solve(contradiction, 0).status is Status.UNKNOWN
    assert solve(CnfFormula.from_ints(2, [[1], []]), 0).status is Status.UNKNOWN
    assert solve(CnfFormula(3), 0).status is Status.SAT


def test_local_search_solves_easy_random():
    for s in range(10):
        f = generate_random_ksat(20, 60, 3, s)
        if brute_force_sat(f).status is Status.UNSAT:
            continue
        assert walksat_classic(f, s)[0].status is Status.SAT
        assert gsat(f, s, max_flips=2000, max_tries=20).status is Status.SAT


def test_classic_walksat_deterministic():
    f = generate_random_ksat(30, 120, 3, 1)
    a, b = walksat_classic(f, 5, 0.4, 3000), walksat_classic(f, 5, 0.4, 3000)
    assert a[0].status == b[0].status and a[0].assignment == b[0].assignment
    assert a[0].stats.flips == b[0].stats.flips


def test_classic_walksat_with_tautology():
    f = CnfFormula.from_ints(3, [[1, -1, 2], [-2, 3], [-3]])
    res = walksat_classic(f, 2)[0]
    assert res.status is Status.SAT and evaluate(f, res.assignment)


# ---------------------------------------------------------------- dpll


def test_dpll_phi1(f1):
    res, trace = dpll(f1)
    assert res.status is Status.SAT and res.assignment.values == (True, True)
    assert count_graph_reconfigurations(trace) >= 1
    assert [e.kind for e in trace.events][0] == "decision"


def test_dpll_contradiction_via_propagation():
    f = CnfFormula.from_ints(2, [[1], [-1, 2], [-2]])
    res, trace = dpll(f)
    assert res.status is Status.UNSAT and res.stats.decisions == 0
    assert {e.kind for e in trace.events} == {"unit-propagation"}


def test_dpll_backtracks():
    # x1 = True leads to a conflict, so the search must come back for x1 = False
    f = CnfFormula.from_ints(2, [[-1, 2], [-1, -2], [1, 2]])
    res, trace = dpll(f)
    assert res.status is Status.SAT and res.assignment.values == (False, True)
    assert "backtrack" in {e.kind for e in trace.events}


def test_dpll_trivial_inputs():
    res, trace = dpll(CnfFormula(3))
    assert res.status is Status.SAT and res.assignment == Assignment.all_false(3)
    assert count_graph_reconfigurations(trace) == 0
    res, trace = dpll(CnfFormula.from_ints(2, [[1], []]))
    assert res.status is Status.UNSAT and count_graph_reconfigurations(trace) == 0


def test_dpll_pure_literals():
    f = CnfFormula.from_ints(3, [[1, 2], [1, -3], [2, 3]])
    res, trace = dpll(f, pure_literals=True)
    assert res.status is Status.SAT and evaluate(f, res.assignment)
    assert trace.events[0].kind == "pure-literal"


@given(formulas(max_vars=7, max_clauses=14))
@settings(max_examples=200)
def test_dpll_agrees_with_brute_force(f):
    res, _ = dpll(f)
    assert res.status is brute_force_sat(f).status
    if res.status is Status.SAT:
        assert evaluate(f, res.assignment)
    res2, _ = dpll(f, pure_literals=True)
    assert res2.status is res.status


def test_reconfiguration_counter_on_sequences():
    assert count_graph_reconfigurations([]) == 0
    assert count_graph_reconfigurations(["a", "a", "b", "b", "a"]) == 2


def test_dpll_deterministic():
    f = generate_random_ksat(10, 45, 3, 8)
    a, b = dpll(f), dpll(f)
    assert a[1] == b[1] and a[0].assignment == b[0].assignment


def test_gsat_deterministic_and_escapes_plateaus():
    f = generate_random_ksat(10, 42, 3, 0)
    a, b = gsat(f, 1, 10_000, 3), gsat(f, 1, 10_000, 3)
    assert a.assignment == b.assignment and a.stats.flips == b.stats.flips
    assert a.status is Status.SAT and a.stats.flips < 10_000
