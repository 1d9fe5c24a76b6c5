import json

import pytest

from satmp.equivalence import (Divergence, EquivalenceReport, LengthMismatch,
                               check_decode_consistency, run_coupled)
from satmp.formula import CnfFormula, generate_random_ksat
from satmp.mp_machine import MpRunConfig, mp_run
from satmp.rng import derive_seed
from satmp.solvers import walksat_paper_variant


def test_phi1_matches(f1):
    rep = run_coupled(f1, 7, 1000)
    assert rep.matched and rep.first_divergence is None
    assert rep.mp_outcome == rep.reference_outcome
    assert rep.mp_outcome.startswith("SAT")


def test_contradiction_matches_over_full_horizon(contradiction):
    rep = run_coupled(contradiction, 1, 200)
    assert rep.matched and rep.mp_outcome == "UNKNOWN"
    assert rep.steps_compared == 201  # every flip plus the final check


def test_empty_clause_matches():
    rep = run_coupled(CnfFormula.from_ints(3, [[1, 2, 3], [], [-1]]), 0, 50)
    assert rep.matched and rep.mp_outcome == rep.reference_outcome == "UNKNOWN"


@pytest.mark.parametrize("seed", range(25))
def test_random_instances_match(seed):
    s = derive_seed(99, seed)
    f = generate_random_ksat(10, 42, 3, s)
    assert run_coupled(f, s, 300).matched


@pytest.mark.parametrize("levels", [1, 2, 5])
def test_matches_with_forced_ties(levels):
    for s in range(10):
        f = generate_random_ksat(8, 35, 3, s)
        assert run_coupled(f, s, 200, draw_levels=levels).matched


def test_dimension_does_not_change_the_walk():
    f = generate_random_ksat(10, 45, 3, 3)
    reps = [run_coupled(f, 3, 200, dim=d) for d in (1, 2, 16)]
    assert all(r.matched for r in reps)
    assert len({r.mp_outcome for r in reps}) == 1


# ---------------------------------------------------------------- negative controls


def test_reseeded_draws_diverge():
    diverged = 0
    for s in range(20):
        f = generate_random_ksat(12, 55, 3, s)
        rep = run_coupled(f, s, 500, reference_draw_seed=s + 10_000)
        if not rep.matched:
            diverged += 1
            assert rep.first_divergence.step >= 1
            assert rep.first_divergence.field in ("candidates", "flip", "assignment", "outcome")
    assert diverged >= 15


def test_tie_break_fault_is_caught():
    f = generate_random_ksat(10, 45, 3, 0)
    rep = run_coupled(f, 0, 200, draw_levels=1, mp_tie_break="highest")
    assert not rep.matched
    assert rep.first_divergence.field == "flip"


def test_report_serialisation(f1):
    rep = run_coupled(f1, 7, 10)
    d = json.loads(rep.to_json())
    assert d["matched"] is True and d["first_divergence"] is None
    bad = EquivalenceReport(0, 5, 1, False, Divergence(1, "flip", "1 vs 2"), "UNKNOWN", "SAT 11")
    assert json.loads(bad.to_json())["first_divergence"] == {"step": 1, "field": "flip",
                                                              "detail": "1 vs 2"}
    with pytest.raises(AssertionError):
        EquivalenceReport(0, 5, 1, True, Divergence(1, "flip", ""), "", "")


# ---------------------------------------------------------------- decode consistency


def test_decode_consistency_holds_and_breaks():
    f = generate_random_ksat(9, 40, 3, 5)
    _, mp_trace = mp_run(f, MpRunConfig(seed=5, max_iterations=101))
    _, walk_trace = walksat_paper_variant(f, 5, 100)
    assert check_decode_consistency(mp_trace, walk_trace)
    _, other = walksat_paper_variant(f, 6, 100)
    assert not check_decode_consistency(mp_trace, other)


def test_decode_consistency_length_mismatch(f1):
    _, mp_trace = mp_run(f1, MpRunConfig(seed=0, max_iterations=5))
    _, walk_trace = walksat_paper_variant(CnfFormula.from_ints(3, [[1]]), 0, 5)
    with pytest.raises(LengthMismatch):
        check_decode_consistency(mp_trace, walk_trace)
