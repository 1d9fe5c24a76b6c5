"""Message-passing simulation of WalkSAT on the literal-clause graph, with reference solvers."""

from .formula import (Assignment, Clause, CnfFormula, Literal, SolveResult, SolveStats, Status,
                      brute_force_sat, clause_satisfied, emit_dimacs, evaluate,
                      generate_random_ksat, parse_dimacs, unsat_clauses)
from .lcg import build_lcg, fingerprint, neighbors_of_clause, neighbors_of_literal
from .mp_machine import MpRunConfig, mp_run, mp_step
from .solvers import count_graph_reconfigurations, dpll, gsat, walksat_classic, walksat_paper_variant
from .equivalence import check_decode_consistency, run_coupled

__all__ = [
    "Assignment", "Clause", "CnfFormula", "Literal", "SolveResult", "SolveStats", "Status",
    "brute_force_sat", "clause_satisfied", "emit_dimacs", "evaluate", "generate_random_ksat",
    "parse_dimacs", "unsat_clauses", "build_lcg", "fingerprint", "neighbors_of_clause",
    "neighbors_of_literal", "MpRunConfig", "mp_run", "mp_step", "count_graph_reconfigurations",
    "dpll", "gsat", "walksat_classic", "walksat_paper_variant", "check_decode_consistency",
    "run_coupled",
]
