from pathlib import Path

import pytest
from hypothesis import strategies as st

from satmp.formula import CnfFormula, parse_dimacs, phi1

EDGE_DIR = Path(__file__).parent / "data" / "edge_cases"


@pytest.fixture
def f1():
    return phi1()


@pytest.fixture
def contradiction():
    return CnfFormula.from_ints(1, [[1], [-1]])


def edge_case_files():
    return sorted(EDGE_DIR.glob("*.cnf"))


@pytest.fixture(scope="session")
def edge_cases():
    return {p.name: parse_dimacs(p.read_bytes()) for p in edge_case_files()}


@st.composite
def formulas(draw, max_vars=5, max_clauses=8, max_width=4, allow_empty_clause=True):
    n = draw(st.integers(0 if allow_empty_clause else 1, max_vars))
    if n == 0:
        k = draw(st.integers(0, 2 if allow_empty_clause else 0))
        return CnfFormula.from_ints(0, [[]] * k)
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    min_w = 0 if allow_empty_clause else 1
    clauses = draw(st.lists(st.lists(lit, min_size=min_w, max_size=max_width),
                            max_size=max_clauses))
    return CnfFormula.from_ints(n, clauses)
