"""Bipartite literal-clause graph with negation pairing, plus a canonical fingerprint."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .formula import CnfFormula, Literal


@dataclass(frozen=True)
class GraphFingerprint:
    digest: str  # 128-bit hex

    def __str__(self):
        return self.digest


@dataclass(frozen=True, eq=False)
class LcgGraph:
    """Literal node ``2*(var-1)`` is ``x_var``, ``2*(var-1)+1`` is ``~x_var``.

    Clause node ``j`` is the j-th clause of the formula.
    """

    num_vars: int
    clause_literals: tuple[tuple[int, ...], ...]
    literal_clauses: tuple[tuple[int, ...], ...]

    @property
    def num_literal_nodes(self) -> int:
        return 2 * self.num_vars

    @property
    def num_clause_nodes(self) -> int:
        return len(self.clause_literals)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((lit, j) for j, lits in enumerate(self.clause_literals) for lit in lits)

    @property
    def num_edges(self) -> int:
        return sum(len(c) for c in self.clause_literals)

    @property
    def negation_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((2 * i, 2 * i + 1) for i in range(self.num_vars))

    @cached_property
    def fingerprint(self) -> GraphFingerprint:
        return canonical_fingerprint(self.num_vars, self.clause_literals)

    def __eq__(self, other):
        if not isinstance(other, LcgGraph):
            return NotImplemented
        return (self.num_vars, self.clause_literals) == (other.num_vars, other.clause_literals)

    def __hash__(self):
        return hash((self.num_vars, self.clause_literals))


def build_lcg(formula: CnfFormula) -> LcgGraph:
    clause_literals = tuple(tuple(lit.node_id for lit in c) for c in formula.clauses)
    occ: list[list[int]] = [[] for _ in range(2 * formula.num_vars)]
    for j, lits in enumerate(clause_literals):
        for lit in lits:
            occ[lit].append(j)
    return LcgGraph(formula.num_vars, clause_literals, tuple(tuple(o) for o in occ))


def neighbors_of_literal(g: LcgGraph, v: Literal) -> tuple[int, ...]:
    if v.var > g.num_vars:
        raise IndexError(f"literal {v} outside 1..{g.num_vars}")
    return g.literal_clauses[v.node_id]


def neighbors_of_clause(g: LcgGraph, j: int) -> tuple[Literal, ...]:
    if not 0 <= j < g.num_clause_nodes:
        raise IndexError(f"clause index {j} outside 0..{g.num_clause_nodes - 1}")
    return tuple(Literal.from_node_id(x) for x in g.clause_literals[j])


def canonical_fingerprint(num_vars: int,
                          clauses: Iterable[Sequence[int]]) -> GraphFingerprint:
    """Hash of n and the sorted multiset of sorted clause literal-id tuples."""
    canon = sorted(tuple(sorted(c)) for c in clauses)
    payload = f"{num_vars}|" + ";".join(",".join(map(str, c)) for c in canon)
    return GraphFingerprint(hashlib.blake2b(payload.encode(), digest_size=16).hexdigest())


def fingerprint(g: LcgGraph) -> GraphFingerprint:
    return g.fingerprint


def export_edge_list(g: LcgGraph) -> str:
    return "".join(f"L{lit} C{j}\n" for lit, j in g.edges)
