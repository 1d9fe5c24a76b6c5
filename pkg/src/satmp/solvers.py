"""Reference solvers: WalkSAT (coupled variant and classic), GSAT and a traced DPLL."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import pairwise
from typing import Sequence

from .formula import (Assignment, CnfFormula, SolveResult, SolveStats, evaluate,
                      unsat_clauses)
from .lcg import GraphFingerprint, canonical_fingerprint
from .rng import CLASSIC, CoupledStream, RngStream, initial_assignment


@dataclass(frozen=True)
class FlipStep:
    k: int
    var: int
    candidates: frozenset[int]  # literal node ids
    assignment: Assignment      # after the flip


@dataclass
class FlipTrace:
    initial: Assignment
    steps: list[FlipStep] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @property
    def assignments(self) -> list[Assignment]:
        return [self.initial, *(s.assignment for s in self.steps)]


@dataclass(frozen=True)
class WalkEvent:
    """Outcome of one iteration of the coupled-variant walk."""

    k: int
    candidates: frozenset[int]
    var: int | None
    assignment: Assignment
    satisfied: bool

    @property
    def stuck(self) -> bool:
        # unsatisfied but nothing to flip: only the empty clause is falsified
        return not self.satisfied and self.var is None


def literal_node(lit: int) -> int:
    return 2 * (abs(lit) - 1) + (lit < 0)


class PaperWalkSAT:
    """WalkSAT with the selection rule the message-passing construction induces.

    Each iteration the candidates are all literals occurring in at least one
    unsatisfied clause; the one with the largest coupled draw ``u_k[v]`` is
    picked (lowest node id on ties) and its variable flipped.
    """

    def __init__(self, formula: CnfFormula, seed: int, *,
                 stream: CoupledStream | None = None):
        self.formula = formula
        self.assignment = initial_assignment(formula.num_vars, seed)
        self.stream = stream or CoupledStream(seed, 2 * formula.num_vars)
        self.k = 0
        self._clause_nodes = [tuple(lit.node_id for lit in c) for c in formula.clauses]

    def candidates(self, bad: set[int] | None = None) -> frozenset[int]:
        if bad is None:
            bad = unsat_clauses(self.formula, self.assignment)
        return frozenset(v for j in bad for v in self._clause_nodes[j])

    def step(self) -> WalkEvent:
        self.k += 1
        u = self.stream.next()
        bad = unsat_clauses(self.formula, self.assignment)
        if not bad:
            return WalkEvent(self.k, frozenset(), None, self.assignment, True)
        cands = self.candidates(bad)
        if not cands:
            return WalkEvent(self.k, cands, None, self.assignment, False)
        chosen = max(sorted(cands), key=lambda v: u[v])
        var = chosen // 2 + 1
        self.assignment = self.assignment.flipped(var)
        return WalkEvent(self.k, cands, var, self.assignment, False)


def walksat_paper_variant(formula: CnfFormula, seed: int, max_flips: int, *,
                          stream: CoupledStream | None = None
                          ) -> tuple[SolveResult, FlipTrace]:
    if max_flips < 0:
        raise ValueError("max_flips must be >= 0")
    t0 = time.perf_counter()
    walk = PaperWalkSAT(formula, seed, stream=stream)
    trace = FlipTrace(walk.assignment)

    def stats():
        return SolveStats(flips=len(trace.steps), iterations=walk.k,
                          wall_time=time.perf_counter() - t0)

    for _ in range(max_flips):
        ev = walk.step()
        if ev.satisfied:
            return SolveResult.sat(formula, ev.assignment, stats()), trace
        if ev.stuck:
            return SolveResult.unknown(stats()), trace
        trace.steps.append(FlipStep(ev.k, ev.var, ev.candidates, ev.assignment))
    if evaluate(formula, walk.assignment):
        return SolveResult.sat(formula, walk.assignment, stats()), trace
    return SolveResult.unknown(stats()), trace


class _Counts:
    """True-literal counts per clause, maintained under flips."""

    def __init__(self, formula: CnfFormula, a: Assignment):
        self.n = formula.num_vars
        self.clauses = [c.to_dimacs() for c in formula.clauses]
        self.occ: dict[int, list[int]] = {}
        for j, c in enumerate(self.clauses):
            for lit in c:
                self.occ.setdefault(lit, []).append(j)
        self.reset(a)

    def reset(self, a: Assignment):
        self.values = [False, *a.values]
        self.true_count = [sum(self.is_true(lit) for lit in c) for c in self.clauses]
        self.unsat: list[int] = []
        self.pos = [-1] * len(self.clauses)
        for j, t in enumerate(self.true_count):
            if t == 0:
                self._add(j)

    def is_true(self, lit: int) -> bool:
        return self.values[abs(lit)] == (lit > 0)

    def _add(self, j):
        self.pos[j] = len(self.unsat)
        self.unsat.append(j)

    def _remove(self, j):
        i = self.pos[j]
        last = self.unsat.pop()
        if last != j:
            self.unsat[i] = last
            self.pos[last] = i
        self.pos[j] = -1

    def true_lit(self, var: int) -> int:
        return var if self.values[var] else -var

    def break_count(self, var: int) -> int:
        return sum(1 for j in self.occ.get(self.true_lit(var), ()) if self.true_count[j] == 1)

    def make_count(self, var: int) -> int:
        return sum(1 for j in self.occ.get(-self.true_lit(var), ()) if self.true_count[j] == 0)

    def flip(self, var: int):
        old = self.true_lit(var)
        self.values[var] = not self.values[var]
        for j in self.occ.get(old, ()):
            self.true_count[j] -= 1
            if self.true_count[j] == 0:
                self._add(j)
        for j in self.occ.get(-old, ()):
            self.true_count[j] += 1
            if self.true_count[j] == 1:
                self._remove(j)

    def assignment(self) -> Assignment:
        return Assignment(tuple(self.values[1:]))


def walksat_classic(formula: CnfFormula, seed: int, noise_p: float = 0.5,
                    max_flips: int = 100_000) -> tuple[SolveResult, FlipTrace]:
    """Selman-Kautz-Cohen WalkSAT: random unsatisfied clause, noisy min-break flip."""
    if not 0.0 <= noise_p <= 1.0:
        raise ValueError("noise_p must lie in [0, 1]")
    t0 = time.perf_counter()
    rng = RngStream(seed, CLASSIC)
    start = initial_assignment(formula.num_vars, seed)
    st = _Counts(formula, start)
    trace = FlipTrace(start)
    has_empty = any(len(c) == 0 for c in formula.clauses)
    flips = 0
    while True:
        if not st.unsat:
            return SolveResult.sat(formula, st.assignment(),
                                   SolveStats(flips=flips, iterations=flips,
                                              wall_time=time.perf_counter() - t0)), trace
        if flips >= max_flips or has_empty:
            break
        clause = st.clauses[st.unsat[rng.below(len(st.unsat))]]
        vars_ = sorted({abs(lit) for lit in clause})
        if rng.random() < noise_p:
            var = vars_[rng.below(len(vars_))]
        else:
            var = min(vars_, key=lambda v: (st.break_count(v), v))
        st.flip(var)
        flips += 1
        trace.steps.append(FlipStep(flips, var, frozenset(literal_node(x) for x in clause),
                                    st.assignment()))
    return SolveResult.unknown(SolveStats(flips=flips, iterations=flips,
                                          wall_time=time.perf_counter() - t0)), trace


def gsat(formula: CnfFormula, seed: int, max_flips: int = 1000,
         max_tries: int = 10) -> SolveResult:
    """Greedy flips of a max net-gain variable (ties at random), restarting every
    ``max_flips`` flips."""
    if max_flips < 0 or max_tries < 0:
        raise ValueError("max_flips and max_tries must be >= 0")
    t0 = time.perf_counter()
    rng = RngStream(seed, CLASSIC)
    n = formula.num_vars
    st = _Counts(formula, initial_assignment(n, seed))
    flips = 0

    def done(ok):
        stats = SolveStats(flips=flips, iterations=flips, wall_time=time.perf_counter() - t0)
        return SolveResult.sat(formula, st.assignment(), stats) if ok else SolveResult.unknown(stats)

    if not st.unsat:
        return done(True)
    for attempt in range(max_tries):
        if attempt:
            st.reset(Assignment(tuple(bool(b) for b in rng.integers(0, 2, size=n))))
            if not st.unsat:
                return done(True)
        for _ in range(max_flips):
            if n == 0:
                break
            gain = [st.make_count(v) - st.break_count(v) for v in range(1, n + 1)]
            best = max(gain)
            ties = [v for v, g in enumerate(gain, 1) if g == best]
            # random tie-breaking keeps sideways moves from 2-cycling on a plateau
            st.flip(ties[rng.below(len(ties))])
            flips += 1
            if not st.unsat:
                return done(True)
    return done(False)


# ---------------------------------------------------------------- DPLL


@dataclass(frozen=True)
class DpllEvent:
    kind: str  # "decision" | "unit-propagation" | "backtrack" | "pure-literal"
    literal: int
    fingerprint: GraphFingerprint


@dataclass
class DpllTrace:
    initial: GraphFingerprint
    events: list[DpllEvent] = field(default_factory=list)

    @property
    def fingerprints(self) -> list[GraphFingerprint]:
        return [self.initial, *(e.fingerprint for e in self.events)]


def count_graph_reconfigurations(trace) -> int:
    """Number of consecutive fingerprint changes in a trace (or a fingerprint sequence)."""
    fps: Sequence = getattr(trace, "fingerprints", trace)
    return sum(a != b for a, b in pairwise(fps))


def _residual_fingerprint(n: int, clauses) -> GraphFingerprint:
    return canonical_fingerprint(n, ([literal_node(x) for x in c] for c in clauses))


def _assign(clauses, lit: int):
    """Residual formula after making ``lit`` true."""
    out = []
    for c in clauses:
        if lit in c:
            continue
        out.append(tuple(x for x in c if x != -lit) if -lit in c else c)
    return out


def dpll(formula: CnfFormula, pure_literals: bool = False) -> tuple[SolveResult, DpllTrace]:
    """Complete DPLL: unit propagation to fixpoint, then branch lowest variable, true first.

    Every event records the fingerprint of the residual formula (satisfied
    clauses deleted, falsified literals removed) so the trace shows each time
    the search changed the graph it works on.
    """
    t0 = time.perf_counter()
    n = formula.num_vars
    clauses = [c.to_dimacs() for c in formula.clauses]
    trace = DpllTrace(_residual_fingerprint(n, clauses))
    decisions = 0

    def record(kind, lit, residual):
        trace.events.append(DpllEvent(kind, lit, _residual_fingerprint(n, residual)))

    def search(residual, assigned: dict[int, bool]):
        nonlocal decisions
        while True:
            if any(len(c) == 0 for c in residual):
                return None
            unit = next((c[0] for c in residual if len(c) == 1), None)
            if unit is None:
                break
            assigned[abs(unit)] = unit > 0
            residual = _assign(residual, unit)
            record("unit-propagation", unit, residual)
        if pure_literals:
            lits = {x for c in residual for x in c}
            for lit in sorted(x for x in lits if -x not in lits):
                assigned[abs(lit)] = lit > 0
                residual = _assign(residual, lit)
                record("pure-literal", lit, residual)
        if not residual:
            return assigned
        var = min(abs(x) for c in residual for x in c)
        for lit in (var, -var):
            if lit < 0:
                record("backtrack", var, residual)
            decisions += 1
            sub = _assign(residual, lit)
            record("decision", lit, sub)
            found = search(sub, {**assigned, var: lit > 0})
            if found is not None:
                return found
        return None

    found = search(clauses, {})
    stats = SolveStats(decisions=decisions, iterations=len(trace.events),
                       wall_time=time.perf_counter() - t0)
    if found is None:
        return SolveResult.unsat(stats), trace
    return SolveResult.sat(formula, Assignment.from_dict(n, found), stats), trace
