"""Executable message-passing machine on the static literal-clause graph.

Literal embeddings are codewords: every variable owns a "true" vector ``t_i``
and a "false" vector ``f_i``, and literal ``u`` currently reads as true iff
its embedding equals the true codeword of its variable. Clause embeddings
live in ``{c_j, 0}`` (satisfied / unsatisfied).

One iteration runs two phases. In the clause phase each clause aggregates its
literals through an exact satisfaction oracle (message ``c_j`` or ``0``), then
combines with its previous embedding. In the literal phase each literal with a
zero-embedding neighbour gets a random nonzero message, and the single literal
with the largest message norm swaps embeddings with its negation. When no
literal gets a nonzero message the machine is at a fixed point.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .formula import Assignment, CnfFormula, Literal, SolveResult, SolveStats, evaluate
from .lcg import GraphFingerprint, LcgGraph, build_lcg
from .rng import CODEBOOK, CoupledStream, RngStream, initial_assignment

DEFAULT_DIM = 8
DEFAULT_MAX_ITERATIONS = 100_000


class MachineError(RuntimeError):
    pass


class CorruptState(MachineError):
    pass


class DomainViolation(MachineError):
    pass


@dataclass(frozen=True, eq=False)
class LiteralCodebook:
    true_codes: np.ndarray   # (n, d)
    false_codes: np.ndarray  # (n, d)

    @property
    def dim(self) -> int:
        return self.true_codes.shape[1]


@dataclass(frozen=True, eq=False)
class ClauseCodebook:
    codes: np.ndarray  # (m, d)


@dataclass(frozen=True, eq=False)
class Codebooks:
    literal: LiteralCodebook
    clause: ClauseCodebook


@dataclass(eq=False)
class EmbeddingState:
    literal_embeddings: np.ndarray  # (2n, d), row = literal node id
    clause_embeddings: np.ndarray   # (m, d)
    iteration: int = 0

    def copy(self) -> EmbeddingState:
        return EmbeddingState(self.literal_embeddings.copy(),
                              self.clause_embeddings.copy(), self.iteration)


@dataclass(eq=False)
class MessageBuffer:
    literal_messages: np.ndarray  # (2n, d)
    clause_messages: np.ndarray   # (m, d)


@dataclass(frozen=True)
class MpRunConfig:
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    dim: int = DEFAULT_DIM
    seed: int = 0
    # epsilon norms are uniform on (0, 1]; ``draw_levels`` quantises them (forces ties)
    draw_levels: int | None = None
    tie_break: str = "lowest"

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.tie_break not in ("lowest", "highest"):
            raise ValueError("tie_break must be 'lowest' or 'highest'")


@dataclass(frozen=True)
class MpStepReport:
    k: int
    verdicts: tuple[bool, ...]
    candidates: frozenset[int]  # literal node ids with nonzero message
    flipped_var: int | None
    fixed_point: bool
    assignment: Assignment      # decoded after this iteration
    graph: GraphFingerprint

    @property
    def unsat_clause_indices(self) -> tuple[int, ...]:
        return tuple(j for j, ok in enumerate(self.verdicts) if not ok)

    def to_json(self) -> str:
        rec = {
            "k": self.k,
            "unsat_clause_indices": list(self.unsat_clause_indices),
            "candidate_literals": [Literal.from_node_id(v).to_dimacs()
                                   for v in sorted(self.candidates)],
            "flipped_var": self.flipped_var,
            "fixed_point": self.fixed_point,
            "assignment": self.assignment.bits,
        }
        return json.dumps(rec)


@dataclass
class MpTrace:
    initial: Assignment
    graph: GraphFingerprint
    reports: list[MpStepReport] = field(default_factory=list)

    def __len__(self):
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def __getitem__(self, i):
        return self.reports[i]

    @property
    def fingerprints(self) -> list[GraphFingerprint]:
        """Graph consulted before the run and at every iteration."""
        return [self.graph, *(r.graph for r in self.reports)]

    @property
    def flip_reports(self) -> list[MpStepReport]:
        return [r for r in self.reports if r.flipped_var is not None]

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.reports)


# ---------------------------------------------------------------- codebooks / state


def _unit_rows(rng: RngStream, rows: int, d: int) -> np.ndarray:
    x = rng.normal((rows, d))
    norms = np.linalg.norm(x, axis=1)
    x[norms == 0.0, 0] = 1.0
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def make_codebooks(num_vars: int, num_clauses: int, seed: int, d: int) -> Codebooks:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = RngStream(seed, CODEBOOK)
    t = _unit_rows(rng, num_vars, d)
    f = _unit_rows(rng, num_vars, d)
    same = (t == f).all(axis=1)
    f[same] = -t[same]  # only reachable for d == 1
    c = _unit_rows(rng, num_clauses, d)
    for arr in (t, f, c):
        arr.flags.writeable = False
    return Codebooks(LiteralCodebook(t, f), ClauseCodebook(c))


def encode(assignment: Assignment, codebook: LiteralCodebook) -> np.ndarray:
    n, d = codebook.true_codes.shape
    out = np.empty((2 * n, d))
    vals = np.array(assignment.values[:n], dtype=bool)[:, None]
    out[0::2] = np.where(vals, codebook.true_codes, codebook.false_codes)
    out[1::2] = np.where(vals, codebook.false_codes, codebook.true_codes)
    return out


def init_state(formula: CnfFormula, seed: int, d: int = DEFAULT_DIM
               ) -> tuple[EmbeddingState, LiteralCodebook, ClauseCodebook]:
    books = make_codebooks(formula.num_vars, formula.num_clauses, seed, d)
    alpha0 = initial_assignment(formula.num_vars, seed)
    state = EmbeddingState(encode(alpha0, books.literal), books.clause.codes.copy(), 0)
    return state, books.literal, books.clause


def literal_truth(state: EmbeddingState, codebook: LiteralCodebook) -> np.ndarray:
    """Boolean per literal node; raises CorruptState if the pair invariant is broken."""
    lit = state.literal_embeddings
    t, f = codebook.true_codes, codebook.false_codes
    pos_t = (lit[0::2] == t).all(axis=1)
    pos_f = (lit[0::2] == f).all(axis=1)
    neg_t = (lit[1::2] == t).all(axis=1)
    neg_f = (lit[1::2] == f).all(axis=1)
    ok = (pos_t & neg_f) | (pos_f & neg_t)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0]) + 1
        raise CorruptState(f"embeddings of x{bad} / ~x{bad} are not a codeword pair")
    out = np.empty(2 * len(t), dtype=bool)
    out[0::2] = pos_t
    out[1::2] = neg_t
    return out


def decode_assignment(state: EmbeddingState, codebook: LiteralCodebook) -> Assignment:
    return Assignment(tuple(literal_truth(state, codebook)[0::2].tolist()))


# ---------------------------------------------------------------- clause side


class ClauseOracle:
    """Exact clause-satisfaction verdict read off the literal embeddings of a clause.

    Stands in for a learned set encoder: a function of the set of literal
    embeddings of one clause, thresholded to satisfied / unsatisfied.
    """

    def __init__(self, graph: LcgGraph, codebook: LiteralCodebook):
        self.graph = graph
        self.codebook = codebook
        m = graph.num_clause_nodes
        width = max((len(c) for c in graph.clause_literals), default=0)
        sentinel = 2 * graph.num_vars
        pad = np.full((m, max(width, 1)), sentinel, dtype=np.int64)
        for j, lits in enumerate(graph.clause_literals):
            pad[j, :len(lits)] = lits
        self._padded = pad
        self._true_rows = np.repeat(codebook.true_codes, 2, axis=0)

    def literal_is_true(self, h: np.ndarray, node: int) -> bool:
        return bool(np.array_equal(h, self.codebook.true_codes[node // 2]))

    def __call__(self, state: EmbeddingState, j: int) -> bool:
        lits = self.graph.clause_literals[j]
        emb = state.literal_embeddings
        return any(self.literal_is_true(emb[u], u) for u in lits)

    def verdicts(self, state: EmbeddingState) -> np.ndarray:
        truth = (state.literal_embeddings == self._true_rows).all(axis=1)
        truth = np.append(truth, False)
        return truth[self._padded].any(axis=1)


def _is(vec: np.ndarray, target: np.ndarray) -> bool:
    return bool(np.array_equal(vec, target))


def clause_aggregate(state: EmbeddingState, j: int, oracle: ClauseOracle,
                     clause_codes: ClauseCodebook) -> np.ndarray:
    """``c_j`` if the oracle judges clause ``j`` satisfied, else the zero vector."""
    c = clause_codes.codes[j]
    return c.copy() if oracle(state, j) else np.zeros_like(c)


def clause_combine(prev: np.ndarray, msg: np.ndarray, init: np.ndarray) -> np.ndarray:
    zero = np.zeros_like(init)
    for name, v in (("previous embedding", prev), ("message", msg)):
        if not (_is(v, init) or _is(v, zero)):
            raise DomainViolation(f"{name} is neither the clause codeword nor zero")
    if _is(prev, msg):
        return prev.copy()
    if np.linalg.norm(prev) < np.linalg.norm(msg):
        return init.copy()
    return zero


def clause_messages(state: EmbeddingState, oracle: ClauseOracle,
                    clause_codes: ClauseCodebook) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised clause_aggregate over all clauses; returns (verdicts, messages)."""
    verdicts = oracle.verdicts(state)
    return verdicts, np.where(verdicts[:, None], clause_codes.codes, 0.0)


def clause_combine_all(prev: np.ndarray, msg: np.ndarray, init: np.ndarray) -> np.ndarray:
    """Vectorised clause_combine over all clauses."""
    for name, v in (("previous embedding", prev), ("message", msg)):
        ok = (v == init).all(axis=1) | (v == 0.0).all(axis=1)
        if not ok.all():
            j = int(np.flatnonzero(~ok)[0])
            raise DomainViolation(f"clause {j}: {name} is neither the clause codeword nor zero")
    same = (prev == msg).all(axis=1)
    grow = np.linalg.norm(prev, axis=1) < np.linalg.norm(msg, axis=1)
    out = np.where(grow[:, None], init, 0.0)
    out[same] = prev[same]
    return out


# ---------------------------------------------------------------- literal side


def epsilon(norm: float, d: int) -> np.ndarray:
    """Nonzero random message: fixed direction e_0, norm taken from the draw."""
    e = np.zeros(d)
    e[0] = norm
    return e


def literal_aggregate(neighbour_embeddings, draw: float, d: int) -> np.ndarray:
    """Epsilon if the product of neighbour-clause norms is zero, else the zero vector.

    An empty neighbourhood has product 1, so a literal that occurs nowhere
    never becomes a flip candidate.
    """
    prod = 1.0
    for h in neighbour_embeddings:
        prod *= float(np.linalg.norm(h))
    return epsilon(draw, d) if prod == 0.0 else np.zeros(d)


class _Incidence:
    def __init__(self, graph: LcgGraph):
        self.num_literals = graph.num_literal_nodes
        edges = graph.edges
        self.edge_lit = np.array([e[0] for e in edges], dtype=np.int64)
        self.edge_clause = np.array([e[1] for e in edges], dtype=np.int64)

    def any_zero_neighbour(self, zero_clause: np.ndarray) -> np.ndarray:
        hits = np.bincount(self.edge_lit, weights=zero_clause[self.edge_clause].astype(float),
                           minlength=self.num_literals)
        return hits > 0


def literal_messages(clause_embeddings: np.ndarray, incidence: _Incidence,
                     draws: np.ndarray) -> np.ndarray:
    """Vectorised literal_aggregate over all literal nodes."""
    zero_clause = ~clause_embeddings.any(axis=1)
    hit = incidence.any_zero_neighbour(zero_clause)
    d = clause_embeddings.shape[1] if clause_embeddings.ndim == 2 else 1
    out = np.zeros((incidence.num_literals, d))
    out[hit, 0] = draws[hit]
    return out


def literal_combine(messages: np.ndarray, state: EmbeddingState,
                    tie_break: str = "lowest") -> tuple[np.ndarray, int | None]:
    """Swap the pair of the literal with the largest message norm.

    Returns the new literal embeddings and the flipped variable (None when
    every message is zero). Ties go to the lowest literal node id unless
    ``tie_break='highest'``.
    """
    norms = np.linalg.norm(messages, axis=1) if messages.size else np.zeros(len(messages))
    lit = state.literal_embeddings
    if not (norms > 0).any():
        return lit.copy(), None
    if tie_break == "lowest":
        v = int(np.argmax(norms))
    else:
        v = len(norms) - 1 - int(np.argmax(norms[::-1]))
    out = lit.copy()
    out[[v, v ^ 1]] = lit[[v ^ 1, v]]
    return out, v // 2 + 1


# ---------------------------------------------------------------- step / run


def mp_step(state: EmbeddingState, graph: LcgGraph, codebooks: Codebooks,
            draws: np.ndarray, *, oracle: ClauseOracle | None = None,
            incidence: _Incidence | None = None,
            tie_break: str = "lowest") -> tuple[EmbeddingState, MpStepReport, MessageBuffer]:
    """One iteration: clause phase on the previous literal embeddings, then the
    literal phase on the freshly updated clause embeddings."""
    oracle = oracle or ClauseOracle(graph, codebooks.literal)
    incidence = incidence or _Incidence(graph)
    literal_truth(state, codebooks.literal)  # pair invariant guard
    verdicts, c_msgs = clause_messages(state, oracle, codebooks.clause)
    clause_emb = clause_combine_all(state.clause_embeddings, c_msgs, codebooks.clause.codes)
    l_msgs = literal_messages(clause_emb, incidence, draws)
    lit_emb, flipped = literal_combine(l_msgs, state, tie_break)
    new = EmbeddingState(lit_emb, clause_emb, state.iteration + 1)
    candidates = frozenset(np.flatnonzero(np.linalg.norm(l_msgs, axis=1) > 0).tolist())
    report = MpStepReport(
        k=new.iteration,
        verdicts=tuple(verdicts.tolist()),
        candidates=candidates,
        flipped_var=flipped,
        fixed_point=not candidates,
        assignment=decode_assignment(new, codebooks.literal),
        graph=graph.fingerprint,
    )
    return new, report, MessageBuffer(l_msgs, c_msgs)


class MpMachine:
    """Holds one run's mutable state; graph, codebooks and oracle are shared read-only."""

    def __init__(self, formula: CnfFormula, config: MpRunConfig = MpRunConfig(), *,
                 stream: CoupledStream | None = None):
        self.formula = formula
        self.config = config
        self.graph = build_lcg(formula)
        self.state, lit_book, clause_book = init_state(formula, config.seed, config.dim)
        self.codebooks = Codebooks(lit_book, clause_book)
        self.oracle = ClauseOracle(self.graph, lit_book)
        self.incidence = _Incidence(self.graph)
        self.stream = stream or CoupledStream(config.seed, self.graph.num_literal_nodes,
                                              config.draw_levels)
        self.initial = self.assignment()
        self.last_messages: MessageBuffer | None = None

    def assignment(self) -> Assignment:
        return decode_assignment(self.state, self.codebooks.literal)

    def step(self) -> MpStepReport:
        self.state, report, self.last_messages = mp_step(
            self.state, self.graph, self.codebooks, self.stream.next(),
            oracle=self.oracle, incidence=self.incidence, tie_break=self.config.tie_break)
        return report

    def run_fast(self, iterations: int, block: int = 4096) -> tuple[bool, int, int]:
        """Advance up to ``iterations`` steps in the compiled kernel.

        Returns ``(reached_fixed_point, iterations_done, flips)``.
        """
        from . import _kernel  # numba import is slow; only untraced runs need it

        g = self.graph
        m = g.num_clause_nodes
        width = max((len(c) for c in g.clause_literals), default=0)
        clause_lits = np.zeros((m, max(width, 1)), dtype=np.int64)
        clause_len = np.zeros(m, dtype=np.int64)
        for j, lits in enumerate(g.clause_literals):
            clause_lits[j, :len(lits)] = lits
            clause_len[j] = len(lits)
        occ_ptr = np.zeros(g.num_literal_nodes + 1, dtype=np.int64)
        occ_ptr[1:] = np.cumsum([len(o) for o in g.literal_clauses])
        occ = np.array([j for o in g.literal_clauses for j in o], dtype=np.int64)
        lit_emb = np.ascontiguousarray(self.state.literal_embeddings, dtype=np.float64)
        clause_emb = np.ascontiguousarray(self.state.clause_embeddings, dtype=np.float64)
        books = self.codebooks
        done = flips = 0
        reached = False
        while done < iterations:
            draws = self.stream.block(min(block, iterations - done))
            status, steps, f = _kernel.run_block(
                lit_emb, clause_emb, books.literal.true_codes, books.literal.false_codes,
                books.clause.codes, clause_lits, clause_len, occ_ptr, occ, draws,
                self.config.tie_break == "lowest")
            done += steps
            flips += f
            if status == _kernel.CORRUPT:
                raise CorruptState("literal embeddings left the codeword pairs")
            if status == _kernel.DOMAIN:
                raise DomainViolation("clause embedding left {c_j, 0}")
            if status == _kernel.FIXED_POINT:
                reached = True
                break
        self.state = EmbeddingState(lit_emb, clause_emb, self.state.iteration + done)
        return reached, done, flips


def mp_run(formula: CnfFormula, config: MpRunConfig = MpRunConfig(), *,
           trace: bool = True, stream: CoupledStream | None = None
           ) -> tuple[SolveResult, MpTrace]:
    """Iterate the machine until a fixed point or ``config.max_iterations``.

    A fixed point is reported as SAT only after ``evaluate`` confirms the
    decoded assignment; the machine never reports UNSAT. With ``trace=False``
    the compiled kernel runs the same iterations without collecting reports.
    """
    t0 = time.perf_counter()
    machine = MpMachine(formula, config, stream=stream)
    out = MpTrace(machine.initial, machine.graph.fingerprint)
    if trace:
        reached = False
        for _ in range(config.max_iterations):
            rep = machine.step()
            out.reports.append(rep)
            if rep.fixed_point:
                reached = True
                break
        iterations = len(out.reports)
        flips = len(out.flip_reports)
    else:
        reached, iterations, flips = machine.run_fast(config.max_iterations)
    stats = SolveStats(flips=flips, iterations=iterations,
                       wall_time=time.perf_counter() - t0)
    final = machine.assignment()
    if reached and evaluate(formula, final):
        return SolveResult.sat(formula, final, stats), out
    # an input empty clause yields a spurious fixed point: nothing left to flip
    return SolveResult.unknown(stats), out
