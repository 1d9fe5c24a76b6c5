"""CNF data model, DIMACS I/O, evaluation, random instances and a brute-force oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

BRUTE_FORCE_MAX_VARS = 25


class FormulaError(ValueError):
    pass


class DimacsError(FormulaError):
    pass


class MissingHeader(DimacsError):
    pass


class MalformedHeader(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class VariableOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


class NonIntegerToken(DimacsError):
    pass


class InvalidParams(FormulaError):
    pass


class TooLarge(FormulaError):
    pass


class UnsoundResult(AssertionError):
    """A solver tried to report SAT with an assignment that falsifies the formula."""


@dataclass(frozen=True, slots=True, order=True)
class Literal:
    var: int
    positive: bool = True

    def __post_init__(self):
        if self.var < 1:
            raise FormulaError(f"variable index must be >= 1, got {self.var}")

    @classmethod
    def from_dimacs(cls, lit: int) -> Literal:
        if lit == 0:
            raise FormulaError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    def to_dimacs(self) -> int:
        return self.var if self.positive else -self.var

    def negate(self) -> Literal:
        return Literal(self.var, not self.positive)

    __neg__ = negate

    @property
    def node_id(self) -> int:
        # positive -> even id, negative -> odd id; the negation partner is id ^ 1
        return 2 * (self.var - 1) + (0 if self.positive else 1)

    @classmethod
    def from_node_id(cls, node: int) -> Literal:
        return cls(node // 2 + 1, node % 2 == 0)

    def __str__(self):
        return f"x{self.var}" if self.positive else f"~x{self.var}"


@dataclass(frozen=True, slots=True)
class Clause:
    literals: tuple[Literal, ...] = ()

    def __post_init__(self):
        seen = dict.fromkeys(_as_literal(x) for x in self.literals)
        object.__setattr__(self, "literals", tuple(seen))

    @classmethod
    def of(cls, *lits: int) -> Clause:
        return cls(tuple(Literal.from_dimacs(x) for x in lits))

    def to_dimacs(self) -> tuple[int, ...]:
        return tuple(lit.to_dimacs() for lit in self.literals)

    @property
    def is_tautology(self) -> bool:
        s = set(self.literals)
        return any(lit.negate() in s for lit in s)

    def __len__(self):
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)


def _as_literal(x) -> Literal:
    if isinstance(x, Literal):
        return x
    return Literal.from_dimacs(int(x))


def _as_clause(c) -> Clause:
    return c if isinstance(c, Clause) else Clause(tuple(c))


@dataclass(frozen=True, slots=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise FormulaError("num_vars must be >= 0")
        clauses = tuple(_as_clause(c) for c in self.clauses)
        for c in clauses:
            for lit in c:
                if lit.var > self.num_vars:
                    raise VariableOutOfRange(
                        f"literal {lit.to_dimacs()} exceeds num_vars={self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_ints(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> CnfFormula:
        return cls(num_vars, tuple(Clause.of(*c) for c in clauses))

    def to_ints(self) -> list[list[int]]:
        return [list(c.to_dimacs()) for c in self.clauses]

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def __len__(self):
        return len(self.clauses)


@dataclass(frozen=True, slots=True)
class Assignment:
    """Total assignment; ``values[i]`` is the value of variable ``i + 1``."""

    values: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(bool(v) for v in self.values))

    @classmethod
    def from_bits(cls, bits: str) -> Assignment:
        return cls(tuple(ch == "1" for ch in bits))

    @classmethod
    def from_dict(cls, num_vars: int, values: dict[int, bool]) -> Assignment:
        return cls(tuple(bool(values.get(v, False)) for v in range(1, num_vars + 1)))

    @classmethod
    def all_false(cls, num_vars: int) -> Assignment:
        return cls((False,) * num_vars)

    @property
    def num_vars(self) -> int:
        return len(self.values)

    def __getitem__(self, var: int) -> bool:
        if var < 1:
            raise IndexError(var)
        return self.values[var - 1]

    def flipped(self, var: int) -> Assignment:
        vals = list(self.values)
        vals[var - 1] = not vals[var - 1]
        return Assignment(tuple(vals))

    def literal_true(self, lit: Literal) -> bool:
        return self.values[lit.var - 1] == lit.positive

    @property
    def bits(self) -> str:
        return "".join("1" if v else "0" for v in self.values)

    def as_dict(self) -> dict[int, bool]:
        return {i + 1: v for i, v in enumerate(self.values)}

    def to_dimacs(self) -> list[int]:
        return [v if val else -v for v, val in enumerate(self.values, start=1)]


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"

    @property
    def exit_code(self) -> int:
        return {Status.SAT: 10, Status.UNSAT: 20, Status.UNKNOWN: 0}[self]


@dataclass
class SolveStats:
    flips: int = 0
    decisions: int = 0
    iterations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    status: Status
    assignment: Assignment | None = None
    stats: SolveStats = field(default_factory=SolveStats, compare=False)

    def __post_init__(self):
        if (self.status is Status.SAT) != (self.assignment is not None):
            raise ValueError("exactly the SAT outcome carries an assignment")

    @classmethod
    def sat(cls, formula: CnfFormula, assignment: Assignment,
            stats: SolveStats | None = None) -> SolveResult:
        if not evaluate(formula, assignment):
            raise UnsoundResult(f"assignment {assignment.bits} does not satisfy the formula")
        return cls(Status.SAT, assignment, stats or SolveStats())

    @classmethod
    def unsat(cls, stats: SolveStats | None = None) -> SolveResult:
        # only complete procedures (brute force, dpll) may call this
        return cls(Status.UNSAT, None, stats or SolveStats())

    @classmethod
    def unknown(cls, stats: SolveStats | None = None) -> SolveResult:
        return cls(Status.UNKNOWN, None, stats or SolveStats())

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def exit_code(self) -> int:
        return self.status.exit_code


# ---------------------------------------------------------------- DIMACS


def parse_dimacs(text: str | bytes) -> CnfFormula:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: second header")
            if clauses or current:
                raise MissingHeader(f"line {lineno}: clauses before header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise NonIntegerToken(f"line {lineno}: {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise MalformedHeader(f"line {lineno}: negative count")
            continue
        if header is None:
            raise MissingHeader(f"line {lineno}: clause data before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise NonIntegerToken(f"line {lineno}: {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
                continue
            if abs(lit) > header[0]:
                raise VariableOutOfRange(f"line {lineno}: literal {lit} with {header[0]} vars")
            current.append(lit)
    if header is None:
        raise MissingHeader("no 'p cnf' header")
    if current:
        raise UnterminatedClause(f"clause {current} not terminated by 0")
    if len(clauses) != header[1]:
        raise ClauseCountMismatch(f"header says {header[1]} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(header[0], clauses)


def emit_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for c in formula.clauses:
        lines.append(" ".join([*(str(x) for x in c.to_dimacs()), "0"]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- semantics


def clause_satisfied(clause: Clause, a: Assignment) -> bool:
    vals = a.values
    return any(vals[lit.var - 1] == lit.positive for lit in clause.literals)


def evaluate(formula: CnfFormula, a: Assignment) -> bool:
    _check_total(formula, a)
    return all(clause_satisfied(c, a) for c in formula.clauses)


def unsat_clauses(formula: CnfFormula, a: Assignment) -> set[int]:
    _check_total(formula, a)
    return {j for j, c in enumerate(formula.clauses) if not clause_satisfied(c, a)}


def _check_total(formula: CnfFormula, a: Assignment):
    if a.num_vars < formula.num_vars:
        raise FormulaError(
            f"assignment covers {a.num_vars} variables, formula has {formula.num_vars}")


# ---------------------------------------------------------------- generation


def generate_random_ksat(n: int, m: int, k: int, seed: int) -> CnfFormula:
    """Uniform random k-SAT: k distinct variables per clause, fair-coin polarities."""
    if k < 1 or n < k or m < 0:
        raise InvalidParams(f"need n >= k >= 1 and m >= 0 (got n={n}, m={m}, k={k})")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vs = rng.choice(n, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append([int(v) if s else -int(v) for v, s in zip(vs, signs)])
    return CnfFormula.from_ints(n, clauses)


# ---------------------------------------------------------------- oracle


def brute_force_sat(formula: CnfFormula, chunk_bits: int = 16) -> SolveResult:
    """Exhaustive search in lexicographic order (x1 is the low bit, false before true).

    Returns the first satisfying assignment in that order, else UNSAT.
    """
    n = formula.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}")
    clauses = [c.to_dimacs() for c in formula.clauses]
    total = 1 << n
    chunk = 1 << min(chunk_bits, n)
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((idx[:, None] >> shifts) & 1).astype(bool)
        ok = np.ones(len(idx), dtype=bool)
        for c in clauses:
            cs = np.zeros(len(idx), dtype=bool)
            for lit in c:
                col = bits[:, abs(lit) - 1]
                cs |= col if lit > 0 else ~col
            ok &= cs
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            row = bits[hits[0]]
            return SolveResult.sat(formula, Assignment(tuple(row.tolist())),
                                   SolveStats(iterations=int(start + hits[0]) + 1))
    return SolveResult.unsat(SolveStats(iterations=total))


def phi1() -> CnfFormula:
    """(x1 or not x2) and (not x1 or x2)."""
    return CnfFormula.from_ints(2, [[1, -2], [-1, 2]])

