"""Coupled-randomness differential check: MP machine vs the coupled WalkSAT variant."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .formula import CnfFormula, Literal, SolveResult, Status
from .mp_machine import DEFAULT_DIM, MpRunConfig, MpTrace, mp_run
from .rng import CoupledStream
from .solvers import FlipTrace, walksat_paper_variant


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Divergence:
    step: int
    field: str  # candidates | flip | assignment | outcome
    detail: str


@dataclass
class EquivalenceReport:
    seed: int
    max_steps: int
    steps_compared: int
    matched: bool
    first_divergence: Divergence | None
    mp_outcome: str
    reference_outcome: str

    def __post_init__(self):
        assert self.matched == (self.first_divergence is None)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "max_steps": self.max_steps,
            "steps_compared": self.steps_compared,
            "matched": self.matched,
            "first_divergence": asdict(self.first_divergence) if self.first_divergence else None,
            "mp_outcome": self.mp_outcome,
            "reference_outcome": self.reference_outcome,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _lits(nodes) -> list[int]:
    return [Literal.from_node_id(v).to_dimacs() for v in sorted(nodes)]


def _outcome(res: SolveResult) -> str:
    return res.status.value if res.assignment is None else f"SAT {res.assignment.bits}"


def run_coupled(formula: CnfFormula, seed: int, max_steps: int, *,
                dim: int = DEFAULT_DIM, draw_levels: int | None = None,
                reference_draw_seed: int | None = None,
                mp_tie_break: str = "lowest") -> EquivalenceReport:
    """Run both procedures from ``seed`` and compare them iteration by iteration.

    The walk gets ``max_steps`` flips. The machine gets one iteration more:
    its fixed-point test at iteration ``max_steps + 1`` plays the role of the
    walk's final satisfaction check after its last flip; a flip the machine
    makes at that extra iteration lies beyond the horizon and is not compared.

    ``reference_draw_seed`` and ``mp_tie_break`` exist for negative controls.
    """
    n = formula.num_vars
    config = MpRunConfig(max_iterations=max_steps + 1, dim=dim, seed=seed,
                         draw_levels=draw_levels, tie_break=mp_tie_break)
    mp_res, mp_trace = mp_run(formula, config, trace=True)
    ref_seed = seed if reference_draw_seed is None else reference_draw_seed
    ref_res, ref_trace = walksat_paper_variant(
        formula, seed, max_steps, stream=CoupledStream(ref_seed, 2 * n, draw_levels))

    def report(steps, div=None):
        return EquivalenceReport(seed, max_steps, steps, div is None, div,
                                 _outcome(mp_res), _outcome(ref_res))

    if mp_trace.initial != ref_trace.initial:
        return report(0, Divergence(0, "assignment",
                                    f"initial {mp_trace.initial.bits} vs {ref_trace.initial.bits}"))
    reports = mp_trace.reports
    for i, step in enumerate(ref_trace.steps):
        if i >= len(reports):
            return report(i, Divergence(i + 1, "flip", "machine stopped before the walk"))
        rep = reports[i]
        if rep.candidates != step.candidates:
            return report(i, Divergence(rep.k, "candidates",
                                        f"{_lits(rep.candidates)} vs {_lits(step.candidates)}"))
        if rep.flipped_var != step.var:
            return report(i, Divergence(rep.k, "flip", f"{rep.flipped_var} vs {step.var}"))
        if rep.assignment != step.assignment:
            return report(i, Divergence(rep.k, "assignment",
                                        f"{rep.assignment.bits} vs {step.assignment.bits}"))
    compared = len(ref_trace.steps)
    # the iteration after the walk's last flip: fixed point iff the walk stopped early
    walk_stopped = ref_res.status is Status.SAT or compared < max_steps
    if compared < len(reports):
        rep = reports[compared]
        compared += 1
        if rep.fixed_point != walk_stopped:
            return report(compared, Divergence(rep.k, "candidates",
                                               f"machine fixed_point={rep.fixed_point}, "
                                               f"walk stopped={walk_stopped}"))
        if rep.fixed_point and rep.candidates:
            return report(compared, Divergence(rep.k, "candidates", "nonempty at fixed point"))
    else:
        return report(compared, Divergence(compared + 1, "outcome", "machine trace too short"))
    if mp_res.status != ref_res.status or mp_res.assignment != ref_res.assignment:
        return report(compared, Divergence(compared, "outcome",
                                           f"{_outcome(mp_res)} vs {_outcome(ref_res)}"))
    return report(compared)


def check_decode_consistency(mp_trace: MpTrace, walksat_trace: FlipTrace) -> bool:
    """True iff decoded and explicit assignments agree at every common flip step.

    Raises LengthMismatch when the traces assign different numbers of variables.
    """
    if mp_trace.initial.num_vars != walksat_trace.initial.num_vars:
        raise LengthMismatch(f"{mp_trace.initial.num_vars} vs "
                             f"{walksat_trace.initial.num_vars} variables")
    if mp_trace.initial != walksat_trace.initial:
        return False
    mp_flips = mp_trace.flip_reports
    return all(r.assignment == s.assignment for r, s in zip(mp_flips, walksat_trace.steps))
