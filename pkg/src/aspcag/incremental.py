"""Incremental solving: add fact batches one at a time, freezing each answer
set into facts for the next, stateless, solver call."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import EngineTimeout, GroundingTimeout, IterationUnsat, SolveTimeout
from .external import run_external_engine
from .grounder import GroundingStats, ground, grounding_stats
from .parser import render_program
from .solver import check_stable, solve
from .syntax import Atom, Program

log = logging.getLogger(__name__)

# verify_final is switched on automatically up to this many input facts
VERIFY_FACT_LIMIT = 250


@dataclass(frozen=True)
class FactBatch:
    index: int
    facts: tuple


@dataclass
class EngineResult:
    status: str  # sat, unsat or timeout
    model: Optional[frozenset]
    stats: Optional[GroundingStats] = None
    ground_time: float = 0.0
    solve_time: float = 0.0


@dataclass
class IterationTrace:
    index: int
    input_fact_count: int
    stats: Optional[GroundingStats]
    solve_time: float
    answer_set_size: int
    status: str
    ground_time: float = 0.0
    verified: Optional[bool] = None


class InternalEngine:
    """Ground with :func:`ground`, then take the first model of :func:`solve`."""

    name = "internal"

    def __init__(self, backend: str = None, keep_symmetric: bool = False):
        self.backend = backend
        self.keep_symmetric = keep_symmetric

    def __call__(self, program: Program, deadline: Optional[float] = None) -> EngineResult:
        t0 = time.perf_counter()
        try:
            g = ground(program, keep_symmetric=self.keep_symmetric, deadline=deadline,
                       backend=self.backend)
        except GroundingTimeout:
            return EngineResult("timeout", None, ground_time=time.perf_counter() - t0)
        t1 = time.perf_counter()
        stats = grounding_stats(g, t1 - t0)
        try:
            models = solve(g, limit=1, backend=self.backend, deadline=deadline)
        except SolveTimeout:
            return EngineResult("timeout", None, stats, t1 - t0, time.perf_counter() - t1)
        t2 = time.perf_counter()
        if not models:
            return EngineResult("unsat", None, stats, t1 - t0, t2 - t1)
        return EngineResult("sat", models[0], stats, t1 - t0, t2 - t1)


class ExternalEngine:
    """Pipe the non-ground program to an external command."""

    def __init__(self, cmd: str, timeout: Optional[float] = None):
        self.cmd = cmd
        self.timeout = timeout
        self.name = f"external:{cmd}"

    def __call__(self, program: Program, deadline: Optional[float] = None) -> EngineResult:
        budget = self.timeout
        if deadline is not None:
            left = max(deadline - time.perf_counter(), 0.0)
            budget = left if budget is None else min(budget, left)
        status, model, elapsed = run_external_engine(render_program(program), self.cmd, budget)
        return EngineResult(status, model, None, 0.0, elapsed)


def engine_from_spec(spec: str, backend: str = None, timeout: Optional[float] = None):
    """'internal' or 'external:<command line>'."""
    if spec == "internal":
        return InternalEngine(backend)
    if spec.startswith("external:") and spec[len("external:"):].strip():
        return ExternalEngine(spec[len("external:"):].strip(), timeout)
    raise ValueError(f"unknown engine {spec!r}")


def facts_of(answer_set: Iterable[Atom]) -> list[Atom]:
    """One fact per atom, in canonical order."""
    return sorted(set(answer_set), key=Atom.sort_key)


class IncrementalResult(tuple):
    """``(answer_set, traces)``; also exposes the intermediate answer sets."""

    def __new__(cls, answer_set, traces, history):
        obj = super().__new__(cls, (answer_set, traces))
        obj.history = history
        return obj


def incremental_solve(encoding: Program, batches: Sequence[FactBatch],
                      engine: Callable = None, verify_final: Optional[bool] = None,
                      deadline: Optional[float] = None):
    """Solve ``encoding`` batch by batch.

    Starting from the empty answer set, iteration i solves the encoding over
    the facts of the previous answer set plus batch i and keeps the first
    model.  Returns ``(answer_set, traces)``.  Raises IterationUnsat or
    EngineTimeout naming the failing batch; the partial traces are attached
    to the exception as ``traces``.

    With ``verify_final`` the final answer set is checked for stability
    against the encoding plus all batch facts; the outcome is stored in the
    last trace's ``verified`` field.  The default enables the check for
    small inputs only.
    """
    if not batches:
        raise ValueError("at least one batch is required")
    engine = engine or InternalEngine()
    delta: frozenset = frozenset()
    traces: list[IterationTrace] = []
    history: list[frozenset] = []
    for batch in batches:
        input_facts = facts_of(set(delta) | set(batch.facts))
        res = engine(encoding.with_facts(input_facts), deadline)
        size = len(res.model) if res.model is not None else 0
        traces.append(IterationTrace(batch.index, len(input_facts), res.stats, res.solve_time,
                                     size, res.status, res.ground_time))
        log.debug("iteration %d: %s, %d atoms", batch.index, res.status, size)
        if res.status == "timeout":
            err = EngineTimeout(batch.index)
            err.traces = traces
            raise err
        if res.status != "sat":
            err = IterationUnsat(batch.index)
            err.traces = traces
            raise err
        delta = res.model
        history.append(delta)

    all_facts = {a for b in batches for a in b.facts}
    if verify_final is None:
        verify_final = len(all_facts) + len(encoding.facts) <= VERIFY_FACT_LIMIT
    if verify_final:
        g = ground(encoding.with_facts(facts_of(all_facts)))
        traces[-1].verified = check_stable(g, delta)
    return IncrementalResult(delta, traces, history)
