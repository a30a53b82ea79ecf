"""Stable-model checking and enumeration for ground programs.

Aggregates are evaluated against the candidate interpretation before the
reduct is taken, i.e. they behave like default-negated context.  This agrees
with the usual semantics for aggregates used in constraints and for the
anti-monotone ``< 1`` filters produced by constraint-aware guessing.
"""
from __future__ import annotations

import time
from typing import Iterable, Optional

from .compiled import CompiledProgram
from .errors import SolveTimeout, TooManyAtoms
from .grounder import GroundProgram
from .syntax import Aggregate, Atom, Comparison, Literal, Rule, compare

BRUTE_FORCE_CAP = 24


def _condition_holds(cond, interp) -> bool:
    for c in cond:
        if isinstance(c, Comparison):
            if not compare(c.lhs, c.op, c.rhs):
                return False
        elif (c.atom in interp) == c.negated:
            return False
    return True


def eval_aggregate(agg: Aggregate, interp) -> bool:
    """Truth of a ground ``#count`` aggregate under ``interp``."""
    tuples = {el.terms for el in agg.elements if _condition_holds(el.condition, interp)}
    return agg.holds_for(len(tuples))


def _body_holds(r: Rule, interp) -> bool:
    for lit in r.body:
        if isinstance(lit, Literal):
            if (lit.atom in interp) == lit.negated:
                return False
        elif isinstance(lit, Comparison):
            if not compare(lit.lhs, lit.op, lit.rhs):
                return False
        elif not eval_aggregate(lit, interp):
            return False
    return True


def _reduct_lfp(rules: Iterable[Rule], interp) -> set:
    """Least model of the reduct of ``rules`` with respect to ``interp``."""
    positive = []
    for r in rules:
        if r.head is None:
            continue
        keep = True
        pos = []
        for lit in r.body:
            if isinstance(lit, Literal):
                if lit.negated:
                    if lit.atom in interp:
                        keep = False
                        break
                else:
                    pos.append(lit.atom)
            elif isinstance(lit, Comparison):
                if not compare(lit.lhs, lit.op, lit.rhs):
                    keep = False
                    break
            elif not eval_aggregate(lit, interp):
                keep = False
                break
        if keep:
            positive.append((r.head, pos))
    model: set = set()
    changed = True
    while changed:
        changed = False
        for head, pos in positive:
            if head not in model and all(a in model for a in pos):
                model.add(head)
                changed = True
    return model


def check_stable(g: GroundProgram, interp) -> bool:
    """Gelfond-Lifschitz test of ``interp`` against ``g``."""
    interp = set(interp)
    rules = list(g.rules) + [Rule(f, ()) for f in g.facts]
    for r in rules:
        if _body_holds(r, interp) and (r.head is None or r.head not in interp):
            return False
    return _reduct_lfp(rules, interp) == interp


def violated_constraints(g: GroundProgram, interp) -> list[Rule]:
    """Ground constraints of ``g`` whose body holds in ``interp``."""
    interp = set(interp)
    return [r for r in g.rules if r.head is None and _body_holds(r, interp)]


def _emit(compiled: CompiledProgram, hi) -> frozenset:
    return frozenset(compiled.atoms[i] for i in range(compiled.n_atoms) if hi[i])


def solve(g: GroundProgram, limit: Optional[int] = 1, timeout: Optional[float] = None,
          backend: str = None, deadline: Optional[float] = None) -> list[frozenset]:
    """Enumerate up to ``limit`` stable models (all of them when ``limit`` is None).

    Depth-first search over branch atoms in canonical order, true branch
    first, with bound propagation at every node.  Each model is re-checked
    with :func:`check_stable` before it is returned.
    """
    start = time.perf_counter()
    if timeout is not None:
        deadline = start + timeout if deadline is None else min(deadline, start + timeout)
    compiled = CompiledProgram(g.rules, g.facts)
    prop = compiled.propagator(backend)
    n = compiled.n_atoms
    branch = compiled.branch
    models: list[frozenset] = []
    lo, hi = bytearray(n), bytearray(n)
    stack = [(bytearray([2]) * n, 0)]
    nodes = 0
    while stack:
        assign, cursor = stack.pop()
        nodes += 1
        if deadline is not None and time.perf_counter() > deadline:
            raise SolveTimeout(time.perf_counter() - start)
        if prop.propagate(assign, lo, hi, True):
            continue
        while cursor < len(branch) and assign[branch[cursor]] != 2:
            cursor += 1
        if cursor == len(branch):
            if lo != hi:
                # undecided atoms left; cannot happen once all branch atoms are fixed
                raise AssertionError("propagation did not converge on a total assignment")
            model = _emit(compiled, hi)
            if not check_stable(g, model):
                raise AssertionError(f"solver produced a non-stable model: {sorted(map(str, model))}")
            models.append(model)
            if limit is not None and len(models) >= limit:
                break
            continue
        x = branch[cursor]
        neg = bytearray(assign)
        neg[x] = 0
        assign[x] = 1
        stack.append((neg, cursor + 1))
        stack.append((assign, cursor + 1))
    return models


def enumerate_brute_force(g: GroundProgram, cap: int = BRUTE_FORCE_CAP) -> list[frozenset]:
    """All stable models by exhaustive enumeration.

    Every subset ``S`` of the atoms that occur negatively or inside aggregates
    is tried; the reduct's least model for ``S`` is the only candidate whose
    intersection with those atoms can be ``S``.  Candidates are confirmed
    with :func:`check_stable`.
    """
    atoms = sorted(g.atoms(), key=Atom.sort_key)
    if len(atoms) > cap:
        raise TooManyAtoms(len(atoms), cap)
    rules = list(g.rules) + [Rule(f, ()) for f in g.facts]
    open_atoms = set()
    for r in rules:
        for lit in r.body:
            if isinstance(lit, Literal) and lit.negated:
                open_atoms.add(lit.atom)
            elif isinstance(lit, Aggregate):
                for el in lit.elements:
                    open_atoms.update(c.atom for c in el.condition if isinstance(c, Literal))
    open_atoms = sorted(open_atoms, key=Atom.sort_key)
    models = []
    for mask in range(1 << len(open_atoms)):
        guess = {a for i, a in enumerate(open_atoms) if mask >> i & 1}
        candidate = _reduct_lfp(rules, guess)
        if {a for a in open_atoms if a in candidate} != guess:
            continue
        if check_stable(g, candidate):
            models.append(frozenset(candidate))
    return models
