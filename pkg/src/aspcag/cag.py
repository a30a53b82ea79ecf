"""Constraint-aware guessing: prune guess rules with negated filter conditions.

A guess rule ``r`` whose head unifies with a positive atom ``a_c`` of a
constraint ``c`` receives the filter ``(body(c) - a_c)γ``; the filter's
negation is appended to ``r`` as ``#count{1: ...} < 1``.  Constraints can be
unfolded through positive definitions to obtain further filter sources.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .syntax import (
    FLIPPED_OP,
    NEGATED_OP,
    Aggregate,
    AggregateElement,
    Atom,
    Comparison,
    Literal,
    Program,
    Rule,
    Variable,
    apply_substitution,
    global_vars,
    literal_vars,
    rule_vars,
    unify,
)

log = logging.getLogger(__name__)

DEFAULT_UNFOLD_DEPTH = 2
_PERMUTATION_LIMIT = 6


@dataclass(frozen=True)
class GuessCheckPartition:
    guess_rules: tuple
    check_rules: tuple


@dataclass(frozen=True)
class FilterCondition:
    literals: tuple
    source_constraint: Rule
    matched_atom_index: int
    unifier: dict = field(compare=False, hash=False)
    derived: bool = False

    def __str__(self) -> str:
        return "{" + ", ".join(str(lit) for lit in self.literals) + "}"


@dataclass(frozen=True)
class FilteredRule:
    base: Rule
    added_filters: tuple

    @property
    def rule(self) -> Rule:
        return Rule(self.base.head, self.base.body + self.added_filters)


def is_guess_rule(r: Rule) -> bool:
    return r.head is not None and any(isinstance(l, Literal) and l.negated for l in r.body)


def guess_check_partition(p: Program) -> GuessCheckPartition:
    guess, check = [], []
    for r in p.rules:
        (guess if is_guess_rule(r) else check).append(r)
    return GuessCheckPartition(tuple(guess), tuple(check))


# --- canonical forms ------------------------------------------------------


def _normalize(lit):
    if isinstance(lit, Comparison):
        lhs, op, rhs = lit.lhs, lit.op, lit.rhs
        if op in (">", ">="):
            lhs, op, rhs = rhs, FLIPPED_OP[op], lhs
        elif op in ("=", "<>") and str(lhs) > str(rhs):
            lhs, rhs = rhs, lhs
        return Comparison(lhs, op, rhs)
    return lit


def canonical_form(literals: Iterable, fixed: Iterable[str] = ()) -> tuple:
    """Renaming-invariant key of a literal set.

    Variables in ``fixed`` keep their names; the others are renumbered.  For
    up to six free variables every numbering is tried and the least sorted
    rendering wins, which makes the key exact.
    """
    lits = [_normalize(l) for l in literals]
    fixed = set(fixed)
    free: dict[str, None] = {}
    for l in lits:
        for v in literal_vars(l):
            if v not in fixed:
                free.setdefault(v)
    names = list(free)

    def render(order):
        s = {v: Variable(f"_V{i}") for i, v in enumerate(order)}
        return tuple(sorted(str(_normalize(apply_substitution(l, s))) for l in lits))

    if len(names) <= _PERMUTATION_LIMIT:
        return min(render(perm) for perm in itertools.permutations(names))
    blind = sorted(lits, key=lambda l: str(apply_substitution(l, {v: Variable("_") for v in names})))
    order: dict[str, None] = {}
    for l in blind:
        for v in literal_vars(l):
            if v not in fixed:
                order.setdefault(v)
    return render(list(order))


def rule_key(r: Rule) -> tuple:
    """Key of a rule that ignores body order and the names of variables
    local to each aggregate element; global variables keep their names."""
    fixed = set(global_vars(r))
    parts = []
    for lit in r.body:
        if isinstance(lit, Aggregate):
            els = sorted(repr((tuple(map(str, el.terms)), canonical_form(el.condition, fixed)))
                         for el in lit.elements)
            parts.append(f"{lit.left}|{lit.right}|{els}")
        else:
            parts.append(str(_normalize(lit)))
    return (str(r.head), tuple(sorted(parts)))


# --- renaming helpers -------------------------------------------------------

_SEP = "#"


def _rename_apart(r: Rule, tag: str) -> Rule:
    return apply_substitution(r, {v: Variable(f"{v}{_SEP}{tag}") for v in rule_vars(r)})


def _restore_names(lits: list, used: set[str], always_number: bool) -> tuple[list, dict]:
    """Give internal ``V#tag`` variables readable names not clashing with ``used``."""
    mapping = {}
    for l in lits:
        for v in literal_vars(l):
            if _SEP in v and v not in mapping:
                base = v.split(_SEP, 1)[0]
                if not always_number and base not in used:
                    name = base
                else:
                    i = 1
                    while f"{base}{i}" in used:
                        i += 1
                    name = f"{base}{i}"
                used.add(name)
                mapping[v] = Variable(name)
    return [apply_substitution(l, mapping) for l in lits], mapping


# --- unfolding --------------------------------------------------------------


def _has_aggregate(r: Rule) -> bool:
    return any(isinstance(l, Aggregate) for l in r.body)


def definition_rules(p: Program) -> list[Rule]:
    """Positive, aggregate-free, non-guess rules with a head."""
    return [r for r in p.rules if r.head is not None and not is_guess_rule(r) and not _has_aggregate(r)]


def unfold_constraints(p: Program, depth: int = DEFAULT_UNFOLD_DEPTH) -> list[Rule]:
    """Constraints entailed by ``p``, obtained by replacing positive atoms of
    aggregate-free constraints with bodies of matching definitions, up to
    ``depth`` replacements."""
    defs = definition_rules(p)
    frontier = [c for c in p.constraints() if not _has_aggregate(c)]
    seen = {canonical_form(c.body) for c in frontier}
    derived: list[Rule] = []
    tag = 0
    for _ in range(depth):
        nxt = []
        for c in frontier:
            for i, lit in enumerate(c.body):
                if not isinstance(lit, Literal) or lit.negated:
                    continue
                for d in defs:
                    if d.head.signature != lit.atom.signature:
                        continue
                    tag += 1
                    dr = _rename_apart(d, f"u{tag}")
                    theta = unify(lit.atom, dr.head)
                    if theta is None:
                        continue
                    body = list(c.body[:i]) + list(dr.body) + list(c.body[i + 1:])
                    body = [apply_substitution(l, theta) for l in body]
                    body, _ = _restore_names(body, set(rule_vars(c)), always_number=True)
                    new = Rule(None, tuple(body))
                    key = canonical_form(new.body)
                    if key in seen:
                        continue
                    seen.add(key)
                    derived.append(new)
                    nxt.append(new)
        frontier = nxt
    return derived


def fully_unfolded(c: Rule, p: Program) -> bool:
    """True when no positive atom of ``c`` is defined by a definition rule."""
    heads = {d.head.signature for d in definition_rules(p)}
    return not any(a.signature in heads for a in c.positive_atoms())


def filter_sources(p: Program, depth: int = DEFAULT_UNFOLD_DEPTH) -> list[tuple[Rule, bool]]:
    """Constraints of ``p`` plus fully unfolded derived constraints."""
    out = [(c, False) for c in p.constraints()]
    out += [(d, True) for d in unfold_constraints(p, depth) if fully_unfolded(d, p)]
    return out


# --- filter conditions ------------------------------------------------------


def _conditions_from_sources(r: Rule, sources) -> list[FilterCondition]:
    if r.head is None:
        return []
    rvars = set(rule_vars(r))
    out: list[FilterCondition] = []
    seen = set()
    for k, (c, derived) in enumerate(sources):
        cr = _rename_apart(c, f"c{k}")
        for idx, lit in enumerate(cr.body):
            if not isinstance(lit, Literal) or lit.negated:
                continue
            theta = unify(r.head, lit.atom)
            if theta is None:
                continue
            eqs = [Comparison(Variable(v), "=", t) for v, t in theta.items() if v in rvars]
            csub = {v: t for v, t in theta.items() if v not in rvars}
            rest = [apply_substitution(l, csub) for j, l in enumerate(cr.body) if j != idx]
            lits, _ = _restore_names(eqs + rest, set(rvars), always_number=False)
            key = canonical_form(lits, rvars)
            if key in seen:
                continue
            seen.add(key)
            out.append(FilterCondition(tuple(lits), c, idx, dict(theta), derived))
    return out


def filter_conditions(r: Rule, p: Program, unfold_depth: int = DEFAULT_UNFOLD_DEPTH) -> list[FilterCondition]:
    """Filter conditions for guess rule ``r`` from every constraint of ``p``
    (including fully unfolded derived constraints), deduplicated up to
    renaming of the constraint's own variables."""
    return _conditions_from_sources(r, filter_sources(p, unfold_depth))


def negate_guard_aggregate(g: Aggregate) -> Optional[Aggregate]:
    if g.left is not None and g.right is not None:
        return None
    if g.left is not None:
        return Aggregate(g.elements, (g.left[0], NEGATED_OP[g.left[1]]), None)
    return Aggregate(g.elements, None, (NEGATED_OP[g.right[0]], g.right[1]))


def negate_condition(fc: FilterCondition) -> Optional[Aggregate]:
    """The literal standing for ``not fc``, or None when it cannot be
    expressed as a single literal (the filter is then skipped)."""
    aggs = [l for l in fc.literals if isinstance(l, Aggregate)]
    if not aggs:
        return Aggregate((AggregateElement((1,), tuple(fc.literals)),), None, ("<", 1))
    if len(aggs) == 1 and len(fc.literals) == 1:
        neg = negate_guard_aggregate(aggs[0])
        if neg is None:
            log.warning("skipping filter %s: two-sided aggregate guard", fc)
        return neg
    log.warning("skipping filter %s: aggregate mixed with other literals", fc)
    return None


# --- rewriting ----------------------------------------------------------------


@dataclass(frozen=True)
class RewriteEntry:
    rule: Rule
    condition: FilterCondition
    literal: Optional[Aggregate]


def _targets(p: Program, sources, only: Optional[set]) -> set:
    if only is not None:
        return set(only)
    return {a.predicate for c, _ in sources for a in c.positive_atoms()}


def cag_plan(p: Program, unfold_depth: int = DEFAULT_UNFOLD_DEPTH,
             only: Optional[Iterable[str]] = None) -> list[RewriteEntry]:
    sources = filter_sources(p, unfold_depth)
    targets = _targets(p, sources, set(only) if only is not None else None)
    entries = []
    for r in p.rules:
        if is_guess_rule(r) and r.head.predicate in targets:
            for fc in _conditions_from_sources(r, sources):
                entries.append(RewriteEntry(r, fc, negate_condition(fc)))
    return entries


def cag_rewrite(p: Program, unfold_depth: int = DEFAULT_UNFOLD_DEPTH,
                only: Optional[Iterable[str]] = None) -> Program:
    """Replace each targeted guess rule by its filtered version.

    By default every guess rule whose head predicate occurs positively in a
    filter source is targeted; ``only`` restricts this to named predicates.
    """
    plan = cag_plan(p, unfold_depth, only)
    added: dict[Rule, list] = {}
    for e in plan:
        if e.literal is not None:
            added.setdefault(e.rule, []).append(e.literal)
    rules = []
    for r in p.rules:
        if r in added:
            rules.append(FilteredRule(r, tuple(added[r])).rule)
        else:
            rules.append(r)
    return Program(tuple(rules), p.facts)
