"""Grounding: a naive Herbrand instantiator and a simplifying semi-naive one."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Optional

from .compiled import CompiledProgram
from .errors import GroundingTimeout, UnsafeRule, UniverseTooLarge
from .parser import render_program
from .syntax import (
    Aggregate,
    AggregateElement,
    Atom,
    Comparison,
    Literal,
    Program,
    Rule,
    Variable,
    atom_vars,
    check_safety,
    compare,
    literal_vars,
    term_key,
)

DEFAULT_LIMIT = 10**7


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple
    facts: tuple  # determined facts, canonical order

    def to_program(self) -> Program:
        return Program(self.rules, self.facts)

    def render(self) -> str:
        return render_program(self.to_program())

    def atoms(self) -> set[Atom]:
        out = set(self.facts)
        for r in self.rules:
            if r.head is not None:
                out.add(r.head)
            for lit in r.body:
                if isinstance(lit, Literal):
                    out.add(lit.atom)
                elif isinstance(lit, Aggregate):
                    for el in lit.elements:
                        out.update(c.atom for c in el.condition if isinstance(c, Literal))
        return out


@dataclass(frozen=True)
class GroundingStats:
    rule_count: int
    constraint_count: int
    atom_occurrences: int
    bytes: int
    elapsed: float = 0.0


def grounding_stats(g: GroundProgram, elapsed: float = 0.0) -> GroundingStats:
    occurrences = len(g.facts)
    for r in g.rules:
        occurrences += r.head is not None
        for lit in r.body:
            if isinstance(lit, Literal):
                occurrences += 1
            elif isinstance(lit, Aggregate):
                occurrences += sum(isinstance(c, Literal) for el in lit.elements for c in el.condition)
    return GroundingStats(
        rule_count=len(g.rules),
        constraint_count=sum(r.head is None for r in g.rules),
        atom_occurrences=occurrences,
        bytes=len(g.render().encode()),
        elapsed=elapsed,
    )


def _require_safe(p: Program):
    for r in p.rules:
        v = check_safety(r)
        if v:
            raise UnsafeRule(r, v)


def _subst(t, b):
    return b[t.name] if isinstance(t, Variable) else t


def _ground_atom(a: Atom, b: dict) -> Atom:
    if not a.args:
        return a
    return Atom(a.predicate, tuple(_subst(t, b) for t in a.args))


def _comparison_holds(c: Comparison, b: dict) -> bool:
    return compare(_subst(c.lhs, b), c.op, _subst(c.rhs, b))


# --- naive Herbrand instantiation ---------------------------------------


def _universe(p: Program) -> list:
    consts = set()

    def add_term(t):
        if not isinstance(t, Variable):
            consts.add(t)

    def add_lit(lit):
        if isinstance(lit, Literal):
            for t in lit.atom.args:
                add_term(t)
        elif isinstance(lit, Comparison):
            add_term(lit.lhs)
            add_term(lit.rhs)
        elif isinstance(lit, Aggregate):
            if lit.left:
                add_term(lit.left[0])
            if lit.right:
                add_term(lit.right[1])
            for el in lit.elements:
                for t in el.terms:
                    add_term(t)
                for c in el.condition:
                    add_lit(c)

    for f in p.facts:
        for t in f.args:
            add_term(t)
    for r in p.rules:
        if r.head is not None:
            for t in r.head.args:
                add_term(t)
        for lit in r.body:
            add_lit(lit)
    return sorted(consts, key=term_key)


def _global_names(r: Rule) -> list[str]:
    names: dict[str, None] = {}
    if r.head is not None:
        for v in atom_vars(r.head):
            names.setdefault(v)
    for lit in r.body:
        if isinstance(lit, Aggregate):
            for g in (lit.left and lit.left[0], lit.right and lit.right[1]):
                if isinstance(g, Variable):
                    names.setdefault(g.name)
        else:
            for v in literal_vars(lit):
                names.setdefault(v)
    return list(names)


def _instantiate_literal(lit, b: dict):
    if isinstance(lit, Literal):
        return Literal(_ground_atom(lit.atom, b), lit.negated)
    raise TypeError(lit)


def herbrand_instantiate(p: Program, limit: int = DEFAULT_LIMIT) -> GroundProgram:
    """Instantiate every rule with every assignment over the constants of ``p``.

    Builtins are evaluated (rules with a false builtin are dropped); nothing
    else is simplified.
    """
    _require_safe(p)
    universe = _universe(p)
    total = 0
    for r in p.rules:
        total += len(universe) ** len(_global_names(r))
        if total > limit:
            raise UniverseTooLarge(limit)
    out = []
    for r in p.rules:
        names = _global_names(r)
        for values in itertools.product(universe, repeat=len(names)):
            b = dict(zip(names, values))
            body = []
            alive = True
            for lit in r.body:
                if isinstance(lit, Comparison):
                    if not _comparison_holds(lit, b):
                        alive = False
                        break
                elif isinstance(lit, Literal):
                    body.append(_instantiate_literal(lit, b))
                else:
                    body.append(_herbrand_aggregate(lit, b, universe, limit))
            if alive:
                head = _ground_atom(r.head, b) if r.head is not None else None
                out.append(Rule(head, tuple(body)))
    return GroundProgram(tuple(out), tuple(sorted(set(p.facts), key=Atom.sort_key)))


def _herbrand_aggregate(g: Aggregate, b: dict, universe, limit) -> Aggregate:
    elements = []
    for el in g.elements:
        local: dict[str, None] = {}
        for t in el.terms:
            if isinstance(t, Variable) and t.name not in b:
                local.setdefault(t.name)
        for c in el.condition:
            for v in literal_vars(c):
                if v not in b:
                    local.setdefault(v)
        names = list(local)
        if len(universe) ** len(names) > limit:
            raise UniverseTooLarge(limit)
        for values in itertools.product(universe, repeat=len(names)):
            bb = dict(b)
            bb.update(zip(names, values))
            cond = []
            alive = True
            for c in el.condition:
                if isinstance(c, Comparison):
                    if not _comparison_holds(c, bb):
                        alive = False
                        break
                else:
                    cond.append(_instantiate_literal(c, bb))
            if alive:
                elements.append(AggregateElement(tuple(_subst(t, bb) for t in el.terms), tuple(cond)))
    left = (_subst(g.left[0], b), g.left[1]) if g.left else None
    right = (g.right[0], _subst(g.right[1], b)) if g.right else None
    return Aggregate(tuple(dict.fromkeys(elements)), left, right)


# --- semi-naive instantiation -------------------------------------------


class _Relation:
    __slots__ = ("tuples", "indexes")

    def __init__(self):
        self.tuples: set = set()
        self.indexes: dict = {}

    def add(self, t) -> bool:
        if t in self.tuples:
            return False
        self.tuples.add(t)
        for positions, idx in self.indexes.items():
            idx.setdefault(tuple(t[i] for i in positions), []).append(t)
        return True

    def lookup(self, positions, key):
        if not positions:
            return self.tuples
        idx = self.indexes.get(positions)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[i] for i in positions), []).append(t)
            self.indexes[positions] = idx
        return idx.get(key, ())


class _Step:
    """Match one positive atom: key positions, new-variable outputs, checks."""

    __slots__ = ("sig", "key_pos", "key_src", "out", "same", "comps")

    def __init__(self, atom: Atom, bound: set):
        self.sig = atom.signature
        key_pos, key_src, out, same = [], [], [], []
        first_new: dict[str, int] = {}
        for i, t in enumerate(atom.args):
            if isinstance(t, Variable):
                if t.name in bound:
                    key_pos.append(i)
                    key_src.append(t)
                elif t.name in first_new:
                    same.append((first_new[t.name], i))
                else:
                    first_new[t.name] = i
                    out.append((i, t.name))
            else:
                key_pos.append(i)
                key_src.append(t)
        self.key_pos = tuple(key_pos)
        self.key_src = tuple(key_src)
        self.out = tuple(out)
        self.same = tuple(same)
        self.comps = ()


class _Plan:
    def __init__(self, atoms: list[Atom], comps: list[Comparison], bound: set):
        bound = set(bound)
        self.pre = tuple(c for c in comps if set(literal_vars(c)) <= bound)
        pending = [c for c in comps if c not in self.pre]
        self.steps = []
        for a in atoms:
            step = _Step(a, bound)
            bound |= set(atom_vars(a))
            ready = [c for c in pending if set(literal_vars(c)) <= bound]
            pending = [c for c in pending if c not in ready]
            step.comps = tuple(ready)
            self.steps.append(step)
        if pending:
            raise ValueError(f"comparisons with unbound variables: {pending}")


def _order_atoms(atoms: list[Atom], bound: set, first: Optional[int] = None) -> list[Atom]:
    """Greedy join order: most bound arguments first, original order on ties."""
    remaining = list(range(len(atoms)))
    order = []
    bound = set(bound)
    if first is not None:
        remaining.remove(first)
        order.append(first)
        bound |= set(atom_vars(atoms[first]))
    while remaining:
        def score(i):
            a = atoms[i]
            fixed = sum(1 for t in a.args if not isinstance(t, Variable) or t.name in bound)
            return (-(fixed == len(a.args)), -fixed, i)
        best = min(remaining, key=score)
        remaining.remove(best)
        order.append(best)
        bound |= set(atom_vars(atoms[best]))
    return [atoms[i] for i in order]


def _join(plan: _Plan, rels: dict, binding: dict, first_source=None):
    for c in plan.pre:
        if not _comparison_holds(c, binding):
            return
    steps = plan.steps
    n = len(steps)

    def rec(k, b):
        if k == n:
            yield b
            return
        st = steps[k]
        if k == 0 and first_source is not None:
            candidates = first_source
            if st.key_pos:
                key = tuple(_subst(t, b) for t in st.key_src)
                candidates = [t for t in candidates if tuple(t[i] for i in st.key_pos) == key]
        else:
            rel = rels.get(st.sig)
            if rel is None:
                return
            key = tuple(_subst(t, b) for t in st.key_src)
            candidates = rel.lookup(st.key_pos, key)
        for t in candidates:
            if st.same and any(t[i] != t[j] for i, j in st.same):
                continue
            if st.out:
                nb = dict(b)
                for i, name in st.out:
                    nb[name] = t[i]
            else:
                nb = b
            ok = True
            for c in st.comps:
                if not _comparison_holds(c, nb):
                    ok = False
                    break
            if ok:
                yield from rec(k + 1, nb)

    yield from rec(0, binding)


class _RuleInfo:
    def __init__(self, rule: Rule):
        self.rule = rule
        self.pos = rule.positive_atoms()
        self.comps = [lit for lit in rule.body if isinstance(lit, Comparison)]
        self.names = _global_names(rule)
        self.plans = {}
        for i in range(len(self.pos)):
            self.plans[i] = _Plan(_order_atoms(self.pos, set(), i), self.comps, set())
        if not self.pos:
            self.plans[None] = _Plan([], self.comps, set())
        self.element_plans = {}


def _element_plan(info: _RuleInfo, gi: int, ei: int, el: AggregateElement, bound: set) -> _Plan:
    key = (gi, ei)
    plan = info.element_plans.get(key)
    if plan is None:
        atoms = [c.atom for c in el.condition if isinstance(c, Literal) and not c.negated]
        comps = [c for c in el.condition if isinstance(c, Comparison)]
        plan = _Plan(_order_atoms(atoms, bound), comps, bound)
        info.element_plans[key] = plan
    return plan


def _instantiate(p: Program, limit: int, deadline: Optional[float]):
    """Semi-naive evaluation of the positive projection, recording instances."""
    rels: dict = {}

    def rel(sig):
        r = rels.get(sig)
        if r is None:
            r = rels[sig] = _Relation()
        return r

    delta: dict = {}
    for f in p.facts:
        if rel(f.signature).add(f.args):
            delta.setdefault(f.signature, []).append(f.args)

    infos = [_RuleInfo(r) for r in p.rules]
    seen = [set() for _ in infos]
    instances: list[tuple[int, dict]] = []
    count = 0

    def record(ri, b, new):
        nonlocal count
        info = infos[ri]
        key = tuple(b[v] for v in info.names)
        if key in seen[ri]:
            return
        seen[ri].add(key)
        instances.append((ri, b))
        count += 1
        if count > limit:
            raise UniverseTooLarge(limit)
        if deadline is not None and count % 2048 == 0 and time.perf_counter() > deadline:
            raise GroundingTimeout("grounding exceeded its time budget")
        head = info.rule.head
        if head is not None:
            h = _ground_atom(head, b)
            if h.args not in rel(h.signature).tuples:
                new.setdefault(h.signature, set()).add(h.args)

    new: dict = {}
    for ri, info in enumerate(infos):
        if not info.pos:
            for b in _join(info.plans[None], rels, {}):
                record(ri, b, new)
    while True:
        for sig, tuples in new.items():
            r = rel(sig)
            for t in tuples:
                if r.add(t):
                    delta.setdefault(sig, []).append(t)
        new = {}
        if not delta:
            break
        current, delta = delta, {}
        for ri, info in enumerate(infos):
            for i, a in enumerate(info.pos):
                src = current.get(a.signature)
                if not src:
                    continue
                for b in _join(info.plans[i], rels, {}, src):
                    record(ri, b, new)
    return infos, instances, rels


def _ground_instance(info: _RuleInfo, b: dict, rels) -> Rule:
    body = []
    for gi, lit in enumerate(info.rule.body):
        if isinstance(lit, Literal):
            body.append(Literal(_ground_atom(lit.atom, b), lit.negated))
        elif isinstance(lit, Aggregate):
            elements = {}
            bound = set(b)
            for ei, el in enumerate(lit.elements):
                plan = _element_plan(info, gi, ei, el, bound)
                for eb in _join(plan, rels, b):
                    cond = tuple(
                        Literal(_ground_atom(c.atom, eb), c.negated)
                        for c in el.condition if isinstance(c, Literal)
                    )
                    elements[AggregateElement(tuple(_subst(t, eb) for t in el.terms), cond)] = None
            left = (_subst(lit.left[0], b), lit.left[1]) if lit.left else None
            right = (lit.right[0], _subst(lit.right[1], b)) if lit.right else None
            body.append(Aggregate(tuple(elements), left, right))
    head = _ground_atom(info.rule.head, b) if info.rule.head is not None else None
    return Rule(head, tuple(body))


def _simplify_aggregate(g: Aggregate, certain: set, possible: set):
    """Return (status, aggregate): status True/False when decided, else None."""
    tuples: dict[tuple, list] = {}
    for el in g.elements:
        cond = []
        alive = True
        for c in el.condition:
            if c.negated:
                if c.atom in certain:
                    alive = False
                    break
                if c.atom in possible:
                    cond.append(c)
            else:
                if c.atom not in possible:
                    alive = False
                    break
                if c.atom not in certain:
                    cond.append(c)
        if alive:
            tuples.setdefault(el.terms, []).append(tuple(cond))
    lo = sum(1 for conds in tuples.values() if any(not c for c in conds))
    hi = len(tuples)
    values = [g.holds_for(k) for k in range(lo, hi + 1)]
    if all(values):
        return True, None
    if not any(values):
        return False, None
    elements = []
    for terms, conds in tuples.items():
        if any(not c for c in conds):
            elements.append(AggregateElement(terms, ()))
            continue
        for c in dict.fromkeys(conds):
            elements.append(AggregateElement(terms, c))
    return None, Aggregate(tuple(elements), g.left, g.right)


def _simplify_rule(r: Rule, certain: set, possible: set) -> Optional[Rule]:
    if r.head is not None and r.head in certain:
        return None
    body = []
    for lit in r.body:
        if isinstance(lit, Literal):
            if lit.negated:
                if lit.atom in certain:
                    return None
                if lit.atom in possible:
                    body.append(lit)
            else:
                if lit.atom not in possible:
                    return None
                if lit.atom not in certain:
                    body.append(lit)
        else:
            status, g = _simplify_aggregate(lit, certain, possible)
            if status is False:
                return None
            if status is None:
                body.append(g)
    return Rule(r.head, tuple(body))


def ground(p: Program, keep_symmetric: bool = False, limit: int = DEFAULT_LIMIT,
           deadline: Optional[float] = None, backend: str = None) -> GroundProgram:
    """Instantiate ``p`` over derivable atoms only and simplify the result.

    Duplicate rules are merged; unless ``keep_symmetric`` is set, rules whose
    bodies differ only in literal order count as duplicates.
    """
    _require_safe(p)
    infos, instances, rels = _instantiate(p, limit, deadline)
    raw = [(ri, _ground_instance(infos[ri], b, rels)) for ri, b in instances]
    if deadline is not None and time.perf_counter() > deadline:
        raise GroundingTimeout("grounding exceeded its time budget")
    compiled = CompiledProgram([r for _, r in raw], p.facts)
    certain, possible = compiled.bounds(backend)
    if not certain <= possible:
        # no interpretation fits both bounds: the program has no stable model
        return GroundProgram((Rule(None, ()),), tuple(sorted(p.facts, key=Atom.sort_key)))

    out: dict = {}
    for ri, r in raw:
        s = _simplify_rule(r, certain, possible)
        if s is None:
            continue
        if s.head is not None and not s.body:
            certain.add(s.head)
            continue
        body_key = frozenset(s.body) if not keep_symmetric else s.body
        key = (s.head, body_key)
        if key not in out:
            out[key] = (ri, s)
    rules = sorted(out.values(), key=lambda x: (x[0], str(x[1])))
    final = tuple(r for _, r in rules if r.head is None or r.head not in certain)
    facts = tuple(sorted(certain, key=Atom.sort_key))
    return GroundProgram(final, facts)
