"""Abstract syntax for the supported ASP fragment.

Terms are plain Python values: ``int`` for integers, ``str`` for constant
symbols and :class:`Variable` for variables.  Every node is an immutable,
hashable dataclass so programs can be shared freely.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[int, str, Variable]
Substitution = dict  # variable name -> Term

COMPARISON_OPS = ("<", "<=", ">", ">=", "=", "<>")

# negation of a comparison operator (used for aggregate guards)
NEGATED_OP = {"<": ">=", ">=": "<", "<=": ">", ">": "<=", "=": "<>", "<>": "="}
# a OP b  <=>  b FLIPPED[OP] a
FLIPPED_OP = {"<": ">", ">": "<", "<=": ">=", ">=": "<=", "=": "=", "<>": "<>"}


def term_key(t: Term):
    """Total order on ground terms: integers first, then symbols."""
    if isinstance(t, int):
        return (0, t, "")
    if isinstance(t, str):
        return (1, 0, t)
    return (2, 0, t.name)


_OPS = {
    "<": operator.lt, "<=": operator.le, ">": operator.gt,
    ">=": operator.ge, "=": operator.eq, "<>": operator.ne,
}


def compare(lhs: Term, op: str, rhs: Term) -> bool:
    if type(lhs) is type(rhs) and type(lhs) in (int, str):
        fn = _OPS.get(op)
        if fn is not None:
            return fn(lhs, rhs)
    a, b = term_key(lhs), term_key(rhs)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "=":
        return a == b
    if op == "<>":
        return a != b
    raise ValueError(f"unknown comparison operator {op!r}")


def render_term(t: Term) -> str:
    return str(t)


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))

    def is_ground(self) -> bool:
        return not any(isinstance(a, Variable) for a in self.args)

    def sort_key(self):
        return (self.predicate, len(self.args), tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(render_term(a) for a in self.args)})"


@dataclass(frozen=True, slots=True)
class Literal:
    """A positive or default-negated atom."""

    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True, slots=True)
class Comparison:
    lhs: Term
    op: str
    rhs: Term

    def __str__(self) -> str:
        return f"{render_term(self.lhs)} {self.op} {render_term(self.rhs)}"


@dataclass(frozen=True, slots=True)
class AggregateElement:
    terms: tuple
    condition: tuple = ()

    def __str__(self) -> str:
        head = ",".join(render_term(t) for t in self.terms)
        if not self.condition:
            return head
        return f"{head}: {', '.join(str(lit) for lit in self.condition)}"


@dataclass(frozen=True, slots=True)
class Aggregate:
    """A ``#count`` aggregate with optional left and right guards.

    ``left`` is ``(term, op)`` meaning ``term op count``; ``right`` is
    ``(op, term)`` meaning ``count op term``.
    """

    elements: tuple = ()
    left: Optional[tuple] = None
    right: Optional[tuple] = None

    def guards(self) -> list[tuple[str, Term]]:
        """Guards normalised to ``count op term`` form."""
        out = []
        if self.left is not None:
            term, op = self.left
            out.append((FLIPPED_OP[op], term))
        if self.right is not None:
            out.append(self.right)
        return out

    def holds_for(self, count: int) -> bool:
        return all(compare(count, op, t) for op, t in self.guards())

    def __str__(self) -> str:
        body = "; ".join(str(e) for e in self.elements)
        text = f"#count{{{body}}}"
        if self.left is not None:
            text = f"{render_term(self.left[0])} {self.left[1]} {text}"
        if self.right is not None:
            text = f"{text} {self.right[0]} {render_term(self.right[1])}"
        return text


BodyLiteral = Union[Literal, Comparison, Aggregate]


@dataclass(frozen=True, slots=True)
class Rule:
    head: Optional[Atom]
    body: tuple = ()

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def positive_atoms(self) -> list[Atom]:
        return [lit.atom for lit in self.body if isinstance(lit, Literal) and not lit.negated]

    def negative_atoms(self) -> list[Atom]:
        return [lit.atom for lit in self.body if isinstance(lit, Literal) and lit.negated]

    def aggregates(self) -> list[Aggregate]:
        return [lit for lit in self.body if isinstance(lit, Aggregate)]

    def __str__(self) -> str:
        body = ", ".join(str(lit) for lit in self.body)
        if self.head is None:
            return f":- {body}." if body else ":- ."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


@dataclass(frozen=True, slots=True)
class Program:
    rules: tuple = ()
    facts: tuple = ()

    def __post_init__(self):
        for f in self.facts:
            if not f.is_ground():
                raise ValueError(f"fact {f} is not ground")

    def with_facts(self, facts: Iterable[Atom]) -> "Program":
        return Program(self.rules, tuple(self.facts) + tuple(facts))

    def constraints(self) -> list[Rule]:
        return [r for r in self.rules if r.head is None]


# --- variables -----------------------------------------------------------


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Variable):
        yield t.name


def atom_vars(a: Atom) -> Iterator[str]:
    for t in a.args:
        if isinstance(t, Variable):
            yield t.name


def literal_vars(lit) -> Iterator[str]:
    if isinstance(lit, Literal):
        yield from atom_vars(lit.atom)
    elif isinstance(lit, Comparison):
        yield from term_vars(lit.lhs)
        yield from term_vars(lit.rhs)
    elif isinstance(lit, Aggregate):
        if lit.left is not None:
            yield from term_vars(lit.left[0])
        if lit.right is not None:
            yield from term_vars(lit.right[1])
        for el in lit.elements:
            for t in el.terms:
                yield from term_vars(t)
            for c in el.condition:
                yield from literal_vars(c)
    else:
        raise TypeError(f"not a literal: {lit!r}")


def rule_vars(r: Rule) -> list[str]:
    """Variables of a rule in order of first occurrence (head first)."""
    seen: dict[str, None] = {}
    if r.head is not None:
        for v in atom_vars(r.head):
            seen.setdefault(v)
    for lit in r.body:
        for v in literal_vars(lit):
            seen.setdefault(v)
    return list(seen)


def global_vars(r: Rule) -> list[str]:
    """Variables occurring outside aggregate elements."""
    seen: dict[str, None] = {}
    if r.head is not None:
        for v in atom_vars(r.head):
            seen.setdefault(v)
    for lit in r.body:
        if isinstance(lit, Aggregate):
            for g in (lit.left and lit.left[0], lit.right and lit.right[1]):
                if isinstance(g, Variable):
                    seen.setdefault(g.name)
        else:
            for v in literal_vars(lit):
                seen.setdefault(v)
    return list(seen)


# --- substitution --------------------------------------------------------


def subst_term(t: Term, s: Substitution) -> Term:
    if isinstance(t, Variable):
        return s.get(t.name, t)
    return t


def subst_atom(a: Atom, s: Substitution) -> Atom:
    if not s or not a.args:
        return a
    return Atom(a.predicate, tuple(subst_term(t, s) for t in a.args))


def _subst_literal(lit, s: Substitution):
    if isinstance(lit, Literal):
        return Literal(subst_atom(lit.atom, s), lit.negated)
    if isinstance(lit, Comparison):
        return Comparison(subst_term(lit.lhs, s), lit.op, subst_term(lit.rhs, s))
    if isinstance(lit, Aggregate):
        elements = tuple(
            AggregateElement(
                tuple(subst_term(t, s) for t in el.terms),
                tuple(_subst_literal(c, s) for c in el.condition),
            )
            for el in lit.elements
        )
        left = (subst_term(lit.left[0], s), lit.left[1]) if lit.left else None
        right = (lit.right[0], subst_term(lit.right[1], s)) if lit.right else None
        return Aggregate(elements, left, right)
    raise TypeError(f"not a literal: {lit!r}")


def apply_substitution(x, s: Substitution):
    """Apply ``s`` to a term, atom, literal or rule; unbound variables stay."""
    if isinstance(x, Rule):
        head = subst_atom(x.head, s) if x.head is not None else None
        return Rule(head, tuple(_subst_literal(lit, s) for lit in x.body))
    if isinstance(x, Atom):
        return subst_atom(x, s)
    if isinstance(x, (Literal, Comparison, Aggregate)):
        return _subst_literal(x, s)
    if isinstance(x, (int, str, Variable)):
        return subst_term(x, s)
    raise TypeError(f"cannot substitute into {type(x).__name__}")


def rename_rule(r: Rule, mapping: dict[str, str]) -> Rule:
    return apply_substitution(r, {old: Variable(new) for old, new in mapping.items()})


def _walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Variable) and t.name in s:
        t = s[t.name]
    return t


def unify(a: Atom, b: Atom) -> Optional[Substitution]:
    """Most general unifier of two atoms, or ``None``.

    When two variables meet, the variable of ``b`` is bound to the term of
    ``a``; callers rely on this to keep the variables of ``a``.
    """
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    s: Substitution = {}
    for x, y in zip(a.args, b.args):
        x, y = _walk(x, s), _walk(y, s)
        if x == y:
            continue
        if isinstance(y, Variable):
            s[y.name] = x
        elif isinstance(x, Variable):
            s[x.name] = y
        else:
            return None
    # resolve chains so the result is idempotent
    return {k: _walk(v, s) for k, v in s.items()}


# --- safety --------------------------------------------------------------


@dataclass(frozen=True)
class SafetyViolation:
    variable: str
    position: str

    def __str__(self) -> str:
        return f"variable {self.variable} unbound in {self.position}"


def check_safety(r: Rule) -> list[SafetyViolation]:
    """Unbound variables, each reported once at its first unsafe position."""
    bound = {v for a in r.positive_atoms() for v in atom_vars(a)}
    out: list[SafetyViolation] = []
    seen: set = set()

    def flag(v: str, pos: str):
        if v not in bound and v not in seen:
            seen.add(v)
            out.append(SafetyViolation(v, pos))

    if r.head is not None:
        for v in atom_vars(r.head):
            flag(v, "head")
    for i, lit in enumerate(r.body):
        if isinstance(lit, Literal):
            if lit.negated:
                for v in atom_vars(lit.atom):
                    flag(v, f"body[{i}]")
        elif isinstance(lit, Comparison):
            for v in literal_vars(lit):
                flag(v, f"body[{i}]")
        elif isinstance(lit, Aggregate):
            for g in (lit.left and lit.left[0], lit.right and lit.right[1]):
                if isinstance(g, Variable):
                    flag(g.name, f"body[{i}] guard")
            for j, el in enumerate(lit.elements):
                local = bound | {
                    v for c in el.condition
                    if isinstance(c, Literal) and not c.negated
                    for v in atom_vars(c.atom)
                }
                names = [v for t in el.terms for v in term_vars(t)]
                names += [v for c in el.condition for v in literal_vars(c)]
                for v in names:
                    pos = f"body[{i}] element[{j}]"
                    if v not in local and (v, pos) not in seen:
                        seen.add((v, pos))
                        out.append(SafetyViolation(v, pos))
    return out
