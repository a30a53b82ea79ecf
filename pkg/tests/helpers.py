"""Random program generators shared by the property tests."""
import random

from aspcag.grounder import GroundProgram
from aspcag.parser import parse_program
from aspcag.syntax import (
    Aggregate,
    AggregateElement,
    Atom,
    Literal,
    Rule,
)

OPS = ["<", "<=", ">", ">=", "=", "<>"]


def random_ground_program(rng: random.Random, max_atoms: int = 14) -> GroundProgram:
    """Small propositional program with negation, constraints and #count."""
    n = rng.randint(1, max_atoms)
    atoms = [Atom("a", (i,)) for i in range(n)]
    rules = []
    for _ in range(rng.randint(1, 2 * n + 2)):
        body = []
        for _ in range(rng.randint(0, 3)):
            body.append(Literal(rng.choice(atoms), rng.random() < 0.45))
        if rng.random() < 0.25:
            elements = []
            for _ in range(rng.randint(1, 3)):
                cond = tuple(Literal(rng.choice(atoms), rng.random() < 0.3)
                             for _ in range(rng.randint(1, 2)))
                elements.append(AggregateElement((rng.randint(0, 2),), cond))
            bound = rng.randint(0, 3)
            if rng.random() < 0.5:
                agg = Aggregate(tuple(elements), (bound, rng.choice(OPS)), None)
            else:
                agg = Aggregate(tuple(elements), None, (rng.choice(OPS), bound))
            body.append(agg)
        head = None if rng.random() < 0.25 else rng.choice(atoms)
        rules.append(Rule(head, tuple(body)))
    facts = tuple(a for a in atoms if rng.random() < 0.1)
    return GroundProgram(tuple(rules), facts)


def even_loop(rng: random.Random, pred: str, domain: list[str], arity: int) -> list[str]:
    vs = ["X", "Y"][:arity]
    args = ",".join(vs)
    dom = ", ".join(f"{rng.choice(domain)}({v})" for v in vs)
    return [f"{pred}({args}) :- {dom}, not {pred}_n({args}).",
            f"{pred}_n({args}) :- {dom}, not {pred}({args})."]


def random_guess_check_program(rng: random.Random):
    """Non-ground guess-and-check program small enough for brute force.

    Up to two guessed predicates over a 2-3 element domain, optional
    positive definitions, and constraints drawn from comparisons, negation
    and #count aggregates.
    """
    m = rng.randint(2, 3)
    lines = [" ".join(f"d({i})." for i in range(1, m + 1))]
    if rng.random() < 0.5:
        lines.append(" ".join(f"e({i})." for i in range(1, rng.randint(1, 2) + 1)))
        domain = ["d", "e"]
    else:
        domain = ["d"]
    preds = [("p", 1)]
    if rng.random() < 0.6:
        preds.append(("q", rng.choice([1, 2]) if m == 2 else 1))
    for name, arity in preds:
        lines += even_loop(rng, name, domain, arity)
    guessed = list(preds)
    if rng.random() < 0.6:
        name, arity = rng.choice(guessed)
        if arity == 1:
            lines.append(f"r(X) :- {name}(X), d(X).")
        else:
            lines.append(f"r(X) :- {name}(X,Y).")
        guessed.append(("r", 1))
    if rng.random() < 0.3:
        lines.append("s(X) :- d(X), not p(X).")

    def atom(vars_):
        name, arity = rng.choice(guessed)
        return f"{name}({','.join(rng.choice(vars_) for _ in range(arity))})"

    for _ in range(rng.randint(1, 3)):
        vars_ = ["X", "Y", "Z"][:rng.randint(1, 3)]
        body = [f"d({v})" for v in vars_]
        body += [atom(vars_) for _ in range(rng.randint(1, 2))]
        roll = rng.random()
        if roll < 0.4 and len(vars_) > 1:
            body.append(f"{vars_[0]} {rng.choice(['<', '<>', '<='])} {vars_[1]}")
        elif roll < 0.6:
            body.append(f"not {atom(vars_)}")
        elif roll < 0.8:
            guard = rng.choice([f"{rng.randint(1, 3)} <= ", f"{rng.randint(1, 2)} > "])
            body.append(f"{guard}#count{{W: p(W)}}")
        lines.append(":- " + ", ".join(body) + ".")
    return parse_program("\n".join(lines) + "\n")
