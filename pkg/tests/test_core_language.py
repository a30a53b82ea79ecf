import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aspcag.errors import AspSyntaxError, UnsupportedConstruct
from aspcag.hcp import load_encoding
from aspcag.parser import parse_atom, parse_program, parse_rule, render_program
from aspcag.syntax import (
    Aggregate,
    AggregateElement,
    Atom,
    Comparison,
    Literal,
    Program,
    Rule,
    Variable,
    apply_substitution,
    atom_vars,
    check_safety,
    unify,
)

X, Y = Variable("X"), Variable("Y")


# --- parsing ---------------------------------------------------------------


def test_parse_single_fact():
    p = parse_program("person(1).")
    assert p.facts == (Atom("person", (1,)),)
    assert p.rules == ()


def test_parse_guess_rule():
    r = parse_rule("cabinet(C) :- cabinetDomain(C), not cabinet_n(C).")
    C = Variable("C")
    assert r.head == Atom("cabinet", (C,))
    assert r.body == (Literal(Atom("cabinetDomain", (C,))), Literal(Atom("cabinet_n", (C,)), True))


def test_parse_left_guard_aggregate():
    r = parse_rule(":- 6 <= #count { T : cabinetTOthing(C,T), thing(T) }, cabinet(C).")
    assert r.head is None
    agg, atom = r.body
    assert isinstance(agg, Aggregate)
    assert agg.left == (6, "<=") and agg.right is None
    assert len(agg.elements) == 1
    assert agg.elements[0].terms == (Variable("T"),)
    assert atom == Literal(Atom("cabinet", (Variable("C"),)))


def test_parse_aliases_and_comments():
    r = parse_rule("a(X) :- b(X,Y), X != Y, X == X. % trailing")
    assert [c.op for c in r.body[1:]] == ["<>", "="]


@pytest.mark.parametrize("name", ["hcp", "hcp_cag", "module_frame"])
def test_bundled_programs_parse(name):
    p = load_encoding(name)
    assert p.rules


def test_syntax_error_position():
    with pytest.raises(AspSyntaxError) as e:
        parse_program("a(1).\nb(X) :- c(X)\n")
    assert e.value.line == 3
    assert "'.'" in e.value.expected or "." in e.value.expected


@pytest.mark.parametrize("text,name", [
    ("a | b.", "disjunctive head"),
    ("{a}.", "choice"),
    (":- #sum{X: p(X)} > 2.", "#sum"),
    ("p(1..3).", "interval"),
    ("p(X) :- q(X,_).", "anonymous variable"),
    ("p(X+1) :- q(X).", "arithmetic term"),
])
def test_unsupported_constructs(text, name):
    with pytest.raises(UnsupportedConstruct) as e:
        parse_program(text)
    assert name in e.value.name


# --- rendering -------------------------------------------------------------


def test_render_single_fact():
    assert render_program(Program((), (Atom("person", (1,)),))) == "person(1).\n"


def test_render_filter_aggregate():
    text = "p(X) :- d(X), not q(X), #count{1: d(X), r(X,Y), X < Y} < 1.\n"
    assert render_program(parse_program(text)) == text


@pytest.mark.parametrize("name", ["hcp", "hcp_cag", "module_frame"])
def test_round_trip_bundled(name):
    p = load_encoding(name)
    assert parse_program(render_program(p)) == p


symbols = st.sampled_from(["a", "b", "foo", "x1", "cabinetTOthing"])
variables = st.sampled_from(["X", "Y", "Z", "C1", "T'"]).map(Variable)
terms = st.one_of(st.integers(-20, 20), symbols, variables)
atoms = st.builds(lambda p, args: Atom(p, tuple(args)),
                  st.sampled_from(["p", "q", "mINf", "r_n"]), st.lists(terms, max_size=3))
ops = st.sampled_from(["<", "<=", ">", ">=", "=", "<>"])
comparisons = st.builds(Comparison, terms, ops, terms)
plain_literals = st.one_of(st.builds(Literal, atoms, st.booleans()), comparisons)
elements = st.builds(lambda ts, c: AggregateElement(tuple(ts), tuple(c)),
                     st.lists(terms, min_size=1, max_size=2),
                     st.lists(plain_literals, min_size=1, max_size=3))


@st.composite
def aggregates(draw):
    left = draw(st.one_of(st.none(), st.tuples(terms, ops)))
    right = draw(st.one_of(st.tuples(ops, terms), st.none()) if left else st.tuples(ops, terms))
    return Aggregate(tuple(draw(st.lists(elements, min_size=0, max_size=3))), left, right)


body_literals = st.one_of(plain_literals, aggregates())
rules = st.builds(lambda h, b: Rule(h, tuple(b)), st.one_of(st.none(), atoms),
                  st.lists(body_literals, max_size=4))
ground_atoms = st.builds(lambda p, a: Atom(p, tuple(a)), st.sampled_from(["f", "g"]),
                         st.lists(st.one_of(st.integers(0, 5), symbols), max_size=2))


@st.composite
def programs(draw):
    rs = draw(st.lists(rules, max_size=5))
    # an empty-body rule with a ground head is a fact once printed
    rs = [r for r in rs if r.body or r.head is None or list(atom_vars(r.head))]
    return Program(tuple(rs), tuple(draw(st.lists(ground_atoms, max_size=4))))


@settings(max_examples=300, deadline=None)
@given(programs())
def test_round_trip_property(p):
    assert parse_program(render_program(p)) == p


# --- safety ----------------------------------------------------------------


def test_safe_rule():
    assert check_safety(parse_rule("a(X) :- b(X).")) == []


def test_negated_only_variable_is_unsafe():
    v = check_safety(parse_rule("a(X) :- not b(X)."))
    assert [x.variable for x in v] == ["X"]
    assert v[0].position


def test_aggregate_local_variable_safety():
    assert check_safety(parse_rule(":- p(X), #count{Y: q(X,Y)} > 1.")) == []
    bad = check_safety(parse_rule(":- p(X), #count{Y: not q(X,Y)} > 1."))
    assert [x.variable for x in bad] == ["Y"]


@pytest.mark.parametrize("name", ["hcp", "hcp_cag", "module_frame"])
def test_bundled_rules_are_safe(name):
    for r in load_encoding(name).rules:
        assert check_safety(r) == [], str(r)


# --- unification and substitution -------------------------------------------


def test_unify_filter_example():
    a = parse_atom("mINf(X,Y)")
    b = parse_atom("mINf(M1,F)")
    s = unify(a, b)
    assert s == {"M1": X, "F": Y}
    assert apply_substitution(a, s) == apply_substitution(b, s)


def test_unify_identical_ground():
    assert unify(parse_atom("p(1)"), parse_atom("p(1)")) == {}


def test_unify_predicate_mismatch():
    assert unify(parse_atom("p(1)"), parse_atom("q(1)")) is None


def test_unify_constant_clash():
    assert unify(parse_atom("p(1,X)"), parse_atom("p(2,Y)")) is None


def test_apply_substitution_examples():
    assert apply_substitution(parse_atom("p(X,Y)"), {"X": 1}) == parse_atom("p(1,Y)")
    r = parse_rule("a(X) :- b(X), not c(X,Y), X < Y.")
    assert apply_substitution(r, {}) == r


def test_b1_derivation():
    c1 = parse_rule(":- module(M1), module(M2), frame(F), mINf(M1,F), mINf(M2,F), M1 <> M2.")
    s = unify(parse_atom("mINf(X,Y)"), c1.body[3].atom)
    rest = [apply_substitution(l, s) for i, l in enumerate(c1.body) if i != 3]
    expected = parse_rule(":- module(X), module(M2), frame(Y), mINf(M2,Y), X <> M2.").body
    assert tuple(rest) == expected


LEFT_VARS = ["A", "B", "C"]
RIGHT_VARS = ["U", "V", "W"]
CONSTS = [1, 2, "a"]


def side(names):
    return st.lists(st.one_of(st.sampled_from(names).map(Variable), st.sampled_from(CONSTS)),
                    min_size=0, max_size=4)


@settings(max_examples=400, deadline=None)
@given(side(LEFT_VARS), side(RIGHT_VARS), st.booleans())
def test_unify_is_most_general(left, right, same_pred):
    n = min(len(left), len(right))
    a = Atom("p", tuple(left[:n]))
    b = Atom("p" if same_pred else "q", tuple(right[:n]))
    s = unify(a, b)
    names = LEFT_VARS + RIGHT_VARS
    ground_unifiers = []
    for values in itertools.product(CONSTS + ["z"], repeat=len(names)):
        d = dict(zip(names, values))
        if apply_substitution(a, d) == apply_substitution(b, d):
            ground_unifiers.append(d)
    if s is None:
        assert not ground_unifiers
        return
    assert apply_substitution(a, s) == apply_substitution(b, s)
    # idempotent
    assert all(apply_substitution(t, s) == t for t in s.values() if isinstance(t, Variable))
    assert ground_unifiers
    # every unifier is an instance of s: d o s = d
    for d in ground_unifiers[:50]:
        for v in names:
            assert apply_substitution(apply_substitution(Atom("t", (Variable(v),)), s), d) == \
                apply_substitution(Atom("t", (Variable(v),)), d)


@settings(max_examples=200, deadline=None)
@given(rules, st.dictionaries(st.sampled_from(["X", "Y", "Z", "C1"]),
                              st.one_of(st.integers(0, 3), symbols), max_size=3))
def test_substitution_is_homomorphic(r, s):
    out = apply_substitution(r, s)
    head = apply_substitution(r.head, s) if r.head is not None else None
    assert out == Rule(head, tuple(apply_substitution(l, s) for l in r.body))
