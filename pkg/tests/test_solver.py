import random

import pytest

from aspcag.errors import SolveTimeout, TooManyAtoms
from aspcag.grounder import GroundProgram, ground
from aspcag.hcp import example_configuration, example_instance, load_encoding
from aspcag.kernels import BACKEND, COMPILED_AVAILABLE
from aspcag.parser import parse_atom, parse_atoms, parse_program, parse_rule
from aspcag.solver import check_stable, enumerate_brute_force, eval_aggregate, solve

from helpers import random_ground_program

BACKENDS = ["python"] + (["cython"] if COMPILED_AVAILABLE else [])


def gp(text):
    p = parse_program(text)
    return GroundProgram(p.rules, p.facts)


def atoms(text):
    return set(parse_atoms(text))


def agg(text):
    return parse_rule(f":- {text}.").body[0]


def test_compiled_kernel_is_selected():
    assert COMPILED_AVAILABLE
    assert BACKEND == "cython"


def test_eval_aggregate_empty():
    assert eval_aggregate(agg("#count{} < 1"), set())


def test_eval_aggregate_counts_distinct_tuples():
    a = agg("6 <= #count{" + "; ".join(f"{t}: c(1,{t})" for t in range(7)) + "}")
    five = {parse_atom(f"c(1,{t})") for t in range(5)}
    assert not eval_aggregate(a, five)
    assert eval_aggregate(a, five | {parse_atom("c(1,6)")})
    # equal tuples count once
    assert eval_aggregate(agg("#count{1: p; 1: q} = 1"), atoms("p q"))


def test_eval_filter_aggregate():
    a = agg("#count{1: module(1), mINf(2,1)} < 1")
    assert not eval_aggregate(a, atoms("module(1) mINf(2,1)"))
    assert eval_aggregate(a, atoms("module(1)"))


def test_check_stable_even_loop():
    g = gp("a :- not b. b :- not a.")
    assert check_stable(g, atoms("a"))
    assert not check_stable(g, atoms("a b"))


def test_check_stable_unfounded():
    g = gp("a :- a.")
    assert check_stable(g, set())
    assert not check_stable(g, atoms("a"))


def test_check_stable_example_configuration():
    g = ground(load_encoding("hcp").with_facts(example_instance()))
    config = set(example_configuration())
    candidates = [m for m in solve(g, limit=None) if config <= m]
    assert len(candidates) == 1
    assert check_stable(g, candidates[0])


@pytest.mark.parametrize("backend", BACKENDS)
def test_solve_facts_only(backend):
    g = gp("p(1). q.")
    assert solve(g, backend=backend) == [frozenset(g.facts)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_solve_module_frame_unique_model(backend):
    g = ground(load_encoding("module_frame"))
    ms = solve(g, limit=None, backend=backend)
    assert len(ms) == 1
    assert atoms("mINf(1,2) mINf(2,1)") <= ms[0]
    assert ms == enumerate_brute_force(g)


@pytest.mark.parametrize("backend", BACKENDS)
def test_solve_hcp_capacity_unsat(backend):
    facts = "person(1). cabinetDomain(1). roomDomain(1). " + " ".join(
        f"thing({t}). personTOthing(1,{t})." for t in range(1, 7))
    g = ground(load_encoding("hcp").with_facts(parse_program(facts).facts))
    assert solve(g, limit=None, backend=backend) == []


def test_brute_force_examples():
    assert set(enumerate_brute_force(gp("a :- not b. b :- not a."))) == {
        frozenset(atoms("a")), frozenset(atoms("b"))}
    assert enumerate_brute_force(gp(":- not a.")) == []


def test_brute_force_cap():
    text = " ".join(f"p({i}) :- not q({i}). q({i}) :- not p({i})." for i in range(13))
    with pytest.raises(TooManyAtoms) as e:
        enumerate_brute_force(gp(text))
    assert e.value.count == 26 and e.value.cap == 24


def test_solve_timeout():
    text = " ".join(f"p({i}) :- not q({i}). q({i}) :- not p({i})." for i in range(40))
    with pytest.raises(SolveTimeout):
        solve(gp(text + " :- p(0), q(0)."), limit=None, timeout=0.0)


def test_solver_matches_brute_force_on_random_programs():
    rng = random.Random(7)
    for i in range(500):
        g = random_ground_program(rng, 14)
        expected = set(enumerate_brute_force(g))
        for backend in BACKENDS:
            got = solve(g, limit=None, backend=backend)
            assert len(got) == len(set(got))
            assert set(got) == expected, f"program {i} ({backend}):\n{g.render()}"


def test_nonmonotone_aggregate_terminates():
    # bounds for this rule alternate unless kept monotone
    g = gp("a :- #count{1: not a} >= 1. b :- not a.")
    for backend in BACKENDS:
        assert set(solve(g, limit=None, backend=backend)) == set(enumerate_brute_force(g))


def test_backends_agree_on_first_model():
    g = ground(load_encoding("hcp").with_facts(example_instance()))
    assert solve(g, backend="python") == solve(g, backend="cython")
