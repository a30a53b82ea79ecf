import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aspcag.grounder import ground
from aspcag.hcp import (
    InstanceSpec,
    batch_facts,
    example_configuration,
    example_instance,
    gen_instance,
    load_encoding,
    project,
    render_facts,
    verify_solution,
)
from aspcag.parser import parse_atoms, parse_program
from aspcag.solver import solve
from aspcag.syntax import Atom


def count(facts, pred):
    return sum(1 for a in facts if a.predicate == pred)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_generator_arithmetic(k):
    facts = gen_instance(InstanceSpec(5 * k))
    assert count(facts, "thing") == 50 * k
    assert count(facts, "personTOthing") == 50 * k
    assert count(facts, "cabinetDomain") == 10 * k
    assert count(facts, "roomDomain") == 5 * k
    assert count(facts, "person") == 5 * k


def test_generator_is_deterministic_and_duplicate_free():
    a, b = gen_instance(InstanceSpec(3)), gen_instance(InstanceSpec(3))
    assert a == b
    assert len(set(a)) == len(a)


def test_generator_reproduces_example_instance():
    assert set(gen_instance(InstanceSpec(2, 2, 1, 1))) == set(example_instance())


def test_instance_spec_validation():
    with pytest.raises(ValueError):
        InstanceSpec(0)
    with pytest.raises(ValueError):
        InstanceSpec(1, cabinets_per_person=0)


def test_render_facts_round_trip():
    facts = gen_instance(InstanceSpec(2))
    assert list(parse_program(render_facts(facts)).facts) == facts


# --- verification ------------------------------------------------------------


def test_example_configuration_is_valid():
    assert verify_solution(example_instance(), example_configuration()) == []


def test_mixed_owner_cabinet_violates_requirement_5():
    config = [a for a in example_configuration() if a != Atom("cabinetTOthing", (2, 3))]
    config.append(Atom("cabinetTOthing", (1, 3)))
    reqs = {v.requirement for v in verify_solution(example_instance(), config)}
    assert "5" in reqs


def test_empty_candidate_misses_every_thing():
    out = verify_solution(example_instance(), [])
    assert [v.requirement for v in out] == ["1"] * 4


def test_over_capacity_cabinet():
    inst = gen_instance(InstanceSpec(1, 6, 2, 1))
    config = [Atom("cabinetTOthing", (1, t)) for t in range(1, 7)] + [Atom("roomTOcabinet", (1, 1))]
    assert [v.requirement for v in verify_solution(inst, config)] == ["2"]


def test_unplaced_cabinet_violates_requirement_3():
    config = [a for a in example_configuration() if a != Atom("roomTOcabinet", (2, 2))]
    assert [v.requirement for v in verify_solution(example_instance(), config)] == ["3"]


def test_order_violation():
    config = parse_atoms("cabinetTOthing(1,3) cabinetTOthing(1,4) roomTOcabinet(1,1)"
                         " cabinetTOthing(2,1) cabinetTOthing(2,2) roomTOcabinet(2,2)")
    reqs = Counter(v.requirement for v in verify_solution(example_instance(), config))
    assert reqs == Counter({"order": 4})


def test_shared_room_violates_requirement_6():
    config = parse_atoms("cabinetTOthing(1,1) cabinetTOthing(1,2) roomTOcabinet(1,1)"
                         " cabinetTOthing(2,3) cabinetTOthing(2,4) roomTOcabinet(1,2)")
    assert [v.requirement for v in verify_solution(example_instance(), config)] == ["6"]


def test_solver_finds_valid_configuration_for_example():
    g = ground(load_encoding("hcp").with_facts(example_instance()))
    models = solve(g, limit=None)
    assert models
    assert all(verify_solution(example_instance(), m) == [] for m in models)


def test_two_persons_default_instance_is_sat():
    inst = gen_instance(InstanceSpec(2))
    m = solve(ground(load_encoding("hcp").with_facts(inst)))
    assert m and verify_solution(inst, m[0]) == []


def candidate_projections(inst):
    """Every valid (cabinetTOthing, roomTOcabinet) pair, found by enumerating
    assignments and filtering with verify_solution."""
    things = [a.args[0] for a in inst if a.predicate == "thing"]
    cabinets = sorted(a.args[0] for a in inst if a.predicate == "cabinetDomain")
    rooms = sorted(a.args[0] for a in inst if a.predicate == "roomDomain")
    out = set()
    for placement in itertools.product(cabinets, repeat=len(things)):
        ctt = frozenset(zip(placement, things))
        for k in range(max(placement), max(cabinets) + 1):
            used = [c for c in cabinets if c <= k]
            for where in itertools.product(rooms, repeat=len(used)):
                rtc = frozenset(zip(where, used))
                atoms = [Atom("cabinetTOthing", x) for x in ctt] + [Atom("roomTOcabinet", x) for x in rtc]
                if not verify_solution(inst, atoms):
                    out.add((ctt, rtc))
    return out


@pytest.mark.parametrize("spec", [InstanceSpec(1, 2, 2, 1), InstanceSpec(1, 3, 2, 2),
                                  InstanceSpec(2, 1, 1, 1), InstanceSpec(2, 2, 1, 1),
                                  InstanceSpec(2, 2, 2, 1), InstanceSpec(1, 6, 2, 2)], ids=str)
def test_encoding_agrees_with_direct_enumeration(spec):
    inst = gen_instance(spec)
    models = solve(ground(load_encoding("hcp").with_facts(inst)), limit=None)
    got = {(s.cabinetTOthing, s.roomTOcabinet) for s in (project(inst, m) for m in models)}
    assert got == candidate_projections(inst)


# --- batching ----------------------------------------------------------------


def test_batches_for_five_persons():
    batches = batch_facts(gen_instance(InstanceSpec(5)), 2)
    assert [b.index for b in batches] == [1, 2, 3]
    persons = [[a.args[0] for a in b.facts if a.predicate == "person"] for b in batches]
    assert persons == [[1, 2], [3, 4], [5]]


def test_single_batch_when_ppi_covers_everyone():
    inst = gen_instance(InstanceSpec(3))
    (only,) = batch_facts(inst, 5)
    assert list(only.facts) == inst


def test_batch_rejects_zero_ppi():
    with pytest.raises(ValueError):
        batch_facts(gen_instance(InstanceSpec(1)), 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 4), st.integers(1, 3), st.integers(1, 2), st.integers(1, 8))
def test_batches_partition_instance(persons, tpp, cpp, rpp, ppi):
    inst = gen_instance(InstanceSpec(persons, tpp, cpp, rpp))
    batches = batch_facts(inst, ppi)
    assert len(batches) == -(-persons // ppi)
    assert Counter(a for b in batches for a in b.facts) == Counter(inst)
    owner = {a.args[1]: a.args[0] for a in inst if a.predicate == "personTOthing"}
    for b in batches:
        people = {a.args[0] for a in b.facts if a.predicate == "person"}
        assert 1 <= len(people) <= ppi
        for a in b.facts:
            if a.predicate == "thing":
                assert owner[a.args[0]] in people
        # each batch brings enough cabinets and rooms for its own persons
        assert count(b.facts, "cabinetDomain") == len(people) * cpp
        assert count(b.facts, "roomDomain") == len(people) * rpp
