import time

import pytest

from aspcag.cag import cag_rewrite
from aspcag.errors import EngineTimeout, IterationUnsat
from aspcag.grounder import ground
from aspcag.hcp import InstanceSpec, batch_facts, example_instance, gen_instance, load_encoding, verify_solution
from aspcag.incremental import (
    VERIFY_FACT_LIMIT,
    EngineResult,
    FactBatch,
    InternalEngine,
    engine_from_spec,
    facts_of,
    incremental_solve,
)
from aspcag.parser import parse_atoms, parse_program
from aspcag.solver import check_stable, solve


def test_facts_of_examples():
    assert facts_of(set()) == []
    assert facts_of(parse_atoms("roomTOcabinet(1,1) cabinet(1)")) == parse_atoms("cabinet(1) roomTOcabinet(1,1)")


def test_facts_of_answer_set_is_a_fixpoint():
    enc = load_encoding("hcp")
    m = solve(ground(enc.with_facts(example_instance())))[0]
    again = solve(ground(enc.with_facts(facts_of(m))), limit=None)
    assert again == [m]


def test_single_batch_equals_one_shot():
    enc = load_encoding("hcp")
    inst = gen_instance(InstanceSpec(2))
    final, traces = incremental_solve(enc, [FactBatch(1, tuple(inst))])
    assert final == solve(ground(enc.with_facts(inst)))[0]
    assert len(traces) == 1 and traces[0].status == "sat"


@pytest.mark.parametrize("cag", [False, True])
def test_two_persons_ppi_1_verifies(cag):
    enc = load_encoding("hcp")
    if cag:
        enc = cag_rewrite(enc)
    inst = gen_instance(InstanceSpec(2))
    final, traces = incremental_solve(enc, batch_facts(inst, 1), verify_final=True)
    assert [t.index for t in traces] == [1, 2]
    assert traces[-1].verified is True
    full = ground(load_encoding("hcp").with_facts(inst))
    assert check_stable(full, final)
    assert verify_solution(inst, final) == []


@pytest.mark.parametrize("persons,ppi", [(3, 1), (3, 2), (2, 5)])
def test_monotone_and_valid_per_iteration(persons, ppi):
    enc = load_encoding("hcp")
    batches = batch_facts(gen_instance(InstanceSpec(persons)), ppi)
    result = incremental_solve(enc, batches)
    history = result.history
    assert len(history) == len(batches)
    prev = frozenset()
    for delta, batch, trace in zip(history, batches, result[1]):
        assert prev <= delta
        inputs = facts_of(set(prev) | set(batch.facts))
        assert trace.input_fact_count == len(inputs)
        assert trace.answer_set_size == len(delta) > 0
        assert check_stable(ground(enc.with_facts(inputs)), delta)
        prev = delta
    assert result[0] == history[-1]


def test_verify_default_depends_on_size():
    enc = load_encoding("hcp")
    _, small = incremental_solve(enc, batch_facts(gen_instance(InstanceSpec(1)), 1))
    assert small[-1].verified is True
    copy = parse_program("g(X) :- f(X).")
    at_limit = [FactBatch(1, tuple(parse_atoms(" ".join(f"f({i})" for i in range(VERIFY_FACT_LIMIT)))))]
    assert incremental_solve(copy, at_limit)[1][-1].verified is True
    over = [FactBatch(1, at_limit[0].facts + (parse_atoms("f(-1)")[0],))]
    assert incremental_solve(copy, over)[1][-1].verified is None


def test_traces_carry_grounding_stats():
    _, traces = incremental_solve(load_encoding("hcp"), batch_facts(gen_instance(InstanceSpec(2)), 1))
    assert traces[1].stats.rule_count > traces[0].stats.rule_count
    assert all(t.ground_time >= 0 and t.solve_time >= 0 for t in traces)


def test_unsat_iteration_is_reported():
    # person 2 arrives without cabinets of their own
    enc = load_encoding("hcp")
    b1 = FactBatch(1, tuple(gen_instance(InstanceSpec(1, 2, 1, 1))))
    b2 = FactBatch(2, tuple(parse_program("person(2). thing(3). personTOthing(2,3).").facts))
    with pytest.raises(IterationUnsat) as e:
        incremental_solve(enc, [b1, b2])
    assert e.value.index == 2
    assert [t.status for t in e.value.traces] == ["sat", "unsat"]


def test_timeout_is_reported():
    batches = batch_facts(gen_instance(InstanceSpec(2)), 1)
    with pytest.raises(EngineTimeout) as e:
        incremental_solve(load_encoding("hcp"), batches, deadline=time.perf_counter() - 1)
    assert e.value.index == 1
    assert e.value.traces[-1].status == "timeout"


def test_engine_is_called_statelessly():
    calls = []

    def engine(program, deadline=None):
        calls.append(program)
        return InternalEngine()(program, deadline)

    batches = batch_facts(gen_instance(InstanceSpec(2)), 1)
    result = incremental_solve(load_encoding("hcp"), batches, engine=engine)
    assert len(calls) == 2
    assert set(calls[0].facts) == set(batches[0].facts)
    assert set(calls[1].facts) == set(result.history[0]) | set(batches[1].facts)


def test_custom_engine_result_statuses():
    def unsat(program, deadline=None):
        return EngineResult("unsat", None)

    with pytest.raises(IterationUnsat):
        incremental_solve(load_encoding("hcp"), [FactBatch(1, ())], engine=unsat)


def test_empty_batches_rejected():
    with pytest.raises(ValueError):
        incremental_solve(load_encoding("hcp"), [])


def test_engine_from_spec():
    assert isinstance(engine_from_spec("internal"), InternalEngine)
    assert engine_from_spec("external:clingo --mode=clingo").cmd == "clingo --mode=clingo"
    for bad in ("external:", "gringo", ""):
        with pytest.raises(ValueError):
            engine_from_spec(bad)
