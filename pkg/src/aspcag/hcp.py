"""House configuration problem: bundled encodings, generator, direct checker."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from .incremental import FactBatch
from .parser import parse_program
from .syntax import Atom, Program

INPUT_PREDICATES = ("person", "thing", "personTOthing", "cabinetDomain", "roomDomain")
CABINET_CAPACITY = 5
ROOM_CAPACITY = 4


def data_text(name: str) -> str:
    return resources.files("aspcag").joinpath("data").joinpath(name).read_text()


def load_encoding(name: str = "hcp") -> Program:
    """Bundled program: 'hcp', 'hcp_cag' or 'module_frame'."""
    return parse_program(data_text(f"{name}.lp"))


def example_instance() -> list[Atom]:
    return list(parse_program(data_text("example_instance.lp")).facts)


def example_configuration() -> list[Atom]:
    return list(parse_program(data_text("example_configuration.lp")).facts)


@dataclass(frozen=True)
class InstanceSpec:
    persons: int
    things_per_person: int = 10
    cabinets_per_person: int = 2
    rooms_per_person: int = 1

    def __post_init__(self):
        for name in ("persons", "things_per_person", "cabinets_per_person", "rooms_per_person"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def things(self) -> int:
        return self.persons * self.things_per_person


def gen_instance(spec: InstanceSpec) -> list[Atom]:
    """Facts for ``spec``; person p owns a contiguous block of things,
    cabinet ids and room ids."""
    out = []
    tpp, cpp, rpp = spec.things_per_person, spec.cabinets_per_person, spec.rooms_per_person
    for p in range(1, spec.persons + 1):
        out.append(Atom("person", (p,)))
        things = range((p - 1) * tpp + 1, p * tpp + 1)
        out += [Atom("thing", (t,)) for t in things]
        out += [Atom("personTOthing", (p, t)) for t in things]
        out += [Atom("cabinetDomain", (c,)) for c in range((p - 1) * cpp + 1, p * cpp + 1)]
        out += [Atom("roomDomain", (r,)) for r in range((p - 1) * rpp + 1, p * rpp + 1)]
    return out


def render_facts(facts: Iterable[Atom]) -> str:
    return "".join(f"{a}.\n" for a in facts)


def _values(facts, pred):
    return sorted({a.args[0] for a in facts if a.predicate == pred and a.arity == 1})


def _share(ids: list, persons: list) -> dict:
    """Split sorted domain ids into contiguous per-person blocks of equal size."""
    n, k = len(ids), len(persons)
    return {p: ids[i * n // k:(i + 1) * n // k] for i, p in enumerate(persons)}


def batch_facts(instance: Iterable[Atom], ppi: int) -> list[FactBatch]:
    """Split an instance into batches of ``ppi`` persons each.

    Each batch carries the persons' things and ownership facts plus their
    proportional share of the cabinet and room domains.  Facts of other
    predicates go into the first batch.
    """
    if ppi < 1:
        raise ValueError("ppi must be >= 1")
    instance = list(dict.fromkeys(instance))
    persons = _values(instance, "person")
    if not persons:
        return [FactBatch(1, tuple(instance))]
    owner = {a.args[1]: a.args[0] for a in instance if a.predicate == "personTOthing"}
    cab = {c: p for p, cs in _share(_values(instance, "cabinetDomain"), persons).items() for c in cs}
    room = {r: p for p, rs in _share(_values(instance, "roomDomain"), persons).items() for r in rs}
    group = {p: i // ppi for i, p in enumerate(persons)}
    n_batches = (len(persons) + ppi - 1) // ppi
    buckets: list[list[Atom]] = [[] for _ in range(n_batches)]
    for a in instance:
        if a.predicate == "person":
            p = a.args[0]
        elif a.predicate == "thing":
            p = owner.get(a.args[0], persons[0])
        elif a.predicate == "personTOthing":
            p = a.args[0]
        elif a.predicate == "cabinetDomain":
            p = cab[a.args[0]]
        elif a.predicate == "roomDomain":
            p = room[a.args[0]]
        else:
            p = persons[0]
        buckets[group.get(p, 0)].append(a)
    return [FactBatch(i + 1, tuple(b)) for i, b in enumerate(buckets)]


@dataclass(frozen=True)
class HcpSolution:
    cabinetTOthing: frozenset
    roomTOcabinet: frozenset
    used_cabinets: frozenset
    used_rooms: frozenset


@dataclass(frozen=True)
class Violation:
    requirement: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.requirement}] {self.detail}"


def _closure(used: set, domain: list) -> frozenset:
    # cabinets and rooms are numbered: using one implies using all lower ids
    top = max(used, default=None)
    if top is None:
        return frozenset()
    return frozenset(used | {d for d in domain if d < top})


def project(instance: Iterable[Atom], candidate: Iterable[Atom]) -> HcpSolution:
    instance = list(instance)
    candidate = set(candidate)
    ctt = frozenset(a.args for a in candidate if a.predicate == "cabinetTOthing" and a.arity == 2)
    rtc = frozenset(a.args for a in candidate if a.predicate == "roomTOcabinet" and a.arity == 2)
    cabs = {c for c, _ in ctt} | {c for _, c in rtc} | {a.args[0] for a in candidate if a.predicate == "cabinet"}
    rooms = {r for r, _ in rtc} | {a.args[0] for a in candidate if a.predicate == "room"}
    return HcpSolution(
        ctt, rtc,
        _closure(cabs, _values(instance, "cabinetDomain")),
        _closure(rooms, _values(instance, "roomDomain")),
    )


def verify_solution(instance: Iterable[Atom], candidate: Iterable[Atom]) -> list[Violation]:
    """Check a candidate configuration against the six requirements and the
    numbering rule by direct counting.  Returns an empty list iff valid."""
    instance = list(instance)
    sol = project(instance, candidate)
    things = _values(instance, "thing")
    cab_domain = set(_values(instance, "cabinetDomain"))
    room_domain = set(_values(instance, "roomDomain"))
    owner = {a.args[1]: a.args[0] for a in instance if a.predicate == "personTOthing"}
    out: list[Violation] = []

    for c, t in sorted(sol.cabinetTOthing):
        if c not in cab_domain:
            out.append(Violation("domain", f"cabinet {c} holding thing {t} is not in the cabinet domain"))
        if t not in things:
            out.append(Violation("domain", f"unknown thing {t} in cabinet {c}"))
    for r, c in sorted(sol.roomTOcabinet):
        if r not in room_domain:
            out.append(Violation("domain", f"room {r} holding cabinet {c} is not in the room domain"))
    for c in sorted(sol.used_cabinets - cab_domain):
        out.append(Violation("domain", f"used cabinet {c} is not in the cabinet domain"))

    holders = defaultdict(set)
    contents = defaultdict(set)
    for c, t in sol.cabinetTOthing:
        holders[t].add(c)
        contents[c].add(t)
    for t in things:
        if len(holders[t]) != 1:
            out.append(Violation("1", f"thing {t} is in {len(holders[t])} cabinets"))
    for c in sorted(contents):
        if len(contents[c]) > CABINET_CAPACITY:
            out.append(Violation("2", f"cabinet {c} holds {len(contents[c])} things"))

    places = defaultdict(set)
    shelved = defaultdict(set)
    for r, c in sol.roomTOcabinet:
        places[c].add(r)
        shelved[r].add(c)
    for c in sorted(sol.used_cabinets):
        if len(places[c]) != 1:
            out.append(Violation("3", f"cabinet {c} is in {len(places[c])} rooms"))
    for r in sorted(shelved):
        if len(shelved[r]) > ROOM_CAPACITY:
            out.append(Violation("4", f"room {r} holds {len(shelved[r])} cabinets"))

    cab_persons = {c: {owner[t] for t in ts if t in owner} for c, ts in contents.items()}
    for c in sorted(cab_persons):
        if len(cab_persons[c]) > 1:
            out.append(Violation("5", f"cabinet {c} belongs to persons {sorted(cab_persons[c])}"))
    for r in sorted(shelved):
        ps = set().union(*(cab_persons.get(c, set()) for c in shelved[r]))
        if len(ps) > 1:
            out.append(Violation("6", f"room {r} belongs to persons {sorted(ps)}"))

    pairs = sorted(sol.cabinetTOthing)
    for c1, t1 in pairs:
        for c2, t2 in pairs:
            if c1 < c2 and t1 > t2:
                out.append(Violation("order", f"cabinet {c1} holds thing {t1} while cabinet {c2} holds thing {t2}"))
    return out
