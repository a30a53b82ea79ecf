"""Integer-indexed form of a ground program, consumed by the kernels."""
from __future__ import annotations

from array import array
from typing import Iterable

from .kernels import propagator_class
from .syntax import Aggregate, Atom, Comparison, Literal, Rule, compare


def _ia(values) -> array:
    return array("i", values)


class CompiledProgram:
    """Flat CSR arrays for rules, aggregates and positive occurrences.

    Atoms are numbered in canonical order.  ``branch`` lists atoms that occur
    default-negated or inside an aggregate condition; fixing them fixes the
    candidate stable model.
    """

    def __init__(self, rules: Iterable[Rule], facts: Iterable[Atom] = ()):
        rules = list(rules)
        facts = list(facts)
        atoms: set[Atom] = set(facts)
        for r in rules:
            if r.head is not None:
                atoms.add(r.head)
            for lit in r.body:
                if isinstance(lit, Literal):
                    atoms.add(lit.atom)
                elif isinstance(lit, Aggregate):
                    for el in lit.elements:
                        for c in el.condition:
                            if isinstance(c, Literal):
                                atoms.add(c.atom)
        self.atoms: list[Atom] = sorted(atoms, key=Atom.sort_key)
        self.index = {a: i for i, a in enumerate(self.atoms)}
        idx = self.index

        head, pos_ptr, pos, neg_ptr, neg, agg_ptr, agg = [], [0], [], [0], [], [0], []
        ok_ptr, ok, tup_ptr, cond_ptr = [], [], [0], [0]
        cpos_ptr, cpos, cneg_ptr, cneg = [0], [], [0], []
        branch: set[int] = set()
        self.rules: list[Rule] = []

        for f in facts:
            head.append(idx[f])
            pos_ptr.append(len(pos))
            neg_ptr.append(len(neg))
            agg_ptr.append(len(agg))
            self.rules.append(Rule(f, ()))

        for r in rules:
            p, n, ags = [], [], []
            dropped = False
            for lit in r.body:
                if isinstance(lit, Literal):
                    i = idx[lit.atom]
                    if lit.negated:
                        n.append(i)
                        branch.add(i)
                    else:
                        p.append(i)
                elif isinstance(lit, Comparison):
                    if not compare(lit.lhs, lit.op, lit.rhs):
                        dropped = True
                        break
                elif isinstance(lit, Aggregate):
                    ags.append(lit)
            if dropped:
                continue
            for g in ags:
                groups: dict[tuple, list] = {}
                for el in g.elements:
                    cp, cn, live = [], [], True
                    for c in el.condition:
                        if isinstance(c, Comparison):
                            if not compare(c.lhs, c.op, c.rhs):
                                live = False
                                break
                        elif c.negated:
                            cn.append(idx[c.atom])
                        else:
                            cp.append(idx[c.atom])
                    if live:
                        groups.setdefault(el.terms, []).append((cp, cn))
                        branch.update(cp)
                        branch.update(cn)
                agg.append(len(ok_ptr))
                ok_ptr.append(len(ok))
                ok.extend(1 if g.holds_for(k) else 0 for k in range(len(groups) + 1))
                for conds in groups.values():
                    for cp, cn in conds:
                        cpos.extend(sorted(set(cp)))
                        cpos_ptr.append(len(cpos))
                        cneg.extend(sorted(set(cn)))
                        cneg_ptr.append(len(cneg))
                    cond_ptr.append(len(cpos_ptr) - 1)
                tup_ptr.append(len(cond_ptr) - 1)
            head.append(idx[r.head] if r.head is not None else -1)
            pos.extend(sorted(set(p)))
            pos_ptr.append(len(pos))
            neg.extend(sorted(set(n)))
            neg_ptr.append(len(neg))
            agg_ptr.append(len(agg))
            self.rules.append(r)

        occ_lists: list[list[int]] = [[] for _ in self.atoms]
        for ri in range(len(head)):
            for k in range(pos_ptr[ri], pos_ptr[ri + 1]):
                occ_lists[pos[k]].append(ri)
        occ_ptr, occ = [0], []
        for lst in occ_lists:
            occ.extend(lst)
            occ_ptr.append(len(occ))

        self.branch = sorted(branch)
        self.arrays = (
            len(self.atoms), _ia(head), _ia(pos_ptr), _ia(pos), _ia(neg_ptr), _ia(neg),
            _ia(agg_ptr), _ia(agg), _ia(ok_ptr), _ia(ok), _ia(tup_ptr), _ia(cond_ptr),
            _ia(cpos_ptr), _ia(cpos), _ia(cneg_ptr), _ia(cneg), _ia(occ_ptr), _ia(occ),
        )

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def propagator(self, backend: str = None):
        return propagator_class(backend)(*self.arrays)

    def bounds(self, backend: str = None) -> tuple[set[Atom], set[Atom]]:
        """Atoms certainly true and atoms possibly true, with nothing assigned."""
        n = self.n_atoms
        assign = bytearray([2]) * n
        lo, hi = bytearray(n), bytearray(n)
        self.propagator(backend).propagate(assign, lo, hi, False)
        certain = {self.atoms[i] for i in range(n) if lo[i]}
        possible = {self.atoms[i] for i in range(n) if hi[i]}
        return certain, possible
