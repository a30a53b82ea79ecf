"""Pure-Python propagation kernel (fallback for the compiled ``_kernels``).

Atom values in ``assign``: 0 false, 1 true, 2 unassigned.  ``propagate``
fills ``lo`` (atoms true in every stable model extending the assignment) and
``hi`` (atoms possibly true) by an alternating least-fixpoint computation.
"""

UNKNOWN = 2


class Propagator:
    def __init__(self, n_atoms, head, pos_ptr, pos, neg_ptr, neg, agg_ptr, agg,
                 ok_ptr, ok, tup_ptr, cond_ptr, cpos_ptr, cpos, cneg_ptr, cneg,
                 occ_ptr, occ):
        self.n_atoms = n_atoms
        self.head = list(head)
        self.n_rules = len(self.head)
        self.n_aggs = len(tup_ptr) - 1
        self.pos_ptr, self.pos = list(pos_ptr), list(pos)
        self.neg_ptr, self.neg = list(neg_ptr), list(neg)
        self.agg_ptr, self.agg = list(agg_ptr), list(agg)
        self.ok_ptr, self.ok = list(ok_ptr), list(ok)
        self.tup_ptr, self.cond_ptr = list(tup_ptr), list(cond_ptr)
        self.cpos_ptr, self.cpos = list(cpos_ptr), list(cpos)
        self.cneg_ptr, self.cneg = list(cneg_ptr), list(cneg)
        self.occ_ptr, self.occ = list(occ_ptr), list(occ)
        self.cnt_init = [self.pos_ptr[r + 1] - self.pos_ptr[r] for r in range(self.n_rules)]

    def _aggregates(self, lo, hi, adef, apos):
        tup_ptr, cond_ptr = self.tup_ptr, self.cond_ptr
        cpos_ptr, cpos, cneg_ptr, cneg = self.cpos_ptr, self.cpos, self.cneg_ptr, self.cneg
        ok_ptr, ok = self.ok_ptr, self.ok
        for a in range(self.n_aggs):
            lc = hc = 0
            for t in range(tup_ptr[a], tup_ptr[a + 1]):
                cert = poss = False
                for c in range(cond_ptr[t], cond_ptr[t + 1]):
                    c_cert = c_poss = True
                    for k in range(cpos_ptr[c], cpos_ptr[c + 1]):
                        x = cpos[k]
                        if not lo[x]:
                            c_cert = False
                        if not hi[x]:
                            c_poss = False
                            break
                    if c_poss:
                        for k in range(cneg_ptr[c], cneg_ptr[c + 1]):
                            x = cneg[k]
                            if hi[x]:
                                c_cert = False
                            if lo[x]:
                                c_poss = False
                                break
                    if c_poss:
                        poss = True
                        if c_cert:
                            cert = True
                            break
                lc += cert
                hc += poss
            base = ok_ptr[a]
            d, p = True, False
            for k in range(lc, hc + 1):
                if ok[base + k]:
                    p = True
                else:
                    d = False
            adef[a] = d
            apos[a] = p

    def _lfp(self, assign, eligible, out, seed_true, block_false):
        """Least fixpoint of eligible rules; positive atoms used from ``out``.

        With ``seed_true`` atoms assigned true start in the fixpoint; with
        ``block_false`` atoms assigned false are recorded but not propagated.
        """
        head, occ_ptr, occ = self.head, self.occ_ptr, self.occ
        cnt = list(self.cnt_init)
        queue = []
        for x in range(self.n_atoms):
            out[x] = 0
        if seed_true:
            for x in range(self.n_atoms):
                if assign[x] == 1:
                    out[x] = 1
                    queue.append(x)
        for r in range(self.n_rules):
            h = head[r]
            if cnt[r] == 0 and eligible[r] and h >= 0 and not out[h]:
                out[h] = 1
                if not (block_false and assign[h] == 0):
                    queue.append(h)
        while queue:
            x = queue.pop()
            for k in range(occ_ptr[x], occ_ptr[x + 1]):
                r = occ[k]
                cnt[r] -= 1
                if cnt[r] == 0 and eligible[r]:
                    h = head[r]
                    if h >= 0 and not out[h]:
                        out[h] = 1
                        if not (block_false and assign[h] == 0):
                            queue.append(h)

    def _bounds(self, assign, lo, hi):
        n, nr = self.n_atoms, self.n_rules
        neg_ptr, neg, agg_ptr, agg = self.neg_ptr, self.neg, self.agg_ptr, self.agg
        adef = [False] * self.n_aggs
        apos = [False] * self.n_aggs
        eligible = [False] * nr
        new_lo = bytearray(n)
        new_hi = bytearray(n)
        for x in range(n):
            lo[x] = assign[x] == 1
            hi[x] = assign[x] != 0
        while True:
            self._aggregates(lo, hi, adef, apos)
            for r in range(nr):
                e = True
                for k in range(neg_ptr[r], neg_ptr[r + 1]):
                    if hi[neg[k]]:
                        e = False
                        break
                if e:
                    for k in range(agg_ptr[r], agg_ptr[r + 1]):
                        if not adef[agg[k]]:
                            e = False
                            break
                eligible[r] = e
            self._lfp(assign, eligible, new_lo, True, False)
            self._aggregates(new_lo, hi, adef, apos)
            for r in range(nr):
                e = True
                for k in range(neg_ptr[r], neg_ptr[r + 1]):
                    if new_lo[neg[k]]:
                        e = False
                        break
                if e:
                    for k in range(agg_ptr[r], agg_ptr[r + 1]):
                        if not apos[agg[k]]:
                            e = False
                            break
                eligible[r] = e
            self._lfp(assign, eligible, new_hi, False, True)
            # keep both bounds monotone so the iteration cannot oscillate
            for x in range(n):
                if assign[x] == 0 or not hi[x]:
                    new_hi[x] = 0
                if lo[x]:
                    new_lo[x] = 1
            if new_lo == lo and new_hi == hi:
                return adef, apos
            lo[:] = new_lo
            hi[:] = new_hi

    def propagate(self, assign, lo, hi, full):
        """Compute bounds; with ``full`` also force atoms and detect conflicts.

        Returns True on conflict.
        """
        n = self.n_atoms
        head, pos_ptr, pos = self.head, self.pos_ptr, self.pos
        neg_ptr, neg, agg_ptr, agg = self.neg_ptr, self.neg, self.agg_ptr, self.agg
        while True:
            adef, apos = self._bounds(assign, lo, hi)
            if not full:
                return False
            for x in range(n):
                a = assign[x]
                if (a == 1 and not hi[x]) or (a == 0 and lo[x]):
                    return True
            forced = False
            for x in range(n):
                if assign[x] == UNKNOWN:
                    if lo[x]:
                        assign[x] = 1
                        forced = True
                    elif not hi[x]:
                        assign[x] = 0
                        forced = True
            for r in range(self.n_rules):
                h = head[r]
                if h >= 0 and assign[h] != 0:
                    continue
                unknown = 0
                last_atom = -1
                last_val = 0
                satisfied = False
                for k in range(pos_ptr[r], pos_ptr[r + 1]):
                    x = pos[k]
                    if not hi[x]:
                        satisfied = True
                        break
                    if not lo[x]:
                        unknown += 1
                        last_atom, last_val = x, 0
                if satisfied:
                    continue
                for k in range(neg_ptr[r], neg_ptr[r + 1]):
                    x = neg[k]
                    if lo[x]:
                        satisfied = True
                        break
                    if hi[x]:
                        unknown += 1
                        last_atom, last_val = x, 1
                if satisfied:
                    continue
                for k in range(agg_ptr[r], agg_ptr[r + 1]):
                    g = agg[k]
                    if not apos[g]:
                        satisfied = True
                        break
                    if not adef[g]:
                        unknown += 1
                        last_atom = -1
                if satisfied:
                    continue
                if unknown == 0:
                    return True
                if unknown == 1 and last_atom >= 0 and assign[last_atom] == UNKNOWN:
                    assign[last_atom] = last_val
                    forced = True
            if not forced:
                return False
