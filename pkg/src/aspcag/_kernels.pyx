# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel; mirrors ``_kernels_py.Propagator`` exactly."""

from array import array

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memcmp, memset


cdef inline int[::1] _iv(object values):
    a = array("i", values)
    if len(a) == 0:
        a.append(0)  # typed views reject empty buffers on some builds
    return a


cdef class Propagator:
    cdef public int n_atoms, n_rules, n_aggs
    cdef int[::1] head, pos_ptr, pos, neg_ptr, neg, agg_ptr, agg
    cdef int[::1] ok_ptr, ok, tup_ptr, cond_ptr, cpos_ptr, cpos, cneg_ptr, cneg
    cdef int[::1] occ_ptr, occ
    cdef int *cnt_init
    cdef int *cnt
    cdef int *queue
    cdef unsigned char *adef
    cdef unsigned char *apos
    cdef unsigned char *eligible
    cdef unsigned char *new_lo
    cdef unsigned char *new_hi

    def __cinit__(self, int n_atoms, head, pos_ptr, pos, neg_ptr, neg, agg_ptr, agg,
                  ok_ptr, ok, tup_ptr, cond_ptr, cpos_ptr, cpos, cneg_ptr, cneg,
                  occ_ptr, occ):
        cdef int r
        self.n_atoms = n_atoms
        self.n_rules = len(head)
        self.n_aggs = len(tup_ptr) - 1
        self.head = _iv(head)
        self.pos_ptr = _iv(pos_ptr)
        self.pos = _iv(pos)
        self.neg_ptr = _iv(neg_ptr)
        self.neg = _iv(neg)
        self.agg_ptr = _iv(agg_ptr)
        self.agg = _iv(agg)
        self.ok_ptr = _iv(ok_ptr)
        self.ok = _iv(ok)
        self.tup_ptr = _iv(tup_ptr)
        self.cond_ptr = _iv(cond_ptr)
        self.cpos_ptr = _iv(cpos_ptr)
        self.cpos = _iv(cpos)
        self.cneg_ptr = _iv(cneg_ptr)
        self.cneg = _iv(cneg)
        self.occ_ptr = _iv(occ_ptr)
        self.occ = _iv(occ)
        self.cnt_init = <int *> malloc((self.n_rules + 1) * sizeof(int))
        self.cnt = <int *> malloc((self.n_rules + 1) * sizeof(int))
        self.queue = <int *> malloc((n_atoms + 1) * sizeof(int))
        self.adef = <unsigned char *> malloc(self.n_aggs + 1)
        self.apos = <unsigned char *> malloc(self.n_aggs + 1)
        self.eligible = <unsigned char *> malloc(self.n_rules + 1)
        self.new_lo = <unsigned char *> malloc(n_atoms + 1)
        self.new_hi = <unsigned char *> malloc(n_atoms + 1)
        if (not self.cnt_init or not self.cnt or not self.queue or not self.adef
                or not self.apos or not self.eligible or not self.new_lo or not self.new_hi):
            raise MemoryError()
        for r in range(self.n_rules):
            self.cnt_init[r] = self.pos_ptr[r + 1] - self.pos_ptr[r]

    def __dealloc__(self):
        free(self.cnt_init)
        free(self.cnt)
        free(self.queue)
        free(self.adef)
        free(self.apos)
        free(self.eligible)
        free(self.new_lo)
        free(self.new_hi)

    cdef void _aggregates(self, unsigned char *lo, unsigned char *hi) noexcept nogil:
        cdef int a, t, c, k, x, lc, hc, base
        cdef bint cert, poss, c_cert, c_poss, d, p
        for a in range(self.n_aggs):
            lc = 0
            hc = 0
            for t in range(self.tup_ptr[a], self.tup_ptr[a + 1]):
                cert = False
                poss = False
                for c in range(self.cond_ptr[t], self.cond_ptr[t + 1]):
                    c_cert = True
                    c_poss = True
                    for k in range(self.cpos_ptr[c], self.cpos_ptr[c + 1]):
                        x = self.cpos[k]
                        if not lo[x]:
                            c_cert = False
                        if not hi[x]:
                            c_poss = False
                            break
                    if c_poss:
                        for k in range(self.cneg_ptr[c], self.cneg_ptr[c + 1]):
                            x = self.cneg[k]
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
            base = self.ok_ptr[a]
            d = True
            p = False
            for k in range(lc, hc + 1):
                if self.ok[base + k]:
                    p = True
                else:
                    d = False
            self.adef[a] = d
            self.apos[a] = p

    cdef void _lfp(self, unsigned char *assign, unsigned char *out, bint seed_true,
                   bint block_false) noexcept nogil:
        cdef int x, r, h, k, top = 0
        cdef int n = self.n_atoms
        memcpy(self.cnt, self.cnt_init, self.n_rules * sizeof(int))
        memset(out, 0, n)
        if seed_true:
            for x in range(n):
                if assign[x] == 1:
                    out[x] = 1
                    self.queue[top] = x
                    top += 1
        for r in range(self.n_rules):
            h = self.head[r]
            if self.cnt[r] == 0 and self.eligible[r] and h >= 0 and not out[h]:
                out[h] = 1
                if not (block_false and assign[h] == 0):
                    self.queue[top] = h
                    top += 1
        while top > 0:
            top -= 1
            x = self.queue[top]
            for k in range(self.occ_ptr[x], self.occ_ptr[x + 1]):
                r = self.occ[k]
                self.cnt[r] -= 1
                if self.cnt[r] == 0 and self.eligible[r]:
                    h = self.head[r]
                    if h >= 0 and not out[h]:
                        out[h] = 1
                        if not (block_false and assign[h] == 0):
                            self.queue[top] = h
                            top += 1

    cdef void _bounds(self, unsigned char *assign, unsigned char *lo,
                      unsigned char *hi) noexcept nogil:
        cdef int x, r, k
        cdef int n = self.n_atoms
        cdef bint e
        for x in range(n):
            lo[x] = assign[x] == 1
            hi[x] = assign[x] != 0
        while True:
            self._aggregates(lo, hi)
            for r in range(self.n_rules):
                e = True
                for k in range(self.neg_ptr[r], self.neg_ptr[r + 1]):
                    if hi[self.neg[k]]:
                        e = False
                        break
                if e:
                    for k in range(self.agg_ptr[r], self.agg_ptr[r + 1]):
                        if not self.adef[self.agg[k]]:
                            e = False
                            break
                self.eligible[r] = e
            self._lfp(assign, self.new_lo, True, False)
            self._aggregates(self.new_lo, hi)
            for r in range(self.n_rules):
                e = True
                for k in range(self.neg_ptr[r], self.neg_ptr[r + 1]):
                    if self.new_lo[self.neg[k]]:
                        e = False
                        break
                if e:
                    for k in range(self.agg_ptr[r], self.agg_ptr[r + 1]):
                        if not self.apos[self.agg[k]]:
                            e = False
                            break
                self.eligible[r] = e
            self._lfp(assign, self.new_hi, False, True)
            # keep both bounds monotone so the iteration cannot oscillate
            for x in range(n):
                if assign[x] == 0 or not hi[x]:
                    self.new_hi[x] = 0
                if lo[x]:
                    self.new_lo[x] = 1
            if memcmp(self.new_lo, lo, n) == 0 and memcmp(self.new_hi, hi, n) == 0:
                return
            memcpy(lo, self.new_lo, n)
            memcpy(hi, self.new_hi, n)

    cdef bint _propagate(self, unsigned char *assign, unsigned char *lo,
                         unsigned char *hi, bint full) noexcept nogil:
        cdef int n = self.n_atoms
        cdef int x, r, h, k, g, unknown, last_atom, a
        cdef unsigned char last_val
        cdef bint forced, satisfied
        while True:
            self._bounds(assign, lo, hi)
            if not full:
                return False
            for x in range(n):
                a = assign[x]
                if (a == 1 and not hi[x]) or (a == 0 and lo[x]):
                    return True
            forced = False
            for x in range(n):
                if assign[x] == 2:
                    if lo[x]:
                        assign[x] = 1
                        forced = True
                    elif not hi[x]:
                        assign[x] = 0
                        forced = True
            for r in range(self.n_rules):
                h = self.head[r]
                if h >= 0 and assign[h] != 0:
                    continue
                unknown = 0
                last_atom = -1
                last_val = 0
                satisfied = False
                for k in range(self.pos_ptr[r], self.pos_ptr[r + 1]):
                    x = self.pos[k]
                    if not hi[x]:
                        satisfied = True
                        break
                    if not lo[x]:
                        unknown += 1
                        last_atom = x
                        last_val = 0
                if satisfied:
                    continue
                for k in range(self.neg_ptr[r], self.neg_ptr[r + 1]):
                    x = self.neg[k]
                    if lo[x]:
                        satisfied = True
                        break
                    if hi[x]:
                        unknown += 1
                        last_atom = x
                        last_val = 1
                if satisfied:
                    continue
                for k in range(self.agg_ptr[r], self.agg_ptr[r + 1]):
                    g = self.agg[k]
                    if not self.apos[g]:
                        satisfied = True
                        break
                    if not self.adef[g]:
                        unknown += 1
                        last_atom = -1
                if satisfied:
                    continue
                if unknown == 0:
                    return True
                if unknown == 1 and last_atom >= 0 and assign[last_atom] == 2:
                    assign[last_atom] = last_val
                    forced = True
            if not forced:
                return False

    def propagate(self, bytearray assign, bytearray lo, bytearray hi, bint full):
        """Compute bounds; with ``full`` also force atoms and detect conflicts.

        Returns True on conflict.
        """
        cdef bint res
        cdef unsigned char *pa = assign
        cdef unsigned char *pl = lo
        cdef unsigned char *ph = hi
        with nogil:
            res = self._propagate(pa, pl, ph, full)
        return res
