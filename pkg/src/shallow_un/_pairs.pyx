# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled pair-relation kernel; same interface and results as ``_pairs_py``."""

from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef int REFL = 0
cdef int DEC = 1
cdef int ROOT = 2
cdef int VIA = 3


cdef class PairKernel:
    backend = "compiled"

    cdef vector[int] sym
    cdef vector[int] arg_start
    cdef vector[int] nargs
    cdef vector[int] args_flat
    cdef vector[int] size

    # oriented equations, two sides each: kind, value, first argument slot, argument count
    cdef vector[int] side_kind
    cdef vector[int] side_val
    cdef vector[int] side_arg_start
    cdef vector[int] side_nargs
    cdef vector[int] side_arg_isvar
    cdef vector[int] side_arg_val
    cdef vector[int] nvars
    cdef int n_oriented

    cdef vector[int] const_ids
    cdef unordered_map[uint64_t, int64_t] memo
    cdef dict cand_cache

    def __init__(self, oriented, const_ids):
        cdef int flag, value
        self.n_oriented = 0
        for u, v, nv in oriented:
            for side in (u, v):
                kind, val, sargs = side
                self.side_kind.push_back(kind)
                self.side_val.push_back(val)
                self.side_arg_start.push_back(self.side_arg_isvar.size())
                self.side_nargs.push_back(len(sargs))
                for is_var, a in sargs:
                    flag = 1 if is_var else 0
                    value = a
                    self.side_arg_isvar.push_back(flag)
                    self.side_arg_val.push_back(value)
            self.nvars.push_back(nv)
            self.n_oriented += 1
        for c in const_ids:
            self.const_ids.push_back(c)
        self.cand_cache = {}

    def add_term(self, int s, args, int sz):
        self.sym.push_back(s)
        self.arg_start.push_back(self.args_flat.size())
        self.nargs.push_back(len(args))
        for a in args:
            self.args_flat.push_back(a)
        self.size.push_back(sz)
        return self.sym.size() - 1

    def n_terms(self):
        return self.sym.size()

    def related(self, int i, int j):
        return self._just(i, j) >= 0

    def justification(self, int i, int j):
        cdef int64_t r = self._just(i, j)
        if r < 0:
            return None
        return (r & 3, (r >> 2) - 1)

    cdef list _candidates(self, int s):
        c = self.cand_cache.get(s)
        if c is None:
            c = []
            for idx in range(self.n_oriented):
                k = self.side_kind[2 * idx]
                val = self.side_val[2 * idx]
                if k == 1 or (k == 2 and val == s) or (k == 0 and self.sym[val] == s):
                    c.append(idx)
            self.cand_cache[s] = c
        return c

    cdef int64_t _just(self, int i, int j):
        cdef int t
        cdef uint64_t key
        cdef int64_t r
        if i == j:
            return REFL
        if i > j:
            t = i
            i = j
            j = t
        key = (<uint64_t> i << 32) | <uint64_t> j
        if self.memo.count(key):
            return self.memo[key]
        r = self._compute(i, j)
        self.memo[key] = r
        return r

    cdef inline bint _rel(self, int i, int j):
        return i == j or self._just(i, j) >= 0

    cdef int64_t _compute(self, int i, int j):
        cdef int k, n, ai, aj, c
        cdef bint ok
        if self.sym[i] == self.sym[j]:
            ok = True
            n = self.nargs[i]
            ai = self.arg_start[i]
            aj = self.arg_start[j]
            for k in range(n):
                if not self._rel(self.args_flat[ai + k], self.args_flat[aj + k]):
                    ok = False
                    break
            if ok:
                return DEC
        for idx in self._candidates(self.sym[i]):
            if self._try_root(idx, i, j):
                return ((<int64_t> idx + 1) << 2) | ROOT
        if self.nargs[i] > 0 and self.nargs[j] > 0:
            for k in range(<int> self.const_ids.size()):
                c = self.const_ids[k]
                if self._rel(i, c) and self._rel(c, j):
                    return ((<int64_t> c + 1) << 2) | VIA
        return -1

    cdef bint _match(self, int side, int t, vector[int]& first, vector[int]& pend_a, vector[int]& pend_b):
        cdef int kind = self.side_kind[side]
        cdef int val = self.side_val[side]
        cdef int k, n, s0, t0, a, slot
        if kind == 0:
            return t == val
        if kind == 1:
            if first[val] < 0:
                first[val] = t
            else:
                pend_a.push_back(first[val])
                pend_b.push_back(t)
            return True
        if self.sym[t] != val:
            return False
        n = self.side_nargs[side]
        s0 = self.side_arg_start[side]
        t0 = self.arg_start[t]
        for k in range(n):
            a = self.args_flat[t0 + k]
            if self.side_arg_isvar[s0 + k]:
                slot = self.side_arg_val[s0 + k]
                if first[slot] < 0:
                    first[slot] = a
                else:
                    pend_a.push_back(first[slot])
                    pend_b.push_back(a)
            else:
                pend_a.push_back(a)
                pend_b.push_back(self.side_arg_val[s0 + k])
        return True

    cdef bint _try_root(self, int idx, int p, int q):
        cdef vector[int] first
        cdef vector[int] pend_a
        cdef vector[int] pend_b
        cdef size_t k
        first.assign(self.nvars[idx], -1)
        if not self._match(2 * idx, p, first, pend_a, pend_b):
            return False
        if not self._match(2 * idx + 1, q, first, pend_a, pend_b):
            return False
        for k in range(pend_a.size()):
            if not self._rel(pend_a[k], pend_b[k]):
                return False
        return True
