"""Pure-Python pair-relation kernel (fallback for the compiled ``_pairs`` module).

The kernel sees ground terms only as integer ids: a symbol id, a tuple of
argument ids and a size.  Oriented equations arrive pre-encoded (see
``shallow_un.equiv.encode_side``):

* ``(0, term_id, ())``        the side is that constant;
* ``(1, slot, ())``           the side is a variable;
* ``(2, sym_id, args)``       an application whose ``args`` are pairs
  ``(is_var, value)`` with ``value`` a variable slot or a constant's term id.

``related(i, j)`` is the memoised relation; ``justification(i, j)`` tells
which check succeeded so the caller can rebuild a proof.
"""

REFL, DEC, ROOT, VIA = 0, 1, 2, 3


class PairKernel:
    backend = "python"

    def __init__(self, oriented, const_ids):
        # oriented: list of (u_side, v_side, nvars)
        self.oriented = [tuple(o) for o in oriented]
        self.const_ids = list(const_ids)
        self.sym = []
        self.args = []
        self.size = []
        self.memo = {}
        self._cand_cache = {}

    # -- terms ------------------------------------------------------------

    def add_term(self, sym, args, size):
        self.sym.append(sym)
        self.args.append(tuple(args))
        self.size.append(size)
        return len(self.sym) - 1

    def n_terms(self):
        return len(self.sym)

    def _candidates(self, s):
        c = self._cand_cache.get(s)
        if c is None:
            c = []
            for idx, (u, _v, _n) in enumerate(self.oriented):
                k = u[0]
                if k == 1 or (k == 2 and u[1] == s) or (k == 0 and self.sym[u[1]] == s):
                    c.append(idx)
            self._cand_cache[s] = c
        return c

    # -- relation ---------------------------------------------------------

    def related(self, i, j):
        return self._just(i, j)[0] >= 0

    def justification(self, i, j):
        kind, payload = self._just(i, j)
        if kind < 0:
            return None
        return kind, payload

    def _just(self, i, j):
        if i == j:
            return (REFL, -1)
        if i > j:
            i, j = j, i
        key = (i, j)
        r = self.memo.get(key)
        if r is not None:
            return r
        r = self._compute(i, j)
        self.memo[key] = r
        return r

    def _rel(self, i, j):
        return i == j or self._just(i, j)[0] >= 0

    def _compute(self, i, j):
        sym, args = self.sym, self.args
        ai, aj = args[i], args[j]
        if sym[i] == sym[j]:
            if all(self._rel(x, y) for x, y in zip(ai, aj)):
                return (DEC, -1)
        for idx in self._candidates(sym[i]):
            if self._try_root(idx, i, j):
                return (ROOT, idx)
        if ai and aj:
            for c in self.const_ids:
                if self._rel(i, c) and self._rel(c, j):
                    return (VIA, c)
        return (-1, -1)

    def _match(self, side, t, classes, pending):
        kind, val, sargs = side
        if kind == 0:
            return t == val
        if kind == 1:
            classes[val].append(t)
            return True
        if self.sym[t] != val:
            return False
        targs = self.args[t]
        for (is_var, v), a in zip(sargs, targs):
            if is_var:
                classes[v].append(a)
            else:
                pending.append((a, v))
        return True

    def _try_root(self, idx, p, q):
        u, v, nv = self.oriented[idx]
        classes = [[] for _ in range(nv)]
        pending = []
        if not self._match(u, p, classes, pending):
            return False
        if not self._match(v, q, classes, pending):
            return False
        for a, c in pending:
            if not self._rel(a, c):
                return False
        for members in classes:
            first = members[0] if members else -1
            for m in members[1:]:
                if not self._rel(first, m):
                    return False
        return True
