# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled round kernel. Same algorithm and floating-point operation order
as _kernel_py, so traces match the fallback bit for bit."""
from libc.math cimport exp, sqrt
from libc.stdlib cimport malloc, free

import numpy as np

DEF MAXN = 64

cdef enum:
    FREE = 0
    UNIFORM = 1
    PARTITION = 2
    GRAPHIC = 3


cdef inline int _popcount(unsigned long long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef class Market:
    cdef public int n
    cdef public long long K
    cdef int code
    cdef long long kcap
    cdef int nvert, nblocks
    cdef long long[::1] vals
    cdef long long[::1] rank
    cdef long long[::1] block
    cdef long long[::1] caps
    cdef long long[::1] eu
    cdef long long[::1] ev
    cdef long long[::1] work
    cdef int order[MAXN]
    cdef int pos[MAXN]

    def __init__(self, vals, rank, K, code, kcap, block, caps, eu, ev, nvert):
        self.n = len(vals)
        if self.n > MAXN:
            raise ValueError(f"compiled kernel supports at most {MAXN} modules")
        self.vals = np.ascontiguousarray(vals, dtype=np.int64)
        self.rank = np.ascontiguousarray(rank, dtype=np.int64)
        self.K = K
        self.code = code
        self.kcap = kcap
        self.block = np.ascontiguousarray(list(block) or [0], dtype=np.int64)
        self.caps = np.ascontiguousarray(list(caps) or [0], dtype=np.int64)
        self.eu = np.ascontiguousarray(list(eu) or [0], dtype=np.int64)
        self.ev = np.ascontiguousarray(list(ev) or [0], dtype=np.int64)
        self.nvert = nvert
        self.nblocks = len(caps)
        self.work = np.zeros(max(nvert, len(caps), 1), dtype=np.int64)

    cdef bint _independent(self, unsigned long long mask) nogil:
        cdef int j, b
        cdef long long x, y
        if self.code == FREE:
            return True
        if self.code == UNIFORM:
            return _popcount(mask) <= self.kcap
        if self.code == PARTITION:
            for b in range(self.nblocks):
                self.work[b] = 0
            for j in range(self.n):
                if (mask >> j) & 1:
                    b = <int>self.block[j]
                    self.work[b] += 1
                    if self.work[b] > self.caps[b]:
                        return False
            return True
        for j in range(self.nvert):
            self.work[j] = j
        for j in range(self.n):
            if (mask >> j) & 1:
                x = self.eu[j]
                while self.work[x] != x:
                    x = self.work[x]
                y = self.ev[j]
                while self.work[y] != y:
                    y = self.work[y]
                if x == y:
                    return False
                self.work[x] = y
        return True

    cdef inline bint _before(self, int a, int b, long long* bids) nogil:
        cdef long long lhs = self.vals[a] * bids[b]
        cdef long long rhs = self.vals[b] * bids[a]
        if lhs != rhs:
            return lhs > rhs
        return self.rank[a] < self.rank[b]

    cdef unsigned long long _select(self, long long* bids) nogil:
        cdef int n = self.n
        cdef int a, b, x, idx, e, j, out
        cdef unsigned long long G = 0, G2, one = 1
        cdef long long spend = 0, s2
        for a in range(n):
            self.order[a] = a
        for a in range(1, n):
            x = self.order[a]
            b = a - 1
            while b >= 0 and self._before(x, self.order[b], bids):
                self.order[b + 1] = self.order[b]
                b -= 1
            self.order[b + 1] = x
        for idx in range(n):
            e = self.order[idx]
            self.pos[e] = idx
            G2 = G | (one << e)
            out = -1
            if not self._independent(G2):
                out = e
                for j in range(n):
                    if (G >> j) & 1 and self._independent(G2 & ~(one << j)):
                        if self.vals[j] < self.vals[out] or (
                                self.vals[j] == self.vals[out] and self.pos[j] > self.pos[out]):
                            out = j
                if out == e:
                    continue
                G2 &= ~(one << out)
            s2 = spend + bids[e]
            if out >= 0:
                s2 -= bids[out]
            if s2 > self.K:
                break
            G = G2
            spend = s2
        return G

    def independent(self, mask):
        return bool(self._independent(<unsigned long long>mask))

    def select(self, bids):
        cdef long long buf[MAXN]
        cdef int i
        for i in range(self.n):
            buf[i] = bids[i]
        return int(self._select(buf))

    def table(self, bids):
        cdef long long buf[MAXN]
        cdef int i, keep
        cdef long long k
        for i in range(self.n):
            buf[i] = bids[i]
        rows = np.zeros((self.n, self.K + 1), dtype=np.uint8)
        cdef unsigned char[:, ::1] rv = rows
        for i in range(self.n):
            keep = <int>buf[i]
            for k in range(1, self.K + 1):
                buf[i] = k
                rv[i, k] = (self._select(buf) >> i) & 1
            buf[i] = keep
        return int(self._select(buf)), [list(r) for r in rows]


cdef long long _sample(double[:, ::1] sigma, int i, long long kmin, long long K,
                       double gamma, double u) nogil:
    cdef long long k
    cdef double mx = sigma[i, kmin], total = 0.0, acc = 0.0, target
    for k in range(kmin + 1, K + 1):
        if sigma[i, k] > mx:
            mx = sigma[i, k]
    for k in range(kmin, K + 1):
        total += exp(gamma * (sigma[i, k] - mx))
    target = u * total
    for k in range(kmin, K + 1):
        acc += exp(gamma * (sigma[i, k] - mx))
        if acc > target:
            return k
    return K


def sample_index(sigma_row, kmin, K, gamma, u):
    arr = np.ascontiguousarray(np.asarray(sigma_row, dtype=np.float64).reshape(1, -1))
    return int(_sample(arr, 0, kmin, K, gamma, u))


cdef inline double _reward(long long k, int sel, double cost, double delta, bint phase1,
                           bint gross) nogil:
    cdef double b = k * delta
    cdef double bonus
    if phase1:
        bonus = delta * delta * b
    else:
        bonus = delta * delta * delta * delta / b
    if sel:
        if gross:
            return b + bonus
        return (b - cost) + bonus
    return bonus


def reward(k, sel, cost, delta, phase1, gross):
    return _reward(k, sel, cost, delta, phase1, gross)


def simulate(Market mk, kmin, cost, double delta, long long T0, double c0, U, bint gross,
             out_bid, out_sel, out_rew, out_crit, sigma):
    cdef int n = mk.n
    cdef long long K = mk.K
    cdef double[:, ::1] Uv = U
    cdef int[:, ::1] ob = out_bid
    cdef unsigned char[:, ::1] os = out_sel
    cdef double[:, ::1] orw = out_rew
    cdef int[:, ::1] oc = out_crit
    cdef double[:, ::1] sg = sigma
    cdef long long[::1] km = np.ascontiguousarray(kmin, dtype=np.int64)
    cdef double[::1] cs = np.ascontiguousarray(cost, dtype=np.float64)
    cdef long long T = Uv.shape[0]
    cdef long long bids[MAXN]
    cdef long long t, k, keep, crit
    cdef int i, s
    cdef double gamma, r
    cdef bint phase1
    with nogil:
        for t in range(1, T + 1):
            if t > 1:
                gamma = c0 / sqrt(<double>(t - 1))
            else:
                gamma = 0.0
            for i in range(n):
                bids[i] = _sample(sg, i, km[i], K, gamma, Uv[t - 1, i])
            phase1 = t <= T0
            for i in range(n):
                keep = bids[i]
                crit = 0
                for k in range(1, K + 1):
                    bids[i] = k
                    s = (mk._select(bids) >> i) & 1
                    if s:
                        crit = k
                    r = _reward(k, s, cs[i], delta, phase1, gross)
                    sg[i, k] += r
                    if k == keep:
                        os[t - 1, i] = s
                        orw[t - 1, i] = r
                bids[i] = keep
                ob[t - 1, i] = <int>keep
                oc[t - 1, i] = <int>crit
