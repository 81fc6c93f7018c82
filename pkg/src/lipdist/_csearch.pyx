# Compiled branch-and-bound kernel. Mirrors _pysearch.search step for step;
# see that module for the contract and the meaning of the search state.

import time

import numpy as np

from libc.math cimport log, exp, fabs, INFINITY
from libc.stdlib cimport qsort

NAME = "cython"


cdef int _cmp_double(const void *a, const void *b) noexcept nogil:
    cdef double x = (<const double *>a)[0]
    cdef double y = (<const double *>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef class _Search:
    cdef const double[:, ::1] dx
    cdef const double[:, ::1] dy
    cdef const long[::1] order
    cdef const long[:, ::1] cand
    cdef const double[:, ::1] resx
    cdef double[:, :, ::1] fr
    cdef double[:, :, ::1] fi
    cdef double[:, ::1] kid_key
    cdef double[:, ::1] kid_r
    cdef double[:, ::1] kid_ri
    cdef long[:, ::1] kid_y
    cdef double[::1] sybuf
    cdef long[::1] perm
    cdef long[::1] best
    cdef char[::1] used
    cdef long[::1] freebuf
    cdef int n
    cdef bint first
    cdef bint sort_children
    cdef double bound
    cdef double slack
    cdef double inc
    cdef double thr
    cdef bint found
    cdef bint aborted
    cdef bint done
    cdef long nodes
    cdef long node_limit
    cdef double time_limit
    cdef double t0
    cdef double frontier

    def __init__(self, dx, dy, order, cand, resx, first, bound, slack,
                 node_limit, time_limit, sort_children):
        n = dx.shape[0]
        self.n = n
        self.dx = np.ascontiguousarray(dx, dtype=np.float64)
        self.dy = np.ascontiguousarray(dy, dtype=np.float64)
        self.order = np.ascontiguousarray(order, dtype=np.int_)
        self.cand = np.ascontiguousarray(cand, dtype=np.int_)
        self.resx = np.ascontiguousarray(resx, dtype=np.float64)
        self.fr = np.zeros((n + 1, n, n))
        self.fi = np.zeros((n + 1, n, n))
        self.kid_key = np.zeros((n, n))
        self.kid_r = np.zeros((n, n))
        self.kid_ri = np.zeros((n, n))
        self.kid_y = np.zeros((n, n), dtype=np.int_)
        self.sybuf = np.zeros(max(1, n * (n - 1) // 2))
        self.perm = np.full(n, -1, dtype=np.int_)
        self.best = np.full(n, -1, dtype=np.int_)
        self.used = np.zeros(n, dtype=np.int8)
        self.freebuf = np.zeros(n, dtype=np.int_)
        self.first = first
        self.sort_children = sort_children
        self.bound = bound
        self.slack = slack
        self.inc = bound
        self.thr = exp(bound) if first else exp(bound - slack)
        self.found = False
        self.aborted = False
        self.done = False
        self.nodes = 0
        self.node_limit = node_limit
        self.time_limit = time_limit
        self.frontier = INFINITY

    cdef inline bint alive(self, double key):
        if self.first:
            return key <= self.thr
        return key < self.thr

    cdef bint over_budget(self):
        if self.node_limit >= 0 and self.nodes > self.node_limit:
            return True
        if self.time_limit >= 0 and (self.nodes & 1023) == 0:
            return time.perf_counter() - self.t0 > self.time_limit
        return False

    cdef int dfs(self, int d, double r, double ri) except -1:
        cdef int n = self.n
        cdef long x = self.order[d]
        cdef long y
        cdef int nk = 0
        cdef int c, i, j, idx
        cdef double cr, cri, key, cost, tk, tr, tri
        cdef long ty

        for c in range(n):
            y = self.cand[x, c]
            if self.used[y]:
                continue
            cr = r if r > self.fr[d, x, y] else self.fr[d, x, y]
            cri = ri if ri > self.fi[d, x, y] else self.fi[d, x, y]
            key = (cr if cr > 1.0 else 1.0) * (cri if cri > 1.0 else 1.0)
            if self.alive(key):
                self.kid_key[d, nk] = key
                self.kid_y[d, nk] = y
                self.kid_r[d, nk] = cr
                self.kid_ri[d, nk] = cri
                nk += 1

        if self.sort_children:
            # stable insertion sort by key
            for i in range(1, nk):
                tk = self.kid_key[d, i]
                ty = self.kid_y[d, i]
                tr = self.kid_r[d, i]
                tri = self.kid_ri[d, i]
                j = i - 1
                while j >= 0 and self.kid_key[d, j] > tk:
                    self.kid_key[d, j + 1] = self.kid_key[d, j]
                    self.kid_y[d, j + 1] = self.kid_y[d, j]
                    self.kid_r[d, j + 1] = self.kid_r[d, j]
                    self.kid_ri[d, j + 1] = self.kid_ri[d, j]
                    j -= 1
                self.kid_key[d, j + 1] = tk
                self.kid_y[d, j + 1] = ty
                self.kid_r[d, j + 1] = tr
                self.kid_ri[d, j + 1] = tri

        for idx in range(nk):
            key = self.kid_key[d, idx]
            if not self.alive(key):
                continue
            y = self.kid_y[d, idx]
            cr = self.kid_r[d, idx]
            cri = self.kid_ri[d, idx]
            self.nodes += 1
            if self.over_budget():
                self.aborted = True
                self._fold(d, idx, nk)
                return 0
            self.perm[x] = y
            self.used[y] = 1
            if d + 1 == n:
                cost = fabs(log(cr)) + fabs(log(cri))
                if self.first:
                    if cost <= self.bound:
                        self.found = True
                        self.inc = cost
                        self.best[:] = self.perm
                        self.done = True
                elif cost < self.inc - self.slack:
                    self.found = True
                    self.inc = cost
                    self.thr = exp(cost - self.slack)
                    self.best[:] = self.perm
            elif self.expand(d, x, y, cr, cri):
                self.dfs(d + 1, cr, cri)
            self.perm[x] = -1
            self.used[y] = 0
            if self.done:
                return 0
            if self.aborted:
                self._fold(d, idx + 1, nk)
                return 0
        return 0

    cdef void _fold(self, int d, int start, int nk):
        cdef int i
        for i in range(start, nk):
            if self.kid_key[d, i] < self.frontier:
                self.frontier = self.kid_key[d, i]

    cdef bint expand(self, int d, long x, long y, double cr, double cri):
        cdef int n = self.n
        cdef int a, b, m = 0, p = 0
        cdef long xx, yy
        cdef double v, w, kmin, kmax, ka, kb, key, rp, rip
        for b in range(n):
            if not self.used[b]:
                self.freebuf[m] = b
                m += 1
        kmax = 0.0
        for a in range(d + 1, n):
            xx = self.order[a]
            kmin = INFINITY
            for b in range(m):
                yy = self.freebuf[b]
                v = self.dy[yy, y] / self.dx[xx, x]
                w = self.fr[d, xx, yy]
                if v > w:
                    w = v
                self.fr[d + 1, xx, yy] = w
                ka = cr if cr > w else w
                v = self.dx[xx, x] / self.dy[yy, y]
                w = self.fi[d, xx, yy]
                if v > w:
                    w = v
                self.fi[d + 1, xx, yy] = w
                kb = cri if cri > w else w
                key = (ka if ka > 1.0 else 1.0) * (kb if kb > 1.0 else 1.0)
                if key < kmin:
                    kmin = key
            if kmin > kmax:
                kmax = kmin
        if not self.alive(kmax):
            return False
        if m >= 2:
            for a in range(m):
                for b in range(a + 1, m):
                    self.sybuf[p] = self.dy[self.freebuf[a], self.freebuf[b]]
                    p += 1
            qsort(&self.sybuf[0], p, sizeof(double), _cmp_double)
            rp = cr
            rip = cri
            for a in range(p):
                v = self.sybuf[a] / self.resx[d + 1, a]
                if v > rp:
                    rp = v
                v = self.resx[d + 1, a] / self.sybuf[a]
                if v > rip:
                    rip = v
            if not self.alive((rp if rp > 1.0 else 1.0) * (rip if rip > 1.0 else 1.0)):
                return False
        return True

    def run(self):
        self.t0 = time.perf_counter()
        self.dfs(0, 0.0, 0.0)
        best = np.asarray(self.best).astype(np.intp) if self.found else None
        return self.found, self.inc, best, self.nodes, self.aborted, self.frontier


def search(dx, dy, order, cand, resx, first, bound, slack, node_limit, time_limit, sort_children):
    """Compiled twin of :func:`lipdist._pysearch.search`."""
    s = _Search(dx, dy, order, cand, resx, bool(first), float(bound), float(slack),
                int(node_limit), float(time_limit), bool(sort_children))
    return s.run()
