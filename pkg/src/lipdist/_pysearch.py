"""Pure-Python branch-and-bound kernel (fallback for ``_csearch``).

Both kernels share one contract and must return identical results,
node counts included. Keep the arithmetic in the same order as the
Cython version when editing either one.

Search state at depth ``d``: source points ``order[:d]`` are assigned,
``r`` / ``ri`` are the running maxima of ``dY/dX`` and ``dX/dY`` over the
assigned pairs. ``fr[d][x, y]`` / ``fi[d][x, y]`` hold the same maxima for
the pairs a still-unassigned ``x`` would form with the assigned points if
it were sent to ``y``. Bounds are compared as keys
``max(R, 1) * max(Ri, 1)``, the exponential of the admissible cost bound
``max(log R, 0) + max(log Ri, 0)``.
"""

import math
import time

import numpy as np

NAME = "python"


def search(dx, dy, order, cand, resx, first, bound, slack, node_limit, time_limit, sort_children):
    """Depth-first branch and bound over bijections.

    Parameters
    ----------
    dx, dy : (n, n) float64 arrays
        Source and target distance matrices, ``n >= 2``.
    order : (n,) int array
        Order in which source points are assigned.
    cand : (n, n) int array
        ``cand[x]`` lists target points in the order they are tried for ``x``.
    resx : (n + 1, n(n-1)/2) float64 array
        ``resx[t]`` starts with the sorted distances among ``order[t:]``.
    first : bool
        Feasibility mode: return the first complete map with cost
        ``<= bound``. Otherwise minimise, accepting only maps cheaper than
        the incumbent ``bound`` by more than ``slack``.
    node_limit : int
        Abort after this many nodes (negative for no limit).
    time_limit : float
        Abort after this many seconds (negative for no limit).
    sort_children : bool
        Visit children by increasing partial-cost key instead of ``cand`` order.

    Returns
    -------
    found, cost, perm, nodes, aborted, frontier
        ``frontier`` is the smallest key among subtrees left unexplored by
        an abort (``inf`` when the search completed).
    """
    n = dx.shape[0]
    perm = np.full(n, -1, dtype=np.intp)
    used = np.zeros(n, dtype=bool)
    fr = np.zeros((n + 1, n, n))
    fi = np.zeros((n + 1, n, n))
    t0 = time.perf_counter()
    st = {
        "inc": bound,
        "thr": math.exp(bound) if first else math.exp(bound - slack),
        "found": False,
        "best": None,
        "nodes": 0,
        "aborted": False,
        "frontier": math.inf,
        "done": False,
    }

    def alive(key):
        return key <= st["thr"] if first else key < st["thr"]

    def over_budget():
        if node_limit >= 0 and st["nodes"] > node_limit:
            return True
        if time_limit >= 0 and (st["nodes"] & 1023) == 0:
            return time.perf_counter() - t0 > time_limit
        return False

    def dfs(d, r, ri):
        x = order[d]
        frd = fr[d]
        fid = fi[d]
        kids = []
        for y in cand[x]:
            if used[y]:
                continue
            cr = max(r, frd[x, y])
            cri = max(ri, fid[x, y])
            key = max(cr, 1.0) * max(cri, 1.0)
            if alive(key):
                kids.append((key, int(y), cr, cri))
        if sort_children:
            kids.sort(key=lambda t: t[0])

        for idx, (key, y, cr, cri) in enumerate(kids):
            if not alive(key):
                continue
            st["nodes"] += 1
            if over_budget():
                st["aborted"] = True
                rest = [k[0] for k in kids[idx:]]
                st["frontier"] = min(st["frontier"], min(rest))
                return
            perm[x] = y
            used[y] = True
            if d + 1 == n:
                cost = abs(math.log(cr)) + abs(math.log(cri))
                if first:
                    if cost <= bound:
                        st["found"] = True
                        st["inc"] = cost
                        st["best"] = perm.copy()
                        st["done"] = True
                elif cost < st["inc"] - slack:
                    st["found"] = True
                    st["inc"] = cost
                    st["thr"] = math.exp(cost - slack)
                    st["best"] = perm.copy()
            elif _expand(d, x, y, cr, cri):
                dfs(d + 1, cr, cri)
            perm[x] = -1
            used[y] = False
            if st["done"]:
                return
            if st["aborted"]:
                rest = [k[0] for k in kids[idx + 1:]]
                if rest:
                    st["frontier"] = min(st["frontier"], min(rest))
                return

    def _expand(d, x, y, cr, cri):
        rem = order[d + 1:]
        free = np.flatnonzero(~used)
        sub = np.ix_(rem, free)
        colx = dx[rem, x]
        coly = dy[free, y]
        nfr = np.maximum(fr[d][sub], coly[None, :] / colx[:, None])
        nfi = np.maximum(fi[d][sub], colx[:, None] / coly[None, :])
        fr[d + 1][sub] = nfr
        fi[d + 1][sub] = nfi
        keys = np.maximum(np.maximum(nfr, cr), 1.0) * np.maximum(np.maximum(nfi, cri), 1.0)
        if not alive(keys.min(axis=1).max()):
            return False
        m = free.shape[0]
        if m >= 2:
            iu, ju = np.triu_indices(m, 1)
            sy = np.sort(dy[free[iu], free[ju]])
            sx = resx[d + 1, : sy.shape[0]]
            rp = max(cr, (sy / sx).max())
            rip = max(cri, (sx / sy).max())
            if not alive(max(rp, 1.0) * max(rip, 1.0)):
                return False
        return True

    dfs(0, 0.0, 0.0)
    best = st["best"] if st["found"] else None
    return st["found"], st["inc"], best, st["nodes"], st["aborted"], st["frontier"]
