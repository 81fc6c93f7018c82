"""Lipschitz distance between finite metric spaces.

On finite spaces every bijection is bi-Lipschitz, so ``d_L(X, Y)`` is the
minimum Lipschitz cost over the ``n!`` bijections (infinite when the
cardinalities differ). :func:`exact_distance` finds it by branch and
bound; :func:`naive_distance` enumerates every bijection and serves as the
oracle for small ``n``.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .metric import FiniteMetricSpace, PointMap, lipschitz_cost

__all__ = [
    "SLACK",
    "NAIVE_MAX_POINTS",
    "Budget",
    "LipschitzResult",
    "SeparationRow",
    "SeparationReport",
    "exact_distance",
    "naive_distance",
    "spectrum_lower_bound",
    "local_search_upper_bound",
    "certify_separation",
]

SLACK = 1e-12
NAIVE_MAX_POINTS = 8


@dataclass(frozen=True)
class Budget:
    """Search limits; ``None`` means unlimited. Zero skips the search entirely."""

    max_nodes: int | None = None
    max_seconds: float | None = None

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes < 0:
            raise ValueError("max_nodes must be >= 0")
        if self.max_seconds is not None and self.max_seconds < 0:
            raise ValueError("max_seconds must be >= 0")

    @property
    def is_zero(self) -> bool:
        return self.max_nodes == 0 or self.max_seconds == 0


@dataclass
class LipschitzResult:
    status: str  # "exact" | "bracketed" | "infinite"
    lower: float
    upper: float
    best_map: PointMap | None
    nodes_explored: int = 0
    elapsed: float = 0.0

    @property
    def value(self) -> float | None:
        """The distance when it is known exactly (``inf`` if infinite)."""
        if self.status == "bracketed":
            return None
        return self.upper

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "status": self.status,
            "value": None if self.value is None or math.isinf(self.value) else self.value,
            "bracket": [_finite_or_none(self.lower), _finite_or_none(self.upper)],
            "perm": None if self.best_map is None else list(self.best_map.perm),
            "nodes": self.nodes_explored,
        }
        if timing:
            out["time"] = self.elapsed
        return out


def _finite_or_none(x):
    return None if math.isinf(x) else x


def _infinite(t0) -> LipschitzResult:
    return LipschitzResult("infinite", math.inf, math.inf, None, 0, time.perf_counter() - t0)


def _pairs(n):
    return np.triu_indices(n, 1)


def spectrum_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Lower bound on ``d_L`` from the sorted pairwise-distance multisets.

    Any bijection of points induces a bijection of pairs, and among pair
    bijections the sorted matching minimises both the largest ratio
    ``dY/dX`` and the largest ratio ``dX/dY``.
    """
    if X.n != Y.n:
        raise ValueError(f"cardinalities differ ({X.n} vs {Y.n}); the distance is infinite")
    if X.n < 2:
        return 0.0
    sx, sy = X.spectrum(), Y.spectrum()
    r_plus = float(np.max(sy / sx))
    r_minus = float(np.max(sx / sy))
    return math.log(max(r_plus, 1.0)) + math.log(max(r_minus, 1.0))


def _evaluate(dx, dy, perms, iu, ju):
    """Cost and a smooth tie-breaker for each row of ``perms``."""
    num = dy[perms[:, iu], perms[:, ju]]
    den = dx[iu, ju]
    big = (num / den).max(axis=1)
    big_inv = (den / num).max(axis=1)
    cost = np.abs(np.log(big)) + np.abs(np.log(big_inv))
    soft = np.square(np.log(num / den)).sum(axis=1)
    return cost, soft


def _hill_climb(dx, dy, perm, iu, ju, max_sweeps):
    n = perm.shape[0]
    si, sj = _pairs(n)
    cost, soft = _evaluate(dx, dy, perm[None, :], iu, ju)
    cost, soft = cost[0], soft[0]
    for _ in range(max_sweeps):
        trial = np.repeat(perm[None, :], si.shape[0], axis=0)
        rows = np.arange(si.shape[0])
        trial[rows, si] = perm[sj]
        trial[rows, sj] = perm[si]
        c, s = _evaluate(dx, dy, trial, iu, ju)
        best = np.lexsort((s, c))[0]
        if c[best] < cost - 1e-15 or (c[best] <= cost and s[best] < soft - 1e-12):
            perm, cost, soft = trial[best], c[best], s[best]
        else:
            break
    return perm


def _greedy(dx, dy, ecc_x, ecc_y, rng):
    n = dx.shape[0]
    jitter = 1.0 + 0.05 * rng.random(n)
    order = np.argsort(-(ecc_x * jitter), kind="stable")
    perm = np.full(n, -1, dtype=np.intp)
    free = np.ones(n, dtype=bool)
    big = big_inv = 0.0
    done = []
    for x in order:
        ys = np.flatnonzero(free)
        if not done:
            y = int(rng.choice(ys))
        else:
            a = np.asarray(done)
            num = dy[np.ix_(ys, perm[a])]
            den = dx[x, a][None, :]
            cb = np.maximum((num / den).max(axis=1), big)
            ci = np.maximum((den / num).max(axis=1), big_inv)
            score = np.log(np.maximum(cb, 1.0)) + np.log(np.maximum(ci, 1.0))
            score = score + 1e-3 * np.abs(np.log(ecc_y[ys] / ecc_x[x])) + 1e-9 * rng.random(ys.shape[0])
            pick = int(np.argmin(score))
            y = int(ys[pick])
            big, big_inv = float(cb[pick]), float(ci[pick])
        perm[x] = y
        free[y] = False
        done.append(x)
    return perm


def local_search_upper_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace, restarts: int = 8,
                             seed: int = 0) -> tuple[float, PointMap]:
    """Cost and map of the best bijection found by greedy starts plus 2-swap descent.

    The first start pairs points by eccentricity rank (the identity when
    ``X`` and ``Y`` coincide); the remaining ``restarts - 1`` starts are
    randomized greedy constructions. Deterministic for a given ``seed``.
    """
    if X.n != Y.n:
        raise ValueError(f"cardinalities differ ({X.n} vs {Y.n})")
    n = X.n
    if n == 1:
        f = PointMap(X, Y, (0,))
        return 0.0, f
    dx, dy = X.dist, Y.dist
    iu, ju = _pairs(n)
    ecc_x, ecc_y = X.eccentricity(), Y.eccentricity()
    rng = np.random.default_rng(seed)
    ranked = np.empty(n, dtype=np.intp)
    ranked[np.argsort(-ecc_x, kind="stable")] = np.argsort(-ecc_y, kind="stable")
    starts = [ranked] + [_greedy(dx, dy, ecc_x, ecc_y, rng) for _ in range(max(restarts, 1) - 1)]
    best = None
    for start in starts:
        perm = _hill_climb(dx, dy, start, iu, ju, max_sweeps=20 * n)
        f = PointMap(X, Y, tuple(perm))
        c = lipschitz_cost(f).cost
        if best is None or c < best[0] or (c == best[0] and f.perm < best[1].perm):
            best = (c, f)
    return best


def _residual_spectra(dx, order):
    n = dx.shape[0]
    out = np.zeros((n + 1, max(1, n * (n - 1) // 2)))
    for t in range(n + 1):
        rest = order[t:]
        m = rest.shape[0]
        if m >= 2:
            iu, ju = _pairs(m)
            vals = np.sort(dx[rest[iu], rest[ju]])
            out[t, : vals.shape[0]] = vals
    return out


def exact_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace, budget: Budget | None = None, *,
                   restarts: int = 8, seed: int = 0, kernel: str | None = None) -> LipschitzResult:
    """Minimum Lipschitz cost over all bijections ``X -> Y``.

    The search runs in two passes. The first minimises the cost by branch
    and bound, assigning source points by decreasing eccentricity and
    starting from the local-search incumbent. The second walks bijections
    in lexicographic order at the optimal cost, so among cost ties the
    lexicographically smallest permutation is returned.

    If ``budget`` runs out during the first pass the result is
    ``"bracketed"``: ``upper`` is the cost of ``best_map`` and ``lower`` the
    smallest bound over the unexplored part of the tree.
    """
    t0 = time.perf_counter()
    if X.n != Y.n:
        return _infinite(t0)
    n = X.n
    if n == 1:
        f = PointMap(X, Y, (0,))
        return LipschitzResult("exact", 0.0, 0.0, f, 1, time.perf_counter() - t0)
    budget = budget or Budget()
    search = _backend.get_kernel(kernel)
    dx = np.ascontiguousarray(X.dist)
    dy = np.ascontiguousarray(Y.dist)

    ub, ub_map = local_search_upper_bound(X, Y, restarts, seed)
    lb = min(spectrum_lower_bound(X, Y), ub)
    if budget.is_zero:
        # a bracket that has already collapsed is a proof of optimality
        status = "exact" if lb >= ub else "bracketed"
        return LipschitzResult(status, lb, ub, ub_map, 0, time.perf_counter() - t0)

    nodes = 0
    best, best_perm = ub, np.asarray(ub_map.perm, dtype=np.intp)
    if ub - lb > SLACK:
        ecc_x, ecc_y = X.eccentricity(), Y.eccentricity()
        order = np.argsort(-ecc_x, kind="stable")
        mismatch = np.abs(np.log(ecc_y[None, :] / ecc_x[:, None]))
        cand = np.argsort(mismatch, axis=1, kind="stable")
        node_limit = -1 if budget.max_nodes is None else budget.max_nodes
        time_limit = -1.0
        if budget.max_seconds is not None:
            time_limit = max(0.0, budget.max_seconds - (time.perf_counter() - t0))
        found, cost, perm, used, aborted, frontier = search(
            dx, dy, order, cand, _residual_spectra(dx, order), False, ub, SLACK,
            node_limit, time_limit, True,
        )
        nodes += used
        if found:
            best, best_perm = cost, perm
        if aborted:
            f = PointMap(X, Y, tuple(best_perm))
            upper = lipschitz_cost(f).cost
            lower = max(lb, min(upper, math.log(frontier)))
            return LipschitzResult("bracketed", lower, upper, f, nodes, time.perf_counter() - t0)

    order = np.arange(n)
    cand = np.tile(np.arange(n), (n, 1))
    found, _, perm, used, _, _ = search(
        dx, dy, order, cand, _residual_spectra(dx, order), True, best + SLACK, SLACK, -1, -1.0, False,
    )
    nodes += used
    f = PointMap(X, Y, tuple(perm if found else best_perm))
    value = lipschitz_cost(f).cost
    return LipschitzResult("exact", value, value, f, nodes, time.perf_counter() - t0)


def naive_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace, return_map: bool = False):
    """Minimum Lipschitz cost by enumerating all ``n!`` bijections (``n <= 8``).

    With ``return_map`` the lexicographically first optimal map is
    returned as well (``None`` when the distance is infinite).
    """
    if X.n != Y.n:
        return (math.inf, None) if return_map else math.inf
    n = X.n
    if n > NAIVE_MAX_POINTS:
        raise ValueError(f"naive enumeration is capped at {NAIVE_MAX_POINTS} points, got {n}")
    if n == 1:
        return (0.0, PointMap(X, Y, (0,))) if return_map else 0.0
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    iu, ju = _pairs(n)
    num = Y.dist[perms[:, iu], perms[:, ju]]
    den = X.dist[iu, ju]
    costs = np.abs(np.log((num / den).max(axis=1))) + np.abs(np.log((den / num).max(axis=1)))
    i = int(np.argmin(costs))
    value = float(costs[i])
    if return_map:
        return value, PointMap(X, Y, tuple(perms[i]))
    return value


@dataclass
class SeparationRow:
    a: str
    b: str
    status: str  # exact | bracketed | infinite | bound
    lower: float
    upper: float
    spectrum_lb: float
    nodes: int = 0
    perm: tuple[int, ...] | None = None

    @property
    def value(self) -> float | None:
        return self.upper if self.status in ("exact", "infinite") else None


@dataclass
class SeparationReport:
    family: str
    threshold: float
    rows: list[SeparationRow] = field(default_factory=list)

    @property
    def min_gap(self) -> float | None:
        """Smallest certified lower bound over distinct pairs (``None`` without pairs)."""
        if not self.rows:
            return None
        return min(r.lower for r in self.rows)

    @property
    def max_value(self) -> float | None:
        """Largest finite upper bound (the exact value for exact rows)."""
        finite = [r.upper for r in self.rows if not math.isinf(r.upper)]
        return max(finite) if finite else None

    @property
    def below_threshold(self) -> list[tuple[str, str]]:
        return [(r.a, r.b) for r in self.rows if r.lower < self.threshold]

    @property
    def separated(self) -> bool:
        return bool(self.rows) and self.min_gap > 0


def _pair_job(args):
    X, Y, threshold, budget, exact_all, seed, kernel = args
    if X.n != Y.n:
        return SeparationRow(X.name, Y.name, "infinite", math.inf, math.inf, math.inf)
    lb = spectrum_lower_bound(X, Y)
    if exact_all or lb < threshold:
        res = exact_distance(X, Y, budget, seed=seed, kernel=kernel)
        return SeparationRow(X.name, Y.name, res.status, res.lower, res.upper, lb,
                             res.nodes_explored, res.best_map.perm)
    ub, f = local_search_upper_bound(X, Y, seed=seed)
    return SeparationRow(X.name, Y.name, "bound", lb, ub, lb, 0, f.perm)


def certify_separation(spaces, threshold: float, budget: Budget | None = None, *,
                       exact_all: bool = False, family: str = "", workers: int = 1,
                       seed: int = 0, kernel: str | None = None) -> SeparationReport:
    """Lower-bound ``d_L`` for every unordered pair of distinct spaces.

    Each pair first gets :func:`spectrum_lower_bound`; pairs whose bound is
    below ``threshold`` (every pair, with ``exact_all``) go to
    :func:`exact_distance`. Rows come back in input pair order whatever
    the number of ``workers``.
    """
    spaces = list(spaces)
    jobs = [
        (spaces[i], spaces[j], threshold, budget, exact_all, seed, kernel)
        for i in range(len(spaces))
        for j in range(i + 1, len(spaces))
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_pair_job, jobs))
    else:
        rows = [_pair_job(job) for job in jobs]
    return SeparationReport(family, threshold, rows)
