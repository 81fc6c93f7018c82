"""Desk-scale runs over the interval and pulse families.

Each runner returns an :class:`ExperimentResult` holding a fixed-order
table, headline numbers and named boolean checks. Tables contain no
timings, so re-running a config reproduces the CSV and JSON byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .constructions import (
    ALPHABETS,
    DiscretizationParams,
    SignVector,
    interval_space,
    projection_map,
    pulse_space,
    random_sign_vectors,
    sign_vectors,
)
from .io import csv_text, json_text
from .metric import lipschitz_cost
from .solver import NAIVE_MAX_POINTS, Budget, certify_separation, exact_distance, naive_distance

__all__ = [
    "LOG2",
    "INTERVAL_BOUND",
    "INTERVAL_THRESHOLD",
    "PROJECTION_BOUND",
    "PULSE_THRESHOLD",
    "CAPTION",
    "ExperimentConfig",
    "ExperimentResult",
    "projection_bound",
    "slope_for_radius",
    "lemma_ce_experiment",
    "lemma_ce2_experiment",
    "geometry_fixture_suite",
    "remark_ball_experiment",
]

LOG2 = math.log(2.0)
INTERVAL_BOUND = 2.0 * LOG2
INTERVAL_THRESHOLD = LOG2
PROJECTION_BOUND = 0.5 * LOG2
PULSE_THRESHOLD = (math.log(math.sqrt(2.0) + 1.0) - math.log(math.sqrt(5.0))) / 2.0

BOUND_TOL = 1e-9
FIXTURE_RTOL = 1e-12
EXHAUSTIVE_MAX = 16

CAPTION = (
    "desk-scale analogue: distances between finite samplings of the families; "
    "a positive gap here does not prove the continuum separation statement"
)


@dataclass(frozen=True)
class ExperimentConfig:
    family: str = "interval"
    depth: int = 3
    samples: int = 2
    eps: tuple[float, ...] = (1.0,)
    mode: str = "exhaustive"  # or "random"
    count: int = 8
    seed: int = 0
    budget: Budget | None = None
    workers: int = 1

    def __post_init__(self):
        if self.family not in ALPHABETS:
            raise ValueError(f"family must be one of {sorted(ALPHABETS)}, got {self.family!r}")
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.mode == "exhaustive":
            total = len(ALPHABETS[self.family]) ** self.depth
            if total > EXHAUSTIVE_MAX:
                raise ValueError(
                    f"exhaustive mode builds {total} spaces at depth {self.depth}; "
                    f"the limit is {EXHAUSTIVE_MAX} (use mode='random')"
                )
        elif self.mode != "random":
            raise ValueError(f"mode must be 'exhaustive' or 'random', got {self.mode!r}")

    def params(self, eps: float = 1.0) -> DiscretizationParams:
        return DiscretizationParams(self.depth, self.samples, eps)

    def sign_vectors(self) -> list[SignVector]:
        if self.mode == "exhaustive":
            return sign_vectors(self.family, self.depth)
        return random_sign_vectors(self.family, self.depth, self.count, self.seed)

    def describe(self) -> dict:
        out = {
            "family": self.family,
            "N": self.depth,
            "k": self.samples,
            "eps": list(self.eps),
            "mode": self.mode,
            "seed": self.seed,
        }
        if self.mode == "random":
            out["count"] = self.count
        if self.budget is not None:
            out["budget_nodes"] = self.budget.max_nodes
            out["budget_seconds"] = self.budget.max_seconds
        return out


@dataclass
class ExperimentResult:
    name: str
    config: dict
    columns: list[str]
    rows: list[dict]
    headline: dict
    checks: dict[str, bool]
    extra: dict = field(default_factory=dict)
    caption: str = CAPTION

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def bracketed(self) -> bool:
        return any(r.get("status") == "bracketed" for r in self.rows)

    def to_csv(self) -> str:
        return csv_text(self.columns, self.rows, self.caption)

    def to_dict(self) -> dict:
        out = {
            "format_version": 1,
            "experiment": self.name,
            "caption": self.caption,
            "config": self.config,
            "headline": {k: _jsonable(v) for k, v in self.headline.items()},
            "checks": self.checks,
            "columns": self.columns,
            "rows": [{c: _jsonable(r[c]) for c in self.columns} for r in self.rows],
        }
        out.update({k: _jsonable(v) for k, v in self.extra.items()})
        return out

    def to_json(self) -> str:
        return json_text(self.to_dict())

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{self.name}.csv"
        json_path = out / f"{self.name}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(self.to_json())
        return csv_path, json_path


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def projection_bound(eps: float) -> float:
    """Cost bound for projecting the slope-``eps`` pulse curve to the line."""
    return 0.5 * math.log1p(eps * eps)


def slope_for_radius(delta: float) -> float:
    """A slope whose projection bound lies strictly below ``delta``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return min(1.0, math.sqrt(math.expm1(2.0 * delta)) / 2.0)


_PAIR_COLUMNS = ["u", "v", "n_u", "n_v", "status", "value", "lower", "upper",
                 "spectrum_lb", "naive", "nodes", "below_threshold"]


def _separation_table(us, spaces, threshold, cfg):
    report = certify_separation(spaces, threshold, cfg.budget, exact_all=True,
                                family=cfg.family, workers=cfg.workers, seed=cfg.seed)
    offdiag = {(r.a, r.b): r for r in report.rows}
    rows = []
    for i, u in enumerate(us):
        for j in range(i, len(us)):
            X, Y = spaces[i], spaces[j]
            if i == j:
                res = exact_distance(X, X, cfg.budget, seed=cfg.seed)
                status, lower, upper, lb, nodes = res.status, res.lower, res.upper, 0.0, res.nodes_explored
            else:
                r = offdiag[(X.name, Y.name)]
                status, lower, upper, lb, nodes = r.status, r.lower, r.upper, r.spectrum_lb, r.nodes
            naive = None
            if X.n == Y.n and X.n <= NAIVE_MAX_POINTS:
                naive = naive_distance(X, Y)
            rows.append({
                "u": str(u),
                "v": str(us[j]),
                "n_u": X.n,
                "n_v": Y.n,
                "status": status,
                "value": upper if status in ("exact", "infinite") else None,
                "lower": lower,
                "upper": upper,
                "spectrum_lb": lb,
                "naive": naive,
                "nodes": nodes,
                "below_threshold": lower < threshold,
            })
    return report, rows


def _common_checks(rows):
    diag = [r for r in rows if r["u"] == r["v"]]
    off = [r for r in rows if r["u"] != r["v"]]
    matched = [r for r in off if r["n_u"] == r["n_v"]]
    checks = {
        "diagonal_zero": all(r["status"] == "exact" and r["value"] == 0.0 for r in diag),
        "off_diagonal_positive": all(r["lower"] > 0 for r in matched),
        "mismatched_infinite": all(r["status"] == "infinite" for r in off if r["n_u"] != r["n_v"]),
    }
    crossed = [r for r in off if r["naive"] is not None and r["status"] == "exact"]
    if crossed:
        checks["naive_agrees"] = all(abs(r["value"] - r["naive"]) <= 1e-12 for r in crossed)
    return checks


def _min_or_none(values):
    values = [v for v in values if v is not None]
    return min(values) if values else None


def lemma_ce_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Pairwise distances of sampled interval spaces ``X_u`` against the log 2 gap."""
    if cfg.family != "interval":
        raise ValueError("lemma_ce_experiment needs family='interval'")
    us = cfg.sign_vectors()
    params = cfg.params()
    spaces = [interval_space(u, params) for u in us]
    report, rows = _separation_table(us, spaces, INTERVAL_THRESHOLD, cfg)
    off = [r for r in rows if r["u"] != r["v"]]
    naive_gap = _min_or_none(r["naive"] for r in off)
    checks = _common_checks(rows)
    checks["max_within_2log2"] = report.max_value is None or report.max_value <= INTERVAL_BOUND + BOUND_TOL
    if naive_gap is not None and report.min_gap is not None:
        checks["min_gap_matches_naive"] = abs(report.min_gap - naive_gap) <= 1e-12
    headline = {
        "spaces": len(spaces),
        "points_per_space": spaces[0].n,
        "pairs": len(off),
        "max_value": report.max_value,
        "min_gap": report.min_gap,
        "naive_min_gap": naive_gap,
        "bound_2log2": INTERVAL_BOUND,
        "threshold_log2": INTERVAL_THRESHOLD,
        "pairs_below_threshold": len(report.below_threshold),
    }
    return ExperimentResult("ce", cfg.describe(), _PAIR_COLUMNS, rows, headline, checks)


def lemma_ce2_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Pairwise distances of sampled pulse curves ``Y_u`` (slope 1)."""
    if cfg.family != "pulse":
        raise ValueError("lemma_ce2_experiment needs family='pulse'")
    if cfg.eps != (1.0,):
        raise ValueError("lemma_ce2_experiment runs at eps = 1 only")
    us = cfg.sign_vectors()
    params = cfg.params(1.0)
    spaces = [pulse_space(u, params) for u in us]
    report, rows = _separation_table(us, spaces, PULSE_THRESHOLD, cfg)
    projections = []
    for u in us:
        rep = lipschitz_cost(projection_map(u, params))
        projections.append({"u": str(u), "cost": rep.cost, "dil_forward": rep.dil_forward,
                            "dil_inverse": rep.dil_inverse})
    checks = _common_checks(rows)
    checks["projection_within_half_log2"] = all(
        p["cost"] <= PROJECTION_BOUND + BOUND_TOL for p in projections
    )
    off = [r for r in rows if r["u"] != r["v"]]
    headline = {
        "spaces": len(spaces),
        "points_per_space": spaces[0].n,
        "pairs": len(off),
        "max_value": report.max_value,
        "min_gap": report.min_gap,
        "threshold": PULSE_THRESHOLD,
        "projection_bound_half_log2": PROJECTION_BOUND,
        "max_projection_cost": max(p["cost"] for p in projections),
        "pairs_below_threshold": len(report.below_threshold),
    }
    return ExperimentResult("ce2", cfg.describe(), _PAIR_COLUMNS, rows, headline, checks,
                            extra={"projection": projections})


def _fixture_row(name, n, expected, measured):
    expected, measured = float(expected), float(measured)
    rel = abs(measured - expected) / abs(expected)
    return {"fixture": name, "n": n, "expected": expected, "measured": measured,
            "rel_err": rel, "passed": rel <= FIXTURE_RTOL}


def _displacement(n):
    # f(2^-(n+1)) lands on an endpoint of block n, f(2^-(n+2)) on an endpoint
    # of block n+2 or n+3; the closest such pair is 5/2 * 2^-(n+2) apart.
    depth = n + 3
    best = math.inf
    for v in sign_vectors("interval", depth):
        X = interval_space(v, DiscretizationParams(depth, 2))
        left = [X.index(f"I{n}.0"), X.index(f"I{n}.1")]
        right = [X.index(f"I{m}.{j}") for m in (n + 2, n + 3) for j in (0, 1)]
        best = min(best, min(X.dist[a, b] for a in left for b in right))
    return best


def geometry_fixture_suite(ns=(1, 2, 3)) -> ExperimentResult:
    """Closed-form distances used in the separation arguments, measured on built spaces."""
    rows = []
    for n in ns:
        rows.append(_fixture_row("displacement", n, 2.5 / 2 ** (n + 2), _displacement(n)))

        Y = pulse_space((1,) * n, DiscretizationParams(n, 5, 1.0))
        start, peak, foot = (Y.index(f"J{n}.{w}") for w in ("start", "peak", "foot"))
        rows.append(_fixture_row("peak", n, math.sqrt(2) / 2 ** (n + 2), Y.dist[start, peak]))
        worst = None
        for lab, x in zip(Y.labels, Y.coords[:, 0]):
            if lab.startswith(f"J{n}.rise."):
                got, want = Y.dist[start, Y.index(lab)], math.sqrt(2) * (x - 2.0**-n)
            elif lab.startswith(f"J{n}.fall."):
                got, want = Y.dist[foot, Y.index(lab)], math.sqrt(2) * (3 / 2 ** (n + 1) - x)
            else:
                continue
            row = _fixture_row("edge", n, want, got)
            if worst is None or row["rel_err"] > worst["rel_err"]:
                worst = row
        rows.append(worst)
        legs = Y.dist[start, peak] ** 2 + Y.dist[peak, foot] ** 2
        rows.append(_fixture_row("right_angle", n, Y.dist[start, foot] ** 2, legs))

        # pulse on block n, flat block n+1 to its left; k=5 puts samples at 2^-n +- delta
        Z = pulse_space((0,) * (n - 1) + (1, 0), DiscretizationParams(n + 1, 5, 1.0))
        delta = 2.0 ** -(n + 4)
        a = Z.index(f"J{n + 1}.flat.3")
        b = Z.index(f"J{n}.rise.1")
        rows.append(_fixture_row("straddle", n, math.sqrt(5) * delta, Z.dist[a, b]))
    checks = {name: all(r["passed"] for r in rows if r["fixture"] == name)
              for name in ("displacement", "peak", "edge", "right_angle", "straddle")}
    headline = {"fixtures": len(rows), "max_rel_err": max(r["rel_err"] for r in rows),
                "rtol": FIXTURE_RTOL}
    columns = ["fixture", "n", "expected", "measured", "rel_err", "passed"]
    return ExperimentResult("fixtures", {"n": list(ns)}, columns, rows, headline, checks,
                            caption="closed-form distances reproduced on constructed spaces")


def remark_ball_experiment(u="101", eps_list=(1.0, 0.5, 0.25, 0.125), depth=None,
                           samples=3, deltas=(0.5, 0.2, 0.05, 0.01)) -> ExperimentResult:
    """Projection cost of ``Y^eps_u`` onto the line for decreasing slopes.

    The cost shrinks with ``eps``. For each radius in ``deltas`` the result
    records the first listed slope that puts the sampled curve inside that
    ball around the segment (``None`` if the list stops short), together
    with :func:`slope_for_radius`, a slope that always would.
    """
    u = SignVector.coerce(u, "pulse")
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(not (0 < e <= 1) for e in eps_list):
        raise ValueError("every eps must lie in (0, 1]")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps list must be strictly decreasing")
    depth = len(u) if depth is None else depth
    rows = []
    for eps in eps_list:
        rep = lipschitz_cost(projection_map(u, DiscretizationParams(depth, samples, eps)))
        bound = projection_bound(eps)
        rows.append({"eps": eps, "cost": rep.cost, "bound": bound,
                     "dil_forward": rep.dil_forward, "dil_inverse": rep.dil_inverse,
                     "within_bound": rep.cost <= bound + BOUND_TOL})
    costs = [r["cost"] for r in rows]
    balls = []
    for delta in deltas:
        hit = next((r["eps"] for r in rows if r["cost"] < delta), None)
        balls.append({"delta": delta, "eps": hit, "slope_for_radius": slope_for_radius(delta)})
    checks = {
        "strictly_decreasing": all(b < a for a, b in zip(costs, costs[1:])),
        "within_bound": all(r["within_bound"] for r in rows),
    }
    headline = {"u": str(u), "pulses": u.pulses, "costs": costs}
    columns = ["eps", "cost", "bound", "dil_forward", "dil_inverse", "within_bound"]
    config = {"u": str(u), "N": depth, "k": samples, "eps": eps_list}
    return ExperimentResult("remark", config, columns, rows, headline, checks, extra={"balls": balls},
                            caption="projection cost of the slope-eps pulse curve onto its x-samples")
