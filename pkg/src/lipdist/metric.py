"""Finite metric spaces, bijections between them, and their distortion.

A map is scored by its Lipschitz cost ``|log dil(f)| + |log dil(f^-1)|``
(natural log), where ``dil`` is the largest ratio of image distance to
source distance over all pairs of distinct points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "MetricStructureError",
    "MetricAxiomError",
    "Violation",
    "FiniteMetricSpace",
    "PointMap",
    "DistortionReport",
    "validate_metric",
    "check_metric",
    "dilation",
    "lipschitz_cost",
    "is_epsilon_isometry",
    "TRIANGLE_RTOL",
    "COORDS_RTOL",
]

TRIANGLE_RTOL = 1e-9
COORDS_RTOL = 1e-12


class MetricStructureError(ValueError):
    """Raised when labels, matrix and coordinates disagree in shape."""


class MetricAxiomError(ValueError):
    """Raised by :func:`check_metric` when a metric axiom fails."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            head += f"; ... ({more} more)"
        super().__init__(head)


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    detail: str = ""

    def __str__(self):
        idx = ",".join(str(i) for i in self.indices)
        text = f"{self.axiom} at ({idx})"
        return f"{text}: {self.detail}" if self.detail else text


def _frozen(array):
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A labelled finite point set with a distance matrix.

    The constructor only checks structure (square matrix, one label per
    point, one coordinate pair per point). Metric axioms are checked by
    :func:`validate_metric`.
    """

    name: str
    labels: tuple[str, ...]
    dist: np.ndarray
    coords: np.ndarray | None = None
    provenance: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        dist = _frozen(self.dist)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise MetricStructureError(f"distance matrix must be square, got shape {dist.shape}")
        if dist.shape[0] != len(labels):
            raise MetricStructureError(
                f"{len(labels)} labels for a {dist.shape[0]}x{dist.shape[0]} matrix"
            )
        if len(labels) == 0:
            raise MetricStructureError("a metric space needs at least one point")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        if self.coords is not None:
            coords = _frozen(self.coords)
            if coords.shape != (len(labels), 2):
                raise MetricStructureError(
                    f"coords must have shape ({len(labels)}, 2), got {coords.shape}"
                )
            object.__setattr__(self, "coords", coords)

    @classmethod
    def from_coords(cls, name, labels, coords, provenance=None):
        """Space of planar points under the Euclidean metric."""
        coords = np.asarray(coords, dtype=np.float64)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        return cls(name, tuple(labels), dist, coords, provenance)

    @classmethod
    def from_points(cls, name, xs, labels=None, provenance=None):
        """Space of real numbers under ``|x - y|``."""
        xs = np.asarray(xs, dtype=np.float64)
        if labels is None:
            labels = [str(i) for i in range(len(xs))]
        return cls(name, tuple(labels), np.abs(xs[:, None] - xs[None, :]), None, provenance)

    def __len__(self):
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def diameter(self) -> float:
        return float(self.dist.max())

    def eccentricity(self) -> np.ndarray:
        """Largest distance from each point to any other."""
        return self.dist.max(axis=1)

    def scaled(self, c: float, name: str | None = None) -> "FiniteMetricSpace":
        coords = None if self.coords is None else self.coords * c
        return FiniteMetricSpace(name or self.name, self.labels, self.dist * c, coords)

    def spectrum(self) -> np.ndarray:
        """Sorted pairwise distances (each unordered pair once)."""
        iu = np.triu_indices(self.n, 1)
        return np.sort(self.dist[iu])


def validate_metric(space: FiniteMetricSpace) -> list[Violation]:
    """Return every metric-axiom violation of ``space``.

    An empty list means the space is a valid finite metric space: zero
    diagonal, symmetry, strictly positive off-diagonal distances, the
    triangle inequality (relative slack ``TRIANGLE_RTOL``) and, when
    coordinates are attached, agreement with planar Euclidean distance
    (relative slack ``COORDS_RTOL``).
    """
    d = space.dist
    n = d.shape[0]
    if d.shape != (n, n) or n != len(space.labels):
        raise MetricStructureError("labels and matrix disagree in size")
    out: list[Violation] = []

    bad = ~np.isfinite(d)
    for i, j in zip(*np.nonzero(bad)):
        out.append(Violation("finite", (int(i), int(j)), f"dist={d[i, j]!r}"))
    if out:
        return out

    for i in np.nonzero(np.diag(d) != 0)[0]:
        out.append(Violation("zero-diagonal", (int(i), int(i)), f"dist={d[i, i]!r}"))
    iu, ju = np.triu_indices(n, 1)
    for i, j in zip(iu, ju):
        if d[i, j] != d[j, i]:
            out.append(Violation("symmetry", (int(i), int(j)), f"{d[i, j]!r} != {d[j, i]!r}"))
        if d[i, j] <= 0 or d[j, i] <= 0:
            out.append(Violation("positivity", (int(i), int(j)), f"dist={d[i, j]!r}"))

    # (i, j, k) means d(i, k) > d(i, j) + d(j, k)
    for j in range(n):
        via = d[:, j][:, None] + d[j, :][None, :]
        viol = d > via * (1.0 + TRIANGLE_RTOL)
        np.fill_diagonal(viol, False)
        viol[j, :] = False
        viol[:, j] = False
        for i, k in zip(*np.nonzero(np.triu(viol))):
            out.append(
                Violation(
                    "triangle",
                    (int(i), j, int(k)),
                    f"{d[i, k]!r} > {d[i, j]!r} + {d[j, k]!r}",
                )
            )

    if space.coords is not None:
        c = space.coords
        diff = c[:, None, :] - c[None, :, :]
        planar = np.hypot(diff[..., 0], diff[..., 1])
        off = np.abs(planar - d) > COORDS_RTOL * np.maximum(np.abs(planar), np.abs(d))
        for i, j in zip(*np.nonzero(np.triu(off, 1))):
            out.append(
                Violation("coords", (int(i), int(j)), f"dist={d[i, j]!r}, planar={planar[i, j]!r}")
            )
    return out


def check_metric(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """Return ``space`` unchanged, or raise :class:`MetricAxiomError`."""
    violations = validate_metric(space)
    if violations:
        raise MetricAxiomError(violations)
    return space


@dataclass(frozen=True, eq=False)
class PointMap:
    """A bijection ``source -> target``; ``perm[i]`` is the image of point ``i``."""

    source: FiniteMetricSpace
    target: FiniteMetricSpace
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if self.source.n != self.target.n:
            raise ValueError(
                f"source has {self.source.n} points but target has {self.target.n}"
            )
        if len(perm) != self.source.n or sorted(perm) != list(range(self.source.n)):
            raise ValueError(f"perm is not a bijection onto {self.target.n} points: {perm}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, space: FiniteMetricSpace) -> "PointMap":
        return cls(space, space, tuple(range(space.n)))

    def inverse(self) -> "PointMap":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return PointMap(self.target, self.source, tuple(inv))

    def then(self, other: "PointMap") -> "PointMap":
        """Composition ``other o self`` (apply ``self`` first)."""
        if other.source.n != self.target.n:
            raise ValueError("maps are not composable")
        return PointMap(self.source, other.target, tuple(other.perm[p] for p in self.perm))

    def __call__(self, label: str) -> str:
        return self.target.labels[self.perm[self.source.index(label)]]


@dataclass(frozen=True)
class DistortionReport:
    dil_forward: float
    dil_inverse: float
    cost: float


def _max_ratio(num: np.ndarray, den: np.ndarray, perm: Sequence[int]) -> float:
    n = den.shape[0]
    if n < 2:
        return 1.0
    p = np.asarray(perm, dtype=np.intp)
    iu, ju = np.triu_indices(n, 1)
    return float(np.max(num[p[iu], p[ju]] / den[iu, ju]))


def dilation(f: PointMap) -> float:
    """Smallest Lipschitz constant of ``f``; 1 on a one-point space."""
    return _max_ratio(f.target.dist, f.source.dist, f.perm)


def lipschitz_cost(f: PointMap) -> DistortionReport:
    n = f.source.n
    fwd = dilation(f)
    if n < 2:
        inv = 1.0
    else:
        p = np.asarray(f.perm, dtype=np.intp)
        iu, ju = np.triu_indices(n, 1)
        # same pair ratios as dilation(f.inverse()), without re-indexing
        inv = float(np.max(f.source.dist[iu, ju] / f.target.dist[p[iu], p[ju]]))
    return DistortionReport(fwd, inv, abs(math.log(fwd)) + abs(math.log(inv)))


def is_epsilon_isometry(f: PointMap, eps: float) -> bool:
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    return lipschitz_cost(f).cost <= eps
