"""Finite samplings of the interval family X_u and the pulse family Y_u.

``X_u`` is ``{0}`` together with the intervals ``[2^-n, 2^-n + 2^-(n+u_n)]``
for ``u_n`` in ``{1, 2}``. ``Y_u`` is a planar curve over ``[0, 1]``: block
``n`` covers ``[2^-n, 2^-(n-1)]`` and is either flat (``u_n = 0``) or carries
a triangular pulse (``u_n = 1``) rising from ``2^-n``, peaking at
``5/2^(n+2)`` and landing at ``3/2^(n+1)``. Pulse edges have slope
``+-eps``; ``eps = 1`` gives the right-angled pulse.

Both families are truncated at depth ``N``. Coordinates are computed with
exact rationals and rounded once to float, so shared breakpoints are
bit-identical across families and resolutions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .metric import FiniteMetricSpace, PointMap

__all__ = [
    "ALPHABETS",
    "SignVectorError",
    "SignVector",
    "DiscretizationParams",
    "sign_vectors",
    "random_sign_vectors",
    "interval_space",
    "canonical_interval_map",
    "pulse_height",
    "pulse_grid",
    "pulse_space",
    "segment_space",
    "projection_map",
    "refines",
]

ALPHABETS = {"interval": (1, 2), "pulse": (0, 1)}


class SignVectorError(ValueError):
    """A sign vector string contains a character outside the alphabet."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class SignVector:
    entries: tuple[int, ...]
    family: str

    def __post_init__(self):
        if self.family not in ALPHABETS:
            raise ValueError(f"unknown family {self.family!r}; expected one of {sorted(ALPHABETS)}")
        entries = tuple(int(e) for e in self.entries)
        if not entries:
            raise SignVectorError("sign vector must have length >= 1")
        alphabet = ALPHABETS[self.family]
        for pos, e in enumerate(entries, start=1):
            if e not in alphabet:
                raise SignVectorError(
                    f"entry {e} at position {pos} is not in the {self.family} alphabet {alphabet}",
                    pos,
                )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, text: str, family: str) -> "SignVector":
        """Parse a digit string such as ``"121"`` or ``"0101"``."""
        if family not in ALPHABETS:
            raise ValueError(f"unknown family {family!r}")
        if not text:
            raise SignVectorError("empty sign vector")
        allowed = {str(a) for a in ALPHABETS[family]}
        for pos, ch in enumerate(text, start=1):
            if ch not in allowed:
                raise SignVectorError(
                    f"invalid character {ch!r} at position {pos}; "
                    f"{family} sign vectors use {''.join(sorted(allowed))}",
                    pos,
                )
        return cls(tuple(int(ch) for ch in text), family)

    @classmethod
    def coerce(cls, u, family: str) -> "SignVector":
        if isinstance(u, SignVector):
            if u.family != family:
                raise ValueError(f"expected a {family} sign vector, got {u.family}")
            return u
        if isinstance(u, str):
            return cls.parse(u, family)
        return cls(tuple(u), family)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n):
        return self.entries[n]

    def __str__(self):
        return "".join(str(e) for e in self.entries)

    @property
    def pulses(self) -> int:
        return sum(1 for e in self.entries if e == 1) if self.family == "pulse" else 0


@dataclass(frozen=True)
class DiscretizationParams:
    """Depth ``N``, samples per piece ``k`` (endpoints included) and pulse slope ``eps``."""

    depth: int
    samples: int = 2
    eps: float = 1.0

    def __post_init__(self):
        if int(self.depth) != self.depth or self.depth < 1:
            raise ValueError(f"depth must be a positive integer, got {self.depth}")
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValueError(f"samples per block must be an integer >= 2, got {self.samples}")
        if not (0 < self.eps <= 1):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")


def refines(k_fine: int, k_coarse: int) -> bool:
    """True when the ``k_fine`` grid contains every ``k_coarse`` sample."""
    return (k_fine - 1) % (k_coarse - 1) == 0


def sign_vectors(family: str, depth: int) -> list[SignVector]:
    """All sign vectors of length ``depth`` in lexicographic order."""
    alphabet = ALPHABETS[family]
    return [SignVector(e, family) for e in itertools.product(alphabet, repeat=depth)]


def random_sign_vectors(family: str, depth: int, count: int, seed: int) -> list[SignVector]:
    """``count`` distinct random sign vectors, sorted lexicographically."""
    alphabet = ALPHABETS[family]
    total = len(alphabet) ** depth
    if count > total:
        raise ValueError(f"only {total} distinct sign vectors of length {depth}")
    rng = random.Random(seed)
    picked = rng.sample(range(total), count)
    out = []
    for code in sorted(picked):
        digits = []
        for _ in range(depth):
            code, r = divmod(code, len(alphabet))
            digits.append(alphabet[r])
        out.append(SignVector(tuple(reversed(digits)), family))
    return out


def _check_length(u: SignVector, params: DiscretizationParams):
    if len(u) != params.depth:
        raise ValueError(f"sign vector {u} has length {len(u)}, depth is {params.depth}")


def _samples(a: Fraction, b: Fraction, k: int) -> list[Fraction]:
    return [a + (b - a) * Fraction(j, k - 1) for j in range(k)]


def interval_space(u, params: DiscretizationParams) -> FiniteMetricSpace:
    """Sampling of ``X_u``: the origin plus ``k`` evenly spaced points per interval.

    Points are ordered by increasing position. Labels are ``"origin"`` and
    ``"I{n}.{j}"`` for sample ``j`` of the block-``n`` interval.
    """
    u = SignVector.coerce(u, "interval")
    _check_length(u, params)
    k = params.samples
    labels = ["origin"]
    xs = [Fraction(0)]
    for n in range(params.depth, 0, -1):
        a = Fraction(1, 2**n)
        b = a + Fraction(1, 2 ** (n + u[n - 1]))
        for j, x in enumerate(_samples(a, b, k)):
            labels.append(f"I{n}.{j}")
            xs.append(x)
    prov = {"family": "interval", "u": str(u), "N": params.depth, "k": k}
    return FiniteMetricSpace.from_points(f"X_{u}", [float(x) for x in xs], labels, prov)


def canonical_interval_map(u, v, params: DiscretizationParams) -> PointMap:
    """The blockwise affine map ``X_u -> X_v`` restricted to the samples.

    Sample ``j`` of block ``n`` goes to sample ``j`` of block ``n`` and the
    origin is fixed. Since the continuous map is affine on each interval,
    this is exactly its restriction to the sample set.
    """
    u = SignVector.coerce(u, "interval")
    v = SignVector.coerce(v, "interval")
    if len(u) != len(v):
        raise ValueError(f"sign vectors differ in length: {len(u)} vs {len(v)}")
    xu = interval_space(u, params)
    xv = interval_space(v, params)
    where = {lab: i for i, lab in enumerate(xv.labels)}
    return PointMap(xu, xv, tuple(where[lab] for lab in xu.labels))


def _block_of(x: Fraction, depth: int) -> int:
    if x <= 0 or x > 1:
        raise ValueError(f"x = {float(x)} lies outside (0, 1]")
    n = 1
    while x < Fraction(1, 2**n):
        n += 1
        if n > depth:
            raise ValueError(f"x = {float(x)} lies below the retained blocks (depth {depth})")
    return n


def _rise(n: int, x, eps):
    return eps * (x - Fraction(1, 2**n))


def _fall(n: int, x, eps):
    return eps * (Fraction(3, 2 ** (n + 1)) - x)


def _height(u: SignVector, x: Fraction, eps: Fraction) -> Fraction:
    if x == 0:
        return Fraction(0)
    n = _block_of(x, len(u))
    if u[n - 1] == 0:
        return Fraction(0)
    peak = Fraction(5, 2 ** (n + 2))
    foot = Fraction(3, 2 ** (n + 1))
    if x <= peak:
        return _rise(n, x, eps)
    if x <= foot:
        return _fall(n, x, eps)
    return Fraction(0)


def pulse_height(u, x, eps: float = 1.0) -> float:
    """Height of the point of ``Y^eps_u`` above ``x``.

    Raises ``ValueError`` when ``x`` is negative, above 1, or below the
    last retained block.
    """
    u = SignVector.coerce(u, "pulse")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return float(_height(u, Fraction(x), Fraction(eps)))


def pulse_grid(depth: int, samples: int) -> tuple[list[str], list[Fraction]]:
    """Labels and exact x-positions shared by every member of the pulse family.

    Every block contributes its landmarks ``start`` (2^-n), ``peak``
    (5/2^(n+2)) and ``foot`` (3/2^(n+1)) plus ``samples - 2`` interior points
    on each of its three linear pieces. The block's right end is the
    ``start`` of the next block up; the right end of block 1 is ``"end"``.
    """
    labels = ["origin"]
    xs = [Fraction(0)]
    for n in range(depth, 0, -1):
        start = Fraction(1, 2**n)
        peak = Fraction(5, 2 ** (n + 2))
        foot = Fraction(3, 2 ** (n + 1))
        stop = Fraction(1, 2 ** (n - 1))
        for piece, (a, b), landmark in (
            ("rise", (start, peak), "start"),
            ("fall", (peak, foot), "peak"),
            ("flat", (foot, stop), "foot"),
        ):
            pts = _samples(a, b, samples)
            labels.append(f"J{n}.{landmark}")
            xs.append(pts[0])
            for j in range(1, samples - 1):
                labels.append(f"J{n}.{piece}.{j}")
                xs.append(pts[j])
    labels.append("end")
    xs.append(Fraction(1))
    return labels, xs


def pulse_space(u, params: DiscretizationParams) -> FiniteMetricSpace:
    """Sampling of ``Y^eps_u`` with the chordal (planar Euclidean) metric."""
    u = SignVector.coerce(u, "pulse")
    _check_length(u, params)
    eps = Fraction(params.eps)
    labels, xs = pulse_grid(params.depth, params.samples)
    coords = [(float(x), float(_height(u, x, eps))) for x in xs]
    name = f"Y_{u}" if params.eps == 1 else f"Y_{u}_eps{params.eps:g}"
    prov = {"family": "pulse", "u": str(u), "N": params.depth, "k": params.samples, "eps": params.eps}
    return FiniteMetricSpace.from_coords(name, labels, coords, prov)


def segment_space(params: DiscretizationParams) -> FiniteMetricSpace:
    """The pulse grid's x-positions as a subset of ``[0, 1]``."""
    labels, xs = pulse_grid(params.depth, params.samples)
    coords = [(float(x), 0.0) for x in xs]
    prov = {"family": "segment", "N": params.depth, "k": params.samples}
    return FiniteMetricSpace.from_coords(f"segment_N{params.depth}_k{params.samples}", labels, coords, prov)


def projection_map(u, params: DiscretizationParams) -> PointMap:
    """Vertical projection of the sampled ``Y^eps_u`` onto its x-positions."""
    y = pulse_space(u, params)
    return PointMap(y, segment_space(params), tuple(range(y.n)))
