"""Distance-geometry primitives for labeled four-point configurations.

Bodies are ordered sequentially around the quadrilateral. Bases are r12 and r34,
legs r23 and r14, and diagonals r13 and r24. The short names follow
a=r12, b=r23, c=r34, d=r14, e=r13, f=r24.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (DegenerateConfiguration, EmbeddingInconsistent, InvalidDistances,
                     NotATrapezoid, ParallelogramDegenerate)

KEYS = ("r12", "r13", "r14", "r23", "r24", "r34")
PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
PARALLELOGRAM_EPS = 1e-9


@dataclass(frozen=True)
class DistanceVector:
    r12: float
    r13: float
    r14: float
    r23: float
    r24: float
    r34: float

    def __post_init__(self):
        for key in KEYS:
            value = getattr(self, key)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise InvalidDistances(f"{key} is not a number: {value!r}") from exc
            if not math.isfinite(value) or value <= 0:
                raise InvalidDistances(f"{key} must be positive and finite, got {value!r}")
            object.__setattr__(self, key, value)

    @classmethod
    def from_mapping(cls, data) -> DistanceVector:
        """Build from a mapping with keys r12..r34; values may be decimal strings."""
        missing = [k for k in KEYS if k not in data]
        extra = [k for k in data if k not in KEYS]
        if missing or extra:
            raise InvalidDistances(f"expected keys {KEYS}; missing={missing} unexpected={extra}")
        return cls(**{k: data[k] for k in KEYS})

    @classmethod
    def from_sides(cls, a, b, c, d, e, f) -> DistanceVector:
        return cls(r12=a, r13=e, r14=d, r23=b, r24=f, r34=c)

    # short names
    a = property(lambda self: self.r12)
    b = property(lambda self: self.r23)
    c = property(lambda self: self.r34)
    d = property(lambda self: self.r14)
    e = property(lambda self: self.r13)
    f = property(lambda self: self.r24)

    def as_tuple(self):
        return tuple(getattr(self, k) for k in KEYS)

    def as_array(self):
        return np.array(self.as_tuple(), dtype=float)

    def to_dict(self):
        return {k: getattr(self, k) for k in KEYS}

    def get(self, i: int, j: int) -> float:
        i, j = min(i, j), max(i, j)
        return getattr(self, f"r{i}{j}")

    def scale(self) -> float:
        return max(self.as_tuple())

    def scaled(self, factor: float) -> DistanceVector:
        return DistanceVector(*(factor * x for x in self.as_tuple()))

    def relabel(self, perm) -> DistanceVector:
        """Distances after renaming body i as perm[i] (perm maps 1..4 onto 1..4)."""
        out = {}
        for i, j in PAIRS:
            p, q = sorted((perm[i], perm[j]))
            out[f"r{p}{q}"] = self.get(i, j)
        return DistanceVector(**out)

    def swap_sides(self) -> DistanceVector:
        """Mirror image exchanging bodies 1<->2 and 3<->4 (keeps bases, swaps legs and diagonals)."""
        return self.relabel({1: 2, 2: 1, 3: 4, 4: 3})


@dataclass(frozen=True)
class TrapezoidShape:
    """Consecutive sides; a and c are the parallel bases, b and d the legs."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise InvalidDistances(f"side {name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not abs(self.a - self.c) < self.b + self.d:
            raise NotATrapezoid("|a - c| must be below b + d")

    @classmethod
    def from_mapping(cls, data) -> TrapezoidShape:
        extra = [k for k in data if k not in "abcd"]
        if extra or any(k not in data for k in "abcd"):
            raise InvalidDistances("expected keys a, b, c, d")
        return cls(**{k: data[k] for k in "abcd"})


@dataclass(frozen=True)
class PlanarEmbedding:
    p1: tuple
    p2: tuple
    p3: tuple
    p4: tuple
    h: float

    def points(self):
        return (self.p1, self.p2, self.p3, self.p4)

    def distances(self) -> DistanceVector:
        pts = self.points()
        return DistanceVector(**{f"r{i}{j}": math.dist(pts[i - 1], pts[j - 1]) for i, j in PAIRS})


class ShapeTag(str, enum.Enum):
    GENERIC = "GenericTrapezoid"
    ISOSCELES = "IsoscelesTrapezoid"
    PARALLELOGRAM = "Parallelogram"
    RHOMBUS = "Rhombus"
    SQUARE = "Square"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class ShapeClass:
    tag: ShapeTag
    witnesses: tuple = ()


class Residual(NamedTuple):
    raw: float
    normalized: float


# ---------------------------------------------------------------------------
# Cayley-Menger


def _cm_matrix(sq):
    n = len(sq)
    m = np.ones((n + 1, n + 1))
    m[0, 0] = 0.0
    m[1:, 1:] = sq
    return m


def _squared_matrix(r: DistanceVector, idx=(1, 2, 3, 4)):
    sq = np.zeros((len(idx), len(idx)))
    for p, i in enumerate(idx):
        for q, j in enumerate(idx):
            if i != j:
                sq[p, q] = r.get(i, j) ** 2
    return sq


def cayley_menger(r: DistanceVector) -> float:
    """5x5 bordered Cayley-Menger determinant H(r); equals 288 V**2."""
    return float(np.linalg.det(_cm_matrix(_squared_matrix(r))))


def cayley_menger_sub(r: DistanceVector, idx) -> float:
    """Bordered determinant of the subconfiguration on bodies ``idx``."""
    return float(np.linalg.det(_cm_matrix(_squared_matrix(r, idx))))


class Verdict(str, enum.Enum):
    REALIZABLE_3D = "Realizable3D"
    PLANAR = "Planar"
    NOT_REALIZABLE = "NotRealizable"


@dataclass(frozen=True)
class Realizability:
    verdict: Verdict
    violations: tuple = ()
    determinant: float = 0.0


def realizability(r: DistanceVector, tol: float = 1e-10) -> Realizability:
    """Cayley-Menger sign test on every triangle and on the full tetrahedron.

    A triangle needs a determinant <= 0 (it equals -16 * area**2), the four
    points need H >= 0. Both tests carry a band of ``tol`` times the matching
    power of the largest distance.
    """
    s = r.scale()
    violations = []
    for tri in itertools.combinations((1, 2, 3, 4), 3):
        det3 = cayley_menger_sub(r, tri)
        if det3 > tol * s**4:
            violations.append(("".join(map(str, tri)), det3))
    h = cayley_menger(r)
    if h < -tol * s**8:
        violations.append(("1234", h))
    if violations:
        return Realizability(Verdict.NOT_REALIZABLE, tuple(violations), h)
    if abs(h) <= tol * s**8:
        return Realizability(Verdict.PLANAR, (), h)
    return Realizability(Verdict.REALIZABLE_3D, (), h)


# ---------------------------------------------------------------------------
# Trapezoid constraint


def delta_squared(r: DistanceVector) -> float:
    """F = 4*Delta**2 = a^2 c^2 - (b^2 + d^2 - e^2 - f^2)^2 / 4."""
    a, b, c, d, e, f = r.a, r.b, r.c, r.d, r.e, r.f
    return a * a * c * c - 0.25 * (b * b + d * d - e * e - f * f) ** 2


def delta_squared_gradient(r: DistanceVector) -> np.ndarray:
    """Gradient of F in the order (r12, r13, r14, r23, r24, r34), valid on trapezoids."""
    a, b, c, d, e, f = r.a, r.b, r.c, r.d, r.e, r.f
    return 2.0 * a * c * np.array([c, -e, d, b, -f, a])


def trapezoid_residual(r: DistanceVector) -> Residual:
    """T = 2ac - e^2 - f^2 + b^2 + d^2, also returned divided by 2ac + b^2 + d^2."""
    a, b, c, d, e, f = r.a, r.b, r.c, r.d, r.e, r.f
    t = 2 * a * c - e * e - f * f + b * b + d * d
    return Residual(t, t / (2 * a * c + b * b + d * d))


def _is_parallelogram(a, c, eps=PARALLELOGRAM_EPS):
    return abs(a - c) <= eps * max(a, c)


def diagonals_from_sides(s: TrapezoidShape, eps: float = PARALLELOGRAM_EPS):
    """Diagonal lengths (e, f) = (r13, r24) of the trapezoid with bases a, c and legs b, d."""
    a, b, c, d = s.a, s.b, s.c, s.d
    if _is_parallelogram(a, c, eps):
        raise ParallelogramDegenerate(f"a={a!r} and c={c!r} coincide; diagonals are not determined")
    if not abs(b - d) < abs(a - c):
        raise NotATrapezoid("legs cannot close a trapezoid: need |b - d| < |a - c|")
    e2 = a * c - (c * b * b - a * d * d) / (a - c)
    f2 = a * c - (c * d * d - a * b * b) / (a - c)
    if e2 <= 0 or f2 <= 0:
        raise NotATrapezoid(f"negative diagonal radicand (e^2={e2!r}, f^2={f2!r})")
    return math.sqrt(e2), math.sqrt(f2)


def trapezoid_distances(a, b, c, d) -> DistanceVector:
    """Full distance vector of the trapezoid with sides (a, b, c, d)."""
    e, f = diagonals_from_sides(TrapezoidShape(a, b, c, d))
    return DistanceVector.from_sides(a, b, c, d, e, f)


def _triangle_area(x, y, z):
    # Kahan's cancellation-free arrangement of Heron's formula
    x, y, z = sorted((x, y, z), reverse=True)
    q = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    if q < 0:
        raise DegenerateConfiguration(f"sides {x}, {y}, {z} do not form a triangle")
    return 0.25 * math.sqrt(q)


def bretschneider_area(r: DistanceVector) -> float:
    a, b, c, d, e, f = r.a, r.b, r.c, r.d, r.e, r.f
    q = e * e * f * f - 0.25 * (b * b + d * d - a * a - c * c) ** 2
    if q < 0:
        raise DegenerateConfiguration("negative radicand in Bretschneider's formula")
    return 0.5 * math.sqrt(q)


def height(r: DistanceVector, eps: float = PARALLELOGRAM_EPS) -> float:
    """Distance between the two parallel sides.

    Off the parallelogram strip this is the altitude over side |a - c| of the
    triangle with sides (|a - c|, b, d) obtained by sliding one leg along the
    bases. On the strip, h = area / r12 with the Bretschneider area.
    """
    if _is_parallelogram(r.a, r.c, eps):
        return bretschneider_area(r) / r.a
    p = abs(r.a - r.c)
    return 2.0 * _triangle_area(p, r.b, r.d) / p


def oriented_areas(r: DistanceVector):
    """(Delta1, ..., Delta4): signed areas of the triangles omitting body i."""
    h = height(r)
    return (0.5 * r.c * h, -0.5 * r.c * h, 0.5 * r.a * h, -0.5 * r.a * h)


def embed(r: DistanceVector, rtol: float = 1e-9) -> PlanarEmbedding:
    """Place p1 at the origin, p2 on +x, and p3, p4 on the line y = h."""
    a, b, d, e, f = r.a, r.b, r.d, r.e, r.f
    h = height(r)
    x3 = (a * a + e * e - b * b) / (2 * a)
    x4 = (a * a + d * d - f * f) / (2 * a)
    emb = PlanarEmbedding((0.0, 0.0), (a, 0.0), (x3, h), (x4, h), h)
    pts = emb.points()
    for (i, j), key in zip(PAIRS, KEYS):
        want, have = getattr(r, key), math.dist(pts[i - 1], pts[j - 1])
        if abs(want - have) > rtol * want:
            raise EmbeddingInconsistent(f"{key}: wanted {want!r}, placement gives {have!r}")
    return emb


def classify_shape(r: DistanceVector, tol: float = 1e-7) -> ShapeClass:
    a, b, c, d, e, f = r.a, r.b, r.c, r.d, r.e, r.f
    smallest = min(r.as_tuple())
    if smallest < tol * r.scale():
        return ShapeClass(ShapeTag.DEGENERATE, (("min/max", smallest / r.scale()),))
    w = (("|a-c|/a", abs(a - c) / a), ("|a-b|/a", abs(a - b) / a),
         ("|b-d|/a", abs(b - d) / a), ("|e-f|/a", abs(e - f) / a))
    parallelogram = abs(a - c) < tol * a
    equal_diagonals = abs(e - f) < tol * a
    if parallelogram:
        if abs(a - b) < tol * a:
            tag = ShapeTag.SQUARE if equal_diagonals else ShapeTag.RHOMBUS
        else:
            tag = ShapeTag.PARALLELOGRAM
    elif abs(b - d) < tol * a and equal_diagonals:
        tag = ShapeTag.ISOSCELES
    else:
        tag = ShapeTag.GENERIC
    return ShapeClass(tag, w)


def ptolemy_residual(r: DistanceVector) -> float:
    """P = r12 r34 + r14 r23 - r13 r24; zero for co-circular configurations."""
    return r.r12 * r.r34 + r.r14 * r.r23 - r.r13 * r.r24


# ---------------------------------------------------------------------------
# Ordering region


OMEGA_CHAIN = ("r13", "r24", "r12", "r14", "r23", "r34")
_STRICT = {("r24", "r12")}
SIDES = ("r12", "r14", "r23", "r34")
DIAGONALS = ("r13", "r24")


@dataclass(frozen=True)
class OmegaVerdict:
    in_omega: bool
    violations: tuple = ()
    warnings: tuple = ()
    slacks: dict = field(default_factory=dict)


def check_omega(r: DistanceVector, tol: float = 1e-10, warn: float = 1e-6) -> OmegaVerdict:
    """Test r13 >= r24 > r12 >= r14 >= r23 >= r34 and that every side is shorter than both diagonals.

    All chain pairs are tested, including the implied ones (e.g. r12 >= r34), so
    a violation is named by the pair that fails. ``tol`` and ``warn`` are
    multiplied by the largest distance.
    """
    s = r.scale()
    band, warn_band = tol * s, warn * s
    violations, warnings, slacks = [], [], {}

    def strictly_after(x, y):
        i, j = OMEGA_CHAIN.index(x), OMEGA_CHAIN.index(y)
        return any(OMEGA_CHAIN.index(p) >= i and OMEGA_CHAIN.index(q) <= j for p, q in _STRICT)

    for x, y in itertools.combinations(OMEGA_CHAIN, 2):
        slack = getattr(r, x) - getattr(r, y)
        strict = strictly_after(x, y)
        name = f"{x}{'>' if strict else '>='}{y}"
        slacks[name] = slack
        if slack < -band:
            violations.append((name, slack))
        elif strict and slack < warn_band:
            warnings.append((name, slack))
    for side in SIDES:
        for diag in DIAGONALS:
            slack = getattr(r, diag) - getattr(r, side)
            name = f"{diag}>{side}"
            if name in slacks:
                continue
            slacks[name] = slack
            if slack < -band:
                violations.append((name, slack))
    return OmegaVerdict(not violations, tuple(violations), tuple(warnings), slacks)
