"""Upper half-plane primitives: Moebius maps, boundary points, geodesics, horoballs.

Matrix entries may be ints, Fractions or exact field elements (see
:mod:`cusplab.ring`); anything with ring operations and a sign works.
Lengths and logarithms are floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import DegenerateGeodesicError, DomainError


def sign(v) -> int:
    s = getattr(v, "sign", None)
    if callable(s):
        return s()
    return (v > 0) - (v < 0)


def _is_zero(v) -> bool:
    return sign(v) == 0


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of R or the point at infinity (``value is None``)."""

    value: Any = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __float__(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def __lt__(self, other: BoundaryPoint) -> bool:
        if self.is_infinite or other.is_infinite:
            raise TypeError("only finite boundary points are ordered")
        return sign(other.value - self.value) > 0

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


INF = BoundaryPoint(None)


def point(v) -> BoundaryPoint:
    return v if isinstance(v, BoundaryPoint) else BoundaryPoint(v)


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (az + b)/(cz + d) with ad - bc = 1, stored up to sign."""

    a: Any
    b: Any
    c: Any
    d: Any

    def __post_init__(self):
        if not _is_zero(self.a * self.d - self.b * self.c - 1):
            raise DomainError("Moebius map must have determinant 1")

    @classmethod
    def identity(cls, one=1) -> MoebiusMap:
        zero = one - one
        return cls(one, zero, zero, one)

    def canonical(self) -> MoebiusMap:
        """Sign choice making the first nonzero of (a, c) positive."""
        lead = self.a if not _is_zero(self.a) else self.c
        if sign(lead) < 0:
            return MoebiusMap(-self.a, -self.b, -self.c, -self.d)
        return self

    def __matmul__(self, o: MoebiusMap) -> MoebiusMap:
        return MoebiusMap(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> MoebiusMap:
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def same_map(self, o: MoebiusMap) -> bool:
        return self.canonical() == o.canonical()

    def __call__(self, z):
        return mobius_apply(self, z)


def mobius_apply(M: MoebiusMap, z):
    """Image of a boundary point (exactly) or of an interior complex point."""
    if isinstance(z, complex):
        if z.imag <= 0:
            raise DomainError("interior points need Im z > 0")
        a, b, c, d = (float(v) for v in (M.a, M.b, M.c, M.d))
        return (a * z + b) / (c * z + d)
    z = point(z)
    if z.is_infinite:
        return INF if _is_zero(M.c) else BoundaryPoint(_div(M.a, M.c))
    den = M.c * z.value + M.d
    if _is_zero(den):
        return INF
    return BoundaryPoint(_div(M.a * z.value + M.b, den))


@dataclass(frozen=True)
class GeodesicLine:
    e_plus: BoundaryPoint
    e_minus: BoundaryPoint

    def __post_init__(self):
        object.__setattr__(self, "e_plus", point(self.e_plus))
        object.__setattr__(self, "e_minus", point(self.e_minus))
        if self.e_plus == self.e_minus or (
            not self.e_plus.is_infinite
            and not self.e_minus.is_infinite
            and _is_zero(self.e_plus.value - self.e_minus.value)
        ):
            raise DegenerateGeodesicError("geodesic endpoints coincide")

    @property
    def diameter(self):
        """Euclidean diameter, or None for a vertical line."""
        if self.e_plus.is_infinite or self.e_minus.is_infinite:
            return None
        v = self.e_plus.value - self.e_minus.value
        return v if sign(v) > 0 else -v

    def image(self, M: MoebiusMap) -> GeodesicLine:
        return GeodesicLine(mobius_apply(M, self.e_plus), mobius_apply(M, self.e_minus))


@dataclass(frozen=True)
class Horoball:
    """H_m = {Im z > m} at infinity, or the disc of radius s/q^2 tangent at p/q."""

    base: BoundaryPoint
    parameter: Any  # height m at infinity, else s

    q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "base", point(self.base))
        if sign(self.parameter) <= 0:
            raise DomainError("horoball parameter must be positive")

    @classmethod
    def at_rational(cls, p: int, q: int, s) -> Horoball:
        if q <= 0 or math.gcd(p, q) != 1:
            raise DomainError("need coprime p/q with q > 0")
        return cls(BoundaryPoint(Fraction(p, q)), s, q)

    @property
    def radius(self):
        if self.base.is_infinite:
            raise DomainError("horoball at infinity has no radius")
        return _div(self.parameter, self.q * self.q)

    def contains(self, z: complex) -> bool:
        if self.base.is_infinite:
            return z.imag > float(self.parameter)
        r = float(self.radius)
        return abs(z - complex(float(self.base), r)) < r


def excursion_depth_from_endpoints(x, y) -> float:
    """Depth 2/|x - y| of the geodesic with finite endpoints x, y."""
    x, y = point(x), point(y)
    if x.is_infinite or y.is_infinite:
        raise DomainError("depth needs finite endpoints")
    diff = x.value - y.value
    if _is_zero(diff):
        raise DegenerateGeodesicError("endpoints coincide")
    return 2.0 / abs(float(diff))


def classify_region(x, y) -> str:
    """'I', 'J' (in J but not I) or 'outside' for the planar sets of endpoint pairs."""
    x, y = float(x), float(y)
    if -1 < x < 0 and y > 0:
        return "I" if y > 1 else "J"
    if 0 < x < 1 and y < 0:
        return "I" if y < -1 else "J"
    return "outside"


def vertical_arc_length(h1: float, h2: float) -> float:
    if h1 <= 0 or h2 <= 0:
        raise DomainError("heights must be positive")
    return abs(math.log(h1 / h2))


def horoball_chord_length(k: float, d: float) -> float:
    """Length 2 arccosh(k/d) of the arc of a depth-d geodesic inside {Im z > 1/k}."""
    if k <= 0 or d <= 0:
        raise DomainError("k and d must be positive")
    if d > k:
        raise DomainError(f"depth {d} does not reach the horoball of parameter {k}")
    return 2.0 * math.acosh(k / d)
