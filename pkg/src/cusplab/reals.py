"""Real-number specifications and certified rational enclosures.

Every spec can produce an :class:`Enclosure`, a pair of integers ``lo, hi``
over a common ``scale`` such that the number lies in ``[lo/scale, hi/scale]``.
Rational specs have ``lo == hi``; quadratic specs can be enclosed to any
requested number of bits; decimal and random specs carry a fixed width.

Text grammar::

    rat:P/Q            exact rational
    quad:A,B,C[,D]     (A + B*sqrt(C))/D, reduced into (0, 1)
    dec:0.d1d2...dN    decimal, correctly rounded to N digits
    rand:SEED:DIGITS   first DIGITS decimal digits of a seeded uniform draw
    golden, silver     aliases for quad:-1,1,5,2 and quad:-1,1,2
"""
from __future__ import annotations

import hashlib
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import DomainError, SpecSyntaxError

# log10 of exp(2 * pi^2 / (12 log 2)): decimal digits consumed per CF term
LEVY_DIGITS_PER_TERM = 2 * math.pi**2 / (12 * math.log(2)) / math.log(10)

ALIASES = {
    "golden": "quad:-1,1,5,2",
    "silver": "quad:-1,1,2",
}


def digits_for_terms(n_terms: int) -> int:
    """Decimal digits needed to certify ``n_terms`` partial quotients of a generic x."""
    return math.ceil(1.3 * n_terms * LEVY_DIGITS_PER_TERM + 64)


@dataclass(frozen=True)
class Enclosure:
    lo: int
    hi: int
    scale: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return Fraction(self.hi - self.lo, self.scale)

    def midpoint(self) -> float:
        return (self.lo + self.hi) / (2 * self.scale)


class RealSpec:
    """Base class; subclasses define ``text`` and ``enclosure``."""

    exact = False
    generic = True

    @property
    def text(self) -> str:
        raise NotImplementedError

    def enclosure(self, bits: int | None = None) -> Enclosure:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.text

    def __float__(self) -> float:
        return self.enclosure(80).midpoint()


@dataclass(frozen=True)
class RationalSpec(RealSpec):
    p: int
    q: int

    exact = True
    generic = False

    def __post_init__(self):
        if self.q == 0:
            raise SpecSyntaxError("zero denominator")
        g = math.gcd(self.p, self.q)
        sign = -1 if self.q < 0 else 1
        object.__setattr__(self, "p", sign * self.p // g)
        object.__setattr__(self, "q", sign * self.q // g)

    @property
    def text(self) -> str:
        return f"rat:{self.p}/{self.q}"

    def enclosure(self, bits=None) -> Enclosure:
        return Enclosure(self.p, self.p, self.q)


def _is_squarefree(n: int) -> bool:
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class QuadraticSpec(RealSpec):
    """The fractional part of ``(A + B*sqrt(C)) / D``."""

    A: int
    B: int
    C: int
    D: int = 1

    exact = True
    generic = False

    def __post_init__(self):
        if self.C <= 1 or not _is_squarefree(self.C):
            raise SpecSyntaxError(f"C must be square-free and > 1, got {self.C}")
        if self.B == 0 or self.D == 0:
            raise SpecSyntaxError("B and D must be nonzero")

    @property
    def text(self) -> str:
        tail = f",{self.D}" if self.D != 1 else ""
        return f"quad:{self.A},{self.B},{self.C}{tail}"

    def surd(self) -> tuple[int, int, int]:
        """Return ``(P, d, Q)`` with x = (P + sqrt(d))/Q, Q | d - P^2, x in (0, 1)."""
        d = self.B * self.B * self.C
        if self.B > 0:
            P, Q = self.A, self.D
        else:
            P, Q = -self.A, -self.D
        if (d - P * P) % Q:
            P *= abs(Q)
            d *= Q * Q
            Q *= abs(Q)
        P -= surd_floor(P, d, Q) * Q
        return P, d, Q

    def enclosure(self, bits: int | None = None) -> Enclosure:
        bits = 128 if bits is None else bits
        P, d, Q = self.surd()
        r = isqrt(d << (2 * bits))
        lo, hi = (P << bits) + r, (P << bits) + r + 1
        scale = Q << bits
        if Q < 0:
            lo, hi, scale = -hi, -lo, -scale
        return Enclosure(lo, hi, scale)


def surd_floor(P: int, d: int, Q: int) -> int:
    """floor((P + sqrt(d)) / Q) for non-square d."""
    r = isqrt(d)
    if Q > 0:
        return (P + r) // Q
    return (P + r + 1) // Q


@dataclass(frozen=True)
class DecimalSpec(RealSpec):
    """A decimal in (0, 1) whose digits are correct to half a unit in the last place."""

    digits: str

    def __post_init__(self):
        if not self.digits.isdigit():
            raise SpecSyntaxError(f"bad decimal digits {self.digits!r}")

    @property
    def text(self) -> str:
        return f"dec:0.{self.digits}"

    def enclosure(self, bits=None) -> Enclosure:
        n = int(self.digits)
        return Enclosure(2 * n - 1, 2 * n + 1, 2 * 10 ** len(self.digits))


@dataclass(frozen=True)
class RandomSpec(RealSpec):
    """Uniform draw on (0, 1) known to ``digits`` decimal places.

    The digit stream depends only on ``seed``; asking for more digits extends
    the same number.
    """

    seed: int
    digits: int

    def __post_init__(self):
        if self.digits < 1:
            raise SpecSyntaxError("digit count must be positive")

    @property
    def text(self) -> str:
        return f"rand:{self.seed}:{self.digits}"

    def digit_string(self) -> str:
        rng = random.Random(self.seed)
        chunks = -(-self.digits // 9)
        return "".join(f"{rng.randrange(10**9):09d}" for _ in range(chunks))[: self.digits]

    def enclosure(self, bits=None) -> Enclosure:
        m = int(self.digit_string())
        return Enclosure(m, m + 1, 10**self.digits)

    @classmethod
    def derive(cls, master_seed: int, index: int, digits: int) -> RandomSpec:
        """Per-sample spec that depends only on (master seed, sample index)."""
        h = hashlib.blake2b(f"{master_seed}:{index}".encode(), digest_size=8)
        return cls(int.from_bytes(h.digest(), "big"), digits)


_INT = r"[-+]?\d+"


def parse_real(text: str | RealSpec) -> RealSpec:
    if isinstance(text, RealSpec):
        return text
    s = ALIASES.get(text.strip(), text.strip())
    if m := re.fullmatch(rf"rat:({_INT})/({_INT})", s):
        return RationalSpec(int(m[1]), int(m[2]))
    if m := re.fullmatch(rf"quad:({_INT}),({_INT}),({_INT})(?:,({_INT}))?", s):
        return QuadraticSpec(int(m[1]), int(m[2]), int(m[3]), int(m[4] or 1))
    if m := re.fullmatch(r"dec:0\.(\d+)", s):
        return DecimalSpec(m[1])
    if m := re.fullmatch(r"rand:(\d+):(\d+)", s):
        return RandomSpec(int(m[1]), int(m[2]))
    raise SpecSyntaxError(f"cannot parse real spec {text!r}")


def check_unit_interval(x: RealSpec) -> Enclosure:
    """Enclosure of x, raising DomainError unless it lies inside (0, 1)."""
    enc = x.enclosure()
    if enc.lo <= 0 or enc.hi >= enc.scale:
        raise DomainError(f"{x.text} is not inside (0, 1)")
    return enc
