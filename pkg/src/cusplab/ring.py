"""Exact arithmetic in Q(lambda), lambda = 2 cos(pi/q).

Elements are integer coefficient vectors over the power basis
1, lambda, ..., lambda^(m-1) with one positive common denominator.  Signs are
decided by evaluating against a certified enclosure of lambda whose precision
grows until the answer is unambiguous; an element is zero exactly when its
coefficients are.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division of integer polynomials (low degree first) by a monic divisor."""
    num = num[:]
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def lambda_minimal_polynomial(q: int) -> tuple[int, ...]:
    """Minimal polynomial of 2 cos(pi/q) over Q, monic, low degree first.

    Obtained by writing the palindromic x^(-m) Phi_2q(x) as a polynomial in
    y = x + 1/x.
    """
    phi = list(cyclotomic(2 * q))
    m = (len(phi) - 1) // 2
    # Laurent coefficients: index i holds x^(i - m)
    lau = {i - m: c for i, c in enumerate(phi)}
    out = [0] * (m + 1)
    for deg in range(m, -1, -1):
        c = lau.get(deg, 0)
        out[deg] = c
        if c:
            for i in range(deg + 1):
                e = deg - 2 * i
                lau[e] = lau.get(e, 0) - c * math.comb(deg, i)
    return tuple(out)


def _eval_poly_scaled(poly, num: int, bits: int) -> int:
    """2^(bits*deg) * poly(num / 2^bits), exactly."""
    deg = len(poly) - 1
    return sum(c * num**i << (bits * (deg - i)) for i, c in enumerate(poly))


class HeckeField:
    """The field Q(2 cos(pi/q)) with certified real embedding at lambda."""

    def __init__(self, q: int):
        if q < 3:
            raise ValueError("q must be at least 3")
        self.q = q
        self.minpoly = lambda_minimal_polynomial(q)
        self.degree = len(self.minpoly) - 1
        self._powers: dict[int, list[tuple[int, int]]] = {}
        self.lam = self.element([0, 1])
        self.one = self.element([1])
        self.zero = self.element([0])

    def __repr__(self) -> str:
        return f"HeckeField({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, HeckeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("HeckeField", self.q))

    def __reduce__(self):
        return (_field, (self.q,))

    def element(self, coeffs, den: int = 1) -> FieldElement:
        return FieldElement(self, coeffs, den)

    def __call__(self, v) -> FieldElement:
        if isinstance(v, FieldElement):
            return v
        v = Fraction(v)
        return FieldElement(self, [v.numerator], v.denominator)

    def reduce(self, coeffs: list[int]) -> list[int]:
        m = self.degree
        coeffs = list(coeffs)
        mp = self.minpoly
        for i in range(len(coeffs) - 1, m - 1, -1):
            c = coeffs[i]
            if c:
                coeffs[i] = 0
                for j in range(m):
                    coeffs[i - m + j] -= c * mp[j]
        coeffs = coeffs[:m] + [0] * (m - len(coeffs))
        return coeffs

    def lambda_enclosure(self, bits: int) -> tuple[int, int]:
        """Integers (lo, lo + 1) with lo/2^bits < lambda < (lo + 1)/2^bits."""
        if self.degree == 1:
            v = -self.minpoly[0] << bits
            return v, v
        with mpmath.workprec(bits + 40):
            approx = int(mpmath.floor(2 * mpmath.cos(mpmath.pi / self.q) * mpmath.mpf(2) ** bits))
        for lo in (approx, approx - 1, approx + 1):
            a = _eval_poly_scaled(self.minpoly, lo, bits)
            b = _eval_poly_scaled(self.minpoly, lo + 1, bits)
            if a == 0 or b == 0 or (a < 0) != (b < 0):
                return lo, lo + 1
        raise ArithmeticError("could not certify the enclosure of lambda")

    def power_enclosures(self, bits: int) -> list[tuple[int, int]]:
        """Bounds [lo_i, hi_i] / 2^bits for lambda^i, i < degree (outward rounded)."""
        got = self._powers.get(bits)
        if got is None:
            lo, hi = self.lambda_enclosure(bits)
            got = [(1 << bits, 1 << bits)]
            for _ in range(1, self.degree):
                pl, ph = got[-1]
                got.append(((pl * lo) >> bits, -((-ph * hi) >> bits)))
            self._powers[bits] = got
        return got


@lru_cache(maxsize=None)
def _field(q: int) -> HeckeField:
    return HeckeField(q)


def field(q: int) -> HeckeField:
    """Shared field instance for q."""
    return _field(q)


class FieldElement:
    __slots__ = ("F", "coeffs", "den", "_hash")

    def __init__(self, F: HeckeField, coeffs, den: int = 1):
        coeffs = list(coeffs)
        if len(coeffs) > F.degree:
            coeffs = F.reduce(coeffs)
        else:
            coeffs = coeffs + [0] * (F.degree - len(coeffs))
        if den < 0:
            coeffs, den = [-c for c in coeffs], -den
        g = den
        for c in coeffs:
            g = math.gcd(g, c)
            if g == 1:
                break
        if g > 1:
            coeffs, den = [c // g for c in coeffs], den // g
        self.F = F
        self.coeffs = tuple(coeffs)
        self.den = den
        self._hash = None

    # -- arithmetic
    def _lift(self, o) -> FieldElement:
        if isinstance(o, FieldElement):
            return o
        if isinstance(o, (int, Fraction)):
            return self.F(o)
        return NotImplemented

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return FieldElement(self.F, [a + b for a, b in zip(self.coeffs, o.coeffs)], self.den)
        return FieldElement(
            self.F, [a * o.den + b * self.den for a, b in zip(self.coeffs, o.coeffs)], self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.F, [-a for a in self.coeffs], self.den)

    def __sub__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, int):
            return FieldElement(self.F, [a * o for a in self.coeffs], self.den)
        o = self._lift(o)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if self.F.degree == 1:
            return FieldElement(self.F, [a[0] * b[0]], self.den * o.den)
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return FieldElement(self.F, prod, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        m = self.F.degree
        # solve (self * y) = 1 through the multiplication matrix
        cols = []
        for k in range(m):
            basis = [0] * m
            basis[k] = 1
            cols.append(list((self * FieldElement(self.F, basis)).coeffs))
        rows = [[Fraction(cols[k][i], self.den) for k in range(m)] + [Fraction(int(i == 0))] for i in range(m)]
        for c in range(m):
            piv = next(r for r in range(c, m) if rows[r][c] != 0)
            rows[c], rows[piv] = rows[piv], rows[c]
            pv = rows[c][c]
            rows[c] = [v / pv for v in rows[c]]
            for r in range(m):
                if r != c and rows[r][c] != 0:
                    f = rows[r][c]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[c])]
        sol = [rows[i][m] for i in range(m)]
        den = math.lcm(*(s.denominator for s in sol))
        return FieldElement(self.F, [int(s * den) for s in sol], den)

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    # -- comparison
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, o) -> bool:
        o = self._lift(o)
        if o is NotImplemented:
            return False
        return self.coeffs == o.coeffs and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.F.q, self.coeffs, self.den))
        return self._hash

    def interval(self, bits: int) -> tuple[int, int]:
        """Bounds on den * self * 2^bits."""
        pw = self.F.power_enclosures(bits)
        lo = hi = 0
        for c, (pl, ph) in zip(self.coeffs, pw):
            if c >= 0:
                lo += c * pl
                hi += c * ph
            else:
                lo += c * ph
                hi += c * pl
        return lo, hi

    def working_bits(self) -> int:
        return max(c.bit_length() for c in self.coeffs) + 64

    def sign(self) -> int:
        if self.is_zero():
            return 0
        bits = self.working_bits()
        while True:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __lt__(self, o):
        return (self - o).sign() < 0

    def __le__(self, o):
        return (self - o).sign() <= 0

    def __gt__(self, o):
        return (self - o).sign() > 0

    def __ge__(self, o):
        return (self - o).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def log_abs(self) -> float:
        """log |self| from a certified enclosure (accurate to about 1e-15 relative)."""
        if self.is_zero():
            return -math.inf
        bits = self.working_bits()
        while True:
            lo, hi = self.interval(bits)
            if (lo > 0 or hi < 0) and abs(hi - lo) * 2**60 < min(abs(lo), abs(hi)):
                m = abs(lo)
                return math.log(m) - bits * math.log(2) - math.log(self.den)
            bits *= 2

    def __float__(self) -> float:
        if self.is_zero():
            return 0.0
        s = self.sign()
        return s * math.exp(self.log_abs())

    def __repr__(self) -> str:
        return f"FieldElement({self})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mon = "" if i == 0 else ("L" if i == 1 else f"L^{i}")
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mon)
            elif c == -1:
                terms.append("-" + mon)
            else:
                terms.append(f"{c}*{mon}")
        body = "+".join(terms).replace("+-", "-") or "0"
        if self.den != 1:
            body = f"({body})/{self.den}" if len(terms) > 1 else f"{body}/{self.den}"
        return body
