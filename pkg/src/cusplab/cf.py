"""Certified continued fractions, n-convergents and approximation constants.

For x in (0, 1) with expansion [a1, a2, ...] the convergents p_n/q_n follow
p_n = a_n p_{n-1} + p_{n-2} from the seeds p_{-1}/q_{-1} = 1/0 and
p_0/q_0 = 0/1.  An n-convergent is any p/q with q|qx - p| < 1; besides the
convergents these are intermediate fractions adjacent to one end of a level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import DomainError, PrecisionExhausted, RationalInputError, TieError
from .reals import Enclosure, QuadraticSpec, RealSpec, check_unit_interval, parse_real, surd_floor

LOG2 = math.log(2.0)


class Rational(NamedTuple):
    p: int
    q: int

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


class Kind(str, Enum):
    CONVERGENT = "convergent"
    NONCLASSICAL = "nonclassical"


@dataclass(frozen=True)
class CFExpansion:
    digits: tuple[int, ...]
    exact: bool
    terminated: bool = False
    spec: str = ""
    # (preperiod, period) for quadratic sources once the cycle was seen
    period: tuple[int, int] | None = None

    def __len__(self) -> int:
        return len(self.digits)

    def __getitem__(self, i):
        return self.digits[i]


class ThetaValue(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class ApproximationRecord:
    p: int
    q: int
    theta: float
    t: float
    kind: Kind
    level: int  # convergent index n, or the level of an intermediate fraction
    seed: bool = False  # the 0/1 seed approximant

    @property
    def depth(self) -> float:
        return 2.0 * self.theta

    @property
    def rational(self) -> Rational:
        return Rational(self.p, self.q)

    @property
    def log_dist(self) -> float:
        """log |x - p/q|."""
        return LOG2 - self.t


# ---------------------------------------------------------------- expansion


def _expand_enclosure(enc: Enclosure, n: int) -> tuple[list[int], bool]:
    """Partial quotients shared by every point of the enclosure.

    Runs Euclid on both endpoints in lockstep; returns (digits, terminated).
    """
    lo_n, lo_d, hi_n, hi_d = enc.lo, enc.scale, enc.hi, enc.scale
    digits = []
    while len(digits) < n:
        if lo_n == 0:
            # the current tail interval touches 0: a rational endpoint
            return digits, enc.exact
        a = lo_d // lo_n
        if hi_d // hi_n != a:
            break
        digits.append(a)
        # y -> 1/y - a reverses the interval
        lo_n, lo_d, hi_n, hi_d = hi_d - a * hi_n, hi_n, lo_d - a * lo_n, lo_n
    else:
        return digits, enc.exact and lo_n == 0
    return digits, False


def _expand_quadratic(x: QuadraticSpec, n: int) -> tuple[list[int], tuple[int, int] | None]:
    P, d, Q = x.surd()
    # 1/x = (-P + sqrt d) / ((d - P^2)/Q)
    P, Q = -P, (d - P * P) // Q
    seen: dict[tuple[int, int], int] = {}
    period = None
    digits = []
    while len(digits) < n:
        if period is None:
            if (P, Q) in seen:
                start = seen[(P, Q)]
                period = (start, len(digits) - start)
            else:
                seen[(P, Q)] = len(digits)
        a = surd_floor(P, d, Q)
        digits.append(a)
        P = a * Q - P
        Q = (d - P * P) // Q
    return digits, period


def cf_expand(x: RealSpec | str, n: int) -> CFExpansion:
    """First ``n`` certified partial quotients of x in (0, 1).

    Rationals return their full expansion (capped at ``n``) with
    ``terminated`` set when it ends.  Decimal and random specs raise
    PrecisionExhausted if fewer than ``n`` digits can be certified.
    """
    x = parse_real(x)
    if n < 1:
        raise DomainError("need at least one partial quotient")
    enc = check_unit_interval(x)
    if isinstance(x, QuadraticSpec):
        digits, period = _expand_quadratic(x, n)
        return CFExpansion(tuple(digits), True, False, x.text, period)
    digits, terminated = _expand_enclosure(enc, n)
    if len(digits) < n and not terminated:
        raise PrecisionExhausted(
            f"{x.text}: only {len(digits)} partial quotients certified, {n} requested",
            certified=len(digits),
        )
    return CFExpansion(tuple(digits), x.exact, terminated, x.text)


def convergent_table(digits) -> tuple[list[int], list[int]]:
    """Lists P, Q with P[n + 1] / Q[n + 1] = p_n / q_n for n = -1 .. len(digits)."""
    P, Q = [1, 0], [0, 1]
    for a in digits:
        P.append(a * P[-1] + P[-2])
        Q.append(a * Q[-1] + Q[-2])
    return P, Q


def convergents(cf: CFExpansion) -> list[Rational]:
    P, Q = convergent_table(cf.digits)
    return [Rational(p, q) for p, q in zip(P[2:], Q[2:])]


# ------------------------------------------------------- approximation data


def _top(n: int) -> tuple[int, int]:
    """(m, e) with n ~ m * 2**e and m holding the leading 64 bits of n > 0."""
    s = max(n.bit_length() - 64, 0)
    return n >> s, s


def product_below(a: int, b: int, c: int) -> bool:
    """Exact test a * b < c for positive integers, avoiding the big product when possible."""
    la, lb, lc = a.bit_length(), b.bit_length(), c.bit_length()
    if la + lb < lc:
        return True
    if la + lb - 2 >= lc:
        return False
    (ma, ea), (mb, eb), (mc, ec) = _top(a), _top(b), _top(c)
    # truncation error of each mantissa is below one part in 2**63
    r = (ma * mb) / mc * 2.0 ** (ea + eb - ec)
    if r < 1 - 1e-12:
        return True
    if r > 1 + 1e-12:
        return False
    return a * b < c


def ratio(a: int, b: int, c: int) -> float:
    """a * b / c as a float (relative error ~1e-18) for positive integers."""
    (ma, ea), (mb, eb), (mc, ec) = _top(a), _top(b), _top(c)
    return (ma * mb) / mc * 2.0 ** (ea + eb - ec)


class Approximator:
    """Certified arithmetic on |qx - p| for one enclosure of x.

    ``delta(p, q)`` is scale * (q x - p) at the lower endpoint; the value at
    the upper endpoint differs by q * (hi - lo).
    """

    def __init__(self, x: RealSpec | str, bits: int | None = None):
        self.x = parse_real(x)
        self.enc = self.x.enclosure(bits)
        self.width = self.enc.hi - self.enc.lo
        self.log_scale = math.log(self.enc.scale)

    @classmethod
    def for_denominator(cls, x: RealSpec | str, q: int) -> Approximator:
        x = parse_real(x)
        # only quadratic specs can be refined; 2 log2(q) + 80 bits resolve theta
        return cls(x, 2 * q.bit_length() + 80 if isinstance(x, QuadraticSpec) else None)

    def delta(self, p: int, q: int) -> int:
        return q * self.enc.lo - p * self.enc.scale

    def _ends(self, q: int, d: int) -> tuple[int, int]:
        dh = d + q * self.width
        if (d > 0) != (dh > 0) or d == 0 or dh == 0:
            if self.enc.exact:
                raise RationalInputError(f"{self.x.text} is an exact approximant with denominator {q}")
            raise PrecisionExhausted(f"{self.x.text} cannot be separated from an approximant with denominator {q}")
        return abs(d), abs(dh)

    def theta_below(self, q: int, d: int, c: int = 1) -> bool:
        """Certified test of c * q|qx - p| < 1, given d = delta(p, q)."""
        lo, hi = self._ends(q, d)
        s = self.enc.scale
        a, b = product_below(c * q, lo, s), product_below(c * q, hi, s)
        if a != b:
            raise PrecisionExhausted(f"cannot decide {c}*theta < 1 at denominator {q}")
        return a

    def theta(self, q: int, d: int) -> ThetaValue:
        if d == 0 and self.enc.exact:
            return ThetaValue(0.0, 0.0)
        lo, hi = self._ends(q, d)
        s = self.enc.scale
        tl, th = ratio(q, lo, s), ratio(q, hi, s)
        value = 0.5 * (tl + th)
        return ThetaValue(value, 0.5 * abs(th - tl) + 1e-15 * value)

    def log_dist(self, q: int, d: int) -> float:
        """log |x - p/q|."""
        lo, hi = self._ends(q, d)
        return 0.5 * (math.log(lo) + math.log(hi)) - self.log_scale - math.log(q)

    def dist_greater(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        """Certified |x - a| > |x - b| for (q, delta) pairs; TieError on equality."""
        (qa, da), (qb, db) = a, b
        verdicts = set()
        for ea, eb in zip(self._ends(qa, da), self._ends(qb, db)):
            lhs, rhs = ea * qb, eb * qa
            if lhs == rhs:
                raise TieError("two approximants are equidistant from x")
            verdicts.add(lhs > rhs)
        if len(verdicts) > 1:
            raise PrecisionExhausted("cannot order two approximants by distance")
        return verdicts.pop()


def theta(x: RealSpec | str, r: Rational | tuple[int, int]) -> ThetaValue:
    """theta = q|qx - p| with an absolute error bound."""
    p, q = r
    approx = Approximator.for_denominator(x, q)
    val = approx.theta(q, approx.delta(p, q))
    if val.error > 1e-9:
        raise PrecisionExhausted(f"theta({p}/{q}) only known to {val.error:.3g}")
    return val


def depth_parameter(x: RealSpec | str, r: Rational | tuple[int, int]) -> float:
    """t = log 2 - log|x - p/q|, the arc length below x + 2i of the tangency at p/q."""
    p, q = r
    approx = Approximator.for_denominator(x, q)
    ld = approx.log_dist(q, approx.delta(p, q))
    if ld > LOG2 + 1e-12:
        raise DomainError(f"|x - {p}/{q}| exceeds 2")
    return LOG2 - ld


def _table_approximator(x: RealSpec, q_max: int) -> Approximator:
    return Approximator(x, 2 * q_max.bit_length() + 96 if isinstance(x, QuadraticSpec) else None)


def _delta_table(approx: Approximator, digits) -> list[int]:
    """D[n + 1] = delta(p_n, q_n), built with the convergent recurrence."""
    D = [-approx.enc.scale, approx.enc.lo]
    for a in digits:
        D.append(a * D[-1] + D[-2])
    return D


def n_convergents(x: RealSpec | str, n_terms: int) -> list[ApproximationRecord]:
    """All p/q with q|qx - p| < 1 up to and including convergent ``n_terms``, ordered by t."""
    x = parse_real(x)
    if x.exact and not isinstance(x, QuadraticSpec):
        raise RationalInputError("n-convergents need an irrational input")
    cf = cf_expand(x, n_terms + 1)
    a = cf.digits
    P, Q = convergent_table(a)
    approx = _table_approximator(x, Q[-1])
    D = _delta_table(approx, a)

    # candidate -> (delta, kind, level, seed)
    cands: dict[Rational, tuple[int, Kind, int, bool]] = {}
    seed_kind = Kind.CONVERGENT if a[0] >= 2 else Kind.NONCLASSICAL
    cands[Rational(0, 1)] = (D[1], seed_kind, 0, True)
    for n in range(n_terms + 1):
        pm, qm, pn, qn = P[n], Q[n], P[n + 1], Q[n + 1]
        if n >= 1:
            cands[Rational(pn, qn)] = (D[n + 1], Kind.CONVERGENT, n, False)
        top = a[n] - 1  # a_{n+1} - 1
        for k in {1, top}:
            if 1 <= k <= top:
                r = Rational(pm + k * pn, qm + k * qn)
                if r not in cands:
                    cands[r] = (D[n] + k * D[n + 1], Kind.NONCLASSICAL, n, False)

    last_q, last_d = Q[n_terms + 1], D[n_terms + 1]
    last_ld = approx.log_dist(last_q, last_d)
    records = []
    deltas = {}
    for r, (d, kind, level, seed) in cands.items():
        if not approx.theta_below(r.q, d):
            continue
        ld = approx.log_dist(r.q, d)
        if r.q != last_q:
            if ld < last_ld - 1e-9:
                continue
            if ld < last_ld + 1e-9 and not approx.dist_greater((r.q, d), (last_q, last_d)):
                continue
        deltas[r] = d
        records.append(ApproximationRecord(r.p, r.q, approx.theta(r.q, d).value, LOG2 - ld, kind, level, seed))
    records.sort(key=lambda rec: rec.t)
    # floats too close to trust: settle the order of near neighbours exactly
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(records) - 1):
            prev, cur = records[i], records[i + 1]
            if cur.t - prev.t < 1e-9 * max(1.0, cur.t):
                try:
                    ok = approx.dist_greater((prev.q, deltas[prev.rational]), (cur.q, deltas[cur.rational]))
                except TieError:
                    raise TieError(f"{prev.rational} and {cur.rational} are equidistant from x") from None
                if not ok:
                    records[i], records[i + 1] = cur, prev
                    swapped = True
    return records


def convergent_thetas(x: RealSpec | str, n_max: int) -> list[float]:
    """theta_n for n = 1 .. n_max."""
    x = parse_real(x)
    cf = cf_expand(x, n_max)
    P, Q = convergent_table(cf.digits)
    approx = _table_approximator(x, Q[-1])
    D = _delta_table(approx, cf.digits)
    return [approx.theta(Q[n + 1], D[n + 1]).value for n in range(1, n_max + 1)]


def sandwich_check(x: RealSpec | str, n_max: int, lower_offset: int = 1) -> list[int]:
    """Indices n <= n_max where a_{n+1} + lower_offset < 1/theta_n < a_{n+1} + 2 fails.

    The test is exact.  ``lower_offset=0`` gives the bound that holds for
    every irrational x, since 1/theta_n = [a_{n+1}; a_{n+2}, ...] + q_{n-1}/q_n.
    """
    x = parse_real(x)
    cf = cf_expand(x, n_max + 1)
    P, Q = convergent_table(cf.digits)
    approx = _table_approximator(x, Q[-1])
    D = _delta_table(approx, cf.digits)
    bad = []
    for n in range(1, n_max + 1):
        q, d, nxt = Q[n + 1], D[n + 1], cf.digits[n]
        # 1/theta > a + c  <=>  (a + c) theta < 1
        if not approx.theta_below(q, d, nxt + lower_offset) or approx.theta_below(q, d, nxt + 2):
            bad.append(n)
    return bad
