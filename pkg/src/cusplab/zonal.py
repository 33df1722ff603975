"""Gamma-rationals of zonal Hecke groups from the orbit of the imaginary axis.

The group is generated by T(z) = z + 1 and U(z) = -eta^2/z with
eta = 1/(2 cos(pi/q)); q = 3 is the modular group.  The images of the
imaginary axis are the edges of a tessellation by ideal q-gons.  The base
tile has vertices E^i(oo), i = 0 .. q-1, where E = T U is elliptic of
order q; they run from oo down through 1 to 0.

The vertical ray above x in (0, 1) is followed tile by tile.  In a tile g
the ray leaves through the edge [g E^(j+1)(oo), g E^j(oo)] that straddles x
and enters the tile g E^(j+1) U.  Consecutive exits through an edge at the
same cusp of the tile are a parabolic fan; those runs are measured by
galloping so a huge partial quotient costs only logarithmic work.

A Gamma-rational is a vertex met by two or more crossed edges (the two
vertical sides of the base tile are not counted).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterator

from .errors import DomainError, InsufficientEvents, NodeBudgetExceeded, PrecisionExhausted, TieError
from .hyperbolic import MoebiusMap
from .reals import QuadraticSpec, RealSpec, check_unit_interval, parse_real
from .ring import FieldElement, HeckeField, field

LOG2 = math.log(2.0)
DEFAULT_NODE_BUDGET = 2_000_000

Column = tuple[FieldElement, FieldElement]


def hecke_area(q) -> float:
    """Area pi (1 - 2/q) of the (2, q, oo) orbifold."""
    if not isinstance(q, int) or isinstance(q, bool) or q < 3:
        raise DomainError(f"Hecke index must be an integer >= 3, got {q!r}")
    return math.pi * (1 - 2 / q)


def hecke_levy_target(q: int) -> float:
    return math.pi * hecke_area(q) / (4 * LOG2)


def _mat_mul(A, B):
    (a, b, c, d), (e, f, g, h) = A, B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _mat_col(A, col: Column) -> Column:
    a, b, c, d = A
    x, y = col
    return (a * x + b * y, c * x + d * y)


@dataclass(frozen=True)
class ZonalGroup:
    q: int
    F: HeckeField
    eta: FieldElement
    T: MoebiusMap
    U: MoebiusMap
    area: float

    @classmethod
    def hecke(cls, q: int) -> ZonalGroup:
        area = hecke_area(q)
        F = field(q)
        eta = F.lam.inverse()
        one, zero = F.one, F.zero
        T = MoebiusMap(one, one, zero, one)
        U = MoebiusMap(zero, -eta, F.lam, zero)
        return cls(q, F, eta, T, U, area)

    @classmethod
    def modular(cls) -> ZonalGroup:
        return cls.hecke(3)

    @property
    def family(self) -> str:
        return "modular" if self.q == 3 else f"hecke({self.q})"

    @property
    def E(self) -> MoebiusMap:
        return self.T @ self.U

    def __reduce__(self):
        return (ZonalGroup.hecke, (self.q,))

    # tuples are used in the walk for speed
    def _tuples(self):
        cache = self.__dict__.get("_cache")
        if cache is None:
            M = lambda m: (m.a, m.b, m.c, m.d)  # noqa: E731
            E, U = M(self.E), M(self.U)
            one, zero = self.F.one, self.F.zero
            powers = [(one, zero, zero, one)]
            for _ in range(self.q):
                powers.append(_mat_mul(powers[-1], E))
            steps = [_mat_mul(powers[j + 1], U) for j in range(self.q - 1)]
            cache = {
                "cols": [(P[0], P[2]) for P in powers[: self.q]],
                "powers": powers,
                "steps": steps,
                "U": U,
            }
            object.__setattr__(self, "_cache", cache)
        return cache


def _canonical(col: Column) -> Column:
    p, q = col
    s = q.sign()
    if s < 0 or (s == 0 and p.sign() < 0):
        return (-p, -q)
    return col


@dataclass(frozen=True)
class GammaRational:
    """The cusp p/q with canonical p, q (q >= 0), and how many crossed edges end there."""

    p: FieldElement
    q: FieldElement
    multiplicity: int = 1

    @property
    def value(self) -> FieldElement:
        return self.p / self.q

    def __str__(self) -> str:
        return f"({self.p})/({self.q})"


class _Word:
    """Persistent linked word so every tile shares its prefix."""

    __slots__ = ("parent", "token")

    def __init__(self, parent, token: str):
        self.parent, self.token = parent, token

    def __str__(self) -> str:
        out, node = [], self
        while node is not None:
            if node.token:
                out.append(node.token)
            node = node.parent
        return " ".join(reversed(out)) or "1"


@dataclass(frozen=True)
class OrbitGeodesic:
    """An edge g(imaginary axis) crossed by the ray above x."""

    lower: Column  # canonical column of the smaller endpoint (or 0 for a vertical side)
    upper: Column | None  # None for the point at infinity
    log_height: float  # log of the crossing height; inf for the vertical sides
    diameter: float  # Euclidean diameter; inf for vertical sides
    _word: _Word | None = dc_field(default=None, compare=False, repr=False)

    @property
    def height(self) -> float:
        return math.exp(self.log_height)

    @property
    def word(self) -> str:
        return str(self._word) if self._word is not None else "1"

    @property
    def vertical(self) -> bool:
        return self.upper is None

    def endpoints(self) -> tuple[Column, Column | None]:
        return self.lower, self.upper


class _Position:
    """Certified comparisons between x and cusps p/q of the field."""

    def __init__(self, x: RealSpec):
        self.x = x
        self.exact = isinstance(x, QuadraticSpec)
        enc = check_unit_interval(x)
        self.max_bits = 1 << 30 if self.exact else enc.scale.bit_length() + 64
        self._cache: dict[int, tuple[int, int]] = {}
        self.evaluations = 0

    def x_interval(self, bits: int) -> tuple[int, int]:
        got = self._cache.get(bits)
        if got is None:
            enc = self.x.enclosure(bits + 8) if self.exact else self.x.enclosure()
            got = ((enc.lo << bits) // enc.scale, -((-enc.hi << bits) // enc.scale))
            self._cache[bits] = got
        return got

    def delta(self, col: Column, rel: bool = False) -> tuple[int, int, int, int]:
        """Interval [lo, hi] / scale for q x - p, as (lo, hi, bits, den)."""
        p, q = col
        self.evaluations += 1
        bits = max(p.working_bits(), q.working_bits()) * 2
        bits = -(-bits // 128) * 128
        while True:
            if bits > self.max_bits + 128:
                raise PrecisionExhausted(f"{self.x.text} cannot be separated from a cusp at this precision")
            ql, qh = q.interval(bits)
            pl, ph = p.interval(bits)
            xl, xh = self.x_interval(bits)
            a, b, c, d = ql * xl, ql * xh, qh * xl, qh * xh
            lo = p.den * min(a, b) - q.den * (ph << bits)
            hi = p.den * max(c, d) - q.den * (pl << bits)
            if lo > 0 or hi < 0:
                if not rel or (hi - lo) << 52 < min(abs(lo), abs(hi)):
                    return lo, hi, bits, p.den * q.den
            elif lo == hi == 0:
                raise DomainError("x coincides with a cusp")
            bits *= 2

    def below(self, col: Column) -> bool:
        """True when x < p/q (the column need not be canonical)."""
        lo, hi, _, _ = self.delta(col)
        return (lo > 0) == (col[1].sign() < 0)

    def dist_greater(self, a: Column, b: Column) -> bool:
        """Certified |x - a| > |x - b| for canonical columns; TieError on equality."""
        (pa, qa), (pb, qb) = a, b
        sa = 1 if self.delta(a)[0] > 0 else -1
        sb = 1 if self.delta(b)[0] > 0 else -1
        # sign of qb |qa x - pa| - qa |qb x - pb|, a linear form Q x - P
        P = qb * pa * sa - qa * pb * sb
        Q = qb * qa * (sa - sb)
        if P.is_zero() and Q.is_zero():
            raise TieError("two cusps are equidistant from x")
        lo, _, _, _ = self.delta((P, Q))
        return lo > 0

    def log_dist(self, col: Column) -> float:
        """log |x - p/q|."""
        lo, hi, bits, den = self.delta(col, rel=True)
        return math.log(abs(lo)) - 2 * bits * LOG2 - math.log(den) - col[1].log_abs()


class _Walker:
    def __init__(self, G: ZonalGroup, x: RealSpec, budget: int):
        self.G = G
        self.pos = _Position(x)
        self.budget = budget
        self.nodes = 0
        t = G._tuples()
        self.cols, self.powers, self.steps, self.U = t["cols"], t["powers"], t["steps"], t["U"]
        self._ld: dict[Column, float] = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise NodeBudgetExceeded(f"node budget {self.budget} exhausted")

    def vertex(self, g, i: int) -> Column:
        return _mat_col(g, self.cols[i])

    def log_dist(self, col: Column) -> float:
        key = _canonical(col)
        v = self._ld.get(key)
        if v is None:
            v = self._ld[key] = self.pos.log_dist(key)
        return v

    def edge(self, g, j: int, word: _Word) -> OrbitGeodesic:
        lo, hi = _canonical(self.vertex(g, j + 1)), _canonical(self.vertex(g, j))
        lu, lv = self.log_dist(lo), self.log_dist(hi)
        diameter = math.exp(lu) + math.exp(lv)
        return OrbitGeodesic(lo, hi, 0.5 * (lu + lv), diameter, word)

    def exit_index(self, g, first: bool) -> int:
        self.tick()
        q = self.G.q
        for i in range(q - 2, 0, -1):
            if self.pos.below(self.vertex(g, i)):
                return i
        if first:
            raise DomainError("x is not inside (0, 1)")
        return 0

    def run_tile(self, g, j: int, m: int):
        """Tile after m fan steps of type j from g."""
        F = self.G.F
        if j == 0:
            # E U = -T: translation fixing the cusp g(oo)
            return _mat_mul(g, (F.one, F(m), F.zero, F.one))
        # E^{-1} U = -U^{-1} T^{-1} U: parabolic at g E^{-1}(oo)
        U = self.U
        Uinv = (U[3], -U[1], -U[2], U[0])
        return _mat_mul(_mat_mul(_mat_mul(g, Uinv), (F.one, F(-m), F.zero, F.one)), U)

    def in_fan(self, g, j: int, m: int) -> bool:
        self.tick()
        tile = self.run_tile(g, j, m)
        if j == 0:
            return not self.pos.below(self.vertex(tile, 1))
        return self.pos.below(self.vertex(tile, self.G.q - 2))

    def fan_length(self, g, j: int) -> int:
        """Number K >= 1 of consecutive exits of type j starting at tile g."""
        hi = 1
        while self.in_fan(g, j, hi):
            hi *= 2
        lo = hi // 2  # in_fan(lo) holds (lo = 0 trivially)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.in_fan(g, j, mid):
                lo = mid
            else:
                hi = mid
        return hi

    def segments(self) -> Iterator[tuple[object, int, int, _Word]]:
        """Yield (tile, j, K, word): K crossings of exit type j starting at tile."""
        G = self.G
        F = G.F
        q = G.q
        g = (F.one, F.zero, F.zero, F.one)
        word = _Word(None, "")
        first = True
        while True:
            j = self.exit_index(g, first)
            first = False
            if j == 0 or j == q - 2:
                K = self.fan_length(g, j)
            else:
                K = 1
            yield g, j, K, word
            if K == 1 and 0 < j < q - 2:
                g = _mat_mul(g, self.steps[j])
                word = _Word(word, f"(TU)^{j + 1} U")
            else:
                g = self.run_tile(g, j, K)
                word = _Word(word, f"T^{K}" if j == 0 else f"U T^{-K} U")


def _fan_word(word: _Word, j: int, m: int) -> _Word:
    if m == 0:
        base = word
    else:
        base = _Word(word, f"T^{m}" if j == 0 else f"U T^{-m} U")
    return _Word(base, "TU" if j == 0 else f"(TU)^{j + 1}")


def _vertical_sides(G: ZonalGroup) -> list[OrbitGeodesic]:
    F = G.F
    zero = (F.zero, F.one)
    one = (F.one, F.one)
    return [
        OrbitGeodesic(zero, None, math.inf, math.inf, _Word(None, "")),
        OrbitGeodesic(one, None, math.inf, math.inf, _Word(None, "T")),
    ]


def _check_inputs(G: ZonalGroup, x, h_min: float) -> RealSpec:
    x = parse_real(x)
    if x.exact and not isinstance(x, QuadraticSpec):
        raise DomainError("zonal walks need an irrational x")
    if not 0 < h_min < 1:
        raise DomainError("h_min must lie in (0, 1)")
    return x


def enumerate_crossings(
    G: ZonalGroup, x: RealSpec | str, h_min: float, budget: int = DEFAULT_NODE_BUDGET
) -> list[OrbitGeodesic]:
    """Every edge of the orbit of the imaginary axis crossing the ray above x at height >= h_min."""
    x = _check_inputs(G, x, h_min)
    W = _Walker(G, x, budget)
    out = _vertical_sides(G)
    log_h = math.log(h_min)
    try:
        for g, j, K, word in W.segments():
            fan = j in (0, G.q - 2)
            for m in range(K):
                W.tick()
                if fan:
                    e = W.edge(W.run_tile(g, j, m), j, _fan_word(word, j, m))
                else:
                    e = W.edge(g, j, _Word(word, f"(TU)^{j + 1}"))
                if e.log_height < log_h:
                    return out
                out.append(e)
    except NodeBudgetExceeded as exc:
        floor = out[-1].height if len(out) > 2 else math.inf
        raise NodeBudgetExceeded(str(exc), partial=out, height_floor=floor) from None


@dataclass(frozen=True)
class GammaConvergent:
    rational: GammaRational
    theta: float
    t: float
    log_q: float

    @property
    def depth(self) -> float:
        return 2.0 * self.theta

    @property
    def log_dist(self) -> float:
        return LOG2 - self.t


class _Tally:
    """Multiplicities of cusps met by crossed edges."""

    def __init__(self, W: _Walker):
        self.W = W
        self.count: dict[Column, int] = {}
        self.found: list[Column] = []

    def add(self, col: Column, n: int = 1):
        key = _canonical(col)
        before = self.count.get(key, 0)
        self.count[key] = before + n
        if before < 2 <= before + n:
            self.found.append(key)


def _gamma_walk(
    G: ZonalGroup, x: RealSpec, stop: Callable[[_Walker, _Tally, float, float], bool], budget: int
) -> _Tally:
    """Walk until ``stop(walker, tally, log_dist_lower, log_dist_upper)`` of the current edge."""
    W = _Walker(G, x, budget)
    tally = _Tally(W)
    q = G.q
    for g, j, K, _ in W.segments():
        if j in (0, q - 2):
            last = W.run_tile(g, j, K - 1)
            pivot = W.vertex(g, 0 if j == 0 else q - 1)
            other = W.vertex(last, 1 if j == 0 else q - 2)
            tally.add(pivot, K)
            tally.add(other)
            lo, hi = W.vertex(last, j + 1), W.vertex(last, j)
        else:
            lo, hi = W.vertex(g, j + 1), W.vertex(g, j)
            tally.add(lo)
            tally.add(hi)
        if stop(W, tally, W.log_dist(lo), W.log_dist(hi)):
            return tally
    raise AssertionError("walk ended")  # pragma: no cover


def _cut_fan(W: _Walker, g, j: int, K: int, log_h: float) -> int:
    """Number of the K fan crossings at height >= h (heights decrease along the fan)."""
    def ok(m):
        e = W.edge(W.run_tile(g, j, m), j, None)
        return e.log_height >= log_h

    if ok(K - 1):
        return K
    lo, hi = -1, K - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return hi


def _convergent_records(W: _Walker, tally: _Tally) -> list[GammaConvergent]:
    recs = []
    for key in tally.found:
        p, q = key
        if p.is_zero():
            continue  # the cusp 0 is the side of the base tile, kept out like the seed 0/1
        ld = W.log_dist(key)
        lq = q.log_abs()
        recs.append(
            GammaConvergent(GammaRational(p, q, tally.count[key]), math.exp(ld + 2 * lq), LOG2 - ld, lq)
        )
    recs.sort(key=lambda r: r.t)
    # floats too close to trust: settle the order of near neighbours exactly
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(recs) - 1):
            a, b = recs[i], recs[i + 1]
            if b.t - a.t < 1e-9 * max(1.0, b.t):
                ka = (a.rational.p, a.rational.q)
                kb = (b.rational.p, b.rational.q)
                if not W.pos.dist_greater(ka, kb):
                    recs[i], recs[i + 1] = b, a
                    swapped = True
    return recs


def gamma_convergents(
    G: ZonalGroup,
    x: RealSpec | str,
    h_min: float,
    budget: int = DEFAULT_NODE_BUDGET,
    include_zero: bool = False,
) -> list[GammaConvergent]:
    """Cusps met by at least two crossings of height >= h_min, ordered by t."""
    x = _check_inputs(G, x, h_min)
    log_h = math.log(h_min)
    W = _Walker(G, x, budget)
    tally = _Tally(W)
    q = G.q
    for g, j, K, _ in W.segments():
        fan = j in (0, q - 2)
        if fan:
            K = _cut_fan(W, g, j, K, log_h)
            if K == 0:
                break
            last = W.run_tile(g, j, K - 1)
            tally.add(W.vertex(g, 0 if j == 0 else q - 1), K)
            tally.add(W.vertex(last, 1 if j == 0 else q - 2))
        else:
            e = W.edge(g, j, None)
            if e.log_height < log_h:
                break
            tally.add(W.vertex(g, j + 1))
            tally.add(W.vertex(g, j))
    recs = _convergent_records(W, tally)
    if include_zero:
        zero = (G.F.zero, G.F.one)
        if tally.count.get(zero, 0) >= 2:
            recs.insert(0, GammaConvergent(GammaRational(*zero, tally.count[zero]), 0.0, LOG2 - W.log_dist(zero), 0.0))
    return recs


def convergents_by_count(
    G: ZonalGroup, x: RealSpec | str, n: int, budget: int = DEFAULT_NODE_BUDGET
) -> list[GammaConvergent]:
    """The first n Gamma-convergents of x (the cusp 0 excluded), complete in t order.

    The walk stops once the current crossed edge lies closer to x than the
    n-th cusp found, since later cusps lie inside that edge.
    """
    x = _check_inputs(G, x, 0.5)

    def stop(W, tally, lu, lv):
        found = [k for k in tally.found if not k[0].is_zero()]
        if len(found) < n:
            return False
        ld = sorted((W.log_dist(k) for k in found), reverse=True)[n - 1]
        return max(lu, lv) < ld - 1e-9

    tally = _gamma_walk(G, x, stop, budget)
    recs = _convergent_records(tally.W, tally)
    if len(recs) < n:
        raise InsufficientEvents(f"only {len(recs)} Gamma-convergents found")
    return recs[:n]


@dataclass(frozen=True)
class LevyEstimate:
    spec: str
    n: int
    log_q_rate: float  # log q_n / n
    dist_rate: float  # -(1/2n) log |x - p_n/q_n|


def hecke_levy_sample(G: ZonalGroup, x: RealSpec | str, n: int, budget: int = DEFAULT_NODE_BUDGET) -> LevyEstimate:
    recs = convergents_by_count(G, x, n, budget)
    last = recs[-1]
    return LevyEstimate(parse_real(x).text, n, last.log_q / n, -(last.log_dist) / (2 * n))


def stabilizer_of_zero_power(G: ZonalGroup, n: int) -> FieldElement:
    """R^n(oo) for R = U T U, the generator of the stabilizer of 0."""
    R = G.U @ G.T @ G.U
    M = MoebiusMap.identity(G.F.one)
    step = R if n >= 0 else R.inverse()
    for _ in range(abs(n)):
        M = M @ step
    if M.c.is_zero():
        raise DomainError("R^0 fixes infinity")
    return M.a / M.c
