"""Cusp excursions of the vertical ray above x and their limiting statistics.

Every n-convergent p/q of x is a tangency of the ray with the horoball at
p/q; its depth is d = 2 theta and it happens at depth parameter t.  Events
coming from classical convergents are the approximating excursions.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .cf import Kind, cf_expand, n_convergents, sandwich_check
from .errors import DomainError, InsufficientEvents
from .hyperbolic import horoball_chord_length
from .reals import RealSpec, parse_real

LOG2 = math.log(2.0)
MODULAR_AREA = math.pi / 3
DEFAULT_BURN_IN = 10
DEFAULT_K_GRID = (0.25, 0.5, 1.0, 1.5, 2.0)
CDF_GRID = tuple(2.0 * i / 40 for i in range(1, 41))

APPROXIMATING = "approximating"
NONCLASSICAL = "nonclassical"
ALL = "all"
KINDS = (ALL, APPROXIMATING)


def A_function(z: float) -> float:
    """z on (0, 1] and 2 - z + 2 log z on [1, 2]."""
    if not 0 < z <= 2:
        raise DomainError(f"A is defined on (0, 2], got {z}")
    return z if z <= 1 else 2 - z + 2 * math.log(z)


def rate_weight(k: float, kind: str) -> float:
    """The function A*(k): k for all events, A(k) for approximating ones."""
    return k if kind == ALL else A_function(k)


def reference_cdf(x: float, kind: str) -> float:
    """Limiting distribution of depths on (0, 2]."""
    return rate_weight(x, kind) / rate_weight(2.0, kind)


@dataclass(frozen=True)
class ExcursionEvent:
    t: float
    d: float
    theta: float
    p: int
    q: int
    kind: str
    index: int  # convergent index n for approximating events, else the level

    @property
    def approximating(self) -> bool:
        return self.kind == APPROXIMATING


@dataclass(frozen=True)
class ExcursionSeries:
    spec: str
    events: tuple[ExcursionEvent, ...]
    t_max: float
    generic: bool
    digits: tuple[int, ...]  # partial quotients a_1 .. a_{N+1}
    n_terms: int

    def count(self, kind: str = ALL) -> int:
        return sum(1 for e in self.events if kind == ALL or e.kind == kind)

    def select(self, kind: str = ALL, k: float = 2.0, burn_in: int = 0) -> list[ExcursionEvent]:
        """Events of a kind with depth below k, after dropping the first ``burn_in`` events."""
        return [e for e in self.events[burn_in:] if e.d < k and (kind == ALL or e.kind == kind)]

    def convergents(self) -> list[ExcursionEvent]:
        return [e for e in self.events if e.approximating]


def build_series(x: RealSpec | str, n_terms: int) -> ExcursionSeries:
    """Events up to the tangency of convergent ``n_terms``, ordered by t.

    The 0/1 approximant (the cusp at the corner of the base strip) is not an
    event.
    """
    x = parse_real(x)
    if n_terms < 10:
        raise DomainError("a series needs at least 10 convergents")
    recs = n_convergents(x, n_terms)
    events = []
    for r in recs:
        if r.seed or r.t <= 0:
            continue
        kind = APPROXIMATING if r.kind == Kind.CONVERGENT else NONCLASSICAL
        events.append(ExcursionEvent(r.t, 2 * r.theta, r.theta, r.p, r.q, kind, r.level))
    last = [e for e in events if e.approximating][-1]
    digits = cf_expand(x, n_terms + 1).digits
    return ExcursionSeries(x.text, tuple(events), last.t, x.generic, tuple(digits), n_terms)


# ------------------------------------------------------------------ rates


@dataclass(frozen=True)
class RateRow:
    k: float
    kind: str
    n_events: int
    empirical: float
    predicted: float

    @property
    def rel_err(self) -> float:
        return (self.empirical - self.predicted) / self.predicted


@dataclass(frozen=True)
class RateReport:
    spec: str
    t_max: float
    rows: tuple[RateRow, ...]

    def row(self, k: float, kind: str) -> RateRow:
        return next(r for r in self.rows if r.k == k and r.kind == kind)


def counting_rates(series: ExcursionSeries, k_grid=DEFAULT_K_GRID, area: float = MODULAR_AREA) -> RateReport:
    """Terminal ratios N(k)(t_max)/t_max for all and for approximating events."""
    if series.t_max <= 0:
        raise DomainError("empty horizon")
    rows = []
    for kind in KINDS:
        for k in k_grid:
            if not 0 < k <= 2:
                raise DomainError(f"k must lie in (0, 2], got {k}")
            n = len(series.select(kind, k))
            rows.append(RateRow(k, kind, n, n / series.t_max, rate_weight(k, kind) / (math.pi * area)))
    return RateReport(series.spec, series.t_max, tuple(rows))


# ------------------------------------------------------------ gaps, chords


@dataclass(frozen=True)
class GapStats:
    k: float
    kind: str
    n_events: int
    mean_gap: float
    predicted_gap: float
    mean_chord: float | None  # only for k <= 1


def gap_and_length_stats(
    series: ExcursionSeries, k: float, kind: str = ALL, burn_in: int = DEFAULT_BURN_IN, area: float = MODULAR_AREA
) -> GapStats:
    ev = series.select(kind, k, burn_in)
    if len(ev) < 2:
        raise InsufficientEvents(f"only {len(ev)} events below depth {k}")
    mean_gap = (ev[-1].t - ev[0].t) / (len(ev) - 1)
    chord = None
    if k <= 1:
        chord = statistics.fmean(horoball_chord_length(k, e.d) for e in ev)
    return GapStats(k, kind, len(ev), mean_gap, math.pi * area / rate_weight(k, kind), chord)


# ---------------------------------------------------- depths and thetas


@dataclass(frozen=True)
class DistributionReport:
    kind: str
    n_events: int
    grid: tuple[float, ...]
    empirical: tuple[float, ...]
    reference: tuple[float, ...]
    mean_depth: float
    mean_log_depth: float

    @property
    def sup_distance(self) -> float:
        return max(abs(a - b) for a, b in zip(self.empirical, self.reference))


DEPTH_TARGETS = {
    ALL: {"mean_depth": 1.0, "mean_log_depth": LOG2 - 1},
    APPROXIMATING: {"mean_depth": 1 / (2 * LOG2), "mean_log_depth": LOG2 / 2 - 1},
}
THETA_TARGETS = {
    ALL: {"mean_theta": 0.5, "mean_log_theta": -1.0},
    APPROXIMATING: {"mean_theta": 1 / (4 * LOG2), "mean_log_theta": -LOG2 / 2 - 1},
}


def empirical_cdf(values, grid=CDF_GRID) -> tuple[float, ...]:
    vals = sorted(values)
    n = len(vals)
    out, i = [], 0
    for g in grid:
        while i < n and vals[i] <= g:
            i += 1
        out.append(i / n)
    return tuple(out)


def depth_statistics(
    series: ExcursionSeries, burn_in: int = DEFAULT_BURN_IN, min_events: int = 100
) -> dict[str, DistributionReport]:
    out = {}
    for kind in KINDS:
        ev = series.select(kind, 2.0, burn_in)
        if len(ev) < min_events:
            raise InsufficientEvents(f"{len(ev)} {kind} events, need {min_events}")
        d = [e.d for e in ev]
        out[kind] = DistributionReport(
            kind,
            len(d),
            CDF_GRID,
            empirical_cdf(d),
            tuple(reference_cdf(g, kind) for g in CDF_GRID),
            statistics.fmean(d),
            statistics.fmean(math.log(v) for v in d),
        )
    return out


@dataclass(frozen=True)
class ThetaStats:
    kind: str
    n_events: int
    mean_theta: float
    mean_log_theta: float


def theta_statistics(
    series: ExcursionSeries, burn_in: int = DEFAULT_BURN_IN, min_events: int = 100
) -> dict[str, ThetaStats]:
    out = {}
    for kind in KINDS:
        ev = series.select(kind, 2.0, burn_in)
        if len(ev) < min_events:
            raise InsufficientEvents(f"{len(ev)} {kind} events, need {min_events}")
        th = [e.theta for e in ev]
        out[kind] = ThetaStats(kind, len(th), statistics.fmean(th), statistics.fmean(math.log(v) for v in th))
    return out


# --------------------------------------------------------------- Levy


LEVY_CONVERGENTS = math.pi**2 / (12 * LOG2)
LEVY_N_CONVERGENTS = math.pi**2 / 12


@dataclass(frozen=True)
class LevyTrace:
    kind: str
    n: tuple[int, ...]
    log_q_rate: tuple[float, ...]  # log q_n / n
    dist_rate: tuple[float, ...]  # -(1/2n) log |x - p_n/q_n|
    target: float

    @property
    def terminal(self) -> tuple[float, float]:
        return self.log_q_rate[-1], self.dist_rate[-1]


@dataclass(frozen=True)
class LevyReport:
    spec: str
    generic: bool
    traces: dict[str, LevyTrace] = field(default_factory=dict)

    @property
    def note(self) -> str:
        return "" if self.generic else "non-generic: a.e. targets do not apply"


def levy_limits(series: ExcursionSeries, min_events: int = 100) -> LevyReport:
    traces = {}
    for kind, target in ((APPROXIMATING, LEVY_CONVERGENTS), (ALL, LEVY_N_CONVERGENTS)):
        ev = series.select(kind)
        if len(ev) < min_events:
            raise InsufficientEvents(f"{len(ev)} {kind} events, need {min_events}")
        ns = tuple(range(1, len(ev) + 1))
        lq = tuple(math.log(e.q) / n for e, n in zip(ev, ns))
        # -log|x - p/q| = t - log 2
        dr = tuple((e.t - LOG2) / (2 * n) for e, n in zip(ev, ns))
        name = "convergents" if kind == APPROXIMATING else "n-convergents"
        traces[name] = LevyTrace(name, ns, lq, dr, target)
    return LevyReport(series.spec, series.generic, traces)


# ------------------------------------------------------------- log law


@dataclass(frozen=True)
class LogLawReport:
    spec: str
    n: tuple[int, ...]
    # tail suprema sup_{n <= m <= N}, the finite stand-in for a limsup
    theta_trace: tuple[float, ...]  # of -log theta_m / log m
    digit_trace: tuple[float, ...]  # of log a_m / log m
    max_digit_ratio: float  # max over 10 <= n <= N of log a_n / log n
    stated_bound_failures: int  # n violating a_{n+1}+1 < 1/theta_n < a_{n+1}+2
    proven_bound_failures: int  # n violating a_{n+1} < 1/theta_n < a_{n+1}+2
    max_gap: float  # max |(-log theta_n) - log(a_{n+1}+1)|

    def tail_sup(self, n0: int) -> tuple[float, float]:
        """(theta, digit) suprema over n0 <= n <= N."""
        i = next(i for i, n in enumerate(self.n) if n >= n0)
        return self.theta_trace[i], self.digit_trace[i]


def _tail_max(values: list[float]) -> tuple[float, ...]:
    out, m = [], -math.inf
    for v in reversed(values):
        m = max(m, v)
        out.append(m)
    return tuple(reversed(out))


def loglaw_diagnostics(series: ExcursionSeries, min_terms: int = 100) -> LogLawReport:
    conv = series.convergents()
    N = len(conv)
    if N < min_terms:
        raise InsufficientEvents(f"{N} convergents, need {min_terms}")
    a = series.digits
    ns, th, dg = [], [], []
    max_ratio = -math.inf
    max_gap = 0.0
    for e in conv:
        n = e.index
        max_gap = max(max_gap, abs(-math.log(e.theta) - math.log(a[n] + 1)))  # a[n] = a_{n+1}
        if n < 2:
            continue
        ln = math.log(n)
        r = math.log(a[n - 1]) / ln
        if n >= 10:
            max_ratio = max(max_ratio, r)
        ns.append(n)
        th.append(-math.log(e.theta) / ln)
        dg.append(r)
    stated = len(sandwich_check(series.spec, series.n_terms, 1))
    proven = len(sandwich_check(series.spec, series.n_terms, 0))
    return LogLawReport(
        series.spec, tuple(ns), _tail_max(th), _tail_max(dg), max_ratio, stated, proven, max_gap
    )
