import math
import statistics

import pytest
from hypothesis import given, settings, strategies as st

from cusplab.errors import DomainError, InsufficientEvents
from cusplab.excursions import (
    ALL,
    APPROXIMATING,
    CDF_GRID,
    KINDS,
    LEVY_CONVERGENTS,
    A_function,
    build_series,
    counting_rates,
    depth_statistics,
    empirical_cdf,
    gap_and_length_stats,
    levy_limits,
    loglaw_diagnostics,
    rate_weight,
    reference_cdf,
    theta_statistics,
)


# ------------------------------------------------------------ A and targets


def test_A_function_values():
    assert A_function(0.5) == 0.5
    assert A_function(1.0) == 1.0
    assert A_function(2.0) == pytest.approx(2 * math.log(2))
    assert A_function(1.5) == pytest.approx(0.5 + 2 * math.log(1.5))
    for bad in (0, -1, 2.01):
        with pytest.raises(DomainError):
            A_function(bad)


@given(st.floats(0.001, 1.999), st.floats(0.001, 1.999))
@settings(max_examples=200)
def test_A_is_increasing_and_below_identity(a, b):
    a, b = sorted((a, b))
    assert A_function(a) <= A_function(b)
    # approximating events are a subset of all events
    assert A_function(b) <= b + 1e-15


def test_A_is_continuous_at_one():
    assert A_function(1 + 1e-12) == pytest.approx(1.0, abs=1e-11)


def test_reference_cdf_end_points():
    for kind in KINDS:
        assert reference_cdf(2.0, kind) == pytest.approx(1.0)
    assert reference_cdf(1.0, ALL) == 0.5
    assert reference_cdf(1.0, APPROXIMATING) == pytest.approx(1 / (2 * math.log(2)))
    assert rate_weight(0.25, ALL) == 0.25


def test_predicted_rates():
    rep = counting_rates(build_series("rand:1:400", 150), k_grid=(1.0, 2.0))
    assert rep.row(1.0, ALL).predicted == pytest.approx(3 / math.pi**2)
    assert rep.row(2.0, APPROXIMATING).predicted == pytest.approx(3 * 2 * math.log(2) / math.pi**2)


# ------------------------------------------------------------ series


def test_series_basics(small_series):
    s = small_series[0]
    assert s.generic
    ts = [e.t for e in s.events]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert all(e.d == 2 * e.theta and 0 < e.d < 2 for e in s.events)
    assert s.t_max == s.convergents()[-1].t
    assert [e.index for e in s.convergents()] == list(range(1, 2001))
    assert all((e.p, e.q) != (0, 1) for e in s.events)
    assert len(s.digits) == 2001


def test_series_needs_ten_terms():
    with pytest.raises(DomainError):
        build_series("golden", 9)


def test_golden_is_flagged_non_generic():
    s = build_series("golden", 50)
    assert not s.generic
    assert levy_limits(build_series("golden", 200)).note.startswith("non-generic")
    assert s.count(APPROXIMATING) == s.count(ALL)


def test_golden_levy_is_log_phi():
    rep = levy_limits(build_series("golden", 2000))
    lq, dr = rep.traces["convergents"].terminal
    assert lq == pytest.approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-3)
    assert abs(lq / LEVY_CONVERGENTS - 1) > 0.5


@pytest.mark.parametrize("k", [0.25, 0.5, 1.0, 1.5, 2.0])
def test_monotone_coupling(small_series, k):
    for s in small_series:
        for kind in KINDS:
            assert len(s.select(kind, k * 0.9)) <= len(s.select(kind, k))
        assert {(e.p, e.q) for e in s.select(APPROXIMATING, k)} <= {(e.p, e.q) for e in s.select(ALL, k)}


def test_burn_in_drops_leading_events(small_series):
    s = small_series[0]
    assert s.select(ALL, 2.0, burn_in=10) == list(s.events[10:])


# ------------------------------------------------------------ rates, gaps


def test_gap_rate_duality(small_series):
    for s in small_series:
        rate = counting_rates(s, k_grid=(1.0, 2.0))
        for kind in KINDS:
            for k in (1.0, 2.0):
                g = gap_and_length_stats(s, k, kind, burn_in=0)
                n = rate.row(k, kind).n_events
                assert g.n_events == n
                # the events span at most [0, t_max]; boundary pieces are O(1 gap)
                assert g.mean_gap * (n - 1) <= s.t_max
                assert g.mean_gap * (n + 1) >= s.t_max - 60
                assert g.predicted_gap * rate.row(k, kind).predicted == pytest.approx(1.0)


def test_chord_only_for_small_k(small_series):
    s = small_series[0]
    assert gap_and_length_stats(s, 2.0).mean_chord is None
    g = gap_and_length_stats(s, 1.0)
    assert 2 < g.mean_chord < 4.5


def test_gap_needs_two_events():
    s = build_series("rand:1:300", 10)
    with pytest.raises(InsufficientEvents):
        gap_and_length_stats(s, 0.001)


def test_small_pool_is_near_targets(small_series):
    # a loose sanity band at 8 samples; the acceptance suite checks the real tolerances
    rates = [counting_rates(s).row(2.0, ALL).rel_err for s in small_series]
    assert abs(statistics.fmean(rates)) < 0.05
    th = [theta_statistics(s)[ALL].mean_theta for s in small_series]
    assert statistics.fmean(th) == pytest.approx(0.5, abs=0.03)


# ------------------------------------------------------------ distributions


def test_empirical_cdf():
    assert empirical_cdf([0.1, 0.2, 0.2, 1.9], grid=(0.05, 0.2, 2.0)) == (0.0, 0.75, 1.0)


def test_depth_report_consistency(small_series):
    for s in small_series:
        rep = depth_statistics(s)
        th = theta_statistics(s)
        for kind in KINDS:
            r = rep[kind]
            assert r.grid == CDF_GRID
            assert all(b >= a for a, b in zip(r.empirical, r.empirical[1:]))
            assert r.empirical[-1] == 1.0
            assert r.mean_depth == pytest.approx(2 * th[kind].mean_theta)
            assert r.mean_log_depth == pytest.approx(math.log(2) + th[kind].mean_log_theta)
            assert r.sup_distance < 0.15


def test_statistics_need_events():
    s = build_series("rand:1:300", 20)
    with pytest.raises(InsufficientEvents):
        depth_statistics(s)
    with pytest.raises(InsufficientEvents):
        levy_limits(s)


# ------------------------------------------------------------ Levy and log law


def test_levy_traces(small_series):
    rep = levy_limits(small_series[0])
    c = rep.traces["convergents"]
    assert c.n[-1] == 2000
    assert c.log_q_rate[-1] == pytest.approx(math.log(small_series[0].convergents()[-1].q) / 2000)
    # q^2 |x - p/q| = theta stays bounded, so both expressions agree
    assert c.dist_rate[-1] == pytest.approx(c.log_q_rate[-1], rel=5e-3)
    assert rep.note == ""


def test_loglaw_golden_traces_vanish():
    rep = loglaw_diagnostics(build_series("golden", 2000))
    assert rep.max_digit_ratio == 0.0
    assert max(rep.digit_trace) == 0.0
    th, dg = rep.tail_sup(1000)
    # -log theta_n -> log sqrt 5, divided by log n
    assert th == pytest.approx(math.log(math.sqrt(5)) / math.log(1000), rel=1e-3)
    assert rep.theta_trace[-1] == pytest.approx(math.log(math.sqrt(5)) / math.log(2000), rel=1e-3)
    assert dg == 0.0
    assert rep.proven_bound_failures == 0
    assert rep.stated_bound_failures == 0  # all a_n = 1: 1/theta -> sqrt 5 lies in (2, 3)


def test_loglaw_traces_are_tail_suprema(small_series):
    rep = loglaw_diagnostics(small_series[1])
    assert all(b <= a for a, b in zip(rep.theta_trace, rep.theta_trace[1:]))
    assert all(b <= a for a, b in zip(rep.digit_trace, rep.digit_trace[1:]))
    i10 = rep.n.index(10)
    assert rep.max_digit_ratio == rep.digit_trace[i10]
    assert rep.proven_bound_failures == 0
    # the provable sandwich bounds the gap by log 2
    assert rep.max_gap < math.log(2) + 1e-12


def test_loglaw_needs_terms():
    with pytest.raises(InsufficientEvents):
        loglaw_diagnostics(build_series("rand:1:300", 20))
