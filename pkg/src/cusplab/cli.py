"""The ``cusp-lab`` command line."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import repeat
from pathlib import Path

from . import __version__
from .cf import LOG2, cf_expand, convergent_table, convergent_thetas, depth_parameter
from .config import COMMANDS, REPORT_SCHEMA, ZONAL_SCHEMA, ExperimentConfig, ReportBundle
from .errors import CuspLabError, DomainError, NodeBudgetExceeded, PrecisionExhausted
from .excursions import (
    ALL,
    APPROXIMATING,
    CDF_GRID,
    DEPTH_TARGETS,
    KINDS,
    LEVY_CONVERGENTS,
    LEVY_N_CONVERGENTS,
    THETA_TARGETS,
    build_series,
    counting_rates,
    depth_statistics,
    gap_and_length_stats,
    levy_limits,
    loglaw_diagnostics,
    reference_cdf,
    theta_statistics,
)
from .reals import RationalSpec, parse_real
from .zonal import ZonalGroup, gamma_convergents, hecke_levy_sample, hecke_levy_target

EXIT_OK, EXIT_DOMAIN, EXIT_PRECISION, EXIT_TOLERANCE, EXIT_ORACLE = 0, 1, 2, 3, 4

BAND_PATH = Path(__file__).parent / "data" / "loglaw_band.json"
GAP_K = (1.0, 2.0)
CHORD_K = (0.5, 1.0)
LEVY_TRACE_POINTS = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)


def fmt(v) -> str:
    """Nine significant digits for floats; everything else as text."""
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def error_code(exc: BaseException) -> int:
    if isinstance(exc, (PrecisionExhausted, NodeBudgetExceeded)):
        return EXIT_PRECISION
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    return EXIT_TOLERANCE


def mean_stderr(values) -> tuple[float, float]:
    values = list(values)
    m = statistics.fmean(values)
    se = statistics.stdev(values) / math.sqrt(len(values)) if len(values) > 1 else 0.0
    return m, se


# ------------------------------------------------------------ sample work


def sample_metrics(cfg: ExperimentConfig, series) -> dict:
    """Per-sample numbers needed by ``cfg.command`` for one excursion series."""
    out = {"generic": series.generic, "t_max": series.t_max, "n_events": {kind: series.count(kind) for kind in KINDS}}
    cmd = cfg.command
    b = cfg.burn_in
    if cmd == "rates":
        rep = counting_rates(series, cfg.k)
        out["rates"] = [[r.kind, r.k, r.n_events, r.empirical, r.predicted] for r in rep.rows]
    elif cmd == "stats":
        gaps = []
        for kind in KINDS:
            for k in GAP_K:
                g = gap_and_length_stats(series, k, kind, b)
                gaps.append([kind, k, g.n_events, g.mean_gap, g.predicted_gap])
        chords = []
        for k in CHORD_K:
            g = gap_and_length_stats(series, k, ALL, b)
            chords.append([k, g.n_events, g.mean_chord])
        th = theta_statistics(series, b)
        dp = depth_statistics(series, b)
        out["gaps"] = gaps
        out["chords"] = chords
        out["theta"] = {k: [v.n_events, v.mean_theta, v.mean_log_theta] for k, v in th.items()}
        out["depth"] = {k: [v.n_events, v.mean_depth, v.mean_log_depth] for k, v in dp.items()}
        out["cdf"] = {k: list(v.empirical) for k, v in dp.items()}
    elif cmd == "levy":
        rep = levy_limits(series)
        out["levy"] = {
            name: {
                "n": tr.n[-1],
                "log_q_rate": tr.log_q_rate[-1],
                "dist_rate": tr.dist_rate[-1],
                "trace": [[n, tr.log_q_rate[n - 1]] for n in LEVY_TRACE_POINTS if n <= tr.n[-1]],
            }
            for name, tr in rep.traces.items()
        }
    elif cmd == "loglaw":
        rep = loglaw_diagnostics(series)
        theta_tail, digit_tail = rep.tail_sup(rep.n[-1] // 2)
        out["loglaw"] = {
            "max_digit_ratio": rep.max_digit_ratio,
            "theta_tail_sup": theta_tail,
            "digit_tail_sup": digit_tail,
            "stated_bound_failures": rep.stated_bound_failures,
            "proven_bound_failures": rep.proven_bound_failures,
            "max_gap": rep.max_gap,
        }
    return out


def _series_sample(cfg_json: str, index: int) -> dict:
    cfg = ExperimentConfig.from_json(cfg_json)
    spec = cfg.sample_spec(index)
    out = {"index": index, "spec": spec}
    try:
        out.update(sample_metrics(cfg, build_series(spec, cfg.n_terms)))
    except CuspLabError as exc:
        out["error"] = [error_code(exc), f"{type(exc).__name__}: {exc}"]
    return out


def modular_cross_check(spec: str, hmin: float) -> dict:
    """Compare geometric modular convergents with the continued-fraction ones."""
    G = ZonalGroup.modular()
    geo = gamma_convergents(G, spec, hmin, include_zero=True)
    pairs = [(int(r.rational.p.coeffs[0]), int(r.rational.q.coeffs[0])) for r in geo]
    assert all(r.rational.p.den == 1 and r.rational.q.den == 1 for r in geo)
    dropped_zero = bool(pairs) and pairs[0] == (0, 1)
    if dropped_zero:
        pairs = pairs[1:]
    try:
        cf = cf_expand(spec, len(pairs) + 2)
        digits = cf.digits
    except PrecisionExhausted as exc:
        digits = cf_expand(spec, exc.certified).digits
    P, Q = convergent_table(digits)
    classical = list(zip(P[2:], Q[2:]))
    match = classical[: len(pairs)] == pairs
    return {
        "n_geometric": len(pairs),
        "leading_zero": dropped_zero,
        "match": match,
        "first_mismatch": next((i for i, (a, b) in enumerate(zip(pairs, classical)) if a != b), None),
    }


def _zonal_sample(cfg_json: str, index: int) -> dict:
    cfg = ExperimentConfig.from_json(cfg_json)
    spec = cfg.sample_spec(index)
    out = {"index": index, "spec": spec}
    try:
        if cfg.q == 3:
            out["cross_check"] = modular_cross_check(spec, cfg.hmin)
        est = hecke_levy_sample(ZonalGroup.hecke(cfg.q), spec, cfg.gamma_count)
        out["levy"] = {"n": est.n, "log_q_rate": est.log_q_rate, "dist_rate": est.dist_rate}
    except CuspLabError as exc:
        out["error"] = [error_code(exc), f"{type(exc).__name__}: {exc}"]
    return out


def map_samples(fn, cfg: ExperimentConfig) -> list[dict]:
    """Run ``fn`` over sample indices; the result order never depends on ``jobs``."""
    cfg_json = cfg.to_json()
    n = cfg.n_samples
    if cfg.jobs <= 1 or n <= 1:
        results = [fn(cfg_json, i) for i in range(n)]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(fn, repeat(cfg_json), range(n), chunksize=1))
    return sorted(results, key=lambda r: r["index"])


# ------------------------------------------------------------ checks


def check(name: str, value: float, target: float, tol: float, relative: bool) -> dict:
    err = (value - target) / target if relative else value - target
    return {
        "name": name,
        "value": value,
        "target": target,
        "tolerance": tol,
        "relative": relative,
        "error": err,
        "passed": abs(err) <= tol,
    }


def load_band() -> dict | None:
    try:
        return json.loads(BAND_PATH.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return None


def calibrate_band(values, seed: int, resamples: int = 2000) -> dict:
    """Median of per-sample maxima with a +-4 bootstrap standard error band."""
    values = list(values)
    med = statistics.median(values)
    rng = random.Random(seed)
    boots = [statistics.median(rng.choices(values, k=len(values))) for _ in range(resamples)]
    se = statistics.stdev(boots)
    return {"median": med, "lo": med - 4 * se, "hi": med + 4 * se, "bootstrap_se": se}


# ------------------------------------------------------------ commands


def pooled_rates(cfg, good):
    rows_by_kind = {}
    checks = []
    pooled = {}
    for kind in KINDS:
        rows = []
        for k in cfg.k:
            vals = [r[3] for s in good for r in s["rates"] if r[0] == kind and r[1] == k]
            n_ev = sum(r[2] for s in good for r in s["rates"] if r[0] == kind and r[1] == k)
            pred = next(r[4] for r in good[0]["rates"] if r[0] == kind and r[1] == k)
            m, se = mean_stderr(vals)
            rows.append([k, n_ev, m, pred, (m - pred) / pred])
            pooled[f"rate[{kind},k={fmt(k)}]"] = {"mean": m, "stderr": se, "predicted": pred}
            checks.append(check(f"rate {kind} k={fmt(k)}", m, pred, cfg.tolerance("rate_rel"), True))
        rows_by_kind[kind] = rows
    return rows_by_kind, pooled, checks


def pooled_stats(cfg, good):
    pooled, checks, rows = {}, [], []
    for kind in KINDS:
        for k in GAP_K:
            vals = [g[3] for s in good for g in s["gaps"] if g[0] == kind and g[1] == k]
            n_ev = sum(g[2] for s in good for g in s["gaps"] if g[0] == kind and g[1] == k)
            pred = next(g[4] for g in good[0]["gaps"] if g[0] == kind and g[1] == k)
            m, se = mean_stderr(vals)
            pooled[f"gap[{kind},k={fmt(k)}]"] = {"mean": m, "stderr": se, "predicted": pred}
            rows.append(["mean_gap", kind, k, n_ev, m, se, pred, (m - pred) / pred])
            checks.append(check(f"mean gap {kind} k={fmt(k)}", m, pred, cfg.tolerance("gap_rel"), True))
    for k in CHORD_K:
        vals = [c[2] for s in good for c in s["chords"] if c[0] == k]
        n_ev = sum(c[1] for s in good for c in s["chords"] if c[0] == k)
        m, se = mean_stderr(vals)
        pooled[f"chord[k={fmt(k)}]"] = {"mean": m, "stderr": se, "predicted": math.pi}
        rows.append(["mean_chord", ALL, k, n_ev, m, se, math.pi, (m - math.pi) / math.pi])
        checks.append(check(f"mean chord k={fmt(k)}", m, math.pi, cfg.tolerance("chord_rel"), True))
    for kind in KINDS:
        n_ev = sum(s["theta"][kind][0] for s in good)
        for j, (qty, tol_name) in enumerate((("mean_theta", "theta_abs"), ("mean_log_theta", "log_theta_abs"))):
            vals = [s["theta"][kind][1 + j] for s in good]
            m, se = mean_stderr(vals)
            target = THETA_TARGETS[kind][qty]
            pooled[f"{qty}[{kind}]"] = {"mean": m, "stderr": se, "predicted": target}
            rows.append([qty, kind, 2.0, n_ev, m, se, target, (m - target) / abs(target)])
            checks.append(check(f"{qty} {kind}", m, target, cfg.tolerance(tol_name), False))
        for j, qty in enumerate(("mean_depth", "mean_log_depth")):
            vals = [s["depth"][kind][1 + j] for s in good]
            m, se = mean_stderr(vals)
            target = DEPTH_TARGETS[kind][qty]
            pooled[f"{qty}[{kind}]"] = {"mean": m, "stderr": se, "predicted": target}
            rows.append([qty, kind, 2.0, n_ev, m, se, target, (m - target) / abs(target)])
    cdf_rows = []
    for i, g in enumerate(CDF_GRID):
        row = [g]
        for kind in KINDS:
            row += [statistics.fmean(s["cdf"][kind][i] for s in good), reference_cdf(g, kind)]
        cdf_rows.append(row)
    for j, kind in enumerate(KINDS):
        sup = max(abs(r[1 + 2 * j] - r[2 + 2 * j]) for r in cdf_rows)
        pooled[f"cdf_sup[{kind}]"] = {"mean": sup}
        checks.append(check(f"depth CDF sup-distance {kind}", sup, 0.0, cfg.tolerance("cdf_sup"), False))
    return rows, cdf_rows, pooled, checks


def pooled_levy(cfg, good):
    pooled, checks, rows = {}, [], []
    agree_tol = cfg.tolerance("levy_agreement_rel")
    for name, target in (("convergents", LEVY_CONVERGENTS), ("n-convergents", LEVY_N_CONVERGENTS)):
        for expr in ("log_q_rate", "dist_rate"):
            vals = [s["levy"][name][expr] for s in good]
            m, se = mean_stderr(vals)
            pooled[f"{expr}[{name}]"] = {"mean": m, "stderr": se, "predicted": target}
            rows.append([name, expr, m, se, target, (m - target) / target])
            checks.append(check(f"Levy {expr} {name}", m, target, cfg.tolerance("levy_rel"), True))
        worst = max(abs(s["levy"][name]["dist_rate"] / s["levy"][name]["log_q_rate"] - 1) for s in good)
        pooled[f"agreement[{name}]"] = {"max_rel_diff": worst}
        checks.append(check(f"Levy expressions agree per sample {name}", worst, 0.0, agree_tol, False))
    trace_rows = []
    for n in LEVY_TRACE_POINTS:
        row = [n]
        for name in ("convergents", "n-convergents"):
            vals = [v for s in good for (m, v) in s["levy"][name]["trace"] if m == n]
            row.append(statistics.fmean(vals) if len(vals) == len(good) else float("nan"))
        if not all(math.isnan(v) for v in row[1:]):
            trace_rows.append(row)
    return rows, trace_rows, pooled, checks


def pooled_loglaw(cfg, good, recalibrate: bool):
    maxima = [s["loglaw"]["max_digit_ratio"] for s in good]
    med = statistics.median(maxima)
    notes = []
    checks = []
    if recalibrate:
        band = calibrate_band(maxima, cfg.seed)
        band.update({"seed": cfg.seed, "samples": len(good), "terms": cfg.n_terms})
        BAND_PATH.parent.mkdir(parents=True, exist_ok=True)
        BAND_PATH.write_text(json.dumps(band, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        notes.append(f"band recalibrated and written to {BAND_PATH}")
    band = load_band()
    if band is None:
        notes.append("no stored band; run with --recalibrate")
    else:
        passed = band["lo"] <= med <= band["hi"]
        checks.append(
            {
                "name": "median max log a_n/log n inside stored band",
                "value": med,
                "target": [band["lo"], band["hi"]],
                "tolerance": 0.0,
                "relative": False,
                "error": 0.0 if passed else min(abs(med - band["lo"]), abs(med - band["hi"])),
                "passed": passed,
            }
        )
    proven = sum(s["loglaw"]["proven_bound_failures"] for s in good)
    stated = sum(s["loglaw"]["stated_bound_failures"] for s in good)
    checks.append(check("a_{n+1} < 1/theta_n < a_{n+1}+2 violations", float(proven), 0.0, 0.5, False))
    notes.append(f"a_(n+1)+1 < 1/theta_n < a_(n+1)+2 fails at {stated} indices (report only)")
    pooled = {
        "median_max_digit_ratio": {"mean": med},
        "stated_bound_failures": {"mean": stated},
        "proven_bound_failures": {"mean": proven},
    }
    return pooled, checks, notes


def cmd_expand(cfg: ExperimentConfig, out_dir: Path | None) -> int:
    if len(cfg.x) != 1:
        print("expand needs exactly one --x", file=sys.stderr)
        return EXIT_DOMAIN
    x = parse_real(cfg.x[0])
    try:
        cf = cf_expand(x, cfg.n_terms)
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}; largest certified N = {exc.certified}", file=sys.stderr)
        return EXIT_PRECISION
    P, Q = convergent_table(cf.digits)
    rows = []
    if isinstance(x, RationalSpec):
        xv = Fraction(x.p, x.q)
        for n, a in enumerate(cf.digits, 1):
            p, q = P[n + 1], Q[n + 1]
            err = abs(xv - Fraction(p, q))
            t = math.inf if err == 0 else LOG2 - math.log(err)
            rows.append([n, a, p, q, float(q * q * err), t])
    else:
        try:
            thetas = convergent_thetas(x, len(cf.digits))
        except PrecisionExhausted:
            thetas = [math.nan] * len(cf.digits)
        for n, a in enumerate(cf.digits, 1):
            p, q = P[n + 1], Q[n + 1]
            try:
                t = depth_parameter(x, (p, q))
            except PrecisionExhausted:
                t = math.nan
            rows.append([n, a, p, q, thetas[n - 1], t])
    header = ["n", "a_n", "p_n", "q_n", "theta_n", "t_n"]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    if cf.terminated:
        print("# terminated: expansion is finite")
    if out_dir is not None:
        write_csv(out_dir / "expand.csv", header, rows)
    return EXIT_OK


def run_experiment(cfg: ExperimentConfig, recalibrate: bool = False) -> tuple[ReportBundle, dict, int]:
    """Run a multi-sample command; returns the bundle, CSV tables and the exit code."""
    start = time.perf_counter()
    worker = _zonal_sample if cfg.command == "zonal" else _series_sample
    samples = map_samples(worker, cfg)
    errors = [s for s in samples if "error" in s]
    good = [s for s in samples if "error" not in s]
    flagged = [s for s in good if not s.get("generic", True)]
    good = [s for s in good if s.get("generic", True)]
    tables: dict[str, tuple[list, list]] = {}
    notes = [f"{s['spec']}: non-generic: a.e. targets do not apply" for s in flagged]
    pooled, checks = {}, []
    cmd = cfg.command
    if good:
        if cmd == "rates":
            by_kind, pooled, checks = pooled_rates(cfg, good)
            hdr = ["k", "n_events", "empirical", "predicted", "rel_err"]
            tables["rates_all.csv"] = (hdr, by_kind[ALL])
            tables["rates_approximating.csv"] = (hdr, by_kind[APPROXIMATING])
            tables["rates_samples.csv"] = (
                ["sample", "spec", "kind", "k", "n_events", "empirical", "predicted"],
                [[s["index"], s["spec"], *r] for s in good for r in s["rates"]],
            )
        elif cmd == "stats":
            rows, cdf_rows, pooled, checks = pooled_stats(cfg, good)
            tables["stats.csv"] = (
                ["quantity", "kind", "k", "n_events", "empirical", "stderr", "predicted", "rel_err"],
                rows,
            )
            tables["depth_cdf.csv"] = (
                ["x", "empirical_all", "reference_all", "empirical_approximating", "reference_approximating"],
                cdf_rows,
            )
        elif cmd == "levy":
            rows, trace_rows, pooled, checks = pooled_levy(cfg, good)
            tables["levy.csv"] = (["kind", "expression", "empirical", "stderr", "predicted", "rel_err"], rows)
            tables["levy_trace.csv"] = (["n", "convergents_log_q_rate", "n_convergents_log_q_rate"], trace_rows)
            tables["levy_samples.csv"] = (
                ["sample", "spec", "kind", "n", "log_q_rate", "dist_rate"],
                [
                    [s["index"], s["spec"], name, v["n"], v["log_q_rate"], v["dist_rate"]]
                    for s in good
                    for name, v in s["levy"].items()
                ],
            )
        elif cmd == "loglaw":
            pooled, checks, extra = pooled_loglaw(cfg, good, recalibrate)
            notes += extra
            keys = [
                "max_digit_ratio",
                "theta_tail_sup",
                "digit_tail_sup",
                "stated_bound_failures",
                "proven_bound_failures",
                "max_gap",
            ]
            tables["loglaw.csv"] = (
                ["sample", "spec", *keys],
                [[s["index"], s["spec"], *(s["loglaw"][k] for k in keys)] for s in good],
            )
        elif cmd == "zonal":
            target = hecke_levy_target(cfg.q)
            for expr in ("log_q_rate", "dist_rate"):
                m, se = mean_stderr(s["levy"][expr] for s in good)
                pooled[f"{expr}[q={cfg.q}]"] = {"mean": m, "stderr": se, "predicted": target}
            checks.append(
                check(
                    f"Hecke q={cfg.q} log q_n/n",
                    pooled[f"log_q_rate[q={cfg.q}]"]["mean"],
                    target,
                    cfg.tolerance("hecke_levy_rel"),
                    True,
                )
            )
            rows = [[s["index"], s["spec"], s["levy"]["n"], s["levy"]["log_q_rate"], s["levy"]["dist_rate"]] for s in good]
            hdr = ["sample", "spec", "n", "log_q_rate", "dist_rate"]
            if cfg.q == 3:
                hdr += ["n_geometric", "leading_zero", "match"]
                for r, s in zip(rows, good):
                    c = s["cross_check"]
                    r += [c["n_geometric"], c["leading_zero"], c["match"]]
            tables["zonal.csv"] = (hdr, rows)
    schema = ZONAL_SCHEMA if cmd == "zonal" else REPORT_SCHEMA
    bundle = ReportBundle(
        schema=schema,
        version=__version__,
        config=json.loads(cfg.to_json()),
        samples=samples,
        pooled=pooled,
        checks=checks,
        wall_clock_s=time.perf_counter() - start,
        notes=notes,
    )
    if errors:
        code = max(s["error"][0] for s in errors)
    elif not good:
        code = EXIT_DOMAIN
    elif cmd == "zonal" and cfg.q == 3 and not all(s["cross_check"]["match"] for s in good):
        code = EXIT_ORACLE
    elif not bundle.passed:
        code = EXIT_TOLERANCE
    else:
        code = EXIT_OK
    return bundle, tables, code


def write_outputs(out_dir: Path, bundle: ReportBundle, tables: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (hdr, rows) in tables.items():
        write_csv(out_dir / name, hdr, rows)
    (out_dir / "report.json").write_text(bundle.to_json(), encoding="utf-8")


def format_check(c: dict) -> str:
    tgt = c["target"]
    tgt = "[" + ", ".join(fmt(v) for v in tgt) + "]" if isinstance(tgt, list) else fmt(tgt)
    kind = "rel" if c["relative"] else "abs"
    return f"{c['name']}: {fmt(c['value'])} vs {tgt} ({kind} err {fmt(c['error'])}, tol {fmt(c['tolerance'])})"


def print_summary(cfg: ExperimentConfig, bundle: ReportBundle, code: int) -> None:
    for s in bundle.samples:
        if "error" in s:
            print(f"sample {s['index']} ({s['spec'][:40]}): {s['error'][1]}")
    for n in bundle.notes:
        print(f"note: {n}")
    if cfg.command == "zonal" and cfg.q == 3 and bundle.samples:
        ok = all(s.get("cross_check", {}).get("match", False) for s in bundle.samples)
        print(f"oracle match: {'PASS' if ok else 'FAIL'}")
    for c in bundle.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {format_check(c)}")
    for key, v in bundle.pooled.items():
        if "stderr" in v:
            print(f"pooled {key}: {fmt(v['mean'])} +- {fmt(v['stderr'])}")
    print(f"exit {code}")


# ------------------------------------------------------------ argv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cusp-lab", description="Cusp excursions and continued fractions lab.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file mirroring the experiment configuration")
    ap.add_argument("--x", action="append", help="real spec (repeatable): rat:P/Q, quad:A,B,C, dec:0.d..., rand:SEED:DIGITS")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--digits", type=int)
    ap.add_argument("--terms", type=int)
    ap.add_argument("--k", help="comma-separated k grid inside (0, 2]")
    ap.add_argument("--hmin", type=float)
    ap.add_argument("--q", type=int)
    ap.add_argument("--gamma-count", type=int, dest="gamma_count")
    ap.add_argument("--out", help="output directory for CSV and report.json")
    ap.add_argument("--jobs", type=int, help="worker processes (default $CUSP_LAB_JOBS or 1)")
    ap.add_argument("--burn-in", type=int, dest="burn_in")
    ap.add_argument("--recalibrate", action="store_true", help="loglaw: rewrite the stored regression band")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    data["command"] = args.command
    for name in ("seed", "samples", "digits", "terms", "hmin", "q", "gamma_count", "out", "burn_in"):
        v = getattr(args, name)
        if v is not None:
            data[name] = v
    if args.x:
        data["x"] = args.x
    if args.k:
        try:
            data["k"] = [float(v) for v in args.k.split(",")]
        except ValueError:
            raise DomainError(f"bad k grid {args.k!r}") from None
    if args.jobs is not None:
        data["jobs"] = args.jobs
    elif "jobs" not in data and os.environ.get("CUSP_LAB_JOBS"):
        data["jobs"] = int(os.environ["CUSP_LAB_JOBS"])
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (CuspLabError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out_dir = Path(cfg.out) if cfg.out else None
    try:
        if cfg.command == "expand":
            return cmd_expand(cfg, out_dir)
        bundle, tables, code = run_experiment(cfg, recalibrate=args.recalibrate)
    except CuspLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return error_code(exc)
    if out_dir is not None:
        write_outputs(out_dir, bundle, tables)
    print_summary(cfg, bundle, code)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
