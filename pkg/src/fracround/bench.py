"""Benchmark runs: metrics rows plus a JSON-friendly summary."""
from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .core import truncate, validate_fractional
from .decremental import decremental_run
from .dynamic import DEFAULT_DELTA, Pipeline
from .errors import InputError, InvariantViolation
from .fixedpoint import ONE, as_fraction, to_fraction
from .rounder import DynamicRounder, static_round
from .sampler import SetSampler
from .streams import UpdateStream

SCHEMA_VERSION = 1


@dataclass
class RunMetrics:
    command: str
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# fracround-metrics v{SCHEMA_VERSION} {self.command}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "command": self.command, "summary": self.summary,
                "columns": self.columns, "rows": self.rows}


def _num(q) -> str:
    q = Fraction(q)
    return f"{float(q):.10g}"


def run_round_static(g, x, eps) -> RunMetrics:
    eps = as_fraction(eps)
    rep = validate_fractional(x, g)
    if not rep.ok:
        raise InputError(f"input is not a fractional matching: {rep.violations[:3]}")
    xt, levels = truncate(x, eps)
    M = static_round(g, x, eps)
    summary = {
        "eps": str(eps), "norm": _num(x.norm_fraction()), "norm_truncated": _num(xt.norm_fraction()),
        "levels": levels, "matching_size": len(M),
        "bound": _num((1 - eps) * xt.norm_fraction()),
        "ok": len(M) >= (1 - eps) * xt.norm_fraction(),
        "matching": sorted(g.endpoints(e) for e in M),
    }
    rows = [list(g.endpoints(e)) for e in sorted(M, key=g.endpoints)]
    return RunMetrics("round-static", ["u", "v"], rows, summary)


def _timed_replay(make, events, apply, repeats):
    times = []
    for _ in range(repeats):
        obj = make()
        t0 = time.perf_counter()
        for e, w in events:
            apply(obj, e, w)
        times.append((time.perf_counter() - t0) / max(1, len(events)))
    return statistics.median(times)


def run_round_dyn(stream: UpdateStream, eps, delta=None, mode="fast", timing_repeats=0) -> RunMetrics:
    eps = as_fraction(eps)
    verify = mode == "slow"
    r = DynamicRounder(stream.graph, stream.initial, eps, delta, verify=verify)
    rows = []
    violations = 0
    for step, (e, w) in enumerate(stream.events, 1):
        r.update(e, w)
        ok = len(r.matching) >= (1 - 2 * eps) * r.x.norm_fraction()
        violations += not ok
        rows.append([step, _num(r.x.norm_fraction()), r.matching_size(), r.recourse])
    steps = max(1, len(stream.events))
    L = r.L
    summary = {
        "eps": str(eps), "delta": str(r.delta), "levels": L, "steps": len(stream.events),
        "mode": mode, "violations": violations, "recourse": r.recourse,
        "amortized_recourse": r.recourse / steps,
        "recourse_floor": float(Fraction(1, 2) / eps),
        "recourse_ceiling": float(10 * L * L / eps),
        "rebuild_calls": r.rebuild_calls,
        "meta": stream.meta,
    }
    if timing_repeats:
        summary["median_update_seconds"] = _timed_replay(
            lambda: DynamicRounder(stream.graph, stream.initial, eps, delta), stream.events,
            lambda o, e, w: o.update(e, w), timing_repeats)
    return RunMetrics("round-dyn", ["step", "norm", "matching", "recourse_cum"], rows, summary)


def run_pipeline(stream: UpdateStream, eps="1/10", backend="det", delta=None, mode="fast", seed=0,
                 timing_repeats=0) -> RunMetrics:
    eps = as_fraction(eps)
    delta = DEFAULT_DELTA if delta is None else as_fraction(delta)
    verify = mode == "slow"
    P = Pipeline(stream.graph, stream.initial, eps, delta, backend=backend, seed=seed, verify=verify)
    rows = []
    worst = Fraction(0)
    for step, (e, w) in enumerate(stream.events, 1):
        P.update(e, w)
        norm = P.x.norm_fraction()
        size = len(P.matching)
        if norm:
            worst = max(worst, (1 - size / norm) / (eps + delta))
        rows.append([step, _num(norm), size, P.recourse])
    summary = {
        "eps": str(eps), "delta": str(delta), "backend": backend, "mode": mode,
        "steps": len(stream.events), "worst_c": float(worst), "target_c": 40,
        "reinits": P.reinits, "recourse": P.recourse, "meta": stream.meta,
    }
    if timing_repeats:
        summary["median_update_seconds"] = _timed_replay(
            lambda: Pipeline(stream.graph, stream.initial, eps, delta, backend=backend, seed=seed),
            stream.events, lambda o, e, w: o.update(e, w), timing_repeats)
    return RunMetrics("pipeline", ["step", "norm", "matching", "recourse_cum"], rows, summary)


def run_decremental(stream: UpdateStream, eps, mode="slow") -> RunMetrics:
    eps = as_fraction(eps)
    res = decremental_run(stream.graph, stream.events, eps, verify=mode == "slow")
    summary = {"eps": str(eps), "mode": mode, "phases": res.phases, "recourse": res.recourse,
               "violations": res.violations, "steps": len(stream.events), "init_edges": res.init_edges}
    return RunMetrics("decremental", ["step", "phase", "mu", "matching", "recourse_cum"],
                      [list(r) for r in res.rows], summary)


def run_sampler_test(n=20, p=0.5, samples=100_000, seed=0) -> RunMetrics:
    s = SetSampler(n, [p] * n, seed=seed)
    counts = [0] * n
    total = 0
    for _ in range(samples):
        out = s.sample()
        total += len(out)
        for i in out:
            counts[i] += 1
    freq = [c / samples for c in counts]
    expected = p * samples
    chi2 = sum((c - expected) ** 2 / expected for c in counts) if expected else 0.0
    summary = {
        "n": n, "p": p, "samples": samples, "seed": seed,
        "max_abs_deviation": max(abs(f - p) for f in freq),
        "chi_square_marginal": chi2,
        "ops_per_call": s.ops / max(1, samples + n),
        "mean_output_size": total / samples,
    }
    rows = [[i, counts[i], f"{freq[i]:.6f}"] for i in range(n)]
    return RunMetrics("sampler-test", ["element", "count", "frequency"], rows, summary)
