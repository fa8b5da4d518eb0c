"""Command-line harness."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench, io as fio
from .errors import FracRoundError, InvariantViolation
from .streams import KINDS, gen_stream

SEED_ENV = "FRACROUND_SEED"


def _seed_default() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _emit(metrics: bench.RunMetrics, args):
    if args.format == "json":
        text = json.dumps(metrics.to_json(), indent=2, sort_keys=True) + "\n"
    else:
        text = metrics.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(metrics.summary, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _load(args, with_stream=True):
    g, x, rounded = fio.read_graph(args.graph)
    if rounded:
        print(f"note: {len(rounded)} weights rounded to the 2^-52 grid", file=sys.stderr)
    if not with_stream:
        return g, x
    return fio.read_stream(args.stream, g, x)


def cmd_round_static(args):
    g, x = _load(args, with_stream=False)
    return bench.run_round_static(g, x, args.eps)


def cmd_round_dyn(args):
    s = _load(args)
    delta = args.delta if args.delta is not None else s.meta.get("delta")
    return bench.run_round_dyn(s, args.eps, delta, args.mode, args.timing)


def cmd_pipeline(args):
    s = _load(args)
    return bench.run_pipeline(s, args.eps, args.backend, args.delta, args.mode, args.seed, args.timing)


def cmd_decremental(args):
    s = _load(args)
    return bench.run_decremental(s, args.eps, args.mode)


def cmd_gen(args):
    params = {}
    if args.kind == "recourse-path":
        params["eps"] = args.eps
        if args.steps is not None:
            params["steps"] = args.steps
    else:
        params["n"] = args.n
        if args.p is not None:
            params["p"] = args.p
        if args.kind in ("random-bip", "heavy-light"):
            if args.steps is not None:
                params["steps"] = args.steps
            if args.delta is not None:
                params["delta"] = args.delta
    s = gen_stream(args.kind, args.seed, **params)
    graph_text = fio.format_graph(s.graph, s.initial)
    if args.graph_out:
        with open(args.graph_out, "w") as fh:
            fh.write(graph_text)
    else:
        sys.stdout.write(graph_text)
    stream_text = fio.format_stream(s)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(stream_text)
    else:
        sys.stdout.write(stream_text)
    return None


def cmd_sampler_test(args):
    return bench.run_sampler_test(args.n, args.p, args.samples, args.seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracround", description="Dynamic rounding of fractional matchings")
    sub = p.add_subparsers(dest="command", required=True)

    def outputs(sp):
        sp.add_argument("--out", help="write metrics here instead of stdout")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--summary", help="also write the JSON summary to this path")

    sp = sub.add_parser("round-static", help="round a fractional matching once")
    sp.add_argument("graph")
    sp.add_argument("--eps", default="1/10")
    outputs(sp)
    sp.set_defaults(func=cmd_round_static)

    sp = sub.add_parser("round-dyn", help="dynamic rounding over an update stream")
    sp.add_argument("graph")
    sp.add_argument("stream")
    sp.add_argument("--eps", default="1/10")
    sp.add_argument("--delta", default=None)
    sp.add_argument("--mode", choices=["fast", "slow"], default="fast")
    sp.add_argument("--timing", type=int, default=0, metavar="REPEATS")
    outputs(sp)
    sp.set_defaults(func=cmd_round_dyn)

    sp = sub.add_parser("pipeline", help="coarsen-then-round over an update stream")
    sp.add_argument("graph")
    sp.add_argument("stream")
    sp.add_argument("--backend", choices=["det", "rand", "adaptive"], default="det")
    sp.add_argument("--eps", default="1/10")
    sp.add_argument("--delta", default=None)
    sp.add_argument("--mode", choices=["fast", "slow"], default="fast")
    sp.add_argument("--seed", type=int, default=_seed_default())
    sp.add_argument("--timing", type=int, default=0, metavar="REPEATS")
    outputs(sp)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("decremental", help="decremental matching over a deletion stream")
    sp.add_argument("graph")
    sp.add_argument("stream")
    sp.add_argument("--eps", default="1/10")
    sp.add_argument("--mode", choices=["fast", "slow"], default="slow")
    outputs(sp)
    sp.set_defaults(func=cmd_decremental)

    sp = sub.add_parser("gen", help="generate a graph file and an update stream")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("--seed", type=int, default=_seed_default())
    sp.add_argument("--n", type=int, default=30)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--eps", default="1/4")
    sp.add_argument("--delta", default=None)
    sp.add_argument("--graph-out", help="graph file path (default stdout)")
    sp.add_argument("--out", help="stream file path (default stdout)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("sampler-test", help="Monte Carlo check of the set sampler")
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=_seed_default())
    outputs(sp)
    sp.set_defaults(func=cmd_sampler_test)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        metrics = args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        print(json.dumps(exc.state, indent=2, default=str), file=sys.stderr)
        return 1
    except (FracRoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if metrics is not None:
        _emit(metrics, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
