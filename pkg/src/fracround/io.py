"""Text formats for graphs with weights and for update streams."""
from __future__ import annotations

from fractions import Fraction
from typing import TextIO

from .errors import InputError
from .fixedpoint import to_fraction, to_weight
from .graph import DynGraph, FracVector
from .streams import UpdateStream


def _fmt(w: int) -> str:
    q = to_fraction(w)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_graph(text: str):
    """Parse `n <count> bipartite|general` plus `e u v weight` lines.

    Returns (graph, vector, rounded) where rounded lists edges whose weight
    was not on the fixed-point grid, with the rounding direction.
    """
    g = None
    pending = []
    rounded = []
    kind = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if g is not None or len(parts) != 3 or parts[2] not in ("bipartite", "general"):
                raise InputError(f"line {lineno}: bad header {raw!r}")
            n = int(parts[1])
            kind = parts[2]
            g = DynGraph(n)
        elif parts[0] == "e":
            if g is None:
                raise InputError(f"line {lineno}: edge before header")
            if len(parts) != 4:
                raise InputError(f"line {lineno}: expected `e u v weight`")
            u, v = int(parts[1]), int(parts[2])
            w, direction = to_weight(parts[3])
            e = g.add_edge(u, v)
            if direction:
                rounded.append({"edge": [u, v], "direction": "up" if direction > 0 else "down"})
            pending.append((e, w))
        else:
            raise InputError(f"line {lineno}: unknown record {parts[0]!r}")
    if g is None:
        raise InputError("missing header line")
    if kind == "bipartite":
        side = g.two_coloring()
        if side is None:
            raise InputError("graph declared bipartite has an odd cycle")
        g.side = side
    x = FracVector(g)
    for e, w in pending:
        x.set(e, w)
    return g, x, rounded


def read_graph(path: str):
    with open(path) as fh:
        return parse_graph(fh.read())


def format_graph(g: DynGraph, x: FracVector) -> str:
    kind = "bipartite" if g.two_coloring() is not None else "general"
    lines = [f"n {g.n} {kind}"]
    for e, (u, v) in sorted(g.edge_pairs(), key=lambda t: t[1]):
        lines.append(f"e {u} {v} {_fmt(x.get(e))}")
    return "\n".join(lines) + "\n"


def parse_stream(text: str, g: DynGraph, x: FracVector) -> UpdateStream:
    """`d u v` deletes, `s u v value` sets a value."""
    events = []
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.startswith("# stream"):
            for tok in raw.split()[2:]:
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "d" and len(parts) == 3:
            u, v = int(parts[1]), int(parts[2])
            e = g.edge_id(u, v)
            if e is None:
                raise InputError(f"line {lineno}: deletion of absent edge ({u}, {v})")
            events.append((e, 0))
        elif parts[0] == "s" and len(parts) == 4:
            u, v = int(parts[1]), int(parts[2])
            e = g.ensure_edge(u, v)
            events.append((e, to_weight(parts[3])[0]))
        else:
            raise InputError(f"line {lineno}: bad stream record {raw!r}")
    return UpdateStream(g, x, events, meta)


def read_stream(path: str, g: DynGraph, x: FracVector) -> UpdateStream:
    with open(path) as fh:
        return parse_stream(fh.read(), g, x)


def format_stream(s: UpdateStream) -> str:
    meta = " ".join(f"{k}={v}" for k, v in s.meta.items())
    lines = [f"# stream {meta}".rstrip()]
    for e, w in s.events:
        u, v = s.graph.endpoints(e)
        lines.append(f"d {u} {v}" if w == 0 else f"s {u} {v} {_fmt(w)}")
    return "\n".join(lines) + "\n"
