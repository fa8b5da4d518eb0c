"""Update streams and their generators."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParameterError, PromiseViolation
from .fixedpoint import ONE, as_fraction, ceil_grid, floor_grid
from .graph import DynGraph, FracVector

KINDS = ("random-bip", "recourse-path", "decremental", "heavy-light")


@dataclass
class UpdateStream:
    graph: DynGraph
    initial: FracVector
    events: list = field(default_factory=list)  # (edge id, grid value)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.events)

    def replay(self, delta=None, check_matching=True):
        """Yield the vector after each event, checking the declared promises."""
        x = self.initial.copy()
        floor_w = 0 if delta is None else ceil_grid(as_fraction(delta))
        for step, (e, w) in enumerate(self.events):
            if 0 < w < floor_w:
                raise PromiseViolation(f"step {step}: edge {e} below the delta floor")
            x.set(e, w)
            if check_matching:
                for v in x.graph.endpoints(e):
                    if x.load(v) > ONE:
                        raise PromiseViolation(f"step {step}: vertex {v} overloaded")
            yield x


def random_bipartite_graph(rng: random.Random, n: int, p: float) -> DynGraph:
    half = n // 2
    side = [0] * half + [1] * (n - half)
    g = DynGraph(n, side)
    for u in range(half):
        for v in range(half, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


def _cap(x: FracVector, e: int) -> int:
    u, v = x.graph.endpoints(e)
    cur = x.get(e)
    return min(ONE - x.load(u) + cur, ONE - x.load(v) + cur)


def _draw(rng: random.Random, lo: int, hi: int, grain: int) -> int:
    """Random multiple of grain in [lo, hi], or 0 if none exists."""
    a = -(-lo // grain)
    b = hi // grain
    if b < a or b <= 0:
        return 0
    return rng.randint(max(a, 1), b) * grain


def random_fractional_matching(rng, g: DynGraph, delta: Fraction, fill=0.7, grain=None) -> FracVector:
    """Random fractional matching with every nonzero entry >= delta."""
    grain = grain or max(1, floor_grid(delta) // 4)
    dw = ceil_grid(delta)
    x = FracVector(g)
    edges = list(g.edges())
    rng.shuffle(edges)
    for e in edges:
        if rng.random() > fill:
            continue
        cap = _cap(x, e)
        if cap < dw:
            continue
        hi = cap if rng.random() < 0.3 else max(dw, cap // 2)
        x.set(e, _draw(rng, dw, hi, grain))
    return x


def gen_random_bip(seed, n=30, p=0.3, steps=1000, delta="1/256", p_delete=0.3, grain=None):
    rng = random.Random(seed)
    delta = as_fraction(delta)
    g = random_bipartite_graph(rng, n, p)
    x = random_fractional_matching(rng, g, delta, grain=grain)
    dw = ceil_grid(delta)
    grain = grain or max(1, floor_grid(delta) // 4)
    cur = x.copy()
    events = []
    edges = list(g.edges())
    if edges:
        for _ in range(steps):
            e = rng.choice(edges)
            if cur.get(e) and rng.random() < p_delete:
                w = 0
            else:
                cap = _cap(cur, e)
                w = _draw(rng, dw, cap, grain) if cap >= dw else 0
            cur.set(e, w)
            events.append((e, w))
    meta = {"kind": "random-bip", "seed": seed, "n": n, "delta": str(delta)}
    return UpdateStream(g, x, events, meta)


def gen_recourse_path(eps, steps=None, seed=0):
    """Path of 4/eps + 2 edges at value 1/2; toggles the two end edges."""
    eps = as_fraction(eps)
    if eps <= 0 or (1 / eps).denominator != 1:
        raise ParameterError("recourse-path needs eps = 1/k")
    length = int(4 / eps) + 2
    n = length + 1
    g = DynGraph(n, [v % 2 for v in range(n)])
    for v in range(length):
        g.add_edge(v, v + 1)
    half = ONE // 2
    x = FracVector(g, {e: half for e in g.edges()})
    first, last = g.edge_id(0, 1), g.edge_id(length - 1, length)
    cycle = [(first, 0), (last, 0), (first, half), (last, half)]
    steps = steps if steps is not None else 40 * length
    events = [cycle[k % 4] for k in range(steps)]
    meta = {"kind": "recourse-path", "seed": seed, "n": n, "eps": str(eps)}
    return UpdateStream(g, x, events, meta)


def gen_decremental(seed, n=40, p=0.15):
    rng = random.Random(seed)
    g = random_bipartite_graph(rng, n, p)
    edges = list(g.edges())
    rng.shuffle(edges)
    meta = {"kind": "decremental", "seed": seed, "n": n}
    return UpdateStream(g, FracVector(g), [(e, 0) for e in edges], meta)


def gen_heavy_light(seed, n=30, p=0.3, steps=1000, delta="1/1024", light_floor=None):
    """Values jump between light (< 2 delta, arbitrary bits) and heavy (> 2 delta)."""
    rng = random.Random(seed)
    delta = as_fraction(delta)
    g = random_bipartite_graph(rng, n, p)
    two = floor_grid(2 * delta)
    lo = ceil_grid(as_fraction(light_floor)) if light_floor is not None else max(1, two >> 12)
    x = FracVector(g)
    edges = list(g.edges())

    def pick(e, cur):
        cap = _cap(cur, e)
        if rng.random() < 0.5:
            hi = min(cap, two - 1)
            return rng.randint(lo, hi) if hi >= lo else 0
        hi = min(cap, ONE // 2)
        return _draw(rng, two + 1, hi, max(1, two // 8)) if hi > two else 0

    order = list(edges)
    rng.shuffle(order)
    for e in order:
        if rng.random() < 0.7:
            x.set(e, pick(e, x))
    cur = x.copy()
    events = []
    if edges:
        for _ in range(steps):
            e = rng.choice(edges)
            w = 0 if (cur.get(e) and rng.random() < 0.25) else pick(e, cur)
            cur.set(e, w)
            events.append((e, w))
    meta = {"kind": "heavy-light", "seed": seed, "n": n, "delta": str(delta)}
    return UpdateStream(g, x, events, meta)


def gen_stream(kind: str, seed=0, **params) -> UpdateStream:
    if kind == "random-bip":
        return gen_random_bip(seed, **params)
    if kind == "recourse-path":
        return gen_recourse_path(seed=seed, **params)
    if kind == "decremental":
        return gen_decremental(seed, **params)
    if kind == "heavy-light":
        return gen_heavy_light(seed, **params)
    raise ParameterError(f"unknown stream kind {kind!r}; expected one of {KINDS}")
