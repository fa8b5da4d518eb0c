"""Validation, truncation, distances and exact matching oracles."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import CapabilityError, ParameterError, StructuralError
from .fixedpoint import L_MAX, ONE, as_fraction, ceil_log2, to_fraction
from .graph import DynGraph, FracVector, Matching

EXHAUSTIVE_EDGE_LIMIT = 24


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "info": self.info}


def validate_fractional(x: FracVector, G: DynGraph) -> ValidationReport:
    missing = [e for e in x.support() if not G.has_edge(e)]
    if missing:
        raise StructuralError(f"edges in supp(x) absent from G: {sorted(missing)}")
    report = ValidationReport()
    for v, load in enumerate(x.loads):
        if load > ONE:
            report.violations.append({"vertex": v, "excess": str(to_fraction(load - ONE))})
    return report


def truncate(x: FracVector, eps) -> tuple[FracVector, int]:
    """Drop tiny entries and clear low-order bits.

    Returns the truncated vector and the effective level count L.
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    e3 = eps / 3
    n = max(x.graph.n, 1)
    floor_val = e3 / (n * n)
    y = FracVector(x.graph)
    for e, w in x.items():
        if Fraction(w, ONE) >= floor_val:
            y.set(e, w)
    if not len(y):
        return y, 1
    xmin = to_fraction(y.min_weight())
    levels = 1 + ceil_log2(1 / (e3 * xmin))
    if levels < L_MAX:
        mask = ~((1 << (L_MAX - levels)) - 1)
        for e, w in list(y.items()):
            y.set(e, w & mask)
    return y, min(levels, L_MAX)


def vertex_distance(x: FracVector, y: FracVector, eps) -> Fraction:
    """Sum over vertices of (|x(v) - y(v)| - eps)^+, exactly."""
    eps = as_fraction(eps)
    lx, ly = x.loads, y.loads
    if len(lx) != len(ly):
        raise ParameterError("vectors live on different vertex sets")
    t = eps * ONE
    total = Fraction(0)
    for a, b in zip(lx, ly):
        d = abs(a - b) - t
        if d > 0:
            total += d
    return total / ONE


def _left_vertices(G: DynGraph, color: list[int]) -> list[int]:
    return [v for v in range(G.n) if color[v] == 0]


def hopcroft_karp(G: DynGraph, initial=None, edges=None, stats: Optional[dict] = None) -> Matching:
    """Maximum matching of a bipartite graph, optionally grown from `initial`.

    `edges` restricts the graph to a subset of edge ids.
    """
    color = G.two_coloring()
    if color is None:
        raise CapabilityError("graph is not bipartite")
    allowed = None if edges is None else set(edges)
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for e, (u, v) in G.edge_pairs():
        if allowed is not None and e not in allowed:
            continue
        a, b = (u, v) if color[u] == 0 else (v, u)
        nbrs.setdefault(a, []).append((b, e))
    mate_l: dict[int, int] = {}
    mate_r: dict[int, int] = {}
    if initial is not None:
        for e in initial:
            u, v = G.endpoints(e)
            a, b = (u, v) if color[u] == 0 else (v, u)
            mate_l[a] = e
            mate_r[b] = a
    left = list(nbrs)
    ops = 0
    while True:
        dist: dict[int, Optional[int]] = {}
        queue = deque()
        for u in left:
            if u not in mate_l:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v, _e in nbrs[u]:
                ops += 1
                w = mate_r.get(v)
                if w is None:
                    found = True
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            break
        for root in left:
            if root in mate_l or dist.get(root) != 0:
                continue
            stack = [(root, iter(nbrs[root]))]
            path: list[tuple[int, int, int]] = []
            while stack:
                u, it = stack[-1]
                advanced = False
                for v, e in it:
                    ops += 1
                    w = mate_r.get(v)
                    if w is None:
                        path.append((u, v, e))
                        for a, b, ee in path:
                            mate_l[a] = ee
                            mate_r[b] = a
                        stack = []
                        advanced = True
                        break
                    if w in nbrs and dist.get(w) == dist[u] + 1:
                        path.append((u, v, e))
                        stack.append((w, iter(nbrs[w])))
                        advanced = True
                        break
                if not advanced:
                    dist[u] = None
                    stack.pop()
                    if path:
                        path.pop()
    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + ops
    return Matching(G, mate_l.values())


def exhaustive_max_matching(G: DynGraph, edges=None) -> Matching:
    pool = list(G.edges()) if edges is None else list(edges)
    if len(pool) > EXHAUSTIVE_EDGE_LIMIT:
        raise CapabilityError(
            f"exhaustive search limited to {EXHAUSTIVE_EDGE_LIMIT} edges (got {len(pool)}); "
            "use a bipartite graph for larger instances")
    ends = {e: G.endpoints(e) for e in pool}
    best: list[int] = []

    def search(remaining: list[int], chosen: list[int]):
        nonlocal best
        if len(chosen) + len(remaining) <= len(best):
            return
        if not remaining:
            best = list(chosen)
            return
        u = min(min(ends[e]) for e in remaining)
        at_u = [e for e in remaining if u in ends[e]]
        rest = [e for e in remaining if u not in ends[e]]
        for e in at_u:
            a, b = ends[e]
            other = b if a == u else a
            chosen.append(e)
            search([f for f in rest if other not in ends[f]], chosen)
            chosen.pop()
        search(rest, chosen)

    search(pool, [])
    return Matching(G, best)


def max_matching_oracle(G: DynGraph, edges=None) -> Matching:
    if G.two_coloring() is not None:
        return hopcroft_karp(G, edges=edges)
    return exhaustive_max_matching(G, edges)


def has_augmenting_path(G: DynGraph, M: Matching) -> bool:
    """Bipartite check: is there an alternating path between two free vertices?"""
    color = G.two_coloring()
    if color is None:
        raise CapabilityError("augmenting-path check implemented for bipartite graphs")
    seen = set()
    queue = deque(v for v in range(G.n) if color[v] == 0 and v not in M.mate and G.degree(v))
    seen.update(queue)
    while queue:
        u = queue.popleft()
        for e in G.incident(u):
            a, b = G.endpoints(e)
            v = b if a == u else a
            if v not in M.mate:
                return True
            f = M.mate[v]
            if f == e:
                continue
            c, d = G.endpoints(f)
            w = d if c == v else c
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False
