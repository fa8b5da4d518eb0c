"""Validators for general graphs: AMFM, kernels, almost-maximal and restricted matchings."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from .core import ValidationReport, exhaustive_max_matching, hopcroft_karp, max_matching_oracle
from .errors import CapabilityError, InputError, ParameterError
from .fixedpoint import ONE, as_fraction, ceil_grid, floor_grid, to_fraction
from .graph import DynGraph, FracVector, Matching, is_matching

EXACT_COVER_VERTEX_LIMIT = 20


def _max_incident(x: FracVector, G: DynGraph) -> list[int]:
    top = [0] * G.n
    for e, w in x.items():
        for v in G.endpoints(e):
            if w > top[v]:
                top[v] = w
    return top


def validate_amfm(x: FracVector, G: DynGraph, eps, delta) -> ValidationReport:
    """Every edge is heavy or has a near-saturated endpoint with only light edges."""
    eps, delta = as_fraction(eps), as_fraction(delta)
    heavy = ceil_grid(delta)
    light = floor_grid(delta)
    full = ceil_grid(1 - eps)
    top = _max_incident(x, G)
    good = [x.load(v) >= full and top[v] <= light for v in range(G.n)]
    rep = ValidationReport(info={"eps": str(eps), "delta": str(delta)})
    for e, (u, v) in G.edge_pairs():
        if x.get(e) >= heavy or good[u] or good[v]:
            continue
        rep.violations.append({"edge": e, "endpoints": [u, v], "value": str(to_fraction(x.get(e)))})
    return rep


def amfm_kernel_check(x: FracVector, G: DynGraph, eps, delta) -> ValidationReport:
    """Check that (V, supp(x)) is an (eps, 1/delta)-kernel."""
    eps, delta = as_fraction(eps), as_fraction(delta)
    if len(x) and to_fraction(x.min_weight()) < delta:
        raise ParameterError(f"x_min = {to_fraction(x.min_weight())} below delta = {delta}")
    d = 1 / delta
    deg = [0] * G.n
    for e in x.support():
        for v in G.endpoints(e):
            deg[v] += 1
    rep = ValidationReport(info={"d": str(d), "max_kernel_degree": max(deg, default=0)})
    for v in range(G.n):
        if deg[v] > d:
            rep.violations.append({"property": 1, "vertex": v, "degree": deg[v]})
    need = d * (1 - eps)
    for e, (u, v) in G.edge_pairs():
        if e in x:
            continue
        if max(deg[u], deg[v]) < need:
            rep.violations.append({"property": 2, "edge": e, "endpoints": [u, v]})
    return rep


@dataclass
class AmmResult:
    status: str  # proved-yes, proved-no, inconclusive
    cover: Optional[list] = None
    info: dict = field(default_factory=dict)


def _greedy_matching(G: DynGraph, edges: Iterable[int]) -> list[int]:
    used = set()
    out = []
    for e in edges:
        u, v = G.endpoints(e)
        if u not in used and v not in used:
            used.update((u, v))
            out.append(e)
    return out


def _min_vertex_cover(G: DynGraph, edges: list[int]) -> list[int]:
    verts = sorted({w for e in edges for w in G.endpoints(e)})
    pairs = [G.endpoints(e) for e in edges]
    for size in range(len(verts) + 1):
        for cand in combinations(verts, size):
            s = set(cand)
            if all(u in s or v in s for u, v in pairs):
                return list(cand)
    return verts


def validate_amm(M: Iterable[int], G: DynGraph, eps, mu: Optional[int] = None) -> AmmResult:
    """Decide whether M is maximal after removing at most eps * mu(G) vertices."""
    eps = as_fraction(eps)
    M = list(M)
    if not is_matching(G, M):
        raise InputError("M is not a matching")
    if mu is None:
        mu = len(max_matching_oracle(G))
    budget = eps * mu
    matched = {w for e in M for w in G.endpoints(e)}
    H = [e for e, (u, v) in G.edge_pairs() if u not in matched and v not in matched]
    info = {"mu": mu, "budget": str(budget), "residual_edges": len(H)}
    if not H:
        return AmmResult("proved-yes", [], info)
    greedy = _greedy_matching(G, H)
    info["nu_lower"] = len(greedy)
    if len(greedy) > budget:
        return AmmResult("proved-no", None, info)
    if 2 * len(greedy) <= budget:
        return AmmResult("proved-yes", sorted({w for e in greedy for w in G.endpoints(e)}), info)
    if G.two_coloring() is not None:
        nu = hopcroft_karp(G, edges=H)
        info["nu"] = len(nu)
        # bipartite: minimum cover size equals maximum matching size
        if len(nu) <= budget:
            return AmmResult("proved-yes", None, info)
        return AmmResult("proved-no", None, info)
    verts = {w for e in H for w in G.endpoints(e)}
    if len(verts) <= EXACT_COVER_VERTEX_LIMIT:
        cover = _min_vertex_cover(G, H)
        info["min_cover"] = len(cover)
        return AmmResult("proved-yes" if len(cover) <= budget else "proved-no", cover, info)
    return AmmResult("inconclusive", None, info)


def small_mu_maximal_matching(G: DynGraph, U: Iterable[int]) -> Matching:
    """Maximal matching when U is a vertex cover: match inside U, then extend from U."""
    U = sorted(set(U))
    inU = set(U)
    for e, (u, v) in G.edge_pairs():
        if u not in inU and v not in inU:
            raise InputError(f"U does not cover edge {e} = ({u}, {v})")
    M = Matching(G)
    for u in U:
        if u in M.mate:
            continue
        for e in G.incident(u):
            a, b = G.endpoints(e)
            w = b if a == u else a
            if w in inU and w not in M.mate:
                M.add(e)
                break
    for u in U:
        if u in M.mate:
            continue
        # at most |matched| neighbours can be taken, so this scan is short
        for e in G.incident(u):
            a, b = G.endpoints(e)
            w = b if a == u else a
            if w not in M.mate:
                M.add(e)
                break
    return M


def is_maximal(G: DynGraph, M: Matching) -> bool:
    return all(u in M.mate or v in M.mate for _, (u, v) in G.edge_pairs())


def validate_restricted(x: FracVector, eps) -> ValidationReport:
    eps = as_fraction(eps)
    cap = floor_grid(eps)
    rep = ValidationReport(info={"eps": str(eps)})
    for e, w in x.items():
        if w > cap and w != ONE:
            rep.violations.append({"edge": e, "value": str(to_fraction(w))})
    return rep
