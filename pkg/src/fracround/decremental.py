"""Decremental matching: phases of a robust fractional matching, rounded dynamically."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import hopcroft_karp
from .errors import InvariantViolation, RegimeError
from .fixedpoint import ONE, as_fraction
from .graph import DynGraph, FracVector
from .rounder import DynamicRounder


class ReferenceFractional:
    """Phase oracle: x is the indicator of a maximum matching of the live graph."""

    def __init__(self, G: DynGraph, eps, alive=None):
        self.G = G
        self.eps = as_fraction(eps)
        self.alive = set(G.edges()) if alive is None else alive
        self.phases = 0
        self.start()

    def start(self):
        M = hopcroft_karp(self.G, edges=self.alive)
        self.x = FracVector(self.G, {e: ONE for e in M.edges})
        self.mu_start = len(M)
        self.value_remaining = self.mu_start
        self.phases += 1
        return self.x

    def delete(self, e):
        if self.x.get(e):
            self.value_remaining -= 1

    def update(self, e, w):
        if w != 0:
            raise RegimeError("reference oracle supports deletions only")
        self.delete(e)

    def phase_ended(self) -> bool:
        return self.value_remaining < (1 - self.eps) * self.mu_start


class MuTracker:
    """Exact mu(G) under deletions by re-augmenting the previous maximum matching."""

    def __init__(self, G: DynGraph, alive: set):
        self.G = G
        self.alive = alive
        self.M = set(hopcroft_karp(G, edges=alive).edges)

    def delete(self, e):
        if e in self.M:
            self.M.discard(e)
            self.M = set(hopcroft_karp(self.G, initial=self.M, edges=self.alive).edges)

    @property
    def mu(self) -> int:
        return len(self.M)


@dataclass
class DecrementalResult:
    rows: list = field(default_factory=list)
    violations: int = 0
    phases: int = 0
    recourse: int = 0
    init_edges: int = 0


def decremental_run(G: DynGraph, deletions, eps, verify=True, rounder_eps=None) -> DecrementalResult:
    """Run a full deletion sequence; rows are (step, phase, mu, matching, recourse_cum)."""
    eps = as_fraction(eps)
    inner_eps = eps / 2 if rounder_eps is None else as_fraction(rounder_eps)
    alive = set(G.edges())
    frac = ReferenceFractional(G, eps, alive)
    tracker = MuTracker(G, alive)
    rounder = DynamicRounder(G, frac.x, inner_eps, 1)
    res = DecrementalResult(init_edges=len(frac.x))
    recourse = 0
    res.rows.append((0, frac.phases, tracker.mu, rounder.matching_size(), 0))
    for step, e in enumerate(deletions, 1):
        if isinstance(e, tuple):
            e, w = e
            if w != 0:
                raise RegimeError(f"step {step}: non-deletion update")
        if e not in alive:
            raise RegimeError(f"step {step}: edge {e} already deleted")
        alive.discard(e)
        tracker.delete(e)
        frac.delete(e)
        if frac.phase_ended():
            old = rounder.matching
            x = frac.start()
            rounder = DynamicRounder(G, x, inner_eps, 1)
            res.init_edges += len(x)
            recourse += len(old ^ rounder.matching)
        else:
            recourse += len(rounder.update(e, 0))
        res.rows.append((step, frac.phases, tracker.mu, rounder.matching_size(), recourse))
        if verify:
            M = rounder.matching
            bad = []
            if any(f not in alive for f in M):
                bad.append("matching uses a deleted edge")
            if len(M) < (1 - 2 * eps) * tracker.mu:
                bad.append(f"|M| = {len(M)} below (1-2eps) mu = {float((1 - 2 * eps) * tracker.mu):.4g}")
            if frac.value_remaining < (1 - eps) * tracker.mu:
                bad.append("fractional value below (1-eps) mu")
            if bad:
                res.violations += 1
                raise InvariantViolation("; ".join(bad), state={
                    "step": step, "phase": frac.phases, "mu": tracker.mu,
                    "matching": sorted(M), "rounder": rounder.snapshot()})
    res.phases = frac.phases
    res.recourse = recourse
    return res
