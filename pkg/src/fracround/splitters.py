"""Static splits of uniform fractional matchings into disjoint coarsenings."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .coarsening import validate_coarsening
from .degree_split import degree_split
from .errors import InputError, ParameterError, StatisticalFailure
from .fixedpoint import ONE, as_fraction, ceil_grid, ceil_log2, to_fraction
from .graph import FracVector


@dataclass
class Split:
    parts: list
    eps: Fraction
    delta: Fraction
    source_size: int
    attempts: int = 1
    info: dict = field(default_factory=dict)

    def covered(self) -> int:
        return sum(len(p) for p in self.parts)

    def disjoint(self) -> bool:
        seen = set()
        for p in self.parts:
            for e in p.support():
                if e in seen:
                    return False
                seen.add(e)
        return True


def _uniform(x: FracVector) -> int:
    lam = x.uniform_weight()
    if lam is None and len(x):
        raise InputError("split needs a uniform vector")
    return lam or 0


def _singletons(x: FracVector, w: int) -> list[FracVector]:
    return [FracVector(x.graph, {e: w}) for e in sorted(x.support())]


def det_split(x: FracVector, eps) -> Split:
    """Deterministic (4 eps, eps)-split covering all of supp(x)."""
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    lam = _uniform(x)
    size = len(x)
    if not size:
        return Split([], 4 * eps, eps, 0)
    n = x.graph.n
    lam_q = to_fraction(lam)
    if lam_q > eps:
        return Split([x.copy()], 4 * eps, eps, size, info={"case": "heavy"})
    if lam_q <= eps * eps / (n * n):
        return Split(_singletons(x, ceil_grid(eps)), 4 * eps, eps, size, info={"case": "tiny"})
    rounds = max(0, ceil_log2(eps / lam_q))
    w = lam << rounds
    if w > ONE:
        raise ParameterError("part weight would exceed 1")
    ends = x.graph.endpoints
    fam = [sorted(x.support())]
    for _ in range(rounds):
        nxt = []
        for part in fam:
            a, b = degree_split([(e, *ends(e)) for e in part])
            if a:
                nxt.append(a)
            if b:
                nxt.append(b)
        fam = nxt
    parts = [FracVector(x.graph, {e: w for e in p}) for p in fam]
    return Split(parts, 4 * eps, eps, size, info={"case": "split", "rounds": rounds})


def rand_split_delta(eps, n) -> Fraction:
    lg = Fraction(math.log2(n)) if n > 1 else Fraction(1)
    return as_fraction(eps) ** 4 / (24 * lg * lg)


def rand_split(x: FracVector, eps, n=None, seed=0, delta=None, attempts=8) -> Split:
    """Randomized (eps, delta)-split: each edge joins one of k parts uniformly."""
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    n = x.graph.n if n is None else n
    delta = rand_split_delta(eps, n) if delta is None else as_fraction(delta)
    lam = _uniform(x)
    size = len(x)
    if not size:
        return Split([], eps, delta, 0)
    lam_q = to_fraction(lam)
    lg = Fraction(math.log2(n)) if n > 1 else Fraction(1)
    if lam_q > delta:
        return Split([x.copy()], eps, delta, size, info={"case": "heavy"})
    if lam_q <= eps / (n * n) or x.norm_fraction() <= eps * eps / lg:
        return Split(_singletons(x, ceil_grid(delta)), eps, delta, size, info={"case": "tiny"})
    k = 1 << max(0, ceil_log2(delta / lam_q))
    w = lam * k
    edges = sorted(x.support())
    for attempt in range(attempts):
        rng = random.Random(seed + attempt)
        groups: dict[int, list[int]] = {}
        for e in edges:
            groups.setdefault(rng.randrange(k), []).append(e)
        parts = [FracVector(x.graph, {e: w for e in groups[j]}) for j in sorted(groups)]
        if all(validate_coarsening(x, p, eps, delta).ok for p in parts):
            return Split(parts, eps, delta, size, attempts=attempt + 1, info={"case": "split", "k": k})
    raise StatisticalFailure(f"rand_split failed validation {attempts} times (seed {seed})")
