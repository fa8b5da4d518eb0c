"""Dynamic coarseners and the coarsen-then-round pipeline."""
from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Callable, Optional

from .coarsening import bounded_coarsening, validate_coarsening
from .errors import InputError, InvariantViolation, ParameterError, StatisticalFailure
from .fixedpoint import ONE, as_fraction, ceil_grid, floor_grid, pow2, to_fraction
from .graph import DynGraph, FracVector, is_matching
from .rounder import DynamicRounder
from .sampler import P_MIN, SetSampler
from .splitters import det_split, rand_split, rand_split_delta


class UniformCoarsener:
    """Keeps one part of a static split as output, mirroring deletions.

    Input is a lambda-uniform vector changed only by insertions and deletions.
    The output switches to a fresher part once the active one has lost more
    than an eps/32 fraction of its support, and the split is recomputed after
    |supp(x0)| * eps / 64 updates.
    """

    def __init__(self, G: DynGraph, lam: int, eps, splitter: Callable, sink: Optional[FracVector] = None,
                 edges=()):
        self.G = G
        self.lam = lam
        self.eps = as_fraction(eps)
        self.splitter = splitter
        self.out = sink if sink is not None else FracVector(G)
        self.x = FracVector(G, {e: lam for e in edges})
        self.reinits = 0
        self.switches = 0
        self._init()

    def _init(self):
        if getattr(self, "active", None) is not None:
            for e in self.parts[self.active]:
                self.out.set(e, 0)
        split = self.splitter(self.x)
        self.parts: list[set[int]] = [set(p.support()) for p in split.parts]
        self.part_weight = [p.uniform_weight() for p in split.parts]
        self.size0 = [len(p) for p in self.parts]
        self.deleted = [0] * len(self.parts)
        self.owner = {e: k for k, p in enumerate(self.parts) for e in p}
        self.m0 = len(self.x)
        self.counter = 0
        self.active = 0 if self.parts else None
        if self.active is not None:
            self._show(self.active)
        self.reinits += 1

    def _show(self, k):
        w = self.part_weight[k]
        for e in self.parts[k]:
            self.out.set(e, w)

    def _stale(self, k) -> bool:
        return self.deleted[k] * 32 > self.eps * self.size0[k]

    def insert(self, e):
        if self.x.get(e) not in (0, self.lam):
            raise InputError(f"edge {e} changes the uniform value")
        self.x.set(e, self.lam)
        self._tick()

    def delete(self, e):
        self.x.set(e, 0)
        k = self.owner.pop(e, None)
        if k is not None:
            self.parts[k].discard(e)
            self.deleted[k] += 1
            if k == self.active:
                self.out.set(e, 0)
                if self._stale(k):
                    self._switch()
        self._tick()

    def _switch(self):
        for e in self.parts[self.active]:
            self.out.set(e, 0)
        k = self.active + 1
        while k < len(self.parts) and self._stale(k):
            k += 1
        self.switches += 1
        if k < len(self.parts):
            self.active = k
            self._show(k)
        else:
            self.active = None
            self.counter = self.m0  # force re-init below

    def _tick(self):
        self.counter += 1
        if self.counter * 64 >= self.m0 * self.eps or self.active is None:
            self._init()


def bucket_bounds(phi: Fraction, delta: Fraction, eps: Fraction) -> list[int]:
    """Grid boundaries b_0 < b_1 < ... with b_{i+1} = floor(b_i (1+eps)), last one >= delta."""
    b = [max(1, ceil_grid(phi))]
    top = ceil_grid(delta)
    while b[-1] < top:
        nxt = (b[-1] * (eps.denominator + eps.numerator)) // eps.denominator
        if nxt <= b[-1]:
            raise ParameterError("bucket ratio too fine for the fixed-point grid")
        b.append(min(nxt, top))
    return b


class GeneralCoarsener:
    """Weight-class bucketing with one uniform coarsener per class.

    Entries >= delta pass through, entries below phi = gamma/n^2 are dropped.
    """

    def __init__(self, G: DynGraph, x: FracVector, eps, split="det", split_eps="1/64", seed=0, split_delta=None):
        self.G = G
        self.eps = as_fraction(eps)
        self.kind = split
        self.seed = seed
        split_eps = as_fraction(split_eps)
        n = max(G.n, 2)
        if split == "det":
            self.delta = split_eps
            self.gamma = 4 * split_eps
            self.splitter = lambda y: det_split(y, split_eps)
        elif split == "rand":
            self.delta = as_fraction(split_delta) if split_delta is not None else rand_split_delta(split_eps, n)
            self.gamma = split_eps
            self._split_calls = 0

            def splitter(y):
                self._split_calls += 1
                return rand_split(y, split_eps, n, seed=seed * 1_000_003 + self._split_calls * 8,
                                  delta=self.delta)
            self.splitter = splitter
        else:
            raise ParameterError(f"unknown split kind {split!r}")
        # dropped mass stays <= gamma/2 for any phi <= gamma/n^2; the cap below
        # delta keeps light classes alive when gamma/n^2 would exceed delta
        self.phi = min(self.gamma / (n * n), self.delta / 1024)
        self.bounds = bucket_bounds(self.phi, self.delta, self.eps)
        self.delta_w = ceil_grid(self.delta)
        # per-bucket threshold gamma, B buckets: see decisions for the chain
        B = len(self.bounds) - 1
        self.declared_eps = max(3 * self.eps + 2 * self.gamma, (2 * B + 1) * self.gamma)
        self.declared_delta = self.delta
        self.x = FracVector(G)
        self.out = FracVector(G)
        self.buckets: dict[int, UniformCoarsener] = {}
        members: dict[int, list[int]] = {}
        for e, w in x.items():
            self.x.set(e, w)
            k = self._bucket(w)
            if k == -2:
                self.out.set(e, w)
            elif k >= 0:
                members.setdefault(k, []).append(e)
        for k in sorted(members):
            self.buckets[k] = UniformCoarsener(G, self.bounds[k], self.eps, self.splitter, self.out, members[k])

    def _bucket(self, w: int) -> int:
        """-2 for pass-through, -1 for dropped, else bucket index."""
        if w >= self.delta_w:
            return -2
        if w < self.bounds[0]:
            return -1
        return bisect.bisect_right(self.bounds, w) - 1

    @property
    def declared(self):
        return self.declared_eps, self.declared_delta

    def update(self, e: int, w: int):
        old = self.x.set(e, w)
        a = self._bucket(old) if old else -1
        b = self._bucket(w) if w else -1
        if a == b and a >= 0:
            return
        if a == -2:
            self.out.set(e, 0)
        elif a >= 0:
            self.buckets[a].delete(e)
        if b == -2:
            self.out.set(e, w)
        elif b >= 0:
            uc = self.buckets.get(b)
            if uc is None:
                self.buckets[b] = UniformCoarsener(self.G, self.bounds[b], self.eps, self.splitter, self.out, [e])
            else:
                uc.insert(e)


class AdaptiveCoarsener:
    """Sampler-based coarsening of the part of x at or below eps^3."""

    def __init__(self, G: DynGraph, x: FracVector, eps, accept=None, seed=0, max_attempts=64):
        self.G = G
        self.eps = as_fraction(eps)
        self.delta = self.eps ** 3
        self.accept = 100 * self.eps if accept is None else as_fraction(accept)
        # After u light updates with u * delta < eps * ||x0_light||, norms and
        # loads move by <= eps, the mirrored deletions by <= 2 eps, and
        # ||x0|| <= (1 + 2 eps) ||x_t||; this gives 12 eps + 2 accept for
        # eps <= 1/2 (the looser 30 eps + 2 accept is checked in tests).
        self.declared_eps = 12 * self.eps + 2 * self.accept
        self.declared_delta = self.delta
        self.max_attempts = max_attempts
        self.light_max = floor_grid(self.delta)
        self.sample_w = ceil_grid(self.delta)
        self.index = {e: k for k, e in enumerate(sorted(G.edges()))}
        self.edge_of = sorted(G.edges())
        self.sampler = SetSampler(max(1, len(self.index)), seed=seed)
        self.x = FracVector(G)
        self.out = FracVector(G)
        self.sampled: set[int] = set()
        self.attempts: list[int] = []
        for e, w in x.items():
            self.x.set(e, w)
            if self._light(w):
                self.sampler.set(self.index[e], self._prob(w))
            else:
                self.out.set(e, w)
        self._init()

    @property
    def declared(self):
        return self.declared_eps, self.declared_delta

    def _light(self, w):
        return 0 < w <= self.light_max

    def _prob(self, w) -> float:
        p = float(Fraction(w, ONE) / self.delta)
        return p if p >= P_MIN else 0.0

    def light_part(self) -> FracVector:
        return FracVector(self.G, {e: w for e, w in self.x.items() if self._light(w)})

    def _init(self):
        for e in self.sampled:
            self.out.set(e, 0)
        xl = self.light_part()
        self.light_norm0 = xl.norm
        self.C = Fraction(0)
        for attempt in range(1, self.max_attempts + 1):
            chosen = [self.edge_of[k] for k in self.sampler.sample()]
            trial = FracVector(self.G, {e: self.sample_w for e in chosen if self._light(self.x.get(e))})
            if validate_coarsening(xl, trial, self.accept, self.delta).ok:
                self.sampled = set(trial.support())
                for e in self.sampled:
                    self.out.set(e, self.sample_w)
                self.attempts.append(attempt)
                return
        raise StatisticalFailure(f"adaptive coarsener: {self.max_attempts} resamples rejected")

    def update(self, e: int, w: int):
        old = self.x.set(e, w)
        if old and not self._light(old):
            self.out.set(e, 0)
        if w and not self._light(w):
            self.out.set(e, w)
        if self._light(old) or self._light(w):
            self.sampler.set(self.index[e], self._prob(w) if self._light(w) else 0.0)
            if not self._light(w) and e in self.sampled:
                self.sampled.discard(e)
                if not w:
                    self.out.set(e, 0)
            self.C += self.delta
            if self.C * ONE >= self.light_norm0 * self.eps:
                self._init()


def make_coarsener(kind: str, G: DynGraph, x: FracVector, delta_c, seed=0, eps="1/8", **kw):
    """Backend producing a (declared_eps, delta_c)-coarsening."""
    delta_c = as_fraction(delta_c)
    if kind == "det":
        return GeneralCoarsener(G, x, eps, "det", split_eps=delta_c, seed=seed)
    if kind == "rand":
        split_eps = kw.get("split_eps", Fraction(1, 256))
        return GeneralCoarsener(G, x, eps, "rand", split_eps=split_eps, seed=seed, split_delta=delta_c)
    if kind == "adaptive":
        root = _cube_root(delta_c)
        return AdaptiveCoarsener(G, x, root, accept=kw.get("accept", root), seed=seed)
    raise ParameterError(f"unknown coarsener backend {kind!r}")


def _cube_root(q: Fraction) -> Fraction:
    r = Fraction(round(q.numerator ** (1 / 3)), round(q.denominator ** (1 / 3)))
    if r ** 3 != q:
        raise ParameterError(f"adaptive backend needs delta = eps^3 exactly, got {q}")
    return r


class RefreshCompose:
    """Dynamic composition: an outer coarsener feeds the rounder's coarsening view.

    The inner input y is the outer output at the last refresh, with deletions
    mirrored and heavy values passed through; refresh every eps1*||x||/delta1
    updates.
    """

    def __init__(self, G, x, outer_factory: Callable, k: int, delta_inner=None):
        self.G = G
        self.k = k
        self.eps2 = pow2(-k)
        self.outer_factory = outer_factory
        self.outer = outer_factory(x)
        self.eps1, self.delta1 = self.outer.declared
        if self.delta1 > self.eps2:
            raise ParameterError("outer delta must not exceed the inner eps")
        self.x = x.copy()
        self.delta_inner = as_fraction(delta_inner) if delta_inner is not None else self.delta1
        self.refreshes = 0
        self._refresh()

    @property
    def declared(self):
        # restricted outer output after <= eps1 ||x0|| / delta1 updates, then the
        # inner (2 eps2, eps2) view composed on top
        return 30 * self.eps1 + 2 * self.eps1 + 4 * self.eps2, self.eps2

    def _refresh(self):
        self.y = self.outer.out.copy()
        self.rounder = DynamicRounder(self.G, self.y, self.eps2, self.delta_inner)
        self.counter = 0
        self.budget = self.eps1 * self.x.norm_fraction() / self.delta1
        self.refreshes += 1

    @property
    def out(self) -> FracVector:
        return self.rounder.coarsening_view(self.k)

    def update(self, e, w):
        self.x.set(e, w)
        self.outer.update(e, w)
        heavy = ceil_grid(self.delta1)
        if w >= heavy:
            self.y.set(e, w)
            self.rounder.update(e, w)
        elif e in self.y and (w == 0 or self.y.get(e) >= heavy):
            self.y.set(e, 0)
            self.rounder.update(e, 0)
        self.counter += 1
        if self.counter > self.budget:
            self._refresh()


DEFAULT_DELTA = Fraction(1, 1 << 19)


class Pipeline:
    """Coarsen, bound, scale by alpha, then round with the dynamic rounder."""

    def __init__(self, G: DynGraph, x: FracVector, eps="1/10", delta=DEFAULT_DELTA, backend="det", seed=0,
                 verify=False, coarsener_kw=None):
        self.G = G
        self.eps = as_fraction(eps)
        self.delta = as_fraction(delta)
        self.alpha = 1 / (1 + 3 * (self.eps + 2 * self.delta))
        if self.alpha < Fraction(1, 2):
            raise ParameterError("eps + 2 delta too large: scaling constant below 1/2")
        self.backend = backend
        self.seed = seed
        self.verify = verify
        self.coarsener = make_coarsener(backend, G, x, 2 * self.delta, seed=seed, **(coarsener_kw or {}))
        self.x = x.copy()
        self.two_w = floor_grid(2 * self.delta)  # heavy iff value > 2 delta
        self.recourse = 0
        self.reinits = 0
        self._init()

    def _scaled(self, w: int) -> int:
        return (w * self.alpha.numerator) // self.alpha.denominator

    def _heavy(self, w):
        return w > self.two_w and to_fraction(w) > 2 * self.delta

    def _init(self):
        xc = self.coarsener.out
        xn = bounded_coarsening(self.x, xc, self.eps, 2 * self.delta, check=False)
        self.small: dict[int, None] = {}
        self.small_inc: dict[int, dict[int, None]] = {}
        self.large: set[int] = set()
        self.xhat = FracVector(self.G)
        for e, w in self.x.items():
            if self._heavy(w):
                self.large.add(e)
                self.xhat.set(e, self._scaled(w))
            elif xn.get(e):
                self._small_add(e)
                self.xhat.set(e, self._scaled(xn.get(e)))
        old = set(self.rounder.matching) if hasattr(self, "rounder") else set()
        self.rounder = DynamicRounder(self.G, self.xhat, self.eps, self.delta)
        new = self.rounder.matching
        self.recourse += len(old ^ new)
        self.norm0 = self.x.norm
        self.C = Fraction(0)
        self.reinits += 1

    def _small_add(self, e):
        self.small[e] = None
        for v in self.G.endpoints(e):
            self.small_inc.setdefault(v, {})[e] = None

    def _small_remove(self, e):
        del self.small[e]
        for v in self.G.endpoints(e):
            d = self.small_inc[v]
            del d[e]
            if not d:
                del self.small_inc[v]
        self._inner(e, 0)

    def _inner(self, e, w):
        self.xhat.set(e, w)
        self.recourse += len(self.rounder.update(e, w))

    @property
    def matching(self) -> set[int]:
        return self.rounder.matching

    def update(self, e: int, w: int):
        old = self.x.set(e, w)
        self.coarsener.update(e, w)
        light_touch = (old and not self._heavy(old)) or (w and not self._heavy(w))
        if e in self.large and not self._heavy(w):
            self.large.discard(e)
            self._inner(e, 0)
        if self._heavy(w):
            if e in self.small:
                self._small_remove(e)
            self.large.add(e)
            self._inner(e, self._scaled(w))
        if light_touch:
            if e in self.small:
                self._small_remove(e)
            else:
                for v in self.G.endpoints(e):
                    d = self.small_inc.get(v)
                    if d:
                        self._small_remove(next(iter(d)))
            self.C += 12 * self.delta
            if self.C * ONE > self.norm0 * self.eps:
                self._init()
        if self.verify:
            self.check()

    def violations(self) -> list[str]:
        out = []
        if not self.xhat.is_fractional_matching():
            out.append("scaled vector is not a fractional matching")
        M = self.matching
        if not is_matching(self.G, M):
            out.append("output is not a matching")
        if any(e not in self.x for e in M):
            out.append("output not contained in supp(x)")
        out += ["inner: " + s for s in self.rounder.violations()]
        return out

    def check(self):
        bad = self.violations()
        if bad:
            raise InvariantViolation("; ".join(bad), state={"backend": self.backend, **self.rounder.snapshot()})
