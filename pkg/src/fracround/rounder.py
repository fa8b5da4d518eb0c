"""Hierarchical bit-by-bit rounding of fractional matchings, static and dynamic."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .core import truncate
from .degree_split import degree_split
from .errors import CapabilityError, InputError, InvariantViolation, ParameterError, PromiseViolation
from .fixedpoint import L_MAX, ONE, as_fraction, bit, ceil_log2, pow2, to_fraction, weight
from .graph import DynGraph, FracVector, Matching, is_matching


def level_count(eps: Fraction, floor_value: Fraction) -> int:
    """1 + ceil(log2(1 / (eps * floor_value)))."""
    return 1 + ceil_log2(1 / (eps * floor_value))


def _check_eps(eps) -> Fraction:
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError(f"eps={eps} outside (0, 1)")
    return eps


def static_round(G: DynGraph, x: FracVector, eps) -> Matching:
    """Round a bipartite fractional matching to a matching of size >= (1-eps)||x'||.

    x' is x after truncation; the caller can obtain it from `truncate`.
    """
    eps = _check_eps(eps)
    if G.two_coloring() is None:
        raise CapabilityError("static rounding needs a bipartite graph; use the coarsening view")
    xt, _ = truncate(x, eps)
    if not len(xt):
        return Matching(G)
    levels = min(level_count(eps, to_fraction(xt.min_weight())), L_MAX)
    ends = G.endpoints
    supp = sorted(xt.support())
    f_next: list[int] = []
    for i in range(levels, 0, -1):
        items = [(e, *ends(e)) for e in supp if bit(xt[e], i)]
        items += [(e, *ends(e)) for e in f_next]
        f_next, _ = degree_split(items)
        f_next.sort()
    out = {e for e in supp if bit(xt[e], 0)}
    out.update(f_next)
    return Matching(G, sorted(out))


class DynamicRounder:
    """Dynamic hierarchical rounding with lazy per-level rebuilds.

    Levels 0..L keep an edge set E_i (bit i of x when last rebuilt), a
    carried set F_i, and a counter c_i. The matching is E_0 plus F_0.
    """

    def __init__(self, G: DynGraph, x: FracVector, eps, delta=None, verify: bool = False):
        self.G = G
        self.eps = _check_eps(eps)
        if delta is None:
            if not len(x):
                raise ParameterError("delta is required when x is empty")
            delta = to_fraction(x.min_weight())
        self.delta = as_fraction(delta)
        if not 0 < self.delta <= 1:
            raise ParameterError(f"delta={self.delta} outside (0, 1]")
        self.delta_w = -((-self.delta.numerator * ONE) // self.delta.denominator)
        self.L = level_count(self.eps, self.delta)
        if self.L > L_MAX:
            raise ParameterError(f"level count {self.L} exceeds the {L_MAX}-bit budget")
        self.verify = verify
        L = self.L
        self.x = FracVector(G)
        self.S: list[set[int]] = [set() for _ in range(L + 1)]
        for e, w in x.items():
            self._check_promise(e, w)
            self.x.set(e, w)
            for j in range(L + 1):
                if bit(w, j):
                    self.S[j].add(e)
        self.E: list[set[int]] = [set() for _ in range(L + 1)]
        self.F: list[dict[int, None]] = [{} for _ in range(L + 1)]
        self.Finc: list[dict[int, dict[int, None]]] = [{} for _ in range(L + 1)]
        self.c = [0] * (L + 1)
        self.baseline = [self.x.norm] * (L + 1)
        self.core: set[int] = set()
        self._ptr: Optional[int] = None
        self.recourse = 0
        self.updates = 0
        self.rebuild_calls = [0] * (L + 1)
        self.rebuild_work = [0] * (L + 1)
        # threshold constants: c * L * 4 * ONE * den > 2^i * num * norm
        self._lhs = L * 4 * ONE * self.eps.denominator
        log = self._rebuild(L)
        self._sync(log)
        if verify:
            self.check()

    # -- structure helpers --------------------------------------------------

    def _check_promise(self, e, w):
        if 0 < w < self.delta_w:
            raise PromiseViolation(f"edge {e} value {to_fraction(w)} below delta={self.delta}")

    def _f_add(self, i, e):
        self.F[i][e] = None
        inc = self.Finc[i]
        for w in self.G.endpoints(e):
            inc.setdefault(w, {})[e] = None

    def _f_remove(self, i, e, log):
        del self.F[i][e]
        inc = self.Finc[i]
        for w in self.G.endpoints(e):
            d = inc[w]
            del d[e]
            if not d:
                del inc[w]
        if i == 0 and e not in self.E[0] and e in self.core:
            self.core.discard(e)
            log.append(("-", e))

    def _e_remove(self, i, e, log):
        if e in self.E[i]:
            self.E[i].discard(e)
            if i == 0 and e not in self.F[0] and e in self.core:
                self.core.discard(e)
                log.append(("-", e))

    def _exceeds(self, i) -> bool:
        norm = min(self.baseline[i], self.x.norm)
        return self.c[i] * self._lhs > (1 << i) * self.eps.numerator * norm

    def _rebuild(self, i):
        ends = self.G.endpoints
        norm = self.x.norm
        self.rebuild_calls[i] += 1
        work = 0
        for j in range(i, -1, -1):
            self.E[j] = set(self.S[j])
            self.c[j] = 0
            self.baseline[j] = norm
            work += len(self.E[j]) + len(self.F[j])
            if j:
                items = [(e, *ends(e)) for e in sorted(self.E[j])]
                items += [(e, *ends(e)) for e in sorted(self.F[j])]
                first, _ = degree_split(items)
                self.F[j - 1] = {}
                self.Finc[j - 1] = {}
                for e in first:
                    self._f_add(j - 1, e)
        self.rebuild_work[i] += work
        self.last_rebuild_work = work
        new_core = self.E[0] | self.F[0].keys()
        log = [("-", e) for e in self.core - new_core] + [("+", e) for e in new_core - self.core]
        self.core = new_core
        return log

    def _sync(self, core_log):
        """Apply core changes to the exposed matching and return the change log."""
        ptr_mode = not self.core and self.x.norm < ONE and len(self.x) > 0
        if not ptr_mode:
            if self._ptr is not None:
                old = {self._ptr}
                self._ptr = None
                log = [("-", e) for e in old - self.core] + [("+", e) for e in self.core - old]
            else:
                log = core_log
        elif self._ptr is None:
            self._ptr = min(self.x.support())
            log = list(core_log) + [("+", self._ptr)]
        elif self._ptr not in self.x:
            old = self._ptr
            self._ptr = min(self.x.support())
            log = [("-", old), ("+", self._ptr)]
        else:
            log = []
        self.recourse += len(log)
        return log

    # -- public API -----------------------------------------------------------

    @property
    def matching(self) -> set[int]:
        return {self._ptr} if self._ptr is not None else set(self.core)

    def matching_size(self) -> int:
        return 1 if self._ptr is not None else len(self.core)

    def rebuild(self, i: int):
        if not 0 <= i <= self.L:
            raise ParameterError(f"level {i} outside 0..{self.L}")
        return self._pairs(self._sync(self._rebuild(i)))

    def update_value(self, e: int, value) -> list[tuple[str, int, int]]:
        return self.update(e, weight(value))

    def update(self, e: int, w: int) -> list[tuple[str, int, int]]:
        """Set x_e to the grid value w and return the matching changes."""
        self._check_promise(e, w)
        old = self.x.set(e, w)
        for j in range(self.L + 1):
            a, b = bit(old, j), bit(w, j)
            if a != b:
                (self.S[j].add if b else self.S[j].discard)(e)
        self.updates += 1
        log = []
        u, v = self.G.endpoints(e)
        for i in range(self.L, -1, -1):
            self._e_remove(i, e, log)
            if i:
                if e in self.F[i - 1]:
                    self._f_remove(i - 1, e, log)
                else:
                    inc = self.Finc[i - 1]
                    for t in (u, v):
                        d = inc.get(t)
                        if d:
                            self._f_remove(i - 1, next(iter(d)), log)
            self.c[i] += 1
            if self._exceeds(i):
                log = log + self._rebuild(i)
                break
        out = self._sync(log)
        if self.verify:
            self.check()
        return self._pairs(out)

    def _pairs(self, log):
        ends = self.G.endpoints
        return [(s, *ends(e)) for s, e in log]

    def implied_vector(self, i: int) -> FracVector:
        """x^(i): F_i at weight 2^-i plus E_j at weight 2^-j for j <= i."""
        y = FracVector(self.G)
        vals: dict[int, int] = {}
        for j in range(i + 1):
            for e in self.E[j]:
                vals[e] = vals.get(e, 0) + (ONE >> j)
        for e in self.F[i]:
            vals[e] = vals.get(e, 0) + (ONE >> i)
        for e, w in vals.items():
            y.set(e, w)
        return y

    def implied_norm(self, i: int) -> Fraction:
        total = len(self.F[i]) * pow2(-i)
        for j in range(i + 1):
            total += len(self.E[j]) * pow2(-j)
        return total

    def coarsening_view(self, k: int) -> FracVector:
        if self.eps != pow2(-k):
            raise ParameterError(f"coarsening view at level {k} needs eps = 2^-{k}, have {self.eps}")
        low = (1 << (L_MAX - k)) - 1
        eps_w = ONE >> k
        for e, w in self.x.items():
            if w >= eps_w and w & low:
                raise InputError(f"edge {e} has value >= eps with bits beyond level {k}")
        return self.implied_vector(k)

    # -- verification ---------------------------------------------------------

    def violations(self) -> list[str]:
        out = []
        x = self.x
        norm = x.norm_fraction()
        if not x.cache_consistent():
            out.append("vector cache mismatch")
        for j in range(self.L + 1):
            if not self.E[j] <= self.S[j]:
                out.append(f"E_{j} not contained in supp_{j}(x)")
            if len(self.F[j]) > 1 + (1 << j) * norm:
                out.append(f"|F_{j}| = {len(self.F[j])} exceeds 1 + 2^{j}||x||")
        if self.F[self.L]:
            out.append("F_L not empty")
        M = self.matching
        if not is_matching(self.G, M):
            out.append("output is not a matching")
        if any(e not in x for e in M):
            out.append("output not contained in supp(x)")
        if len(M) < (1 - 2 * self.eps) * norm:
            out.append(f"|M| = {len(M)} below (1-2eps)||x|| = {float((1 - 2 * self.eps) * norm):.6g}")
        for i in range(self.L + 1):
            if self.implied_norm(i) > (1 + self.eps) * norm + pow2(1 - i):
                out.append(f"||x^({i})|| above (1+eps)||x|| + 2^(1-{i})")
        if x.is_fractional_matching() and self.G.two_coloring() is not None:
            for i in range(self.L + 1):
                if not self.implied_vector(i).is_fractional_matching():
                    out.append(f"x^({i}) is not a fractional matching")
        return out

    def check(self):
        bad = self.violations()
        if bad:
            raise InvariantViolation("; ".join(bad), state=self.snapshot())

    def snapshot(self) -> dict:
        return {
            "L": self.L,
            "eps": str(self.eps),
            "delta": str(self.delta),
            "norm": str(self.x.norm_fraction()),
            "c": list(self.c),
            "E_sizes": [len(s) for s in self.E],
            "F_sizes": [len(f) for f in self.F],
            "matching": sorted(self.matching),
            "updates": self.updates,
        }


def dyn_init(G, x, eps, delta=None, verify=False) -> DynamicRounder:
    return DynamicRounder(G, x, eps, delta, verify=verify)
