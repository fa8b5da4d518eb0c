"""Coarsening validation, bounded coarsening and static composition."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import vertex_distance
from .errors import InputError
from .fixedpoint import ONE, as_fraction, ceil_grid, to_fraction
from .graph import FracVector


@dataclass
class CoarseningReport:
    eps: Fraction
    delta: Fraction
    c0: bool = True
    c1: bool = True
    c2: bool = True
    c3: bool = True
    c4: bool | None = None
    global_slack: Fraction = Fraction(0)
    global_bound: Fraction = Fraction(0)
    vertex_slack: Fraction = Fraction(0)
    vertex_bound: Fraction = Fraction(0)
    max_overload: Fraction = Fraction(0)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.c0 and self.c1 and self.c2 and self.c3 and self.c4 is not False

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "eps": str(self.eps),
            "delta": str(self.delta),
            "C0": self.c0, "C1": self.c1, "C2": self.c2, "C3": self.c3, "C4": self.c4,
            "global_slack": float(self.global_slack),
            "global_bound": float(self.global_bound),
            "vertex_slack": float(self.vertex_slack),
            "vertex_bound": float(self.vertex_bound),
            "max_overload": float(self.max_overload),
            "violations": self.violations[:20],
        }


def validate_coarsening(x: FracVector, xc: FracVector, eps, delta, require_bounded=False) -> CoarseningReport:
    eps, delta = as_fraction(eps), as_fraction(delta)
    rep = CoarseningReport(eps, delta)
    for e in xc.support():
        if e not in x:
            rep.c0 = False
            rep.violations.append(f"C0: edge {e} outside supp(x)")
    nx = x.norm_fraction()
    rep.global_slack = abs(nx - xc.norm_fraction())
    rep.global_bound = eps * nx + eps
    rep.c1 = rep.global_slack <= rep.global_bound
    if not rep.c1:
        rep.violations.append(f"C1: slack {float(rep.global_slack):.6g} > {float(rep.global_bound):.6g}")
    rep.vertex_slack = vertex_distance(x, xc, eps)
    rep.vertex_bound = rep.global_bound
    rep.c2 = rep.vertex_slack <= rep.vertex_bound
    if not rep.c2:
        rep.violations.append(f"C2: slack {float(rep.vertex_slack):.6g} > {float(rep.vertex_bound):.6g}")
    lo = ceil_grid(delta)
    hi = ceil_grid(2 * delta)
    for e in set(x.support()) | set(xc.support()):
        a, b = x.get(e), xc.get(e)
        if a < lo:
            good = b == 0 or lo <= b < hi
        else:
            good = a == b
        if not good:
            rep.c3 = False
            rep.violations.append(f"C3: edge {e} x={to_fraction(a)} x'={to_fraction(b)}")
    if require_bounded:
        t = eps * ONE
        worst = max((lb - la for la, lb in zip(x.loads, xc.loads)), default=0)
        rep.max_overload = Fraction(worst, ONE)
        rep.c4 = worst <= t
        if not rep.c4:
            rep.violations.append(f"C4: vertex overload {float(rep.max_overload):.6g} > eps")
    return rep


def bounded_coarsening(x: FracVector, xc: FracVector, eps, delta, check=True) -> FracVector:
    """Drop light-origin edges at overloaded vertices until x''(v) <= x(v) + eps + 2 delta."""
    eps, delta = as_fraction(eps), as_fraction(delta)
    if check:
        rep = validate_coarsening(x, xc, eps, delta)
        if not rep.ok:
            raise InputError("input is not a coarsening: " + "; ".join(rep.violations[:3]))
    y = xc.copy()
    lo = ceil_grid(delta)
    t = (eps + 2 * delta) * ONE
    g = x.graph
    for v in range(g.n):
        if y.load(v) - x.load(v) <= t:
            continue
        for e in list(g.incident(v)):
            if y.get(e) and x.get(e) < lo:
                y.set(e, 0)
                if y.load(v) - x.load(v) <= t:
                    break
    return y


def compose(x: FracVector, x1: FracVector, x2: FracVector, eps1, delta1, eps2, delta2) -> CoarseningReport:
    eps1, eps2 = as_fraction(eps1), as_fraction(eps2)
    delta1, delta2 = as_fraction(delta1), as_fraction(delta2)
    if delta1 > delta2:
        raise InputError("composition needs delta1 <= delta2")
    if not (0 <= eps1 <= 1 and 0 <= eps2 <= 1):
        raise InputError("composition needs eps1, eps2 in [0, 1]")
    return validate_coarsening(x, x2, eps1 + 2 * eps2, delta2)
