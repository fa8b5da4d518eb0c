"""Set sampler: each call returns an independent Bernoulli(p_i) subset.

Elements wait in per-time buckets; the wait is a geometric skip, so a call
costs O(1 + size of the returned set) in expectation.
"""
from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from .errors import InvariantViolation, ParameterError

P_MIN = 2.0 ** -30


class SetSampler:
    def __init__(self, n: int, p: Optional[Sequence[float]] = None, seed=0, p_min: float = P_MIN):
        if n < 1:
            raise ParameterError("universe size must be positive")
        self.n = n
        self.seed = seed
        self.rng = random.Random(seed)
        self.p_min = p_min
        self.p = [0.0] * n
        self.tau = 1
        # buckets[j] for j in 1..n; index 0 unused
        self.buckets: list[list[int]] = [[] for _ in range(n + 1)]
        self.fire = [n + 1] * n
        self.pos = [-1] * n
        self.ops = 0
        if p is not None:
            if len(p) != n:
                raise ParameterError("probability vector length differs from n")
            for i, a in enumerate(p):
                self.set(i, a)

    def _validate(self, a: float) -> float:
        a = float(a)
        if not 0.0 <= a <= 1.0 or math.isnan(a):
            raise ParameterError(f"probability {a} outside [0, 1]")
        if 0.0 < a < self.p_min:
            raise ParameterError(f"probability {a} below the supported floor {self.p_min}")
        return a

    def _unlink(self, i: int):
        j = self.fire[i]
        if j <= self.n:
            b = self.buckets[j]
            k = self.pos[i]
            last = b.pop()
            if last != i:
                b[k] = last
                self.pos[last] = k
            self.fire[i] = self.n + 1
            self.pos[i] = -1

    def _skip(self, a: float) -> int:
        if a >= 1.0:
            return 0
        u = 1.0 - self.rng.random()  # (0, 1]
        return int(math.log(u) / math.log1p(-a))

    def _schedule(self, i: int):
        a = self.p[i]
        self.ops += 1
        if a <= 0.0:
            return
        j = self.tau + self._skip(a)
        if j <= self.n:
            b = self.buckets[j]
            self.pos[i] = len(b)
            b.append(i)
            self.fire[i] = j

    def set(self, i: int, a: float) -> None:
        a = self._validate(a)
        self._unlink(i)
        self.p[i] = a
        self._schedule(i)

    def sample(self) -> list[int]:
        out = self.buckets[self.tau]
        self.buckets[self.tau] = []
        for i in out:
            self.fire[i] = self.n + 1
            self.pos[i] = -1
        self.tau += 1
        self.ops += 1
        if self.tau > self.n:
            self.tau = 1
            for b in self.buckets:
                b.clear()
            for i in range(self.n):
                self.fire[i] = self.n + 1
                self.pos[i] = -1
                self._schedule(i)
        else:
            for i in out:
                self._schedule(i)
        return out

    def check(self) -> None:
        seen = set()
        for j in range(1, self.n + 1):
            for k, i in enumerate(self.buckets[j]):
                if i in seen:
                    raise InvariantViolation(f"element {i} in two buckets")
                seen.add(i)
                if self.fire[i] != j or self.pos[i] != k:
                    raise InvariantViolation(f"element {i} back-pointer mismatch")
                if j < self.tau:
                    raise InvariantViolation(f"element {i} scheduled in the past")
        for i in range(self.n):
            if (i in seen) != (self.fire[i] <= self.n):
                raise InvariantViolation(f"element {i} next-fire time inconsistent")


def sampler_init(n, p, seed=0) -> SetSampler:
    return SetSampler(n, p, seed)
