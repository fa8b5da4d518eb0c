"""Split a multigraph (multiplicity <= 2) into two halves by size and degree."""
from __future__ import annotations

from typing import Iterable, Optional

from .errors import InputError


def degree_split(items: Iterable[tuple[int, int, int]], stats: Optional[dict] = None):
    """Partition edge copies (edge_id, u, v) into two simple edge lists.

    A doubled edge sends one copy to each side. The simple remainder is cut
    into maximal walks; along each walk, edges alternate between the output
    that is currently smaller (ties go to the first) and the other one.
    """
    ends: dict[int, tuple[int, int]] = {}
    mult: dict[int, int] = {}
    ops = 0
    for eid, u, v in items:
        ops += 1
        c = mult.get(eid, 0)
        if c == 0:
            ends[eid] = (u, v)
        elif c >= 2:
            raise InputError(f"edge {eid} appears more than twice")
        elif {u, v} != set(ends[eid]):
            raise InputError(f"copies of edge {eid} disagree on endpoints")
        mult[eid] = c + 1

    first: list[int] = []
    second: list[int] = []
    simple: list[int] = []
    for eid, c in mult.items():
        if c == 2:
            first.append(eid)
            second.append(eid)
        else:
            simple.append(eid)

    if simple:
        verts = sorted({w for e in simple for w in ends[e]})
        index = {w: i for i, w in enumerate(verts)}
        nv = len(verts)
        adj: list[list[int]] = [[] for _ in range(nv)]
        tail = [0] * len(simple)
        head = [0] * len(simple)
        for k, e in enumerate(simple):
            a, b = index[ends[e][0]], index[ends[e][1]]
            tail[k], head[k] = a, b
            adj[a].append(k)
            adj[b].append(k)
        deg = [len(a) for a in adj]
        ptr = [0] * nv
        used = [False] * len(simple)

        def walk_from(s: int, out: list[int]):
            nonlocal ops
            cur = s
            while deg[cur]:
                lst = adj[cur]
                p = ptr[cur]
                while used[lst[p]]:
                    p += 1
                    ops += 1
                ptr[cur] = p + 1
                k = lst[p]
                used[k] = True
                deg[tail[k]] -= 1
                deg[head[k]] -= 1
                out.append(k)
                cur = head[k] if tail[k] == cur else tail[k]
                ops += 1

        start = 0
        while True:
            while start < nv and deg[start] == 0:
                start += 1
            if start == nv:
                break
            forward: list[int] = []
            backward: list[int] = []
            walk_from(start, forward)
            walk_from(start, backward)
            backward.reverse()
            walk = backward + forward
            if len(first) <= len(second):
                small, large = first, second
            else:
                small, large = second, first
            for pos, k in enumerate(walk):
                (small if pos % 2 == 0 else large).append(simple[k])

    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + ops
    return first, second
