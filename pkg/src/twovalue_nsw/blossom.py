"""Edmonds' blossom algorithm for maximum cardinality matching in general graphs.

Augmenting paths are grown from one exposed root at a time with blossoms
contracted through a ``base`` array, O(V^3) overall.  ``mate[v]`` is the
partner of ``v`` or -1.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence


def adjacency(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, w in edges:
        if u == w:
            continue
        adj[u].append(w)
        adj[w].append(u)
    return adj


def _search(adj: Sequence[Sequence[int]], mate: list[int], root: int) -> tuple[int, list[int], list[bool]]:
    """Grow an alternating tree from ``root``.

    Returns (end, parent, outer): ``end`` is an exposed vertex closing an
    augmenting path, or -1; ``outer`` marks the vertices reached at even
    distance once the search is exhausted.
    """
    n = len(adj)
    parent = [-1] * n
    base = list(range(n))
    outer = [False] * n
    outer[root] = True
    queue = deque([root])

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark(v: int, b: int, child: int, blossom: list[bool]) -> None:
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    while queue:
        v = queue.popleft()
        for to in adj[v]:
            if base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                b = lca(v, to)
                blossom = [False] * n
                mark(v, b, to, blossom)
                mark(to, b, v, blossom)
                for u in range(n):
                    if blossom[base[u]]:
                        base[u] = b
                        if not outer[u]:
                            outer[u] = True
                            queue.append(u)
            elif parent[to] == -1:
                parent[to] = v
                if mate[to] == -1:
                    return to, parent, outer
                outer[mate[to]] = True
                queue.append(mate[to])
    return -1, parent, outer


def _augment(mate: list[int], parent: list[int], end: int) -> None:
    v = end
    while v != -1:
        pv = parent[v]
        nxt = mate[pv]
        mate[v] = pv
        mate[pv] = v
        v = nxt


def maximum_matching(
    adj: Sequence[Sequence[int]], mate: list[int] | None = None, stats: dict | None = None
) -> list[int]:
    """Maximum matching, optionally warm-started from a valid partial ``mate``."""
    n = len(adj)
    mate = [-1] * n if mate is None else list(mate)
    for v in range(n):
        if mate[v] != -1:
            continue
        end, parent, _ = _search(adj, mate, v)
        if stats is not None:
            stats["searches"] = stats.get("searches", 0) + 1
        if end != -1:
            _augment(mate, parent, end)
    return mate


def perfect_matching(
    n: int, edges: Iterable[tuple[int, int]], mate: list[int] | None = None
) -> list[tuple[int, int]] | None:
    """A perfect matching of the graph as a list of edges, or None if there is none."""
    if n % 2:
        return None
    result = maximum_matching(adjacency(n, edges), mate)
    if any(w == -1 for w in result):
        return None
    return [(v, w) for v, w in enumerate(result) if v < w]


def outer_set(adj: Sequence[Sequence[int]], mate: list[int], root: int) -> list[bool]:
    """Vertices at even alternating distance from the only exposed vertex ``root``.

    With every other vertex matched these are exactly the vertices v for
    which G - v has a perfect matching.
    """
    end, _, outer = _search(adj, mate, root)
    if end != -1:
        raise ValueError(f"root {root} is not the only exposed vertex ({end} is exposed too)")
    return outer


def bipartite_matching(left_adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching by augmenting paths; returns the right partner of each left vertex."""
    match_right = [-1] * n_right
    match_left = [-1] * len(left_adj)

    def try_assign(u: int, seen: list[bool]) -> bool:
        for w in left_adj[u]:
            if seen[w]:
                continue
            seen[w] = True
            if match_right[w] == -1 or try_assign(match_right[w], seen):
                match_right[w] = u
                match_left[u] = w
                return True
        return False

    for u in range(len(left_adj)):
        try_assign(u, [False] * n_right)
    return match_left
