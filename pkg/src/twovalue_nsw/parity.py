"""Matchings whose vertex degrees lie in {p_v, p_v + 2, ..., p_v + 2 r_v}.

A parity problem is solved by expanding every vertex into a gadget so that
perfect matchings of the expanded graph correspond to feasible edge sets.
Two expansions are available:

* ``cornuejols``: per vertex of degree t, one copy per incident edge plus
  t - p_v auxiliary vertices joined to all copies, r_v of them paired up.
  Works on any simple graph.
* ``compact``: vertices constrained to degree exactly 1 stay single; every
  other vertex becomes p_v mandatory slots and r_v pairs of optional slots.
  Needs every edge to touch a degree-exactly-1 vertex, which holds for the
  good/agent graphs built by :mod:`twovalue_nsw.lowband`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .blossom import adjacency, maximum_matching


@dataclass(frozen=True)
class ParityProblem:
    n: int
    edges: tuple[tuple[int, int], ...]
    base: tuple[int, ...]
    slack: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.base) != self.n or len(self.slack) != self.n:
            raise ValueError("one (base, slack) pair per vertex is required")
        if any(b < 0 for b in self.base) or any(r < 0 for r in self.slack):
            raise ValueError("base and slack must be non-negative")
        seen = set()
        for u, w in self.edges:
            if u == w or not (0 <= u < self.n and 0 <= w < self.n):
                raise ValueError(f"bad edge ({u}, {w})")
            key = (min(u, w), max(u, w))
            if key in seen:
                raise ValueError(f"parallel edge {key}")
            seen.add(key)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def allows(self, v: int, d: int) -> bool:
        b = self.base[v]
        return b <= d <= b + 2 * self.slack[v] and (d - b) % 2 == 0

    def is_unit(self, v: int) -> bool:
        return self.base[v] == 1 and self.slack[v] == 0

    def feasible(self, chosen: Iterable[int]) -> bool:
        deg = [0] * self.n
        for e in chosen:
            u, w = self.edges[e]
            deg[u] += 1
            deg[w] += 1
        return all(self.allows(v, deg[v]) for v in range(self.n))


@dataclass
class GadgetGraph:
    kind: str
    n_vertices: int
    edges: list[tuple[int, int]]
    origin: list[int]
    labels: list[tuple]
    unit: list[int] = field(default_factory=list)
    mandatory: list[list[int]] = field(default_factory=list)
    pairs: list[list[tuple[int, int]]] = field(default_factory=list)
    copies: list[dict[int, int]] = field(default_factory=list)
    zs: list[list[int]] = field(default_factory=list)

    def adjacency(self) -> list[list[int]]:
        return adjacency(self.n_vertices, self.edges)

    def pull_back(self, mate: Sequence[int]) -> list[int]:
        """Original edges whose gadget edge is in the matching."""
        chosen = set()
        for (u, w), e in zip(self.edges, self.origin):
            if e >= 0 and mate[u] == w:
                chosen.add(e)
        return sorted(chosen)

    def warm_start(self, hint: Iterable[int], prob: ParityProblem) -> list[int]:
        """A valid partial matching that realises as much of ``hint`` as fits."""
        mate = [-1] * self.n_vertices

        def pair(a: int, b: int) -> None:
            mate[a], mate[b] = b, a

        if self.kind == "cornuejols":
            for e in hint:
                u, w = prob.edges[e]
                a, b = self.copies[u][e], self.copies[w][e]
                if mate[a] == -1 and mate[b] == -1:
                    pair(a, b)
            for v in range(prob.n):
                free_z = iter(self.zs[v])
                for a in self.copies[v].values():
                    if mate[a] == -1:
                        z = next(free_z, None)
                        if z is None:
                            break
                        pair(a, z)
                for a, b in self.pairs[v]:
                    if mate[a] == -1 and mate[b] == -1:
                        pair(a, b)
            return mate
        for e in hint:
            u, w = prob.edges[e]
            if self.unit[w] < 0:
                u, w = w, u
            gw = self.unit[w]
            if mate[gw] != -1:
                continue
            if self.unit[u] >= 0:
                if mate[self.unit[u]] == -1:
                    pair(gw, self.unit[u])
                continue
            slots = self.mandatory[u] + [s for pr in self.pairs[u] for s in pr]
            free = next((s for s in slots if mate[s] == -1), None)
            if free is not None:
                pair(gw, free)
        for v in range(prob.n):
            for a, b in self.pairs[v]:
                if mate[a] == -1 and mate[b] == -1:
                    pair(a, b)
        return mate


def build_gadget(prob: ParityProblem) -> GadgetGraph | None:
    """Cornuejols-style expansion; None when some p_v exceeds deg(v)."""
    incident: list[list[int]] = [[] for _ in range(prob.n)]
    for e, (u, w) in enumerate(prob.edges):
        incident[u].append(e)
        incident[w].append(e)
    if any(prob.base[v] > len(incident[v]) for v in range(prob.n)):
        return None
    labels: list[tuple] = []
    copies: list[dict[int, int]] = []
    zs: list[list[int]] = []
    zpairs: list[list[tuple[int, int]]] = []
    edges: list[tuple[int, int]] = []
    origin: list[int] = []
    for v in range(prob.n):
        t = len(incident[v])
        cv = {}
        for e in incident[v]:
            cv[e] = len(labels)
            labels.append(("copy", v, e))
        zv = []
        for k in range(t - prob.base[v]):
            zv.append(len(labels))
            labels.append(("z", v, k))
        for a in cv.values():
            for z in zv:
                edges.append((a, z))
                origin.append(-1)
        zp = [(zv[2 * k], zv[2 * k + 1]) for k in range(min(prob.slack[v], len(zv) // 2))]
        for a, b in zp:
            edges.append((a, b))
            origin.append(-1)
        copies.append(cv)
        zs.append(zv)
        zpairs.append(zp)
    for e, (u, w) in enumerate(prob.edges):
        edges.append((copies[u][e], copies[w][e]))
        origin.append(e)
    return GadgetGraph(
        "cornuejols", len(labels), edges, origin, labels, pairs=zpairs, copies=copies, zs=zs
    )


def compact_applicable(prob: ParityProblem) -> bool:
    return all(prob.is_unit(u) or prob.is_unit(w) for u, w in prob.edges)


def build_compact_gadget(prob: ParityProblem) -> GadgetGraph:
    if not compact_applicable(prob):
        raise ValueError("compact gadget needs a degree-exactly-1 endpoint on every edge")
    labels: list[tuple] = []
    unit = [-1] * prob.n
    mandatory: list[list[int]] = [[] for _ in range(prob.n)]
    pairs: list[list[tuple[int, int]]] = [[] for _ in range(prob.n)]
    edges: list[tuple[int, int]] = []
    origin: list[int] = []
    for v in range(prob.n):
        if prob.is_unit(v):
            unit[v] = len(labels)
            labels.append(("unit", v))
            continue
        for k in range(prob.base[v]):
            mandatory[v].append(len(labels))
            labels.append(("slot", v, k))
        for k in range(prob.slack[v]):
            a = len(labels)
            labels.append(("pair", v, k, 0))
            labels.append(("pair", v, k, 1))
            pairs[v].append((a, a + 1))
            edges.append((a, a + 1))
            origin.append(-1)
    for e, (u, w) in enumerate(prob.edges):
        if unit[w] < 0:
            u, w = w, u
        if unit[u] >= 0:
            edges.append((unit[u], unit[w]))
            origin.append(e)
            continue
        for s in mandatory[u] + [s for pr in pairs[u] for s in pr]:
            edges.append((unit[w], s))
            origin.append(e)
    return GadgetGraph(
        "compact", len(labels), edges, origin, labels, unit=unit, mandatory=mandatory, pairs=pairs
    )


def _make_gadget(prob: ParityProblem, gadget: str) -> GadgetGraph | None:
    if gadget == "auto":
        gadget = "compact" if compact_applicable(prob) else "cornuejols"
    if gadget == "compact":
        return build_compact_gadget(prob)
    if gadget == "cornuejols":
        return build_gadget(prob)
    raise ValueError(f"unknown gadget {gadget!r}")


def perfect_matching_of(gadget: GadgetGraph, mate: list[int] | None = None, stats: dict | None = None) -> list[int] | None:
    if gadget.n_vertices % 2:
        return None
    result = maximum_matching(gadget.adjacency(), mate, stats)
    if any(w == -1 for w in result):
        return None
    return result


def solve_parity(
    prob: ParityProblem,
    gadget: str = "auto",
    hint: Iterable[int] | None = None,
    stats: dict | None = None,
) -> list[int] | None:
    """Indices of a degree-feasible edge set, or None if none exists.

    ``hint`` is an edge set used to warm-start the matching; it does not
    have to be feasible.
    """
    g = _make_gadget(prob, gadget)
    if g is None:
        return None
    if stats is not None:
        stats["solves"] = stats.get("solves", 0) + 1
        stats["gadget_vertices"] = g.n_vertices
        stats["gadget_edges"] = len(g.edges)
    start = g.warm_start(hint, prob) if hint is not None else None
    mate = perfect_matching_of(g, start, stats)
    if mate is None:
        return None
    chosen = g.pull_back(mate)
    if not prob.feasible(chosen):
        raise AssertionError("gadget matching pulled back to an infeasible edge set")
    return chosen


def brute_parity(prob: ParityProblem, max_edges: int = 20) -> list[int] | None:
    """Exhaustive search over edge subsets, smallest subsets first."""
    m = len(prob.edges)
    if m > max_edges:
        raise ValueError(f"{m} edges exceed the brute-force limit of {max_edges}")
    for size in range(m + 1):
        for chosen in combinations(range(m), size):
            if prob.feasible(chosen):
                return list(chosen)
    return None
