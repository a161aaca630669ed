"""Optimal reallocation of bundles worth x, x + 1/2 and x + 1.

Two bundles i, j of value x or x + 1 can both be moved to x + 1/2 exactly
when the heavy goods admit a reassignment in which every agent's heavy count
fits the count set of its new value.  When i and j are both at x a
facilitator k (value x + 1 holding a light good) drops to x; when both are
at x + 1 a value-x bundle k rises to x + 1.  The reassignment is a parity
matching problem.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .blossom import outer_set
from .core import Allocation, Instance
from .parity import ParityProblem, build_compact_gadget, solve_parity
from .rules import Counters, HeavyGraph, saturate_basic_rules


class EncodingError(AssertionError):
    """A pair problem was solved but its solution cannot be realised."""


@dataclass(frozen=True)
class CountSet:
    """Heavy-good counts {lo, lo + 2, ..., hi}; empty when hi < lo."""

    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        return self.hi < self.lo

    def __contains__(self, h: int) -> bool:
        return self.lo <= h <= self.hi and (h - self.lo) % 2 == 0

    def values(self) -> list[int]:
        return list(range(self.lo, self.hi + 1, 2)) if not self.empty else []

    def base_slack(self) -> tuple[int, int]:
        return self.lo, (self.hi - self.lo) // 2


def max_heavy(v2: int, p: int) -> int:
    """Largest h with h * p <= v2 and v2 - h * p even; -1 if there is none."""
    h = v2 // p
    if (v2 - h * p) % 2:
        h -= 1
    return h


def count_set(v2: int, p: int) -> CountSet:
    return CountSet(v2 % 2, max_heavy(v2, p))


@dataclass(frozen=True)
class BandCounts:
    half_max: int
    at_min: CountSet
    half_up: CountSet
    one_up: CountSet

    def for_offset(self, d2: int) -> CountSet:
        return (self.at_min, self.half_up, self.one_up)[d2]


def band_counts(x2: int, p: int) -> BandCounts:
    return BandCounts(max_heavy(x2 + 1, p), count_set(x2, p), count_set(x2 + 1, p), count_set(x2 + 2, p))


def table_maxima(x2: int, p: int) -> tuple[int, int, int]:
    """Maxima for x, x + 1/2, x + 1 from the closed-form case split on the x + 1/2 maximum."""
    g = max_heavy(x2 + 1, p)
    if (x2 + 2) % p == 0:
        return g - 1, g, g + 1
    if x2 + 2 > (g + 1) * p:
        return g + 1, g, g + 1
    return g - 1, g, g - 1


@dataclass
class BandState:
    inst: Instance
    alloc: Allocation
    agents: list[int]

    @property
    def x2(self) -> int:
        return min(self.alloc.values2[i] for i in self.agents)

    def offset(self, i: int) -> int:
        return self.alloc.values2[i] - self.x2

    def classes(self) -> tuple[list[int], list[int], list[int]]:
        x2 = self.x2
        out: tuple[list[int], list[int], list[int]] = ([], [], [])
        for i in self.agents:
            d = self.alloc.values2[i] - x2
            if d > 2:
                raise EncodingError(f"agent {i} lies above the band")
            out[d].append(i)
        return out

    def facilitators(self) -> list[int]:
        return [i for i in self.classes()[2] if self.alloc.light_of[i]]

    def heavy_goods(self) -> list[int]:
        return sorted(g for i in self.agents for g in self.alloc.heavy_of[i])

    def light_goods(self) -> list[int]:
        return sorted(g for i in self.agents for g in self.alloc.light_of[i])


@dataclass
class PairProblem:
    prob: ParityProblem
    agents: list[int]
    goods: list[int]
    i: int
    j: int
    k: int | None
    targets: dict[int, int]
    hint: list[int] = field(default_factory=list)

    def heavy_assignment(self, chosen: Sequence[int]) -> dict[int, int]:
        na = len(self.agents)
        out = {}
        for e in chosen:
            a, g = self.prob.edges[e]
            out[self.goods[g - na]] = self.agents[a]
        return out


def _band_graph(state: BandState) -> tuple[list[int], list[int], list[tuple[int, int]], list[int]]:
    """Agents, heavy goods, agent-good edges (vertex ids) and the edges of the current assignment."""
    agents = state.agents
    goods = state.heavy_goods()
    a_index = {a: t for t, a in enumerate(agents)}
    na = len(agents)
    edges = []
    hint = []
    for t, g in enumerate(goods):
        owner = state.alloc.owner[g]
        for a in state.inst.admirers[g]:
            if a in a_index:
                if a == owner:
                    hint.append(len(edges))
                edges.append((a_index[a], na + t))
    return agents, goods, edges, hint


def _constraints(
    state: BandState, ns: BandCounts, overrides: dict[int, CountSet]
) -> tuple[list[int], list[int]] | None:
    base, slack = [], []
    for a in state.agents:
        cs = overrides.get(a) or ns.for_offset(state.offset(a))
        if cs.empty:
            return None
        b, r = cs.base_slack()
        base.append(b)
        slack.append(r)
    return base, slack


def _pair_k(state: BandState, ns: BandCounts, i: int, j: int) -> tuple[bool, int | None, dict[int, CountSet], dict[int, int]]:
    """(admissible, k, count-set overrides, value targets) for the pair i, j."""
    x2 = state.x2
    di, dj = state.offset(i), state.offset(j)
    overrides = {i: ns.half_up, j: ns.half_up}
    targets = {i: x2 + 1, j: x2 + 1}
    k = None
    if di == dj == 0:
        fac = state.facilitators()
        if not fac:
            return False, None, overrides, targets
        k = fac[0]
        overrides[k] = ns.at_min
        targets[k] = x2
    elif di == dj == 2:
        k = next(a for a in state.classes()[0] if a not in (i, j))
        overrides[k] = ns.one_up
        targets[k] = x2 + 2
    return True, k, overrides, targets


def build_pair_problem(state: BandState, i: int, j: int) -> PairProblem | None:
    """Parity problem whose feasible edge sets are the heavy reassignments improving i and j."""
    if i == j or state.offset(i) not in (0, 2) or state.offset(j) not in (0, 2):
        raise ValueError("pair endpoints must be distinct agents of value x or x + 1")
    ns = band_counts(state.x2, state.inst.p)
    ok, k, overrides, targets = _pair_k(state, ns, i, j)
    if not ok:
        return None
    cons = _constraints(state, ns, overrides)
    if cons is None:
        return None
    agents, goods, edges, hint = _band_graph(state)
    na = len(agents)
    base = cons[0] + [1] * len(goods)
    slack = cons[1] + [0] * len(goods)
    prob = ParityProblem(na + len(goods), tuple(edges), tuple(base), tuple(slack))
    return PairProblem(prob, agents, goods, i, j, k, targets, hint)


def redistribute_lights(state: BandState, heavy_assign: dict[int, int], targets: dict[int, int]) -> Allocation:
    """Apply the heavy reassignment, then deal light goods so every agent hits its target value."""
    alloc, p = state.alloc, state.inst.p
    agents = state.agents
    goal = {a: targets.get(a, alloc.values2[a]) for a in agents}
    if sum(goal.values()) != sum(alloc.values2[a] for a in agents):
        raise EncodingError("targets do not preserve the total band value")
    heavy_after = {a: 0 for a in agents}
    for g, a in heavy_assign.items():
        heavy_after[a] += 1
    need = {}
    for a in agents:
        rest = goal[a] - p * heavy_after[a]
        if rest < 0 or rest % 2:
            raise EncodingError(f"agent {a}: target {goal[a]} leaves residue {rest} after heavy goods")
        need[a] = rest // 2
    for g, a in sorted(heavy_assign.items()):
        if alloc.owner[g] != a:
            alloc.move(g, a, True)
    pool = []
    for a in agents:
        own = sorted(alloc.light_of[a])
        pool.extend(own[need[a]:])
    pool.sort()
    for a in agents:
        missing = need[a] - len(alloc.light_of[a])
        for _ in range(max(0, missing)):
            alloc.move(pool.pop(0), a, False)
    if pool:
        raise EncodingError(f"{len(pool)} light goods left over")
    for a in agents:
        if alloc.values2[a] != goal[a]:
            raise EncodingError(f"agent {a} ends at {alloc.values2[a]}, wanted {goal[a]}")
    return alloc


def _attachment(gadget, v: int, goods_of_v: list[int], old: CountSet, new: CountSet) -> list[int] | None:
    """Neighbourhood of one extra vertex whose addition turns v's gadget for ``old`` into one for ``new``.

    Removing a vertex u is encoded as adding a vertex adjacent to u only.
    """
    if new.empty:
        return None
    step = (new.lo - old.lo, new.hi - old.hi)
    # A vertex constrained to degree exactly 1 is its own single mandatory slot.
    mandatory = gadget.mandatory[v] or [gadget.unit[v]]
    if step == (1, 1):
        return goods_of_v
    if step == (-1, -1):
        return [mandatory[0]]
    if step == (1, -1):
        return [gadget.pairs[v][0][1]] if gadget.pairs[v] else None
    if step == (-1, 1):
        return goods_of_v + [mandatory[0]]
    raise EncodingError(f"unexpected count-set change {old} -> {new}")


def _screen_source(state: BandState, ns: BandCounts, i: int, partners: list[int], stats: dict) -> int | None:
    """Smallest partner j such that the pair (i, j) is feasible, via one search per partner class."""
    agents, goods, edges, hint = _band_graph(state)
    pos = {a: t for t, a in enumerate(agents)}
    na = len(agents)
    best = None
    for cls in (0, 2):
        js = [j for j in partners if state.offset(j) == cls]
        if not js:
            continue
        ok, k, overrides, _ = _pair_k(state, ns, i, js[0])
        if not ok:
            continue
        overrides = {a: cs for a, cs in overrides.items() if a != js[0]}
        cons = _constraints(state, ns, overrides)
        if cons is None:
            continue
        prob = ParityProblem(
            na + len(goods), tuple(edges), tuple(cons[0] + [1] * len(goods)), tuple(cons[1] + [0] * len(goods))
        )
        gadget = build_compact_gadget(prob)
        mate = gadget.warm_start(hint, prob)
        exposed = [v for v, w in enumerate(mate) if w == -1]
        if len(exposed) != 1:
            raise EncodingError(f"warm start for source {i} leaves {len(exposed)} exposed vertices")
        stats["solves"] = stats.get("solves", 0) + 1
        outer = outer_set(gadget.adjacency(), mate, exposed[0])
        for j in js:
            if best is not None and j >= best:
                break
            v = pos[j]
            goods_v = [gadget.unit[na + t] for t, g in enumerate(goods) if state.inst.heavy[j][g]]
            old = ns.for_offset(cls)
            attach = _attachment(gadget, v, goods_v, old, ns.half_up)
            if attach and any(outer[u] for u in attach):
                best = j
                break
    return best


def find_improving_pair(
    state: BandState, method: str = "screen", threads: int = 1, stats: dict | None = None
) -> PairProblem | None:
    """Lexicographically smallest feasible pair (i, j), with its parity problem."""
    stats = {} if stats is None else stats
    ns = band_counts(state.x2, state.inst.p)
    if ns.half_up.empty:
        return None
    a0, _, a1 = state.classes()
    cand = sorted(a0 + a1)
    if method == "direct":
        for t, i in enumerate(cand):
            for j in cand[t + 1:]:
                pp = build_pair_problem(state, i, j)
                if pp is None:
                    continue
                stats["solves"] = stats.get("solves", 0) + 1
                if solve_parity(pp.prob, "compact", pp.hint) is not None:
                    return pp
        return None
    if method != "screen":
        raise ValueError(f"unknown method {method!r}")
    sources = [(i, cand[t + 1:]) for t, i in enumerate(cand) if t + 1 < len(cand)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda s: _screen_source(state, ns, s[0], s[1], {}), sources))
        stats["solves"] = stats.get("solves", 0) + 2 * len(sources)
        hits = [(i, j) for (i, _), j in zip(sources, results) if j is not None]
    else:
        hits = []
        for i, partners in sources:
            j = _screen_source(state, ns, i, partners, stats)
            if j is not None:
                hits.append((i, j))
                break
    if not hits:
        return None
    i, j = hits[0]
    return build_pair_problem(state, i, j)


@dataclass
class BandReport:
    improvements: int = 0
    scans: int = 0
    solves: int = 0
    events: list[dict] = field(default_factory=list)


def apply_pair(state: BandState, pp: PairProblem) -> None:
    chosen = solve_parity(pp.prob, "compact", pp.hint)
    if chosen is None:
        raise EncodingError(f"pair ({pp.i}, {pp.j}) was reported feasible but has no solution")
    redistribute_lights(state, pp.heavy_assignment(chosen), pp.targets)


def optimize_band(
    state: BandState,
    method: str = "screen",
    threads: int = 1,
    trace: list | None = None,
    counters: Counters | None = None,
    check: bool = True,
) -> BandReport:
    """Apply pair improvements until no pair of x / x + 1 bundles can be improved.

    The local rules are re-saturated on the band before every scan so that no
    heavy-only x + 1 bundle can be traded for a facilitator.
    """
    report = BandReport()
    alloc = state.alloc
    while True:
        hg = HeavyGraph(state.inst, alloc, state.agents)
        saturate_basic_rules(hg, trace, counters, check)
        a0, _, a1 = state.classes()
        if not a1 or not a0:
            break
        report.scans += 1
        stats: dict = {}
        pp = find_improving_pair(state, method, threads, stats)
        report.solves += stats.get("solves", 0)
        if pp is None:
            break
        x2 = state.x2
        before = math.prod(alloc.values2[a] for a in state.agents)
        apply_pair(state, pp)
        report.solves += 1
        report.improvements += 1
        after = math.prod(alloc.values2[a] for a in state.agents)
        if check and after * x2 * (x2 + 2) != before * (x2 + 1) ** 2:
            raise EncodingError(f"pair ({pp.i}, {pp.j}) changed the product by the wrong ratio")
        event = {"rule": "pair", "agents": [pp.i, pp.j] + ([pp.k] if pp.k is not None else [])}
        report.events.append(event)
        if trace is not None:
            trace.append(event)
    return report
