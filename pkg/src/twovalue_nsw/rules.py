"""Local improvement rules driven by alternating paths in the heavy graph.

The rules act on an allocation in which every heavy good is counted as
heavy: shed (light good off a large bundle), augment, swap, swap_and_feed,
lift and facilitate.  Each application raises the potential
(NSW key, number of facilitators) lexicographically; a facilitator is a
bundle of value x + 1 that holds a light good.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Allocation, Instance, NswKey, nsw_key


class RuleInvariantError(AssertionError):
    """A rule application failed to raise the potential."""


@dataclass
class RuleEvent:
    rule: str
    agents: tuple[int, ...]
    path_len: int = 0
    lights_moved: int = 0

    def as_dict(self) -> dict:
        return {
            "rule": self.rule,
            "agents": list(self.agents),
            "path_len": self.path_len,
            "lights_moved": self.lights_moved,
        }


@dataclass
class Counters:
    rule_applications: int = 0
    searches: int = 0
    by_rule: dict[str, int] = field(default_factory=dict)

    def bump(self, rule: str) -> None:
        self.rule_applications += 1
        self.by_rule[rule] = self.by_rule.get(rule, 0) + 1


class HeavyGraph:
    """Agent/good "likes heavily" graph together with the current heavy assignment.

    Only agents in ``agents`` take part; the rest of the instance is frozen.
    """

    def __init__(self, inst: Instance, alloc: Allocation, agents: Iterable[int] | None = None):
        self.inst = inst
        self.alloc = alloc
        self.agents = sorted(range(inst.n) if agents is None else set(agents))
        self.active = [False] * inst.n
        for i in self.agents:
            self.active[i] = True

    def assignment(self) -> list[tuple[int, int]]:
        return [(i, g) for i in self.agents for g in sorted(self.alloc.heavy_of[i])]

    def x2(self) -> int:
        return min(self.alloc.values2[i] for i in self.agents)

    def facilitators(self, x2: int | None = None) -> int:
        if x2 is None:
            x2 = self.x2()
        v = self.alloc.values2
        return sum(1 for i in self.agents if v[i] == x2 + 2 and self.alloc.light_of[i])

    def phi(self) -> tuple[NswKey, int]:
        return nsw_key(self.alloc.values2[i] for i in self.agents), self.facilitators()


@dataclass
class AltPaths:
    """Breadth-first tree of alternating paths that start with an assigned edge at ``source``."""

    source: int
    parent: dict[int, tuple[int, int]]
    order: list[int]

    def reachable(self) -> list[int]:
        return list(self.order)

    def path(self, j: int) -> list[int]:
        """[source, g1, a1, g2, ..., gk, j]: g_t moves from the agent before it to the one after."""
        seq = [j]
        while j != self.source:
            prev, g = self.parent[j]
            seq.append(g)
            seq.append(prev)
            j = prev
        seq.reverse()
        return seq


def alt_paths_from(hg: HeavyGraph, i: int) -> AltPaths:
    """All agents reachable from ``i`` by a path whose first edge is one of i's heavy goods."""
    alloc, admirers, active = hg.alloc, hg.inst.admirers, hg.active
    parent: dict[int, tuple[int, int]] = {}
    order: list[int] = []
    seen = {i}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        for g in sorted(alloc.heavy_of[u]):
            for h in admirers[g]:
                if h in seen or not active[h]:
                    continue
                seen.add(h)
                parent[h] = (u, g)
                order.append(h)
                queue.append(h)
    return AltPaths(i, parent, order)


def augment(alloc: Allocation, path: Sequence[int]) -> None:
    agents, goods = path[0::2], path[1::2]
    for t, g in enumerate(goods):
        if alloc.owner[g] != agents[t] or not alloc.as_heavy[g]:
            raise RuleInvariantError(f"path {list(path)} is not alternating at good {g}")
        alloc.move(g, agents[t + 1], True)


def move_lights(alloc: Allocation, src: int, dst: int, count: int) -> None:
    goods = sorted(alloc.light_of[src])[:count]
    if len(goods) < count:
        raise RuleInvariantError(f"agent {src} holds {len(goods)} light goods, {count} requested")
    for g in goods:
        alloc.move(g, dst, False)


def _lowest_at(hg: HeavyGraph, value2: int, exclude: Iterable[int] = ()) -> int | None:
    skip = set(exclude)
    for i in hg.agents:
        if hg.alloc.values2[i] == value2 and i not in skip:
            return i
    return None


def try_shed_light(hg: HeavyGraph, counters: Counters | None = None) -> RuleEvent | None:
    """Move a light good from a bundle above x + 1 onto a minimum bundle."""
    alloc = hg.alloc
    x2 = hg.x2()
    for i in hg.agents:
        if alloc.values2[i] > x2 + 2 and alloc.light_of[i]:
            target = _lowest_at(hg, x2)
            move_lights(alloc, i, target, 1)
            return RuleEvent("shed", (i, target), 0, 1)
    return None


def try_path_rules(
    hg: HeavyGraph, counters: Counters | None = None, reduction_only: bool = False
) -> RuleEvent | None:
    """Augment, swap and swap_and_feed along alternating paths, first match wins.

    Sources are scanned by decreasing value and targets by increasing value,
    ties broken by index.  With ``reduction_only`` the source must lie above
    x + 1.
    """
    alloc, p = hg.alloc, hg.inst.p
    v = alloc.values2
    x2 = hg.x2()
    ceil_s, floor_s = (p + 1) // 2, (p - 1) // 2
    for i in sorted(hg.agents, key=lambda a: (-v[a], a)):
        if not alloc.heavy_of[i]:
            continue
        if reduction_only and v[i] <= x2 + 2:
            break
        if counters is not None:
            counters.searches += 1
        tree = alt_paths_from(hg, i)
        for j in sorted(tree.order, key=lambda a: (v[a], a)):
            d2 = v[i] - v[j]
            lights_j = len(alloc.light_of[j])
            if d2 >= p + 1:
                path = tree.path(j)
                augment(alloc, path)
                return RuleEvent("augment", (i, j), len(path) // 2)
            if d2 >= 2 and 2 * lights_j > p - d2:
                r = max(0, -((d2 - p - 1) // 2))  # ceil((p - d2 + 1) / 2)
                path = tree.path(j)
                augment(alloc, path)
                move_lights(alloc, j, i, r)
                return RuleEvent("swap", (i, j), len(path) // 2, r)
            if v[i] in (x2 + 2, x2 + 3) and v[j] == x2 + 2 and lights_j >= ceil_s:
                target = _lowest_at(hg, x2, exclude=(i, j))
                path = tree.path(j)
                augment(alloc, path)
                move_lights(alloc, j, i, floor_s)
                move_lights(alloc, j, target, 1)
                return RuleEvent("swap_and_feed", (i, j, target), len(path) // 2, floor_s + 1)
    return None


def try_lift_minimum(hg: HeavyGraph, counters: Counters | None = None) -> RuleEvent | None:
    """Value-x source, value-(x+1) target with ceil(s) lights: both end at x + 1/2."""
    alloc, p = hg.alloc, hg.inst.p
    v = alloc.values2
    x2 = hg.x2()
    ceil_s = (p + 1) // 2
    for i in hg.agents:
        if v[i] != x2 or not alloc.heavy_of[i]:
            continue
        if counters is not None:
            counters.searches += 1
        tree = alt_paths_from(hg, i)
        for j in sorted(tree.order):
            if v[j] == x2 + 2 and len(alloc.light_of[j]) >= ceil_s:
                path = tree.path(j)
                augment(alloc, path)
                move_lights(alloc, j, i, ceil_s)
                return RuleEvent("lift", (i, j), len(path) // 2, ceil_s)
    return None


def try_make_facilitator(hg: HeavyGraph, counters: Counters | None = None) -> RuleEvent | None:
    """Swap the values of a heavy-only x + 1 bundle and an x + 1/2 bundle, creating a facilitator."""
    alloc, p = hg.alloc, hg.inst.p
    v = alloc.values2
    x2 = hg.x2()
    ceil_s, floor_s = (p + 1) // 2, (p - 1) // 2
    for i in hg.agents:
        if v[i] != x2 + 2 or alloc.light_of[i] or not alloc.heavy_of[i]:
            continue
        if counters is not None:
            counters.searches += 1
        tree = alt_paths_from(hg, i)
        for j in sorted(tree.order):
            if v[j] == x2 + 1 and len(alloc.light_of[j]) >= ceil_s:
                path = tree.path(j)
                augment(alloc, path)
                move_lights(alloc, j, i, floor_s)
                return RuleEvent("facilitate", (i, j), len(path) // 2, floor_s)
    return None


_RULES = (
    try_shed_light,
    try_path_rules,
    try_lift_minimum,
    try_make_facilitator,
)


def apply_one_rule(hg: HeavyGraph, counters: Counters | None = None) -> RuleEvent | None:
    for rule in _RULES:
        event = rule(hg, counters)
        if event is not None:
            return event
    return None


def _check_progress(before: tuple[NswKey, int], after: tuple[NswKey, int], event: RuleEvent) -> None:
    if event.rule == "facilitate":
        ok = after[0] == before[0] and after[1] > before[1]
    else:
        ok = after[0] > before[0]
    if not ok:
        raise RuleInvariantError(f"rule {event.rule} on {event.agents} did not raise the potential")


def saturate_basic_rules(
    hg: HeavyGraph,
    trace: list | None = None,
    counters: Counters | None = None,
    check: bool = True,
) -> int:
    """Apply the local rules until none applies; returns the number of applications."""
    steps = 0
    while True:
        before = hg.phi() if check else None
        event = apply_one_rule(hg, counters)
        if event is None:
            return steps
        steps += 1
        if counters is not None:
            counters.bump(event.rule)
        if check:
            _check_progress(before, hg.phi(), event)
        if trace is not None:
            trace.append(event.as_dict())
