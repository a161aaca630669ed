"""Range reduction and peeling of the bundles above the low band."""
from __future__ import annotations

from dataclasses import dataclass, field

from .rules import Counters, HeavyGraph, alt_paths_from, try_shed_light, try_path_rules


class PeelError(AssertionError):
    """The allocation handed to ``peel`` was not reduced."""


def freeze_level(x2: int, p: int) -> int:
    """Least k with k * p > x2 + 2, i.e. k * s > x + 1."""
    return (x2 + 2) // p + 1


def reduce(hg: HeavyGraph, trace: list | None = None, counters: Counters | None = None) -> int:
    """Apply the shedding and path rules from sources above x + 1 until none applies."""
    steps = 0
    while True:
        event = try_shed_light(hg, counters) or try_path_rules(hg, counters, reduction_only=True)
        if event is None:
            return steps
        steps += 1
        if counters is not None:
            counters.bump(event.rule)
        if trace is not None:
            trace.append(event.as_dict())


@dataclass
class PeelLevel:
    k: int
    members: list[int]
    heavy_total: int
    frozen: list[int]


@dataclass
class PeelResult:
    x2: int
    freeze_k: int
    frozen: list[int]
    remaining: list[int]
    levels: list[PeelLevel] = field(default_factory=list)


def peel(hg: HeavyGraph) -> PeelResult:
    """Freeze every bundle worth at least freeze_k * s, level by level from the top.

    At level k the group is every value-ks bundle plus everything reachable
    from one by an alternating path.  Its members must own k or k - 1 heavy
    goods; the k-heavy members are frozen and the rest move down a level.
    """
    alloc, inst = hg.alloc, hg.inst
    p = inst.p
    v = alloc.values2
    x2 = hg.x2()
    freeze_k = freeze_level(x2, p)
    active = set(hg.agents)
    levels: list[PeelLevel] = []
    frozen: list[int] = []
    while True:
        top = max(v[i] for i in active)
        if top <= x2 + 2:
            break
        if top % p or alloc.light_of[max(active, key=lambda i: (v[i], -i))]:
            raise PeelError(f"bundle of value {top}/2 above x + 1 is not heavy-only")
        k = top // p
        if k < freeze_k:
            raise PeelError(f"level {k} below freeze_k={freeze_k}")
        view = HeavyGraph(inst, alloc, active)
        seeds = [i for i in sorted(active) if v[i] == top]
        members = set(seeds)
        for i in seeds:
            members.update(alt_paths_from(view, i).order)
        for i in sorted(members):
            h = alloc.heavy_count(i)
            if h not in (k, k - 1):
                raise PeelError(f"agent {i} in the level-{k} group owns {h} heavy goods")
            for g in alloc.heavy_of[i]:
                outside = [a for a in inst.admirers[g] if a in active and a not in members]
                if outside:
                    raise PeelError(f"good {g} of the level-{k} group is liked by agents {outside} outside it")
        heavy_total = sum(alloc.heavy_count(i) for i in members)
        top_members = sorted(i for i in members if alloc.heavy_count(i) == k)
        if heavy_total - (k - 1) * len(members) != len(top_members):
            raise PeelError(f"counting identity fails at level {k}")
        for i in top_members:
            if alloc.light_of[i]:
                raise PeelError(f"frozen agent {i} owns a light good")
        levels.append(PeelLevel(k, sorted(members), heavy_total, top_members))
        frozen.extend(top_members)
        active.difference_update(top_members)
        if k == freeze_k:
            break
    for i in active:
        if alloc.heavy_count(i) > freeze_k - 1:
            raise PeelError(f"agent {i} keeps {alloc.heavy_count(i)} >= freeze_k heavy goods")
    return PeelResult(x2, freeze_k, sorted(frozen), sorted(active), levels)
