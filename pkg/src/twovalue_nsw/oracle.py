"""Exhaustive reference optimizer.

Goods are assigned one at a time; a good owned by an admirer always counts
heavy.  Partial assignments are merged by their value vector, so the search
is a dynamic program over reachable profiles, and every optimum can be
recovered by walking the recorded predecessors backwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian

from .core import Allocation, Instance, NswKey, nsw_key

DEFAULT_BUDGET = 10**8
DEFAULT_CAP = 1000


class BudgetExceeded(ValueError):
    pass


@dataclass
class OracleResult:
    best_key: NswKey
    optima: list[Allocation] = field(default_factory=list)
    capped: bool = False
    best_profile: tuple[int, ...] = ()


def _choices(inst: Instance, g: int, phase_one: bool) -> list[tuple[int, bool]]:
    admirers = inst.admirers[g]
    if phase_one and admirers:
        return [(i, True) for i in admirers]
    return [(i, inst.heavy[i][g]) for i in range(inst.n)]


def _search(inst: Instance, phase_one: bool, budget: int, cap: int) -> OracleResult:
    if inst.n ** inst.m > budget:
        raise BudgetExceeded(f"{inst.n}^{inst.m} allocations exceed the budget of {budget}")
    p = inst.p
    layers: list[dict[tuple[int, ...], list[tuple[tuple[int, ...], int, bool]]]] = []
    frontier: dict[tuple[int, ...], list] = {(0,) * inst.n: []}
    for g in range(inst.m):
        layers.append(frontier)
        nxt: dict[tuple[int, ...], list] = {}
        for state in frontier:
            for i, heavy in _choices(inst, g, phase_one):
                new = list(state)
                new[i] += p if heavy else 2
                nxt.setdefault(tuple(new), []).append((state, i, heavy))
        frontier = nxt
    best_key = max(nsw_key(s) for s in frontier)
    best_states = sorted(s for s in frontier if nsw_key(s) == best_key)
    layers.append(frontier)

    optima: list[Allocation] = []
    capped = False
    owner = [-1] * inst.m
    typing = [False] * inst.m

    def walk(g: int, state: tuple[int, ...]) -> None:
        nonlocal capped
        if capped:
            return
        if g < 0:
            if len(optima) >= cap:
                capped = True
                return
            optima.append(Allocation.from_owners(inst, owner, typing))
            return
        for prev, i, heavy in layers[g + 1][state]:
            owner[g], typing[g] = i, heavy
            walk(g - 1, prev)

    for s in best_states:
        walk(inst.m - 1, s)
    return OracleResult(best_key, optima, capped, best_states[0])


def brute_force(inst: Instance, budget: int = DEFAULT_BUDGET, cap: int = DEFAULT_CAP) -> OracleResult:
    """Every maximum-NSW allocation (up to ``cap`` of them) with admirer-owned goods counted heavy."""
    return _search(inst, False, budget, cap)


def phase_one_brute_force(inst: Instance, budget: int = DEFAULT_BUDGET, cap: int = DEFAULT_CAP) -> OracleResult:
    """Like ``brute_force`` but heavy goods may only go to their admirers."""
    return _search(inst, True, budget, cap)


def brute_force_all_typings(inst: Instance, max_goods: int = 4) -> NswKey:
    """Best key when every admirer-owned good may also be counted light; for tiny instances only."""
    if inst.m > max_goods:
        raise BudgetExceeded(f"{inst.m} goods exceed the typing-enumeration limit of {max_goods}")
    best = None
    for owner in cartesian(range(inst.n), repeat=inst.m):
        options = [(False, True) if inst.heavy[owner[g]][g] else (False,) for g in range(inst.m)]
        for typing in cartesian(*options):
            values = [0] * inst.n
            for g, i in enumerate(owner):
                values[i] += inst.p if typing[g] else 2
            key = nsw_key(values)
            if best is None or key > best:
                best = key
    return best if best is not None else nsw_key([0] * inst.n)


def heavy_edges(alloc: Allocation) -> set[tuple[int, int]]:
    return {(g, i) for g, i in enumerate(alloc.owner) if alloc.as_heavy[g]}


def closest_optimum(inst: Instance, alloc: Allocation, result: OracleResult, max_heavy: int = 12) -> Allocation:
    """Enumerated optimum whose heavy assignment differs least from ``alloc``'s."""
    if len(inst.heavy_goods) > max_heavy:
        raise BudgetExceeded(f"closest-optimum search is limited to {max_heavy} heavy goods")
    if not result.optima:
        raise ValueError("oracle result holds no optima")
    mine = heavy_edges(alloc)
    return min(result.optima, key=lambda o: (len(mine ^ heavy_edges(o)), o.owner))
