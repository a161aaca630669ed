"""End-to-end maximizer: phase one with every heavy good counted heavy, then heavy-to-light conversions."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .blossom import bipartite_matching
from .core import Allocation, Instance, NswKey
from .lowband import BandReport, BandState, optimize_band
from .reduction import PeelResult, peel, reduce
from .rules import Counters, HeavyGraph, saturate_basic_rules

log = logging.getLogger(__name__)


class SolverInvariantError(AssertionError):
    """A structural property that the algorithm relies on did not hold."""


def initial_allocation(inst: Instance) -> Allocation:
    """Heavy goods to their lowest-index admirer, then light goods one by one to a minimum bundle."""
    alloc = Allocation.empty(inst)
    for g in inst.heavy_goods:
        alloc.move(g, inst.admirers[g][0], True)
    for g in inst.light_goods:
        target = min(range(inst.n), key=lambda i: (alloc.values2[i], i))
        alloc.move(g, target, False)
    return alloc


def _deal_lights(inst: Instance, alloc: Allocation, goods: list[int], agents: list[int]) -> None:
    for g in goods:
        target = min(agents, key=lambda i: (alloc.values2[i], i))
        alloc.move(g, target, False)


def _phase_one_graph(inst: Instance) -> list[list[int]]:
    """Goods each agent may own under the phase-one constraint."""
    light = inst.light_goods
    return [sorted(set(inst.likes[i]) | set(light)) for i in range(inst.n)]


def _covering_start(inst: Instance, match: list[int]) -> Allocation:
    """Start in which every agent owns its matched good; the rest as in ``initial_allocation``."""
    alloc = Allocation.empty(inst)
    for i, g in enumerate(match):
        alloc.move(g, i, inst.heavy[i][g])
    taken = set(match)
    for g in inst.heavy_goods:
        if g not in taken:
            alloc.move(g, inst.admirers[g][0], True)
    _deal_lights(inst, alloc, [g for g in inst.light_goods if g not in taken], list(range(inst.n)))
    return alloc


@dataclass
class PhaseOneReport:
    frozen: list[int] = field(default_factory=list)
    band: list[int] = field(default_factory=list)
    starved: list[int] = field(default_factory=list)
    peel: PeelResult | None = None
    band_report: BandReport = field(default_factory=BandReport)
    counters: Counters = field(default_factory=Counters)
    rule_steps: int = 0

    @property
    def matching_solves(self) -> int:
        return self.band_report.solves


def _deficient_agents(inst: Instance, match: list[int]) -> tuple[list[int], list[int]]:
    """Agents reachable from unmatched agents by alternating paths, and their goods."""
    adj = _phase_one_graph(inst)
    owner = {g: i for i, g in enumerate(match) if g >= 0}
    seen = {i for i in range(inst.n) if match[i] < 0}
    stack = list(seen)
    goods: set[int] = set()
    while stack:
        u = stack.pop()
        for g in adj[u]:
            if g in goods:
                continue
            goods.add(g)
            w = owner.get(g)
            if w is not None and w not in seen:
                seen.add(w)
                stack.append(w)
    return sorted(seen), sorted(goods)


def phase_one(
    inst: Instance,
    start: Allocation | None = None,
    method: str = "screen",
    threads: int = 1,
    trace: list | None = None,
    check: bool = True,
    report: PhaseOneReport | None = None,
) -> Allocation:
    """Best allocation in which every good owned by an admirer counts heavy and no other good is heavy.

    When not every agent can receive a good, the agents that must stay empty
    are split off first (they and the goods they could use form a deficient
    part with a fixed product) and the rest is solved on its own.
    """
    report = PhaseOneReport() if report is None else report
    if start is not None and min(start.values2, default=1) > 0:
        return _phase_one_nonzero(inst, start.copy(), method, threads, trace, check, report)
    match = bipartite_matching(_phase_one_graph(inst), inst.m)
    if all(g >= 0 for g in match):
        return _phase_one_nonzero(inst, _covering_start(inst, match), method, threads, trace, check, report)

    deficient, gamma = _deficient_agents(inst, match)
    alloc = Allocation.empty(inst)
    for i in deficient:
        g = match[i]
        if g >= 0:
            alloc.move(g, i, inst.heavy[i][g])
    report.starved = [i for i in deficient if match[i] < 0]
    rest = [i for i in range(inst.n) if i not in set(deficient)]
    if not rest:
        return alloc
    gset = set(gamma)
    goods = [g for g in range(inst.m) if g not in gset]
    sub = Instance(len(rest), len(goods), inst.p, tuple(tuple(inst.heavy[i][g] for g in goods) for i in rest))
    sub_report = PhaseOneReport()
    sub_trace = [] if trace is not None else None
    sub_alloc = phase_one(sub, None, method, threads, sub_trace, check, sub_report)
    for t, g in enumerate(goods):
        alloc.move(g, rest[sub_alloc.owner[t]], sub_alloc.as_heavy[t])
    report.frozen = [rest[i] for i in sub_report.frozen]
    report.band = [rest[i] for i in sub_report.band]
    report.peel = _remap_peel(sub_report.peel, rest) if sub_report.peel else None
    report.band_report = sub_report.band_report
    report.counters = sub_report.counters
    report.rule_steps = sub_report.rule_steps
    if trace is not None:
        trace.append({"rule": "split", "starved": report.starved, "rest": rest})
        trace.extend(_remap_event(e, rest) for e in sub_trace)
    return alloc


def _remap_peel(result: PeelResult, agents: list[int]) -> PeelResult:
    levels = [
        replace(lv, members=[agents[a] for a in lv.members], frozen=[agents[a] for a in lv.frozen])
        for lv in result.levels
    ]
    return replace(
        result, frozen=[agents[a] for a in result.frozen], remaining=[agents[a] for a in result.remaining], levels=levels
    )


def _remap_event(event: dict, agents: list[int]) -> dict:
    out = dict(event)
    for key in ("agents", "rest", "starved"):
        if key in out:
            out[key] = [agents[a] for a in out[key]]
    return out


def _phase_one_nonzero(
    inst: Instance,
    alloc: Allocation,
    method: str,
    threads: int,
    trace: list | None,
    check: bool,
    report: PhaseOneReport,
) -> Allocation:
    counters = report.counters
    hg = HeavyGraph(inst, alloc)
    report.rule_steps += saturate_basic_rules(hg, trace, counters, check)
    extra = reduce(hg, trace, counters)
    if check and extra:
        raise SolverInvariantError(f"range reduction still applied {extra} rules after saturation")
    peeled = peel(hg)
    report.peel = peeled
    report.frozen = peeled.frozen
    report.band = peeled.remaining
    state = BandState(inst, alloc, peeled.remaining)
    report.band_report = optimize_band(state, method, threads, trace, counters, check)
    return alloc


def conversion_gain_bound_check(z2: int, x2: int, p: int) -> bool:
    """True iff a conversion from a bundle of value z can beat the current minimum x (z > s * x)."""
    return 2 * z2 > p * x2


def convert_step(inst: Instance, alloc: Allocation, target: int | None = None) -> tuple[Instance, Allocation, dict]:
    """Re-type one heavy good of the lowest-index heaviest bundle as light and give it to a minimum bundle.

    ``target`` picks the receiving minimum bundle; the lowest index by default.
    """
    v = alloc.values2
    x2, z2 = min(v), max(v)
    if z2 <= x2 + 2:
        raise SolverInvariantError("no bundle exceeds x + 1; nothing to convert")
    src = min(i for i in range(inst.n) if v[i] == z2)
    if not alloc.heavy_of[src]:
        raise SolverInvariantError(f"heaviest bundle {src} holds no heavy good")
    g = min(alloc.heavy_of[src])
    dst = min(i for i in range(inst.n) if v[i] == x2) if target is None else target
    if v[dst] != x2:
        raise SolverInvariantError(f"target {dst} is not a minimum bundle")
    new_inst = inst.masked([g])
    out = alloc.copy()
    out.move(g, dst, False)
    return new_inst, out, {"good": g, "from": src, "to": dst}


def normalize_typing(inst: Instance, alloc: Allocation) -> Allocation:
    """Count every good heavy whose owner likes it in ``inst``."""
    return Allocation.from_owners(inst, alloc.owner)


@dataclass
class SolveReport:
    allocation: Allocation
    key: NswKey
    conversions: list[dict] = field(default_factory=list)
    iterations: list[dict] = field(default_factory=list)
    trace: list[dict] | None = None
    max_solves_per_phase: int = 0
    rule_applications: int = 0

    @property
    def values2(self) -> list[int]:
        return list(self.allocation.values2)


def _solve_few_goods(inst: Instance) -> SolveReport:
    """m < n: at most m bundles can be non-empty, so one good each, as many of them heavy as possible."""
    match = bipartite_matching([list(inst.likes[i]) for i in range(inst.n)], inst.m)
    alloc = Allocation.empty(inst)
    for i, g in enumerate(match):
        if g >= 0:
            alloc.move(g, i, True)
    idle = iter(i for i in range(inst.n) if match[i] < 0)
    for g in range(inst.m):
        if alloc.owner[g] < 0:
            alloc.move(g, next(idle), False)
    return SolveReport(alloc, alloc.key())


def solve(
    inst: Instance,
    method: str = "screen",
    threads: int = 1,
    trace: bool = False,
    check: bool = True,
) -> SolveReport:
    """Maximum-NSW allocation of ``inst``."""
    if inst.m < inst.n:
        return _solve_few_goods(inst)
    events: list | None = [] if trace else None
    cur_inst = inst
    rep = PhaseOneReport()
    cur = phase_one(inst, None, method, threads, events, check, rep)
    best = normalize_typing(inst, cur)
    best_key = best.key()
    report = SolveReport(best, best_key, trace=events)
    report.max_solves_per_phase = rep.matching_solves
    report.rule_applications = rep.counters.rule_applications
    heavy_left = sum(cur.as_heavy)
    while max(cur.values2) > min(cur.values2) + 2:
        if heavy_left == 0:
            raise SolverInvariantError("loop continues with no heavy good left")
        x2, z2 = min(cur.values2), max(cur.values2)
        before = cur.key()
        cur_inst, b_alloc, conv = convert_step(cur_inst, cur)
        heavy_left -= 1
        # The bounds below assume the donor bundle stays at or above the old minimum.
        regular = before.zeros == 0 and z2 - cur_inst.p >= x2
        reduce_steps = reduce(HeavyGraph(cur_inst, b_alloc.copy())) if check else None
        if reduce_steps and regular:
            raise SolverInvariantError(f"range reduction changed B after converting good {conv['good']}")
        rep = PhaseOneReport()
        cur = phase_one(cur_inst, b_alloc, method, threads, events, check, rep)
        heavy_left = sum(cur.as_heavy)
        after = cur.key()
        within_ratio = after.zeros == 0 and (
            after.product * z2 * x2 * x2 <= before.product * (z2 - cur_inst.p) * (x2 + 1) ** 2
        )
        gained = after > before
        if check and regular and not within_ratio:
            raise SolverInvariantError(f"conversion of good {conv['good']} gained more than the bound allows")
        if check and regular and gained and not conversion_gain_bound_check(z2, x2, inst.p):
            raise SolverInvariantError(f"improving conversion with z2={z2} <= s * x2 (x2={x2})")
        candidate = normalize_typing(inst, cur)
        improved = candidate.key() > best_key
        if improved:
            best, best_key = candidate, candidate.key()
        report.conversions.append(conv)
        report.iterations.append(
            {
                "k": len(report.conversions),
                "x2": x2,
                "z2": z2,
                "product": str(after.product),
                "gained": gained,
                "improved": improved,
                "regular": regular,
                "within_ratio": within_ratio,
                "matching_solves": rep.matching_solves,
                "reduce_steps_on_b": reduce_steps,
            }
        )
        report.max_solves_per_phase = max(report.max_solves_per_phase, rep.matching_solves)
        report.rule_applications += rep.counters.rule_applications
        log.debug("conversion %d: good %d, product %s", len(report.conversions), conv["good"], after.product)
    report.allocation, report.key = best, best_key
    return report


def solves_bound(n: int) -> int:
    """Declared polynomial budget of matching solves for one phase-one run."""
    return n * n * (n // 2 + 1)
