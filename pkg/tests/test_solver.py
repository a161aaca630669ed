import pytest

from twovalue_nsw.core import Instance, check_allocation
from twovalue_nsw.oracle import brute_force
from twovalue_nsw.solver import (
    PhaseOneReport,
    SolverInvariantError,
    conversion_gain_bound_check,
    convert_step,
    initial_allocation,
    phase_one,
    solve,
    solves_bound,
)

from conftest import corpus


def identical(n, heavies, lights, p=3):
    return Instance.uniform(n, heavies, lights, p)


def test_initial_allocation_gives_heavies_to_first_admirer():
    inst = Instance.from_rows(3, [[1, 1], [0, 0]])
    alloc = initial_allocation(inst)
    assert alloc.owner == [0, 0]
    assert alloc.values2 == [6, 0]


def test_initial_allocation_deals_lights_to_the_minimum():
    alloc = initial_allocation(identical(3, 0, 7))
    assert alloc.values2 == [6, 4, 4]


def test_initial_allocation_without_goods():
    alloc = initial_allocation(Instance(2, 0, 3, ((), ())))
    assert alloc.values2 == [0, 0] and alloc.owner == []


@pytest.mark.parametrize("lights,profile", [(2, [5, 5]), (3, [6, 6])])
def test_heavy_and_light_interact(lights, profile):
    inst = identical(2, 2, lights)
    assert sorted(phase_one(inst).values2) == profile
    assert sorted(solve(inst).values2) == profile


def test_three_lights_keep_both_heavies_together():
    alloc = phase_one(identical(2, 2, 3))
    assert sorted(alloc.heavy_count(i) for i in range(2)) == [0, 2]


@pytest.mark.parametrize("heavies,lights,profile", [(0, 7, [6, 8]), (2, 4, [7, 7]), (4, 1, [6, 8])])
def test_two_agents_worth_three_and_four(heavies, lights, profile):
    assert sorted(solve(identical(2, heavies, lights)).values2) == profile


def test_value_two_and_three_end_as_heavy_plus_light():
    inst = identical(2, 2, 2)
    alloc = solve(inst).allocation
    for i in range(2):
        assert alloc.heavy_count(i) == 1 and alloc.light_count(i) == 1


def test_one_agent_likes_everything():
    inst = Instance.from_rows(3, [[1, 1], [0, 0]])
    assert phase_one(inst).values2 == [6, 0]
    report = solve(inst)
    assert report.values2 == [3, 2]
    assert report.key.product == 6
    assert len(report.conversions) == 1


def test_convert_step_example():
    inst = Instance.from_rows(3, [[1, 1], [0, 0]])
    new_inst, alloc, log = convert_step(inst, phase_one(inst))
    assert log == {"good": 0, "from": 0, "to": 1}
    assert alloc.values2 == [3, 2]
    assert not new_inst.heavy[0][0] and new_inst.heavy[0][1]


def test_convert_step_needs_a_large_bundle():
    inst = identical(2, 0, 4)
    with pytest.raises(SolverInvariantError):
        convert_step(inst, phase_one(inst))


def test_convert_step_breaks_ties_by_index():
    inst = Instance.from_rows(3, [[1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0], [0] * 6, [0] * 6])
    alloc = initial_allocation(inst)
    assert alloc.values2 == [6, 6, 2, 2]
    _, _, log = convert_step(inst, alloc)
    assert log == {"good": 0, "from": 0, "to": 2}


@pytest.mark.parametrize("z2,x2,p,expected", [(6, 4, 3, False), (7, 4, 3, True), (10, 2, 5, True), (9, 6, 3, False)])
def test_conversion_gain_bound(z2, x2, p, expected):
    assert conversion_gain_bound_check(z2, x2, p) is expected


def test_no_heavy_goods_means_no_conversions():
    for inst in corpus(3, 40, densities=(0.0,)):
        report = solve(inst)
        assert report.conversions == []
        if inst.m >= inst.n:
            assert report.key == phase_one(inst).key()


def test_fewer_goods_than_agents():
    inst = Instance.from_rows(5, [[1, 1], [1, 0], [0, 0]])
    report = solve(inst)
    assert report.key.zeros == 1
    assert sorted(report.values2) == [0, 5, 5]


def test_solutions_are_consistent():
    for inst in corpus(21, 100, n_range=(1, 6), m_range=(0, 12)):
        report = solve(inst)
        check_allocation(inst, report.allocation)
        for g, i in enumerate(report.allocation.owner):
            assert report.allocation.as_heavy[g] == inst.heavy[i][g]


def test_best_is_monotone_and_loop_is_bounded():
    for inst in corpus(22, 150, n_range=(2, 6), m_range=(2, 12)):
        report = solve(inst)
        assert len(report.conversions) <= len(inst.heavy_goods)
        improved = [it for it in report.iterations if it["improved"]]
        assert all(it["gained"] for it in improved)


def test_receiving_bundle_does_not_matter():
    checked = 0
    for inst in corpus(31, 200, n_range=(3, 6), m_range=(3, 12)):
        if inst.m < inst.n:
            continue
        cur_inst, cur = inst, phase_one(inst)
        while max(cur.values2) > min(cur.values2) + 2:
            x2 = min(cur.values2)
            targets = [i for i, v in enumerate(cur.values2) if v == x2]
            keys = set()
            for t in targets:
                nxt_inst, b, _ = convert_step(cur_inst, cur, target=t)
                keys.add(phase_one(nxt_inst, b).key())
            assert len(keys) == 1
            checked += len(targets) > 1
            cur_inst, b, _ = convert_step(cur_inst, cur)
            cur = phase_one(cur_inst, b)
    assert checked > 0


@pytest.mark.parametrize("method", ["screen", "direct"])
def test_methods_reach_the_oracle(method):
    for inst in corpus(41, 120, n_range=(1, 5), m_range=(1, 8)):
        assert solve(inst, method=method).key == brute_force(inst).best_key


def test_threads_do_not_change_the_result():
    for inst in corpus(42, 60, n_range=(3, 8), m_range=(6, 16)):
        one, four = solve(inst), solve(inst, threads=4)
        assert one.allocation == four.allocation


def test_phase_one_splits_off_starved_agents():
    # Agents 1 and 2 only like good 0; one of them must stay empty.
    inst = Instance.from_rows(3, [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    rep = PhaseOneReport()
    alloc = phase_one(inst, report=rep)
    assert rep.starved == [2]
    assert alloc.values2 == [6, 3, 0]


def test_solve_trace_lists_rule_events():
    report = solve(identical(2, 2, 3), trace=True)
    assert report.trace and all("rule" in e for e in report.trace)


def test_solves_bound():
    assert solves_bound(30) == 900 * 16
