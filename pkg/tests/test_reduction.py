import pytest

from twovalue_nsw.core import Allocation, Instance
from twovalue_nsw.reduction import PeelError, freeze_level, peel, reduce
from twovalue_nsw.rules import HeavyGraph, saturate_basic_rules
from twovalue_nsw.solver import PhaseOneReport, phase_one

from conftest import corpus


@pytest.mark.parametrize("x2,p,freeze_k", [(4, 3, 3), (2, 3, 2), (6, 5, 2), (8, 5, 3), (3, 7, 1)])
def test_k0_is_least_multiple_above_x_plus_one(x2, p, freeze_k):
    assert freeze_level(x2, p) == freeze_k
    assert freeze_k * p > x2 + 2 >= (freeze_k - 1) * p


def test_reduce_moves_lights_off_large_bundles():
    inst = Instance.from_rows(3, [[1, 1, 0, 0], [0, 0, 0, 0]])
    alloc = Allocation.from_owners(inst, [0, 0, 0, 0])
    assert reduce(HeavyGraph(inst, alloc)) == 2
    assert alloc.values2 == [6, 4]


def test_peel_rejects_light_goods_above_the_band():
    inst = Instance.from_rows(3, [[1, 1, 0], [0, 0, 0]])
    with pytest.raises(PeelError):
        peel(HeavyGraph(inst, Allocation.from_owners(inst, [0, 0, 0])))
    assert peel(HeavyGraph(inst, Allocation.from_owners(inst, [0, 0, 1]))).frozen == [0]


def test_peel_freezes_a_lone_heavy_bundle():
    # Agent 0 alone likes four heavy goods; the others split the lights.
    inst = Instance.from_rows(3, [[1, 1, 1, 1, 0, 0], [0] * 6, [0] * 6])
    alloc = Allocation.from_owners(inst, [0, 0, 0, 0, 1, 2])
    result = peel(HeavyGraph(inst, alloc))
    assert result.frozen == [0]
    assert result.remaining == [1, 2]
    assert result.levels[0].k == 4


@pytest.mark.parametrize("seed", range(3))
def test_peel_bounds_on_reduced_allocations(seed):
    seen_frozen = 0
    for inst in corpus(100 + seed, 200, n_range=(2, 6), m_range=(2, 12)):
        rep = PhaseOneReport()
        alloc = phase_one(inst, report=rep)
        if rep.peel is None:
            continue
        freeze_k = rep.peel.freeze_k
        for i in rep.peel.remaining:
            assert alloc.heavy_count(i) <= freeze_k - 1
        for i in rep.peel.frozen:
            assert not alloc.light_of[i]
            assert alloc.values2[i] >= freeze_k * inst.p
        seen_frozen += len(rep.peel.frozen)
    assert seen_frozen > 0


def test_saturated_allocation_is_reduced():
    for inst in corpus(7, 150, n_range=(2, 5), m_range=(3, 10)):
        rep = PhaseOneReport()
        alloc = phase_one(inst, report=rep)
        if rep.peel is None:
            continue
        hg = HeavyGraph(inst, alloc.copy(), rep.band + rep.frozen)
        saturate_basic_rules(hg)
        assert reduce(hg) == 0
