import pytest
from hypothesis import given, strategies as st

from twovalue_nsw.core import (
    Allocation,
    AllocationError,
    Band,
    Instance,
    band_of,
    check_allocation,
    compute_values,
    nsw_compare,
    nsw_key,
)


def test_instance_rejects_even_or_small_p():
    for p in (1, 2, 4):
        with pytest.raises(ValueError):
            Instance.from_rows(p, [[1]])


def test_instance_rejects_ragged_matrix():
    with pytest.raises(ValueError):
        Instance(2, 2, 3, ((True, False), (True,)))


def test_admirers_and_light_goods():
    inst = Instance.from_rows(3, [[1, 0, 0], [1, 1, 0]])
    assert inst.admirers == ((0, 1), (1,), ())
    assert inst.heavy_goods == [0, 1]
    assert inst.light_goods == [2]


def test_masked_clears_columns():
    inst = Instance.from_rows(5, [[1, 1], [0, 1]]).masked([1])
    assert inst.heavy == ((True, False), (False, False))


def test_values_in_half_units():
    inst = Instance.from_rows(3, [[1, 0, 0], [0, 0, 0]])
    alloc = Allocation.from_owners(inst, [0, 0, 1])
    assert alloc.values2 == [5, 2]
    check_allocation(inst, alloc)


def test_heavy_typing_needs_an_admirer():
    inst = Instance.from_rows(3, [[1], [0]])
    with pytest.raises(AllocationError):
        Allocation.from_owners(inst, [1], [True])


def test_unassigned_good_is_reported():
    inst = Instance.from_rows(3, [[0, 0]])
    alloc = Allocation.empty(inst)
    with pytest.raises(AllocationError):
        compute_values(inst, alloc)


def test_move_keeps_bookkeeping():
    inst = Instance.from_rows(3, [[1, 0], [1, 0]])
    alloc = Allocation.from_owners(inst, [0, 0])
    alloc.move(0, 1, True)
    assert alloc.values2 == [2, 3]
    check_allocation(inst, alloc)


def test_zero_count_dominates_product():
    assert nsw_key([0, 100]) < nsw_key([2, 2])
    assert nsw_key([0, 0, 100]) < nsw_key([0, 2, 2])
    assert nsw_key([0, 6]) > nsw_key([0, 5])


@given(st.lists(st.integers(0, 40), min_size=1, max_size=6), st.lists(st.integers(0, 40), min_size=1, max_size=6))
def test_compare_is_antisymmetric(a, b):
    ka, kb = nsw_key(a), nsw_key(b)
    assert nsw_compare(ka, kb) == -nsw_compare(kb, ka)
    if not ka.zeros and not kb.zeros:
        assert nsw_compare(ka, kb) == (ka.product > kb.product) - (ka.product < kb.product)


def test_band_classification():
    v = [4, 5, 6, 7, 3]
    assert [band_of(v, i, 4) for i in range(5)] == [Band.AT_MIN, Band.HALF_UP, Band.ONE_UP, Band.ABOVE, Band.BELOW]


def test_log10_of_zero_key_is_minus_infinity():
    assert nsw_key([0, 3]).log10() == float("-inf")
