import random

import pytest

from twovalue_nsw.parity import (
    ParityProblem,
    brute_parity,
    build_compact_gadget,
    build_gadget,
    compact_applicable,
    solve_parity,
)


def random_problem(rng, n_max=8, e_max=14):
    n = rng.randint(1, n_max)
    pairs = [(u, w) for u in range(n) for w in range(u + 1, n)]
    rng.shuffle(pairs)
    edges = tuple(pairs[: rng.randint(0, min(e_max, len(pairs)))])
    base = tuple(rng.randint(0, 3) for _ in range(n))
    slack = tuple(rng.randint(0, 2) for _ in range(n))
    return ParityProblem(n, edges, base, slack)


def random_unit_problem(rng):
    """Agent/good style: goods need degree exactly 1, agents get arbitrary parity ranges."""
    na, ng = rng.randint(1, 4), rng.randint(0, 6)
    edges = tuple((a, na + g) for g in range(ng) for a in range(na) if rng.random() < 0.5)
    base = tuple(rng.randint(0, 2) for _ in range(na)) + (1,) * ng
    slack = tuple(rng.randint(0, 2) for _ in range(na)) + (0,) * ng
    return ParityProblem(na + ng, edges, base, slack)


def test_validation():
    with pytest.raises(ValueError):
        ParityProblem(2, ((0, 0),), (0, 0), (0, 0))
    with pytest.raises(ValueError):
        ParityProblem(2, ((0, 1), (1, 0)), (0, 0), (0, 0))
    with pytest.raises(ValueError):
        ParityProblem(2, ((0, 1),), (0,), (0, 0))


def test_allowed_degrees():
    prob = ParityProblem(1, (), (1,), (2,))
    assert [d for d in range(7) if prob.allows(0, d)] == [1, 3, 5]


def test_triangle_with_all_degrees_two():
    prob = ParityProblem(3, ((0, 1), (1, 2), (0, 2)), (2, 2, 2), (0, 0, 0))
    assert sorted(solve_parity(prob, "cornuejols")) == [0, 1, 2]


def test_odd_total_degree_is_infeasible():
    prob = ParityProblem(3, ((0, 1), (1, 2), (0, 2)), (1, 1, 1), (0, 0, 0))
    assert solve_parity(prob, "cornuejols") is None
    assert brute_parity(prob) is None


def test_base_above_degree_has_no_gadget():
    assert build_gadget(ParityProblem(2, ((0, 1),), (2, 0), (0, 0))) is None


def test_path_forces_alternate_edges():
    # Path 0-1-2-3 with end degrees 1 and inner degrees in {1}: only the two outer edges work.
    prob = ParityProblem(4, ((0, 1), (1, 2), (2, 3)), (1, 1, 1, 1), (0, 0, 0, 0))
    assert solve_parity(prob, "cornuejols") == [0, 2]


@pytest.mark.parametrize("seed", range(3))
def test_cornuejols_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(80):
        prob = random_problem(rng)
        expected = brute_parity(prob)
        got = solve_parity(prob, "cornuejols")
        assert (got is None) == (expected is None)
        if got is not None:
            assert prob.feasible(got)


@pytest.mark.parametrize("seed", range(3))
def test_compact_agrees_with_both(seed):
    rng = random.Random(50 + seed)
    for _ in range(80):
        prob = random_unit_problem(rng)
        assert compact_applicable(prob)
        expected = brute_parity(prob) is not None
        assert (solve_parity(prob, "compact") is not None) == expected
        assert (solve_parity(prob, "cornuejols") is not None) == expected


def test_compact_refuses_general_graphs():
    prob = ParityProblem(3, ((0, 1), (1, 2)), (2, 2, 2), (0, 0, 0))
    assert not compact_applicable(prob)
    with pytest.raises(ValueError):
        build_compact_gadget(prob)


def test_warm_start_does_not_change_feasibility():
    rng = random.Random(8)
    for _ in range(150):
        prob = random_unit_problem(rng) if rng.random() < 0.5 else random_problem(rng)
        hint = [e for e in range(len(prob.edges)) if rng.random() < 0.5]
        cold = solve_parity(prob) is not None
        warm = solve_parity(prob, hint=hint)
        assert (warm is not None) == cold
        if warm is not None:
            assert prob.feasible(warm)


def test_warm_start_is_a_matching():
    rng = random.Random(11)
    for _ in range(100):
        prob = random_problem(rng)
        g = build_gadget(prob)
        if g is None:
            continue
        mate = g.warm_start(range(len(prob.edges)), prob)
        adj = g.adjacency()
        for v, w in enumerate(mate):
            if w != -1:
                assert mate[w] == v and w in adj[v]


def test_brute_force_limit():
    prob = ParityProblem(8, tuple((u, w) for u in range(8) for w in range(u + 1, 8)), (0,) * 8, (0,) * 8)
    with pytest.raises(ValueError):
        brute_parity(prob, max_edges=20)
