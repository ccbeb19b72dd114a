import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from helpers import clause_instance
from lltemporal.core import Instance, InstanceBuilder, RelationConstraint, is_canonical, verify_assignment
from lltemporal.oracle import (
    LimitExceeded,
    brute_solve,
    enumerate_weak_orders,
    weak_order_array,
)
from lltemporal.relations import LT, PHI1_R


def fubini(n: int) -> int:
    """Ordered set partitions: choose the first block, recurse on the rest."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


@pytest.mark.parametrize("n, count", [(1, 1), (2, 3), (3, 13), (4, 75), (5, 541), (6, 4683)])
def test_enumeration_counts(n, count):
    orders = list(enumerate_weak_orders(n))
    assert len(orders) == count == fubini(n)
    assert len(set(orders)) == count
    assert orders == sorted(orders)
    assert all(is_canonical(o) for o in orders)


def test_enumeration_limit():
    with pytest.raises(LimitExceeded):
        list(enumerate_weak_orders(9))
    assert sum(1 for _ in enumerate_weak_orders(7)) == fubini(7)
    with pytest.raises(ValueError):
        list(enumerate_weak_orders(0))


def test_weak_order_array_read_only():
    arr = weak_order_array(3)
    assert arr.shape == (13, 3)
    with pytest.raises(ValueError):
        arr[0, 0] = 5


def test_phi1_oracle():
    b = InstanceBuilder()
    b.relation(PHI1_R, "x1", "x2", "y1", "y2")
    b.relation(PHI1_R, "x1", "x2", "y2", "y3")
    b.relation(PHI1_R, "x1", "x2", "y3", "y1")
    rep = brute_solve(b.build())
    assert rep.satisfiable
    assert rep.forced_equal == (("x1", "x2"), ("y1", "y2", "y3"))
    assert rep.witness == (0, 0, 1, 1, 1)


def test_two_cycle_unsat():
    inst = Instance(("x", "y"), (RelationConstraint((0, 1), LT), RelationConstraint((1, 0), LT)))
    rep = brute_solve(inst)
    assert not rep.satisfiable and rep.solution_count == 0 and rep.forced_equal is None


def test_empty_instance():
    rep = brute_solve(Instance(("a", "b")))
    assert rep.satisfiable and rep.solution_count == 3
    assert rep.forced_equal == (("a",), ("b",))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_empty_instance_counts_match_enumeration(n):
    inst = Instance(tuple(f"v{i}" for i in range(n)))
    assert brute_solve(inst).solution_count == fubini(n)


def test_oracle_limit():
    with pytest.raises(LimitExceeded):
        brute_solve(Instance(tuple(f"v{i}" for i in range(9))))


def test_vectorized_check_matches_verify_assignment():
    rng = random.Random(2)
    for _ in range(150):
        inst = clause_instance(rng, rng.randint(2, 4), rng.randint(1, 6))
        rep = brute_solve(inst)
        sols = [o for o in enumerate_weak_orders(inst.n) if verify_assignment(inst, o)]
        assert rep.solution_count == len(sols)
        if sols:
            assert rep.witness == sols[0]
            for group in rep.forced_equal:
                assert all(len({o[inst.index(v)] for v in group}) == 1 for o in sols)


@settings(max_examples=60)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_forced_equal_is_finest(n, seed):
    rng = random.Random(seed)
    inst = clause_instance(rng, n, rng.randint(1, 6))
    rep = brute_solve(inst)
    if not rep.satisfiable:
        return
    sols = [o for o in enumerate_weak_orders(n) if verify_assignment(inst, o)]
    groups = {v: i for i, g in enumerate(rep.forced_equal) for v in g}
    for a in range(n):
        for b in range(n):
            tied = all(o[a] == o[b] for o in sols)
            assert tied == (groups[inst.variables[a]] == groups[inst.variables[b]])
