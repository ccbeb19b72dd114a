"""Named temporal relations, built by filtering all weak orders of an arity."""

from __future__ import annotations

from typing import Callable, Sequence

from .core import Relation
from .oracle import enumerate_weak_orders


def from_predicate(
    name: str, arity: int, pred: Callable[[Sequence[int]], bool]
) -> Relation:
    orders = tuple(o for o in enumerate_weak_orders(arity) if pred(o))
    return Relation(name, arity, orders)


LT = from_predicate("lt", 2, lambda t: t[0] < t[1])
LEQ = from_predicate("leq", 2, lambda t: t[0] <= t[1])
EQ = from_predicate("eq", 2, lambda t: t[0] == t[1])
NEQ = from_predicate("neq", 2, lambda t: t[0] != t[1])
FULL2 = from_predicate("full", 2, lambda t: True)

R_MIN = from_predicate("Rmin", 3, lambda t: t[0] > t[1] or t[0] > t[2])
R_MAX = from_predicate("Rmax", 3, lambda t: t[0] < t[1] or t[0] < t[2])
BETWEENNESS = from_predicate(
    "Betw", 3, lambda t: t[0] < t[1] < t[2] or t[2] < t[1] < t[0]
)
CYCLIC = from_predicate(
    "Cyc",
    3,
    lambda t: t[0] < t[1] < t[2] or t[1] < t[2] < t[0] or t[2] < t[0] < t[1],
)

# The 4-ary example relation (x=y<u=v) or (x<y<u<v).
PHI1_R = Relation("R", 4, ((0, 0, 1, 1), (0, 1, 2, 3)))

POINT_ALGEBRA = (LT, LEQ, EQ, NEQ)
