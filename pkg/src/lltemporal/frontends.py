"""Translations of point-algebra, Ord-Horn and AND/OR precedence constraints
into ll-Horn clauses, and expansion of a clause into an explicit relation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import LlHornClause, Relation, Trivial, normalize_clause
from .oracle import clause_mask, weak_order_array

EXPANSION_LIMIT = 8

POINT_OPS = ("<", "<=", "=", "!=", ">", ">=")


@dataclass(frozen=True)
class PointAtom:
    lhs: int
    op: str
    rhs: int

    def __post_init__(self):
        if self.op not in POINT_OPS:
            raise ValueError(f"unknown point-algebra operator {self.op!r}")


@dataclass(frozen=True)
class OrdHornClause:
    """``(x1=y1 & ...) -> lhs op rhs`` with op one of ``=, <, <=, !=``."""

    premise: tuple[tuple[int, int], ...]
    lhs: int
    op: str
    rhs: int

    def __post_init__(self):
        if self.op not in ("=", "<", "<=", "!="):
            raise ValueError(f"Ord-Horn conclusions use =, <, <= or !=, not {self.op!r}")


def _conclusion(
    x: int, op: str, y: int, premise: tuple[tuple[int, int], ...] = ()
) -> list[LlHornClause]:
    if op == ">":
        x, op, y = y, "<", x
    elif op == ">=":
        x, op, y = y, "<=", x
    if op == "<":
        return [LlHornClause(premise, y, (x,))]
    if op == "<=":
        return [LlHornClause(premise, y, (x,), all_eq=True)]
    if op == "=":
        return [
            LlHornClause(premise, y, (x,), all_eq=True),
            LlHornClause(premise, x, (y,), all_eq=True),
        ]
    # x != y: (premise & x=y) -> false
    return [LlHornClause(premise + ((x, y),))]


def from_point(atom: PointAtom) -> list[LlHornClause]:
    return _conclusion(atom.lhs, atom.op, atom.rhs)


def from_ord_horn(clause: OrdHornClause) -> list[LlHornClause]:
    return _conclusion(clause.lhs, clause.op, clause.rhs, tuple(clause.premise))


def from_precedence(x: int, predecessors: Iterable[int]) -> LlHornClause | Trivial:
    """OR-precedence: x starts after at least one of ``predecessors``."""
    preds = tuple(predecessors)
    if not preds:
        raise ValueError("an OR-precedence constraint needs at least one predecessor")
    return normalize_clause(LlHornClause((), x, preds))


def and_precedence(x: int, predecessors: Iterable[int]) -> list[LlHornClause | Trivial]:
    """AND-precedence: x starts after all of ``predecessors``."""
    return [from_precedence(x, (p,)) for p in predecessors]


@lru_cache(maxsize=4096)
def _expand_local(clause: LlHornClause, d: int) -> tuple[tuple[int, ...], ...]:
    rows = weak_order_array(d)
    return tuple(tuple(int(x) for x in r) for r in rows[clause_mask(clause, rows)])


def clause_to_relation(
    clause: LlHornClause, name: str = "clause", limit: int = EXPANSION_LIMIT
) -> tuple[Relation, tuple[int, ...]]:
    """All weak orders on the clause's variables that satisfy it.

    Positions follow ``clause.scope``: head, tail, then premise variables.
    """
    if isinstance(clause, Trivial):
        raise ValueError(f"cannot expand a {clause.value} clause")
    scope = clause.scope
    d = len(scope)
    if d > limit:
        raise ValueError(
            f"clause has {d} distinct variables; expansion is limited to {limit}"
        )
    local = {v: i for i, v in enumerate(scope)}
    relabeled = LlHornClause(
        tuple((local[a], local[b]) for a, b in clause.premise),
        None if clause.head is None else local[clause.head],
        tuple(local[z] for z in clause.tail),
        clause.all_eq,
        clause.dual,
    )
    return Relation(name, d, _expand_local(relabeled, d)), scope


def expand_clauses(
    clauses: Sequence[LlHornClause], name_prefix: str = "C"
) -> list[tuple[Relation, tuple[int, ...]]]:
    return [
        clause_to_relation(c, f"{name_prefix}{i}") for i, c in enumerate(clauses, 1)
    ]

