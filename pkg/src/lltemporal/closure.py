"""Closure of temporal relations under lex, ll and dual ll."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Relation, WeakOrder, reverse_relation, tp
from .oracle import pair_sign_keys

# Rows of o1 processed per vectorized block; bounds peak memory.
_BLOCK = 512


def _check_lengths(o1: Sequence[int], o2: Sequence[int]) -> None:
    if len(o1) != len(o2):
        raise ValueError(f"weak orders of different lengths: {o1}, {o2}")


def combine_lex(o1: WeakOrder, o2: WeakOrder) -> WeakOrder:
    """Weak order of lex(t1, t2) for tuples t1, t2 realizing o1, o2."""
    _check_lengths(o1, o2)
    return tp(list(zip(o1, o2)))


def _ranks_from_leq(k: int, leq) -> WeakOrder:
    below = [set() for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if leq(j, i) and not leq(i, j):
                below[i].add(j)
    # Element counts are constant on classes and increase across them.
    return tp([len(b) for b in below])


def combine_ll(o1: WeakOrder, o2: WeakOrder, e: int) -> WeakOrder:
    """The weak order o3 built from o1, o2 and a threshold position ``e``.

    ``e`` is a 0-based position.  ``(i, j)`` is in o3 iff

    * ``i <= j`` in both o1 and o2, or
    * ``i < j`` in o1 and ``i <= e`` in o1, or
    * ``i < j`` in o2 and ``e < j`` in o1.
    """
    _check_lengths(o1, o2)
    k = len(o1)
    if not 0 <= e < k:
        raise ValueError(f"index {e} out of range for arity {k}")

    def leq(i: int, j: int) -> bool:
        return (
            (o1[i] <= o1[j] and o2[i] <= o2[j])
            or (o1[i] < o1[j] and o1[i] <= o1[e])
            or (o2[i] < o2[j] and o1[e] < o1[j])
        )

    assert all(leq(i, j) or leq(j, i) for i in range(k) for j in range(k)), (
        "combine_ll produced a non-total relation"
    )
    assert all(
        leq(i, m) or not (leq(i, j) and leq(j, m))
        for i in range(k)
        for j in range(k)
        for m in range(k)
    ), "combine_ll produced a non-transitive relation"
    return _ranks_from_leq(k, leq)


def semantic_ll(o1: WeakOrder, o2: WeakOrder, low: Iterable[int]) -> WeakOrder:
    """Weak order of ll(t1, t2) where ``low`` are the positions with t1 <= 0.

    ``low`` must be a downward closed union of o1-classes (0-based positions).
    """
    _check_lengths(o1, o2)
    low = frozenset(low)
    k = len(o1)
    if any(not 0 <= p < k for p in low):
        raise ValueError(f"low region {sorted(low)} out of range for arity {k}")
    if low:
        cut = max(o1[p] for p in low)
        expected = {p for p in range(k) if o1[p] <= cut}
        if expected != low:
            raise ValueError(
                f"low region {sorted(low)} is not a downward closed union of classes of {o1}"
            )
    keys = [
        (0, o1[i], o2[i]) if i in low else (1, o2[i], o1[i]) for i in range(k)
    ]
    return tp(keys)


def _as_array(relation: Relation) -> np.ndarray:
    return np.array(relation.orders, dtype=np.int64).reshape(-1, relation.arity)


def is_lex_closed(relation: Relation) -> bool:
    if len(relation) == 0:
        return True
    arr = _as_array(relation)
    allowed = pair_sign_keys(arr)
    width = relation.arity + 1
    for start in range(0, len(arr), _BLOCK):
        a = arr[start : start + _BLOCK, None, :]
        keys = (a * width + arr[None, :, :]).reshape(-1, relation.arity)
        if not np.isin(pair_sign_keys(keys), allowed).all():
            return False
    return True


def _ll_keys(a: np.ndarray, b: np.ndarray, cut: int, width: int) -> np.ndarray:
    """Sort keys of ll(t1, t2) for every row pair, t1 shifted so that ranks
    ``<= cut`` are the nonpositive values.

    Low positions order by (o1, o2) below all high ones, which order by
    (o2, o1).  Shapes: ``a`` (s, 1, k), ``b`` (1, N, k) -> (s, N, k).
    """
    low = a <= cut
    return np.where(low, a * width + b, width * width + b * width + a)


def find_ll_violation(
    relation: Relation,
) -> tuple[WeakOrder, WeakOrder, int, WeakOrder] | None:
    """First ``(o1, o2, e, o3)`` with o3 outside the relation, if any.

    Candidates are scanned by o1, then o2, then the o1-class of ``e``.
    """
    if len(relation) == 0:
        return None
    arr = _as_array(relation)
    n, k = arr.shape
    allowed = pair_sign_keys(arr)
    width = k + 1
    for start in range(0, n, _BLOCK):
        a = arr[start : start + _BLOCK, None, :]
        s = a.shape[0]
        bad = np.zeros((s, n, k), dtype=bool)
        for cut in range(k):
            keys = _ll_keys(a, arr[None, :, :], cut, width).reshape(-1, k)
            ok = np.isin(pair_sign_keys(keys), allowed).reshape(s, n)
            # A threshold above the top class of o1 is not realized by any e.
            realized = (a[:, 0, :] == cut).any(axis=1)[:, None]
            bad[:, :, cut] = ~ok & realized
        if bad.any():
            i, j, cut = np.unravel_index(int(np.argmax(bad)), bad.shape)
            o1 = relation.orders[start + i]
            o2 = relation.orders[j]
            e = o1.index(int(cut))
            o3 = combine_ll(o1, o2, e)
            assert o3 not in relation, "vectorized and direct ll disagree"
            return o1, o2, e, o3
    return None


def is_ll_closed(relation: Relation) -> bool:
    return find_ll_violation(relation) is None


def is_dual_ll_closed(relation: Relation) -> bool:
    return is_ll_closed(reverse_relation(relation))


@dataclass(frozen=True)
class ClosureReport:
    name: str
    arity: int
    size: int
    ll: bool
    dual_ll: bool
    lex: bool


def check_relation(relation: Relation) -> ClosureReport:
    return ClosureReport(
        relation.name,
        relation.arity,
        len(relation),
        is_ll_closed(relation),
        is_dual_ll_closed(relation),
        is_lex_closed(relation),
    )


@dataclass(frozen=True)
class LanguageReport:
    relations: tuple[ClosureReport, ...]

    @property
    def ll(self) -> bool:
        return all(r.ll for r in self.relations)

    @property
    def dual_ll(self) -> bool:
        return all(r.dual_ll for r in self.relations)

    @property
    def lex(self) -> bool:
        return all(r.lex for r in self.relations)


def check_language(relations: Iterable[Relation]) -> LanguageReport:
    return LanguageReport(tuple(check_relation(r) for r in relations))
