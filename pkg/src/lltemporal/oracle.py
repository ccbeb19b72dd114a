"""Exhaustive ground truth for small instances."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import Instance, LlHornClause, WeakOrder

DEFAULT_LIMIT = 8


class LimitExceeded(ValueError):
    pass


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise LimitExceeded(
            f"{n} variables exceed the enumeration limit of {limit}; "
            "raise the limit explicitly to proceed"
        )


def enumerate_weak_orders(n: int, limit: int = DEFAULT_LIMIT) -> Iterator[WeakOrder]:
    """Every canonical rank vector of length n, in lexicographic order.

    A prefix is only extended while the ranks still missing below its maximum
    fit into the remaining positions, so every leaf is a weak order and each
    ordered set partition is produced exactly once.
    """
    if n < 1:
        raise ValueError("n must be positive")
    _check_limit(n, limit)
    ranks = [0] * n
    counts = [0] * n

    def rec(pos: int, top: int, missing: int) -> Iterator[WeakOrder]:
        if pos == n:
            yield tuple(ranks)
            return
        left = n - pos - 1
        for r in range(n):
            if r > top:
                new_top, new_missing = r, missing + (r - top - 1)
            else:
                new_top = top
                new_missing = missing - (1 if counts[r] == 0 else 0)
            if new_missing > left:
                if r > top:
                    break
                continue
            ranks[pos] = r
            counts[r] += 1
            yield from rec(pos + 1, new_top, new_missing)
            counts[r] -= 1

    # top = -1: nothing placed yet, so rank 0 is the only admissible start.
    yield from rec(0, -1, 0)


@lru_cache(maxsize=None)
def weak_order_array(n: int) -> np.ndarray:
    """All weak orders on n positions as a read-only (count, n) array."""
    arr = np.array(list(enumerate_weak_orders(n, limit=max(n, DEFAULT_LIMIT))),
                   dtype=np.int8).reshape(-1, n)
    arr.flags.writeable = False
    return arr


def pair_sign_keys(rows: np.ndarray) -> np.ndarray:
    """Encode each row's weak order by the signs of all pairwise differences."""
    k = rows.shape[1]
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    rows = rows.astype(np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            keys = keys * 3 + (np.sign(rows[:, i] - rows[:, j]) + 1)
    return keys


def clause_mask(clause: LlHornClause, cols: np.ndarray) -> np.ndarray:
    """Rows of ``cols`` (values indexed by variable) satisfying the clause."""
    n_rows = cols.shape[0]
    premise = np.ones(n_rows, dtype=bool)
    for a, b in clause.premise:
        premise &= cols[:, a] == cols[:, b]
    concl = np.zeros(n_rows, dtype=bool)
    if clause.tail:
        h = cols[:, clause.head]
        eq = np.ones(n_rows, dtype=bool)
        for z in clause.tail:
            concl |= (h < cols[:, z]) if clause.dual else (h > cols[:, z])
            eq &= h == cols[:, z]
        if clause.all_eq:
            concl |= eq
    return ~premise | concl


def satisfying_rows(instance: Instance, rows: np.ndarray) -> np.ndarray:
    mask = np.ones(rows.shape[0], dtype=bool)
    for c in instance.constraints:
        if isinstance(c, LlHornClause):
            mask &= clause_mask(c, rows)
        else:
            if c.relation.empty:
                return np.zeros(rows.shape[0], dtype=bool)
            allowed = pair_sign_keys(np.array(c.relation.orders, dtype=np.int64))
            mask &= np.isin(pair_sign_keys(rows[:, list(c.scope)]), allowed)
        if not mask.any():
            break
    return mask


@dataclass(frozen=True)
class OracleReport:
    satisfiable: bool
    solution_count: int
    forced_equal: tuple[tuple[str, ...], ...] | None
    witness: WeakOrder | None


def brute_solve(instance: Instance, limit: int = DEFAULT_LIMIT) -> OracleReport:
    """Test every weak order on the instance's variables.

    ``forced_equal`` groups variables tied in every satisfying order.
    """
    n = instance.n
    _check_limit(n, limit)
    if n == 0:
        return OracleReport(True, 1, (), ())
    rows = weak_order_array(n)
    sols = rows[satisfying_rows(instance, rows)]
    count = int(sols.shape[0])
    if count == 0:
        return OracleReport(False, 0, None, None)
    classes: list[list[int]] = []
    for v in range(n):
        for cls in classes:
            if np.array_equal(sols[:, cls[0]], sols[:, v]):
                cls.append(v)
                break
        else:
            classes.append([v])
    forced = tuple(tuple(instance.variables[v] for v in cls) for cls in classes)
    return OracleReport(True, count, forced, tuple(int(x) for x in sols[0]))
