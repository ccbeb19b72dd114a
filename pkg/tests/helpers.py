"""Random instance generators shared by the test modules."""

from __future__ import annotations

import random

from lltemporal.core import (
    Instance,
    LlHornClause,
    RelationConstraint,
    Trivial,
    normalize_clause,
)
from lltemporal.frontends import clause_to_relation


def random_clause(rng: random.Random, n: int, dual: bool = False) -> LlHornClause:
    """A normalized clause over variables ``0..n-1`` that is neither trivial
    nor an unconditional contradiction.  Needs ``n >= 2``."""
    while True:
        premise = tuple(
            (rng.randrange(n), rng.randrange(n)) for _ in range(rng.choice((0, 0, 1, 2)))
        )
        if rng.random() < 0.15:
            clause = LlHornClause(premise)
        else:
            head = rng.randrange(n)
            tail = tuple(rng.randrange(n) for _ in range(rng.randint(1, 3)))
            clause = LlHornClause(premise, head, tail, rng.random() < 0.35, dual)
        norm = normalize_clause(clause)
        if isinstance(norm, Trivial) or not norm.scope:
            continue
        return norm


def names(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(n))


def clause_instance(rng: random.Random, n: int, m: int, dual: bool = False) -> Instance:
    clauses = tuple(random_clause(rng, n, dual) for _ in range(m))
    return Instance(names(n), clauses, {}, "dual" if dual else "ll")


def as_relations(instance: Instance) -> Instance:
    """Replace each clause by the explicit relation it defines."""
    constraints = []
    language = {}
    for i, c in enumerate(instance.constraints, 1):
        if isinstance(c, LlHornClause):
            rel, scope = clause_to_relation(c, f"C{i}")
            language[rel.name] = rel
            constraints.append(RelationConstraint(scope, rel))
        else:
            constraints.append(c)
    return Instance(instance.variables, tuple(constraints), language, instance.mode)


def paired_corpus(seed: int, count: int, max_vars: int = 5):
    """Yield ``(clause_form, relation_form)`` pairs of small instances."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(2, max_vars)
        m = rng.randint(1, 2 * n + 2)
        inst = clause_instance(rng, n, m)
        yield inst, as_relations(inst)


def planted_instance(n: int, m: int, seed: int) -> Instance:
    """``m`` random clauses all satisfied by a hidden injective assignment."""
    rng = random.Random(seed)
    value = list(range(n))
    rng.shuffle(value)
    clauses = []
    while len(clauses) < m:
        head = rng.randrange(n)
        tail = tuple(rng.randrange(n) for _ in range(rng.randint(1, 3)))
        premise = ()
        if rng.random() < 0.2:
            premise = ((rng.randrange(n), rng.randrange(n)),)
        clause = LlHornClause(premise, head, tail, rng.random() < 0.3)
        if not clause.holds(value):
            continue
        norm = normalize_clause(clause)
        if isinstance(norm, Trivial):
            continue
        clauses.append(norm)
    return Instance(names(n), tuple(clauses))
