"""Domain types for temporal constraint instances over (Q, <).

Values are integer ranks: whether a tuple lies in a temporal relation depends
only on its weak order, so rank vectors are a complete model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

WeakOrder = tuple[int, ...]


class Trivial(enum.Enum):
    """Outcome of normalizing a constraint that carries no structure."""

    TAUTOLOGY = "tautology"
    CONTRADICTION = "contradiction"


def tp(values: Sequence[int]) -> WeakOrder:
    """Canonical rank vector of a value tuple.

    >>> tp((3, 1, 2))
    (2, 0, 1)
    >>> tp((0, 0, 1, 1))
    (0, 0, 1, 1)
    """
    if len(values) == 0:
        raise ValueError("tp of an empty tuple is undefined")
    index = {v: i for i, v in enumerate(sorted(set(values)))}
    return tuple(index[v] for v in values)


def is_canonical(order: Sequence[int]) -> bool:
    return len(order) > 0 and set(order) == set(range(max(order) + 1))


@dataclass(frozen=True)
class Relation:
    """A k-ary temporal relation given by the weak orders of its tuples."""

    name: str
    arity: int
    orders: tuple[WeakOrder, ...]
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"relation {self.name!r}: arity must be positive")
        for o in self.orders:
            if len(o) != self.arity:
                raise ValueError(
                    f"relation {self.name!r}: order {o} does not have length {self.arity}"
                )
        object.__setattr__(self, "_members", frozenset(self.orders))

    def __contains__(self, order) -> bool:
        return tuple(order) in self._members

    def __len__(self) -> int:
        return len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    @property
    def empty(self) -> bool:
        return not self.orders


def normalize_relation(
    orders: Iterable[Sequence[int]], arity: int, name: str = "R"
) -> Relation:
    """Canonicalize, deduplicate and sort a list of rank vectors."""
    canon = set()
    for o in orders:
        if len(o) != arity:
            raise ValueError(f"rank vector {tuple(o)} does not have length {arity}")
        canon.add(tp(o))
    return Relation(name, arity, tuple(sorted(canon)))


@dataclass(frozen=True)
class RelationConstraint:
    scope: tuple[int, ...]
    relation: Relation

    def __post_init__(self):
        if len(self.scope) != self.relation.arity:
            raise ValueError(
                f"scope of length {len(self.scope)} for relation "
                f"{self.relation.name!r} of arity {self.relation.arity}"
            )

    def variables(self) -> tuple[int, ...]:
        return tuple(dict.fromkeys(self.scope))


@dataclass(frozen=True)
class LlHornClause:
    """``(x1=y1 & ... ) -> (z0 > z1 | ... | z0 > zl [| z0 = ... = zl])``.

    ``head`` is z0 and ``tail`` is z1..zl.  With an empty tail the conclusion
    is false and the clause is a disjunction of disequalities; ``head`` is then
    ``None`` after normalization.  ``dual`` flips every ``>`` to ``<``, which
    is the clause shape of the order-reversed language.
    """

    premise: tuple[tuple[int, int], ...] = ()
    head: int | None = None
    tail: tuple[int, ...] = ()
    all_eq: bool = False
    dual: bool = False

    @property
    def scope(self) -> tuple[int, ...]:
        seen = [] if self.head is None else [self.head]
        seen.extend(self.tail)
        for a, b in self.premise:
            seen.extend((a, b))
        return tuple(dict.fromkeys(seen))

    def variables(self) -> tuple[int, ...]:
        return self.scope

    def holds(self, values: Sequence[int]) -> bool:
        if any(values[a] != values[b] for a, b in self.premise):
            return True
        if not self.tail:
            return False
        h = values[self.head]
        if self.dual:
            if any(h < values[z] for z in self.tail):
                return True
        elif any(h > values[z] for z in self.tail):
            return True
        return self.all_eq and all(values[z] == h for z in self.tail)


Constraint = Union[RelationConstraint, LlHornClause]


@dataclass(frozen=True)
class Instance:
    """Variables, declared relations and a conjunction of constraints.

    ``mode`` records which algorithm applies: ``"ll"`` for ll-closed
    constraints, ``"dual"`` for their order-reversed counterparts.
    """

    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...] = ()
    language: Mapping[str, Relation] = field(default_factory=dict)
    mode: str = "ll"

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be unique")
        if self.mode not in ("ll", "dual"):
            raise ValueError(f"unknown mode {self.mode!r}")
        n = len(self.variables)
        for c in self.constraints:
            for v in c.variables():
                if not 0 <= v < n:
                    raise ValueError(f"constraint {c} uses undeclared variable {v}")

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        return self.variables.index(name)


class InstanceBuilder:
    """Convenience for assembling instances by variable name."""

    def __init__(self, variables: Iterable[str] = ()):
        self._vars: dict[str, int] = {}
        self._constraints: list[Constraint] = []
        self._language: dict[str, Relation] = {}
        for v in variables:
            self.var(v)

    def var(self, name: str) -> int:
        if name not in self._vars:
            self._vars[name] = len(self._vars)
        return self._vars[name]

    def relation(self, relation: Relation, *names: str) -> "InstanceBuilder":
        self._language.setdefault(relation.name, relation)
        scope = tuple(self.var(v) for v in names)
        self._constraints.append(RelationConstraint(scope, relation))
        return self

    def clause(
        self,
        premise: Iterable[tuple[str, str]] = (),
        head: str | None = None,
        tail: Iterable[str] = (),
        all_eq: bool = False,
        dual: bool = False,
    ) -> "InstanceBuilder":
        prem = tuple((self.var(a), self.var(b)) for a, b in premise)
        h = None if head is None else self.var(head)
        self._constraints.append(
            LlHornClause(prem, h, tuple(self.var(t) for t in tail), all_eq, dual)
        )
        return self

    def add(self, constraint: Constraint) -> "InstanceBuilder":
        self._constraints.append(constraint)
        return self

    def build(self, mode: str = "ll") -> Instance:
        return Instance(
            tuple(self._vars), tuple(self._constraints), dict(self._language), mode
        )


def normalize_clause(clause: LlHornClause) -> LlHornClause | Trivial:
    """Resolve repeated variables in a clause.

    Reflexive premise pairs and tail entries equal to the head are dropped,
    as are tail entries the premise forces equal to the head (under the
    premise such a disjunct is false and its equality conjunct redundant).
    Tails of length one in dual form are rewritten to the ``>`` form.
    """
    premise = tuple(
        dict.fromkeys((min(a, b), max(a, b)) for a, b in clause.premise if a != b)
    )
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for a, b in premise:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    head = clause.head
    tail: tuple[int, ...] = ()
    if head is not None:
        hr = find(head)
        tail = tuple(dict.fromkeys(z for z in clause.tail if find(z) != hr))
    if not tail:
        if clause.all_eq:
            return Trivial.TAUTOLOGY
        if not premise:
            return Trivial.CONTRADICTION
        return LlHornClause(premise)
    dual = clause.dual
    if dual and len(tail) == 1:
        head, tail, dual = tail[0], (head,), False
    return LlHornClause(premise, head, tail, clause.all_eq, dual)


def normalize_constraint(
    constraint: RelationConstraint,
) -> RelationConstraint | Trivial:
    """Collapse repeated scope variables; drop unary constraints.

    Only orders in which repeated positions share a rank survive, and the
    duplicate positions are projected out.
    """
    rel = constraint.relation
    if rel.empty:
        return Trivial.CONTRADICTION
    scope = constraint.scope
    first: dict[int, int] = {}
    for pos, v in enumerate(scope):
        first.setdefault(v, pos)
    if len(first) == len(scope):
        if len(scope) == 1:
            return Trivial.TAUTOLOGY
        return constraint
    keep = list(first.values())
    orders = set()
    for o in rel.orders:
        if all(o[pos] == o[first[v]] for pos, v in enumerate(scope)):
            orders.add(tp([o[p] for p in keep]))
    if not orders:
        return Trivial.CONTRADICTION
    if len(keep) == 1:
        return Trivial.TAUTOLOGY
    new_rel = Relation(rel.name, len(keep), tuple(sorted(orders)))
    return RelationConstraint(tuple(first), new_rel)


def satisfies(constraint: Constraint, values: Sequence[int]) -> bool:
    if isinstance(constraint, LlHornClause):
        return constraint.holds(values)
    return tp([values[v] for v in constraint.scope]) in constraint.relation


def verify_assignment(instance: Instance, assignment: Sequence[int]) -> bool:
    """True iff the value vector (indexed by variable) satisfies every constraint."""
    if len(assignment) != instance.n:
        raise ValueError(
            f"assignment has {len(assignment)} values for {instance.n} variables"
        )
    return all(satisfies(c, assignment) for c in instance.constraints)


def reverse_order(order: Sequence[int]) -> WeakOrder:
    top = max(order)
    return tuple(top - r for r in order)


def reverse_relation(relation: Relation) -> Relation:
    return Relation(
        relation.name,
        relation.arity,
        tuple(sorted(reverse_order(o) for o in relation.orders)),
    )


def reverse_clause(clause: LlHornClause) -> LlHornClause:
    return LlHornClause(
        clause.premise, clause.head, clause.tail, clause.all_eq, not clause.dual
    )


def reverse_constraint(constraint: Constraint) -> Constraint:
    if isinstance(constraint, LlHornClause):
        return reverse_clause(constraint)
    return RelationConstraint(constraint.scope, reverse_relation(constraint.relation))


def reverse_instance(instance: Instance) -> Instance:
    return Instance(
        instance.variables,
        tuple(reverse_constraint(c) for c in instance.constraints),
        {name: reverse_relation(r) for name, r in instance.language.items()},
        "ll" if instance.mode == "dual" else "dual",
    )


def reverse(obj):
    """Mirror the order: maps ll-closed objects to dual-ll-closed ones and back."""
    if isinstance(obj, Instance):
        return reverse_instance(obj)
    if isinstance(obj, Relation):
        return reverse_relation(obj)
    if isinstance(obj, (RelationConstraint, LlHornClause)):
        return reverse_constraint(obj)
    return reverse_order(obj)
