"""Satisfiability of ll-closed temporal constraints by sink elimination.

``spec`` repeatedly removes sinks of the constraint graph (projecting the
instance onto the remaining variables).  When everything is removed the
instance has an injective solution; otherwise a sink component, if any, is a
set of variables equal in all solutions, and with no sink component left the
instance is unsatisfiable.  ``solve`` contracts equal sets until ``spec``
succeeds or fails.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    Constraint,
    Instance,
    LlHornClause,
    RelationConstraint,
    Trivial,
    WeakOrder,
    normalize_clause,
    normalize_constraint,
    reverse_instance,
    tp,
    verify_assignment,
)


class Unsatisfiable(Exception):
    """Raised when normalization or contraction derives an empty constraint."""


class ModelCheckFailed(RuntimeError):
    """The extracted model violates a constraint of the input instance."""


# ---------------------------------------------------------------------------
# Per-constraint graph data


def _relation_profile(
    orders: Iterable[WeakOrder], k: int
) -> tuple[list[bool], list[frozenset[int]]]:
    meet: list[frozenset[int] | None] = [None] * k
    for o in orders:
        mins = frozenset(p for p in range(k) if o[p] == 0)
        for p in mins:
            m = meet[p]
            meet[p] = mins if m is None else m & mins
    everyone = frozenset(range(k))
    blocked = [m is None for m in meet]
    targets = [
        (everyone if m is None else m) - {p} for p, m in enumerate(meet)
    ]
    return blocked, targets


def _clause_kind(clause: LlHornClause) -> str | None:
    """``"block"``, ``"edges"`` or ``None`` for clauses without graph effect."""
    if clause.premise or not clause.tail:
        return None
    return "edges" if clause.all_eq else "block"


def blocked_positions(constraint: Constraint) -> frozenset[int]:
    """Scope positions whose variable can never take the constraint's minimum."""
    if isinstance(constraint, LlHornClause):
        if _clause_kind(constraint) == "block":
            return frozenset({constraint.scope.index(constraint.head)})
        return frozenset()
    blocked, _ = _relation_profile(constraint.relation.orders, constraint.relation.arity)
    return frozenset(p for p, b in enumerate(blocked) if b)


def edge_targets(constraint: Constraint, position: int) -> frozenset[int]:
    """Positions forced to be minimal whenever ``position`` is minimal.

    A blocked position of a relation constraint points to every other
    position, since the condition holds vacuously.
    """
    if isinstance(constraint, LlHornClause):
        scope = constraint.scope
        if _clause_kind(constraint) == "edges" and scope[position] == constraint.head:
            return frozenset(scope.index(z) for z in constraint.tail)
        return frozenset()
    _, targets = _relation_profile(constraint.relation.orders, constraint.relation.arity)
    return targets[position]


# ---------------------------------------------------------------------------
# Explicit constraint graph


@dataclass(frozen=True)
class ConstraintGraph:
    names: tuple[str, ...]
    succ: Mapping[int, tuple[int, ...]]
    blocked: frozenset[int]

    @property
    def vertices(self) -> range:
        return range(len(self.names))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in self.succ.get(u, ())]

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        for v in self.vertices:
            label = self.names[v] + (" [blocked]" if v in self.blocked else "")
            lines.append(f'  "{self.names[v]}" [label="{label}"];')
        for u, v in self.edges():
            lines.append(f'  "{self.names[u]}" -> "{self.names[v]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(instance: Instance) -> ConstraintGraph:
    succ: dict[int, set[int]] = {}
    blocked: set[int] = set()
    for c in instance.constraints:
        if isinstance(c, LlHornClause):
            kind = _clause_kind(c)
            if kind == "block":
                blocked.add(c.head)
            elif kind == "edges":
                succ.setdefault(c.head, set()).update(c.tail)
            continue
        scope = c.scope
        flags, targets = _relation_profile(c.relation.orders, c.relation.arity)
        for p, v in enumerate(scope):
            if flags[p]:
                blocked.add(v)
            if targets[p]:
                succ.setdefault(v, set()).update(scope[q] for q in targets[p])
    return ConstraintGraph(
        instance.variables,
        {u: tuple(sorted(vs)) for u, vs in sorted(succ.items())},
        frozenset(blocked),
    )


def strongly_connected_components(
    vertices: Iterable[int], succ: Mapping[int, Sequence[int]]
) -> list[list[int]]:
    """Tarjan's algorithm without recursion; components in reverse topological order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ.get(root, ())))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


def _sink_components(
    vertices: Iterable[int], succ: Mapping[int, Sequence[int]], blocked
) -> list[list[int]]:
    comps = strongly_connected_components(vertices, succ)
    result = []
    for comp in comps:
        members = set(comp)
        if any(v in blocked for v in comp):
            continue
        if any(w not in members for v in comp for w in succ.get(v, ())):
            continue
        result.append(comp)
    result.sort(key=lambda c: c[0])
    return result


def sinks_and_sink_components(
    graph: ConstraintGraph,
) -> tuple[list[int], list[list[int]]]:
    """Sinks, and all sink components (sinks included as singletons)."""
    comps = _sink_components(graph.vertices, graph.succ, graph.blocked)
    sinks = [c[0] for c in comps if len(c) == 1]
    return sinks, comps


# ---------------------------------------------------------------------------
# Instance transformations


def _reindex(instance: Instance, keep: Sequence[int]) -> dict[int, int]:
    return {old: new for new, old in enumerate(keep)}


def _remap_clause(clause: LlHornClause, m: Mapping[int, int]) -> LlHornClause:
    return LlHornClause(
        tuple((m[a], m[b]) for a, b in clause.premise),
        None if clause.head is None else m[clause.head],
        tuple(m[z] for z in clause.tail),
        clause.all_eq,
        clause.dual,
    )


def _project_relation(
    constraint: RelationConstraint, x: int
) -> RelationConstraint | None:
    pos = constraint.scope.index(x)
    rel = constraint.relation
    if rel.arity == 1:
        return None
    orders = sorted({tp(o[:pos] + o[pos + 1 :]) for o in rel.orders})
    scope = constraint.scope[:pos] + constraint.scope[pos + 1 :]
    if len(scope) == 1:
        return None
    return RelationConstraint(scope, type(rel)(rel.name, len(scope), tuple(orders)))


def project(instance: Instance, x: int) -> Instance:
    """Existentially eliminate variable ``x``; later variables shift down by one.

    A normalized clause mentioning ``x`` always has a disjunct that some
    value of ``x`` satisfies, so such clauses are dropped outright.
    """
    if not 0 <= x < instance.n:
        raise ValueError(f"variable index {x} not in instance")
    keep = [v for v in range(instance.n) if v != x]
    m = _reindex(instance, keep)
    constraints: list[Constraint] = []
    for c in instance.constraints:
        if x in c.variables():
            if isinstance(c, LlHornClause):
                continue
            c = _project_relation(c, x)
            if c is None:
                continue
        if isinstance(c, LlHornClause):
            constraints.append(_remap_clause(c, m))
        else:
            constraints.append(
                RelationConstraint(tuple(m[v] for v in c.scope), c.relation)
            )
    return Instance(
        tuple(instance.variables[v] for v in keep),
        tuple(constraints),
        instance.language,
        instance.mode,
    )


def _normalized(c: Constraint) -> Constraint | Trivial:
    if isinstance(c, LlHornClause):
        return normalize_clause(c)
    return normalize_constraint(c)


def normalize_instance(instance: Instance) -> Instance:
    """Normalize every constraint; raises :class:`Unsatisfiable` on an empty one."""
    out = []
    for c in instance.constraints:
        n = _normalized(c)
        if n is Trivial.CONTRADICTION:
            raise Unsatisfiable(f"constraint {_describe(instance, c)} is unsatisfiable")
        if n is not Trivial.TAUTOLOGY:
            out.append(n)
    return Instance(instance.variables, tuple(out), instance.language, instance.mode)


class UnionFind:
    def __init__(self, items: Iterable[str] = ()):
        self.parent: dict[str, str] = {}
        for x in items:
            self.parent[x] = x

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra

    def classes(self, order: Sequence[str]) -> tuple[tuple[str, ...], ...]:
        groups: dict[str, list[str]] = {}
        for x in order:
            groups.setdefault(self.find(x), []).append(x)
        return tuple(tuple(g) for g in groups.values())


def contract(
    instance: Instance, group: Iterable[int], uf: UnionFind | None = None
) -> Instance:
    """Replace every variable of ``group`` by its smallest member.

    Merged variables leave the variable table.  Raises :class:`Unsatisfiable`
    when a constraint becomes empty.
    """
    group = sorted(set(group))
    if len(group) < 2:
        raise ValueError("contraction needs at least two variables")
    rep = group[0]
    gone = set(group[1:])
    keep = [v for v in range(instance.n) if v not in gone]
    m = _reindex(instance, keep)
    for v in gone:
        m[v] = m[rep]
    if uf is not None:
        for v in gone:
            uf.union(instance.variables[rep], instance.variables[v])
    constraints: list[Constraint] = []
    for c in instance.constraints:
        if isinstance(c, LlHornClause):
            c = _remap_clause(c, m)
        else:
            c = RelationConstraint(tuple(m[v] for v in c.scope), c.relation)
        n = _normalized(c)
        if n is Trivial.CONTRADICTION:
            raise Unsatisfiable("contraction emptied a constraint")
        if n is not Trivial.TAUTOLOGY:
            constraints.append(n)
    return Instance(
        tuple(instance.variables[v] for v in keep),
        tuple(constraints),
        instance.language,
        instance.mode,
    )


# ---------------------------------------------------------------------------
# Spec


@dataclass(frozen=True)
class Injective:
    """All variables were eliminated as sinks, in this order."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class EqualSet:
    """A sink component: these variables are equal in every solution."""

    members: tuple[int, ...]


@dataclass(frozen=True)
class NoSolution:
    remaining: tuple[int, ...] = ()


SpecOutcome = Injective | EqualSet | NoSolution

GraphTrace = Callable[[ConstraintGraph], None]


def spec_reference(instance: Instance, trace: GraphTrace | None = None) -> SpecOutcome:
    """Direct transcription: rebuild the graph after every projection."""
    idx = {name: i for i, name in enumerate(instance.variables)}
    current = instance
    order: list[int] = []
    while True:
        graph = build_graph(current)
        if trace is not None:
            trace(graph)
        sinks, comps = sinks_and_sink_components(graph)
        if not sinks:
            break
        s = sinks[0]
        order.append(idx[current.variables[s]])
        current = project(current, s)
    if current.n == 0:
        return Injective(tuple(order))
    if comps:
        return EqualSet(tuple(idx[current.variables[v]] for v in comps[0]))
    return NoSolution(tuple(idx[name] for name in current.variables))


class _Spec:
    """Incremental sink elimination with per-variable counters.

    ``blocked[v]`` counts live constraints blocking v and ``out[v]`` counts
    live constraints giving v an outgoing edge (from an unblocked position).
    Projection only ever removes blocks and edges, so a variable whose
    counters reach zero stays a sink until it is eliminated.
    """

    def __init__(self, instance: Instance):
        n = instance.n
        self.n = n
        self.blocked = [0] * n
        self.out = [0] * n
        self.var_cons: list[list[int]] = [[] for _ in range(n)]
        self.scopes: list[list[int]] = []
        self.orders: list[list[WeakOrder] | None] = []
        self.contrib: list[list[tuple[int, bool]]] = []
        self.heads: list[int] = []
        self.alive: list[bool] = []
        for c in instance.constraints:
            if isinstance(c, LlHornClause):
                kind = _clause_kind(c)
                if kind is None:
                    continue
                cid = self._new(list(c.scope), None)
                self.heads[cid] = c.head
                self._add(cid, [(c.head, kind == "block")])
            else:
                cid = self._new(list(c.scope), list(c.relation.orders))
                self._add(cid, self._relation_contrib(cid))
            for v in self.scopes[cid]:
                self.var_cons[v].append(cid)

    def _new(self, scope: list[int], orders) -> int:
        self.scopes.append(scope)
        self.orders.append(orders)
        self.contrib.append([])
        self.heads.append(-1)
        self.alive.append(True)
        return len(self.scopes) - 1

    def _relation_contrib(self, cid: int) -> list[tuple[int, bool]]:
        scope = self.scopes[cid]
        flags, targets = _relation_profile(self.orders[cid], len(scope))
        out = []
        for p, v in enumerate(scope):
            if flags[p]:
                out.append((v, True))
            elif targets[p]:
                out.append((v, False))
        return out

    def _add(self, cid: int, contrib: list[tuple[int, bool]]) -> None:
        self.contrib[cid] = contrib
        for v, is_block in contrib:
            if is_block:
                self.blocked[v] += 1
            else:
                self.out[v] += 1

    def _remove(self, cid: int, touched: list[int]) -> None:
        for v, is_block in self.contrib[cid]:
            if is_block:
                self.blocked[v] -= 1
            else:
                self.out[v] -= 1
            touched.append(v)
        self.contrib[cid] = []

    def _eliminate(self, x: int, touched: list[int]) -> None:
        for cid in self.var_cons[x]:
            if not self.alive[cid]:
                continue
            self._remove(cid, touched)
            orders = self.orders[cid]
            if orders is None:
                self.alive[cid] = False
                continue
            scope = self.scopes[cid]
            pos = scope.index(x)
            del scope[pos]
            if len(scope) < 2:
                self.alive[cid] = False
                continue
            self.orders[cid] = list({tp(o[:pos] + o[pos + 1 :]) for o in orders})
            self._add(cid, self._relation_contrib(cid))

    def run(self) -> SpecOutcome:
        n = self.n
        removed = [False] * n
        heap = [v for v in range(n) if not self.blocked[v] and not self.out[v]]
        heapq.heapify(heap)
        order: list[int] = []
        while heap:
            v = heapq.heappop(heap)
            if removed[v] or self.blocked[v] or self.out[v]:
                continue
            removed[v] = True
            order.append(v)
            touched: list[int] = []
            self._eliminate(v, touched)
            for u in touched:
                if not removed[u] and not self.blocked[u] and not self.out[u]:
                    heapq.heappush(heap, u)
        if len(order) == n:
            return Injective(tuple(order))
        remaining = [v for v in range(n) if not removed[v]]
        succ = self._remaining_edges()
        blocked = {v for v in remaining if self.blocked[v]}
        comps = _sink_components(remaining, succ, blocked)
        if comps:
            return EqualSet(tuple(comps[0]))
        return NoSolution(tuple(remaining))

    def _remaining_edges(self) -> dict[int, list[int]]:
        succ: dict[int, set[int]] = {}
        for cid, live in enumerate(self.alive):
            if not live:
                continue
            scope = self.scopes[cid]
            if self.orders[cid] is None:
                if not self.contrib[cid][0][1]:
                    head = self.heads[cid]
                    succ.setdefault(head, set()).update(v for v in scope if v != head)
                continue
            _, targets = _relation_profile(self.orders[cid], len(scope))
            for p, v in enumerate(scope):
                if targets[p]:
                    succ.setdefault(v, set()).update(scope[q] for q in targets[p])
        return {u: sorted(vs) for u, vs in succ.items()}


def spec(instance: Instance, trace: GraphTrace | None = None) -> SpecOutcome:
    """Run one elimination pass on a normalized ll-form instance.

    With ``trace`` the graph of every iteration is reported, which requires
    the rebuilding reference implementation.
    """
    if trace is not None:
        return spec_reference(instance, trace)
    return _Spec(instance).run()


# ---------------------------------------------------------------------------
# Solve


@dataclass(frozen=True)
class SolveOutcome:
    satisfiable: bool
    variables: tuple[str, ...]
    assignment: tuple[int, ...] | None = None
    classes: tuple[tuple[str, ...], ...] | None = None
    spec_calls: int = 0
    reason: str = ""

    @property
    def model(self) -> dict[str, int] | None:
        if self.assignment is None:
            return None
        return dict(zip(self.variables, self.assignment))


def _describe(instance: Instance, c: Constraint) -> str:
    names = instance.variables
    if isinstance(c, LlHornClause):
        return "clause over " + ",".join(names[v] for v in c.scope)
    return f"{c.relation.name}({','.join(names[v] for v in c.scope)})"


def _check_ll_form(instance: Instance) -> None:
    for c in instance.constraints:
        if isinstance(c, LlHornClause) and c.dual:
            raise ValueError(
                f"{_describe(instance, c)} uses '<' disjuncts; "
                "such clauses are solved in dual mode"
            )


def solve(
    instance: Instance,
    want_model: bool = True,
    trace: GraphTrace | None = None,
    reference: bool = False,
) -> SolveOutcome:
    """Decide satisfiability; on success return a rank model and the equal classes.

    Instances in ``dual`` mode are mirrored, solved, and mirrored back.
    """
    names = instance.variables
    work = reverse_instance(instance) if instance.mode == "dual" else instance
    calls = 0
    try:
        work = normalize_instance(work)
    except Unsatisfiable as exc:
        return SolveOutcome(False, names, reason=str(exc))
    _check_ll_form(work)
    uf = UnionFind(names)
    while True:
        calls += 1
        if reference or trace is not None:
            outcome = spec_reference(work, trace)
        else:
            outcome = spec(work)
        if isinstance(outcome, NoSolution):
            return SolveOutcome(
                False, names, spec_calls=calls,
                reason="no sink component: every terminal component has a blocked variable",
            )
        if isinstance(outcome, EqualSet):
            try:
                work = contract(work, outcome.members, uf)
            except Unsatisfiable as exc:
                return SolveOutcome(False, names, spec_calls=calls, reason=str(exc))
            continue
        break
    classes = uf.classes(names)
    if not want_model:
        return SolveOutcome(True, names, None, classes, calls)
    rank = {work.variables[v]: i for i, v in enumerate(outcome.order)}
    values = [rank[uf.find(name)] for name in names]
    if instance.mode == "dual":
        values = [-x for x in values]
    values = list(tp(values)) if values else []
    if not verify_assignment(instance, values):
        raise ModelCheckFailed(
            "extracted model violates the input; the constraints are probably "
            "not ll-closed (or not dual ll-closed in dual mode)"
        )
    return SolveOutcome(True, names, tuple(values), classes, calls)
