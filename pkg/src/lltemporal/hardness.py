"""Unsatisfiable R^min instances from high-girth 4-regular graphs, and a
three-variable local consistency engine that fails to refute them."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .core import Instance, LlHornClause, RelationConstraint, Trivial, normalize_clause, normalize_constraint
from .frontends import clause_to_relation
from .oracle import enumerate_weak_orders
from .relations import R_MIN

INF = math.inf


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.adjacency()
        seen = {0}
        todo = [0]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n


@dataclass(frozen=True)
class OrientedGraph:
    n: int
    arcs: tuple[tuple[int, int], ...]

    def in_degrees(self) -> list[int]:
        d = [0] * self.n
        for _, v in self.arcs:
            d[v] += 1
        return d

    def out_degrees(self) -> list[int]:
        d = [0] * self.n
        for u, _ in self.arcs:
            d[u] += 1
        return d

    def in_neighbors(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            nb[v].append(u)
        return nb


def girth_check(graph: UndirectedGraph) -> float:
    """Length of a shortest cycle, ``math.inf`` for forests (BFS from every vertex)."""
    adj = graph.adjacency()
    best = INF
    for s in range(graph.n):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            skipped_parent = False
            for w in adj[u]:
                if w == parent[u] and not skipped_parent:
                    skipped_parent = True
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
    return best


def _distance(adj: list[set[int]], a: int, b: int, cutoff: int) -> float:
    """BFS distance from a to b, or inf when it exceeds ``cutoff``."""
    if a == b:
        return 0
    dist = {a: 0}
    q = deque([a])
    while q:
        u = q.popleft()
        if dist[u] >= cutoff:
            break
        for w in adj[u]:
            if w not in dist:
                if w == b:
                    return dist[u] + 1
                dist[w] = dist[u] + 1
                q.append(w)
    return INF


def _edge_on_short_cycle(adj, u: int, v: int, g: int) -> bool:
    adj[u].discard(v)
    adj[v].discard(u)
    d = _distance(adj, u, v, g - 2)
    adj[u].add(v)
    adj[v].add(u)
    return d + 1 < g


def _random_simple_regular(n: int, d: int, rng: random.Random, tries: int):
    for _ in range(tries):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        adj = [set() for _ in range(n)]
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            if a == b or b in adj[a]:
                ok = False
                break
            adj[a].add(b)
            adj[b].add(a)
        if ok:
            return adj
    return None


def default_order(girth: int) -> int:
    """Vertex count used by :func:`gen_regular_girth` for a target girth."""
    if girth <= 3:
        return 5
    return max(20, 2 * 3 ** (girth - 2))


def gen_regular_girth(
    girth: int, seed: int, n: int | None = None, budget: int = 200_000
) -> UndirectedGraph:
    """Connected simple 4-regular graph with girth at least ``girth``.

    A random pairing is drawn until it is simple; every edge on a cycle shorter
    than ``girth`` is then swapped against a random edge, keeping the swap only
    if neither new edge closes a short cycle.  ``budget`` bounds the number of
    attempted swaps.
    """
    if girth < 3:
        raise ValueError("girth must be at least 3")
    rng = random.Random(seed)
    if n is None:
        n = default_order(girth)
    if n < 5:
        raise ValueError("a 4-regular simple graph needs at least 5 vertices")
    if n == 5:
        perm = list(range(5))
        rng.shuffle(perm)
        edges = tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b]))
                             for a, b in combinations(range(5), 2)))
        graph = UndirectedGraph(5, edges)
        if girth_check(graph) < girth:
            raise GenerationError(f"K5 has girth 3; use more vertices for girth {girth}")
        return graph
    adj = _random_simple_regular(n, 4, rng, tries=10_000)
    if adj is None:
        raise GenerationError("could not draw a simple 4-regular pairing")
    attempts = 0
    while True:
        bad = [
            (u, v) for u in range(n) for v in adj[u]
            if u < v and _edge_on_short_cycle(adj, u, v, girth)
        ]
        if not bad:
            break
        for a, b in bad:
            if b not in adj[a] or not _edge_on_short_cycle(adj, a, b, girth):
                continue
            while True:
                attempts += 1
                if attempts > budget:
                    raise GenerationError(
                        f"swap budget {budget} exhausted for girth {girth} on {n} "
                        "vertices; raise the budget or the vertex count"
                    )
                c = rng.randrange(n)
                d = rng.choice(sorted(adj[c]))
                if rng.random() < 0.5:
                    c, d = d, c
                if len({a, b, c, d}) < 4 or c in adj[a] or d in adj[b]:
                    continue
                for x, y in ((a, b), (c, d)):
                    adj[x].discard(y)
                    adj[y].discard(x)
                for x, y in ((a, c), (b, d)):
                    adj[x].add(y)
                    adj[y].add(x)
                if not (_edge_on_short_cycle(adj, a, c, girth)
                        or _edge_on_short_cycle(adj, b, d, girth)):
                    break
                for x, y in ((a, c), (b, d)):
                    adj[x].discard(y)
                    adj[y].discard(x)
                for x, y in ((a, b), (c, d)):
                    adj[x].add(y)
                    adj[y].add(x)
    graph = UndirectedGraph(
        n, tuple(sorted((u, v) for u in range(n) for v in adj[u] if u < v))
    )
    if not graph.is_connected():
        # Rare for random regular graphs; retry with a derived seed.
        return gen_regular_girth(girth, rng.randrange(2**31), n, budget)
    return graph


def euler_orient(graph: UndirectedGraph) -> OrientedGraph:
    """Orient every edge along an Euler tour (Hierholzer)."""
    adj = graph.adjacency()
    if any(len(a) % 2 for a in adj):
        raise ValueError("Euler orientation needs every degree to be even")
    if not graph.is_connected():
        raise ValueError("Euler orientation needs a connected graph")
    incident: list[list[int]] = [[] for _ in range(graph.n)]
    for i, (u, v) in enumerate(graph.edges):
        incident[u].append(i)
        incident[v].append(i)
    used = [False] * len(graph.edges)
    ptr = [0] * graph.n
    arcs: list[tuple[int, int]] = []
    if not graph.edges:
        return OrientedGraph(graph.n, ())
    stack = [(graph.edges[0][0], -1)]
    while stack:
        v, via = stack[-1]
        while ptr[v] < len(incident[v]) and used[incident[v][ptr[v]]]:
            ptr[v] += 1
        if ptr[v] == len(incident[v]):
            stack.pop()
            if via >= 0:
                u = stack[-1][0]
                arcs.append((u, v))
            continue
        e = incident[v][ptr[v]]
        used[e] = True
        a, b = graph.edges[e]
        stack.append((b if a == v else a, e))
    # Arcs were emitted while unwinding; reverse them to follow the tour.
    arcs.reverse()
    return OrientedGraph(graph.n, tuple(arcs))


def rmin_instance(oriented: OrientedGraph) -> Instance:
    """One R^min(w, u, v) per vertex w with in-neighbours u, v."""
    ins = oriented.in_neighbors()
    bad = [w for w, nb in enumerate(ins) if len(nb) != 2]
    if bad:
        raise ValueError(f"vertices {bad[:5]} do not have in-degree exactly 2")
    names = tuple(f"v{i}" for i in range(oriented.n))
    constraints = tuple(
        RelationConstraint((w, *sorted(nb)), R_MIN) for w, nb in enumerate(ins)
    )
    return Instance(names, constraints, {R_MIN.name: R_MIN})


def hard_instance(girth: int, seed: int, n: int | None = None) -> Instance:
    return rmin_instance(euler_orient(gen_regular_girth(girth, seed, n)))


# ---------------------------------------------------------------------------
# Path consistency

LT, EQ, GT = "<", "=", ">"
FULL = frozenset((LT, EQ, GT))


def _rel(a: int, b: int) -> str:
    return LT if a < b else GT if a > b else EQ


_TRIPLE_ORDERS = tuple(enumerate_weak_orders(3))


@dataclass
class PcNetwork:
    """Allowed orderings per variable pair, keyed ``(a, b)`` with ``a < b``.

    Missing pairs are unrestricted.  ``ternary`` holds the constraints of
    arity three as (scope, allowed weak orders).
    """

    n: int
    pairs: dict[tuple[int, int], frozenset[str]] = field(default_factory=dict)
    ternary: list[tuple[tuple[int, int, int], frozenset]] = field(default_factory=list)

    def get(self, a: int, b: int) -> frozenset[str]:
        if a < b:
            return self.pairs.get((a, b), FULL)
        flipped = self.pairs.get((b, a), FULL)
        return frozenset({LT: GT, GT: LT, EQ: EQ}[r] for r in flipped)


@dataclass(frozen=True)
class PcResult:
    consistent: bool
    network: PcNetwork
    revisions: int


def _constraint_relation(c):
    if isinstance(c, LlHornClause):
        norm = normalize_clause(c)
        if isinstance(norm, Trivial):
            return norm
        rel, scope = clause_to_relation(norm)
        return RelationConstraint(scope, rel)
    return normalize_constraint(c)


def path_consistency(instance: Instance) -> PcResult:
    """Three-variable support filtering to a fixpoint.

    For every triple that carries a ternary constraint or two restricted pairs,
    an ordering of a pair survives only if some weak order on the triple
    extends it while respecting the other two pairs and the triple's
    constraints.
    """
    net = PcNetwork(instance.n)
    tern: dict[tuple[int, int, int], list[frozenset]] = {}
    for c in instance.constraints:
        c = _constraint_relation(c)
        if c is Trivial.TAUTOLOGY:
            continue
        if c is Trivial.CONTRADICTION:
            return PcResult(False, net, 0)
        scope = c.scope
        if len(scope) > 3:
            raise ValueError(
                f"path consistency handles arity at most 3, got {len(scope)}"
            )
        if len(scope) == 2:
            a, b = scope
            allowed = frozenset(_rel(o[0], o[1]) for o in c.relation.orders)
            if a > b:
                a, b = b, a
                allowed = frozenset({LT: GT, GT: LT, EQ: EQ}[r] for r in allowed)
            net.pairs[(a, b)] = net.get(a, b) & allowed
            if not net.pairs[(a, b)]:
                return PcResult(False, net, 0)
        else:
            key = tuple(sorted(scope))
            perm = [scope.index(v) for v in key]
            orders = frozenset(tuple(o[p] for p in perm) for o in c.relation.orders)
            tern.setdefault(key, []).append(orders)
    for key, sets in tern.items():
        allowed = frozenset.intersection(*sets)
        net.ternary.append((key, allowed))
        for i, j in ((0, 1), (0, 2), (1, 2)):
            a, b = key[i], key[j]
            proj = frozenset(_rel(o[i], o[j]) for o in allowed)
            net.pairs[(a, b)] = net.get(a, b) & proj
            if not net.pairs[(a, b)]:
                return PcResult(False, net, 0)
    ternary = dict(net.ternary)

    neighbors: dict[int, set[int]] = {}

    def link(a: int, b: int) -> None:
        neighbors.setdefault(a, set()).add(b)
        neighbors.setdefault(b, set()).add(a)

    for (a, b), rel in net.pairs.items():
        if rel != FULL:
            link(a, b)
    for a, b, c in ternary:
        link(a, b)
        link(a, c)
        link(b, c)

    queue: deque[tuple[int, int, int]] = deque()
    queued: set[tuple[int, int, int]] = set()

    def push(t: tuple[int, int, int]) -> None:
        if t not in queued:
            queued.add(t)
            queue.append(t)

    def triples_through(a: int, b: int):
        for c in neighbors.get(a, ()) | neighbors.get(b, ()):
            if c != a and c != b:
                yield tuple(sorted((a, b, c)))

    for key in sorted(ternary):
        push(key)
    for a, b in sorted(net.pairs):
        for t in triples_through(a, b):
            push(t)

    revisions = 0
    while queue:
        t = queue.popleft()
        queued.discard(t)
        a, b, c = t
        allowed = ternary.get(t)
        rab, rac, rbc = net.get(a, b), net.get(a, c), net.get(b, c)
        support = [
            o for o in _TRIPLE_ORDERS
            if (allowed is None or o in allowed)
            and _rel(o[0], o[1]) in rab
            and _rel(o[0], o[2]) in rac
            and _rel(o[1], o[2]) in rbc
        ]
        for (i, j), old in (((0, 1), rab), ((0, 2), rac), ((1, 2), rbc)):
            new = frozenset(_rel(o[i], o[j]) for o in support)
            if new == old:
                continue
            revisions += 1
            x, y = t[i], t[j]
            net.pairs[(x, y)] = new
            if not new:
                return PcResult(False, net, revisions)
            link(x, y)
            for u in triples_through(x, y):
                if u != t:
                    push(u)
    return PcResult(True, net, revisions)
