"""Split a demand routable in a merged star between the two original stars.

Given stars ``c1`` and ``c2`` with equal strong signatures and a demand ``d``
routable in the merged star ``c1 + c2``, the procedure builds ``d1 + d2 = d``
with ``d1`` routable in ``c1`` and ``d2`` routable in ``c2``.

Demand is placed greedily while both endpoints have spare capacity in one
star. When a pair is blocked in both stars, pair demands are switched from
one star to the other along a path in the bipartite demand graph: nodes are
``(terminal, star)``, arc ``(x, 1) -> (y, 2)`` carries ``d1(x, y)`` and arc
``(x, 2) -> (y, 1)`` carries ``d2(x, y)``. A node's load is its star's
per-terminal total, capped by that star's capacity at the terminal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .mcf import Demand, routable_in_star
from .signatures import strong_signature
from .validation import as_capacity_vector

__all__ = [
    "SplitError",
    "SplitState",
    "DemandGraph",
    "AugmentingPath",
    "SaturatedSet",
    "SplitResult",
    "augmenting_paths",
    "find_augmenting_path",
    "split_demand",
    "split_demand_detailed",
    "iteration_bound",
]

Pair = tuple[int, int]
Node = tuple[int, int]  # (terminal index, star 1 or 2)


class SplitError(ValueError):
    """Precondition violated, or the procedure could not complete."""


def _pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


@dataclass
class SplitState:
    """Working state over terminal indices ``0 .. k-1``.

    ``d1``, ``d2`` and ``rem`` map unordered index pairs (``i < j``) to
    demand; ``load1``/``load2`` are the per-terminal totals of ``d1``/``d2``.
    """

    c1: tuple[Fraction, ...]
    c2: tuple[Fraction, ...]
    d: dict[Pair, Fraction]
    d1: dict[Pair, Fraction] = field(default_factory=dict)
    d2: dict[Pair, Fraction] = field(default_factory=dict)
    rem: dict[Pair, Fraction] = field(default_factory=dict)
    load1: list[Fraction] = field(default_factory=list)
    load2: list[Fraction] = field(default_factory=list)

    @classmethod
    def start(cls, c1, c2, d: dict[Pair, Fraction]) -> SplitState:
        k = len(c1)
        return cls(
            tuple(c1),
            tuple(c2),
            dict(d),
            {p: Fraction(0) for p in d},
            {p: Fraction(0) for p in d},
            dict(d),
            [Fraction(0)] * k,
            [Fraction(0)] * k,
        )

    @property
    def k(self) -> int:
        return len(self.c1)

    def cap(self, star: int) -> tuple[Fraction, ...]:
        return self.c1 if star == 1 else self.c2

    def assigned(self, star: int) -> dict[Pair, Fraction]:
        return self.d1 if star == 1 else self.d2

    def load(self, star: int) -> list[Fraction]:
        return self.load1 if star == 1 else self.load2

    def slack(self, star: int, i: int) -> Fraction:
        return self.cap(star)[i] - self.load(star)[i]

    def assign(self, star: int, i: int, j: int, amount: Fraction) -> None:
        """Move ``amount`` of the leftover demand of ``{i, j}`` into ``star``."""
        p = _pair(i, j)
        self.rem[p] -= amount
        self.assigned(star)[p] += amount
        load = self.load(star)
        load[i] += amount
        load[j] += amount

    def move(self, p: Pair, src: int, amount: Fraction) -> None:
        """Move ``amount`` of pair ``p`` from star ``src`` to the other star."""
        dst = 3 - src
        self.assigned(src)[p] -= amount
        self.assigned(dst)[p] += amount
        for x in p:
            self.load(src)[x] -= amount
            self.load(dst)[x] += amount

    def check_invariants(self) -> None:
        """Conservation, load bookkeeping, capacities and nonnegativity, exactly."""
        for p, total in self.d.items():
            if self.d1[p] + self.d2[p] + self.rem[p] != total:
                raise AssertionError(f"conservation violated on pair {p}")
            if min(self.d1[p], self.d2[p], self.rem[p]) < 0:
                raise AssertionError(f"negative demand on pair {p}")
        for star in (1, 2):
            rows = [Fraction(0)] * self.k
            for (i, j), v in self.assigned(star).items():
                rows[i] += v
                rows[j] += v
            if rows != self.load(star):
                raise AssertionError(f"load bookkeeping of star {star} is stale")
            if any(x > c for x, c in zip(rows, self.cap(star))):
                raise AssertionError(f"capacity of star {star} exceeded")

    def done(self) -> bool:
        return not any(self.rem.values())


class DemandGraph:
    """Read-only view of the bipartite demand graph of a :class:`SplitState`."""

    def __init__(self, state: SplitState) -> None:
        self.state = state

    def nodes(self) -> list[Node]:
        return [(i, s) for s in (1, 2) for i in range(self.state.k)]

    def arc_demand(self, u: Node, v: Node) -> Fraction:
        (x, s), (y, t) = u, v
        if s == t or x == y:
            return Fraction(0)
        return self.state.assigned(s).get(_pair(x, y), Fraction(0))

    def out_arcs(self, u: Node) -> list[tuple[Node, Fraction]]:
        x, s = u
        out = []
        for y in range(self.state.k):
            if y != x:
                val = self.state.assigned(s).get(_pair(x, y), Fraction(0))
                if val > 0:
                    out.append(((y, 3 - s), val))
        return out

    def load(self, u: Node) -> Fraction:
        return self.state.load(u[1])[u[0]]

    def capacity(self, u: Node) -> Fraction:
        return self.state.cap(u[1])[u[0]]

    def saturated(self, u: Node) -> bool:
        return self.load(u) >= self.capacity(u)


@dataclass(frozen=True)
class AugmentingPath:
    """Nodes ``l_0 .. l_p``; interior nodes are saturated, ``l_p`` has slack."""

    nodes: tuple[Node, ...]

    def __len__(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class SaturatedSet:
    """Nodes reachable from the start through saturated nodes; no slack was found."""

    nodes: frozenset[Node]


def augmenting_paths(state: SplitState, start: Node) -> list[AugmentingPath]:
    """Every breadth-first-tree path from ``start`` to a node with spare capacity.

    The search follows arcs with positive demand, continues only through
    saturated nodes and never expands a node with spare capacity. Paths are
    listed in discovery order, shortest first.
    """
    graph = DemandGraph(state)
    if not graph.saturated(start):
        return [AugmentingPath((start,))]
    parent: dict[Node, Node | None] = {start: None}
    queue = deque([start])
    found = []
    while queue:
        u = queue.popleft()
        for v, _ in graph.out_arcs(u):
            if v in parent:
                continue
            parent[v] = u
            if graph.saturated(v):
                queue.append(v)
                continue
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            found.append(AugmentingPath(tuple(reversed(path))))
    return found


def find_augmenting_path(state: SplitState, start: Node) -> AugmentingPath | SaturatedSet:
    """Shortest path from ``start`` to a node with spare capacity.

    Interior nodes are saturated and every arc carries positive demand. A
    start node with spare capacity yields the length-0 path. When no such
    path exists, the set of nodes reachable through saturated nodes is
    returned instead.
    """
    paths = augmenting_paths(state, start)
    if paths:
        return paths[0]
    graph = DemandGraph(state)
    reach = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v, _ in graph.out_arcs(u):
            if v not in reach:
                reach.add(v)
                queue.append(v)
    return SaturatedSet(frozenset(reach))


@dataclass
class _SwitchPlan:
    eps: Fraction
    moves: dict[tuple[Pair, int], int]  # (pair, source star) -> multiplicity
    node_delta: dict[Node, int]


def _plan_switch(state: SplitState, path: AugmentingPath) -> _SwitchPlan:
    """Largest safe amount to switch along ``path``.

    Arc ``(x, s) -> (y, 3 - s)`` moves demand of ``{x, y}`` out of star ``s``.
    The amount is limited by the demand on every used pair (counting pairs
    used more than once) and by the spare capacity of every node whose load
    grows. A move on pair ``{x, y}`` shifts load between both copies of ``x``
    and of ``y``, so only the terminals at the two ends of the path end up
    with different loads.
    """
    moves: dict[tuple[Pair, int], int] = {}
    for (x, s), (y, _) in zip(path.nodes, path.nodes[1:]):
        key = (_pair(x, y), s)
        moves[key] = moves.get(key, 0) + 1
    node_delta: dict[Node, int] = {}
    for (p, s), n in moves.items():
        for x in p:
            node_delta[(x, s)] = node_delta.get((x, s), 0) - n
            node_delta[(x, 3 - s)] = node_delta.get((x, 3 - s), 0) + n
    bounds = [state.assigned(s)[p] / n for (p, s), n in moves.items()]
    bounds += [state.slack(s, x) / n for (x, s), n in node_delta.items() if n > 0]
    return _SwitchPlan(min(bounds) if bounds else Fraction(0), moves, node_delta)


def _apply_switch(state: SplitState, path: AugmentingPath, plan: _SwitchPlan) -> None:
    if plan.eps <= 0:
        raise SplitError("path switch has no room; the demand is not routable in the merged star")
    ends = {path.nodes[0][0], path.nodes[-1][0]}
    before = (list(state.load1), list(state.load2))
    for (p, s), n in plan.moves.items():
        state.move(p, s, n * plan.eps)
    for x in range(state.k):
        if x not in ends and (state.load1[x], state.load2[x]) != (before[0][x], before[1][x]):
            raise AssertionError(f"switch changed the loads of interior terminal {x}")


@dataclass
class SplitResult:
    d1: Demand
    d2: Demand
    iterations: int
    rotations: int
    bound: int


def iteration_bound(n_pairs: int, k: int) -> int:
    """Our cap on outer iterations: ``pairs * (2k + 1)``."""
    return n_pairs * (2 * k + 1)


def split_demand_detailed(
    c1: Sequence,
    c2: Sequence,
    d: Demand,
    terminals: Sequence[int] | None = None,
    *,
    order: Iterable[tuple[int, int]] | None = None,
    check: bool = True,
) -> SplitResult:
    """Run the splitting procedure and report iteration statistics.

    Args:
        c1, c2: capacity vectors of the two stars (same terminal order).
        d: demand routable in the merged star ``c1 + c2``.
        terminals: terminal ids in coordinate order (default ``0 .. k-1``).
        order: processing order of the demand pairs (terminal ids); pairs
            not listed follow in lexicographic order of terminal indices.
        check: assert every invariant after each step.

    Raises:
        SplitError: if the signatures differ, ``d`` is not routable in the
            merged star, or the iteration cap is exceeded.
    """
    c1, c2 = as_capacity_vector(c1), as_capacity_vector(c2)
    k = len(c1)
    if len(c2) != k:
        raise SplitError("capacity vectors differ in length")
    terminals = list(range(k)) if terminals is None else list(terminals)
    index = {t: i for i, t in enumerate(terminals)}
    if d.terminals - set(index):
        raise SplitError("demand on vertices that are not star leaves")
    if strong_signature(c1) != strong_signature(c2):
        raise SplitError("the stars do not have equal strong signatures")
    merged = tuple(a + b for a, b in zip(c1, c2))
    if not routable_in_star(merged, d, terminals):
        raise SplitError("demand is not routable in the merged star")

    dd = {_pair(index[s], index[t]): v for (s, t), v in d.items()}
    seq: list[Pair] = []
    for s, t in order or ():
        p = _pair(index[s], index[t])
        if p in dd and p not in seq:
            seq.append(p)
    seq += [p for p in sorted(dd) if p not in seq]

    state = SplitState.start(c1, c2, dd)
    bound = iteration_bound(len(dd), k)
    iterations = rotations = 0
    while not state.done():
        iterations += 1
        if iterations > bound:
            raise SplitError(f"iteration cap {bound} exceeded")
        if not _greedy_step(state, seq):
            _rotation_step(state, seq)
            rotations += 1
        if check:
            state.check_invariants()

    def back(part: dict[Pair, Fraction]) -> Demand:
        return Demand({(terminals[i], terminals[j]): v for (i, j), v in part.items() if v})

    d1, d2 = back(state.d1), back(state.d2)
    if d1 + d2 != d or not routable_in_star(c1, d1, terminals) or not routable_in_star(c2, d2, terminals):
        raise AssertionError("split failed its postconditions")
    return SplitResult(d1, d2, iterations, rotations, bound)


def _greedy_step(state: SplitState, seq: list[Pair]) -> bool:
    """Place leftover demand of the first pair with room in one star."""
    for star in (1, 2):
        for i, j in seq:
            if not state.rem[(i, j)]:
                continue
            amount = min(state.rem[(i, j)], state.slack(star, i), state.slack(star, j))
            if amount > 0:
                state.assign(star, i, j, amount)
                return True
    return False


def _rotation_step(state: SplitState, seq: list[Pair]) -> None:
    """Free room for a blocked pair by switching demand along a path, then place it.

    With no greedy move left, a pair with leftover demand is blocked in
    both stars. Neither endpoint can be saturated in both stars (that would
    exceed the merged capacity), so one endpoint ``i`` is saturated in star 2
    and the other ``j`` in star 1; labels are swapped to make it so.
    """
    i, j = next(p for p in seq if state.rem[p])
    if state.slack(2, i) > 0:
        i, j = j, i
    if state.slack(2, i) > 0 or state.slack(1, j) > 0 or state.slack(1, i) <= 0 or state.slack(2, j) <= 0:
        raise SplitError("blocked pair does not have the cross-saturated pattern")
    paths = augmenting_paths(state, (i, 2))
    if not paths:
        found = find_augmenting_path(state, (i, 2))
        raise SplitError(f"no augmenting path from {(i, 2)}; saturated set {sorted(found.nodes)}")
    # any path and any amount up to its limit are valid; take the pair that
    # lets the most demand of {i, j} into star 2 right after the switch
    best = None
    for path in paths:
        plan = _plan_switch(state, path)
        eps, score = _best_amount(state, i, j, plan)
        if best is None or score > best[0]:
            best = (score, path, plan, eps)
    score, path, plan, eps = best
    if score <= 0:
        raise SplitError(f"no switch frees room for pair {_pair(i, j)}")
    plan.eps = eps
    _apply_switch(state, path, plan)
    amount = min(state.rem[_pair(i, j)], state.slack(2, i), state.slack(2, j))
    state.assign(2, i, j, amount)


def _best_amount(state: SplitState, i: int, j: int, plan: _SwitchPlan) -> tuple[Fraction, Fraction]:
    """Switch amount in ``[0, plan.eps]`` maximizing what ``{i, j}`` can then place in star 2.

    The placeable amount is the minimum of the leftover demand and the star-2
    slacks of ``i`` and ``j``, each linear in the switch amount, so the
    maximum is attained at an endpoint or where two of the lines cross.
    """
    lines = [(state.rem[_pair(i, j)], Fraction(0))]
    for x in (i, j):
        lines.append((state.slack(2, x), Fraction(-plan.node_delta.get((x, 2), 0))))
    candidates = {Fraction(0), plan.eps}
    for (a1, b1), (a2, b2) in zip(lines, lines[1:] + lines[:1]):
        if b1 != b2:
            t = (a2 - a1) / (b1 - b2)
            if 0 < t < plan.eps:
                candidates.add(t)

    def value(t: Fraction) -> Fraction:
        return min(a + b * t for a, b in lines)

    best = max(sorted(candidates, reverse=True), key=value)
    return best, value(best)


def split_demand(
    c1: Sequence,
    c2: Sequence,
    d: Demand,
    terminals: Sequence[int] | None = None,
    *,
    order: Iterable[tuple[int, int]] | None = None,
) -> tuple[Demand, Demand]:
    """Split ``d`` into ``(d1, d2)`` routable in ``c1`` and ``c2`` respectively."""
    res = split_demand_detailed(c1, c2, d, terminals, order=order)
    return res.d1, res.d2
