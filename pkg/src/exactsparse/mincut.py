"""Exact minimum cuts between terminal bipartitions and sparsifier verification.

Max-flow runs on integers: all capacities are multiplied by the least common
multiple of their denominators before the flow computation and the flow value
is divided back afterwards. Dinic's algorithm on integer capacities
terminates, so no tolerance enters anywhere.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .network import Network, cut_capacity
from .validation import as_rational, check_network, check_terminal_subset

__all__ = [
    "INFINITE",
    "MinCutResult",
    "CutOracle",
    "min_cut",
    "exhaustive_min_cut",
    "bipartitions",
    "CutViolation",
    "CutReport",
    "verify_cut_sparsifier",
    "check_equiv_merge_precondition",
    "check_merge_precondition",
]


class _Infinite:
    """Sentinel for unbounded capacity; never compared numerically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass(frozen=True)
class MinCutResult:
    """Value of a minimum cut and its canonical source side.

    ``witness`` is the set of vertices reachable from the source side in the
    final residual graph. It is the inclusion-minimal minimum cut, hence also
    the one of minimum cardinality.
    """

    value: Fraction
    witness: frozenset[int]


class CutOracle:
    """Reusable integer flow network for repeated min-cut queries on one network.

    Args:
        net: the network.
        terminals: terminal set used for bipartitions; defaults to ``net.terminals``.
    """

    def __init__(self, net: Network, terminals: Sequence[int] | None = None) -> None:
        self.net = net
        self.terminals = tuple(net.terminals if terminals is None else terminals)
        missing = [t for t in self.terminals if t not in net]
        if missing:
            raise ValueError(f"terminals not in network: {missing}")
        edges = list(net.edges())
        self.scale = math.lcm(*(c.denominator for _, _, c in edges)) if edges else 1
        self.ids = net.sorted_vertices()
        self.index = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)
        self.source, self.sink = n, n + 1
        self._to: list[int] = []
        self._cap: list[int] = []
        self._inf: list[bool] = []
        self._adj: list[list[int]] = [[] for _ in range(n + 2)]
        for u, v, c in edges:
            cap = int(c * self.scale)
            self._add_arc(self.index[u], self.index[v], cap, cap)
        self._base_arcs = len(self._to)
        self._base_deg = [len(a) for a in self._adj]

    def _add_arc(self, u: int, v: int, cap: int | _Infinite, rcap: int | _Infinite) -> None:
        for a, b, c in ((u, v, cap), (v, u, rcap)):
            self._adj[a].append(len(self._to))
            self._to.append(b)
            if c is INFINITE:
                self._cap.append(0)
                self._inf.append(True)
            else:
                self._cap.append(c)
                self._inf.append(False)

    def _reset(self) -> None:
        del self._to[self._base_arcs:]
        del self._cap[self._base_arcs:]
        del self._inf[self._base_arcs:]
        for a, d in zip(self._adj, self._base_deg):
            del a[d:]

    def min_cut(self, side: Iterable[int], *, merged_pairs: Iterable[tuple[int, int]] = ()) -> MinCutResult:
        """Minimum cut separating ``side`` from the remaining terminals.

        ``merged_pairs`` joins each listed vertex pair with an infinite edge,
        which forces both vertices onto the same side of the cut.
        """
        side = check_terminal_subset(side, self.terminals)
        other = [t for t in self.terminals if t not in side]
        if not side or not other:
            return MinCutResult(Fraction(0), frozenset())
        try:
            for t in side:
                self._add_arc(self.source, self.index[t], INFINITE, 0)
            for t in other:
                self._add_arc(self.index[t], self.sink, INFINITE, 0)
            for v, w in merged_pairs:
                self._add_arc(self.index[v], self.index[w], INFINITE, INFINITE)
            caps = list(self._cap)
            flow = self._dinic(caps)
            reach = self._residual_reach(caps)
        finally:
            self._reset()
        witness = frozenset(self.ids[i] for i in reach if i < len(self.ids))
        return MinCutResult(Fraction(flow, self.scale), witness)

    def _dinic(self, cap: list[int]) -> int:
        s, t = self.source, self.sink
        adj, to, inf = self._adj, self._to, self._inf
        n = len(adj)
        total = 0
        while True:
            level = [-1] * n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for e in adj[u]:
                    v = to[e]
                    if level[v] < 0 and (inf[e] or cap[e] > 0):
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return total
            it = [0] * n
            while True:
                path: list[int] = []
                u = s
                while u != t:
                    arcs = adj[u]
                    i = it[u]
                    while i < len(arcs):
                        e = arcs[i]
                        v = to[e]
                        if level[v] == level[u] + 1 and (inf[e] or cap[e] > 0):
                            break
                        i += 1
                    it[u] = i
                    if i < len(arcs):
                        path.append(arcs[i])
                        u = to[arcs[i]]
                        continue
                    if u == s:
                        break
                    level[u] = -1
                    e = path.pop()
                    u = to[e ^ 1]
                    it[u] += 1
                if u != t:
                    break
                finite = [cap[e] for e in path if not inf[e]]
                if not finite:
                    raise ValueError("infinite-capacity path between the two sides")
                f = min(finite)
                for e in path:
                    if not inf[e]:
                        cap[e] -= f
                    if not inf[e ^ 1]:
                        cap[e ^ 1] += f
                total += f

    def _residual_reach(self, cap: list[int]) -> set[int]:
        adj, to, inf = self._adj, self._to, self._inf
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = to[e]
                if v not in seen and (inf[e] or cap[e] > 0):
                    seen.add(v)
                    queue.append(v)
        if self.sink in seen:
            raise AssertionError("sink reachable after max-flow")
        return seen


def min_cut(net: Network, side: Iterable[int], terminals: Sequence[int] | None = None) -> MinCutResult:
    """Exact min-cut value separating ``side`` from the other terminals.

    ``side`` equal to ∅ or to the whole terminal set gives value 0 and an
    empty witness.
    """
    net = check_network(net)
    return CutOracle(net, terminals).min_cut(side)


def exhaustive_min_cut(net: Network, side: Iterable[int], terminals: Sequence[int] | None = None) -> MinCutResult:
    """Brute-force oracle: enumerate every cut separating ``side``.

    Returns the minimum value and, among minimizers, one of minimum
    cardinality (ties broken by the enumeration order). Exponential in the
    number of non-terminals; meant for networks with a dozen vertices.
    """
    terminals = tuple(net.terminals if terminals is None else terminals)
    side = check_terminal_subset(side, terminals)
    if not side or side == frozenset(terminals):
        return MinCutResult(Fraction(0), frozenset())
    free = [v for v in net.sorted_vertices() if v not in set(terminals)]
    best: tuple[Fraction, int, frozenset[int]] | None = None
    for mask in range(1 << len(free)):
        cut = side | {free[i] for i in range(len(free)) if mask >> i & 1}
        key = (cut_capacity(net, cut), len(cut))
        if best is None or key < best[:2]:
            best = (key[0], key[1], frozenset(cut))
    assert best is not None
    return MinCutResult(best[0], best[2])


def bipartitions(terminals: Sequence[int]) -> list[frozenset[int]]:
    """One side of each of the ``2**(k-1)`` terminal bipartitions.

    The last terminal is always on the other side; the trivial bipartition
    (empty side) is included.
    """
    terminals = tuple(terminals)
    if not terminals:
        return [frozenset()]
    head = terminals[:-1]
    return [
        frozenset(head[i] for i in range(len(head)) if mask >> i & 1)
        for mask in range(1 << len(head))
    ]


@dataclass(frozen=True)
class CutViolation:
    side: frozenset[int]
    kappa_g: Fraction
    kappa_h: Fraction

    def __str__(self) -> str:
        return f"A={{{', '.join(map(str, sorted(self.side)))}}} kappa_G={self.kappa_g} kappa_H={self.kappa_h}"


@dataclass
class CutReport:
    """Outcome of :func:`verify_cut_sparsifier`."""

    quality: Fraction
    checked: int = 0
    violations: list[CutViolation] = field(default_factory=list)
    worst_ratio: Fraction | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def verify_cut_sparsifier(g: Network, h: Network, quality=1) -> CutReport:
    """Check ``kappa_G(A) <= kappa_H(A) <= quality * kappa_G(A)`` for every bipartition.

    The terminals of ``g`` must all be terminals of ``h``; any further
    terminals of ``h`` are treated as free vertices.
    """
    g, h = check_network(g), check_network(h)
    q = as_rational(quality, name="quality")
    if q < 1:
        raise ValueError("quality must be at least 1")
    missing = [t for t in g.terminals if not h.is_terminal(t)]
    if missing:
        raise ValueError(f"terminal mismatch: {missing} are not terminals of the sparsifier")
    og, oh = CutOracle(g), CutOracle(h, g.terminals)
    report = CutReport(quality=q)
    for side in bipartitions(g.terminals):
        kg = og.min_cut(side).value
        kh = oh.min_cut(side).value
        report.checked += 1
        if kg:
            ratio = kh / kg
            if report.worst_ratio is None or ratio > report.worst_ratio:
                report.worst_ratio = ratio
        if not (kg <= kh <= q * kg):
            report.violations.append(CutViolation(side, kg, kh))
    return report


def check_merge_precondition(net: Network, pairs: Iterable[tuple[int, int]]) -> bool:
    """True iff for every bipartition some min-cut keeps each pair together.

    A pair is kept together (both inside or both outside the cut) by joining
    it with an infinite-capacity edge; the condition holds when that
    constrained min-cut is no more expensive than the unconstrained one.
    Checking one side of each bipartition suffices because the complement of
    a min-cut for ``A`` is a min-cut for ``K - A``.
    """
    pairs = list(pairs)
    for v, w in pairs:
        for x in (v, w):
            if x not in net:
                raise KeyError(f"unknown vertex {x}")
            if net.is_terminal(x):
                raise ValueError(f"vertex {x} is a terminal")
    oracle = CutOracle(net)
    for side in bipartitions(net.terminals):
        free = oracle.min_cut(side).value
        forced = oracle.min_cut(side, merged_pairs=pairs).value
        if forced != free:
            return False
    return True


def check_equiv_merge_precondition(net: Network, v: int, w: int) -> bool:
    """Whether contracting the non-terminals ``v`` and ``w`` preserves every terminal min-cut."""
    if v == w:
        raise ValueError("v and w must differ")
    return check_merge_precondition(net, [(v, w)])
