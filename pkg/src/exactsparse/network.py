"""Exact-capacity undirected networks and the structural operations on them.

Capacities are :class:`fractions.Fraction` values. Zero-capacity edges are
never stored: an absent edge *is* an edge of capacity 0.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .validation import as_rational

__all__ = [
    "Network",
    "contract",
    "contract_many",
    "steiner_disjoint_union",
    "cut_capacity",
    "induced_subgraph",
]

Edge = tuple[int, int, Fraction]


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


class Network:
    """Undirected capacitated multigraph with an ordered terminal list.

    Parallel edges are merged by summing their capacities. The terminal order
    is fixed at construction and determines the coordinate order of every
    capacity vector derived from the network.

    Args:
        edges: iterable of ``(u, v, capacity)`` triples.
        terminals: terminal vertex ids, in order.
        vertices: extra vertex ids (isolated vertices); the vertex set is the
            union of these, the terminals and all edge endpoints.
    """

    __slots__ = ("_adj", "_terminals", "_terminal_index")

    def __init__(
        self,
        edges: Iterable[tuple[int, int, object]] = (),
        terminals: Sequence[int] = (),
        vertices: Iterable[int] = (),
    ) -> None:
        adj: dict[int, dict[int, Fraction]] = {}
        for v in vertices:
            adj.setdefault(_vertex_id(v), {})
        terms = tuple(_vertex_id(t) for t in terminals)
        if len(set(terms)) != len(terms):
            raise ValueError(f"duplicate terminals in {terms}")
        for t in terms:
            adj.setdefault(t, {})
        for u, v, cap in edges:
            u, v = _vertex_id(u), _vertex_id(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            c = as_rational(cap, name=f"capacity of ({u}, {v})", nonnegative=True)
            adj.setdefault(u, {})
            adj.setdefault(v, {})
            if c:
                adj[u][v] = adj[u].get(v, Fraction(0)) + c
                adj[v][u] = adj[u][v]
        self._adj = adj
        self._terminals = terms
        self._terminal_index = {t: i for i, t in enumerate(terms)}

    @classmethod
    def _from_adjacency(cls, adj: dict[int, dict[int, Fraction]], terminals: tuple[int, ...]) -> Network:
        # trusted constructor: adj must be symmetric with positive capacities
        net = cls.__new__(cls)
        net._adj = adj
        net._terminals = terminals
        net._terminal_index = {t: i for i, t in enumerate(terminals)}
        return net

    # -- basic accessors -------------------------------------------------

    @property
    def terminals(self) -> tuple[int, ...]:
        return self._terminals

    @property
    def k(self) -> int:
        return len(self._terminals)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self._adj)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def sorted_vertices(self) -> list[int]:
        return sorted(self._adj)

    def steiner_vertices(self) -> list[int]:
        """Non-terminal vertices in increasing id order."""
        return [v for v in sorted(self._adj) if v not in self._terminal_index]

    def is_terminal(self, v: int) -> bool:
        return v in self._terminal_index

    def terminal_index(self, t: int) -> int:
        return self._terminal_index[t]

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> Mapping[int, Fraction]:
        """Read-only ``{neighbor: capacity}`` view for ``v``."""
        try:
            return self._adj[v]
        except KeyError:
            raise KeyError(f"unknown vertex {v}") from None

    def capacity(self, u: int, v: int) -> Fraction:
        return self._adj.get(u, {}).get(v, Fraction(0))

    def edges(self) -> Iterator[Edge]:
        """Yield each edge once as ``(u, v, capacity)`` with ``u < v``, sorted."""
        for u in sorted(self._adj):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v, self._adj[u][v]

    def edge_dict(self) -> dict[tuple[int, int], Fraction]:
        return {(u, v): c for u, v, c in self.edges()}

    def total_capacity(self) -> Fraction:
        return sum((c for _, _, c in self.edges()), Fraction(0))

    def capacity_vector(self, v: int, targets: Sequence[int] | None = None) -> tuple[Fraction, ...]:
        """Capacities from ``v`` to ``targets`` (default: the terminals, in order)."""
        nbrs = self.neighbors(v)
        targets = self._terminals if targets is None else targets
        return tuple(nbrs.get(t, Fraction(0)) for t in targets)

    # -- derived networks --------------------------------------------------

    def with_terminals(self, terminals: Sequence[int]) -> Network:
        missing = [t for t in terminals if t not in self._adj]
        if missing:
            raise ValueError(f"terminals not in network: {missing}")
        return Network._from_adjacency(self._adj, tuple(terminals))

    def scaled(self, factor) -> Network:
        f = as_rational(factor, name="factor", nonnegative=True)
        return Network(
            ((u, v, c * f) for u, v, c in self.edges()),
            self._terminals,
            self._adj,
        )

    def relabel(self, mapping: Mapping[int, int]) -> Network:
        """Rename vertices; ids absent from ``mapping`` are kept."""
        get = lambda x: mapping.get(x, x)  # noqa: E731
        new_ids = [get(v) for v in self._adj]
        if len(set(new_ids)) != len(new_ids):
            raise ValueError("relabel mapping is not injective on the vertex set")
        return Network(
            ((get(u), get(v), c) for u, v, c in self.edges()),
            [get(t) for t in self._terminals],
            new_ids,
        )

    # -- comparison --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._terminals == other._terminals and self._adj == other._adj

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Network(n={self.n}, m={self.m}, terminals={list(self._terminals)})"


def _vertex_id(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        try:
            import operator

            return operator.index(v)
        except TypeError:
            raise TypeError(f"vertex ids must be integers, got {v!r}") from None
    return v


def _merged_id(net: Network, v: int, w: int) -> int:
    tv, tw = net.is_terminal(v), net.is_terminal(w)
    if tv != tw:
        return v if tv else w
    return min(v, w)


def contract(net: Network, v: int, w: int) -> Network:
    """Contract ``v`` and ``w`` into one vertex, summing parallel capacities.

    The edge ``vw`` (if any) disappears. The merged vertex is a terminal if
    either endpoint was; it keeps the terminal's id, or the smaller id when
    both or neither are terminals, so the result does not depend on the
    argument order.
    """
    if v not in net or w not in net:
        raise KeyError(f"unknown vertex {v if v not in net else w}")
    if v == w:
        raise ValueError("cannot contract a vertex with itself")
    return contract_many(net, [(v, w)])


def contract_many(net: Network, groups: Iterable[Iterable[int]]) -> Network:
    """Contract each group of vertices into a single vertex.

    Groups must be disjoint. Each group is represented afterwards by its
    terminal member (at most one terminal per group unless several are
    merged, in which case the earliest in terminal order survives) or by its
    smallest id.
    """
    rep: dict[int, int] = {}
    for group in groups:
        members = list(dict.fromkeys(group))
        if len(members) < 2:
            continue
        for x in members:
            if x not in net:
                raise KeyError(f"unknown vertex {x}")
            if x in rep:
                raise ValueError(f"vertex {x} appears in two contraction groups")
        terms = sorted((x for x in members if net.is_terminal(x)), key=net.terminal_index)
        target = terms[0] if terms else min(members)
        for x in members:
            rep[x] = target
    if not rep:
        return net
    adj: dict[int, dict[int, Fraction]] = {}
    for u in net._adj:
        adj.setdefault(rep.get(u, u), {})
    for u, nbrs in net._adj.items():
        ru = rep.get(u, u)
        row = adj[ru]
        for x, c in nbrs.items():
            rx = rep.get(x, x)
            if rx != ru:
                row[rx] = row.get(rx, Fraction(0)) + c
    terminals = tuple(t for t in net.terminals if rep.get(t, t) == t)
    return Network._from_adjacency(adj, terminals)


def steiner_disjoint_union(g1: Network, g2: Network, terminals: Sequence[int]) -> Network:
    """Glue two networks that share only terminal vertices.

    Edges between terminals present in both inputs have their capacities
    summed. Every listed terminal is a vertex of the result, in the given order.
    """
    shared = g1.vertices & g2.vertices
    bad = shared - set(terminals)
    if bad:
        raise ValueError(f"networks are not Steiner-disjoint; shared non-terminals {sorted(bad)}")
    return Network(
        list(g1.edges()) + list(g2.edges()),
        tuple(terminals),
        g1.vertices | g2.vertices,
    )


def cut_capacity(net: Network, side: Iterable[int]) -> Fraction:
    """Total capacity of edges with exactly one endpoint in ``side``.

    ``side`` equal to the empty set or the full vertex set has capacity 0.
    """
    side = frozenset(side)
    unknown = side - net.vertices
    if unknown:
        raise KeyError(f"unknown vertices {sorted(unknown)}")
    total = Fraction(0)
    for u in side:
        for x, c in net.neighbors(u).items():
            if x not in side:
                total += c
    return total


def induced_subgraph(net: Network, vertices: Iterable[int], terminals: Sequence[int] | None = None) -> Network:
    """``net[vertices]`` with the given terminals (default: the net's terminals inside it)."""
    keep = frozenset(vertices)
    unknown = keep - net.vertices
    if unknown:
        raise KeyError(f"unknown vertices {sorted(unknown)}")
    if terminals is None:
        terminals = [t for t in net.terminals if t in keep]
    return Network(
        ((u, v, c) for u, v, c in net.edges() if u in keep and v in keep),
        terminals,
        keep,
    )
