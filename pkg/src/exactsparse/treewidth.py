"""Linear-size sparsifiers from tree decompositions via region black boxes.

Pipeline: normalize the decomposition, pick the node set ``Y`` (one node per
terminal, closed under lowest common ancestors), group the components of
``T - Y`` into regions by their ``Y``-neighborhood, sparsify every region
subgraph with a black box whose terminals are the region's vertices shared
with ``B(Y)``, and glue everything back onto ``G[Y]``.

A black box is any callable ``Network -> Network`` that keeps the terminal
list of its input. The built-in ones are named by :data:`BLACKBOXES`.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .bipartite import sparsify_cut_contraction
from .mincut import CutOracle, bipartitions
from .network import Network, contract_many, induced_subgraph, steiner_disjoint_union
from .parallel import pmap
from .validation import as_rational, check_network

__all__ = [
    "TreeDecomposition",
    "RootedDecomposition",
    "RegionPartition",
    "build_y_set",
    "partition_regions",
    "region_subgraph",
    "identity_blackbox",
    "mimicking_blackbox",
    "cut_contraction_blackbox",
    "inflation_blackbox",
    "BLACKBOXES",
    "ReductionResult",
    "reduce_detailed",
    "reduce",
    "TreewidthReducer",
]

Blackbox = Callable[[Network], Network]


@dataclass
class TreeDecomposition:
    """Bags keyed by node id plus the tree edges between nodes."""

    bags: dict[int, frozenset[int]]
    tree_edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.bags = {int(i): frozenset(b) for i, b in self.bags.items()}
        self.tree_edges = [(int(i), int(j)) for i, j in self.tree_edges]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {i: set() for i in self.bags}
        for i, j in self.tree_edges:
            if i not in adj or j not in adj:
                raise ValueError(f"tree edge ({i}, {j}) uses an unknown bag")
            if i == j:
                raise ValueError(f"tree edge ({i}, {j}) is a loop")
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def validate(self, net: Network | None = None) -> None:
        """Raise ``ValueError`` unless this is a tree decomposition (of ``net``, if given).

        Checks that the nodes form a tree, that the bags holding any vertex
        form a connected subtree and, with ``net``, that every vertex and
        every edge is covered by a bag.
        """
        adj = self.adjacency()
        if len({frozenset(e) for e in self.tree_edges}) != len(self.tree_edges):
            raise ValueError("duplicate tree edge")
        if self.bags:
            if len(self.tree_edges) != len(self.bags) - 1 or len(_reach(adj, min(adj))) != len(adj):
                raise ValueError("decomposition nodes do not form a tree")
        holders: dict[int, set[int]] = {}
        for i, bag in self.bags.items():
            for v in bag:
                holders.setdefault(v, set()).add(i)
        for v, nodes in holders.items():
            sub = {i: adj[i] & nodes for i in nodes}
            if len(_reach(sub, min(nodes))) != len(nodes):
                raise ValueError(f"bags containing vertex {v} are not connected")
        if net is None:
            return
        missing = sorted(net.vertices - holders.keys())
        if missing:
            raise ValueError(f"vertices in no bag: {missing}")
        for u, v, _ in net.edges():
            if not holders[u] & holders[v]:
                raise ValueError(f"edge ({u}, {v}) is in no bag")

    def normalize(self) -> RootedDecomposition:
        """Absorb every bag contained in a neighboring bag, then root at the lowest id.

        Absorbing subset bags removes all duplicate bags and makes adjacent
        bags share at most ``w`` vertices. Merged nodes keep the id of the
        larger bag (the lower id when the bags are equal).
        """
        self.validate()
        bags = dict(self.bags)
        adj = {i: set(n) for i, n in self.adjacency().items()}
        changed = True
        while changed:
            changed = False
            for i in sorted(adj):
                for j in sorted(adj[i]):
                    if bags[i] <= bags[j] and (bags[i] != bags[j] or i > j):
                        # fold i into j
                        for x in adj.pop(i):
                            adj[x].discard(i)
                            if x != j:
                                adj[x].add(j)
                                adj[j].add(x)
                        del bags[i]
                        changed = True
                        break
                if changed:
                    break
        edges = sorted((i, j) for i in adj for j in adj[i] if i < j)
        return RootedDecomposition(bags, edges)


def _reach(adj, start) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


class RootedDecomposition(TreeDecomposition):
    """A tree decomposition rooted at its lowest node id, with parent and depth maps."""

    def __post_init__(self) -> None:
        super().__post_init__()
        adj = self.adjacency()
        self.root = min(self.bags) if self.bags else None
        self.parent: dict[int, int | None] = {}
        self.depth: dict[int, int] = {}
        self.order: list[int] = []
        if self.root is None:
            return
        self.parent[self.root] = None
        self.depth[self.root] = 0
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            self.order.append(u)
            for v in sorted(adj[u]):
                if v not in self.depth:
                    self.parent[v] = u
                    self.depth[v] = self.depth[u] + 1
                    queue.append(v)
        self.top: dict[int, int] = {}
        for i in self.order:
            for v in self.bags[i]:
                self.top.setdefault(v, i)

    def lca(self, i: int, j: int) -> int:
        while self.depth[i] > self.depth[j]:
            i = self.parent[i]
        while self.depth[j] > self.depth[i]:
            j = self.parent[j]
        while i != j:
            i, j = self.parent[i], self.parent[j]
        return i

    def is_ancestor(self, i: int, j: int) -> bool:
        """Whether ``i`` is ``j`` or lies on the path from ``j`` to the root."""
        return self.lca(i, j) == i

    def edge_assignment(self, net: Network) -> dict[tuple[int, int], int]:
        """Map each edge ``(u, v)``, ``u < v``, to the root-closest node whose bag holds both ends.

        The bags holding both ends form a subtree whose top is the deeper of
        the tops of ``u`` and ``v``.
        """
        out = {}
        for u, v, _ in net.edges():
            tu, tv = self.top.get(u), self.top.get(v)
            if tu is None or tv is None:
                raise ValueError(f"edge ({u}, {v}) has an endpoint in no bag")
            node = tu if self.depth[tu] >= self.depth[tv] else tv
            if not {u, v} <= self.bags[node]:
                raise ValueError(f"edge ({u}, {v}) is in no bag")
            out[(u, v)] = node
        return out


def _rooted(td: TreeDecomposition) -> RootedDecomposition:
    return td if isinstance(td, RootedDecomposition) else td.normalize()


def build_y_set(td: TreeDecomposition, terminals: Sequence[int]) -> frozenset[int]:
    """Shallowest bag of each terminal, closed under pairwise lowest common ancestors.

    The bags holding a vertex form a subtree, so its shallowest bag is
    unique. The result has at most ``2k - 1`` nodes for ``k >= 1``.
    """
    td = _rooted(td)
    chosen = []
    for t in terminals:
        if t not in td.top:
            raise ValueError(f"terminal {t} is in no bag")
        chosen.append(td.top[t])
    chosen = sorted(set(chosen))
    y = set(chosen)
    for n, i in enumerate(chosen):
        for j in chosen[n + 1 :]:
            y.add(td.lca(i, j))
    return frozenset(y)


@dataclass
class RegionPartition:
    """Regions of ``T - Y`` and the ``Y``-nodes each one touches."""

    y_set: frozenset[int]
    regions: list[frozenset[int]]
    neighbors: list[frozenset[int]]


def partition_regions(td: TreeDecomposition, y: Iterable[int]) -> RegionPartition:
    """Group the components of ``T - Y`` by identical ``Y``-neighborhood.

    Raises:
        AssertionError: when a region touches more than two ``Y``-nodes, or
            two that are not in an ancestor relation; either means ``Y`` is
            not closed under lowest common ancestors.
    """
    td = _rooted(td)
    y = frozenset(y)
    unknown = y - td.bags.keys()
    if unknown:
        raise ValueError(f"unknown nodes in Y: {sorted(unknown)}")
    adj = td.adjacency()
    seen = set(y)
    groups: dict[frozenset[int], set[int]] = {}
    for start in sorted(td.bags):
        if start in seen:
            continue
        comp, nbrs = set(), set()
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.add(u)
            for v in adj[u]:
                if v in y:
                    nbrs.add(v)
                elif v not in seen:
                    seen.add(v)
                    queue.append(v)
        groups.setdefault(frozenset(nbrs), set()).update(comp)
    regions, neighbors = [], []
    for nbrs in sorted(groups, key=lambda s: min(groups[s])):
        if len(nbrs) > 2:
            raise AssertionError(f"region touches {len(nbrs)} nodes of Y: {sorted(nbrs)}")
        if len(nbrs) == 2:
            i, j = sorted(nbrs)
            if not (td.is_ancestor(i, j) or td.is_ancestor(j, i)):
                raise AssertionError(f"region touches unrelated Y nodes {i} and {j}")
        regions.append(frozenset(groups[nbrs]))
        neighbors.append(nbrs)
    return RegionPartition(y, regions, neighbors)


def _bag_union(td: TreeDecomposition, nodes: Iterable[int]) -> frozenset[int]:
    return frozenset().union(*(td.bags[i] for i in nodes))


def region_subgraph(
    net: Network,
    td: RootedDecomposition,
    nodes: Iterable[int],
    terminals: Sequence[int],
    assignment: dict[tuple[int, int], int] | None = None,
) -> Network:
    """``(B(R), E(R))``: the bag vertices of ``nodes`` and the edges assigned to them."""
    nodes = frozenset(nodes)
    assignment = td.edge_assignment(net) if assignment is None else assignment
    edges = [(u, v, c) for u, v, c in net.edges() if assignment[(u, v)] in nodes]
    return Network(edges, terminals, _bag_union(td, nodes))


# -- black boxes ----------------------------------------------------------


def identity_blackbox(net: Network) -> Network:
    """Return the region unchanged."""
    return net


def mimicking_blackbox(net: Network) -> Network:
    """Contract non-terminals that fall on the same side of every canonical min cut.

    For each terminal bipartition the inclusion-minimal min cut is computed;
    two non-terminals with the same membership pattern across all of them
    are contracted. Every chosen min cut survives, so all terminal min-cut
    values are kept exactly.
    """
    if net.k <= 1:
        return induced_subgraph(net, net.terminals, net.terminals)
    oracle = CutOracle(net)
    sides = [oracle.min_cut(side).witness for side in bipartitions(net.terminals)]
    groups: dict[tuple[bool, ...], list[int]] = {}
    for v in net.steiner_vertices():
        groups.setdefault(tuple(v in s for s in sides), []).append(v)
    return contract_many(net, groups.values())


def cut_contraction_blackbox(net: Network) -> Network:
    """Signature contraction; only valid for regions that are quasi-bipartite."""
    return sparsify_cut_contraction(check_network(net, quasi_bipartite=True))


def _inflate(net: Network, factor: Fraction) -> Network:
    return net.scaled(factor)


def inflation_blackbox(factor=2) -> Blackbox:
    """Black box of quality exactly ``factor``: scales every capacity by it."""
    f = as_rational(factor, name="factor")
    if f < 1:
        raise ValueError(f"inflation factor must be at least 1, got {f}")
    return functools.partial(_inflate, factor=f)


BLACKBOXES: dict[str, Blackbox] = {
    "identity": identity_blackbox,
    "mimick": mimicking_blackbox,
    "cut-contraction": cut_contraction_blackbox,
}


def _resolve(blackbox: str | Blackbox) -> Blackbox:
    if isinstance(blackbox, str):
        try:
            return BLACKBOXES[blackbox]
        except KeyError:
            raise ValueError(f"unknown blackbox {blackbox!r}; choose from {sorted(BLACKBOXES)}") from None
    if not callable(blackbox):
        raise TypeError("blackbox must be a name or a callable")
    return blackbox


def _run_blackbox(args) -> Network:
    fn, g = args
    return fn(g)


# -- reduction ------------------------------------------------------------


@dataclass
class ReductionResult:
    """The composed sparsifier together with the intermediate structure.

    Attributes:
        network: the sparsifier, with the requested terminals.
        decomposition: the normalized, rooted decomposition.
        partition: ``Y`` and the regions.
        region_terminals: per region, the sorted vertices of ``B(R) & B(Y)``.
        region_edges: per region, the number of edges assigned to it.
        y_edges: number of edges assigned to ``Y``.
    """

    network: Network
    decomposition: RootedDecomposition
    partition: RegionPartition
    region_terminals: list[tuple[int, ...]]
    region_edges: list[int]
    y_edges: int


def reduce_detailed(
    net: Network,
    td: TreeDecomposition,
    terminals: Sequence[int] | None = None,
    blackbox: str | Blackbox = "mimick",
    *,
    mode: str = "cut",
) -> ReductionResult:
    """Sparsify every region with ``blackbox`` and glue the results onto ``G[Y]``.

    Args:
        net: the network.
        td: a tree decomposition of ``net``; it is normalized first.
        terminals: defaults to the terminals of ``net``.
        blackbox: a name from :data:`BLACKBOXES` or a callable.
        mode: ``"cut"`` or ``"flow"``; flow mode only admits black boxes that
            preserve flows, so the cut-only built-ins are refused.

    Raises:
        ValueError: invalid decomposition, or a black box output that lost
            part of its terminal set.
    """
    net = check_network(net)
    if mode not in ("cut", "flow"):
        raise ValueError(f"mode must be 'cut' or 'flow', got {mode!r}")
    if mode == "flow" and blackbox in ("mimick", "cut-contraction"):
        raise ValueError(f"blackbox {blackbox!r} only preserves cuts")
    fn = _resolve(blackbox)
    terminals = tuple(net.terminals if terminals is None else terminals)
    rooted = td.normalize()
    rooted.validate(net)
    assignment = rooted.edge_assignment(net)
    y = build_y_set(rooted, terminals)
    part = partition_regions(rooted, y)
    by = _bag_union(rooted, y)
    glue_terminals = terminals + tuple(sorted(by - set(terminals)))

    inputs, region_terminals, region_edges = [], [], []
    for region in part.regions:
        rt = tuple(sorted(_bag_union(rooted, region) & by))
        g_r = region_subgraph(net, rooted, region, rt, assignment)
        inputs.append(g_r)
        region_terminals.append(rt)
        region_edges.append(g_r.m)
    if fn in BLACKBOXES.values() or isinstance(fn, functools.partial):
        outputs = pmap(_run_blackbox, [(fn, g) for g in inputs])
    else:
        outputs = [fn(g) for g in inputs]

    g_y = region_subgraph(net, rooted, y, glue_terminals, assignment)
    y_edges = g_y.m
    h = g_y
    used = set(h.vertices)
    next_id = max(net.vertices | used, default=-1) + 1
    for g_r, h_r in zip(inputs, outputs):
        if set(h_r.terminals) != set(g_r.terminals):
            raise ValueError(
                f"blackbox output has terminals {sorted(h_r.terminals)}, expected {sorted(g_r.terminals)}"
            )
        own = g_r.vertices - by
        rename = {}
        for v in h_r.steiner_vertices():
            if v not in own or v in used:
                rename[v] = next_id
                next_id += 1
        if rename:
            h_r = h_r.relabel(rename)
        used |= h_r.vertices
        h = steiner_disjoint_union(h, h_r, glue_terminals)
    return ReductionResult(h.with_terminals(terminals), rooted, part, region_terminals, region_edges, y_edges)


def reduce(
    net: Network,
    td: TreeDecomposition,
    terminals: Sequence[int] | None = None,
    blackbox: str | Blackbox = "mimick",
    *,
    mode: str = "cut",
) -> Network:
    """The composed sparsifier of :func:`reduce_detailed`."""
    return reduce_detailed(net, td, terminals, blackbox, mode=mode).network


class TreewidthReducer(TransformerMixin, BaseEstimator):
    """Region-wise sparsification along a fixed tree decomposition.

    Parameters:
        decomposition: the :class:`TreeDecomposition` of the input network.
        blackbox: name from :data:`BLACKBOXES` or a callable.
        mode: ``"cut"`` or ``"flow"``.

    Attributes:
        result_: the :class:`ReductionResult` of the fitted network.
    """

    def __init__(self, decomposition=None, blackbox="mimick", mode: str = "cut"):
        self.decomposition = decomposition
        self.blackbox = blackbox
        self.mode = mode

    def fit(self, X, y=None):
        if self.decomposition is None:
            raise ValueError("a tree decomposition is required")
        self.result_ = reduce_detailed(X, self.decomposition, blackbox=self.blackbox, mode=self.mode)
        self._fitted_network = check_network(X)
        return self

    def transform(self, X):
        if not hasattr(self, "result_"):
            raise NotFittedError("TreewidthReducer is not fitted yet; call fit first")
        net = check_network(X)
        if net == self._fitted_network:
            return self.result_.network
        return reduce(net, self.decomposition, blackbox=self.blackbox, mode=self.mode)
