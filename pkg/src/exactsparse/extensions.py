"""Exact sparsifiers for networks with a small vertex cover or small components.

Both constructions split the network along a caller-provided vertex set
``X``: the part touching the terminals is kept verbatim and the rest, seen
with terminal set ``X``, is sparsified by contraction before the two parts
are glued back with a Steiner-disjoint union.

Component capacity vectors use a fixed coordinate layout for a component
with (padded) vertices ``v_0 .. v_{b-1}`` and separator ``t_0 .. t_{a-1}``:
first ``x(v_i, t_j)`` at index ``i * a + j``, then ``x(v_i, v_j)`` for
``i < j`` in lexicographic order. Storing each unordered pair once encodes
the symmetry and zero-diagonal equalities directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .bipartite import _contract_buckets, bucket_stars
from .cones import ConeRows, ConicDecomposition, GuardrailError, conic_decompose
from .network import Network, contract_many, induced_subgraph, steiner_disjoint_union
from .parallel import pmap
from .validation import as_capacity_vector, check_network

__all__ = [
    "MAX_COMPONENT_COMPLEXITY",
    "check_vertex_cover",
    "greedy_vertex_cover",
    "split_vertex_cover",
    "sparsify_vertex_cover",
    "SeparatorInstance",
    "separator_instance",
    "component_dim",
    "component_vector",
    "component_cut_values",
    "ComponentSignature",
    "component_signature",
    "canonical_component_order",
    "component_cone",
    "component_conic_decompose",
    "VertexIntegrityPlan",
    "plan_vertex_integrity",
    "sparsify_vertex_integrity",
    "vertex_integrity_size_bound",
    "VertexCoverSparsifier",
    "VertexIntegritySparsifier",
]

# limit on b * (a + b) ** 2 for component cone decompositions
MAX_COMPONENT_COMPLEXITY = 18

Vector = tuple[Fraction, ...]


# -- vertex cover ---------------------------------------------------------


def check_vertex_cover(net: Network, cover: Iterable[int]) -> frozenset[int]:
    """Return ``cover`` as a set, or raise naming an uncovered edge."""
    cover = frozenset(cover)
    unknown = cover - net.vertices
    if unknown:
        raise ValueError(f"cover vertices not in the network: {sorted(unknown)}")
    for u, v, _ in net.edges():
        if u not in cover and v not in cover:
            raise ValueError(f"not a vertex cover: edge ({u}, {v}) is uncovered")
    return cover


def greedy_vertex_cover(net: Network) -> list[int]:
    """Cover built by repeatedly taking a vertex of maximum uncovered degree.

    Ties go to the smaller id. A convenience only; it carries no size guarantee.
    """
    remaining = {(u, v) for u, v, _ in net.edges()}
    cover: list[int] = []
    while remaining:
        degree: dict[int, int] = {}
        for u, v in remaining:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        best = min(degree, key=lambda x: (-degree[x], x))
        cover.append(best)
        remaining = {e for e in remaining if best not in e}
    return sorted(cover)


def _ordered_union(first: Sequence[int], second: Iterable[int]) -> tuple[int, ...]:
    seen = set(first)
    return tuple(first) + tuple(sorted(v for v in second if v not in seen))


def split_vertex_cover(net: Network, cover: Iterable[int]) -> tuple[Network, Network]:
    """Split into ``G[K + X]`` (terminals ``K + X``) and ``G[(V - K) + X] - E(X)`` (terminals ``X``).

    The second part is quasi-bipartite for terminal set ``X`` and the two
    parts are Steiner-disjoint for ``K + X``.
    """
    net = check_network(net)
    x = check_vertex_cover(net, cover)
    k = set(net.terminals)
    g_k = induced_subgraph(net, k | x, _ordered_union(net.terminals, x))
    side = (net.vertices - k) | x
    edges = [(u, v, c) for u, v, c in net.edges() if u in side and v in side and not (u in x and v in x)]
    g_s = Network(edges, sorted(x), side)
    return g_k, g_s


def sparsify_vertex_cover(net: Network, cover: Iterable[int], mode: str = "cut") -> Network:
    """Exact cut (or flow) sparsifier for a network with vertex cover ``cover``.

    The cover side is sparsified by signature contraction with terminal set
    ``X`` and glued back to ``G[K + X]``. The result has the terminals of
    ``net`` and at most ``|K + X|`` plus the number of signature classes
    vertices.
    """
    if mode not in ("cut", "flow"):
        raise ValueError(f"mode must be 'cut' or 'flow', got {mode!r}")
    g_k, g_s = split_vertex_cover(net, cover)
    h_s = _contract_buckets(g_s, bucket_stars(g_s, strong=mode == "flow"))
    h = steiner_disjoint_union(g_k, h_s, g_k.terminals)
    return h.with_terminals(net.terminals)


# -- separator instances and component signatures -------------------------


@dataclass
class SeparatorInstance:
    """Components of ``G - X``, split by whether they contain a terminal.

    Attributes:
        separator: ``X`` in sorted order; fixes the separator coordinate order.
        b: component size bound (every component is padded to ``b``).
        terminal_components: components holding at least one terminal.
        components: the remaining components, each as a sorted vertex list.
    """

    separator: tuple[int, ...]
    b: int
    terminal_components: list[tuple[int, ...]]
    components: list[tuple[int, ...]]

    @property
    def a(self) -> int:
        return len(self.separator)


def separator_instance(net: Network, separator: Iterable[int], b: int) -> SeparatorInstance:
    """Find the components of ``G - X`` and check they have at most ``b`` vertices."""
    net = check_network(net)
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    x = frozenset(separator)
    unknown = x - net.vertices
    if unknown:
        raise ValueError(f"separator vertices not in the network: {sorted(unknown)}")
    seen: set[int] = set(x)
    with_terms, without = [], []
    for start in net.sorted_vertices():
        if start in seen:
            continue
        seen.add(start)
        comp, stack = [start], [start]
        while stack:
            u = stack.pop()
            for w in net.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comp.sort()
        if len(comp) > b:
            raise ValueError(f"component {comp} of G - X has {len(comp)} > b = {b} vertices")
        if any(net.is_terminal(v) for v in comp):
            with_terms.append(tuple(comp))
        else:
            without.append(tuple(comp))
    return SeparatorInstance(tuple(sorted(x)), b, with_terms, without)


def component_dim(a: int, b: int) -> int:
    return a * b + b * (b - 1) // 2


def _inner_pairs(b: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(b), 2))


def component_vector(
    net: Network, component: Sequence[int], separator: Sequence[int], b: int | None = None
) -> Vector:
    """Capacity vector of ``component`` toward ``separator``, padded to ``b`` vertices."""
    b = len(component) if b is None else b
    if len(component) > b:
        raise ValueError(f"component of size {len(component)} exceeds b = {b}")
    verts: list[int | None] = list(component) + [None] * (b - len(component))
    out = []
    for v in verts:
        for t in separator:
            out.append(net.capacity(v, t) if v is not None else Fraction(0))
    for i, j in _inner_pairs(b):
        vi, vj = verts[i], verts[j]
        out.append(net.capacity(vi, vj) if vi is not None and vj is not None else Fraction(0))
    return tuple(out)


def _cut_rows(a: int, b: int) -> list[list[list[int]]]:
    """``rows[A][B]`` is the integer coefficient row of the cut ``A + B``."""
    pairs = _inner_pairs(b)
    rows = []
    for A in range(1 << a):
        per_a = []
        for B in range(1 << b):
            row = []
            for i in range(b):
                for j in range(a):
                    row.append((B >> i & 1) ^ (A >> j & 1))
            for i, j in pairs:
                row.append((B >> i & 1) ^ (B >> j & 1))
            per_a.append(row)
        rows.append(per_a)
    return rows


def component_cut_values(c: Sequence, a: int, b: int) -> list[list[Fraction]]:
    """``values[A][B]`` is the capacity of the cut ``A + B`` (bitmasks over ``X`` and the component)."""
    c = as_capacity_vector(c, k=component_dim(a, b))
    return [[sum((x for x, r in zip(c, row) if r), Fraction(0)) for row in per_a] for per_a in _cut_rows(a, b)]


@dataclass(frozen=True)
class ComponentSignature:
    """Bit ``(A * 2**b + B) * 2**b + B2`` of ``bits`` is ``c(A + B) <= c(A + B2)``."""

    a: int
    b: int
    bits: int

    def rel(self, A: int, B: int, B2: int) -> bool:
        return bool(self.bits >> ((A << 2 * self.b) | (B << self.b) | B2) & 1)

    def triples(self) -> Iterable[tuple[int, int, int]]:
        """Every ``(A, B, B2)`` in the relation."""
        for A in range(1 << self.a):
            for B in range(1 << self.b):
                for B2 in range(1 << self.b):
                    if self.rel(A, B, B2):
                        yield A, B, B2

    def hex(self) -> str:
        width = max(1, (1 << (self.a + 2 * self.b)) // 4)
        return format(self.bits, f"0{width}x")


def component_signature(c: Sequence, a: int, b: int) -> ComponentSignature:
    """The relation ``c(A + B) <= c(A + B2)`` over all ``2**a * 4**b`` triples."""
    values = component_cut_values(c, a, b)
    bits = 0
    idx = 0
    for A in range(1 << a):
        row = values[A]
        for B in range(1 << b):
            for B2 in range(1 << b):
                if row[B] <= row[B2]:
                    bits |= 1 << idx
                idx += 1
    return ComponentSignature(a, b, bits)


def _permute(c: Vector, a: int, b: int, perm: Sequence[int]) -> Vector:
    """Vector of the component whose ``i``-th vertex is the old ``perm[i]``-th."""
    out = [c[p * a + j] for p in perm for j in range(a)]
    index = {pair: a * b + n for n, pair in enumerate(_inner_pairs(b))}
    for i, j in _inner_pairs(b):
        p, q = perm[i], perm[j]
        out.append(c[index[(min(p, q), max(p, q))]])
    return tuple(out)


def canonical_component_order(c: Sequence, a: int, b: int) -> tuple[tuple[int, ...], ComponentSignature]:
    """Vertex order whose signature has the smallest ``bits``, with that signature.

    Ties keep the lexicographically first permutation.
    """
    c = as_capacity_vector(c, k=component_dim(a, b))
    best = None
    for perm in itertools.permutations(range(b)):
        sig = component_signature(_permute(c, a, b, perm), a, b)
        if best is None or sig.bits < best[1].bits:
            best = (perm, sig)
    return best


def component_cone(c: Sequence, a: int, b: int) -> ConeRows:
    """The component cut cone of ``c``: nonnegative ``x`` agreeing with every relation of ``c``."""
    c = as_capacity_vector(c, k=component_dim(a, b))
    dim = len(c)
    cut_rows = _cut_rows(a, b)
    rows, labels, seen = [], [], set()
    for i in range(dim):
        row = tuple(Fraction(-(j == i)) for j in range(dim))
        seen.add(row)
        rows.append(row)
        labels.append(("nonneg", i))
    for A, B, B2 in component_signature(c, a, b).triples():
        row = tuple(Fraction(p - q) for p, q in zip(cut_rows[A][B], cut_rows[A][B2]))
        if row in seen or not any(row):
            continue
        seen.add(row)
        rows.append(row)
        labels.append((A, B, B2))
    return ConeRows(dim, tuple(rows), tuple(labels))


def component_conic_decompose(c: Sequence, a: int, b: int, *, unsafe: bool = False) -> ConicDecomposition:
    """Decompose a component capacity vector into extreme rays of its cut cone.

    Every ray agrees with ``c`` on all of its relations, and there are at
    most ``a * b + b * (b - 1) / 2`` terms.

    Raises:
        GuardrailError: when ``b * (a + b) ** 2`` exceeds
            :data:`MAX_COMPONENT_COMPLEXITY` and ``unsafe`` is not set.
    """
    if b * (a + b) ** 2 > MAX_COMPONENT_COMPLEXITY and not unsafe:
        raise GuardrailError(
            f"b(a+b)^2 = {b * (a + b) ** 2} exceeds {MAX_COMPONENT_COMPLEXITY}; pass unsafe=True to override"
        )
    c = as_capacity_vector(c, k=component_dim(a, b))
    return conic_decompose(component_cone(c, a, b), c)


# -- vertex integrity -----------------------------------------------------


@dataclass
class VertexIntegrityPlan:
    """How the components away from the terminals get merged.

    Attributes:
        instance: the separator instance.
        orders: per component, its vertex list in the order used for the
            signature (``None`` marks a padding vertex).
        signatures: per component, its signature under that order.
        buckets: lists of component indices with equal signature, in first
            occurrence order. Zero components are left out and get dropped.
        groups: vertex groups to contract, one per bucket and position.
    """

    instance: SeparatorInstance
    orders: list[tuple[int | None, ...]]
    signatures: list[ComponentSignature]
    buckets: list[list[int]] = field(default_factory=list)
    groups: list[list[int]] = field(default_factory=list)

    @property
    def n_signatures(self) -> int:
        return len(self.buckets)


def _component_key(args):
    c, a, b, canonicalize = args
    if canonicalize:
        return canonical_component_order(c, a, b)
    return tuple(range(b)), component_signature(c, a, b)


def plan_vertex_integrity(
    net: Network, separator: Iterable[int], b: int, *, canonicalize: bool = False
) -> VertexIntegrityPlan:
    """Bucket the non-terminal components of ``G - X`` by component signature.

    Components are read in increasing vertex id order and padded to ``b``
    vertices. With ``canonicalize`` each component is first reordered to its
    lexicographically least signature, so differently labeled isomorphic
    components can share a bucket.
    """
    inst = separator_instance(net, separator, b)
    a = inst.a
    vectors = [component_vector(net, comp, inst.separator, b) for comp in inst.components]
    keys = pmap(_component_key, [(c, a, b, canonicalize) for c in vectors])
    orders, signatures = [], []
    for comp, (perm, sig) in zip(inst.components, keys):
        padded = list(comp) + [None] * (b - len(comp))
        orders.append(tuple(padded[p] for p in perm))
        signatures.append(sig)
    plan = VertexIntegrityPlan(inst, orders, signatures)
    index: dict[ComponentSignature, int] = {}
    for ci, (c, sig) in enumerate(zip(vectors, signatures)):
        if not any(c):
            continue
        if sig not in index:
            index[sig] = len(plan.buckets)
            plan.buckets.append([])
        plan.buckets[index[sig]].append(ci)
    for bucket in plan.buckets:
        for pos in range(b):
            group = [plan.orders[ci][pos] for ci in bucket if plan.orders[ci][pos] is not None]
            if group:
                plan.groups.append(group)
    return plan


def _vertex_integrity_parts(net: Network, inst: SeparatorInstance) -> tuple[Network, Network]:
    x = set(inst.separator)
    near = x.union(*map(set, inst.terminal_components))
    g_k = induced_subgraph(net, near, _ordered_union(net.terminals, x))
    far = set(inst.separator).union(*map(set, inst.components))
    edges = [(u, v, c) for u, v, c in net.edges() if u in far and v in far and not (u in x and v in x)]
    g_s = Network(edges, inst.separator, far)
    return g_k, g_s


def _apply_plan(net: Network, plan: VertexIntegrityPlan) -> Network:
    inst = plan.instance
    g_k, g_s = _vertex_integrity_parts(net, inst)
    kept = set(inst.separator).union(v for grp in plan.groups for v in grp)
    h_s = contract_many(induced_subgraph(g_s, kept, inst.separator), plan.groups)
    h = steiner_disjoint_union(g_k, h_s, g_k.terminals)
    return h.with_terminals(net.terminals)


def sparsify_vertex_integrity(
    net: Network, separator: Iterable[int], b: int, *, canonicalize: bool = False
) -> Network:
    """Exact cut sparsifier for a network whose ``G - X`` has components of size at most ``b``.

    Terminal-holding components stay as they are. The other components are
    bucketed by component signature, and within a bucket the vertices at
    the same position are contracted together. Padding vertices never
    materialize. All-zero components are dropped.
    """
    net = check_network(net)
    plan = plan_vertex_integrity(net, separator, b, canonicalize=canonicalize)
    return _apply_plan(net, plan)


def vertex_integrity_size_bound(k: int, a: int, b: int, n_signatures: int) -> int:
    """Vertex-count bound ``k * b + a + n_signatures * b`` of the output."""
    return k * b + a + n_signatures * b


# -- estimators -----------------------------------------------------------


class VertexCoverSparsifier(TransformerMixin, BaseEstimator):
    """Vertex-cover split followed by signature contraction.

    Parameters:
        cover: the vertex cover ``X``; ``None`` uses :func:`greedy_vertex_cover`.
        mode: ``"cut"`` or ``"flow"``.

    Attributes:
        cover_: the cover used.
        labels_: ``{steiner vertex: bucket representative}`` on the cover side.
    """

    def __init__(self, cover=None, mode: str = "cut"):
        self.cover = cover
        self.mode = mode

    def fit(self, X, y=None):
        if self.mode not in ("cut", "flow"):
            raise ValueError(f"mode must be 'cut' or 'flow', got {self.mode!r}")
        net = check_network(X)
        self.cover_ = sorted(greedy_vertex_cover(net) if self.cover is None else set(self.cover))
        _, g_s = split_vertex_cover(net, self.cover_)
        self.labels_ = bucket_stars(g_s, strong=self.mode == "flow")
        return self

    def transform(self, X):
        if not hasattr(self, "labels_"):
            raise NotFittedError("VertexCoverSparsifier is not fitted yet; call fit first")
        net = check_network(X)
        g_k, g_s = split_vertex_cover(net, self.cover_)
        h_s = _contract_buckets(g_s, {v: r for v, r in self.labels_.items() if v in g_s})
        return steiner_disjoint_union(g_k, h_s, g_k.terminals).with_terminals(net.terminals)


class VertexIntegritySparsifier(TransformerMixin, BaseEstimator):
    """Component-signature contraction around a separator.

    Parameters:
        separator: the separator ``X``.
        b: the component size bound.
        canonicalize: reorder components to their least signature first.

    Attributes:
        plan_: the fitted :class:`VertexIntegrityPlan`.
        n_signatures_: number of buckets.
    """

    def __init__(self, separator=(), b: int = 1, canonicalize: bool = False):
        self.separator = separator
        self.b = b
        self.canonicalize = canonicalize

    def fit(self, X, y=None):
        net = check_network(X)
        self.plan_ = plan_vertex_integrity(net, self.separator, self.b, canonicalize=self.canonicalize)
        self.n_signatures_ = self.plan_.n_signatures
        return self

    def transform(self, X):
        if not hasattr(self, "plan_"):
            raise NotFittedError("VertexIntegritySparsifier is not fitted yet; call fit first")
        net = check_network(X)
        inst = separator_instance(net, self.separator, self.b)
        if inst != self.plan_.instance:
            raise ValueError("network does not have the component structure seen during fit")
        return _apply_plan(net, self.plan_)
