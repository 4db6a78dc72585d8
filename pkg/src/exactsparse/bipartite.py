"""Contraction-based exact cut and flow sparsifiers for quasi-bipartite networks.

A quasi-bipartite network is the Steiner-disjoint union of the terminal graph
``G[K]`` and one star per Steiner vertex. Stars whose capacity vectors have
equal cut signatures can be contracted without changing any terminal
min-cut; stars with equal strong signatures can be contracted without
changing any flow factor. Each bucket of equal-signature stars is contracted
into its smallest-id member.

Both constructions are also available as scikit-learn style estimators:
``fit`` learns the bucket label of every Steiner vertex and ``transform``
contracts the buckets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, NamedTuple

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .cones import GuardrailError, MAX_K_WEAK, ray_weights
from .network import Network, contract_many, induced_subgraph
from .parallel import pmap
from .signatures import cut_signature, strong_signature
from .validation import check_network

__all__ = [
    "QuasiBipartiteDecomposition",
    "decompose_quasi_bipartite",
    "bucket_stars",
    "sparsify_cut_contraction",
    "sparsify_flow_contraction",
    "ClassCounts",
    "class_count_report",
    "size_bound",
    "ContractionSparsifier",
    "BasicStarSparsifier",
]

Vector = tuple[Fraction, ...]


@dataclass
class QuasiBipartiteDecomposition:
    """``G[K]`` plus the capacity vector of every Steiner vertex, in id order."""

    terminal_part: Network
    star_part: list[tuple[int, Vector]]


def decompose_quasi_bipartite(net: Network) -> QuasiBipartiteDecomposition:
    """Split a quasi-bipartite network into ``G[K]`` and its stars.

    Raises:
        ValueError: naming the first Steiner-Steiner edge, if there is one.
    """
    net = check_network(net, quasi_bipartite=True)
    terminal_part = induced_subgraph(net, net.terminals, net.terminals)
    stars = [(v, net.capacity_vector(v)) for v in net.steiner_vertices()]
    return QuasiBipartiteDecomposition(terminal_part, stars)


def _weak_key(c: Vector) -> Hashable:
    return cut_signature(c)


def _strong_key(c: Vector) -> Hashable:
    return strong_signature(c)


def bucket_stars(net: Network, strong: bool = False) -> dict[int, int]:
    """Map every nonzero star center to its bucket representative (smallest id).

    All-zero stars are omitted: they carry no capacity and are dropped.
    """
    dec = decompose_quasi_bipartite(net)
    stars = [(v, c) for v, c in dec.star_part if any(c)]
    keys = pmap(_strong_key if strong else _weak_key, [c for _, c in stars])
    rep: dict[Hashable, int] = {}
    labels: dict[int, int] = {}
    for (v, _), key in zip(stars, keys):
        labels[v] = rep.setdefault(key, v)
    return labels


def _contract_buckets(net: Network, labels: dict[int, int]) -> Network:
    if net.k <= 1:
        return induced_subgraph(net, net.terminals, net.terminals)
    groups: dict[int, list[int]] = {}
    for v, r in labels.items():
        groups.setdefault(r, []).append(v)
    keep = set(net.terminals) | set(labels)
    trimmed = induced_subgraph(net, keep, net.terminals)
    return contract_many(trimmed, groups.values())


def sparsify_cut_contraction(net: Network) -> Network:
    """Exact cut sparsifier: contract stars with equal cut signatures."""
    net = check_network(net)
    return _contract_buckets(net, bucket_stars(net, strong=False))


def sparsify_flow_contraction(net: Network) -> Network:
    """Exact flow sparsifier: contract stars with equal strong signatures."""
    net = check_network(net)
    return _contract_buckets(net, bucket_stars(net, strong=True))


class ClassCounts(NamedTuple):
    weak_classes: int
    strong_classes: int


def class_count_report(net: Network) -> ClassCounts:
    """Number of distinct cut and strong signatures among the nonzero stars."""
    weak = set(bucket_stars(net, strong=False).values())
    strong = set(bucket_stars(net, strong=True).values())
    return ClassCounts(len(weak), len(strong))


def size_bound(k: int, strong: bool = False) -> int:
    """Upper bound on the output size: ``k + 2**(k**3)`` (cut) or ``k + 3**(k**3)`` (flow)."""
    return k + (3 if strong else 2) ** (k**3)


class ContractionSparsifier(TransformerMixin, BaseEstimator):
    """Signature-bucketing sparsifier for quasi-bipartite networks.

    Parameters:
        mode: ``"cut"`` buckets by cut signature (exact cut sparsifier);
            ``"flow"`` buckets by strong signature (exact flow sparsifier).

    Attributes:
        labels_: ``{steiner vertex: bucket representative}`` for nonzero stars.
        n_classes_: number of buckets.
        n_terminals_: ``k`` of the fitted network.
    """

    def __init__(self, mode: str = "cut"):
        self.mode = mode

    def fit(self, X, y=None):
        if self.mode not in ("cut", "flow"):
            raise ValueError(f"mode must be 'cut' or 'flow', got {self.mode!r}")
        net = check_network(X, quasi_bipartite=True)
        self.labels_ = bucket_stars(net, strong=self.mode == "flow")
        self.n_classes_ = len(set(self.labels_.values()))
        self.n_terminals_ = net.k
        return self

    def transform(self, X):
        if not hasattr(self, "labels_"):
            raise NotFittedError("ContractionSparsifier is not fitted yet; call fit first")
        net = check_network(X, quasi_bipartite=True)
        unknown = [v for v in net.steiner_vertices() if any(net.capacity_vector(v)) and v not in self.labels_]
        if unknown:
            raise ValueError(f"Steiner vertices not seen during fit: {unknown}")
        return _contract_buckets(net, {v: r for v, r in self.labels_.items() if v in net})


class BasicStarSparsifier(TransformerMixin, BaseEstimator):
    """Replace every star by its conic decomposition into basic stars.

    Equal basic stars from different stars are merged, so the output has at
    most ``k + |Q|`` vertices, ``Q`` being the set of basic stars.

    Parameters:
        unsafe: allow ``k`` beyond the enumeration guardrail.

    Attributes:
        weights_: ``{ray coordinates: total weight}``.
    """

    def __init__(self, unsafe: bool = False):
        self.unsafe = unsafe

    def fit(self, X, y=None):
        net = check_network(X, quasi_bipartite=True)
        if net.k > MAX_K_WEAK and not self.unsafe:
            raise GuardrailError(f"k={net.k} exceeds the limit {MAX_K_WEAK}; set unsafe=True to override")
        dec = decompose_quasi_bipartite(net)
        self.weights_ = ray_weights([c for _, c in dec.star_part], net.k, unsafe=self.unsafe)
        self.terminals_ = net.terminals
        self.terminal_part_ = dec.terminal_part
        return self

    def transform(self, X=None):
        """Build the sparsifier from the fitted weights; ``X`` is only checked for matching terminals."""
        if not hasattr(self, "weights_"):
            raise NotFittedError("BasicStarSparsifier is not fitted yet; call fit first")
        if X is not None and tuple(check_network(X).terminals) != tuple(self.terminals_):
            raise ValueError("network terminals differ from the fitted ones")
        base = max(self.terminal_part_.vertices, default=-1) + 1
        edges = list(self.terminal_part_.edges())
        for offset, ray in enumerate(sorted(self.weights_)):
            for t, x in zip(self.terminals_, ray):
                if x:
                    edges.append((base + offset, t, x * self.weights_[ray]))
        return Network(edges, self.terminals_, [base + i for i in range(len(self.weights_))])

