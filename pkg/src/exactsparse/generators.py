"""Seeded random instance generators for every supported structure.

Every generator is driven by a single :class:`random.Random` seeded from the
spec, so the same :class:`InstanceSpec` always yields the same network and
the same sidecar files, byte for byte.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .io import dump_network, dump_separator, dump_tree_decomposition
from .network import Network
from .treewidth import TreeDecomposition

__all__ = [
    "KINDS",
    "UniformRational",
    "SmallSupport",
    "parse_capacity_spec",
    "InstanceSpec",
    "GeneratedInstance",
    "generate",
    "random_star",
    "random_quasi_bipartite",
]

KINDS = ("quasi-bipartite", "vertex-cover", "vertex-integrity", "bounded-treewidth")


@dataclass(frozen=True)
class UniformRational:
    """Numerator uniform in ``[lo, hi]``, denominator uniform in ``[1, den]``."""

    lo: int = 1
    hi: int = 64
    den: int = 16

    def __post_init__(self) -> None:
        if not (0 <= self.lo <= self.hi) or self.den < 1:
            raise ValueError(f"invalid uniform-rational parameters {self}")

    def draw(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randint(self.lo, self.hi), rng.randint(1, self.den))

    def __str__(self) -> str:
        return f"uniform-rational({self.lo},{self.hi},{self.den})"


@dataclass(frozen=True)
class SmallSupport:
    """Uniform choice from a short list of values; forces signature collisions."""

    values: tuple[Fraction, ...] = (Fraction(1), Fraction(2), Fraction(3))

    def __post_init__(self) -> None:
        vals = tuple(Fraction(v) for v in self.values)
        if not vals or any(v < 0 for v in vals):
            raise ValueError("small-support needs at least one nonnegative value")
        object.__setattr__(self, "values", vals)

    def draw(self, rng: random.Random) -> Fraction:
        return rng.choice(self.values)

    def __str__(self) -> str:
        return "small-support(" + ",".join(str(v) for v in self.values) + ")"


_CAP_RE = re.compile(r"^\s*([a-z-]+)\s*\((.*)\)\s*$")


def parse_capacity_spec(text: str) -> UniformRational | SmallSupport:
    """Parse ``uniform-rational(lo,hi,den)`` or ``small-support(v1,v2,...)``."""
    m = _CAP_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse capacity distribution {text!r}")
    name, args = m.group(1), [a.strip() for a in m.group(2).split(",") if a.strip()]
    try:
        if name == "uniform-rational":
            return UniformRational(*(int(a) for a in args))
        if name == "small-support":
            return SmallSupport(tuple(Fraction(a) for a in args))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad capacity distribution {text!r}: {exc}") from None
    raise ValueError(f"unknown capacity distribution {name!r}")


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of a random instance.

    Attributes:
        kind: one of :data:`KINDS`.
        k: number of terminals.
        n: number of vertices.
        a: cover or separator size (vertex-cover, vertex-integrity).
        b: component size bound (vertex-integrity).
        w: treewidth bound (bounded-treewidth).
        capacity: capacity distribution.
        seed: 64-bit seed.
    """

    kind: str
    k: int
    n: int
    a: int | None = None
    b: int | None = None
    w: int | None = None
    capacity: UniformRational | SmallSupport = field(default_factory=UniformRational)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; choose from {KINDS}")
        if self.k < 0 or self.n < self.k:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        if self.kind in ("vertex-cover", "vertex-integrity"):
            if self.a is None or not 0 <= self.a <= self.n:
                raise ValueError(f"{self.kind} needs 0 <= a <= n")
        if self.kind == "vertex-integrity":
            if self.b is None or self.b < 1:
                raise ValueError("vertex-integrity needs b >= 1")
            if self.b > self.n:
                raise ValueError(f"b={self.b} exceeds n={self.n}")
        if self.kind == "bounded-treewidth":
            if self.w is None or self.w < 0:
                raise ValueError("bounded-treewidth needs w >= 0")
            if self.w + 1 > self.n:
                raise ValueError(f"w={self.w} needs at least {self.w + 1} vertices")


@dataclass
class GeneratedInstance:
    """A generated network and its structural certificate, if any."""

    spec: InstanceSpec
    network: Network
    separator: list[int] | None = None
    decomposition: TreeDecomposition | None = None

    def files(self) -> dict[str, str]:
        """Suffix to file content: ``.net`` plus ``.sep`` or ``.td`` when present."""
        out = {".net": dump_network(self.network)}
        if self.separator is not None:
            b = self.spec.b if self.spec.kind == "vertex-integrity" else None
            out[".sep"] = dump_separator(self.separator, b)
        if self.decomposition is not None:
            out[".td"] = dump_tree_decomposition(self.decomposition, self.network.n)
        return out

    def write(self, prefix: str | Path) -> list[Path]:
        paths = []
        for suffix, text in self.files().items():
            path = Path(f"{prefix}{suffix}")
            path.write_text(text)
            paths.append(path)
        return paths


def random_star(rng: random.Random, k: int, capacity, density: float = 0.7) -> tuple[Fraction, ...]:
    """Capacity vector with at least one positive entry (for ``k >= 1``)."""
    while True:
        c = tuple(capacity.draw(rng) if rng.random() < density else Fraction(0) for _ in range(k))
        if any(c) or k == 0:
            return c


def random_quasi_bipartite(
    rng: random.Random, k: int, stars: int, capacity=None, terminal_density: float = 0.3
) -> Network:
    """Terminals ``0 .. k-1`` and star centers ``k .. k+stars-1``."""
    capacity = capacity or UniformRational()
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < terminal_density:
                edges.append((i, j, capacity.draw(rng)))
    for s in range(stars):
        for t, x in enumerate(random_star(rng, k, capacity)):
            if x:
                edges.append((k + s, t, x))
    return Network(edges, range(k), range(k + stars))


def _pick_terminals(rng: random.Random, n: int, k: int, pool: Sequence[int] | None = None) -> list[int]:
    return sorted(rng.sample(list(range(n)) if pool is None else list(pool), k))


def _vertex_cover(spec: InstanceSpec, rng: random.Random) -> GeneratedInstance:
    n, a = spec.n, spec.a
    cover = list(range(a))
    edges = []
    for i in range(a):
        for j in range(i + 1, a):
            if rng.random() < 0.5:
                edges.append((i, j, spec.capacity.draw(rng)))
    for v in range(a, n):
        for x in cover:
            if rng.random() < 0.6:
                edges.append((v, x, spec.capacity.draw(rng)))
    net = Network(edges, _pick_terminals(rng, n, spec.k), range(n))
    return GeneratedInstance(spec, net, separator=cover)


def _vertex_integrity(spec: InstanceSpec, rng: random.Random) -> GeneratedInstance:
    n, a, b = spec.n, spec.a, spec.b
    sep = list(range(a))
    edges = []
    for i in range(a):
        for j in range(i + 1, a):
            if rng.random() < 0.5:
                edges.append((i, j, spec.capacity.draw(rng)))
    v = a
    while v < n:
        size = min(rng.randint(1, b), n - v)
        comp = list(range(v, v + size))
        v += size
        # a random spanning tree keeps the component connected
        for i in range(1, size):
            edges.append((comp[rng.randrange(i)], comp[i], spec.capacity.draw(rng)))
        for i in range(size):
            for j in range(i + 1, size):
                if rng.random() < 0.3:
                    edges.append((comp[i], comp[j], spec.capacity.draw(rng)))
            for x in sep:
                if rng.random() < 0.6:
                    edges.append((comp[i], x, spec.capacity.draw(rng)))
    net = Network(edges, _pick_terminals(rng, n, spec.k), range(n))
    return GeneratedInstance(spec, net, separator=sep)


def _bounded_treewidth(spec: InstanceSpec, rng: random.Random) -> GeneratedInstance:
    """Random partial ``w``-tree with its natural decomposition (bag ids from 1)."""
    n, w = spec.n, spec.w
    order = list(range(n))
    rng.shuffle(order)
    base = order[: w + 1]
    bags: dict[int, frozenset[int]] = {1: frozenset(base)}
    tree_edges: list[tuple[int, int]] = []
    edge_set: set[tuple[int, int]] = set()
    for i in range(len(base)):
        for j in range(i + 1, len(base)):
            edge_set.add((min(base[i], base[j]), max(base[i], base[j])))
    for v in order[w + 1 :]:
        parent = rng.randint(1, len(bags))
        if w == 0:
            clique: list[int] = []
        else:
            clique = rng.sample(sorted(bags[parent]), w)
        bid = len(bags) + 1
        bags[bid] = frozenset(clique + [v])
        tree_edges.append((parent, bid))
        for u in clique:
            edge_set.add((min(u, v), max(u, v)))
    edges = [(u, v, spec.capacity.draw(rng)) for u, v in sorted(edge_set) if rng.random() < 0.75]
    net = Network(edges, _pick_terminals(rng, n, spec.k), range(n))
    return GeneratedInstance(spec, net, decomposition=TreeDecomposition(bags, tree_edges))


def generate(spec: InstanceSpec) -> GeneratedInstance:
    """Deterministic random instance matching the structure promised by ``spec.kind``."""
    rng = random.Random(spec.seed)
    if spec.kind == "quasi-bipartite":
        net = random_quasi_bipartite(rng, spec.k, spec.n - spec.k, spec.capacity)
        return GeneratedInstance(spec, net)
    if spec.kind == "vertex-cover":
        return _vertex_cover(spec, rng)
    if spec.kind == "vertex-integrity":
        return _vertex_integrity(spec, rng)
    return _bounded_treewidth(spec, rng)
