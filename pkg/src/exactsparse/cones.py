"""Star cones, their extreme rays (basic stars) and exact conic decompositions.

A capacity vector ``c`` defines the star cone: every nonnegative ``x`` with
``x(S) <= x(K - S)`` for each ``S`` in the cut signature of ``c`` (weak mode),
or with ``x(A) <= x(B)`` whenever ``c(A) <= c(B)`` for disjoint ``A, B``
(strong mode). Every constraint is stored as a pair of bitmasks ``(A, B)``
meaning ``x(A) <= x(B)``; ``x_i >= 0`` is ``(0, 1 << i)``.

The decomposition engine works on any pointed cone ``{x : a.x <= 0}``
contained in the nonnegative orthant, so the same code serves stars and the
component cones of :mod:`exactsparse.extensions`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import flint

from .network import Network
from .parallel import pmap
from .signatures import cut_signature, pair_from_index, strong_signature
from .validation import as_capacity_vector

__all__ = [
    "MAX_K_WEAK",
    "MAX_K_STRONG",
    "GuardrailError",
    "Ray",
    "ConicDecomposition",
    "ConeRows",
    "star_cone",
    "enumerate_basic_stars",
    "conic_decompose",
    "caratheodory_decompose",
    "build_basic_star_sparsifier",
    "ray_weights",
]

MAX_K_WEAK = 4
MAX_K_STRONG = 3

Vector = tuple[Fraction, ...]


class GuardrailError(ValueError):
    """Instance exceeds a configured size limit; pass ``unsafe=True`` to override."""


@dataclass(frozen=True)
class Ray:
    """Normalized extreme ray: nonnegative coordinates summing to 1.

    ``defining`` lists the labels of the tight constraints that pin the ray
    down (with the normalization they have full rank).
    """

    coords: Vector
    defining: tuple[Hashable, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.coords)

    def scaled(self, lam: Fraction) -> Vector:
        return tuple(lam * x for x in self.coords)


@dataclass
class ConicDecomposition:
    """``sum(lam * ray.coords for ray, lam in terms)`` equals the input exactly."""

    terms: list[tuple[Ray, Fraction]]

    def __len__(self) -> int:
        return len(self.terms)

    def reconstruct(self, dim: int | None = None) -> Vector:
        if dim is None:
            dim = len(self.terms[0][0]) if self.terms else 0
        total = [Fraction(0)] * dim
        for ray, lam in self.terms:
            for i, x in enumerate(ray.coords):
                total[i] += lam * x
        return tuple(total)


@dataclass(frozen=True)
class ConeRows:
    """Cone ``{x : row . x <= 0 for every row}`` with a label per row."""

    dim: int
    rows: tuple[Vector, ...]
    labels: tuple[Hashable, ...]

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(_dot(a, x) <= 0 for a in self.rows)

    def tight(self, x: Sequence[Fraction]) -> list[int]:
        return [i for i, a in enumerate(self.rows) if _dot(a, x) == 0]


def _dot(a: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((ai * xi for ai, xi in zip(a, x) if ai), Fraction(0))


def _pair_row(a: int, b: int, k: int) -> Vector:
    return tuple(Fraction((a >> i & 1) - (b >> i & 1)) for i in range(k))


def _qmat(rows: Sequence[Sequence[Fraction]], ncols: int) -> flint.fmpq_mat:
    entries = [flint.fmpq(x.numerator, x.denominator) for row in rows for x in row]
    return flint.fmpq_mat(len(rows), ncols, entries)


def _rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    if not rows:
        return 0
    return _qmat(rows, ncols).rank()


def _null_vector(rows: Sequence[Sequence[Fraction]], ncols: int) -> Vector:
    """A nonzero vector orthogonal to every row (rank must be below ``ncols``)."""
    if not rows:
        return tuple(Fraction(int(i == 0)) for i in range(ncols))
    reduced, rank = _qmat(rows, ncols).rref()
    pivots = []
    for i in range(rank):
        pivots.append(next(j for j in range(ncols) if reduced[i, j] != 0))
    free = next(j for j in range(ncols) if j not in pivots)
    vec = [Fraction(0)] * ncols
    vec[free] = Fraction(1)
    for i, p in enumerate(pivots):
        v = reduced[i, free]
        vec[p] = -Fraction(int(v.p), int(v.q))
    return tuple(vec)


def star_cone(c: Sequence, strong: bool = False) -> ConeRows:
    """Defining inequalities of the (strong) star cone of ``c``."""
    c = as_capacity_vector(c)
    k = len(c)
    rows, labels = [], []
    seen = set()

    def add(a: int, b: int) -> None:
        if (a, b) in seen:
            return
        seen.add((a, b))
        rows.append(_pair_row(a, b, k))
        labels.append((a, b))

    for i in range(k):
        add(0, 1 << i)
    if strong:
        sig = strong_signature(c)
        for idx, s in enumerate(sig.signs):
            a, b = pair_from_index(idx, k)
            if s <= 0 and (a or b):
                add(a, b)
    else:
        full = (1 << k) - 1
        for s in cut_signature(c).subsets():
            add(s, full ^ s)
    return ConeRows(k, tuple(rows), tuple(labels))


def _walk_to_ray(cone: ConeRows, p: Vector) -> tuple[Vector, list[int]]:
    """Move ``p`` (in the cone, coordinates summing to 1) to a vertex of that slice.

    Every step follows a direction that keeps all currently tight rows tight
    and the coordinate sum fixed, stopping at the first row that becomes
    tight. Each step raises the rank of the tight set by one.
    """
    dim = cone.dim
    ones = tuple(Fraction(1) for _ in range(dim))
    while True:
        tight = cone.tight(p)
        system = [cone.rows[i] for i in tight] + [ones]
        if _rank(system, dim) == dim:
            return p, tight
        q = _null_vector(system, dim)
        best = None
        for a in cone.rows:
            aq = _dot(a, q)
            if aq > 0:
                t = -_dot(a, p) / aq
                if best is None or t < best:
                    best = t
        if best is None:  # pragma: no cover - the slice is bounded
            raise AssertionError("unbounded direction inside a pointed cone")
        p = tuple(pi + best * qi for pi, qi in zip(p, q))


def conic_decompose(cone: ConeRows, c: Sequence[Fraction]) -> ConicDecomposition:
    """Carathéodory decomposition of ``c`` into extreme rays of ``cone``.

    ``c`` must lie in the cone. The result has at most ``cone.dim`` terms and
    every ray lies in the cone.
    """
    r = tuple(Fraction(x) for x in c)
    if len(r) != cone.dim:
        raise ValueError(f"vector of length {len(r)} for a cone of dimension {cone.dim}")
    if not cone.contains(r):
        raise ValueError("vector does not lie in the cone")
    terms: list[tuple[Ray, Fraction]] = []
    rank = _rank([cone.rows[i] for i in cone.tight(r)], cone.dim)
    while any(r):
        total = sum(r, Fraction(0))
        q, tight = _walk_to_ray(cone, tuple(x / total for x in r))
        lam, arg = None, -1
        for i, a in enumerate(cone.rows):
            aq = _dot(a, q)
            if aq < 0:
                ratio = _dot(a, r) / aq
                if lam is None or ratio < lam:
                    lam, arg = ratio, i
        assert lam is not None and lam > 0
        terms.append((Ray(q, tuple(cone.labels[i] for i in tight)), lam))
        r = tuple(ri - lam * qi for ri, qi in zip(r, q))
        new_rank = _rank([cone.rows[i] for i in cone.tight(r)], cone.dim)
        if any(r) and new_rank <= rank:  # pragma: no cover - guaranteed by the ratio test
            raise AssertionError("residual did not gain a tight constraint")
        rank = new_rank
    if len(terms) > cone.dim:  # pragma: no cover
        raise AssertionError("more terms than the cone dimension")
    return ConicDecomposition(terms)


def _check_guardrail(k: int, strong: bool, unsafe: bool) -> None:
    limit = MAX_K_STRONG if strong else MAX_K_WEAK
    if k > limit and not unsafe:
        mode = "strong" if strong else "weak"
        raise GuardrailError(f"k={k} exceeds the {mode}-mode limit {limit}; pass unsafe=True to override")


def caratheodory_decompose(c: Sequence, strong: bool = False, *, unsafe: bool = False) -> ConicDecomposition:
    """Decompose a capacity vector into at most ``k`` basic stars agreeing with it.

    Every ray of the result lies in the (strong) star cone of ``c``, so it
    satisfies every inequality of the signature of ``c``.
    """
    c = as_capacity_vector(c)
    _check_guardrail(len(c), strong, unsafe)
    return conic_decompose(star_cone(c, strong), c)


def _hyperplanes(k: int, strong: bool) -> list[tuple[int, int]]:
    """Candidate tight constraints ``x(A) = x(B)``, one per hyperplane."""
    out = [(0, 1 << i) for i in range(k)]
    seen = {frozenset(p) for p in out}
    if strong:
        pairs = [(a, b) for a in range(1 << k) for b in range(1 << k) if not a & b and (a or b)]
    else:
        full = (1 << k) - 1
        pairs = [(s, full ^ s) for s in range(1 << k)]
    for a, b in pairs:
        key = frozenset((a, b))
        if key not in seen:
            seen.add(key)
            out.append((a, b))
    return out


def _solve_system(k: int, system: tuple[tuple[int, int], ...]) -> Vector | None:
    rows = [_pair_row(a, b, k) for a, b in system] + [tuple(Fraction(1) for _ in range(k))]
    m = _qmat(rows, k)
    if m.rank() < k:
        return None
    rhs = flint.fmpq_mat(k, 1, [0] * (k - 1) + [1])
    sol = m.solve(rhs)
    x = tuple(Fraction(int(sol[i, 0].p), int(sol[i, 0].q)) for i in range(k))
    if any(v < 0 for v in x):
        return None
    return x


def _solve_chunk(args) -> list[tuple[Vector, tuple[tuple[int, int], ...]]]:
    k, systems = args
    out = []
    for system in systems:
        x = _solve_system(k, system)
        if x is not None:
            out.append((x, system))
    return out


def enumerate_basic_stars(k: int, strong: bool = False, *, unsafe: bool = False) -> list[Ray]:
    """All normalized basic stars for ``k`` terminals, sorted by coordinates.

    A basic star solves ``k - 1`` independent tight constraints together with
    ``x(K) = 1`` and is nonnegative. Inconsistent or rank-deficient systems
    are skipped; duplicate solutions are merged, keeping the first system in
    enumeration order as the ray's ``defining`` set.
    """
    if k < 1:
        raise ValueError("k must be positive")
    _check_guardrail(k, strong, unsafe)
    systems = list(itertools.combinations(_hyperplanes(k, strong), k - 1))
    chunk = max(1, len(systems) // 16)
    parts = pmap(_solve_chunk, [(k, systems[i : i + chunk]) for i in range(0, len(systems), chunk)])
    found: dict[Vector, tuple[tuple[int, int], ...]] = {}
    for part in parts:
        for x, system in part:
            found.setdefault(x, system)
    return [Ray(x, found[x]) for x in sorted(found)]


def build_basic_star_sparsifier(
    stars: Sequence[Sequence],
    k: int,
    terminals: Sequence[int] | None = None,
    *,
    unsafe: bool = False,
) -> Network:
    """Replace every star by basic stars and merge equal basic stars.

    Each star is decomposed into rays of its own star cone; the weights of a
    ray are summed over all stars, and each ray with positive total weight
    becomes one Steiner vertex with capacities ``ray * weight``. Ray vertices
    get ids above the largest terminal id, in sorted ray order.
    """
    terminals = tuple(range(k)) if terminals is None else tuple(terminals)
    if len(terminals) != k:
        raise ValueError("terminals must have length k")
    _check_guardrail(k, False, unsafe)
    weights = ray_weights(stars, k, unsafe=unsafe)
    base = max(terminals, default=-1) + 1
    edges = []
    for offset, ray in enumerate(sorted(weights)):
        w = weights[ray]
        for t, x in zip(terminals, ray):
            if x:
                edges.append((base + offset, t, x * w))
    vertices = [base + i for i in range(len(weights))]
    return Network(edges, terminals, vertices)


def _decompose_star(args) -> list[tuple[Vector, Fraction]]:
    c, unsafe = args
    return [(ray.coords, lam) for ray, lam in caratheodory_decompose(c, unsafe=unsafe).terms]


def ray_weights(stars: Sequence[Sequence], k: int, *, unsafe: bool = False) -> dict[Vector, Fraction]:
    """Total weight per basic star over the decompositions of ``stars``."""
    vecs = [as_capacity_vector(c, k=k) for c in stars]
    weights: dict[Vector, Fraction] = {}
    for terms in pmap(_decompose_star, [(c, unsafe) for c in vecs]):
        for coords, lam in terms:
            weights[coords] = weights.get(coords, Fraction(0)) + lam
    return weights

