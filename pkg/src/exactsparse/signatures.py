"""Cut signatures and strong signatures of star capacity vectors.

For a capacity vector ``c`` over terminals ``t_1 .. t_k`` and a terminal
subset encoded as a bitmask ``S`` (bit ``i`` set iff ``t_{i+1}`` is in ``S``):

* the cut signature has bit ``S`` set iff ``c(S) <= c(K - S)``;
* the strong signature stores, for every ordered pair of disjoint subsets
  ``(A, B)``, the sign of ``c(A) - c(B)``.

Ordered disjoint pairs are indexed in base 3: digit ``i`` is 0 when ``t_{i+1}``
is in neither set, 1 when it is in ``A`` and 2 when it is in ``B``. Both
signatures are hashable and serve as bucketing keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .validation import as_capacity_vector

__all__ = [
    "subset_sums",
    "CutSignature",
    "StrongSignature",
    "cut_signature",
    "strong_signature",
    "agrees",
    "pair_index",
    "pair_from_index",
]


def subset_sums(c: Sequence[Fraction]) -> list[Fraction]:
    """``c(S)`` for every bitmask ``S`` in ``0 .. 2**k - 1``."""
    sums = [Fraction(0)] * (1 << len(c))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + c[low.bit_length() - 1]
    return sums


@dataclass(frozen=True)
class CutSignature:
    """Bit ``S`` of ``bits`` is set iff ``c(S) <= c(K - S)``."""

    k: int
    bits: int

    def __contains__(self, mask: int) -> bool:
        return bool(self.bits >> mask & 1)

    def subsets(self) -> list[int]:
        return [s for s in range(1 << self.k) if s in self]

    def hex(self) -> str:
        width = max(1, (1 << self.k) // 4)
        return format(self.bits, f"0{width}x")


@dataclass(frozen=True)
class StrongSignature:
    """``signs[index]`` is the sign (-1, 0, 1) of ``c(A) - c(B)``."""

    k: int
    signs: tuple[int, ...]

    def sign(self, a: int, b: int) -> int:
        return self.signs[pair_index(a, b, self.k)]

    def hex(self) -> str:
        # two bits per pair: 0 for "<", 1 for "=", 2 for ">"
        value = 0
        for s in reversed(self.signs):
            value = value << 2 | (s + 1)
        width = max(1, (2 * len(self.signs) + 3) // 4)
        return format(value, f"0{width}x")

    def to_cut_signature(self) -> CutSignature:
        full = (1 << self.k) - 1
        bits = 0
        for s in range(1 << self.k):
            if self.sign(s, full ^ s) <= 0:
                bits |= 1 << s
        return CutSignature(self.k, bits)


def pair_index(a: int, b: int, k: int) -> int:
    """Base-3 index of the ordered disjoint pair ``(a, b)`` of bitmasks."""
    if a & b:
        raise ValueError("pairs must be disjoint")
    idx, p = 0, 1
    for i in range(k):
        if a >> i & 1:
            idx += p
        elif b >> i & 1:
            idx += 2 * p
        p *= 3
    return idx


def pair_from_index(idx: int, k: int) -> tuple[int, int]:
    a = b = 0
    for i in range(k):
        idx, digit = divmod(idx, 3)
        if digit == 1:
            a |= 1 << i
        elif digit == 2:
            b |= 1 << i
    return a, b


def cut_signature(c: Sequence) -> CutSignature:
    c = as_capacity_vector(c)
    k = len(c)
    sums = subset_sums(c)
    full = (1 << k) - 1
    bits = 0
    for s in range(1 << k):
        if sums[s] <= sums[full ^ s]:
            bits |= 1 << s
    return CutSignature(k, bits)


def strong_signature(c: Sequence) -> StrongSignature:
    c = as_capacity_vector(c)
    k = len(c)
    sums = subset_sums(c)
    # walk the base-3 indices in order, tracking the two bitmasks
    a = b = 0
    signs = []
    for _ in range(3**k):
        diff = sums[a] - sums[b]
        signs.append((diff > 0) - (diff < 0))
        for i in range(k):
            bit = 1 << i
            if a & bit:
                a ^= bit
                b |= bit
                break
            if b & bit:
                b ^= bit
                continue
            a |= bit
            break
    return StrongSignature(k, tuple(signs))


def agrees(c1: Sequence, c2: Sequence, strong: bool = False) -> bool:
    """Whether two capacity vectors have equal (strong) signatures."""
    c1, c2 = as_capacity_vector(c1), as_capacity_vector(c2)
    if len(c1) != len(c2):
        raise ValueError(f"dimension mismatch: {len(c1)} vs {len(c2)}")
    if strong:
        return strong_signature(c1) == strong_signature(c2)
    return cut_signature(c1) == cut_signature(c2)
