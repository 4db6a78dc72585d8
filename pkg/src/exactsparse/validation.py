"""Input validation helpers shared by the estimators and the free functions."""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

__all__ = [
    "as_rational",
    "as_capacity_vector",
    "check_network",
    "check_terminal_subset",
]


def as_rational(value, *, name: str = "value", nonnegative: bool = False) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Integers, fractions and strings such as ``"3/4"`` are accepted. Floats
    are rejected: every capacity comparison in this package is a sign test
    that rounding could flip.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name} must be rational, got bool")
    if isinstance(value, Fraction):
        out = value
    elif isinstance(value, (Integral, Rational)):
        out = Fraction(value)
    elif isinstance(value, str):
        try:
            out = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {value!r} as a rational") from exc
    elif hasattr(value, "p") and hasattr(value, "q"):  # flint.fmpq
        out = Fraction(int(value.p), int(value.q))
    else:
        raise TypeError(f"{name} must be an int, Fraction or rational string, got {type(value).__name__}")
    if nonnegative and out < 0:
        raise ValueError(f"{name} must be nonnegative, got {out}")
    return out


def as_capacity_vector(coords: Iterable, *, k: int | None = None) -> tuple[Fraction, ...]:
    vec = tuple(as_rational(x, name="capacity", nonnegative=True) for x in coords)
    if k is not None and len(vec) != k:
        raise ValueError(f"expected a capacity vector of length {k}, got {len(vec)}")
    return vec


def check_network(net, *, quasi_bipartite: bool = False):
    """Validate that ``net`` is a :class:`~exactsparse.network.Network`.

    Paths (``str``/``os.PathLike``) are parsed with the network text codec,
    which lets estimators be fed files directly.
    """
    from .network import Network

    if not isinstance(net, Network):
        import os

        if isinstance(net, (str, os.PathLike)):
            from .io import read_network

            net = read_network(net)
        else:
            raise TypeError(f"expected a Network, got {type(net).__name__}")
    if quasi_bipartite:
        for u, v, _ in net.edges():
            if not net.is_terminal(u) and not net.is_terminal(v):
                raise ValueError(f"network is not quasi-bipartite: Steiner-Steiner edge ({u}, {v})")
    return net


def check_terminal_subset(side: Iterable[int], terminals: Sequence[int]) -> frozenset[int]:
    side = frozenset(side)
    extra = side - frozenset(terminals)
    if extra:
        raise ValueError(f"side contains non-terminals: {sorted(extra)}")
    return side
