from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from exactsparse import Network

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def star_network(stars, k, terminal_edges=()):
    """Terminals ``0 .. k-1``, one Steiner center per star from id ``k`` on."""
    edges = list(terminal_edges)
    for s, c in enumerate(stars):
        edges += [(k + s, t, x) for t, x in enumerate(c) if x]
    return Network(edges, range(k), range(k + len(stars)))


rationals = st.builds(Fraction, st.integers(0, 12), st.integers(1, 4))
positive_rationals = st.builds(Fraction, st.integers(1, 12), st.integers(1, 4))


@st.composite
def networks(draw, max_n=8, min_k=1, max_k=4):
    """Small random networks with terminals drawn from the vertex set."""
    n = draw(st.integers(max(2, min_k), max_n))
    k = draw(st.integers(min_k, min(max_k, n)))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    edges = [(u, v, draw(positive_rationals)) for u, v in chosen]
    terminals = draw(st.permutations(range(n)))[:k]
    return Network(edges, terminals, range(n))


@st.composite
def capacity_vectors(draw, k=None, min_k=1, max_k=4):
    k = draw(st.integers(min_k, max_k)) if k is None else k
    return tuple(draw(rationals) for _ in range(k))


@pytest.fixture
def two_stars():
    return star_network([(1, 2), (2, 5)], 2)
