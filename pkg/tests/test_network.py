from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactsparse import (
    Network,
    contract,
    contract_many,
    cut_capacity,
    induced_subgraph,
    steiner_disjoint_union,
)

from conftest import networks, star_network


def test_parallel_edges_are_summed():
    net = Network([(0, 1, 1), (1, 0, "1/2")], [0, 1])
    assert net.capacity(0, 1) == Fraction(3, 2)
    assert net.m == 1


def test_rejects_self_loops_and_negative_capacities():
    with pytest.raises(ValueError):
        Network([(0, 0, 1)])
    with pytest.raises(ValueError):
        Network([(0, 1, -1)])
    with pytest.raises(ValueError):
        Network([], [0, 0])


def test_contract_two_star_centers_adds_capacity_vectors():
    net = star_network([(1, 2), (2, 5)], 2)
    merged = contract(net, 2, 3)
    assert merged.capacity_vector(2) == (3, 7)
    assert 3 not in merged


def test_contract_without_common_neighbor_keeps_edges():
    net = Network([(0, 2, 1), (1, 3, 4)], [0, 1])
    merged = contract(net, 2, 3)
    assert merged.edge_dict() == {(0, 2): 1, (1, 2): 4}


def test_contract_drops_the_joining_edge():
    net = Network([(0, 2, 1), (2, 3, 5), (3, 1, 2)], [0, 1])
    merged = contract(net, 2, 3)
    assert merged.total_capacity() == net.total_capacity() - 5


def test_contract_keeps_the_terminal_id():
    net = Network([(0, 2, 1), (2, 1, 1)], [0, 1])
    assert contract(net, 2, 0).terminals == (0, 1)
    assert 0 in contract(net, 2, 0)


def test_contract_unknown_vertex():
    with pytest.raises(KeyError):
        contract(Network([(0, 1, 1)]), 0, 7)


def test_union_of_two_stars():
    g1 = star_network([(1, 2)], 2)
    g2 = Network([(0, 5, 3), (1, 5, 4)], [0, 1])
    h = steiner_disjoint_union(g1, g2, [0, 1])
    assert h.steiner_vertices() == [2, 5]
    assert h.capacity_vector(5) == (3, 4)


def test_union_sums_terminal_edges():
    g1 = Network([(0, 1, 1)], [0, 1])
    g2 = Network([(0, 1, 2)], [0, 1])
    assert steiner_disjoint_union(g1, g2, [0, 1]).capacity(0, 1) == 3


def test_union_with_empty_network_is_identity():
    g1 = star_network([(1, 2), (2, 5)], 2)
    assert steiner_disjoint_union(g1, Network([], [0, 1]), [0, 1]) == g1


def test_union_rejects_shared_steiner_vertex():
    g1 = star_network([(1, 2)], 2)
    with pytest.raises(ValueError, match="Steiner-disjoint"):
        steiner_disjoint_union(g1, g1, [0, 1])


def test_relabel_must_be_injective():
    net = Network([(0, 1, 1), (1, 2, 1)], [0])
    with pytest.raises(ValueError):
        net.relabel({2: 1})


@given(networks(max_n=7), st.data())
def test_contraction_order_does_not_matter(net, data):
    verts = net.sorted_vertices()
    a, b, c = (data.draw(st.sampled_from(verts)) for _ in range(3))
    if len({a, b, c}) < 3:
        return
    once = contract_many(net, [(a, b, c)])
    first = contract(net, a, b)
    rep = a if a in first else b
    twice = contract(first, rep, c)
    assert once == twice


@given(networks(max_n=7), st.data())
def test_contracted_cuts_are_cuts_of_the_original(net, data):
    verts = net.sorted_vertices()
    a = data.draw(st.sampled_from(verts))
    b = data.draw(st.sampled_from(verts))
    if a == b:
        return
    merged = contract(net, a, b)
    keep = next(v for v in (a, b) if v in merged)
    side = data.draw(st.sets(st.sampled_from(merged.sorted_vertices())))
    lifted = set(side) | ({a, b} if keep in side else set())
    assert cut_capacity(merged, side) == cut_capacity(net, lifted)


@given(networks(max_n=6), networks(max_n=6), st.data())
def test_union_cut_is_additive(g1, g2, data):
    # shift g2 so it shares only vertex ids 0 .. j-1 with g1, and make those terminals
    j = min(g1.n, g2.n, 2)
    shared = list(range(j))
    g1 = Network(list(g1.edges()), shared, g1.vertices)
    shift = {v: v + 100 for v in g2.vertices if v >= j}
    g2 = Network(list(g2.relabel(shift).edges()), shared, g2.relabel(shift).vertices)
    h = steiner_disjoint_union(g1, g2, shared)
    side = data.draw(st.sets(st.sampled_from(sorted(h.vertices))))
    assert cut_capacity(h, side) == cut_capacity(g1, side & g1.vertices) + cut_capacity(g2, side & g2.vertices)


def test_induced_subgraph_keeps_inside_edges_only():
    net = Network([(0, 1, 1), (1, 2, 2), (2, 3, 3)], [0, 3])
    sub = induced_subgraph(net, [1, 2, 3])
    assert sub.terminals == (3,)
    assert sub.edge_dict() == {(1, 2): 2, (2, 3): 3}
