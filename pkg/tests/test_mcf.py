from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactsparse import INFINITE, Demand, Network, flow_factor, min_cut, star_flow_factor, verify_flow_sparsifier
from exactsparse.acceptance import NEGATIVE_CONTROL
from exactsparse.mcf import check_flow_witness, routable_in_star

from conftest import capacity_vectors, networks, positive_rationals, star_network


def test_demand_is_symmetric_and_drops_zeros():
    d = Demand({(1, 0): 2, (0, 2): 0})
    assert d[(0, 1)] == d[(1, 0)] == 2
    assert d.items() == [((0, 1), Fraction(2))]
    assert d.load(0) == 2


def test_demand_rejects_bad_entries():
    with pytest.raises(ValueError):
        Demand({(0, 0): 1})
    with pytest.raises(ValueError):
        Demand([((0, 1), 1), ((1, 0), 1)])
    with pytest.raises(ValueError):
        Demand({(0, 1): -1})


def test_star_flow_factor_single_pair():
    net = star_network([(1, 2)], 2)
    d = Demand({(0, 1): 2})
    res = flow_factor(net, d)
    assert res.lam == Fraction(1, 2)
    check_flow_witness(net, d, res)


def test_zero_demand_gives_infinite_factor():
    assert flow_factor(star_network([(1, 2)], 2), Demand()).lam is INFINITE


def test_merged_and_separate_stars_route_the_same():
    d = Demand({(0, 1): 3})
    assert flow_factor(star_network([(1, 2), (2, 4)], 2), d).lam == 1
    assert flow_factor(star_network([(3, 6)], 2), d).lam == 1


def test_demand_on_steiner_vertex_is_rejected():
    with pytest.raises(ValueError):
        flow_factor(star_network([(1, 2)], 2), Demand({(0, 2): 1}))


def test_disconnected_pair_has_zero_factor():
    net = Network([(0, 2, 1)], [0, 1])
    assert flow_factor(net, Demand({(0, 1): 1})).lam == 0


def test_routable_in_star_boundary():
    assert routable_in_star((3, 6), Demand({(0, 1): 3}))
    assert not routable_in_star((1, 2), Demand({(0, 1): 2}))
    half = Fraction(1, 2)
    assert routable_in_star((1, 1, 1), Demand({(0, 1): half, (1, 2): half, (0, 2): half}))


def test_negative_control_pair_is_told_apart():
    # frozen from the exact LP on both networks
    c1, c2 = NEGATIVE_CONTROL
    d = Demand({(0, 1): 5, (0, 4): 3, (1, 4): 4, (2, 3): 1})
    g = star_network([c1, c2], 5)
    h = star_network([tuple(a + b for a, b in zip(c1, c2))], 5)
    assert flow_factor(g, d).lam == Fraction(12, 13)
    assert flow_factor(h, d).lam == 1
    report = verify_flow_sparsifier(g, h, [d])
    assert not report.passed
    assert report.violations[0].lam_g == Fraction(12, 13)


def test_verify_flow_needs_demands():
    g = star_network([(1, 2)], 2)
    with pytest.raises(ValueError):
        verify_flow_sparsifier(g, g, [])


@given(networks(max_n=7, min_k=2), st.data(), positive_rationals)
def test_single_pair_factor_is_min_cut_over_demand(net, data, value):
    s, t = data.draw(st.lists(st.sampled_from(net.terminals), min_size=2, max_size=2, unique=True))
    # with every other terminal as a free vertex the pair's min cut bounds the flow
    res = flow_factor(net.with_terminals([s, t]), Demand({(s, t): value}))
    assert res.lam == min_cut(net, {s}, [s, t]).value / value


@given(capacity_vectors(min_k=2, max_k=4), st.data())
def test_star_lp_matches_closed_form(c, data):
    k = len(c)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    d = Demand({p: data.draw(positive_rationals) for p in data.draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))})
    lp = flow_factor(star_network([c], k), d)
    check_flow_witness(star_network([c], k), d, lp)
    assert lp.lam == star_flow_factor(c, d)


@given(networks(max_n=6, min_k=3, max_k=3), st.data())
def test_warm_start_and_cold_start_agree(net, data):
    t = net.terminals
    d = Demand({(t[0], t[1]): data.draw(positive_rationals), (t[1], t[2]): data.draw(positive_rationals)})
    assert flow_factor(net, d).lam == flow_factor(net, d, use_highs=False).lam


@given(networks(max_n=6, min_k=2, max_k=3), positive_rationals)
def test_factor_scales_inversely(net, alpha):
    d = Demand({(net.terminals[0], net.terminals[1]): 1})
    lam = flow_factor(net, d).lam
    assert flow_factor(net, d.scaled(alpha)).lam == lam / alpha
