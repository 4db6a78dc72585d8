from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactsparse import Network, check_merge_precondition, contract, min_cut, verify_cut_sparsifier
from exactsparse.mincut import CutOracle, bipartitions, exhaustive_min_cut

from conftest import networks, star_network


def test_single_star_cuts_cheaper_edge():
    assert min_cut(star_network([(1, 2)], 2), {0}).value == 1


def test_two_stars_sum_their_cheaper_edges():
    # frozen from exhaustive enumeration of all 2**4 vertex subsets
    net = star_network([(1, 2), (2, 5)], 2)
    assert min_cut(net, {0}).value == 3
    assert exhaustive_min_cut(net, {0}).value == 3


def test_trivial_sides_cost_nothing():
    net = star_network([(1, 2)], 2)
    assert min_cut(net, set()).value == 0
    assert min_cut(net, {0, 1}).value == 0


def test_side_must_be_terminals():
    with pytest.raises(ValueError):
        min_cut(star_network([(1, 2)], 2), {2})


def test_witness_is_the_minimal_min_cut():
    # both {0} and {0, 2} cost 2; the minimal side is returned
    net = Network([(0, 2, 2), (2, 1, 2)], [0, 1])
    res = min_cut(net, {0})
    assert res.value == 2
    assert res.witness == frozenset({0})


def test_rational_capacities_are_exact():
    net = Network([(0, 2, "1/3"), (2, 1, "1/7"), (0, 1, "2/5")], [0, 1])
    assert min_cut(net, {0}).value == Fraction(1, 7) + Fraction(2, 5)


def test_oracle_reuse_gives_identical_answers():
    net = star_network([(1, 2, 3), (3, 1, 1), (2, 2, 2)], 3)
    oracle = CutOracle(net)
    first = [oracle.min_cut(s) for s in bipartitions(net.terminals)]
    second = [oracle.min_cut(s) for s in bipartitions(net.terminals)]
    assert first == second


def test_bipartitions_count():
    assert len(bipartitions([4, 5, 6])) == 4
    assert bipartitions([]) == [frozenset()]


def test_verify_reflexive(two_stars):
    assert verify_cut_sparsifier(two_stars, two_stars).passed


def test_verify_merged_agreeing_stars(two_stars):
    assert verify_cut_sparsifier(two_stars, star_network([(3, 7)], 2), 1).passed


def test_verify_reports_violation_for_disagreeing_stars():
    g = star_network([(1, 2), (2, 1)], 2)
    h = star_network([(3, 3)], 2)
    report = verify_cut_sparsifier(g, h)
    assert not report.passed
    v = report.violations[0]
    assert (v.side, v.kappa_g, v.kappa_h) == (frozenset({0}), 2, 3)


def test_verify_quality_sandwich():
    g = star_network([(1, 2)], 2)
    assert verify_cut_sparsifier(g, g.scaled(2), quality=2).passed
    assert not verify_cut_sparsifier(g, g.scaled(3), quality=2).passed
    with pytest.raises(ValueError):
        verify_cut_sparsifier(g, g, quality=Fraction(1, 2))


def test_verify_rejects_missing_terminals():
    g = star_network([(1, 2)], 2)
    with pytest.raises(ValueError, match="terminal mismatch"):
        verify_cut_sparsifier(g, Network([(0, 5, 1)], [0]))


def test_merge_precondition_matches_contraction():
    agree = star_network([(1, 2), (2, 5)], 2)
    disagree = star_network([(1, 2), (2, 1)], 2)
    assert check_merge_precondition(agree, [(2, 3)])
    assert not check_merge_precondition(disagree, [(2, 3)])


@given(networks(max_n=8, max_k=4), st.data())
def test_agrees_with_exhaustive_enumeration(net, data):
    side = data.draw(st.sets(st.sampled_from(net.terminals)))
    fast = min_cut(net, side)
    slow = exhaustive_min_cut(net, side)
    assert fast.value == slow.value
    assert len(fast.witness) == len(slow.witness)


@given(networks(max_n=8, min_k=2), st.data())
def test_cut_value_is_symmetric(net, data):
    side = data.draw(st.sets(st.sampled_from(net.terminals)))
    assert min_cut(net, side).value == min_cut(net, set(net.terminals) - side).value


@given(networks(max_n=7, min_k=2), st.data())
def test_precondition_true_iff_contraction_is_exact(net, data):
    steiner = net.steiner_vertices()
    if len(steiner) < 2:
        return
    v, w = data.draw(st.lists(st.sampled_from(steiner), min_size=2, max_size=2, unique=True))
    assert check_merge_precondition(net, [(v, w)]) == verify_cut_sparsifier(net, contract(net, v, w)).passed
