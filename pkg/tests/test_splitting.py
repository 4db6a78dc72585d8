from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactsparse import Demand, split_demand
from exactsparse.acceptance import _agreeing_pair, _tight_demand
from exactsparse.mcf import routable_in_star
from exactsparse.splitting import (
    AugmentingPath,
    SaturatedSet,
    SplitError,
    SplitState,
    find_augmenting_path,
    iteration_bound,
    split_demand_detailed,
)


def _check(c1, c2, d, d1, d2):
    assert d1 + d2 == d
    assert routable_in_star(c1, d1)
    assert routable_in_star(c2, d2)


def test_two_terminal_split():
    d = Demand({(0, 1): 3})
    d1, d2 = split_demand((1, 2), (2, 4), d)
    _check((1, 2), (2, 4), d, d1, d2)
    assert d1[(0, 1)] == 1


def test_zero_demand_splits_into_zeros():
    d1, d2 = split_demand((1, 2), (2, 4), Demand())
    assert d1.is_zero() and d2.is_zero()


def test_three_terminal_split_bounds_first_star():
    d = Demand({(0, 1): 3})
    d1, d2 = split_demand((1, 1, 0), (2, 2, 0), d)
    _check((1, 1, 0), (2, 2, 0), d, d1, d2)
    assert d1[(0, 1)] <= 1


def test_lexicographic_order_forces_a_rotation():
    # frozen: the greedy pass fills star 1 at terminal 1 with pair (0, 1)
    c1, c2 = (3, 4, 2), (9, 12, 6)
    d = Demand({(0, 1): 8, (1, 2): 8})
    res = split_demand_detailed(c1, c2, d, order=[(0, 1), (1, 2)])
    assert res.rotations == 1
    assert res.iterations <= res.bound == iteration_bound(2, 3)
    _check(c1, c2, d, res.d1, res.d2)


def test_order_that_used_to_cycle():
    c1 = (3, 1, 3)
    c2 = (Fraction(69, 25), Fraction(47, 50), Fraction(69, 25))
    d = Demand({(0, 1): Fraction(97, 100), (0, 2): Fraction(479, 100), (1, 2): Fraction(97, 100)})
    res = split_demand_detailed(c1, c2, d, order=[(1, 2), (0, 2), (0, 1)])
    _check(c1, c2, d, res.d1, res.d2)


def test_rejects_disagreeing_stars():
    with pytest.raises(SplitError, match="strong signatures"):
        split_demand((1, 2), (2, 1), Demand({(0, 1): 1}))


def test_rejects_unroutable_demand():
    with pytest.raises(SplitError, match="not routable"):
        split_demand((1, 2), (2, 4), Demand({(0, 1): 4}))


def test_custom_terminal_ids():
    d = Demand({(10, 20): 3})
    d1, d2 = split_demand((1, 2), (2, 4), d, terminals=[10, 20])
    assert d1 + d2 == d


def test_path_of_length_zero_when_start_has_slack():
    state = SplitState.start((1, 1), (1, 1), {(0, 1): Fraction(1)})
    assert find_augmenting_path(state, (0, 2)) == AugmentingPath(((0, 2),))


def test_single_arc_path_to_slack_node():
    state = SplitState.start((1, 2), (1, 2), {(0, 1): Fraction(1)})
    state.assign(1, 0, 1, Fraction(1))
    path = find_augmenting_path(state, (0, 1))
    assert path.nodes == ((0, 1), (1, 2))
    assert len(path) == 1


def test_saturated_set_witness():
    state = SplitState.start((1, 1), (1, 1), {(0, 1): Fraction(2)})
    state.assign(1, 0, 1, Fraction(1))
    state.assign(2, 0, 1, Fraction(1))
    found = find_augmenting_path(state, (0, 1))
    assert isinstance(found, SaturatedSet)
    assert found.nodes == frozenset({(0, 1), (1, 2)})


def test_invariant_check_catches_overload():
    state = SplitState.start((1, 1), (1, 1), {(0, 1): Fraction(2)})
    state.assign(1, 0, 1, Fraction(2))
    with pytest.raises(AssertionError, match="capacity"):
        state.check_invariants()


@given(st.integers(0, 2**32), st.integers(2, 5), st.booleans())
def test_split_postconditions(seed, k, reverse):
    rng = random.Random(seed)
    c1, c2 = _agreeing_pair(rng, k)
    d = _tight_demand(rng, [a + b for a, b in zip(c1, c2)])
    order = sorted((p for p, _ in d.items()), reverse=reverse)
    res = split_demand_detailed(c1, c2, d, order=order, check=True)
    _check(c1, c2, d, res.d1, res.d2)
    assert res.iterations <= res.bound


@given(st.integers(0, 2**32), st.integers(2, 4))
def test_split_is_symmetric_in_the_stars(seed, k):
    rng = random.Random(seed)
    c1, c2 = _agreeing_pair(rng, k)
    d = _tight_demand(rng, [a + b for a, b in zip(c1, c2)])
    e2, e1 = split_demand(c2, c1, d)
    _check(c1, c2, d, e1, e2)
