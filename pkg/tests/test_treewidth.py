from __future__ import annotations

import pytest
from hypothesis import given, strategies as st
from sklearn.exceptions import NotFittedError

from exactsparse import (
    Network,
    TreeDecomposition,
    TreewidthReducer,
    build_y_set,
    partition_regions,
    reduce,
    verify_cut_sparsifier,
)
from exactsparse.generators import InstanceSpec, generate
from exactsparse.network import induced_subgraph
from exactsparse.treewidth import inflation_blackbox, mimicking_blackbox, reduce_detailed


def _path(n):
    net = Network([(i, i + 1, i + 1) for i in range(n - 1)], [0, n - 1])
    td = TreeDecomposition({i + 1: {i, i + 1} for i in range(n - 1)}, [(i, i + 1) for i in range(1, n - 1)])
    return net, td


def _binary_tree():
    # vertex i sits in bag i with its parent; vertex 8 keeps the root bag from being absorbed
    parent = {2: 1, 3: 1, 4: 2, 5: 2, 6: 3, 7: 3}
    bags = {1: {1, 8}} | {i: {i, p} for i, p in parent.items()}
    edges = [(i, p, 1) for i, p in parent.items()] + [(1, 8, 1)]
    return Network(edges, [4, 5, 6, 7]), TreeDecomposition(bags, [(p, i) for i, p in parent.items()])


def test_validate_rejects_broken_decompositions():
    with pytest.raises(ValueError, match="not form a tree"):
        TreeDecomposition({1: {0}, 2: {1}}).validate()
    with pytest.raises(ValueError, match="not connected"):
        TreeDecomposition({1: {0}, 2: {1}, 3: {0}}, [(1, 2), (2, 3)]).validate()
    with pytest.raises(ValueError, match="in no bag"):
        TreeDecomposition({1: {0}, 2: {1}}, [(1, 2)]).validate(Network([(0, 1, 1)]))


def test_normalize_absorbs_subset_bags():
    td = TreeDecomposition({1: {0}, 2: {0, 1}, 3: {0, 1}, 4: {1, 2}}, [(1, 2), (2, 3), (3, 4)])
    rooted = td.normalize()
    assert rooted.bags == {2: frozenset({0, 1}), 4: frozenset({1, 2})}
    assert rooted.root == 2 and rooted.parent[4] == 2


def test_path_terminals_at_both_ends():
    net, td = _path(5)
    rooted = td.normalize()
    y = build_y_set(rooted, net.terminals)
    assert y == {1, 4}
    part = partition_regions(rooted, y)
    assert part.regions == [frozenset({2, 3})]
    res = reduce_detailed(net, td)
    assert res.region_terminals == [(1, 3)]
    assert verify_cut_sparsifier(net, res.network).passed


def test_single_terminal_gives_one_node():
    net, td = _path(5)
    assert len(build_y_set(td, [2])) == 1


def test_binary_tree_leaves_close_under_lca():
    net, td = _binary_tree()
    y = build_y_set(td, net.terminals)
    assert y == set(range(1, 8))
    assert len(y) <= 2 * net.k


def test_star_shaped_tree_groups_branches():
    td = TreeDecomposition({1: {0, 1, 2, 3}, 2: {1, 4}, 3: {2, 5}, 4: {3, 6}}, [(1, 2), (1, 3), (1, 4)])
    part = partition_regions(td, {1})
    assert part.regions == [frozenset({2, 3, 4})]
    assert part.neighbors == [frozenset({1})]


def test_all_nodes_in_y_leaves_no_region():
    _, td = _binary_tree()
    assert partition_regions(td, td.bags).regions == []


def test_region_with_unrelated_neighbors_is_rejected():
    _, td = _binary_tree()
    with pytest.raises(AssertionError):
        partition_regions(td, {4, 5, 6})


def test_blackbox_must_keep_terminals():
    net, td = _path(5)

    def lossy(g):
        return induced_subgraph(g, g.terminals[:1], g.terminals[:1])

    with pytest.raises(ValueError, match="terminals"):
        reduce(net, td, blackbox=lossy)


def test_flow_mode_refuses_cut_only_blackboxes():
    net, td = _path(4)
    with pytest.raises(ValueError, match="only preserves cuts"):
        reduce(net, td, blackbox="mimick", mode="flow")
    assert reduce(net, td, blackbox="identity", mode="flow") == reduce(net, td, blackbox="identity")


def test_mimicking_blackbox_is_exact_on_a_path():
    net, _ = _path(6)
    h = mimicking_blackbox(net)
    assert verify_cut_sparsifier(net, h).passed
    assert h.n == 3


@given(st.integers(0, 2**32), st.integers(1, 3), st.integers(1, 5), st.integers(8, 16))
def test_reduction_bounds_and_exactness(seed, w, k, n):
    inst = generate(InstanceSpec("bounded-treewidth", k=k, n=n, w=w, seed=seed))
    net, td = inst.network, inst.decomposition
    res = reduce_detailed(net, td)
    y = res.partition.y_set
    assert len(y) <= 2 * k
    assert len(res.partition.regions) <= 2 * len(y)
    width = res.decomposition.width
    assert all(len(t) <= 2 * width for t in res.region_terminals)
    assert sum(res.region_edges) + res.y_edges == net.m
    assert verify_cut_sparsifier(net, res.network).passed
    inflated = reduce(net, td, blackbox=inflation_blackbox(2))
    assert verify_cut_sparsifier(net, inflated, quality=2).passed


def test_reducer_estimator():
    net, td = _path(5)
    est = TreewidthReducer(decomposition=td)
    with pytest.raises(NotFittedError):
        est.transform(net)
    h = est.fit_transform(net)
    assert h == est.result_.network
    assert verify_cut_sparsifier(net, h).passed
    with pytest.raises(ValueError):
        TreewidthReducer().fit(net)
