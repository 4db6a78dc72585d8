from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from exactsparse import decompose_quasi_bipartite
from exactsparse.extensions import check_vertex_cover, separator_instance
from exactsparse.generators import (
    InstanceSpec,
    SmallSupport,
    UniformRational,
    generate,
    parse_capacity_spec,
)
from exactsparse.io import parse_network, parse_separator, parse_tree_decomposition


def test_quasi_bipartite_example():
    inst = generate(InstanceSpec("quasi-bipartite", k=3, n=50, seed=7))
    dec = decompose_quasi_bipartite(inst.network)
    assert len(dec.star_part) == 47
    assert inst.network.terminals == (0, 1, 2)


def test_vertex_integrity_example(tmp_path):
    inst = generate(InstanceSpec("vertex-integrity", k=2, n=20, a=2, b=2, seed=3))
    paths = inst.write(tmp_path / "vi")
    assert sorted(p.suffix for p in paths) == [".net", ".sep"]
    sep, b = parse_separator((tmp_path / "vi.sep").read_text())
    assert (sep, b) == ([0, 1], 2)
    inst_net = parse_network((tmp_path / "vi.net").read_text())
    assert all(len(c) <= 2 for c in separator_instance(inst_net, sep, b).components)


def test_same_spec_gives_identical_files():
    spec = InstanceSpec("bounded-treewidth", k=3, n=15, w=2, seed=99)
    assert generate(spec).files() == generate(spec).files()
    other = InstanceSpec("bounded-treewidth", k=3, n=15, w=2, seed=100)
    assert generate(spec).files() != generate(other).files()


def test_capacity_spec_parsing():
    assert parse_capacity_spec("uniform-rational(1,64,16)") == UniformRational(1, 64, 16)
    assert parse_capacity_spec("small-support(1, 1/2)") == SmallSupport((Fraction(1), Fraction(1, 2)))
    assert str(SmallSupport()) == "small-support(1,2,3)"
    for bad in ("gauss(0,1)", "uniform-rational(5,1,2)", "small-support()", "nonsense"):
        with pytest.raises(ValueError):
            parse_capacity_spec(bad)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="tree", k=1, n=2),
        dict(kind="quasi-bipartite", k=3, n=2),
        dict(kind="vertex-cover", k=1, n=4),
        dict(kind="vertex-integrity", k=1, n=4, a=1, b=5),
        dict(kind="bounded-treewidth", k=1, n=2, w=3),
        dict(kind="quasi-bipartite", k=1, n=2, seed=-1),
    ],
)
def test_inconsistent_parameters_are_rejected(kwargs):
    with pytest.raises(ValueError):
        InstanceSpec(**kwargs)


@given(st.integers(0, 2**64 - 1), st.integers(0, 4), st.integers(4, 20), st.integers(0, 4))
def test_vertex_cover_instances_validate(seed, k, n, a):
    inst = generate(InstanceSpec("vertex-cover", k=k, n=n, a=a, seed=seed))
    check_vertex_cover(inst.network, inst.separator)
    assert inst.network.k == k and inst.network.n == n


@given(st.integers(0, 2**64 - 1), st.integers(0, 3), st.integers(1, 3), st.integers(6, 20))
def test_vertex_integrity_instances_validate(seed, a, b, n):
    inst = generate(InstanceSpec("vertex-integrity", k=2, n=n, a=a, b=b, seed=seed))
    separator_instance(inst.network, inst.separator, b)


@given(st.integers(0, 2**64 - 1), st.integers(0, 3), st.integers(5, 20))
def test_bounded_treewidth_instances_validate(seed, w, n):
    inst = generate(InstanceSpec("bounded-treewidth", k=2, n=n, w=w, seed=seed))
    inst.decomposition.validate(inst.network)
    assert inst.decomposition.width <= w
    td = parse_tree_decomposition(inst.files()[".td"])
    assert td == inst.decomposition
