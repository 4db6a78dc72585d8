from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sklearn.exceptions import NotFittedError

from exactsparse import (
    GuardrailError,
    Network,
    VertexCoverSparsifier,
    VertexIntegritySparsifier,
    check_merge_precondition,
    component_conic_decompose,
    component_signature,
    cut_signature,
    sparsify_cut_contraction,
    sparsify_vertex_cover,
    sparsify_vertex_integrity,
    verify_cut_sparsifier,
)
from exactsparse.extensions import (
    _vertex_integrity_parts,
    canonical_component_order,
    check_vertex_cover,
    component_cone,
    component_cut_values,
    component_dim,
    component_vector,
    greedy_vertex_cover,
    plan_vertex_integrity,
    separator_instance,
    split_vertex_cover,
    vertex_integrity_size_bound,
)
from exactsparse.generators import InstanceSpec, SmallSupport, generate

from conftest import capacity_vectors, networks, star_network


# -- vertex cover ---------------------------------------------------------


def test_cover_check_names_the_uncovered_edge():
    net = Network([(0, 1, 1), (1, 2, 1)], [0])
    assert check_vertex_cover(net, [1]) == {1}
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        check_vertex_cover(net, [0])


def test_greedy_cover_covers():
    net = Network([(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], [0])
    check_vertex_cover(net, greedy_vertex_cover(net))


def test_cover_equal_to_terminals_matches_signature_contraction():
    g = star_network([(1, 2), (2, 5), (2, 1)], 2, [(0, 1, 1)])
    assert sparsify_vertex_cover(g, [0, 1]) == sparsify_cut_contraction(g)


def test_cover_equal_to_vertex_set_changes_nothing():
    g = Network([(0, 2, 1), (2, 3, 2), (3, 1, 3)], [0, 1])
    assert sparsify_vertex_cover(g, g.vertices) == g


def test_cover_of_size_two_with_fifty_leaves():
    rng = random.Random(11)
    cover = [4, 5]
    edges = [(t, x, rng.randint(1, 5)) for t in range(4) for x in cover]
    edges += [(v, x, rng.randint(1, 3)) for v in range(6, 56) for x in cover]
    g = Network(edges, range(4), range(56))
    h = sparsify_vertex_cover(g, cover)
    # K + X plus at most three classes of two-coordinate cut signatures
    assert h.n <= 4 + 2 + 3
    assert verify_cut_sparsifier(g, h).passed


def test_split_parts_are_steiner_disjoint():
    g = Network([(0, 2, 1), (2, 3, 1), (3, 1, 1), (2, 4, 1), (4, 3, 2)], [0, 1])
    g_k, g_s = split_vertex_cover(g, [2, 3])
    assert g_k.terminals == (0, 1, 2, 3)
    assert g_s.terminals == (2, 3)
    assert (g_k.vertices & g_s.vertices) <= set(g_k.terminals)
    assert g_s.capacity(2, 3) == 0


@given(st.integers(0, 2**32), st.integers(1, 3), st.booleans())
def test_vertex_cover_sparsifier_is_exact(seed, a, small):
    cap = SmallSupport() if small else InstanceSpec("vertex-cover", 1, 1, a=0).capacity
    inst = generate(InstanceSpec("vertex-cover", k=3, n=12, a=a, capacity=cap, seed=seed))
    h = sparsify_vertex_cover(inst.network, inst.separator)
    assert verify_cut_sparsifier(inst.network, h).passed


# -- component signatures -------------------------------------------------


def test_component_dim():
    assert component_dim(2, 1) == 2
    assert component_dim(1, 2) == 3
    assert component_dim(3, 2) == 7


def test_component_vector_layout():
    net = Network([(5, 0, 1), (5, 1, 2), (6, 1, 3), (5, 6, 4)], [])
    assert component_vector(net, [5, 6], [0, 1]) == (1, 2, 0, 3, 4)
    assert component_vector(net, [5], [0, 1], 2) == (1, 2, 0, 0, 0)


def test_component_cut_values_single_vertex():
    # vertex v with edges 2 and 3 to x0, x1; cut A + B
    values = component_cut_values((2, 3), 2, 1)
    assert values[0] == [0, 5]
    assert values[0b01] == [2, 3]


@given(capacity_vectors(k=2))
def test_single_vertex_component_matches_star_signature(c):
    sig = component_signature(c, 2, 1)
    star = cut_signature(c)
    for A in range(4):
        assert sig.rel(A, 0, 1) == (A in star)
        assert sig.rel(A, 1, 0) == (((3 ^ A) in star))
        assert sig.rel(A, 0, 0) and sig.rel(A, 1, 1)


def test_zero_and_symmetric_components_relate_everything():
    assert component_signature((0,) * 3, 1, 2).bits == (1 << 2 * 4**2) - 1
    full = component_signature((0,) * 7, 3, 2)
    assert sum(1 for _ in full.triples()) == 2**3 * 4**2


def test_canonical_order_identifies_relabeled_components():
    c = (Fraction(1), Fraction(3), Fraction(2))  # a=1, b=2: x(v0,t), x(v1,t), x(v0,v1)
    swapped = (Fraction(3), Fraction(1), Fraction(2))
    assert component_signature(c, 1, 2) != component_signature(swapped, 1, 2)
    assert canonical_component_order(c, 1, 2)[1] == canonical_component_order(swapped, 1, 2)[1]


@pytest.mark.parametrize("a, b", [(1, 1), (2, 1), (3, 1), (1, 2)])
@given(data=st.data())
def test_component_decomposition_is_exact_and_agrees(a, b, data):
    dim = component_dim(a, b)
    c = data.draw(capacity_vectors(k=dim))
    dec = component_conic_decompose(c, a, b)
    assert dec.reconstruct(dim) == c
    assert len(dec) <= dim
    cone = component_cone(c, a, b)
    sig = component_signature(c, a, b)
    for ray, lam in dec.terms:
        assert lam > 0 and cone.contains(ray.coords)
        ray_sig = component_signature(ray.coords, a, b)
        assert all(ray_sig.rel(*t) for t in sig.triples())


def test_component_decomposition_guardrail():
    with pytest.raises(GuardrailError):
        component_conic_decompose((1,) * component_dim(2, 2), 2, 2)
    dec = component_conic_decompose((1,) * component_dim(2, 2), 2, 2, unsafe=True)
    assert dec.reconstruct(component_dim(2, 2)) == (1,) * component_dim(2, 2)


# -- vertex integrity -----------------------------------------------------


def _two_equal_components():
    # separator {0, 1}, terminal 0; components {2, 3} and {4, 5} with proportional capacities
    edges = [(2, 0, 1), (3, 1, 2), (2, 3, 1), (4, 0, 2), (5, 1, 4), (4, 5, 2), (6, 0, 5)]
    return Network(edges, [0, 6], range(7))


def test_separator_instance_splits_components():
    inst = separator_instance(_two_equal_components(), [0, 1], 2)
    assert inst.a == 2
    assert inst.terminal_components == [(6,)]
    assert inst.components == [(2, 3), (4, 5)]
    with pytest.raises(ValueError, match="b = 1"):
        separator_instance(_two_equal_components(), [0, 1], 1)


def test_proportional_components_merge():
    g = _two_equal_components()
    plan = plan_vertex_integrity(g, [0, 1], 2)
    assert plan.buckets == [[0, 1]]
    assert plan.groups == [[2, 4], [3, 5]]
    h = sparsify_vertex_integrity(g, [0, 1], 2)
    assert h.n == 5
    assert verify_cut_sparsifier(g, h).passed


def test_merge_precondition_holds_for_equal_signature_components():
    g = _two_equal_components()
    _, g_s = _vertex_integrity_parts(g, separator_instance(g, [0, 1], 2))
    assert check_merge_precondition(g_s, [(2, 4), (3, 5)])


def test_zero_components_are_dropped():
    g = Network([(0, 1, 1), (2, 1, 1)], [0], range(4))
    h = sparsify_vertex_integrity(g, [1], 1)
    assert 3 not in h
    assert verify_cut_sparsifier(g, h).passed


def test_size_bound_formula():
    assert vertex_integrity_size_bound(3, 2, 2, 4) == 3 * 2 + 2 + 4 * 2


@given(st.integers(0, 2**32), st.integers(1, 3), st.integers(1, 2), st.booleans())
def test_vertex_integrity_sparsifier_is_exact_and_within_bound(seed, a, b, canonicalize):
    inst = generate(InstanceSpec("vertex-integrity", k=3, n=12, a=a, b=b, capacity=SmallSupport(), seed=seed))
    plan = plan_vertex_integrity(inst.network, inst.separator, b, canonicalize=canonicalize)
    h = sparsify_vertex_integrity(inst.network, inst.separator, b, canonicalize=canonicalize)
    assert verify_cut_sparsifier(inst.network, h).passed
    assert h.n <= vertex_integrity_size_bound(3, a, b, plan.n_signatures)


def test_estimators():
    g = _two_equal_components()
    est = VertexIntegritySparsifier(separator=[0, 1], b=2)
    with pytest.raises(NotFittedError):
        est.transform(g)
    assert est.fit(g).n_signatures_ == 1
    assert est.transform(g) == sparsify_vertex_integrity(g, [0, 1], 2)
    assert est.get_params()["b"] == 2

    vc = VertexCoverSparsifier().fit(g)
    check_vertex_cover(g, vc.cover_)
    assert verify_cut_sparsifier(g, vc.transform(g)).passed
