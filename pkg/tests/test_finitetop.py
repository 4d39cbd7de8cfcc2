import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalog import EXAMPLES
from strategies import finite_spaces
from supersite.errors import NotOpen, UnknownPoint
from supersite.finitetop import (ContinuousMap, FiniteSpace, check_continuous, check_space,
                                 is_closed_embedding_top, is_open_embedding_top, show_open)


@pytest.mark.parametrize("ex", [e for e in EXAMPLES if e.module == "finitetop"], ids=lambda e: e.id)
def test_catalog(ex):
    ex.check()


@settings(max_examples=80, deadline=None)
@given(finite_spaces())
def test_generated_spaces_are_topologies(X):
    assert check_space(X).ok


@settings(max_examples=80, deadline=None)
@given(finite_spaces())
def test_minimal_open_is_least(X):
    for p in X.points:
        containing = [U for U in X.opens if p in U]
        m = X.minimal_open(p)
        assert m in containing and all(m <= U for U in containing)


@settings(max_examples=60, deadline=None)
@given(finite_spaces(), st.data())
def test_composite_of_open_embeddings(X, data):
    U = data.draw(st.sampled_from(sorted(X.opens, key=sorted)))
    XU = X.subspace(U)
    V = data.draw(st.sampled_from(sorted(XU.opens, key=sorted)))
    i = ContinuousMap.inclusion(X, U)
    j = ContinuousMap(XU.subspace(V), XU, {p: p for p in V})
    assert is_open_embedding_top(ContinuousMap.identity(X))
    assert is_open_embedding_top(i) and is_open_embedding_top(j)
    r = is_open_embedding_top(j.then(i))
    assert r and r.image == V


def _all_maps(X, Y):
    xs, ys = sorted(X.points), sorted(Y.points)
    for images in itertools.product(ys, repeat=len(xs)):
        yield ContinuousMap(X, Y, dict(zip(xs, images)))


@settings(max_examples=40, deadline=None)
@given(finite_spaces(max_points=3), finite_spaces(max_points=3))
def test_preimage_commutes_with_lattice_operations(X, Y):
    for f in _all_maps(X, Y):
        if not check_continuous(f).ok:
            continue
        for U, V in itertools.product(Y.opens, repeat=2):
            assert f.preimage(U | V) == f.preimage(U) | f.preimage(V)
            assert f.preimage(U & V) == f.preimage(U) & f.preimage(V)
            assert X.is_open(f.preimage(U))


def test_discrete_and_basis_constructors():
    D = FiniteSpace.discrete("abc")
    assert len(D.opens) == 8
    B = FiniteSpace.from_basis("abc", [{"a"}, {"a", "b"}, {"c"}])
    assert frozenset("ac") in B.opens and frozenset("abc") in B.opens


def test_unknown_point_and_non_open():
    S = FiniteSpace.make("ab", [[], ["a"], ["a", "b"]])
    with pytest.raises(NotOpen):
        S.require_open(["b"])
    with pytest.raises((UnknownPoint, NotOpen)):
        S.require_open(["z"])


def test_not_closed_under_intersection_reported():
    rep = check_space(FiniteSpace.make("abc", [[], ["a", "b"], ["b", "c"], ["a", "b", "c"]]))
    assert "NotClosedUnderIntersection" in rep.codes()


def test_closed_embedding_of_closed_point():
    S = FiniteSpace.make("ab", [[], ["a"], ["a", "b"]])
    pt = FiniteSpace.make("b", [[], ["b"]])
    assert is_closed_embedding_top(ContinuousMap(pt, S, {"b": "b"}))
    pa = FiniteSpace.make("a", [[], ["a"]])
    assert not is_closed_embedding_top(ContinuousMap(pa, S, {"a": "a"}))


def test_show_open_is_sorted():
    assert show_open(frozenset(["inf", "0", "eta"])) == "{0, eta, inf}"
