import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalog import EXAMPLES, _odd_flip, constant_presheaf, separated_not_sheaf
from oracles import sheaf_by_sections
from strategies import function_sheaf, random_presheaf, small_open_site
from supersite import fixtures as fx
from supersite.errors import SizeBoundExceeded
from supersite.presheaf import (FunctorOfPoints, TabulatedPresheaf, brute_force_sheaf_oracle, check_contravariance,
                                check_functoriality, check_sheaf_witness, compatible_families, is_separated,
                                is_sheaf)
from supersite.site import Covering, iso_topology, open_site, union_topology
from supersite.superspace import restrict


@pytest.mark.parametrize("ex", [e for e in EXAMPLES if e.module == "presheaf"], ids=lambda e: e.id)
def test_catalog(ex):
    ex.check()


def _case(seed):
    rng = random.Random(seed)
    R = small_open_site(rng)
    return union_topology(R), random_presheaf(rng, R)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_checker_agrees_with_both_oracles(seed):
    T, F = _case(seed)
    assert check_functoriality(F).ok
    got = bool(is_sheaf(F, T))
    assert got == bool(brute_force_sheaf_oracle(F, T))
    assert got == sheaf_by_sections(F, T)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_sheaf_implies_separated(seed):
    T, F = _case(seed)
    if is_sheaf(F, T):
        assert is_separated(F, T)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_failure_carries_a_covering_of_the_topology(seed):
    T, F = _case(seed)
    ans = is_sheaf(F, T)
    if not ans:
        assert ans.covering in T
        assert ans.kind in ("not-separated", "not-glued")
        if ans.kind == "not-glued":
            fam = ans.witness["family"]
            assert fam in compatible_families(F, ans.covering)


@pytest.mark.parametrize("name", ["sierpinski", "p1_base", "square", "two_point_discrete"])
def test_function_sheaves_are_sheaves(name):
    R = open_site(getattr(fx, name)())
    F = function_sheaf(R, "01")
    assert check_functoriality(F).ok
    assert is_sheaf(F, union_topology(R))


def test_separated_fixture_counts():
    F = separated_not_sheaf()
    T = union_topology(F.registry)
    c = Covering.of("{a, b}", ["{a}->{a, b}", "{b}->{a, b}"])
    assert len(compatible_families(F, c)) == 4
    assert is_separated(F, T)
    ans = is_sheaf(F, T)
    assert not ans and ans.kind == "not-glued" and ans.families == 4
    assert not sheaf_by_sections(F, T)


def test_every_presheaf_is_a_sheaf_for_isomorphisms():
    R = open_site(fx.square())
    assert is_sheaf(constant_presheaf(R, "012"), iso_topology(R))


def test_oracle_refuses_large_input():
    R = open_site(fx.square())
    F = constant_presheaf(R, "0123456")
    with pytest.raises(SizeBoundExceeded):
        brute_force_sheaf_oracle(F, union_topology(R))


def test_restriction_outside_value_set_detected():
    R = open_site(fx.sierpinski())
    F = constant_presheaf(R, "01")
    F.restrictions["{a}->{a, b}"] = {"0": "2", "1": "0"}
    assert not check_functoriality(F).ok


def test_tabulated_presheaf_restrict_by_identity():
    R = open_site(fx.sierpinski())
    F = constant_presheaf(R, "01")
    assert F.restrict("id:{a}", "1") == "1"


def _probes():
    Y, f0, finf = fx.chart_maps()
    U0 = f0.source
    V, j = restrict(U0, ["eta"])
    W, k = restrict(V, ["eta"])
    return Y, f0, j, k


def test_functor_of_points_is_contravariant():
    Y, f0, j, k = _probes()
    h = FunctorOfPoints(Y)
    assert h.contains(f0)
    assert check_contravariance(h, j, k, f0).ok
    flip = _odd_flip(f0.source)
    assert check_contravariance(h, flip, j, f0).ok
    assert check_contravariance(h, j, k, flip.then(f0)).ok


def test_pull_requires_composable_probe():
    Y, f0, j, _ = _probes()
    with pytest.raises(ValueError):
        FunctorOfPoints(Y).pull(f0, f0)


def test_sheaf_witness_glues_chart_inclusions():
    Y = fx.p1_model()
    cover = [restrict(Y, U)[1] for U in (["0", "eta"], ["inf", "eta"])]
    rep = check_sheaf_witness(FunctorOfPoints(Y), cover, cover)
    assert rep.ok and rep.details["unique"]


def test_sheaf_witness_rejects_incompatible_family():
    Y = fx.p1_model()
    cover = [restrict(Y, U)[1] for U in (["0", "eta"], ["inf", "eta"])]
    family = [cover[0], _odd_flip(cover[1].source).then(cover[1])]
    assert check_sheaf_witness(FunctorOfPoints(Y), cover, family).codes() == ["IncompatibleOnOverlap"]


def test_sheaf_witness_rejects_foreign_target():
    Y = fx.p1_model()
    other = fx.p1_model()
    cover = [restrict(Y, U)[1] for U in (["0", "eta"], ["inf", "eta"])]
    assert "TargetMismatch" in check_sheaf_witness(FunctorOfPoints(other), cover, cover).codes()


def test_empty_covering_of_empty_open():
    R = open_site(fx.sierpinski())
    F = TabulatedPresheaf(R, {o: (["*"] if o == "{}" else ["0"]) for o in R.objects},
                          {f: {"0": ("*" if R.arrows[f].source == "{}" else "0")} if R.arrows[f].target != "{}"
                           else {"*": "*"} for f in R.arrows if not R.is_identity(f)})
    assert check_functoriality(F).ok
    assert is_sheaf(F, union_topology(R))
