import pytest

from catalog import EXAMPLES, _odd_flip, probe_library
from strategies import function_sheaf
from supersite import fixtures as fx
from supersite.errors import SupersiteError
from supersite.representability import (ChartClaim, CoveredFunctor, OverlapPresentation, TabulatedFunctor,
                                        check_chart_claims, check_representable_morphism, check_sheaf_criterion,
                                        chart_comparison, open_embedding_witness, represent, trivial_presentation)
from supersite.site import (chart_witnesses, global_super_topology, iso_topology, open_site, split_topology,
                            superspace_site, union_topology)
from supersite.superspace import SpaceMorphism, find_isomorphism, morphism_difference, restrict

TWISTS = ["p11", "twisted", "trivial"]


@pytest.mark.parametrize("ex", [e for e in EXAMPLES if e.module == "representability"], ids=lambda e: e.id)
def test_catalog(ex):
    ex.check()


def _represent(twist):
    CF = fx.two_chart_functor(twist)
    Y = CF.functor.target
    probes = probe_library(CF)
    return CF, probes, represent(CF, global_super_topology(Y), [chart_witnesses(Y)], probes, elements=probes)


@pytest.mark.parametrize("twist", TWISTS)
def test_probe_library_round_trips(twist):
    CF, probes, R = _represent(twist)
    assert len(probes) >= 10
    assert R.report.ok, R.report.codes()
    morphisms = [R.eta(g) for g in probes] + list(R.glued.embeddings.values()) + [SpaceMorphism.identity(R.space)]
    assert R.round_trip(probes, morphisms).ok


@pytest.mark.parametrize("twist", TWISTS)
def test_result_matches_glued_and_declared(twist):
    CF, _, R = _represent(twist)
    assert find_isomorphism(R.space, fx.glued_p1(twist).space) is not None
    assert find_isomorphism(R.space, CF.functor.target) is not None


def test_p11_and_twisted_results_differ():
    _, _, a = _represent("p11")
    _, _, b = _represent("twisted")
    assert find_isomorphism(a.space, b.space) is None


@pytest.mark.parametrize("twist", TWISTS)
def test_eta_is_natural(twist):
    """``eta(phi o g) = phi o eta(g)`` for restrictions along chart inclusions."""
    CF, probes, R = _represent(twist)
    for g in probes:
        T = g.source
        for U in T.base.sorted_opens():
            if not U:
                continue
            j = restrict(T, U)[1]
            assert morphism_difference(R.eta(j.then(g)), j.then(R.eta(g))) is None


@pytest.mark.parametrize("twist", TWISTS)
def test_permuted_charts_give_isomorphic_result(twist):
    CF, probes, a = _represent(twist)
    b = represent(CF.permuted(["Uinf", "U0"]), probes=probes, elements=probes)
    m = chart_comparison(a, b)
    for g in probes:
        assert morphism_difference(a.eta(g).then(m), b.eta(g)) is None


@pytest.mark.parametrize("twist", TWISTS)
def test_trivial_presentations(twist):
    for X in (fx.p1_model(twist), fx.glued_p1(twist).space, fx.affine_11()):
        R = represent(trivial_presentation(X), elements=[SpaceMorphism.identity(X)])
        assert R.report.ok
        assert find_isomorphism(R.space, X) is not None


def test_trivial_presentation_of_three_chart_line():
    X = fx.glue(fx.three_chart_datum()).space
    R = represent(trivial_presentation(X), elements=[SpaceMorphism.identity(X)])
    assert R.report.ok and find_isomorphism(R.space, X) is not None


def _with_overlap_right(CF, b):
    ov = CF.overlaps[("U0", "Uinf")]
    return CoveredFunctor(CF.functor, CF.charts, {("U0", "Uinf"): OverlapPresentation(ov.space, ov.left, b)},
                          name="planted")


def test_sign_error_in_overlap_is_caught():
    CF = fx.two_chart_functor("p11")
    ov = CF.overlaps[("U0", "Uinf")]
    bad = _with_overlap_right(CF, _odd_flip(ov.space).then(ov.right))
    assert check_chart_claims(bad).codes() == ["OverlapMismatch"]
    with pytest.raises(SupersiteError) as exc:
        represent(bad)
    assert "OverlapMismatch" in exc.value.witness["report"].codes()


def test_sign_error_in_chart_map_is_caught():
    CF = fx.two_chart_functor("p11")
    fi = CF.chart("Uinf").map
    Y = CF.functor.target
    bad_map = SpaceMorphism(fi.source, Y, {"inf": "inf", "eta": "eta"},
                            {"inf": {"y": "y", "sg": "sg"}, "eta": {"x": "s", "t": "y", "th": "-s*sg"}})
    bad = CoveredFunctor(CF.functor, [CF.chart("U0"), ChartClaim("Uinf", fi.source, bad_map)], CF.overlaps)
    assert "OverlapMismatch" in check_chart_claims(bad).codes()


def test_overlap_with_wrong_ends_is_caught():
    CF = fx.two_chart_functor("p11")
    ov = CF.overlaps[("U0", "Uinf")]
    bad = _with_overlap_right(CF, ov.left)
    assert "OverlapMismatch" in check_chart_claims(bad).codes()


def test_corollary_mode():
    CF = fx.two_chart_functor("p11")
    Y = CF.functor.target
    R = superspace_site(Y)
    fine = union_topology(R)
    coarse = split_topology(R)
    rep = check_sheaf_criterion(CF, coarse, [chart_witnesses(Y)], finer=fine)
    assert rep.ok and rep.details["corollary_mode"]
    rep = check_sheaf_criterion(CF, fine, [chart_witnesses(Y)], finer=iso_topology(R))
    assert rep.codes() == ["NotSubordinate"]
    with pytest.raises(ValueError):
        check_sheaf_criterion(CF, None, [], finer=fine)


def test_incompatible_witness_fails_sheaf_criterion():
    CF = fx.two_chart_functor("p11")
    Y = CF.functor.target
    auto = _odd_flip(restrict(Y, ["inf", "eta"])[0])
    w = chart_witnesses(Y, [["0", "eta"], ["inf", "eta"]], twist=(1, auto))
    assert check_sheaf_criterion(CF, global_super_topology(Y), [w]).codes() == ["IncompatibleOnOverlap"]


def test_tabulated_functor_sheaf_criterion():
    R = open_site(fx.square())
    CF = CoveredFunctor(TabulatedFunctor(function_sheaf(R, "01")), [])
    rep = check_sheaf_criterion(CF, union_topology(R))
    assert rep.ok and rep.evidence == "exhaustive"


def test_representable_morphism_with_cones():
    Y, f0, finf = fx.chart_maps()
    u = restrict(Y, ["0", "eta"])[1]
    probes = [finf, f0, SpaceMorphism.identity(Y)]
    witnesses = [open_embedding_witness(u, g) for g in probes]
    assert check_representable_morphism(u, probes, witnesses).ok
    w = witnesses[0]
    cones = [(0, w.space, w.to_source, w.to_probe)]
    assert check_representable_morphism(u, probes, witnesses, cones).ok
    bad = [(0, w.space, _odd_flip(w.to_source.source).then(w.to_source), w.to_probe)]
    assert "NotACone" in check_representable_morphism(u, probes, witnesses, bad).codes()


def test_missing_witness_reported():
    Y, f0, _ = fx.chart_maps()
    u = restrict(Y, ["0", "eta"])[1]
    assert check_representable_morphism(u, [f0], []).codes() == ["MissingWitness"]
