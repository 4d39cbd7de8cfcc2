import itertools

import pytest

from catalog import EXAMPLES, _odd_flip
from supersite import fixtures as fx
from supersite.errors import IncompatibleOnOverlap
from supersite.superalgebra import SuperAlgebra
from supersite.superspace import (SpaceMorphism, SuperSpace, check_morphism, check_superspace,
                                  fibered_product_open, find_isomorphism, glue_morphisms, global_sections,
                                  invert, is_open_embedding, morphism_difference, restrict)


@pytest.mark.parametrize("ex", [e for e in EXAMPLES if e.module == "superspace"], ids=lambda e: e.id)
def test_catalog(ex):
    ex.check()


def registered_spaces():
    return [fx.affine_11(), fx.p1_model("p11"), fx.p1_model("twisted"), fx.glued_p1("p11").space,
            fx.glue(fx.three_chart_datum()).space]


def library(Y):
    """A small set of morphisms into ``Y``: open inclusions and their restrictions."""
    out = []
    for U in Y.base.sorted_opens():
        if U:
            out.append(restrict(Y, U)[1])
    return out


@pytest.mark.parametrize("X", registered_spaces(), ids=lambda X: X.name)
def test_registered_spaces_pass(X):
    assert check_superspace(X).ok


@pytest.mark.parametrize("X", registered_spaces(), ids=lambda X: X.name)
def test_restrict_twice(X):
    for U in X.base.sorted_opens():
        XU, jU = restrict(X, U)
        for V in XU.base.sorted_opens():
            XUV, jV = restrict(XU, V)
            XV, _ = restrict(X, V)
            assert XUV.points == XV.points
            for W in XV.sections:
                assert XUV.sections[W] is XV.sections[W]
            assert morphism_difference(jV.then(jU), restrict(X, V)[1]) is None


@pytest.mark.parametrize("X", registered_spaces(), ids=lambda X: X.name)
def test_composition_is_associative_and_unital(X):
    lib = library(X)
    for f in lib:
        idl = SpaceMorphism.identity(f.source)
        idr = SpaceMorphism.identity(f.target)
        assert morphism_difference(idl.then(f), f) is None
        assert morphism_difference(f.then(idr), f) is None
    # chains W -> V -> U -> X of inclusions
    opens = [U for U in X.base.sorted_opens() if U]
    for U, V, W in itertools.product(opens, repeat=3):
        if W <= V <= U:
            XU, a = restrict(X, U)
            XV, b = restrict(XU, V)
            XW, c = restrict(XV, W)
            assert morphism_difference(c.then(b).then(a), c.then(b.then(a))) is None


def _covers(X):
    opens = [U for U in X.sections if U]
    for r in range(1, len(opens) + 1):
        for fam in itertools.combinations(opens, r):
            if frozenset().union(*fam) == X.points:
                yield list(fam)


@pytest.mark.parametrize("twist, expected", [("p11", "1|0"), ("twisted", "1|2"), ("trivial", "1|1")])
def test_global_sections_independent_of_cover(twist, expected):
    G = fx.glued_p1(twist)
    X = G.space
    seen = set()
    for cover in _covers(X):
        gs = global_sections(X, cover, degree_cap=4)
        seen.add(gs.superdimension if gs.algebra is None else "algebra")
    seen.discard("algebra")
    assert seen == {expected}


@pytest.mark.parametrize("twist", ["p11", "twisted", "trivial"])
def test_declared_model_matches_glued(twist):
    X = fx.p1_model(twist)
    cover = [frozenset(["0", "eta"]), frozenset(["inf", "eta"])]
    glued = fx.glued_p1(twist)
    gcover = [e.image() for e in glued.embeddings.values()]
    assert global_sections(X, cover).superdimension == global_sections(glued.space, gcover).superdimension
    assert find_isomorphism(X, glued.space) is not None


@pytest.mark.parametrize("X", registered_spaces(), ids=lambda X: X.name)
def test_fibered_product_projection_is_open_embedding(X):
    lib = library(X)
    for i, f in itertools.product(lib, repeat=2):
        fp = fibered_product_open(i, f)
        assert is_open_embedding(fp.pr2)
        assert morphism_difference(fp.pr1.then(i), fp.pr2.then(f)) is None


def test_fibered_product_cones():
    Y, f0, finf = fx.chart_maps()
    fp = fibered_product_open(f0, finf)
    Z = fp.space
    good = (Z, fp.pr1, fp.pr2)
    assert fp.pr1.source is Z
    rep = fibered_product_open(f0, finf, cones=[good]).cones
    assert rep.ok
    bad = (Z, fp.pr1.then(_odd_flip(f0.source)), fp.pr2)
    assert "NotACone" in fibered_product_open(f0, finf, cones=[bad]).cones.codes()


def test_morphisms_agreeing_on_a_cover_are_equal():
    Y = fx.p1_model()
    cover = [restrict(Y, U)[1] for U in (["0", "eta"], ["inf", "eta"])]
    ident = SpaceMorphism.identity(Y)
    flip = _odd_flip(Y)
    for f, g in itertools.product([ident, flip], repeat=2):
        agree = all(morphism_difference(e.then(f), e.then(g)) is None for e in cover)
        assert agree == (morphism_difference(f, g) is None)


def test_glue_morphisms_rejects_mismatch():
    Y = fx.p1_model()
    cover = [restrict(Y, U)[1] for U in (["0", "eta"], ["inf", "eta"])]
    parts = [cover[0], _odd_flip(cover[1].source).then(cover[1])]
    with pytest.raises(IncompatibleOnOverlap):
        glue_morphisms(cover, parts)


def test_invert_chart_transition():
    phi = fx.chart_transition("p11")
    psi = invert(phi)
    assert morphism_difference(phi.then(psi), SpaceMorphism.identity(phi.source)) is None
    with pytest.raises(ValueError):
        invert(restrict(fx.p1_model(), ["0", "eta"])[1])


def test_check_morphism_catches_bad_stalk_map():
    Y, f0, _ = fx.chart_maps()
    assert check_morphism(f0).ok
    U0 = f0.source
    bad = SpaceMorphism(U0, Y, {"0": "0", "eta": "eta"},
                        {"0": {"x": "x", "th": "th"}, "eta": {"x": "x + 1", "t": "t", "th": "th"}})
    assert not check_morphism(bad).ok


def test_strict_locality():
    X = fx.p1_model()
    permissive = check_superspace(X)
    strict = check_superspace(X, strict_local=True)
    assert permissive.ok and "StalkNotLocal" in [f.code for f in permissive.warnings]
    assert "StalkNotLocal" in strict.codes()
    assert check_superspace(SuperSpace.affine(SuperAlgebra([], ["e"]), name="pt"), strict_local=True).ok


def test_find_isomorphism_distinguishes_twists():
    assert find_isomorphism(fx.p1_model("p11"), fx.p1_model("twisted")) is None
    assert find_isomorphism(fx.p1_model("p11"), fx.p1_model("p11")) is not None
