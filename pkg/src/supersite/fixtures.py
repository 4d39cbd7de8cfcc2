"""Small named spaces used by tests, scripts and the bundled documents.

The projective-line models use the three-point space ``{0, inf, eta}``
whose opens are the two charts ``{0, eta}``, ``{inf, eta}``, their overlap
``{eta}`` and the whole space.  Chart rings are ``Q[x|th]`` and ``Q[y|sg]``;
the overlap ring is ``Q[x, t|th]/(x t - 1)``.  The odd transition decides
the space: ``sg -> t*th`` gives P^{1|1}, ``sg -> x*th`` the twisted
space ``X_Pi`` and ``sg -> th`` the trivial odd line.
"""

from __future__ import annotations

from functools import lru_cache

from .finitetop import FiniteSpace
from .gluing import GluingDatum, glue
from .superalgebra import SuperAlgebra
from .superspace import SpaceMorphism, SuperSpace, restrict

TWISTS = {"p11": "t*th", "twisted": "x*th", "trivial": "th"}


def sierpinski() -> FiniteSpace:
    return FiniteSpace.make("ab", [[], ["a"], ["a", "b"]])


def two_point_discrete() -> FiniteSpace:
    return FiniteSpace.discrete("ab")


def chain3() -> FiniteSpace:
    return FiniteSpace.make("abc", [[], ["a"], ["a", "b"], ["a", "b", "c"]])


def p1_base() -> FiniteSpace:
    return FiniteSpace.make(["0", "inf", "eta"],
                            [[], ["eta"], ["0", "eta"], ["inf", "eta"], ["0", "inf", "eta"]])


def square() -> FiniteSpace:
    """Product of two Sierpinski spaces."""
    return FiniteSpace.make(["aa", "ab", "ba", "bb"],
                            [[], ["aa"], ["aa", "ab"], ["aa", "ba"], ["aa", "ab", "ba"], ["aa", "ab", "ba", "bb"]])


def fixture_spaces():
    return {"sierpinski": sierpinski(), "p1": p1_base(), "square": square()}


# --- algebras ---------------------------------------------------------------

@lru_cache(maxsize=None)
def chart_algebras():
    return {
        "A0": SuperAlgebra(["x"], ["th"], name="A0"),
        "Ainf": SuperAlgebra(["y"], ["sg"], name="Ainf"),
        "G0": SuperAlgebra(["x", "t"], ["th"], ["x*t - 1"], name="G0"),
        "Ginf": SuperAlgebra(["y", "s"], ["sg"], ["y*s - 1"], name="Ginf"),
    }


def affine_11(name="A11") -> SuperSpace:
    return SuperSpace.affine(chart_algebras()["A0"], "p", name=name)


def p1_model(twist="p11", name=None) -> SuperSpace:
    """The projective-line model declared directly on its three minimal opens."""
    alg = chart_algebras()
    sg = TWISTS.get(twist, twist)
    base = p1_base()
    secs = {frozenset(["0", "eta"]): alg["A0"], frozenset(["inf", "eta"]): alg["Ainf"],
            frozenset(["eta"]): alg["G0"]}
    eta = frozenset(["eta"])
    res = {(eta, frozenset(["0", "eta"])): {"x": "x", "th": "th"},
           (eta, frozenset(["inf", "eta"])): {"y": "t", "sg": sg}}
    return SuperSpace(base, secs, res, name=name or f"P1[{twist}]")


@lru_cache(maxsize=None)
def chart_patches():
    alg = chart_algebras()
    base0 = FiniteSpace.make(["0", "eta"], [[], ["eta"], ["0", "eta"]])
    baseI = FiniteSpace.make(["inf", "eta"], [[], ["eta"], ["inf", "eta"]])
    U0 = SuperSpace(base0, {frozenset(["0", "eta"]): alg["A0"], frozenset(["eta"]): alg["G0"]},
                    {(frozenset(["eta"]), frozenset(["0", "eta"])): {"x": "x", "th": "th"}}, name="U0")
    Ui = SuperSpace(baseI, {frozenset(["inf", "eta"]): alg["Ainf"], frozenset(["eta"]): alg["Ginf"]},
                    {(frozenset(["eta"]), frozenset(["inf", "eta"])): {"y": "y", "sg": "sg"}}, name="Uinf")
    return U0, Ui


def chart_transition(twist="p11", sign=1):
    """Isomorphism from U0 restricted to {eta} onto Uinf restricted to {eta}."""
    U0, Ui = chart_patches()
    sg = TWISTS.get(twist, twist)
    if sign < 0:
        sg = f"-({sg})"
    A = restrict(U0, ["eta"])[0]
    B = restrict(Ui, ["eta"])[0]
    return SpaceMorphism(A, B, {"eta": "eta"}, {"eta": {"y": "t", "s": "x", "sg": sg}}, name=f"phi[{twist}]")


def chart_datum(twist="p11", sign=1, name=None) -> GluingDatum:
    U0, Ui = chart_patches()
    eta = frozenset(["eta"])
    return GluingDatum({"U0": U0, "Uinf": Ui}, {("U0", "Uinf"): eta, ("Uinf", "U0"): eta},
                       {("U0", "Uinf"): chart_transition(twist, sign)}, name=name or f"P1[{twist}]")


@lru_cache(maxsize=None)
def glued_p1(twist="p11"):
    return glue(chart_datum(twist))


# --- three charts -----------------------------------------------------------

@lru_cache(maxsize=None)
def three_chart_patches():
    def patch(name, pt, even, odd, generic_even, generic_rels, images):
        base = FiniteSpace.make([pt, "eta"], [[], ["eta"], [pt, "eta"]])
        A = SuperAlgebra([even], [odd], name=f"{name}.chart")
        G = SuperAlgebra(generic_even, [odd], generic_rels, name=f"{name}.generic")
        return SuperSpace(base, {frozenset([pt, "eta"]): A, frozenset(["eta"]): G},
                          {(frozenset(["eta"]), frozenset([pt, "eta"])): images}, name=name)

    V0 = patch("V0", "0", "x", "th", ["x", "a", "b"], ["x*a - 1", "(x - 1)*b - 1"], {"x": "x", "th": "th"})
    V1 = patch("V1", "1", "z", "tau", ["z", "c", "d"], ["(z + 1)*c - 1", "z*d - 1"], {"z": "z", "tau": "tau"})
    Vi = patch("Vinf", "inf", "y", "sg", ["y", "e", "f"], ["y*e - 1", "(1 - y)*f - 1"], {"y": "y", "sg": "sg"})
    return {"V0": V0, "V1": V1, "Vinf": Vi}


THREE_CHART_TRANSITIONS = {
    ("V0", "V1"): {"z": "x - 1", "c": "a", "d": "b", "tau": "th"},
    ("V0", "Vinf"): {"y": "a", "e": "x", "f": "x*b", "sg": "a*th"},
    ("V1", "Vinf"): {"y": "c", "e": "z + 1", "f": "(z + 1)*d", "sg": "c*tau"},
}
ODD_GENERATOR = {"V0": "th", "V1": "tau", "Vinf": "sg"}


def three_chart_datum(perturb=None, name="line3") -> GluingDatum:
    """Three-chart projective line; ``perturb`` names a transition whose odd image flips sign."""
    P = three_chart_patches()
    eta = frozenset(["eta"])
    overlaps, trans = {}, {}
    for (i, j), images in THREE_CHART_TRANSITIONS.items():
        images = dict(images)
        if perturb == (i, j):
            odd = ODD_GENERATOR[j]
            images[odd] = f"-({images[odd]})"
        overlaps[(i, j)] = overlaps[(j, i)] = eta
        A = restrict(P[i], eta)[0]
        B = restrict(P[j], eta)[0]
        trans[(i, j)] = SpaceMorphism(A, B, {"eta": "eta"}, {"eta": images}, name=f"{i}->{j}")
    return GluingDatum(P, overlaps, trans, name=name)


# --- functor presentations ----------------------------------------------------

CHART_INVERSE_ODD = {"p11": "s*sg", "twisted": "y*sg", "trivial": "sg"}


def chart_maps(twist="p11", Y=None):
    """Open embeddings of the two chart patches into the declared model."""
    Y = Y or p1_model(twist)
    U0, Ui = chart_patches()
    f0 = SpaceMorphism(U0, Y, {"0": "0", "eta": "eta"}, {"0": {"x": "x", "th": "th"},
                                                          "eta": {"x": "x", "t": "t", "th": "th"}}, name="f0")
    fi = SpaceMorphism(Ui, Y, {"inf": "inf", "eta": "eta"},
                       {"inf": {"y": "y", "sg": "sg"},
                        "eta": {"x": "s", "t": "y", "th": CHART_INVERSE_ODD[twist]}}, name="finf")
    return Y, f0, fi


def two_chart_functor(twist="p11", Y=None):
    """``h_Y`` for the declared model ``Y`` covered by the two chart patches."""
    from .representability import ChartClaim, CoveredFunctor, OverlapPresentation, RepresentedFunctor

    Y, f0, fi = chart_maps(twist, Y)
    U0, Ui = chart_patches()
    phi = chart_transition(twist)
    X01, a = restrict(U0, ["eta"])
    b = phi.then(restrict(Ui, ["eta"])[1])
    return CoveredFunctor(RepresentedFunctor(Y), [ChartClaim("U0", U0, f0), ChartClaim("Uinf", Ui, fi)],
                          {("U0", "Uinf"): OverlapPresentation(X01, a, b)}, name=f"charts[{twist}]")
