"""Constructive representability for functors with an open cover by representables.

A :class:`CoveredFunctor` bundles a functor ``F`` with chart claims
``f_i: h_{X_i} -> F`` and overlap presentations ``X_ij`` (a space with open
embeddings into ``X_i`` and ``X_j``).  :func:`represent` turns the overlap
data into a gluing datum, glues it to ``X`` and provides the two natural
transformations ``eta: F -> h_X`` and ``delta: h_X -> F`` on test data.

Functors are abstract: anything implementing :class:`FunctorModel` works.
:class:`RepresentedFunctor` is ``h_Y`` for a declared superspace ``Y``;
nothing about ``Y`` is used by the construction except through the model
operations, so the glued space is built only from chart data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RoundTripFailure, SupersiteError
from .gluing import GluingDatum, Glued, glue, validate_gluing
from .presheaf import TabulatedPresheaf, is_sheaf
from .report import Report
from .site import SheafWitness, Topology, is_subordinate
from .superspace import (SpaceMorphism, SuperSpace, fibered_product_open, glue_morphisms, invert,
                         is_open_embedding, morphism_difference, restrict)


class FunctorModel:
    """Operations the engine needs from ``F``."""

    evidence = "witness-based"

    def pull(self, phi, g):
        """``F(phi)(g)``."""
        raise NotImplementedError

    def chart_element(self, claim, x):
        """``f_i(x)`` for ``x in h_{X_i}(T)``."""
        raise NotImplementedError

    def chart_pullback(self, claim, g):
        """``(Z, pr1: Z -> X_i, pr2: Z -> T)`` presenting ``h_{X_i} x_F h_T``."""
        raise NotImplementedError

    def glue(self, cover, parts):
        raise NotImplementedError

    def equal(self, a, b) -> bool:
        raise NotImplementedError

    def source(self, g):
        raise NotImplementedError


class RepresentedFunctor(FunctorModel):
    """``h_Y``: elements over ``T`` are morphisms ``T -> Y``."""

    def __init__(self, Y: SuperSpace, name=""):
        self.target = Y
        self.name = name or f"h_{Y.name}"

    def pull(self, phi, g):
        return phi.then(g)

    def chart_element(self, claim, x):
        return x.then(claim.map)

    def chart_pullback(self, claim, g):
        fp = fibered_product_open(claim.map, g)
        return fp.space, fp.pr1, fp.pr2

    def glue(self, cover, parts):
        return glue_morphisms(cover, parts)

    def equal(self, a, b) -> bool:
        return morphism_difference(a, b) is None

    def source(self, g):
        return g.source


class TabulatedFunctor(FunctorModel):
    """A tabulated presheaf; only the sheaf criterion applies to it."""

    evidence = "exhaustive"

    def __init__(self, F: TabulatedPresheaf):
        self.presheaf = F
        self.name = F.name


@dataclass
class ChartClaim:
    """``f_i: h_{X_i} -> F`` given by its universal element ``map in F(X_i)``."""
    name: str
    space: SuperSpace
    map: object


@dataclass
class OverlapPresentation:
    """``X_ij`` with open embeddings into ``X_i`` and ``X_j``."""
    space: SuperSpace
    left: SpaceMorphism
    right: SpaceMorphism


@dataclass
class CoveredFunctor:
    functor: FunctorModel
    charts: list
    overlaps: dict = field(default_factory=dict)
    name: str = ""

    def chart(self, name) -> ChartClaim:
        return next(c for c in self.charts if c.name == name)

    def permuted(self, order):
        return CoveredFunctor(self.functor, [self.chart(n) for n in order], self.overlaps, self.name)


def trivial_presentation(X: SuperSpace, name="X") -> CoveredFunctor:
    """``h_X`` covered by the single identity subfunctor."""
    return CoveredFunctor(RepresentedFunctor(X), [ChartClaim(name, X, SpaceMorphism.identity(X))],
                          name=f"trivial({X.name})")


# --- criteria ------------------------------------------------------------------------

def check_chart_claims(CF: CoveredFunctor) -> Report:
    """Every chart is a monomorphism onto an open piece, and every overlap is a fibered product."""
    rep = Report(f"chart claims of {CF.name}", evidence=CF.functor.evidence)
    F = CF.functor
    for c in CF.charts:
        if isinstance(F, RepresentedFunctor):
            r = is_open_embedding(c.map)
            if not r:
                rep.add("NotOpenEmbedding", f"chart {c.name}: {r.reason}", chart=c.name)
    for (i, j), ov in sorted(CF.overlaps.items()):
        ci, cj = CF.chart(i), CF.chart(j)
        for side, emb, X in (("left", ov.left, ci.space), ("right", ov.right, cj.space)):
            if emb.source is not ov.space or emb.target is not X:
                rep.add("OverlapMismatch", f"overlap {i},{j}: {side} map has the wrong ends", i=i, j=j)
            elif not is_open_embedding(emb):
                rep.add("NotOpenEmbedding", f"overlap {i},{j}: {side} map is not an open embedding", i=i, j=j)
        if rep.errors:
            continue
        a = F.chart_element(ci, ov.left)
        b = F.chart_element(cj, ov.right)
        if not F.equal(a, b):
            rep.add("OverlapMismatch", f"overlap {i},{j}: the square into F does not commute", i=i, j=j)
            continue
        # the overlap must be all of h_{X_i} x_F h_{X_j}: compare with the pullback of f_j along f_i
        Z, pr1, pr2 = F.chart_pullback(cj, F.chart_element(ci, SpaceMorphism.identity(ci.space)))
        image = pr2.image()
        if image != ov.left.image():
            rep.add("OverlapMismatch", f"overlap {i},{j} covers {sorted(ov.left.image())} of {i}, "
                    f"fibered product covers {sorted(image)}", i=i, j=j)
    return rep


def check_open_covering(CF: CoveredFunctor, probes) -> Report:
    """For each probe ``g in F(T)`` the pulled-back charts are open embeddings covering ``T``."""
    rep = Report(f"open covering of {CF.name}", evidence="witness-based")
    rep.extend(check_chart_claims(CF))
    F = CF.functor
    for n, g in enumerate(probes):
        T = F.source(g)
        images = frozenset()
        for c in CF.charts:
            Z, pr1, pr2 = F.chart_pullback(c, g)
            r = is_open_embedding(pr2)
            if not r:
                rep.add("NotOpenEmbedding", f"probe {n}: pullback of chart {c.name} is not open: {r.reason}",
                        probe=n, chart=c.name)
                continue
            images |= r.image
        missing = T.points - images
        if missing:
            p = sorted(missing, key=str)[0]
            rep.add("NotJointlyCovering", f"probe {n}: point {p} of {T.name} is missed by every chart",
                    probe=n, point=p)
    rep.details["probes"] = len(probes)
    return rep


def check_sheaf_criterion(CF: CoveredFunctor, T: Topology | None = None, witnesses=(), finer: Topology | None = None) -> Report:
    """Sheaf condition for ``F``; with ``finer`` the evidence is taken in a finer topology."""
    F = CF.functor
    rep = Report(f"sheaf criterion for {CF.name}", evidence=F.evidence)
    if finer is not None:
        if T is None:
            raise ValueError("corollary mode needs the coarser topology too")
        sub = is_subordinate(T, finer)
        rep.details["corollary_mode"] = True
        if not sub:
            rep.add("NotSubordinate", f"{T.name} is not subordinate to {finer.name}",
                    covering=str(sub.witness))
            return rep
        T = finer
    if isinstance(F, TabulatedFunctor):
        ans = is_sheaf(F.presheaf, T)
        if not ans:
            rep.add("NotASheaf", f"{ans.kind} over {ans.covering}", **ans.as_dict())
        return rep
    for n, w in enumerate(witnesses):
        label = w.name or f"witness {n}"
        try:
            t = F.glue(w.cover, w.parts)
        except SupersiteError as exc:
            rep.add(exc.code, f"{label}: {exc}", witness=label)
            continue
        for k, (e, part) in enumerate(zip(w.cover, w.parts)):
            if not F.equal(F.pull(e, t), part):
                rep.add("NotAGluing", f"{label}: glued element differs from part {k}", witness=label, part=k)
    rep.details["witnesses"] = len(witnesses)
    return rep


# --- construction --------------------------------------------------------------------

def overlap_transition(CF: CoveredFunctor, i, j, ov: OverlapPresentation):
    """``phi_ij = b o a^-1`` from the piece of ``X_i`` onto the piece of ``X_j``."""
    a, b = ov.left, ov.right
    Xi, Xj = CF.chart(i).space, CF.chart(j).space
    A = restrict(Xi, a.image())[0]
    B = restrict(Xj, b.image())[0]
    pts = {a(p): b(p) for p in ov.space.points}
    stalks = {a(p): b.stalks[p].then(a.stalks[p].inverse()) for p in ov.space.points}
    return SpaceMorphism(A, B, pts, stalks, name=f"phi_{i}{j}")


def gluing_datum(CF: CoveredFunctor) -> GluingDatum:
    patches = {c.name: c.space for c in CF.charts}
    overlaps, trans = {}, {}
    for (i, j), ov in CF.overlaps.items():
        if i == j:
            continue
        overlaps[(i, j)] = ov.left.image()
        overlaps[(j, i)] = ov.right.image()
        trans[(i, j)] = overlap_transition(CF, i, j, ov)
    return GluingDatum(patches, overlaps, trans, name=CF.name)


class Representation:
    """The glued space with ``eta`` and ``delta``."""

    def __init__(self, CF: CoveredFunctor, glued: Glued, datum: GluingDatum, report: Report):
        self.cf = CF
        self.glued = glued
        self.datum = datum
        self.report = report

    @property
    def space(self) -> SuperSpace:
        return self.glued.space

    def eta(self, g):
        """``F(T) -> Hom(T, X)``: pull ``g`` back to the charts and glue the pieces."""
        F = self.cf.functor
        cover, parts = [], []
        for c in self.cf.charts:
            Z, pr1, pr2 = F.chart_pullback(c, g)
            if not Z.points:
                continue
            cover.append(pr2)
            parts.append(pr1.then(self.glued.embeddings[c.name]))
        if not cover:
            return SpaceMorphism(F.source(g), self.space, {}, {}, name="eta")
        return glue_morphisms(cover, parts)

    def delta(self, t: SpaceMorphism):
        """``Hom(T, X) -> F(T)``: restrict ``t`` to chart preimages and glue in ``F``."""
        F = self.cf.functor
        cover, parts = [], []
        for c in self.cf.charts:
            fp = fibered_product_open(self.glued.embeddings[c.name], t)
            if not fp.space.points:
                continue
            cover.append(fp.pr2)
            parts.append(F.chart_element(c, fp.pr1))
        if not cover:
            raise RoundTripFailure("morphism from an empty space has no chart pieces")
        return F.glue(cover, parts)

    def round_trip(self, elements=(), morphisms=()) -> Report:
        rep = Report(f"round trips for {self.cf.name}", evidence="witness-based")
        F = self.cf.functor
        for n, g in enumerate(elements):
            try:
                back = self.delta(self.eta(g))
            except SupersiteError as exc:
                rep.add("RoundTripFailure", f"delta(eta(g_{n})) failed: {exc}", element=n)
                continue
            if not F.equal(back, g):
                rep.add("RoundTripFailure", f"delta(eta(g_{n})) != g_{n}", element=n)
        for n, t in enumerate(morphisms):
            try:
                back = self.eta(self.delta(t))
            except SupersiteError as exc:
                rep.add("RoundTripFailure", f"eta(delta(t_{n})) failed: {exc}", morphism=n)
                continue
            d = morphism_difference(back, t)
            if d is not None:
                rep.add("RoundTripFailure", f"eta(delta(t_{n})) != t_{n}: {d['reason']}", morphism=n)
        rep.details["elements"] = len(elements)
        rep.details["morphisms"] = len(morphisms)
        return rep


def represent(CF: CoveredFunctor, T: Topology | None = None, witnesses=(), probes=None,
              elements=(), morphisms=(), finer: Topology | None = None) -> Representation:
    """Check the criteria, glue the overlap presentation, and test ``eta`` and ``delta``."""
    rep = Report(f"represent {CF.name}", evidence="witness-based")
    probes = list(probes) if probes is not None else [c.map for c in CF.charts]
    rep.extend(check_open_covering(CF, probes), prefix="covering: ")
    if T is not None or witnesses:
        rep.extend(check_sheaf_criterion(CF, T, list(witnesses), finer), prefix="sheaf: ")
    if rep.errors:
        raise SupersiteError(f"criteria fail: {rep.errors[0].message}", report=rep)
    D = gluing_datum(CF)
    vrep = validate_gluing(D)
    rep.extend(vrep, prefix="gluing: ")
    G = glue(D, name=f"X[{CF.name}]")
    out = Representation(CF, G, D, rep)
    rt = out.round_trip(elements, morphisms)
    rep.extend(rt, prefix="round-trip: ")
    return out


def chart_comparison(a: Representation, b: Representation) -> SpaceMorphism:
    """Isomorphism ``a.space -> b.space`` assembled from the chart embeddings."""
    names = [c.name for c in a.cf.charts]
    cover = [a.glued.embeddings[n] for n in names]
    parts = [b.glued.embeddings[n] for n in names]
    m = glue_morphisms(cover, parts)
    invert(m)
    return m


# --- representable morphisms ---------------------------------------------------------

@dataclass
class FiberWitness:
    """Claimed representing space ``W`` of ``h_X x_{h_Z} h_T`` with its two projections."""
    space: SuperSpace
    to_source: SpaceMorphism
    to_probe: SpaceMorphism


def check_representable_morphism(u: SpaceMorphism, probes, witnesses, cones=()) -> Report:
    """``h(u): h_X -> h_Z`` is representable along each probe ``g: T -> Z``.

    ``witnesses[n]`` is a :class:`FiberWitness` for ``probes[n]``.  The
    square must commute, the witness must sit over the expected points of
    ``T``, and every test cone ``(n, S, a: S -> X, b: S -> T)`` must factor.
    """
    rep = Report("representable morphism", evidence="witness-based")
    for n, g in enumerate(probes):
        w = witnesses.get(n) if isinstance(witnesses, dict) else (witnesses[n] if n < len(witnesses) else None)
        if w is None:
            rep.add("MissingWitness", f"no representing space supplied for probe {n}", probe=n)
            continue
        if w.to_probe.target is not g.source or w.to_source.target is not u.source:
            rep.add("WitnessMismatch", f"probe {n}: witness projections do not land in the source of u "
                    "and the probe", probe=n)
            continue
        d = morphism_difference(w.to_source.then(u), w.to_probe.then(g))
        if d is not None:
            rep.add("WitnessMismatch", f"probe {n}: witness square does not commute: {d['reason']}", probe=n)
            continue
        expected = g.preimage(u.image())
        r = is_open_embedding(w.to_probe) if is_open_embedding(u) else None
        if r is not None:
            if not r or r.image != expected:
                rep.add("WitnessMismatch", f"probe {n}: witness sits over {sorted(r.image, key=str)}, "
                        f"expected {sorted(expected, key=str)}", probe=n)
                continue
        for m, (k, S, a, b) in enumerate(cones):
            if k != n:
                continue
            if morphism_difference(a.then(u), b.then(g)) is not None:
                rep.add("NotACone", f"probe {n}: cone {m} does not commute", probe=n, cone=m)
                continue
            try:
                back = invert(w.to_probe.corestrict(w.to_probe.image()))
                k_map = b.corestrict(w.to_probe.image()).then(back)
            except (ValueError, SupersiteError) as exc:
                rep.add("WitnessMismatch", f"probe {n}: cone {m} does not factor: {exc}", probe=n, cone=m)
                continue
            if morphism_difference(k_map.then(w.to_source), a) is not None:
                rep.add("WitnessMismatch", f"probe {n}: cone {m} factors inconsistently", probe=n, cone=m)
    return rep


def open_embedding_witness(u: SpaceMorphism, g: SpaceMorphism) -> FiberWitness:
    fp = fibered_product_open(u, g)
    return FiberWitness(fp.space, fp.pr1, fp.pr2)


__all__ = [
    "ChartClaim", "CoveredFunctor", "FiberWitness", "FunctorModel", "OverlapPresentation", "Representation",
    "RepresentedFunctor", "SheafWitness", "TabulatedFunctor", "check_chart_claims", "check_open_covering",
    "check_representable_morphism", "check_sheaf_criterion", "chart_comparison", "gluing_datum",
    "open_embedding_witness", "overlap_transition", "represent", "trivial_presentation",
]
