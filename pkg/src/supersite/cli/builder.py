"""Turn a parsed document into engine objects.

Declarations are built on demand and memoized, so the result does not
depend on the order in which they appear in the file.
"""

from __future__ import annotations

from ..errors import SupersiteError
from ..field import Field
from ..finitetop import FiniteSpace, show_open
from ..gluing import GluingDatum, glue, validate_gluing
from ..presheaf import TabulatedPresheaf
from ..representability import ChartClaim, CoveredFunctor, OverlapPresentation, RepresentedFunctor
from ..site import (Arrow, Covering, SiteRegistry, Topology, iso_topology, open_site, split_topology,
                    superspace_site, union_topology)
from ..superalgebra import SuperAlgebra
from ..superspace import SpaceMorphism, SuperSpace, restrict
from . import ast as A

GENERATED_TOPOLOGIES = {
    "open-covers": union_topology,
    "isomorphisms": iso_topology,
    "split": split_topology,
}


class BuildError(Exception):
    def __init__(self, code, message, span=None):
        super().__init__(message)
        self.code = code
        self.span = span


class Environment:
    def __init__(self, doc: A.Document, degree_cap=None):
        self.doc = doc
        self.degree_cap = degree_cap
        self.cache = {}
        self.building = set()
        self.glued = {}

    # --- plumbing
    def decl(self, kind, name, span=None):
        d = self.doc.named(kind, name)
        if d is None:
            raise BuildError("UnresolvedReference", f"no {kind} named {name!r}", span)
        return d

    def get(self, kind, name, span=None):
        key = (kind, name)
        if key in self.cache:
            return self.cache[key]
        if key in self.building:
            raise BuildError("CyclicReference", f"{kind} {name!r} depends on itself", span)
        d = self.decl(kind, name, span)
        self.building.add(key)
        try:
            value = getattr(self, f"b_{kind}")(d)
        except BuildError:
            raise
        except SupersiteError as exc:
            raise BuildError(exc.code, f"{kind} {name}: {exc}", d.span) from exc
        except (ValueError, KeyError, SyntaxError, ZeroDivisionError) as exc:
            raise BuildError("InvalidDeclaration", f"{kind} {name}: {exc}", d.span) from exc
        finally:
            self.building.discard(key)
        self.cache[key] = value
        return value

    def space_like(self, name, span=None):
        """A superspace, or the space glued from a gluing declaration."""
        if self.doc.named("superspace", name) is not None:
            return self.get("superspace", name, span)
        if self.doc.named("gluing", name) is not None:
            return self.get("gluing", name, span).space
        raise BuildError("UnresolvedReference", f"no superspace or gluing named {name!r}", span)

    def space_ref(self, ref: A.SpaceRef, span=None):
        X = self.space_like(ref.name, span)
        if ref.open is None:
            return X
        return restrict(X, frozenset(ref.open))[0]

    def algebra_from(self, lit: A.AlgebraLit, name):
        kwargs = {} if self.degree_cap is None else {"degree_cap": self.degree_cap}
        return SuperAlgebra(lit.even, lit.odd, lit.relations, field=Field(lit.field), name=name, **kwargs)

    # --- builders
    def b_algebra(self, d: A.Algebra):
        return self.algebra_from(d.value, d.name)

    def b_space(self, d: A.Space):
        if d.opens is None:
            return FiniteSpace.discrete(d.points)
        if d.basis:
            return FiniteSpace.from_basis(d.points, [frozenset(U) for U in d.opens])
        return FiniteSpace.make(d.points, [frozenset(U) for U in d.opens])

    def b_superspace(self, d: A.Superspace):
        if d.affine:
            return SuperSpace.affine(self.get("algebra", d.affine, d.span), name=d.name)
        base = self.get("space", d.base, d.span)
        sections = {}
        for s in d.sections:
            alg = (self.get("algebra", s.algebra, d.span) if isinstance(s.algebra, str)
                   else self.algebra_from(s.algebra, f"{d.name}{show_open(s.open)}"))
            sections[frozenset(s.open)] = alg
        res = {(frozenset(r.target), frozenset(r.source)): dict(r.images) for r in d.restrictions}
        return SuperSpace(base, sections, res, name=d.name)

    def b_morphism(self, d: A.Morphism):
        if d.chain:
            out = None
            for atom in d.chain:
                if atom.op == "ref":
                    m = self.get("morphism", atom.name, d.span)
                elif atom.op == "inclusion":
                    X = self.space_like(atom.space.name, d.span)
                    m = restrict(X, frozenset(atom.space.open or X.points))[1]
                else:
                    m = SpaceMorphism.identity(self.space_ref(atom.space, d.span))
                if out is not None and out.target is not m.source:
                    raise BuildError("NotComposable", f"morphism {d.name}: cannot compose {out.name} with {m.name}",
                                     d.span)
                out = m if out is None else out.then(m)
            return SpaceMorphism(out.source, out.target, out.cmap.mapping, out.stalks, name=d.name)
        X = self.space_ref(d.source, d.span)
        Y = self.space_ref(d.target, d.span)
        points = dict(d.points)
        stalks = {p: dict(images) for p, images in d.stalks}
        missing = sorted(set(map(str, X.points)) - set(points))
        if missing:
            raise BuildError("MissingPoint", f"morphism {d.name}: no image for points {missing}", d.span)
        missing = sorted(set(map(str, X.points)) - set(stalks))
        if missing:
            raise BuildError("MissingStalk", f"morphism {d.name}: no stalk map at points {missing}", d.span)
        for p, images in stalks.items():
            B = Y.stalk(points[p])
            for g in B.generators:
                if g not in images:
                    raise BuildError("MissingStalk", f"morphism {d.name}: stalk at {p} gives no image for {g}",
                                     d.span)
        return SpaceMorphism(X, Y, points, stalks, name=d.name)

    def b_site(self, d: A.Site):
        if d.generator == "opens":
            return open_site(self.get("space", d.of, d.span), name=d.name)
        if d.generator == "superspace":
            return superspace_site(self.space_like(d.of, d.span), name=d.name)
        return SiteRegistry(d.objects, [Arrow(a.name, a.source, a.target) for a in d.arrows],
                            {(g, f): h for g, f, h in d.composites},
                            {(f, g): (P, p1, p2) for f, g, P, p1, p2 in d.pullbacks}, name=d.name)

    def object_name(self, R: SiteRegistry, o, span):
        name = show_open(frozenset(o)) if isinstance(o, tuple) else o
        if name not in R.objects:
            raise BuildError("UnresolvedReference", f"no object {name} in site {R.name}", span)
        return name

    def arrow_name(self, R: SiteRegistry, ref, target, span):
        """An arrow name, or the inclusion of an open into ``target``."""
        if isinstance(ref, str):
            if ref not in R.arrows:
                raise BuildError("UnresolvedReference", f"no arrow {ref} in site {R.name}", span)
            return ref
        src = self.object_name(R, ref, span)
        if src == target:
            return R.identity(src)
        name = f"{src}->{target}"
        if name not in R.arrows:
            raise BuildError("UnresolvedReference", f"no inclusion {name} in site {R.name}", span)
        return name

    def b_topology(self, d: A.TopologyDecl):
        R = self.get("site", d.site, d.span)
        if d.base is None:
            T = Topology(R, name=d.name)
        else:
            gen = GENERATED_TOPOLOGIES.get(d.base)
            if gen is None:
                raise BuildError("UnknownTopology", f"unknown generated topology {d.base!r} "
                                 f"(known: {', '.join(GENERATED_TOPOLOGIES)})", d.span)
            if d.base == "open-covers" and "open_of" not in R.meta:
                raise BuildError("UnknownTopology", "open-covers needs a site of opens", d.span)
            T = gen(R, name=d.name)
        for s in d.statements:
            U = self.object_name(R, s.target, d.span)
            c = Covering.of(U, [self.arrow_name(R, m, U, d.span) for m in s.members])
            if s.op == "cover":
                T.add(c)
            else:
                T = T.without(c, name=d.name)
        T.name = d.name
        return T

    def b_presheaf(self, d: A.Presheaf):
        R = self.get("site", d.site, d.span)
        values = {self.object_name(R, U, d.span): list(vals) for U, vals in d.values}
        res = {}
        for f, pairs in d.restrictions:
            if isinstance(f, tuple):
                U = self.object_name(R, f[1], d.span)
                name = self.arrow_name(R, f[0], U, d.span)
            else:
                name = self.arrow_name(R, f, None, d.span)
            res[name] = dict(pairs)
        return TabulatedPresheaf(R, values, res, name=d.name)

    def gluing_datum(self, d: A.Gluing):
        patches = {p: self.space_like(p, d.span) for p in d.patches}
        overlaps = {}
        for i, j, Ui, Uj in d.overlaps:
            for p in (i, j):
                if p not in patches:
                    raise BuildError("UnresolvedReference", f"gluing {d.name}: {p} is not a patch", d.span)
            overlaps[(i, j)] = frozenset(Ui)
            overlaps[(j, i)] = frozenset(Uj)
        trans = {(i, j): self.get("morphism", m, d.span) for i, j, m in d.transitions}
        return GluingDatum(patches, overlaps, trans, name=d.name)

    def b_gluing(self, d: A.Gluing):
        D = self.gluing_datum(d)
        rep = validate_gluing(D)
        if rep.errors:
            err = BuildError(rep.errors[0].code, f"gluing {d.name}: {rep.errors[0].message}", d.span)
            err.report = rep
            raise err
        return glue(D, name=d.name)

    def b_functor(self, d: A.Functor):
        Y = self.space_ref(d.target, d.span)
        charts = []
        for name, m in d.charts:
            f = self.get("morphism", m, d.span)
            charts.append(ChartClaim(name, f.source, f))
        names = {c.name for c in charts}
        overlaps = {}
        for i, j, a, b in d.overlaps:
            if i not in names or j not in names:
                raise BuildError("UnresolvedReference", f"functor {d.name}: overlap names an unknown chart", d.span)
            ma, mb = self.get("morphism", a, d.span), self.get("morphism", b, d.span)
            if ma.source is not mb.source:
                raise BuildError("OverlapMismatch", f"functor {d.name}: {a} and {b} start at different spaces", d.span)
            overlaps[(i, j)] = OverlapPresentation(ma.source, ma, mb)
        return CoveredFunctor(RepresentedFunctor(Y), charts, overlaps, name=d.name)

    def probes(self, d: A.Functor):
        return [self.get("morphism", m, d.span) for m in d.probes]
