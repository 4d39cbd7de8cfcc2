"""Super ringed spaces over finite topological spaces.

A structure sheaf on a finite space is determined by its values on the
minimal opens ``U_p`` (one per point) and the restrictions between them;
the value on any other open is the equalizer over the minimal opens it
contains.  A :class:`SuperSpace` therefore must declare every minimal open
and may declare further opens, which are then checked against the
equalizer.  Stalks are the values on minimal opens.

A :class:`SpaceMorphism` ``f: X -> Y`` is stored as its point map plus one
stalk homomorphism ``O_Y(U_f(p)) -> O_X(U_p)`` per point of X.  This is
equivalent to the full family ``f*_U`` and avoids needing algebras on
undeclared preimages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .errors import IncompatibleOnOverlap, NotOpen, NotOpenEmbedding
from .field import nullspace, solve
from .finitetop import (ContinuousMap, FiniteSpace, check_continuous, check_space, is_closed_embedding_top,
                        is_open_embedding_top, open_key, show_open, sorted_points)
from .report import Report
from .superalgebra import (Locality, SuperAlgebra, SuperAlgebraHom, SuperPolynomial, _transport,
                           certify_local, check_hom, preimage, residue, zero_algebra)


class SuperSpace:
    def __init__(self, base: FiniteSpace, sections: Mapping, restrictions: Mapping = (), name: str = ""):
        self.base = base
        self.name = name
        secs = {frozenset(U): A for U, A in dict(sections).items()}
        fields = {A.field for A in secs.values()}
        if len(fields) > 1:
            raise ValueError(f"sections over mixed fields {sorted(map(str, fields))}")
        self.field = fields.pop() if fields else zero_algebra().field
        for U in secs:
            base.require_open(U)
        if frozenset() not in secs:
            secs[frozenset()] = zero_algebra(self.field)
        missing = [B for B in base.basic_opens() if B not in secs]
        if missing:
            raise ValueError(f"no section algebra declared on minimal opens {[show_open(B) for B in missing]}")
        self.sections = dict(sorted(secs.items(), key=lambda kv: open_key(kv[0])))
        given = {}
        for (V, U), h in dict(restrictions).items():
            V, U = frozenset(V), frozenset(U)
            if not V <= U:
                raise ValueError(f"restriction {show_open(U)} -> {show_open(V)} is not an inclusion")
            if V not in self.sections or U not in self.sections:
                raise ValueError(f"restriction {show_open(U)} -> {show_open(V)} between undeclared opens")
            if not isinstance(h, SuperAlgebraHom):
                h = SuperAlgebraHom(self.sections[U], self.sections[V], h)
            given[(V, U)] = h
        self.given = given
        self.res = self._complete_restrictions(given)
        self._restricted = {}

    def _complete_restrictions(self, given):
        table = dict(given)
        opens = list(self.sections)
        for U in opens:
            table.setdefault((U, U), SuperAlgebraHom.identity(self.sections[U]))
            if U:
                empty = self.sections[frozenset()]
                table.setdefault((frozenset(), U), SuperAlgebraHom(
                    self.sections[U], empty, {g: empty.zero for g in self.sections[U].generators}))
        pairs = sorted(((V, U) for U in opens for V in opens if V < U),
                       key=lambda vu: (len(vu[1]) - len(vu[0]), open_key(vu[1]), open_key(vu[0])))
        changed = True
        while changed:
            changed = False
            for V, U in pairs:
                if (V, U) in table:
                    continue
                for W in opens:
                    if V < W < U and (V, W) in table and (W, U) in table:
                        table[(V, U)] = table[(W, U)].then(table[(V, W)])
                        changed = True
                        break
        absent = [(V, U) for V, U in pairs if (V, U) not in table]
        if absent:
            V, U = absent[0]
            raise ValueError(f"missing restriction {show_open(U)} -> {show_open(V)}")
        return table

    # --- basic queries
    @property
    def points(self):
        return self.base.points

    def declared_opens(self):
        return list(self.sections)

    def stalk_open(self, p):
        return self.base.minimal_open(p)

    def stalk(self, p) -> SuperAlgebra:
        return self.sections[self.base.minimal_open(p)]

    def restriction(self, V, U) -> SuperAlgebraHom:
        return self.res[(frozenset(V), frozenset(U))]

    @classmethod
    def affine(cls, algebra: SuperAlgebra, point="p", name=""):
        """One-point space carrying a single algebra."""
        base = FiniteSpace.make([point], [[], [point]])
        return cls(base, {frozenset([point]): algebra}, name=name)

    @classmethod
    def empty(cls, field=None, name="empty"):
        from .field import QQ
        return cls(FiniteSpace.make([], [[]]), {frozenset(): zero_algebra(field or QQ)}, name=name)

    def __repr__(self):
        return f"SuperSpace({self.name or '?'}: {len(self.points)} points, {len(self.sections)} declared opens)"


# --- checking --------------------------------------------------------------

def check_superspace(X: SuperSpace, strict_local: bool = False, degree=None) -> Report:
    rep = Report(f"superspace {X.name}")
    rep.extend(check_space(X.base))
    if not X.sections[frozenset()].is_zero_algebra():
        rep.add("EmptyOpenNotZero", "the algebra on the empty open must be the zero algebra")
    for (V, U), h in sorted(X.res.items(), key=lambda kv: (open_key(kv[0][1]), open_key(kv[0][0]))):
        sub = check_hom(h)
        for f in sub.findings:
            rep.findings.append(f)
            f.message = f"restriction {show_open(U)} -> {show_open(V)}: {f.message}"
    opens = X.declared_opens()
    for U in opens:
        for V in opens:
            if not V <= U:
                continue
            for W in opens:
                if not W <= V:
                    continue
                direct = X.res[(W, U)]
                composite = X.res[(V, U)].then(X.res[(W, V)])
                g = direct.differing_generator(composite)
                if g is not None:
                    rep.add("FunctorialityViolation",
                            f"{show_open(U)} -> {show_open(W)} differs from the path through {show_open(V)} "
                            f"on {g}: {direct.images[g]} vs {composite.images[g]}",
                            chain=[U, V, W], generator=g)
    for U in opens:
        if U and U not in X.base.basic_opens():
            _check_equalizer(X, U, rep, degree)
    status = {}
    for p in sorted_points(X.points):
        loc = certify_local(X.stalk(p))
        status[str(p)] = loc.value
        if loc is not Locality.CERTIFIED:
            msg = f"stalk at {p} is not certified local"
            if strict_local:
                rep.add("StalkNotLocal", msg, point=p)
            else:
                rep.warn("StalkNotLocal", msg, point=p)
    rep.details["stalk_locality"] = status
    return rep


def _check_equalizer(X, U, rep, degree=None):
    """Bounded check that O(U) is the equalizer over the minimal opens inside U."""
    A = X.sections[U]
    D = A.degree_cap if degree is None else degree
    cover = sorted({X.stalk_open(p) for p in U}, key=open_key)
    for parity in (0, 1):
        monos = A.standard_monomials(D, parity)
        if not monos:
            continue
        rows = {}
        for k, m in enumerate(monos):
            for B in cover:
                img = X.res[(B, U)](A.mono(m))
                for bm, c in img.terms.items():
                    rows.setdefault((open_key(B), bm), [A.field.zero] * len(monos))[k] = c
        kernel = nullspace(list(rows.values()), len(monos), A.field)
        if kernel:
            elem = SuperPolynomial(A.sig, {m: c for m, c in zip(monos, kernel[0]) if c})
            rep.add("StructureSheafNotSheaf",
                    f"restriction from {show_open(U)} to its minimal opens kills {elem}",
                    open=U, cover=cover, section=str(elem))
            return
    families = compatible_families(X, cover, D)
    for parity in (0, 1):
        for fam in families[parity]:
            target = {}
            for B, poly in fam.items():
                for bm, c in poly.terms.items():
                    target[(open_key(B), bm)] = c
            monos = A.standard_monomials(D, parity)
            cols = []
            for m in monos:
                col = {}
                for B in cover:
                    for bm, c in X.res[(B, U)](A.mono(m)).terms.items():
                        col[(open_key(B), bm)] = c
                cols.append(col)
            if solve(cols, target, A.field) is None:
                rep.inconclusive("StructureSheafNotSheaf",
                                 f"compatible family on {show_open(U)} has no preimage of degree <= {D}",
                                 open=U, family={show_open(B): str(p) for B, p in fam.items()})
                return


def compatible_families(X: SuperSpace, cover, degree):
    """Basis of compatible families ``{member: section}`` with components of degree <= ``degree``.

    Compatibility is tested on the minimal opens inside each pairwise
    intersection, which is equivalent on a finite space.  Returns a dict
    ``parity -> list of families``.
    """
    cover = [frozenset(U) for U in cover]
    out = {0: [], 1: []}
    for parity in (0, 1):
        variables = []
        for i, U in enumerate(cover):
            A = X.sections[U]
            variables += [(i, m) for m in A.standard_monomials(degree, parity)]
        if not variables:
            continue
        col_of = {v: k for k, v in enumerate(variables)}
        rows = {}
        for i, j in itertools.combinations(range(len(cover)), 2):
            Ui, Uj = cover[i], cover[j]
            basics = sorted({X.stalk_open(p) for p in Ui & Uj}, key=open_key)
            for B in basics:
                for idx, U, sign in ((i, Ui, 1), (j, Uj, -1)):
                    A = X.sections[U]
                    h = X.res[(B, U)]
                    for m in A.standard_monomials(degree, parity):
                        for bm, c in h(A.mono(m)).terms.items():
                            key = (i, j, open_key(B), bm)
                            row = rows.setdefault(key, {})
                            row[col_of[(idx, m)]] = row.get(col_of[(idx, m)], 0) + sign * c
        F = X.field
        dense = []
        for row in rows.values():
            r = [F.zero] * len(variables)
            for k, c in row.items():
                r[k] = F.norm(F(c))
            dense.append(r)
        for vec in nullspace(dense, len(variables), F):
            fam = {}
            for (i, m), c in zip(variables, vec):
                if c:
                    A = X.sections[cover[i]]
                    fam[cover[i]] = fam.get(cover[i], A.zero) + A.mono(m).scale(c)
            out[parity].append(fam)
    return out


@dataclass
class GlobalSections:
    even_dim: int | None
    odd_dim: int | None
    dims_by_degree: list = field(default_factory=list)
    stabilized: bool = False
    stable_from: int | None = None
    algebra: SuperAlgebra | None = None
    basis: dict = field(default_factory=dict)

    @property
    def superdimension(self) -> str:
        if self.algebra is not None:
            return "algebra"
        return f"{self.even_dim}|{self.odd_dim}"


def global_sections(X: SuperSpace, cover=None, degree_cap=None) -> GlobalSections:
    """Equalizer of the structure sheaf over ``cover``, degree by degree.

    When the whole space is a member of the cover its algebra is returned
    directly.  Otherwise the super-dimension of the bounded solution space
    is reported per degree, with ``stabilized`` telling whether the last two
    degrees agree.
    """
    if cover is None:
        cover = X.base.basic_opens()
    cover = [frozenset(U) for U in cover]
    covered = frozenset().union(*cover) if cover else frozenset()
    if covered != X.points:
        raise ValueError(f"cover misses points {sorted_points(X.points - covered)}")
    for U in cover:
        if U not in X.sections:
            raise NotOpen(f"cover member {show_open(U)} has no declared algebra", open=U)
    if X.points in cover:
        return GlobalSections(None, None, algebra=X.sections[X.points], stabilized=True, stable_from=0)
    D = degree_cap if degree_cap is not None else max(X.sections[U].degree_cap for U in cover)
    dims = []
    fams = None
    for d in range(D + 1):
        fams = compatible_families(X, cover, d)
        dims.append((len(fams[0]), len(fams[1])))
    stable_from = D
    while stable_from > 0 and dims[stable_from - 1] == dims[D]:
        stable_from -= 1
    stabilized = D > 0 and dims[D - 1] == dims[D]
    return GlobalSections(dims[D][0], dims[D][1], dims, stabilized, stable_from, None, fams)


# --- morphisms ---------------------------------------------------------------

class SpaceMorphism:
    """``f: source -> target`` with stalk maps ``O_target(U_f(p)) -> O_source(U_p)``."""

    def __init__(self, source: SuperSpace, target: SuperSpace, point_map: Mapping, stalks: Mapping, name=""):
        self.source, self.target, self.name = source, target, name
        self.cmap = ContinuousMap(source.base, target.base, dict(point_map))
        built = {}
        for p in source.points:
            if p not in stalks:
                raise ValueError(f"no stalk map at point {p!r}")
            h = stalks[p]
            if not isinstance(h, SuperAlgebraHom):
                h = SuperAlgebraHom(target.stalk(self.cmap(p)), source.stalk(p), h)
            built[p] = h
        self.stalks = built

    @classmethod
    def identity(cls, X: SuperSpace):
        return cls(X, X, {p: p for p in X.points},
                   {p: SuperAlgebraHom.identity(X.stalk(p)) for p in X.points}, name="id")

    def __call__(self, p):
        return self.cmap(p)

    def image(self, S=None):
        return self.cmap.image(S)

    def preimage(self, U):
        return self.cmap.preimage(U)

    def then(self, other: "SpaceMorphism") -> "SpaceMorphism":
        """``other`` after ``self``."""
        if other.source is not self.target:
            raise ValueError("cannot compose: target and source differ")
        return SpaceMorphism(self.source, other.target,
                             {p: other(self(p)) for p in self.source.points},
                             {p: other.stalks[self(p)].then(self.stalks[p]) for p in self.source.points})

    def restrict_to(self, V):
        """Precompose with the open embedding of ``source`` restricted to ``V``."""
        XV, j = restrict(self.source, V)
        return j.then(self)

    def corestrict(self, V):
        """Same morphism viewed as landing in ``target`` restricted to the open ``V``."""
        V = frozenset(V)
        if not self.image() <= V:
            raise ValueError(f"image is not contained in {show_open(V)}")
        YV, _ = restrict(self.target, V)
        return SpaceMorphism(self.source, YV, self.cmap.mapping, self.stalks, self.name)

    def __repr__(self):
        pm = ", ".join(f"{p}->{self(p)}" for p in sorted_points(self.source.points))
        return f"SpaceMorphism({self.source.name or '?'} -> {self.target.name or '?'}: {pm})"


def morphism_difference(f: SpaceMorphism, g: SpaceMorphism):
    """None if equal, else a witness dict."""
    if f.source is not g.source or f.target is not g.target:
        same_points = f.source.points == g.source.points and f.target.points == g.target.points
        if not same_points:
            return {"reason": "different source or target"}
    for p in sorted_points(f.source.points):
        if f(p) != g(p):
            return {"point": p, "reason": f"point images {f(p)} vs {g(p)}"}
        hf, hg = f.stalks[p], g.stalks[p]
        for gen in hf.source.generators:
            if not hf.target.equal(hf.images[gen], hg.images[gen]):
                return {"point": p, "generator": gen,
                        "reason": f"{gen} -> {hf.images[gen]} vs {hg.images[gen]}"}
    return None


def morphisms_equal(f, g) -> bool:
    return morphism_difference(f, g) is None


def check_morphism(f: SpaceMorphism) -> Report:
    rep = Report(f"morphism {f.name}")
    rep.extend(check_continuous(f.cmap))
    if rep.errors:
        return rep
    for p in sorted_points(f.source.points):
        h = f.stalks[p]
        if h.source is not f.target.stalk(f(p)) or h.target is not f.source.stalk(p):
            rep.add("StalkMismatch", f"stalk map at {p} has wrong source or target", point=p)
            continue
        for fd in check_hom(h).findings:
            rep.findings.append(fd)
            fd.message = f"stalk map at {p}: {fd.message}"
    if rep.errors:
        return rep
    X, Y = f.source, f.target
    for p in sorted_points(X.points):
        for q in sorted_points(X.points):
            Up, Uq = X.stalk_open(p), X.stalk_open(q)
            if p == q or not Up <= Uq:
                continue
            left = f.stalks[q].then(X.res[(Up, Uq)])
            right = Y.res[(Y.stalk_open(f(p)), Y.stalk_open(f(q)))].then(f.stalks[p])
            g = left.differing_generator(right)
            if g is not None:
                rep.add("NaturalityViolation", f"square for {q} -> {p} fails on {g}", points=[q, p], generator=g)
    for p in sorted_points(X.points):
        A, B = Y.stalk(f(p)), X.stalk(p)
        if certify_local(A) is Locality.CERTIFIED and certify_local(B) is Locality.CERTIFIED:
            for gen in A.even:
                ra = residue(A, A.gen(gen))
                rb = residue(B, f.stalks[p].images[gen])
                if ra is not None and rb is not None and ra != rb:
                    rep.add("NotLocalMorphism", f"stalk map at {p} does not preserve the residue of {gen}",
                            point=p, generator=gen)
        else:
            rep.warn("LocalityUnchecked", f"stalk map at {p} joins stalks not certified local", point=p)
    return rep


# --- open subspaces and embeddings -------------------------------------------

def restrict(X: SuperSpace, U):
    """``(X_U, j)`` with ``j: X_U -> X`` the canonical open embedding."""
    U = X.base.require_open(U)
    if U in X._restricted:
        return X._restricted[U]
    if U == X.points:
        out = (X, SpaceMorphism.identity(X))
    else:
        base = X.base.subspace(U)
        secs = {V: A for V, A in X.sections.items() if V <= U}
        given = {(V, W): h for (V, W), h in X.res.items() if W <= U and V != W}
        XU = SuperSpace(base, secs, given, name=f"{X.name}|{show_open(U)}")
        j = SpaceMorphism(XU, X, {p: p for p in U}, {p: SuperAlgebraHom.identity(X.stalk(p)) for p in U},
                          name=f"j_{show_open(U)}")
        out = (XU, j)
    X._restricted[U] = out
    return out


@dataclass
class EmbeddingResult:
    ok: bool
    reason: str = ""
    image: frozenset = frozenset()
    ideal: dict | None = None

    def __bool__(self):
        return self.ok


def is_open_embedding(f: SpaceMorphism, max_degree=4) -> EmbeddingResult:
    top = is_open_embedding_top(f.cmap)
    if not top:
        return EmbeddingResult(False, top.reason)
    for p in sorted_points(f.source.points):
        if f.stalks[p].inverse(max_degree) is None:
            return EmbeddingResult(False, f"f* not iso at {p} (no inverse of degree <= {max_degree})", top.image)
    return EmbeddingResult(True, image=top.image)


def invert(f: SpaceMorphism) -> SpaceMorphism:
    """Inverse of an isomorphism (bijective open embedding)."""
    r = is_open_embedding(f)
    if not r or r.image != f.target.points:
        raise ValueError(f"not an isomorphism: {r.reason or 'not surjective'}")
    back = {f(p): p for p in f.source.points}
    return SpaceMorphism(f.target, f.source, back, {f(p): f.stalks[p].inverse() for p in f.source.points})


def is_closed_embedding(f: SpaceMorphism, witnesses: Mapping | None = None, max_degree=4) -> EmbeddingResult:
    """Closed-embedding test with caller-supplied preimages.

    ``witnesses[(p, generator)]`` is a claimed preimage, in the target stalk
    at ``f(p)``, of the generator of the source stalk at ``p``.  Missing
    witnesses fall back to a bounded preimage search.
    """
    witnesses = dict(witnesses or {})
    top = is_closed_embedding_top(f.cmap)
    if not top:
        return EmbeddingResult(False, top.reason)
    ideal = {}
    for p in sorted_points(f.source.points):
        h = f.stalks[p]
        sec = {}
        for g in h.target.generators:
            w = witnesses.get((p, g))
            if w is None:
                w = preimage(h, h.target.gen(g), max_degree)
                if w is None:
                    return EmbeddingResult(False, f"WitnessFails at {p}: no preimage of {g}", top.image)
            w = h.source.element(w)
            if not h.target.equal(h(w), h.target.gen(g)):
                return EmbeddingResult(False, f"WitnessFails at {p}: {w} does not map to {g}", top.image)
            sec[g] = w
        gens = []
        A = h.source
        for b in A.generators:
            k = A.gen(b) - _transport(h.images[b], h.target, A, sec)
            if not A.is_zero(k):
                gens.append(A.normal_form(k))
        for r in h.target.relations:
            k = _transport(r, h.target, A, sec)
            if not A.is_zero(k):
                gens.append(A.normal_form(k))
        ideal[f.target.stalk_open(f(p))] = gens
    for B in f.target.base.basic_opens():
        ideal.setdefault(B, [f.target.sections[B].one])
    return EmbeddingResult(True, image=top.image, ideal=ideal)


def is_embedding(f: SpaceMorphism, hull=None, witnesses=None) -> EmbeddingResult:
    """Closed embedding into an open subspace, followed by its open embedding."""
    hull = f.target.base.interior_hull(f.image()) if hull is None else f.target.base.require_open(hull)
    if not f.image() <= hull:
        return EmbeddingResult(False, f"image is not inside {show_open(hull)}")
    h = f.corestrict(hull)
    r = is_closed_embedding(h, witnesses)
    if not r:
        return EmbeddingResult(False, f"closed part fails: {r.reason}")
    return EmbeddingResult(True, image=r.image, ideal=r.ideal)


# --- fibered products and gluing of morphisms ---------------------------------

@dataclass
class FiberedProduct:
    space: SuperSpace
    pr1: SpaceMorphism
    pr2: SpaceMorphism
    cones: Report | None = None


def fibered_product_open(i: SpaceMorphism, f: SpaceMorphism, cones=()) -> FiberedProduct:
    """``U x_X Y`` for an open embedding ``i: U -> X`` and any ``f: Y -> X``.

    The product is ``Y`` restricted to the preimage of the image of ``i``;
    ``cones`` are optional ``(T, a: T -> U, b: T -> Y)`` test data for the
    universal property.
    """
    if i.target is not f.target:
        raise ValueError("fibered product over different bases")
    r = is_open_embedding(i)
    if not r:
        raise NotOpenEmbedding(f"first map is not an open embedding: {r.reason}")
    W = f.preimage(r.image)
    Z, pr2 = restrict(f.source, W)
    back = {i(u): u for u in i.source.points}
    pr1 = SpaceMorphism(Z, i.source, {q: back[f(q)] for q in W},
                        {q: i.stalks[back[f(q)]].inverse().then(f.stalks[q]) for q in W}, name="pr1")
    out = FiberedProduct(Z, pr1, pr2)
    if cones:
        rep = Report("fibered product universal property", evidence="witness-based")
        for n, (T, a, b) in enumerate(cones):
            d = morphism_difference(a.then(i), b.then(f))
            if d is not None:
                rep.add("NotACone", f"test cone {n} does not commute", cone=n, **d)
                continue
            k = SpaceMorphism(T, Z, b.cmap.mapping, b.stalks)
            for label, lhs, rhs in (("pr1", k.then(pr1), a), ("pr2", k.then(pr2), b)):
                d = morphism_difference(lhs, rhs)
                if d is not None:
                    rep.add("NoFactorization", f"cone {n} does not factor through {label}", cone=n, **d)
        out.cones = rep
    return out


def glue_morphisms(cover, parts) -> SpaceMorphism:
    """Glue ``parts[k]: T_k -> X`` along open embeddings ``cover[k]: T_k -> T``."""
    if len(cover) != len(parts) or not cover:
        raise ValueError("need one part per cover member")
    T = cover[0].target
    X = parts[0].target
    images = []
    for k, (e, t) in enumerate(zip(cover, parts)):
        if e.target is not T or t.target is not X or t.source is not e.source:
            raise ValueError(f"cover member {k} does not match its part")
        r = is_open_embedding(e)
        if not r:
            raise NotOpenEmbedding(f"cover member {k}: {r.reason}")
        images.append(r.image)
    if frozenset().union(*images) != T.points:
        raise ValueError(f"cover misses {sorted_points(T.points - frozenset().union(*images))}")
    if len(cover) == 1 and images[0] == T.points and cover[0].source is T:
        return parts[0]
    for k, l in itertools.combinations(range(len(cover)), 2):
        fp = fibered_product_open(cover[k], cover[l])
        d = morphism_difference(fp.pr1.then(parts[k]), fp.pr2.then(parts[l]))
        if d is not None:
            raise IncompatibleOnOverlap(f"parts {k} and {l} disagree on their overlap: {d['reason']}",
                                        i=k, j=l, **d)
    point_map, stalks = {}, {}
    for p in sorted_points(T.points):
        k = next(k for k, img in enumerate(images) if p in img)
        q = next(q for q in cover[k].source.points if cover[k](q) == p)
        point_map[p] = parts[k](q)
        stalks[p] = parts[k].stalks[q].then(cover[k].stalks[q].inverse())
    t = SpaceMorphism(T, X, point_map, stalks, name="glued")
    for k, e in enumerate(cover):
        d = morphism_difference(e.then(t), parts[k])
        if d is not None:
            raise IncompatibleOnOverlap(f"glued morphism does not restrict to part {k}", i=k, j=k, **d)
    return t


# --- isomorphism search ------------------------------------------------------

def _homeomorphisms(X: FiniteSpace, Y: FiniteSpace):
    if len(X.points) != len(Y.points) or len(X.opens) != len(Y.opens):
        return
    xs = sorted_points(X.points)
    size_x = {p: len(X.minimal_open(p)) for p in xs}
    size_y = {q: len(Y.minimal_open(q)) for q in Y.points}
    ys = sorted_points(Y.points)

    def rec(k, used, acc):
        if k == len(xs):
            m = ContinuousMap(X, Y, dict(acc))
            if {m.image(U) for U in X.opens} == set(Y.opens):
                yield dict(acc)
            return
        p = xs[k]
        for q in ys:
            if q in used or size_y[q] != size_x[p]:
                continue
            acc[p] = q
            yield from rec(k + 1, used | {q}, acc)
            del acc[p]

    yield from rec(0, frozenset(), {})


def _algebra_isos(A: SuperAlgebra, B: SuperAlgebra):
    """Candidate isomorphisms ``A -> B`` by signed generator matching."""
    if A is B:
        yield SuperAlgebraHom.identity(A)
    if len(A.even) != len(B.even) or len(A.odd) != len(B.odd) or A.field != B.field:
        return
    seen = set()
    perms_e = list(itertools.permutations(B.even))
    perms_o = list(itertools.permutations(B.odd))
    name_e = tuple(A.even) if set(A.even) == set(B.even) else None
    name_o = tuple(A.odd) if set(A.odd) == set(B.odd) else None
    if name_e is not None:
        perms_e.sort(key=lambda p: p != name_e)
    if name_o is not None:
        perms_o.sort(key=lambda p: p != name_o)
    for pe in perms_e:
        for po in perms_o:
            for signs in itertools.product((1, -1), repeat=len(A.generators)):
                targets = list(pe) + list(po)
                imgs = {g: B.gen(t).scale(s) for g, t, s in zip(A.generators, targets, signs)}
                key = tuple(str(imgs[g]) for g in A.generators)
                if key in seen:
                    continue
                seen.add(key)
                h = SuperAlgebraHom(A, B, imgs)
                if check_hom(h).ok and h.inverse() is not None:
                    yield h


def find_isomorphism(X: SuperSpace, Y: SuperSpace, limit=20000):
    """Search for an isomorphism ``X -> Y`` by point bijection and generator matching."""
    for pm in _homeomorphisms(X.base, Y.base):
        order = sorted(X.points, key=lambda p: (len(X.stalk_open(p)), str(p)))
        chosen = {}
        budget = [limit]

        def consistent(p):
            for q in chosen:
                for a, b in ((p, q), (q, p)):
                    Ua, Ub = X.stalk_open(a), X.stalk_open(b)
                    if a != b and Ua <= Ub:
                        left = chosen[b].then(X.res[(Ua, Ub)])
                        right = Y.res[(Y.stalk_open(pm[a]), Y.stalk_open(pm[b]))].then(chosen[a])
                        if left.differing_generator(right) is not None:
                            return False
            return True

        def rec(k):
            if k == len(order):
                return True
            p = order[k]
            for h in _algebra_isos(Y.stalk(pm[p]), X.stalk(p)):
                budget[0] -= 1
                if budget[0] < 0:
                    return False
                chosen[p] = h
                if consistent(p) and rec(k + 1):
                    return True
                del chosen[p]
            return False

        if rec(0):
            return SpaceMorphism(X, Y, pm, dict(chosen), name="iso")
    return None


def is_isomorphic(X, Y) -> bool:
    return find_isomorphism(X, Y) is not None
