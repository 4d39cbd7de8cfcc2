"""Gluing data of superspaces and the glued space."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CocycleViolation, InvalidGluingDatum
from .finitetop import FiniteSpace, check_space, point_key, show_open, sorted_points
from .report import Report
from .superalgebra import SuperAlgebraHom
from .superspace import (SpaceMorphism, SuperSpace, check_morphism, find_isomorphism, glue_morphisms, invert,
                         is_open_embedding, morphism_difference, restrict)


def rebase(m: SpaceMorphism, source: SuperSpace, target: SuperSpace) -> SpaceMorphism:
    """Re-attach a morphism to canonical source/target objects with the same data."""
    if m.source is source and m.target is target:
        return m
    if m.source.points != source.points or m.target.points != target.points:
        raise ValueError(f"morphism {m.name} does not go between the expected subspaces")
    return SpaceMorphism(source, target, m.cmap.mapping, m.stalks, m.name)


class GluingDatum:
    """Patches, overlaps and transitions.

    ``overlaps[(i, j)]`` is the open ``U_ij`` of patch ``i``.
    ``transitions[(i, j)]`` is the isomorphism from ``U_i`` restricted to
    ``U_ij`` onto ``U_j`` restricted to ``U_ji``.  Diagonal entries are
    filled in; a missing ``(j, i)`` is taken to be the inverse of ``(i, j)``.
    """

    def __init__(self, patches, overlaps=None, transitions=None, name=""):
        self.name = name
        self.patches = dict(patches)
        self.order = list(self.patches)
        overlaps = {k: frozenset(v) for k, v in dict(overlaps or {}).items()}
        for i in self.order:
            overlaps.setdefault((i, i), self.patches[i].points)
        for i, j in itertools.product(self.order, repeat=2):
            if (i, j) not in overlaps and (j, i) not in overlaps:
                overlaps[(i, j)] = overlaps[(j, i)] = frozenset()
        for (i, j), U in list(overlaps.items()):
            if (j, i) not in overlaps:
                raise ValueError(f"overlap {i},{j} given without {j},{i}")
        self.overlaps = overlaps
        trans = {}
        for (i, j), m in dict(transitions or {}).items():
            trans[(i, j)] = rebase(m, self.piece(i, j), self.piece(j, i))
        for i in self.order:
            if (i, i) not in trans:
                trans[(i, i)] = SpaceMorphism.identity(self.piece(i, i))
        for (i, j) in list(overlaps):
            if (i, j) not in trans:
                if not overlaps[(i, j)] and not overlaps[(j, i)]:
                    trans[(i, j)] = SpaceMorphism(self.piece(i, j), self.piece(j, i), {}, {})
                    continue
                if (j, i) not in trans:
                    raise ValueError(f"no transition between {i} and {j}")
                trans[(i, j)] = invert(trans[(j, i)])
        self.transitions = trans

    def overlap(self, i, j):
        return self.overlaps.get((i, j), frozenset())

    def piece(self, i, j):
        """Patch ``i`` restricted to ``U_ij``."""
        return restrict(self.patches[i], self.overlap(i, j))[0]

    def pairs(self):
        return [(i, j) for i in self.order for j in self.order]

    def permuted(self, order):
        return GluingDatum({i: self.patches[i] for i in order}, self.overlaps, self.transitions, self.name)


def validate_gluing(D: GluingDatum) -> Report:
    rep = Report(f"gluing datum {D.name}")
    for i in D.order:
        if D.overlap(i, i) != D.patches[i].points:
            rep.add("DiagonalOverlap", f"U_{i}{i} must be all of U_{i}", patch=i)
    for (i, j), U in sorted(D.overlaps.items(), key=lambda kv: (D.order.index(kv[0][0]), D.order.index(kv[0][1]))):
        if not D.patches[i].base.is_open(U):
            rep.add("OverlapNotOpen", f"U_{i}{j} = {show_open(U)} is not open in {i}", i=i, j=j)
    if rep.errors:
        return rep
    for i, j in D.pairs():
        if (i, j) not in D.transitions:
            continue
        m = D.transitions[(i, j)]
        sub = check_morphism(m)
        for f in sub.errors:
            rep.add(f.code, f"transition {i}->{j}: {f.message}", **f.witness)
        r = is_open_embedding(m)
        if not r or r.image != D.overlap(j, i):
            rep.add("NotIsomorphism", f"transition {i}->{j} is not an isomorphism onto U_{j}{i}: "
                    f"{r.reason or 'image ' + show_open(r.image)}", i=i, j=j)
    if rep.errors:
        return rep
    for i in D.order:
        d = morphism_difference(D.transitions[(i, i)], SpaceMorphism.identity(D.piece(i, i)))
        if d is not None:
            rep.add("CocycleViolation", f"transition {i}->{i} is not the identity: {d['reason']}",
                    i=i, j=i, k=i, **d)
    for i, j, k in itertools.product(D.order, repeat=3):
        if (i, j) not in D.transitions or (i, k) not in D.transitions or (j, k) not in D.transitions:
            continue
        W = D.overlap(i, j) & D.overlap(i, k)
        a, b, c = D.transitions[(i, j)], D.transitions[(j, k)], D.transitions[(i, k)]
        for p in sorted_points(W):
            q = a(p)
            if q not in D.overlap(j, k):
                rep.add("CocycleViolation", f"{i}->{j} sends {p} outside U_{j}{k}", i=i, j=j, k=k, point=p)
                break
            if b(q) != c(p):
                rep.add("CocycleViolation", f"points disagree at {p}: {b(q)} vs {c(p)}", i=i, j=j, k=k, point=p)
                break
            composite = b.stalks[q].then(a.stalks[p])
            g = composite.differing_generator(c.stalks[p])
            if g is not None:
                rep.add("CocycleViolation",
                        f"phi_{k}{i} != phi_{k}{j} o phi_{j}{i} at {p} on {g}: "
                        f"{c.stalks[p].images[g]} vs {composite.images[g]}",
                        i=i, j=j, k=k, point=p, generator=g)
                break
    return rep


@dataclass
class Glued:
    space: SuperSpace
    embeddings: dict
    report: Report
    classes: dict = field(default_factory=dict)


def glue(D: GluingDatum, alternative: SuperSpace | None = None, name: str = "") -> Glued:
    rep = validate_gluing(D)
    if rep.errors:
        codes = rep.codes()
        exc = CocycleViolation if "CocycleViolation" in codes else InvalidGluingDatum
        raise exc(f"invalid gluing datum: {rep.errors[0].message}", report=rep)
    index = {i: n for n, i in enumerate(D.order)}

    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def rank(node):
        return (index[node[0]], point_key(node[1]))

    for i in D.order:
        for p in D.patches[i].points:
            find((i, p))
    for (i, j), m in D.transitions.items():
        for p in D.overlap(i, j):
            a, b = find((i, p)), find((j, m(p)))
            if a != b:
                lo, hi = sorted((a, b), key=rank)
                parent[hi] = lo
    label = {}
    for node in sorted(parent, key=rank):
        r = find(node)
        label[node] = f"{r[0]}:{r[1]}"
    points = sorted(set(label.values()))
    basis = []
    for i in D.order:
        for V in D.patches[i].base.opens:
            basis.append(frozenset(label[(i, p)] for p in V))
    base = FiniteSpace.from_basis(points, basis)
    reps = {}
    for node in sorted(parent, key=rank):
        reps.setdefault(label[node], node)
    sections, restrictions = {}, {}
    basic = {}
    for c, (i, p) in reps.items():
        U = D.patches[i]
        B = frozenset(label[(i, q)] for q in U.stalk_open(p))
        basic[c] = B
        sections[B] = U.stalk(p)
    for c, (i, p) in reps.items():
        U = D.patches[i]
        for q in U.stalk_open(p):
            d = label[(i, q)]
            if d == c or (basic[d], basic[c]) in restrictions:
                continue
            j, q2 = reps[d]
            h = U.res[(U.stalk_open(q), U.stalk_open(p))]
            if (j, q2) != (i, q):
                h = h.then(D.transitions[(j, i)].stalks[q2])
            restrictions[(basic[d], basic[c])] = h
    X = SuperSpace(base, sections, restrictions, name=name or D.name or "glued")
    if set(base.basic_opens()) != set(basic.values()):
        raise ValueError("glued minimal opens do not match the patch minimal opens")
    embeddings = {}
    for i in D.order:
        U = D.patches[i]
        stalks = {}
        for p in U.points:
            c = label[(i, p)]
            j, q = reps[c]
            stalks[p] = SuperAlgebraHom.identity(U.stalk(p)) if (j, q) == (i, p) else D.transitions[(i, j)].stalks[p]
        embeddings[i] = SpaceMorphism(U, X, {p: label[(i, p)] for p in U.points}, stalks, name=f"phi_{i}")
    out = Glued(X, embeddings, Report(f"glued space {X.name}"), {c: reps[c] for c in points})
    _verify_glued(D, out, alternative)
    return out


def _verify_glued(D, G: Glued, alternative):
    rep = G.report
    X = G.space
    rep.extend(check_space(X.base))
    images = {}
    for i, e in G.embeddings.items():
        r = is_open_embedding(e)
        if not r:
            rep.add("NotOpenEmbedding", f"phi_{i}: {r.reason}", patch=i)
        images[i] = r.image
    if rep.errors:
        return
    if frozenset().union(*images.values()) != X.points:
        rep.add("NotCovering", "patch images do not cover the glued space")
    for i, j in D.pairs():
        if (i, j) not in D.transitions:
            continue
        lhs = G.embeddings[i].restrict_to(D.overlap(i, j))
        rhs = D.transitions[(i, j)].then(G.embeddings[j].restrict_to(D.overlap(j, i)))
        d = morphism_difference(lhs, rhs)
        if d is not None:
            rep.add("EmbeddingMismatch", f"phi_{i} != phi_{j} o phi_{j}{i} on U_{i}{j}", i=i, j=j, **d)
        a = G.embeddings[i].image(D.overlap(i, j))
        b = G.embeddings[j].image(D.overlap(j, i))
        if not a == b == images[i] & images[j]:
            rep.add("OverlapMismatch", f"images of U_{i}{j} and U_{j}{i} differ from the intersection", i=i, j=j)
    for i in D.order:
        try:
            invert(G.embeddings[i].corestrict(images[i]))
        except ValueError as exc:
            rep.add("RestrictionNotPatch", f"X restricted to the image of {i} is not isomorphic to it: {exc}",
                    patch=i)
    if alternative is not None:
        iso = find_isomorphism(X, alternative)
        rep.details["alternative_isomorphic"] = iso is not None
        if iso is None:
            rep.add("NotUnique", "no isomorphism to the supplied alternative found")
    if rep.errors:
        raise ValueError(f"glued space failed verification: {rep.errors[0].message}")


def chart_isomorphism(a: Glued, b: Glued) -> SpaceMorphism:
    """Isomorphism between two gluings of the same patches, assembled chart by chart."""
    names = list(a.embeddings)
    cover = [a.embeddings[i] for i in names]
    parts = [b.embeddings[i] for i in names]
    m = glue_morphisms(cover, parts)
    invert(m)
    return m
