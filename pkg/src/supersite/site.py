"""Finite sites: registries of objects and arrows, coverings, topology axioms.

A :class:`SiteRegistry` is a small category given by explicit tables.
Arrows are named; composites are looked up in a table (identities are
implicit).  Fibered products are taken from declared pullback squares, or
are trivial when one leg is an identity.

Families of arrows are stored as frozensets of arrow names, so repeated
members collapse.  This matches the open-set sites, where ``U_i x_U V`` and
``U_j x_U V`` may coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .errors import TargetMismatch, UnknownObject
from .finitetop import FiniteSpace, open_key, show_open
from .report import Report

MAX_FAMILY_MEMBERS = 12


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Covering:
    target: str
    members: frozenset

    @classmethod
    def of(cls, target, members: Iterable[str]):
        return cls(target, frozenset(members))

    def sorted_members(self):
        return sorted(self.members)

    def __str__(self):
        return f"{self.target} <= {{{', '.join(self.sorted_members())}}}"


class SiteRegistry:
    """Finite category.  ``composites[(g, f)]`` names ``g o f`` (``f`` first)."""

    def __init__(self, objects, arrows=(), composites=None, pullbacks=None, name="", meta=None):
        self.name = name
        self.objects = list(dict.fromkeys(objects))
        self.arrows: dict[str, Arrow] = {}
        for o in self.objects:
            self.arrows[self.identity(o)] = Arrow(self.identity(o), o, o)
        for a in arrows:
            if not isinstance(a, Arrow):
                a = Arrow(*a)
            for end in (a.source, a.target):
                if end not in self.objects:
                    raise UnknownObject(f"arrow {a.name} mentions unknown object {end}", object=end)
            self.arrows[a.name] = a
        self.composites = dict(composites or {})
        # pullbacks[(f, g)] = (P, p1, p2) with p1: P -> dom f, p2: P -> dom g
        self.pullbacks = dict(pullbacks or {})
        self.meta = dict(meta or {})

    @staticmethod
    def identity(obj) -> str:
        return f"id:{obj}"

    def is_identity(self, f) -> bool:
        a = self.arrows[f]
        return f == self.identity(a.source)

    def require(self, obj):
        if obj not in self.objects:
            raise UnknownObject(f"{obj!r} is not an object of {self.name or 'the site'}", object=obj)
        return obj

    def arrows_into(self, U):
        return sorted(n for n, a in self.arrows.items() if a.target == U)

    def arrows_between(self, V, U):
        return sorted(n for n, a in self.arrows.items() if a.source == V and a.target == U)

    def compose(self, g, f):
        """``g o f`` or None when the composite is not declared."""
        if self.arrows[f].target != self.arrows[g].source:
            raise ValueError(f"{g} o {f}: not composable")
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        return self.composites.get((g, f))

    def inverse(self, f):
        a = self.arrows[f]
        for g in self.arrows_between(a.target, a.source):
            if self.compose(g, f) == self.identity(a.source) and self.compose(f, g) == self.identity(a.target):
                return g
        return None

    def is_iso(self, f) -> bool:
        return self.inverse(f) is not None

    def pullback(self, f, g):
        """``(P, p1, p2)`` for ``f: A -> U``, ``g: V -> U``, or None if unknown."""
        if (f, g) in self.pullbacks:
            return self.pullbacks[(f, g)]
        if (g, f) in self.pullbacks:
            P, q1, q2 = self.pullbacks[(g, f)]
            return P, q2, q1
        a, b = self.arrows[f], self.arrows[g]
        if self.is_identity(f):
            return b.source, g, self.identity(b.source)
        if self.is_identity(g):
            return a.source, self.identity(a.source), f
        return None

    def check(self) -> Report:
        """Composites land where they should and are associative where declared."""
        rep = Report(f"registry {self.name}")
        for (g, f), h in self.composites.items():
            for n in (g, f, h):
                if n not in self.arrows:
                    rep.add("UnknownArrow", f"composite table mentions {n}", arrow=n)
            if rep.errors:
                continue
            A, G, H = self.arrows[f], self.arrows[g], self.arrows[h]
            if A.target != G.source or H.source != A.source or H.target != G.target:
                rep.add("BadComposite", f"{g} o {f} = {h} has the wrong type", pair=[g, f])
        if rep.errors:
            return rep
        for f, g, h in itertools.product(self.arrows, repeat=3):
            if self.arrows[f].target != self.arrows[g].source or self.arrows[g].target != self.arrows[h].source:
                continue
            gf, hg = self.compose(g, f), self.compose(h, g)
            if gf is None or hg is None:
                continue
            left, right = self.compose(h, gf), self.compose(hg, f)
            if left is not None and right is not None and left != right:
                rep.add("NotAssociative", f"({h} o {g}) o {f} != {h} o ({g} o {f})", arrows=[h, g, f])
        return rep


class Topology:
    """Assignment ``object -> set of coverings``."""

    def __init__(self, registry: SiteRegistry, coverings: dict | None = None, name=""):
        self.registry = registry
        self.name = name
        self.cov: dict[str, set] = {U: set() for U in registry.objects}
        for U, fams in dict(coverings or {}).items():
            registry.require(U)
            for fam in fams:
                self.add(fam if isinstance(fam, Covering) else Covering.of(U, fam))

    def add(self, c: Covering):
        for m in c.members:
            if self.registry.arrows[m].target != c.target:
                raise TargetMismatch(f"{m} does not land in {c.target}", member=m, target=c.target)
        self.cov[c.target].add(c)

    def coverings(self, U=None):
        if U is None:
            return [c for V in self.registry.objects for c in self.sorted(V)]
        return self.sorted(U)

    def sorted(self, U):
        return sorted(self.cov[U], key=lambda c: (len(c.members), c.sorted_members()))

    def __contains__(self, c: Covering):
        return c in self.cov.get(c.target, ())

    def without(self, c: Covering, name="") -> "Topology":
        T = Topology(self.registry, name=name or self.name)
        for V, fams in self.cov.items():
            T.cov[V] = {d for d in fams if d != c}
        return T

    def copy(self, name="") -> "Topology":
        T = Topology(self.registry, name=name or self.name)
        T.cov = {V: set(fams) for V, fams in self.cov.items()}
        return T

    def size(self):
        return sum(len(v) for v in self.cov.values())


# --- constructions -------------------------------------------------------------

def open_site(X: FiniteSpace, name="") -> SiteRegistry:
    """Category of opens of ``X`` and inclusions, with intersections as pullbacks."""
    opens = X.sorted_opens()
    label = {U: show_open(U) for U in opens}
    arrows, composites, pullbacks = [], {}, {}

    def inc(V, U):
        return SiteRegistry.identity(label[U]) if V == U else f"{label[V]}->{label[U]}"

    for U in opens:
        for V in opens:
            if V < U:
                arrows.append(Arrow(inc(V, U), label[V], label[U]))
    for W, V, U in itertools.product(opens, repeat=3):
        if W < V < U:
            composites[(inc(V, U), inc(W, V))] = inc(W, U)
    for U in opens:
        for A, B in itertools.product([V for V in opens if V <= U], repeat=2):
            P = A & B
            pullbacks[(inc(A, U), inc(B, U))] = (label[P], inc(P, A), inc(P, B))
    meta = {"space": X, "open_of": {label[U]: U for U in opens}, "label": label}
    return SiteRegistry([label[U] for U in opens], arrows, composites, pullbacks, name=name, meta=meta)


def _families(arrows, limit=MAX_FAMILY_MEMBERS):
    arrows = list(arrows)
    if len(arrows) > limit:
        raise ValueError(f"{len(arrows)} arrows into one object; families are enumerated only up to {limit}")
    for r in range(len(arrows) + 1):
        yield from itertools.combinations(arrows, r)


def union_topology(R: SiteRegistry, name="open covers") -> Topology:
    """All families of inclusions whose union is the target (open-set sites only)."""
    open_of = R.meta["open_of"]
    T = Topology(R, name=name)
    for U in R.objects:
        for fam in _families(R.arrows_into(U)):
            covered = frozenset().union(*(open_of[R.arrows[m].source] for m in fam)) if fam else frozenset()
            if covered == open_of[U]:
                T.add(Covering.of(U, fam))
    return T


def iso_topology(R: SiteRegistry, name="isomorphisms") -> Topology:
    """Only singleton families of isomorphisms."""
    T = Topology(R, name=name)
    for U in R.objects:
        for f in R.arrows_into(U):
            if R.is_iso(f):
                T.add(Covering.of(U, [f]))
    return T


def split_topology(R: SiteRegistry, name="split") -> Topology:
    """Families containing an isomorphism: the coarse coverings."""
    T = Topology(R, name=name)
    for U in R.objects:
        for fam in _families(R.arrows_into(U)):
            if any(R.is_iso(f) for f in fam):
                T.add(Covering.of(U, fam))
    return T


# --- axioms ----------------------------------------------------------------------

def _violation(rep, axiom, message, **witness):
    rep.add("AxiomViolation", f"axiom ({axiom}): {message}", axiom=axiom, **witness)


def check_topology(T: Topology, axioms=(1, 2, 3), max_composites=200000) -> Report:
    """Check the three coverage axioms; each finding carries ``axiom`` in its witness."""
    R = T.registry
    rep = Report(f"topology {T.name}")
    rep.extend(R.check())
    if rep.errors:
        return rep
    if 1 in axioms:
        for U in R.objects:
            for f in R.arrows_into(U):
                if R.is_iso(f) and Covering.of(U, [f]) not in T:
                    _violation(rep, 1, f"isomorphism {f} is not a covering of {U}", target=U, missing=[f])
    if 2 in axioms:
        for c in T.coverings():
            for g in R.arrows_into(c.target):
                V = R.arrows[g].source
                fam, missing = set(), None
                for f in c.sorted_members():
                    pb = R.pullback(f, g)
                    if pb is None:
                        missing = f
                        break
                    fam.add(pb[2])
                if missing is not None:
                    _violation(rep, 2, f"no fibered product of {missing} and {g}", target=c.target,
                               covering=c.sorted_members(), arrow=g, missing_pullback=[missing, g])
                    continue
                if Covering.of(V, fam) not in T:
                    _violation(rep, 2, f"pullback of {c} along {g} is not a covering of {V}",
                               target=c.target, covering=c.sorted_members(), arrow=g, missing=sorted(fam))
    if 3 in axioms:
        for c in T.coverings():
            for fam, choice in _composites(T, c, max_composites, rep):
                if Covering.of(c.target, fam) not in T:
                    _violation(rep, 3, f"composite of {c} with {choice} is not a covering of {c.target}",
                               target=c.target, covering=c.sorted_members(), choice=choice, missing=sorted(fam))
    rep.details["coverings"] = T.size()
    return rep


def _composites(T: Topology, c: Covering, budget, rep):
    """Distinct composite families ``{V_ij -> U_i -> U}`` with one witness choice each."""
    R = T.registry
    states = {frozenset(): {}}
    for f in c.sorted_members():
        Ui = R.arrows[f].source
        nxt = {}
        for fam, choice in states.items():
            for d in T.sorted(Ui):
                comp = set()
                for m in d.members:
                    h = R.compose(f, m)
                    if h is None:
                        rep.inconclusive("CompositeUndeclared", f"{f} o {m} is not declared", pair=[f, m])
                        return []
                    comp.add(h)
                key = fam | comp
                if key not in nxt:
                    nxt[key] = {**choice, f: d.sorted_members()}
                    if len(nxt) > budget:
                        rep.inconclusive("TooManyComposites", f"more than {budget} composites for {c}")
                        return []
        states = nxt
    return sorted(states.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


def violated_axioms(rep: Report):
    return sorted({f.witness["axiom"] for f in rep.errors if f.code == "AxiomViolation"})


def saturate(T: Topology, depth=2) -> Topology:
    """Add composite and pulled-back coverings, repeated ``depth`` times."""
    out = T.copy(name=f"{T.name} (saturated)")
    R = T.registry
    for _ in range(depth):
        before = out.size()
        scratch = Report("saturate")
        for U in R.objects:
            for f in R.arrows_into(U):
                if R.is_iso(f):
                    out.add(Covering.of(U, [f]))
        for c in out.coverings():
            for g in R.arrows_into(c.target):
                pbs = [R.pullback(f, g) for f in c.members]
                if all(pbs):
                    out.add(Covering.of(R.arrows[g].source, {pb[2] for pb in pbs}))
            for fam, _ in _composites(out, c, 200000, scratch):
                out.add(Covering.of(c.target, fam))
        if out.size() == before:
            break
    return out


# --- refinement and subordination ---------------------------------------------

@dataclass
class Refinement:
    ok: bool
    table: dict = field(default_factory=dict)
    unfactored: str | None = None

    def __bool__(self):
        return self.ok


def is_refinement(R: SiteRegistry, V: Covering, U: Covering) -> Refinement:
    """Does every member of ``V`` factor through some member of ``U``?"""
    if V.target != U.target:
        raise TargetMismatch(f"coverings of {V.target} and {U.target}", left=V.target, right=U.target)
    table = {}
    for v in V.sorted_members():
        src = R.arrows[v].source
        found = None
        for u in U.sorted_members():
            for h in R.arrows_between(src, R.arrows[u].source):
                if R.compose(u, h) == v:
                    found = (u, h)
                    break
            if found:
                break
        if found is None:
            return Refinement(False, table, v)
        table[v] = found
    return Refinement(True, table)


@dataclass
class Subordination:
    ok: bool
    witness: Covering | None = None

    def __bool__(self):
        return self.ok


def is_subordinate(T: Topology, T2: Topology) -> Subordination:
    """``T < T2``: every ``T`` covering has a ``T2`` covering refining it."""
    if T.registry is not T2.registry:
        raise ValueError("topologies on different registries")
    for c in T.coverings():
        if not any(is_refinement(T.registry, d, c) for d in T2.sorted(c.target)):
            return Subordination(False, c)
    return Subordination(True)


def are_equivalent(T: Topology, T2: Topology) -> bool:
    return bool(is_subordinate(T, T2)) and bool(is_subordinate(T2, T))


# --- slices ----------------------------------------------------------------------

def slice_site(T: Topology, S: str) -> Topology:
    """Topology on the slice over ``S``; objects are the arrows into ``S``.

    A slice arrow from ``a`` to ``b`` is an arrow ``h`` with ``b o h = a``,
    named ``h/b``.  Coverings are inherited member-wise.
    """
    R = T.registry
    R.require(S)
    objs = R.arrows_into(S)

    def name(h, b):
        return SiteRegistry.identity(b) if R.is_identity(h) else f"{h}/{b}"

    over = {}
    for a, b in itertools.product(objs, repeat=2):
        for h in R.arrows_between(R.arrows[a].source, R.arrows[b].source):
            if not R.is_identity(h) and R.compose(b, h) == a:
                over[name(h, b)] = (h, a, b)
    arrows = [Arrow(n, a, b) for n, (h, a, b) in over.items()]
    composites = {}
    for (x, (h, a, b)), (y, (k, b2, c)) in itertools.product(over.items(), repeat=2):
        if b2 == b:
            kh = R.compose(k, h)
            if kh is not None:
                composites[(y, x)] = name(kh, c)
    pullbacks = {}
    full = dict(over)
    for o in objs:
        full[SiteRegistry.identity(o)] = (R.identity(R.arrows[o].source), o, o)
    for (x, (h, a, c)), (y, (k, b, c2)) in itertools.product(full.items(), repeat=2):
        if c != c2:
            continue
        pb = R.pullback(h, k)
        if pb is None:
            continue
        P, p1, p2 = pb
        to_s = R.compose(a, p1)
        if to_s is not None:
            pullbacks[(x, y)] = (to_s, name(p1, a), name(p2, b))
    SR = SiteRegistry(objs, arrows, composites, pullbacks, name=f"{R.name}/{S}", meta={"over": full, "base": S})
    ST = Topology(SR, name=f"{T.name}/{S}")
    for o in objs:
        for c in T.sorted(R.arrows[o].source):
            if all(R.compose(o, m) is not None for m in c.members):
                ST.add(Covering.of(o, [name(m, o) for m in c.members]))
    return ST


# --- superspace sites --------------------------------------------------------------

def superspace_site(X, name="") -> SiteRegistry:
    """Open subspaces of a superspace with their canonical open embeddings.

    Objects are labelled by their underlying opens; ``meta['space']`` maps a
    label to the restricted superspace and ``meta['embedding']`` to the
    embedding into ``X``.  Pullbacks come from :func:`fibered_product_open`.
    """
    from .superspace import fibered_product_open, restrict

    base = open_site(X.base, name=name or X.name)
    open_of = base.meta["open_of"]
    label = base.meta["label"]
    spaces = {o: restrict(X, U) for o, U in open_of.items()}
    pullbacks = {}
    for (f, g) in base.pullbacks:
        a, b = base.arrows[f], base.arrows[g]
        fp = fibered_product_open(spaces[a.source][1], spaces[b.source][1])
        P = label[fp.pr2.then(spaces[b.source][1]).image()]
        pullbacks[(f, g)] = (P, _inc(label, open_of[P], open_of[a.source]),
                             _inc(label, open_of[P], open_of[b.source]))
    meta = dict(base.meta, superspace=X, spaces={o: s for o, (s, _) in spaces.items()},
                embedding={o: j for o, (_, j) in spaces.items()})
    return SiteRegistry(base.objects, [base.arrows[n] for n in base.arrows if not base.is_identity(n)],
                        base.composites, pullbacks, name=base.name, meta=meta)


def _inc(label, V, U):
    return SiteRegistry.identity(label[U]) if V == U else f"{label[V]}->{label[U]}"


def global_super_topology(X, name="global super topology") -> Topology:
    """Jointly surjective families of open embeddings, for every registered open of ``X``."""
    return union_topology(superspace_site(X), name=name)


def global_super_coverings(X, R: SiteRegistry | None = None):
    """Coverings of ``X`` itself in the global super topology."""
    R = R or superspace_site(X)
    T = union_topology(R)
    return T.sorted(R.meta["label"][X.points])


# --- subcanonicity evidence -----------------------------------------------------

@dataclass
class SheafWitness:
    """A covering ``cover[k]: T_k -> T`` with a family ``parts[k]: T_k -> Y``."""
    cover: list
    parts: list
    name: str = ""


def check_subcanonical_witness(witnesses, name="subcanonical") -> Report:
    """Glue each witness family; failures falsify subcanonicity."""
    from .errors import SupersiteError
    from .superspace import glue_morphisms, morphism_difference

    rep = Report(name, evidence="witness-based")
    glued = 0
    for n, w in enumerate(witnesses):
        label = w.name or f"witness {n}"
        try:
            t = glue_morphisms(w.cover, w.parts)
        except SupersiteError as exc:
            rep.add(exc.code, f"{label}: {exc}", witness=label, **{k: v for k, v in exc.witness.items()
                                                                  if k in ("i", "j", "point", "generator")})
            continue
        for k, (e, p) in enumerate(zip(w.cover, w.parts)):
            d = morphism_difference(e.then(t), p)
            if d is not None:
                rep.add("NotAGluing", f"{label}: glued map differs from part {k}", witness=label, part=k)
        glued += 1
    rep.details["witnesses"] = len(list(witnesses)) if not isinstance(witnesses, list) else len(witnesses)
    rep.details["glued"] = glued
    return rep


def chart_witnesses(X, cover=None, twist=None):
    """The chart-cover witness of ``X``: minimal-open charts mapped back into ``X``.

    ``twist`` optionally post-composes one chart's inclusion with an
    automorphism, which yields an incompatible family.
    """
    from .superspace import restrict

    cover = [frozenset(U) for U in (cover or X.base.basic_opens())]
    cover = [U for U in cover if U]
    embs = [restrict(X, U)[1] for U in cover]
    parts = list(embs)
    if twist is not None:
        k, auto = twist
        parts[k] = auto.then(embs[k])
    return SheafWitness(embs, parts, name=f"charts of {X.name}")


def sorted_opens_labels(R: SiteRegistry):
    open_of = R.meta["open_of"]
    return sorted(R.objects, key=lambda o: open_key(open_of[o]))
