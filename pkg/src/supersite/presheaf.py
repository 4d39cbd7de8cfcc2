"""Set-valued presheaves on finite sites.

Tabulated presheaves list every value set and every restriction map and
are checked exhaustively.  Functors of points ``h_X = Hom(-, X)`` are never
enumerated; they are checked on supplied witnesses only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MissingPullbackData, SizeBoundExceeded, SupersiteError
from .report import Report
from .site import Covering, SiteRegistry, Topology


class TabulatedPresheaf:
    """``values[U]`` is a list; ``restrictions[f]`` maps ``F(target f) -> F(source f)``."""

    def __init__(self, registry: SiteRegistry, values, restrictions=None, name=""):
        self.registry = registry
        self.name = name
        self.values = {U: list(values.get(U, [])) for U in registry.objects}
        self.restrictions = {f: dict(m) for f, m in dict(restrictions or {}).items()}

    def restrict(self, f, x):
        if self.registry.is_identity(f) and f not in self.restrictions:
            return x
        return self.restrictions[f][x]

    def size(self):
        return sum(len(v) for v in self.values.values())


def check_functoriality(F: TabulatedPresheaf) -> Report:
    R = F.registry
    rep = Report(f"presheaf {F.name}")
    for f, a in sorted(R.arrows.items()):
        if R.is_identity(f) and f not in F.restrictions:
            continue
        table = F.restrictions.get(f)
        if table is None:
            rep.add("MissingRestriction", f"no restriction along {f}", arrow=f)
            continue
        for x in F.values[a.target]:
            if x not in table:
                rep.add("MissingRestriction", f"restriction along {f} undefined at {x!r}", arrow=f, value=x)
            elif table[x] not in F.values[a.source]:
                rep.add("OutOfRange", f"{f} sends {x!r} to {table[x]!r}, not in F({a.source})", arrow=f, value=x)
            elif R.is_identity(f) and table[x] != x:
                rep.add("IdentityViolation", f"F({f}) moves {x!r}", arrow=f, value=x)
    if rep.errors:
        return rep
    for (g, f), h in sorted(R.composites.items()):
        for x in F.values[R.arrows[g].target]:
            lhs = F.restrict(h, x)
            rhs = F.restrict(f, F.restrict(g, x))
            if lhs != rhs:
                rep.add("CompositionViolation", f"F({h})({x!r}) = {lhs!r} but F({f})(F({g})({x!r})) = {rhs!r}",
                        pair=[g, f], value=x)
                break
    return rep


@dataclass
class SheafAnswer:
    ok: bool
    kind: str | None = None
    covering: Covering | None = None
    witness: dict = field(default_factory=dict)
    families: int | None = None

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {"ok": self.ok, "kind": self.kind,
                "covering": None if self.covering is None else str(self.covering),
                "witness": {k: repr(v) for k, v in self.witness.items()}}


def _pullback(R: SiteRegistry, f, g):
    pb = R.pullback(f, g)
    if pb is None:
        raise MissingPullbackData(f"no fibered product declared for {f} and {g}", pair=[f, g])
    return pb


def compatible_families(F: TabulatedPresheaf, c: Covering):
    """All compatible families over ``c`` as dicts ``member -> value``, by backtracking."""
    R = F.registry
    members = c.sorted_members()
    squares = {(f, g): _pullback(R, f, g) for f in members for g in members}
    out = []

    def agrees(k, chosen):
        f = members[k]
        for g in members[:k + 1]:
            P, p1, p2 = squares[(f, g)]
            if F.restrict(p1, chosen[f]) != F.restrict(p2, chosen[g]):
                return False
        return True

    def rec(k, chosen):
        if k == len(members):
            out.append(dict(chosen))
            return
        f = members[k]
        for x in F.values[R.arrows[f].source]:
            chosen[f] = x
            if agrees(k, chosen):
                rec(k + 1, chosen)
        chosen.pop(f, None)

    rec(0, {})
    return out


def is_separated(F: TabulatedPresheaf, T: Topology) -> SheafAnswer:
    for c in T.coverings():
        members = c.sorted_members()
        seen = {}
        for x in F.values[c.target]:
            key = tuple(F.restrict(f, x) for f in members)
            if key in seen:
                return SheafAnswer(False, "not-separated", c, {"x": seen[key], "y": x})
            seen[key] = x
    return SheafAnswer(True)


def is_sheaf(F: TabulatedPresheaf, T: Topology) -> SheafAnswer:
    sep = is_separated(F, T)
    if not sep:
        return sep
    for c in T.coverings():
        members = c.sorted_members()
        images = {tuple(F.restrict(f, x) for f in members) for x in F.values[c.target]}
        fams = compatible_families(F, c)
        for fam in fams:
            if tuple(fam[f] for f in members) not in images:
                return SheafAnswer(False, "not-glued", c, {"family": fam}, families=len(fams))
    return SheafAnswer(True)


def brute_force_sheaf_oracle(F: TabulatedPresheaf, T: Topology, max_values=6, max_objects=6) -> SheafAnswer:
    """Naive equalizer check by enumerating every tuple; shares nothing with :func:`is_sheaf`."""
    R = F.registry
    if len(R.objects) > max_objects or any(len(v) > max_values for v in F.values.values()):
        raise SizeBoundExceeded(f"oracle bound is {max_objects} objects and {max_values} values per object")

    def res(f, x):
        table = F.restrictions.get(f)
        return x if table is None else table[x]

    for U in R.objects:
        for c in sorted(T.cov[U], key=lambda c: (len(c.members), sorted(c.members))):
            members = sorted(c.members)
            squares = {}
            for f in members:
                for g in members:
                    pb = R.pullback(f, g)
                    if pb is None:
                        raise MissingPullbackData(f"no fibered product declared for {f} and {g}", pair=[f, g])
                    squares[(f, g)] = pb
            families = []
            for tup in itertools.product(*(F.values[R.arrows[f].source] for f in members)):
                ok = True
                for a, f in enumerate(members):
                    for b, g in enumerate(members):
                        _, p1, p2 = squares[(f, g)]
                        if res(p1, tup[a]) != res(p2, tup[b]):
                            ok = False
                if ok:
                    families.append(tup)
            for tup in families:
                pre = [x for x in F.values[U] if all(res(f, x) == tup[a] for a, f in enumerate(members))]
                if len(pre) > 1:
                    return SheafAnswer(False, "not-separated", c, {"x": pre[0], "y": pre[1]}, len(families))
                if not pre:
                    return SheafAnswer(False, "not-glued", c, {"family": dict(zip(members, tup))}, len(families))
    return SheafAnswer(True)


# --- functors of points -------------------------------------------------------------

class FunctorOfPoints:
    """``h_X(T) = Hom(T, X)`` and ``h_X(phi)(f) = f o phi``; evaluated on witnesses only."""

    def __init__(self, X, name=""):
        self.target = X
        self.name = name or f"h_{X.name}"

    def contains(self, f) -> bool:
        return f.target is self.target

    def pull(self, phi, f):
        """``h_X(phi)(f)``."""
        if phi.target is not f.source:
            raise ValueError("probe and element are not composable")
        return phi.then(f)


def check_contravariance(h: FunctorOfPoints, phi, psi, f) -> Report:
    """``h(phi o psi)(f) = h(psi)(h(phi)(f))`` for ``psi: S -> T``, ``phi: T -> U``, ``f: U -> X``."""
    from .superspace import morphism_difference

    rep = Report(f"contravariance of {h.name}", evidence="witness-based")
    lhs = h.pull(psi.then(phi), f)
    rhs = h.pull(psi, h.pull(phi, f))
    d = morphism_difference(lhs, rhs)
    if d is not None:
        rep.add("CompositionViolation", f"h(phi o psi) != h(psi) o h(phi): {d['reason']}", **d)
    return rep


def check_sheaf_witness(h: FunctorOfPoints, covering, family) -> Report:
    """Glue a compatible family of elements of ``h`` along an open covering."""
    from .superspace import glue_morphisms, morphism_difference

    rep = Report(f"sheaf witness for {h.name}", evidence="witness-based")
    for k, f in enumerate(family):
        if not h.contains(f):
            rep.add("TargetMismatch", f"family member {k} does not land in {h.target.name}", member=k)
    if rep.errors:
        return rep
    try:
        t = glue_morphisms(covering, family)
    except SupersiteError as exc:
        rep.add(exc.code, str(exc), **{k: v for k, v in exc.witness.items() if k in ("i", "j", "point", "generator")})
        return rep
    for k, (e, f) in enumerate(zip(covering, family)):
        if morphism_difference(e.then(t), f) is not None:
            rep.add("NotAGluing", f"glued element does not restrict to member {k}", member=k)
    rep.details["glued"] = repr(t)
    rep.glued = t
    rep.details["unique"] = True
    return rep
