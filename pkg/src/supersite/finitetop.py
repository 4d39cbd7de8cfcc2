"""Finite topological spaces given by their explicit lattice of opens."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Mapping

from .errors import NotOpen, UnknownPoint
from .report import Report


def fs(*xs):
    return frozenset(xs)


def point_key(p):
    return (str(type(p).__name__), str(p))


def sorted_points(ps):
    return sorted(ps, key=point_key)


def open_key(U):
    return (len(U), tuple(sorted(str(p) for p in U)))


def show_open(U) -> str:
    return "{" + ", ".join(str(p) for p in sorted_points(U)) + "}"


@dataclass(frozen=True)
class FiniteSpace:
    points: frozenset
    opens: frozenset

    @classmethod
    def make(cls, points, opens, name=""):
        return cls(frozenset(points), frozenset(frozenset(U) for U in opens))

    @classmethod
    def discrete(cls, points):
        points = list(points)
        return cls.make(points, (frozenset(c) for r in range(len(points) + 1)
                                 for c in combinations(points, r)))

    @classmethod
    def from_basis(cls, points, basis):
        """Close a family of subsets under unions (plus the empty set and the whole space)."""
        opens = {frozenset(), frozenset(points)} | {frozenset(b) for b in basis}
        changed = True
        while changed:
            changed = False
            for U in list(opens):
                for V in list(opens):
                    for W in (U | V, U & V):
                        if W not in opens:
                            opens.add(W)
                            changed = True
        return cls.make(points, opens)

    def sorted_opens(self):
        return sorted(self.opens, key=open_key)

    def is_open(self, U) -> bool:
        return frozenset(U) in self.opens

    def is_closed(self, C) -> bool:
        return (self.points - frozenset(C)) in self.opens

    def require_open(self, U):
        U = frozenset(U)
        if U not in self.opens:
            raise NotOpen(f"{show_open(U)} is not open", open=U)
        return U

    def minimal_open(self, p):
        if p not in self.points:
            raise UnknownPoint(f"{p!r} is not a point of the space", point=p)
        out = self.points
        for U in self.opens:
            if p in U:
                out = out & U
        return out

    def minimal_opens(self):
        return {p: self.minimal_open(p) for p in self.points}

    def basic_opens(self):
        """The distinct minimal opens, smallest first."""
        return sorted(set(self.minimal_opens().values()), key=open_key)

    def subspace(self, U) -> "FiniteSpace":
        U = frozenset(U)
        return FiniteSpace(U, frozenset(V & U for V in self.opens))

    def opens_within(self, U):
        U = frozenset(U)
        return [V for V in self.sorted_opens() if V <= U]

    def interior_hull(self, S):
        """Smallest open containing S."""
        out = frozenset()
        for p in S:
            out |= self.minimal_open(p)
        return out


def check_space(X: FiniteSpace) -> Report:
    rep = Report("space")
    if frozenset() not in X.opens or X.points not in X.opens:
        rep.add("MissingEmptyOrFull", "the empty set and the full set must both be open")
    for U in X.opens:
        if not U <= X.points:
            rep.add("NotASubset", f"{show_open(U)} contains unknown points", open=U)
    for U, V in combinations(X.sorted_opens(), 2):
        if U | V not in X.opens:
            rep.add("NotClosedUnderUnion", f"{show_open(U)} ∪ {show_open(V)} is not open", left=U, right=V)
        if U & V not in X.opens:
            rep.add("NotClosedUnderIntersection", f"{show_open(U)} ∩ {show_open(V)} is not open",
                    left=U, right=V)
    return rep


@dataclass(frozen=True)
class ContinuousMap:
    source: FiniteSpace
    target: FiniteSpace
    mapping: Mapping[Hashable, Hashable]

    def __call__(self, p):
        return self.mapping[p]

    def preimage(self, U):
        return frozenset(p for p in self.source.points if self.mapping[p] in U)

    def image(self, S=None):
        S = self.source.points if S is None else S
        return frozenset(self.mapping[p] for p in S)

    def then(self, other: "ContinuousMap") -> "ContinuousMap":
        return ContinuousMap(self.source, other.target, {p: other(self(p)) for p in self.source.points})

    @classmethod
    def identity(cls, X):
        return cls(X, X, {p: p for p in X.points})

    @classmethod
    def inclusion(cls, X, U):
        return cls(X.subspace(U), X, {p: p for p in U})


def check_continuous(f: ContinuousMap) -> Report:
    rep = Report("continuity")
    for p in f.source.points:
        if p not in f.mapping or f.mapping[p] not in f.target.points:
            rep.add("UnknownPoint", f"{p!r} has no image in the target", point=p)
    if rep.errors:
        return rep
    for U in f.target.sorted_opens():
        pre = f.preimage(U)
        if pre not in f.source.opens:
            rep.add("PreimageNotOpen", f"preimage of {show_open(U)} is {show_open(pre)}",
                    open=U, preimage=pre)
    return rep


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    image: frozenset = frozenset()
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_open_embedding_top(f: ContinuousMap) -> EmbeddingCheck:
    if not check_continuous(f).ok:
        return EmbeddingCheck(False, reason="not continuous")
    img = f.image()
    if len(img) != len(f.source.points):
        return EmbeddingCheck(False, reason="not injective")
    if img not in f.target.opens:
        return EmbeddingCheck(False, reason=f"image {show_open(img)} is not open")
    if not _homeomorphic_onto_image(f, img):
        return EmbeddingCheck(False, reason="not a homeomorphism onto its image")
    return EmbeddingCheck(True, img)


def is_closed_embedding_top(f: ContinuousMap) -> EmbeddingCheck:
    if not check_continuous(f).ok:
        return EmbeddingCheck(False, reason="not continuous")
    img = f.image()
    if len(img) != len(f.source.points):
        return EmbeddingCheck(False, reason="not injective")
    if not f.target.is_closed(img):
        return EmbeddingCheck(False, reason=f"image {show_open(img)} is not closed")
    if not _homeomorphic_onto_image(f, img):
        return EmbeddingCheck(False, reason="not a homeomorphism onto its image")
    return EmbeddingCheck(True, img)


def _homeomorphic_onto_image(f, img):
    sub = f.target.subspace(img)
    return {f.image(U) for U in f.source.opens} == set(sub.opens)
