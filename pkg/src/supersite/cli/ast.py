"""Syntax tree of supersite documents.

Every node keeps its source position in ``span`` (excluded from equality),
so two documents compare equal when they declare the same things.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


def _span():
    return field(default=Span(0, 0), compare=False, repr=False)


@dataclass
class AlgebraLit:
    field: int  # 0 for Q, else the prime
    even: list
    odd: list
    relations: list


@dataclass
class SpaceRef:
    name: str
    open: tuple | None = None  # restriction to an open, ``X|{...}``


@dataclass
class Algebra:
    name: str
    value: AlgebraLit
    span: Span = _span()
    kind = "algebra"


@dataclass
class Space:
    name: str
    points: list
    opens: list
    basis: bool = False
    span: Span = _span()
    kind = "space"


@dataclass
class Section:
    open: tuple
    algebra: object  # name or AlgebraLit


@dataclass
class Restriction:
    source: tuple  # the larger open
    target: tuple
    images: list  # [(generator, text)]


@dataclass
class Superspace:
    name: str
    base: str | None
    sections: list
    restrictions: list
    affine: str | None = None
    span: Span = _span()
    kind = "superspace"


@dataclass
class MorphismAtom:
    op: str  # "ref", "inclusion", "identity"
    name: str | None = None
    space: SpaceRef | None = None


@dataclass
class Morphism:
    name: str
    source: SpaceRef | None = None
    target: SpaceRef | None = None
    points: list = field(default_factory=list)  # [(p, q)]
    stalks: list = field(default_factory=list)  # [(p, [(gen, text)])]
    chain: list = field(default_factory=list)  # [MorphismAtom], composed left to right
    span: Span = _span()
    kind = "morphism"


@dataclass
class SiteArrow:
    name: str
    source: str
    target: str


@dataclass
class Site:
    name: str
    generator: str | None = None  # "opens" or "superspace"
    of: str | None = None
    objects: list = field(default_factory=list)
    arrows: list = field(default_factory=list)
    composites: list = field(default_factory=list)  # [(g, f, h)]
    pullbacks: list = field(default_factory=list)  # [(f, g, P, p1, p2)]
    span: Span = _span()
    kind = "site"


@dataclass
class CoverStmt:
    op: str  # "cover" or "drop"
    target: object  # name or open tuple
    members: list  # names or open tuples


@dataclass
class TopologyDecl:
    name: str
    site: str
    base: str | None = None
    statements: list = field(default_factory=list)
    span: Span = _span()
    kind = "topology"


@dataclass
class Presheaf:
    name: str
    site: str
    values: list = field(default_factory=list)  # [(object, [values])]
    restrictions: list = field(default_factory=list)  # [(arrow, [(x, y)])]
    span: Span = _span()
    kind = "presheaf"


@dataclass
class Gluing:
    name: str
    patches: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)  # [(i, j, open_i, open_j)]
    transitions: list = field(default_factory=list)  # [(i, j, morphism)]
    span: Span = _span()
    kind = "gluing"


@dataclass
class Functor:
    name: str
    target: SpaceRef
    charts: list = field(default_factory=list)  # [(chart name, morphism)]
    overlaps: list = field(default_factory=list)  # [(i, j, left, right)]
    probes: list = field(default_factory=list)
    span: Span = _span()
    kind = "functor"


@dataclass
class Diagnostic:
    code: str
    message: str
    span: Span
    expected: tuple = ()

    def __str__(self):
        tail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        return f"{self.span}: {self.code}: {self.message}{tail}"

    def as_dict(self):
        return {"code": self.code, "message": self.message, "line": self.span.line, "col": self.span.col,
                "expected": list(self.expected)}


@dataclass
class Document:
    declarations: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.diagnostics

    def named(self, kind, name):
        for d in self.declarations:
            if d.kind == kind and d.name == name:
                return d
        return None

    def of_kind(self, kind):
        return [d for d in self.declarations if d.kind == kind]


KINDS = ("algebra", "space", "superspace", "morphism", "site", "topology", "presheaf", "gluing", "functor")
