"""Tokenizer, recursive-descent parser and name resolution for documents.

Declarations are line oriented; blocks use braces.  Polynomial expressions
are kept as (whitespace-normalized) source text and parsed later against
the algebra they live in.  :func:`parse` never raises: syntax errors
become diagnostics and parsing resumes at the next top-level line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..finitetop import sorted_points
from . import ast as A

TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<arrow>->)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z][A-Za-z0-9_']*)*)
  | (?P<number>\d+)
  | (?P<string>"[^"\\\n]*")
  | (?P<sym>\*\*|[{}()\[\],:;=|.*+\-^/])
""", re.VERBOSE)


@dataclass
class Token:
    type: str
    text: str
    line: int
    col: int
    start: int
    end: int

    @property
    def span(self):
        return A.Span(self.line, self.col)


class ParseError(Exception):
    def __init__(self, message, token, expected=(), code="SyntaxError"):
        super().__init__(message)
        self.token = token
        self.expected = tuple(expected)
        self.code = code


_DECL_START = re.compile(r"(?:%s)\b" % "|".join(A.KINDS))


def tokenize(text):
    tokens, diags = [], []
    pos, line, col = 0, 1, 1
    depth = 0  # parentheses and brackets; newlines inside them are ignored
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(A.Diagnostic("SyntaxError", f"unexpected character {text[pos]!r}", A.Span(line, col)))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        s = m.group()
        if kind == "newline":
            if depth and _DECL_START.match(text, m.end()):
                depth = 0  # an unclosed bracket must not swallow the next declaration
            if depth == 0:
                tokens.append(Token("nl", "\n", line, col, pos, pos + 1))
            line += 1
            col = 1
        elif kind not in ("ws", "comment"):
            tokens.append(Token("sym" if kind == "arrow" else kind, s, line, col, pos, m.end()))
            if s in "([":
                depth += 1
            elif s in ")]" and depth:
                depth -= 1
        if kind != "newline":
            col += len(s)
        pos = m.end()
    tokens.append(Token("eof", "", line, col, pos, pos))
    return tokens, diags


class Parser:
    def __init__(self, text):
        self.text = text
        self.tokens, self.diags = tokenize(text)
        self.i = 0

    # --- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *texts):
        t = self.tok
        return t.type in ("sym", "name") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.type != "eof":
            self.i += 1
        return t

    def expect(self, text, what=None) -> Token:
        if not self.at(text):
            raise ParseError(f"expected {what or repr(text)}, found {self.describe(self.tok)}", self.tok, [repr(text)])
        return self.advance()

    def describe(self, t):
        return {"nl": "end of line", "eof": "end of input"}.get(t.type, repr(t.text))

    def name(self, what="a name") -> str:
        t = self.tok
        if t.type != "name":
            raise ParseError(f"expected {what}, found {self.describe(t)}", t, [what])
        return self.advance().text

    def point(self) -> str:
        t = self.tok
        if t.type == "string":
            return self.advance().text[1:-1]
        if t.type not in ("name", "number"):
            raise ParseError(f"expected a point, found {self.describe(t)}", t, ["point"])
        return self.advance().text

    def value(self) -> str:
        t = self.tok
        if t.type in ("name", "number") or (t.type == "sym" and t.text == "*"):
            return self.advance().text
        raise ParseError(f"expected a value, found {self.describe(t)}", t, ["value"])

    def skip_newlines(self):
        while self.tok.type == "nl" or self.at(";"):
            self.advance()

    def end_statement(self):
        if self.tok.type in ("nl", "eof") or self.at(";", "}"):
            if self.tok.type == "nl" or self.at(";"):
                self.advance()
            return
        raise ParseError(f"expected end of line, found {self.describe(self.tok)}", self.tok, ["end of line"])

    def comma_list(self, item, stop=()):
        out = []
        if self.tok.type in ("nl", "eof") or self.at(";", "}", *stop):
            return out
        out.append(item())
        while self.at(","):
            self.advance()
            out.append(item())
        return out

    def open_lit(self) -> tuple:
        self.expect("{", "an open set '{...}'")
        pts = []
        if not self.at("}"):
            pts.append(self.point())
            while self.at(","):
                self.advance()
                pts.append(self.point())
        self.expect("}")
        return tuple(sorted_points(set(pts)))

    def expr(self, stops=(",",)) -> str:
        """Raw expression text up to a stop symbol at parenthesis depth zero."""
        first = self.tok
        depth = 0
        last = None
        while True:
            t = self.tok
            if t.type in ("nl", "eof"):
                break
            if t.type == "sym" and depth == 0 and (t.text in stops or t.text in (";", "}")):
                break
            if t.type == "sym" and t.text in "([":
                depth += 1
            if t.type == "sym" and t.text in ")]":
                if depth == 0:
                    break
                depth -= 1
            last = self.advance()
        if last is None:
            raise ParseError(f"expected an expression, found {self.describe(first)}", first, ["expression"])
        return " ".join(self.text[first.start:last.end].split())

    def maps(self):
        """``g -> expr, g -> expr``"""
        def one():
            g = self.name("a generator")
            self.expect("->")
            return (g, self.expr())
        return self.comma_list(one)

    def block(self, statement):
        opener = self.expect("{", "'{'")
        while True:
            self.skip_newlines()
            if self.at("}"):
                self.advance()
                return
            if self.tok.type == "eof":
                raise ParseError(f"unbalanced brace: block opened at {opener.span} is never closed", opener, ["'}'"])
            statement(self.name("a statement keyword"))

    # --- top level
    def parse(self) -> A.Document:
        doc = A.Document(diagnostics=list(self.diags))
        while True:
            self.skip_newlines()
            if self.tok.type == "eof":
                break
            start = self.i
            try:
                t = self.tok
                kw = self.name("a declaration keyword")
                if kw not in A.KINDS:
                    raise ParseError(f"unknown declaration {kw!r}", t, A.KINDS)
                decl = getattr(self, f"p_{kw}")()
                decl.span = t.span
                self.end_statement()
                doc.declarations.append(decl)
            except ParseError as exc:
                doc.diagnostics.append(A.Diagnostic(exc.code, str(exc), exc.token.span, exc.expected))
                self.recover(start)
        resolve(doc)
        return doc

    def recover(self, start):
        """Skip to the next line at brace depth zero."""
        self.i = start
        depth = 0
        while self.tok.type != "eof":
            t = self.advance()
            if t.type == "sym" and t.text == "{":
                depth += 1
            elif t.type == "sym" and t.text == "}":
                depth = max(0, depth - 1)
            elif t.type == "nl" and depth == 0:
                return

    # --- declarations
    def algebra_lit(self) -> A.AlgebraLit:
        t = self.tok
        kw = self.name("'Q' or 'GF'")
        if kw == "Q":
            p = 0
        elif kw == "GF":
            self.expect("(")
            num = self.tok
            if num.type != "number":
                raise ParseError("expected a prime", num, ["number"])
            p = int(self.advance().text)
            self.expect(")")
        else:
            raise ParseError(f"expected a field 'Q' or 'GF(p)', found {kw!r}", t, ["Q", "GF"])
        self.expect("[", "'['")
        even = self.comma_list(self.name, stop=("|", "]"))
        odd = []
        if self.at("|"):
            self.advance()
            odd = self.comma_list(self.name, stop=("]",))
        self.expect("]")
        rels = []
        if self.at("/"):
            self.advance()
            self.expect("(")
            if not self.at(")"):
                rels.append(self.expr((",",)))
                while self.at(","):
                    self.advance()
                    rels.append(self.expr((",",)))
            self.expect(")")
        return A.AlgebraLit(p, even, odd, rels)

    def algebra_ref(self):
        if self.tok.type == "name" and self.tok.text in ("Q", "GF") and self.peek().text in ("[", "("):
            return self.algebra_lit()
        return self.name("an algebra")

    def p_algebra(self):
        name = self.name()
        self.expect("=")
        return A.Algebra(name, self.algebra_lit())

    def p_space(self):
        name = self.name()
        sp = A.Space(name, [], [])
        if self.at("="):
            self.advance()
            kw = self.name("'discrete'")
            if kw != "discrete":
                raise ParseError(f"unknown space constructor {kw!r}", self.tokens[self.i - 1], ["discrete"])
            self.expect("(")
            pts = self.comma_list(self.point, stop=(")",))
            self.expect(")")
            sp.points = pts
            sp.opens = None
            return sp

        def stmt(kw):
            if kw == "points":
                sp.points += self.comma_list(self.point)
            elif kw in ("opens", "basis"):
                sp.opens += self.comma_list(self.open_lit)
                sp.basis = sp.basis or kw == "basis"
            else:
                raise ParseError(f"unknown space statement {kw!r}", self.tokens[self.i - 1], ["points", "opens", "basis"])
            self.end_statement()
        self.block(stmt)
        return sp

    def p_superspace(self):
        name = self.name()
        if self.at("="):
            self.advance()
            kw = self.name("'affine'")
            if kw != "affine":
                raise ParseError(f"unknown superspace constructor {kw!r}", self.tokens[self.i - 1], ["affine"])
            self.expect("(")
            alg = self.name("an algebra")
            self.expect(")")
            return A.Superspace(name, None, [], [], affine=alg)
        kw = self.name("'over'")
        if kw != "over":
            raise ParseError("expected 'over'", self.tokens[self.i - 1], ["over"])
        X = A.Superspace(name, self.name("a space"), [], [])

        def stmt(kw):
            if kw == "section":
                U = self.open_lit()
                self.expect("=")
                X.sections.append(A.Section(U, self.algebra_ref()))
            elif kw == "restrict":
                U = self.open_lit()
                self.expect("->")
                V = self.open_lit()
                self.expect(":")
                X.restrictions.append(A.Restriction(U, V, self.maps()))
            else:
                raise ParseError(f"unknown superspace statement {kw!r}", self.tokens[self.i - 1], ["section", "restrict"])
            self.end_statement()
        self.block(stmt)
        return X

    def space_ref(self) -> A.SpaceRef:
        name = self.name("a superspace")
        if self.at("|"):
            self.advance()
            return A.SpaceRef(name, self.open_lit())
        return A.SpaceRef(name)

    def morphism_atom(self) -> A.MorphismAtom:
        if self.tok.type == "name" and self.tok.text in ("inclusion", "identity"):
            op = self.advance().text
            return A.MorphismAtom(op, space=self.space_ref())
        return A.MorphismAtom("ref", self.name("a morphism"))

    def p_morphism(self):
        name = self.name()
        if self.at("="):
            self.advance()
            chain = [self.morphism_atom()]
            while self.tok.type == "name" and self.tok.text == "then":
                self.advance()
                chain.append(self.morphism_atom())
            return A.Morphism(name, chain=chain)
        self.expect(":")
        src = self.space_ref()
        self.expect("->")
        tgt = self.space_ref()
        m = A.Morphism(name, src, tgt)

        def stmt(kw):
            if kw == "point":
                p = self.point()
                self.expect("->")
                m.points.append((p, self.point()))
            elif kw == "stalk":
                p = self.point()
                self.expect(":")
                m.stalks.append((p, self.maps()))
            else:
                raise ParseError(f"unknown morphism statement {kw!r}", self.tokens[self.i - 1], ["point", "stalk"])
            self.end_statement()
        self.block(stmt)
        return m

    def obj(self):
        return self.open_lit() if self.at("{") else self.name("an object")

    def p_site(self):
        name = self.name()
        s = A.Site(name)
        if self.at("="):
            self.advance()
            t = self.tok
            gen = self.name("'opens' or 'superspace'")
            if gen not in ("opens", "superspace"):
                raise ParseError(f"unknown site constructor {gen!r}", t, ["opens", "superspace"])
            self.expect("(")
            s.generator, s.of = gen, self.name()
            self.expect(")")
            return s

        def stmt(kw):
            if kw == "objects":
                s.objects += self.comma_list(self.name)
            elif kw == "arrow":
                f = self.name("an arrow")
                self.expect(":")
                src = self.name("an object")
                self.expect("->")
                s.arrows.append(A.SiteArrow(f, src, self.name("an object")))
            elif kw == "compose":
                g = self.name("an arrow")
                self.expect(".")
                f = self.name("an arrow")
                self.expect("=")
                s.composites.append((g, f, self.name("an arrow")))
            elif kw == "pullback":
                f = self.name("an arrow")
                self.expect(",")
                g = self.name("an arrow")
                self.expect("=")
                P = self.name("an object")
                if self.name("'via'") != "via":
                    raise ParseError("expected 'via'", self.tokens[self.i - 1], ["via"])
                p1 = self.name("an arrow")
                self.expect(",")
                s.pullbacks.append((f, g, P, p1, self.name("an arrow")))
            else:
                raise ParseError(f"unknown site statement {kw!r}", self.tokens[self.i - 1],
                                 ["objects", "arrow", "compose", "pullback"])
            self.end_statement()
        self.block(stmt)
        return s

    def p_topology(self):
        name = self.name()
        if self.name("'on'") != "on":
            raise ParseError("expected 'on'", self.tokens[self.i - 1], ["on"])
        T = A.TopologyDecl(name, self.name("a site"))
        if self.at("="):
            self.advance()
            T.base = self.name("a generated topology")
        if self.at("{"):
            def stmt(kw):
                if kw not in ("cover", "drop"):
                    raise ParseError(f"unknown topology statement {kw!r}", self.tokens[self.i - 1], ["cover", "drop"])
                target = self.obj()
                self.expect(":")
                T.statements.append(A.CoverStmt(kw, target, self.comma_list(self.obj)))
                self.end_statement()
            self.block(stmt)
        elif T.base is None:
            raise ParseError("a topology needs '= base' or a block", self.tok, ["=", "{"])
        return T

    def arrow_ref(self):
        if self.at("{"):
            V = self.open_lit()
            self.expect("->")
            return (V, self.open_lit())
        return self.name("an arrow")

    def p_presheaf(self):
        name = self.name()
        if self.name("'on'") != "on":
            raise ParseError("expected 'on'", self.tokens[self.i - 1], ["on"])
        F = A.Presheaf(name, self.name("a site"))

        def stmt(kw):
            if kw == "values":
                U = self.obj()
                self.expect(":")
                F.values.append((U, self.comma_list(self.value)))
            elif kw == "restrict":
                f = self.arrow_ref()
                self.expect(":")

                def pair():
                    x = self.value()
                    self.expect("->")
                    return (x, self.value())
                F.restrictions.append((f, self.comma_list(pair)))
            else:
                raise ParseError(f"unknown presheaf statement {kw!r}", self.tokens[self.i - 1], ["values", "restrict"])
            self.end_statement()
        self.block(stmt)
        return F

    def p_gluing(self):
        G = A.Gluing(self.name())

        def stmt(kw):
            if kw == "patch":
                G.patches += self.comma_list(self.name)
            elif kw == "overlap":
                i = self.name("a patch")
                self.expect(",")
                j = self.name("a patch")
                self.expect(":")
                Ui = self.open_lit()
                self.expect(",")
                G.overlaps.append((i, j, Ui, self.open_lit()))
            elif kw == "transition":
                i = self.name("a patch")
                self.expect("->")
                j = self.name("a patch")
                self.expect("=")
                G.transitions.append((i, j, self.name("a morphism")))
            else:
                raise ParseError(f"unknown gluing statement {kw!r}", self.tokens[self.i - 1],
                                 ["patch", "overlap", "transition"])
            self.end_statement()
        self.block(stmt)
        return G

    def p_functor(self):
        name = self.name()
        self.expect("=")
        if self.name("'points'") != "points":
            raise ParseError("expected 'points(...)'", self.tokens[self.i - 1], ["points"])
        self.expect("(")
        F = A.Functor(name, self.space_ref())
        self.expect(")")

        def via():
            if self.name("'via'") != "via":
                raise ParseError("expected 'via'", self.tokens[self.i - 1], ["via"])

        def stmt(kw):
            if kw == "chart":
                c = self.name("a chart name")
                via()
                F.charts.append((c, self.name("a morphism")))
            elif kw == "overlap":
                i = self.name("a chart")
                self.expect(",")
                j = self.name("a chart")
                via()
                a = self.name("a morphism")
                self.expect(",")
                F.overlaps.append((i, j, a, self.name("a morphism")))
            elif kw == "probe":
                F.probes += self.comma_list(self.name)
            else:
                raise ParseError(f"unknown functor statement {kw!r}", self.tokens[self.i - 1],
                                 ["chart", "overlap", "probe"])
            self.end_statement()
        self.block(stmt)
        return F


def parse(text: str) -> A.Document:
    try:
        return Parser(text).parse()
    except RecursionError:
        return A.Document(diagnostics=[A.Diagnostic("SyntaxError", "document nests too deeply", A.Span(1, 1))])


# --- name resolution ---------------------------------------------------------

SPACE_KINDS = ("superspace", "gluing")


def resolve(doc: A.Document):
    seen = {}
    for d in doc.declarations:
        key = (d.kind, d.name)
        if key in seen:
            doc.diagnostics.append(A.Diagnostic("DuplicateName", f"{d.kind} {d.name!r} is declared twice", d.span))
        seen[key] = d

    def need(d, kinds, name, what):
        kinds = (kinds,) if isinstance(kinds, str) else kinds
        if not any((k, name) in seen for k in kinds):
            doc.diagnostics.append(A.Diagnostic("UnresolvedReference", f"{d.kind} {d.name!r} refers to undeclared "
                                                f"{what} {name!r}", d.span))

    for d in doc.declarations:
        if d.kind == "superspace":
            if d.base is not None:
                need(d, "space", d.base, "space")
            for s in d.sections:
                if isinstance(s.algebra, str):
                    need(d, "algebra", s.algebra, "algebra")
            if d.affine:
                need(d, "algebra", d.affine, "algebra")
        elif d.kind == "morphism":
            for ref in (d.source, d.target):
                if ref is not None:
                    need(d, SPACE_KINDS, ref.name, "space")
            for atom in d.chain:
                if atom.op == "ref":
                    need(d, "morphism", atom.name, "morphism")
                else:
                    need(d, SPACE_KINDS, atom.space.name, "space")
        elif d.kind == "site" and d.of is not None:
            need(d, "space" if d.generator == "opens" else SPACE_KINDS, d.of,
                 "space" if d.generator == "opens" else "superspace")
        elif d.kind in ("topology", "presheaf"):
            need(d, "site", d.site, "site")
        elif d.kind == "gluing":
            for p in d.patches:
                need(d, SPACE_KINDS, p, "superspace")
            for _, _, m in d.transitions:
                need(d, "morphism", m, "morphism")
        elif d.kind == "functor":
            need(d, SPACE_KINDS, d.target.name, "superspace")
            for _, m in d.charts:
                need(d, "morphism", m, "morphism")
            for _, _, a, b in d.overlaps:
                need(d, "morphism", a, "morphism")
                need(d, "morphism", b, "morphism")
            for m in d.probes:
                need(d, "morphism", m, "morphism")
    return doc
