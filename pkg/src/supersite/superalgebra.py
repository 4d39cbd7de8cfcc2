"""Finitely presented supercommutative algebras with exact normal forms.

A monomial is a pair ``(even_exponents, odd_indices)`` where the odd indices
are strictly increasing; it stands for the ordered product
``x1^e1 ... xn^en * th_i1 * th_i2 * ...``.  Monomials are compared
degree-lexicographically, generators in declaration order, even before odd.

Relations are completed by a Buchberger-style procedure that also feeds
``th_i * g`` back whenever ``th_i`` occurs in the leading monomial of ``g``
(those products lose their leading term because odd generators square to
zero).  Completion stops at a total-degree cap; past it, answers degrade to
inconclusive instead of being wrong.
"""

from __future__ import annotations

import ast
import enum
import itertools
import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import DegreeCapExceeded, MixedFields, ZeroDenominator
from .field import QQ, Field, solve
from .report import Report

DEFAULT_DEGREE_CAP = int(os.environ.get("SUPERSITE_DEGREE_CAP", "8"))


# -- monomials ---------------------------------------------------------------

def mono_degree(m):
    return sum(m[0]) + len(m[1])


def mono_parity(m):
    return len(m[1]) & 1


def mono_key(m, n_odd):
    odd = tuple(1 if i in m[1] else 0 for i in range(n_odd))
    return (mono_degree(m), m[0], odd)


def mono_mul(a, b):
    """Return ``(sign, monomial)``; sign 0 means the product vanishes."""
    oa, ob = a[1], b[1]
    if oa and ob:
        if set(oa) & set(ob):
            return 0, None
        swaps = sum(1 for i in oa for j in ob if i > j)
        odd = tuple(sorted(oa + ob))
    else:
        swaps = 0
        odd = oa or ob
    exps = tuple(x + y for x, y in zip(a[0], b[0]))
    return (-1 if swaps & 1 else 1), (exps, odd)


def mono_divides(d, m):
    return all(x <= y for x, y in zip(d[0], m[0])) and set(d[1]) <= set(m[1])


def mono_quotient(m, d):
    """``q`` with ``q * d == sign * m``; returns ``(sign, q)``."""
    q = (tuple(y - x for x, y in zip(d[0], m[0])), tuple(i for i in m[1] if i not in d[1]))
    sign, prod = mono_mul(q, d)
    assert prod == m
    return sign, q


def mono_lcm(a, b):
    return (tuple(max(x, y) for x, y in zip(a[0], b[0])), tuple(sorted(set(a[1]) | set(b[1]))))


# -- polynomials -------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    even: tuple
    odd: tuple
    field: Field = QQ

    def __post_init__(self):
        names = self.even + self.odd
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")

    @property
    def names(self):
        return self.even + self.odd

    def one_mono(self):
        return ((0,) * len(self.even), ())

    def gen_mono(self, name):
        if name in self.even:
            e = [0] * len(self.even)
            e[self.even.index(name)] = 1
            return (tuple(e), ())
        if name in self.odd:
            return ((0,) * len(self.even), (self.odd.index(name),))
        raise KeyError(name)

    def parity_of(self, name):
        return 0 if name in self.even else 1


class SuperPolynomial:
    """An element of the free supercommutative algebra on a signature."""

    __slots__ = ("sig", "terms", "_hash")

    def __init__(self, sig: Signature, terms=None):
        self.sig = sig
        F = sig.field
        self.terms = {}
        for m, c in (terms or {}).items():
            c = F(c)
            if c:
                self.terms[m] = c
        self._hash = None

    @classmethod
    def _raw(cls, sig, terms):
        p = cls.__new__(cls)
        p.sig, p.terms, p._hash = sig, terms, None
        return p

    # construction helpers
    @classmethod
    def const(cls, sig, c):
        return cls(sig, {sig.one_mono(): c})

    @classmethod
    def gen(cls, sig, name):
        return cls(sig, {sig.gen_mono(name): 1})

    # queries
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        return max((mono_degree(m) for m in self.terms), default=-1)

    def leading(self):
        n = len(self.sig.odd)
        m = max(self.terms, key=lambda t: mono_key(t, n))
        return m, self.terms[m]

    def parity(self):
        """0 or 1 for homogeneous elements (zero counts as even), None if mixed."""
        ps = {mono_parity(m) for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def parts(self):
        even = {m: c for m, c in self.terms.items() if not mono_parity(m)}
        odd = {m: c for m, c in self.terms.items() if mono_parity(m)}
        return SuperPolynomial._raw(self.sig, even), SuperPolynomial._raw(self.sig, odd)

    def constant_value(self):
        """The scalar if this is a constant, else None."""
        if not self.terms:
            return self.sig.field.zero
        if set(self.terms) == {self.sig.one_mono()}:
            return self.terms[self.sig.one_mono()]
        return None

    # arithmetic
    def _check(self, other):
        if isinstance(other, SuperPolynomial):
            if other.sig.field != self.sig.field:
                raise MixedFields(f"{self.sig.field} vs {other.sig.field}")
            if other.sig != self.sig:
                raise ValueError("polynomials over different generator sets")
            return other
        return SuperPolynomial.const(self.sig, other)

    def __add__(self, other):
        other = self._check(other)
        F = self.sig.field
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = F.norm(t.get(m, 0) + c)
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return SuperPolynomial._raw(self.sig, t)

    __radd__ = __add__

    def __neg__(self):
        F = self.sig.field
        return SuperPolynomial._raw(self.sig, {m: F.norm(-c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c):
        F = self.sig.field
        c = F(c)
        if not c:
            return SuperPolynomial._raw(self.sig, {})
        return SuperPolynomial._raw(self.sig, {m: F.norm(v * c) for m, v in self.terms.items()})

    def mul_term(self, mono, coeff):
        F = self.sig.field
        out = {}
        for m, c in self.terms.items():
            s, prod = mono_mul(mono, m)
            if s:
                out[prod] = F.norm(out.get(prod, 0) + s * coeff * c)
        return SuperPolynomial._raw(self.sig, {m: c for m, c in out.items() if c})

    def __mul__(self, other):
        other = self._check(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self._check(other) * self

    def __pow__(self, k):
        out = SuperPolynomial.const(self.sig, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, SuperPolynomial):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SuperPolynomial.const(self.sig, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.sig, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"SuperPolynomial({self})"

    def __str__(self):
        return format_poly(self)


def multiply(p: SuperPolynomial, q: SuperPolynomial) -> SuperPolynomial:
    """Graded-commutative product with Koszul signs."""
    F = p.sig.field
    out = {}
    for ma, ca in p.terms.items():
        for mb, cb in q.terms.items():
            s, m = mono_mul(ma, mb)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return SuperPolynomial._raw(p.sig, {m: F.norm(c) for m, c in out.items() if F.norm(c)})


def format_poly(p: SuperPolynomial) -> str:
    if not p.terms:
        return "0"
    sig = p.sig
    n = len(sig.odd)
    parts = []
    for m in sorted(p.terms, key=lambda t: mono_key(t, n), reverse=True):
        c = p.terms[m]
        if sig.field.p == 0 and c < 0:
            sign, c = "-", -c
        else:
            sign = "+"
        factors = []
        for name, e in zip(sig.even, m[0]):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        factors += [sig.odd[i] for i in m[1]]
        cs = sig.field.show(c)
        if not factors:
            body = cs
        elif cs == "1":
            body = "*".join(factors)
        else:
            body = cs + "*" + "*".join(factors)
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def parse_poly(text: str, sig: Signature) -> SuperPolynomial:
    """Parse ``x*y - 1``, ``2/3*theta*x^2`` and the like."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return SuperPolynomial.const(sig, node.value)
        if isinstance(node, ast.Name):
            if node.id not in sig.names:
                raise ValueError(f"unknown generator {node.id!r} in {text!r}")
            return SuperPolynomial.gen(sig, node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)) or node.right.value < 0:
                    raise ValueError(f"exponents must be natural numbers in {text!r}")
                return ev(node.left) ** node.right.value
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                c = b.constant_value()
                if c is None or not c:
                    raise ValueError(f"can only divide by nonzero constants in {text!r}")
                return a.scale(sig.field.inv(c))
        raise ValueError(f"unsupported syntax in polynomial {text!r}")

    return ev(tree.body)


# -- reduction and completion ------------------------------------------------

def _reduce(p: SuperPolynomial, basis):
    """Full reduction of ``p`` modulo ``basis`` (list of ``(lm, lc, poly)``)."""
    sig = p.sig
    F = sig.field
    n = len(sig.odd)
    rest = dict(p.terms)
    out = {}
    while rest:
        m = max(rest, key=lambda t: mono_key(t, n))
        c = rest[m]
        for lm, lc, g in basis:
            if mono_divides(lm, m):
                sign, q = mono_quotient(m, lm)
                f = F.norm(c * F.inv(F.norm(sign * lc)))
                for gm, gc in g.terms.items():
                    s, prod = mono_mul(q, gm)
                    if s:
                        v = F.norm(rest.get(prod, 0) - f * s * gc)
                        if v:
                            rest[prod] = v
                        else:
                            rest.pop(prod, None)
                break
        else:
            out[m] = c
            del rest[m]
    return SuperPolynomial._raw(sig, out)


def _entry(g):
    lm, lc = g.leading()
    return (lm, lc, g)


def _monic(g):
    lm, lc = g.leading()
    return g.scale(g.sig.field.inv(lc))


def complete(relations, sig: Signature, degree_cap: int):
    """Bounded completion; returns ``(reduced_basis, complete_flag)``."""
    basis = []
    pairs = deque()
    todo = deque(r for r in relations if r)
    complete_flag = True

    def add(f):
        nonlocal complete_flag
        f = _monic(f)
        entry = _entry(f)
        for other in basis:
            pairs.append((other, entry))
        basis.append(entry)
        lm = entry[0]
        for i in lm[1]:
            t = ((0,) * len(sig.even), (i,))
            if mono_degree(lm) + 1 > degree_cap:
                complete_flag = False
                continue
            todo.append(f.mul_term(t, sig.field.one))

    while todo or pairs:
        if todo:
            h = todo.popleft()
        else:
            (lf, cf, f), (lg, cg, g) = pairs.popleft()
            lcm = mono_lcm(lf, lg)
            if mono_degree(lcm) > degree_cap:
                complete_flag = False
                continue
            F = sig.field
            sf, qf = mono_quotient(lcm, lf)
            sg, qg = mono_quotient(lcm, lg)
            h = f.mul_term(qf, F.inv(F.norm(sf * cf))) - g.mul_term(qg, F.inv(F.norm(sg * cg)))
        h = _reduce(h, basis)
        if h:
            add(h)
    return _interreduce(basis), complete_flag


def _interreduce(basis):
    polys = [g for _, _, g in basis]
    polys.sort(key=lambda g: mono_key(g.leading()[0], len(g.sig.odd)))
    kept = []
    for g in polys:
        lm = g.leading()[0]
        if any(mono_divides(k.leading()[0], lm) for k in kept):
            continue
        kept = [k for k in kept if not mono_divides(lm, k.leading()[0])]
        kept.append(g)
    out = []
    for i, g in enumerate(kept):
        others = [_entry(k) for j, k in enumerate(kept) if j != i]
        r = _reduce(g, others)
        out.append(_monic(r))
    out.sort(key=lambda g: mono_key(g.leading()[0], len(g.sig.odd)))
    return [_entry(g) for g in out]


# -- algebras ----------------------------------------------------------------

class Membership(str, enum.Enum):
    MEMBER = "member"
    NOT_MEMBER_UP_TO = "not-member-up-to-degree-cap"
    INCONCLUSIVE = "inconclusive"


class Locality(str, enum.Enum):
    CERTIFIED = "certified-local"
    NOT_CERTIFIED = "not-certified"


class SuperAlgebra:
    """``field[even | odd] / (relations)`` with a bounded relation completion.

    ``locality`` may carry a constructor-supplied certificate (any truthy
    description) that the algebra is local.
    """

    def __init__(self, even=(), odd=(), relations=(), field: Field = QQ,
                 degree_cap: int | None = None, name: str = "", locality=None):
        self.sig = Signature(tuple(even), tuple(odd), field)
        self.degree_cap = DEFAULT_DEGREE_CAP if degree_cap is None else degree_cap
        self.name = name
        self.locality = locality
        rels = []
        for r in relations:
            r = self.element(r)
            if r.parity() is None:
                raise ValueError(f"relation {r} is not parity-homogeneous")
            rels.append(r)
        self.relations = tuple(rels)
        self.basis, self.complete = complete(self.relations, self.sig, self.degree_cap)

    @property
    def field(self):
        return self.sig.field

    @property
    def even(self):
        return self.sig.even

    @property
    def odd(self):
        return self.sig.odd

    @property
    def generators(self):
        return self.sig.names

    def element(self, x) -> SuperPolynomial:
        if isinstance(x, SuperPolynomial):
            if x.sig.field != self.field:
                raise MixedFields(f"{x.sig.field} element used in {self.field} algebra")
            if x.sig != self.sig:
                raise ValueError(f"element {x} uses generators outside {self}")
            return x
        if isinstance(x, str):
            return parse_poly(x, self.sig)
        return SuperPolynomial.const(self.sig, x)

    __call__ = element

    def gen(self, name):
        return SuperPolynomial.gen(self.sig, name)

    @property
    def zero(self):
        return SuperPolynomial(self.sig)

    @property
    def one(self):
        return SuperPolynomial.const(self.sig, 1)

    def is_zero_algebra(self):
        return any(mono_degree(lm) == 0 for lm, _, _ in self.basis)

    def normal_form(self, p, strict=False) -> SuperPolynomial:
        p = self.element(p)
        nf = _reduce(p, self.basis)
        if strict and not self.complete and p.degree() > self.degree_cap:
            raise DegreeCapExceeded(f"reduction of degree {p.degree()} exceeds cap {self.degree_cap}",
                                    partial=nf)
        return nf

    def certain(self, p) -> bool:
        """Whether a normal form computed for ``p`` is certified canonical."""
        return self.complete or self.element(p).degree() <= self.degree_cap

    def equal(self, a, b) -> bool:
        return self.normal_form(self.element(a) - self.element(b)).is_zero()

    def is_zero(self, p) -> bool:
        return self.normal_form(p).is_zero()

    def leading_monomials(self):
        return [lm for lm, _, _ in self.basis]

    def standard_monomials(self, max_degree, parity=None):
        """Monomials of degree <= max_degree that are not reducible."""
        lms = self.leading_monomials()
        ne, no = len(self.even), len(self.odd)
        out = []
        for d in range(max_degree + 1):
            for k in range(min(no, d) + 1):
                if parity is not None and (k & 1) != parity:
                    continue
                for odd in itertools.combinations(range(no), k):
                    for exps in _compositions(d - k, ne):
                        m = (exps, odd)
                        if not any(mono_divides(lm, m) for lm in lms):
                            out.append(m)
        return out

    def mono(self, m):
        return SuperPolynomial._raw(self.sig, {m: self.field.one})

    def with_relations(self, extra, name=""):
        return SuperAlgebra(self.even, self.odd, self.relations + tuple(self.element(e) for e in extra),
                            self.field, self.degree_cap, name)

    def presentation(self) -> str:
        text = f"{self.field}[{_gens_text(self.even, self.odd)}]"
        if self.relations:
            text += " / (" + ", ".join(str(r) for r in self.relations) + ")"
        return text

    def __repr__(self):
        return f"SuperAlgebra({self.name + ': ' if self.name else ''}{self.presentation()})"


def _gens_text(even, odd):
    left = ", ".join(even)
    right = ", ".join(odd)
    if left and right:
        return f"{left} | {right}"
    if right:
        return f"| {right}"
    if left:
        return f"{left} |"
    return "|"


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def zero_algebra(field: Field = QQ) -> SuperAlgebra:
    return SuperAlgebra((), (), [1], field, name="0")


def ground_algebra(field: Field = QQ) -> SuperAlgebra:
    return SuperAlgebra((), (), (), field, name=str(field), locality="ground field")


def ideal_membership(p, ideal, A: SuperAlgebra) -> Membership:
    """Decide ``p in (ideal) + relations(A)`` up to the degree cap."""
    p = A.element(p)
    gens = []
    for g in ideal:
        g = A.element(g)
        gens += [x for x in g.parts() if x]
    B = SuperAlgebra(A.even, A.odd, A.relations + tuple(gens), A.field, A.degree_cap)
    member = True
    for part in p.parts():
        if part and not B.normal_form(part).is_zero():
            member = False
    if member:
        return Membership.MEMBER
    if B.complete or p.degree() <= B.degree_cap:
        return Membership.NOT_MEMBER_UP_TO
    return Membership.INCONCLUSIVE


# -- homomorphisms -----------------------------------------------------------

class SuperAlgebraHom:
    """Substitution of generator images; validity is checked by ``check_hom``."""

    def __init__(self, source: SuperAlgebra, target: SuperAlgebra, images: Mapping, name=""):
        self.source, self.target, self.name = source, target, name
        missing = [g for g in source.generators if g not in images]
        if missing:
            raise ValueError(f"no image given for generators {missing}")
        extra = [g for g in images if g not in source.generators]
        if extra:
            raise ValueError(f"images given for unknown generators {extra}")
        self.images = {g: target.normal_form(target.element(images[g])) for g in source.generators}
        self._inverse = None

    @classmethod
    def identity(cls, A):
        h = cls(A, A, {g: A.gen(g) for g in A.generators}, name="id")
        h._inverse = h
        return h

    def is_identity(self):
        return self.source is self.target and all(
            self.images[g] == self.source.gen(g) for g in self.source.generators)

    def __call__(self, p) -> SuperPolynomial:
        p = self.source.element(p)
        T = self.target
        src = self.source.sig
        ev = [self.images[g] for g in src.even]
        od = [self.images[g] for g in src.odd]
        out = T.zero
        powers = {}
        for m, c in p.terms.items():
            term = T.one.scale(c)
            for i, e in enumerate(m[0]):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = T.normal_form(ev[i] ** e)
                    term = term * powers[key]
            for i in m[1]:
                term = term * od[i]
            out = out + term
        return T.normal_form(out)

    def then(self, other: "SuperAlgebraHom") -> "SuperAlgebraHom":
        """``other`` after ``self``."""
        if other.source is not self.target:
            raise ValueError("composition of homs with mismatched algebras")
        return SuperAlgebraHom(self.source, other.target,
                               {g: other(self.images[g]) for g in self.source.generators})

    def equals(self, other: "SuperAlgebraHom") -> bool:
        return (self.source is other.source and self.target is other.target
                and all(self.target.equal(self.images[g], other.images[g]) for g in self.source.generators))

    def differing_generator(self, other):
        for g in self.source.generators:
            if not self.target.equal(self.images[g], other.images[g]):
                return g
        return None

    def inverse(self, max_degree=4):
        if self._inverse is None:
            inv = find_inverse(self, max_degree)
            if inv is not None:
                inv._inverse = self
            self._inverse = inv if inv is not None else False
        return self._inverse or None

    def __repr__(self):
        body = ", ".join(f"{g} -> {self.images[g]}" for g in self.source.generators)
        return f"Hom({self.source.name or '?'} -> {self.target.name or '?'}: {body})"


def check_hom(h: SuperAlgebraHom) -> Report:
    rep = Report(f"hom {h.name or repr(h)}")
    for g in h.source.generators:
        want = h.source.sig.parity_of(g)
        img = h.images[g]
        if img.parity() not in (want,) and not img.is_zero():
            rep.add("ParityViolation", f"{g} (parity {want}) maps to {img}", generator=g, image=str(img))
    if rep.errors:
        return rep
    for r in h.source.relations:
        img = h(r)
        if not img.is_zero():
            status = Membership.NOT_MEMBER_UP_TO if h.target.certain(img) else Membership.INCONCLUSIVE
            if status is Membership.INCONCLUSIVE:
                rep.inconclusive("Inconclusive", f"relation {r} maps to {img} beyond the degree cap",
                                 relation=str(r))
            else:
                rep.add("RelationNotPreserved", f"relation {r} maps to {img} != 0",
                        relation=str(r), image=str(img))
    return rep


def preimage(h: SuperAlgebraHom, b, max_degree=4):
    """Bounded search for ``a`` with ``h(a) == b``; returns None if none found."""
    b = h.target.normal_form(b)
    par = b.parity()
    parities = [par] if par is not None else [None]
    for d in range(max_degree + 1):
        monos = h.source.standard_monomials(d, parities[0])
        cols = [h(h.source.mono(m)).terms for m in monos]
        sol = solve(cols, b.terms, h.source.field)
        if sol is not None:
            return SuperPolynomial(h.source.sig, {m: c for m, c in zip(monos, sol) if c})
    return None


def find_inverse(h: SuperAlgebraHom, max_degree=4):
    """Two-sided inverse found generator by generator, or None."""
    if h.is_identity():
        return h
    if not check_hom(h).ok:
        return None
    imgs = {}
    for g in h.target.generators:
        a = preimage(h, h.target.gen(g), max_degree)
        if a is None:
            return None
        imgs[g] = a
    inv = SuperAlgebraHom(h.target, h.source, imgs)
    if not check_hom(inv).ok:
        return None
    if not all(h.source.equal(inv(h.images[g]), h.source.gen(g)) for g in h.source.generators):
        return None
    return inv


def is_isomorphism(h: SuperAlgebraHom, max_degree=4) -> bool:
    return h.inverse(max_degree) is not None


# -- localization and locality -----------------------------------------------

def localize(A: SuperAlgebra, s, var="t", name=""):
    """``A[t] / (s*t - 1)`` together with the canonical map ``A -> A_s``."""
    s = A.element(s)
    if s.parity() != 0:
        raise ValueError(f"can only invert even elements, got {s}")
    if A.normal_form(s).is_zero():
        raise ZeroDenominator(f"{s} is zero in {A.presentation()}")
    while var in A.generators:
        var += "'"
    As = SuperAlgebra(A.even + (var,), A.odd, (), A.field, A.degree_cap)
    lift = {g: As.gen(g) for g in A.generators}
    rels = [_transport(r, A, As, lift) for r in A.relations]
    rels.append(_transport(s, A, As, lift) * As.gen(var) - 1)
    B = SuperAlgebra(A.even + (var,), A.odd, rels, A.field, A.degree_cap, name or f"{A.name}_loc")
    return B, SuperAlgebraHom(A, B, {g: B.gen(g) for g in A.generators})


def _transport(p, A, B, images):
    """Substitute generator images without normalizing (no homomorphism check)."""
    out = B.zero
    for m, c in p.terms.items():
        term = B.one.scale(c)
        for name, e in zip(A.even, m[0]):
            term = term * images[name] ** e
        for i in m[1]:
            term = term * images[A.odd[i]]
        out = out + term
    return out


def reduced_even_quotient(A: SuperAlgebra) -> SuperAlgebra:
    """A modulo the odd generators and every even generator detected nilpotent."""
    base = A.with_relations([A.gen(o) for o in A.odd])
    nilpotent = []
    for x in A.even:
        k = 1
        while k <= A.degree_cap:
            if base.is_zero(A.gen(x) ** k):
                nilpotent.append(A.gen(x))
                break
            k += 1
    return base.with_relations(nilpotent) if nilpotent else base


def certify_local(A: SuperAlgebra) -> Locality:
    if A.locality:
        return Locality.CERTIFIED
    R = reduced_even_quotient(A)
    if R.is_zero_algebra():
        return Locality.NOT_CERTIFIED
    if all(R.normal_form(R.gen(x)).constant_value() is not None for x in A.even):
        return Locality.CERTIFIED
    return Locality.NOT_CERTIFIED


def residue(A: SuperAlgebra, p):
    """Image of ``p`` in the residue field, when the reduced quotient is the ground field."""
    R = reduced_even_quotient(A)
    return R.normal_form(A.element(p)).constant_value()
