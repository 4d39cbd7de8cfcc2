"""Canonical text for documents; ``parse(format_document(d)) == d``."""

from __future__ import annotations

import re

from . import ast as A


PLAIN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z][A-Za-z0-9_']*)*|\d+")


def _pt(p) -> str:
    return p if PLAIN.fullmatch(p) else f'"{p}"'


def _open(U) -> str:
    return "{" + ", ".join(_pt(p) for p in U) + "}"


def _maps(pairs) -> str:
    return ", ".join(f"{g} -> {e}" for g, e in pairs)


def _obj(o) -> str:
    return _open(o) if isinstance(o, tuple) else o


def _ref(r: A.SpaceRef) -> str:
    return r.name if r.open is None else f"{r.name}|{_open(r.open)}"


def format_algebra(a: A.AlgebraLit) -> str:
    fld = "Q" if a.field == 0 else f"GF({a.field})"
    body = ", ".join(a.even)
    if a.odd:
        body += (" | " if body else "| ") + ", ".join(a.odd)
    out = f"{fld}[{body}]"
    if a.relations:
        out += " / (" + ", ".join(a.relations) + ")"
    return out


def _atom(m: A.MorphismAtom) -> str:
    return m.name if m.op == "ref" else f"{m.op} {_ref(m.space)}"


def format_declaration(d) -> str:
    k = d.kind
    if k == "algebra":
        return f"algebra {d.name} = {format_algebra(d.value)}"
    if k == "space":
        if d.opens is None:
            return f"space {d.name} = discrete({', '.join(_pt(p) for p in d.points)})"
        lines = [f"space {d.name} {{", f"  points {', '.join(_pt(p) for p in d.points)}"]
        lines.append(f"  {'basis' if d.basis else 'opens'} {', '.join(_open(U) for U in d.opens)}")
        return "\n".join(lines + ["}"])
    if k == "superspace":
        if d.affine:
            return f"superspace {d.name} = affine({d.affine})"
        lines = [f"superspace {d.name} over {d.base} {{"]
        for s in d.sections:
            alg = s.algebra if isinstance(s.algebra, str) else format_algebra(s.algebra)
            lines.append(f"  section {_open(s.open)} = {alg}")
        for r in d.restrictions:
            lines.append(f"  restrict {_open(r.source)} -> {_open(r.target)} : {_maps(r.images)}")
        return "\n".join(lines + ["}"])
    if k == "morphism":
        if d.chain:
            return f"morphism {d.name} = " + " then ".join(_atom(a) for a in d.chain)
        lines = [f"morphism {d.name} : {_ref(d.source)} -> {_ref(d.target)} {{"]
        lines += [f"  point {_pt(p)} -> {_pt(q)}" for p, q in d.points]
        lines += [f"  stalk {_pt(p)} : {_maps(m)}" for p, m in d.stalks]
        return "\n".join(lines + ["}"])
    if k == "site":
        if d.generator:
            return f"site {d.name} = {d.generator}({d.of})"
        lines = [f"site {d.name} {{"]
        if d.objects:
            lines.append(f"  objects {', '.join(d.objects)}")
        lines += [f"  arrow {a.name} : {a.source} -> {a.target}" for a in d.arrows]
        lines += [f"  compose {g} . {f} = {h}" for g, f, h in d.composites]
        lines += [f"  pullback {f}, {g} = {P} via {p1}, {p2}" for f, g, P, p1, p2 in d.pullbacks]
        return "\n".join(lines + ["}"])
    if k == "topology":
        head = f"topology {d.name} on {d.site}" + (f" = {d.base}" if d.base else "")
        if not d.statements:
            return head
        lines = [head + " {"]
        for s in d.statements:
            members = ", ".join(_obj(m) for m in s.members)
            lines.append(f"  {s.op} {_obj(s.target)} :" + (f" {members}" if members else ""))
        return "\n".join(lines + ["}"])
    if k == "presheaf":
        lines = [f"presheaf {d.name} on {d.site} {{"]
        for U, vals in d.values:
            lines.append(f"  values {_obj(U)} :" + (f" {', '.join(vals)}" if vals else ""))
        for f, pairs in d.restrictions:
            arrow = f if isinstance(f, str) else f"{_open(f[0])} -> {_open(f[1])}"
            lines.append(f"  restrict {arrow} :" + (" " + ", ".join(f"{x} -> {y}" for x, y in pairs) if pairs else ""))
        return "\n".join(lines + ["}"])
    if k == "gluing":
        lines = [f"gluing {d.name} {{"]
        if d.patches:
            lines.append(f"  patch {', '.join(d.patches)}")
        lines += [f"  overlap {i}, {j} : {_open(a)}, {_open(b)}" for i, j, a, b in d.overlaps]
        lines += [f"  transition {i} -> {j} = {m}" for i, j, m in d.transitions]
        return "\n".join(lines + ["}"])
    if k == "functor":
        lines = [f"functor {d.name} = points({_ref(d.target)}) {{"]
        lines += [f"  chart {c} via {m}" for c, m in d.charts]
        lines += [f"  overlap {i}, {j} via {a}, {b}" for i, j, a, b in d.overlaps]
        if d.probes:
            lines.append(f"  probe {', '.join(d.probes)}")
        return "\n".join(lines + ["}"])
    raise ValueError(f"unknown declaration kind {k}")


def format_document(doc: A.Document) -> str:
    return "\n\n".join(format_declaration(d) for d in doc.declarations) + "\n"
