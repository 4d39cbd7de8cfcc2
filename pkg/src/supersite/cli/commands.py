"""Commands run against a parsed document, each producing a list of reports."""

from __future__ import annotations

from ..errors import SizeBoundExceeded, SupersiteError
from ..presheaf import brute_force_sheaf_oracle, check_functoriality, is_separated, is_sheaf
from ..report import Report, Verdict
from ..representability import represent
from ..site import chart_witnesses, check_topology, is_subordinate, slice_site, violated_axioms
from ..superspace import SpaceMorphism, check_superspace, find_isomorphism, global_sections
from .builder import BuildError, Environment

SCHEMA = "supersite-report/1"


class UnknownCommand(Exception):
    pass


def _names(doc, kind, wanted):
    names = [d.name for d in doc.of_kind(kind)]
    if wanted:
        missing = [w for w in wanted if w not in names]
        if missing:
            raise BuildError("UnresolvedReference", f"no {kind} named {', '.join(map(repr, missing))}")
        return list(wanted)
    return names


def _guard(name, fn):
    """Run ``fn`` and turn build or engine errors into a failed report."""
    try:
        return fn()
    except BuildError as exc:
        rep = Report(name)
        where = f" at {exc.span}" if exc.span else ""
        rep.add(exc.code, f"{exc}{where}")
        inner = getattr(exc, "report", None)
        if inner is not None:
            rep.extend(inner)
        return rep
    except SupersiteError as exc:
        rep = Report(name)
        rep.add(exc.code, str(exc))
        inner = exc.witness.get("report")
        if isinstance(inner, Report):
            rep.extend(inner)
        return rep


def cmd_check_topology(env: Environment, opts):
    out = []
    for name in _names(env.doc, "topology", opts.topology):
        def run(name=name):
            rep = check_topology(env.get("topology", name))
            rep.name = f"topology {name}"
            rep.details["violated_axioms"] = violated_axioms(rep)
            return rep
        out.append(_guard(f"topology {name}", run))
    return out


def cmd_compare_topologies(env: Environment, opts):
    names = _names(env.doc, "topology", opts.topology)
    if len(names) != 2:
        raise BuildError("Usage", "compare-topologies needs exactly two topologies (use --topology twice)")
    a, b = names

    def run():
        Ta, Tb = env.get("topology", a), env.get("topology", b)
        rep = Report(f"compare {a} with {b}")
        ab, ba = is_subordinate(Ta, Tb), is_subordinate(Tb, Ta)
        rep.details[f"{a} subordinate to {b}"] = bool(ab)
        rep.details[f"{b} subordinate to {a}"] = bool(ba)
        rep.details["equivalent"] = bool(ab) and bool(ba)
        for label, s in ((f"{a}<{b}", ab), (f"{b}<{a}", ba)):
            if not s:
                rep.details[f"unrefined covering for {label}"] = str(s.witness)
        return rep
    return [_guard(f"compare {a} with {b}", run)]


def cmd_slice(env: Environment, opts):
    out = []
    for name in _names(env.doc, "topology", opts.topology):
        def run(name=name):
            T = env.get("topology", name)
            objs = opts.object or T.registry.objects
            reps = []
            for o in objs:
                S = slice_site(T, o)
                rep = check_topology(S)
                rep.name = f"slice of {name} over {o}"
                rep.details["objects"] = list(S.registry.objects)
                rep.details["violated_axioms"] = violated_axioms(rep)
                reps.append(rep)
            return reps
        res = _guard(f"slice {name}", run)
        out.extend(res if isinstance(res, list) else [res])
    return out


def cmd_check_sheaf(env: Environment, opts):
    out = []
    for pname in _names(env.doc, "presheaf", opts.presheaf):
        decl = env.doc.named("presheaf", pname)
        tnames = [t for t in _names(env.doc, "topology", opts.topology)
                  if env.doc.named("topology", t).site == decl.site]
        for tname in tnames:
            def run(pname=pname, tname=tname):
                F = env.get("presheaf", pname)
                T = env.get("topology", tname)
                rep = Report(f"presheaf {pname} on {tname}")
                rep.extend(check_functoriality(F))
                if rep.errors:
                    return rep
                sep = is_separated(F, T)
                ans = is_sheaf(F, T)
                rep.details["separated"] = bool(sep)
                rep.details["sheaf"] = bool(ans)
                try:
                    oracle = brute_force_sheaf_oracle(F, T)
                    rep.details["oracle_agrees"] = bool(oracle) == bool(ans)
                    if bool(oracle) != bool(ans):
                        rep.add("OracleDisagreement", "is_sheaf and the brute-force oracle disagree")
                except SizeBoundExceeded as exc:
                    rep.details["oracle_agrees"] = None
                    rep.warn("OracleSkipped", str(exc))
                if not ans:
                    w = ans.as_dict()
                    if ans.families is not None:
                        rep.details["compatible_families"] = ans.families
                    rep.add("NotASheaf", f"{ans.kind} over {w['covering']}", covering=w["covering"],
                            **w["witness"])
                return rep
            out.append(_guard(f"presheaf {pname} on {tname}", run))
    return out


def cmd_check_superspace(env: Environment, opts):
    out = []
    for name in _names(env.doc, "superspace", opts.superspace):
        def run(name=name):
            return check_superspace(env.get("superspace", name), strict_local=opts.strict_local)
        out.append(_guard(f"superspace {name}", run))
    return out


def cmd_glue(env: Environment, opts):
    out = []
    for name in _names(env.doc, "gluing", opts.gluing):
        def run(name=name):
            G = env.get("gluing", name)
            rep = Report(f"gluing {name}")
            rep.extend(G.report)
            X = G.space
            rep.details["points"] = sorted(map(str, X.points))
            rep.details["opens"] = len(X.base.opens)
            rep.details["classes"] = {c: f"{i}:{p}" for c, (i, p) in G.classes.items()}
            return rep
        out.append(_guard(f"gluing {name}", run))
    return out


def _sections_report(label, X, cover, cap):
    gs = global_sections(X, cover, cap)
    rep = Report(f"sections of {label}: Gamma dimension {gs.superdimension}")
    rep.details["Gamma dimension"] = gs.superdimension
    rep.details["dims_by_degree"] = [f"{e}|{o}" for e, o in gs.dims_by_degree]
    rep.details["stabilized"] = gs.stabilized
    if gs.stable_from is not None:
        rep.details["stable_from"] = gs.stable_from
    if gs.algebra is None and not gs.stabilized:
        rep.inconclusive("NotStabilized", "dimension still changes at the degree cap")
    return rep


def cmd_sections(env: Environment, opts):
    out = []
    cap = opts.degree_cap
    chosen_s = opts.superspace or []
    chosen_g = opts.gluing or []
    if not chosen_s and not chosen_g:
        chosen_s = [d.name for d in env.doc.of_kind("superspace")]
        chosen_g = [d.name for d in env.doc.of_kind("gluing")]
    for name in _names(env.doc, "superspace", chosen_s) if chosen_s else []:
        out.append(_guard(f"sections of {name}", lambda name=name: _sections_report(
            name, env.get("superspace", name), None, cap)))
    for name in _names(env.doc, "gluing", chosen_g) if chosen_g else []:
        def run(name=name):
            G = env.get("gluing", name)
            cover = [e.image() for e in G.embeddings.values()]
            return _sections_report(name, G.space, cover, cap)
        out.append(_guard(f"sections of {name}", run))
    return out


def cmd_represent(env: Environment, opts):
    out = []
    for name in _names(env.doc, "functor", opts.functor):
        out.append(_guard(f"represent {name}", lambda name=name: _represent_report(env, name, opts)))
    return out


def _represent_report(env, name, opts):
    decl = env.doc.named("functor", name)
    CF = env.get("functor", name)
    Y = CF.functor.target
    probes = [c.map for c in CF.charts] + [SpaceMorphism.identity(Y)] + env.probes(decl)
    T = env.get("topology", opts.topology[0]) if opts.topology else None
    finer = env.get("topology", opts.corollary_mode) if opts.corollary_mode else None
    R = represent(CF, T, [chart_witnesses(Y)], probes, elements=probes, finer=finer)
    morphisms = list(R.glued.embeddings.values()) + [SpaceMorphism.identity(R.space)]
    rep = Report(f"represent {name}", evidence="witness-based")
    rep.extend(R.report)
    rep.extend(R.round_trip((), morphisms), prefix="round-trip: ")
    X = R.space
    rep.details["points"] = sorted(map(str, X.points))
    rep.details["isomorphic_to_target"] = find_isomorphism(X, Y) is not None
    rep.details["round_trip_elements"] = len(probes)
    rep.details["round_trip_morphisms"] = len(morphisms)
    cover = [e.image() for e in R.glued.embeddings.values()]
    rep.details["Gamma dimension"] = global_sections(X, cover, opts.degree_cap).superdimension
    if not rep.details["isomorphic_to_target"]:
        rep.add("NotIsomorphic", f"glued space is not isomorphic to {Y.name}")
    return rep


COMMANDS = {
    "check-topology": cmd_check_topology,
    "compare-topologies": cmd_compare_topologies,
    "slice": cmd_slice,
    "check-sheaf": cmd_check_sheaf,
    "check-superspace": cmd_check_superspace,
    "glue": cmd_glue,
    "sections": cmd_sections,
    "represent": cmd_represent,
}


def overall(reports):
    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


EXIT_CODES = {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.INCONCLUSIVE: 2}


def run(command, doc, opts):
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}; known: {', '.join(COMMANDS)}")
    env = Environment(doc, degree_cap=opts.degree_cap)
    try:
        reports = COMMANDS[command](env, opts)
    except BuildError as exc:
        rep = Report(command)
        rep.add(exc.code, str(exc))
        reports = [rep]
    return reports
