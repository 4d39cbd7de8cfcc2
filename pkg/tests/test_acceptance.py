"""Acceptance suite: one test per criterion, each logging a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py`` or ``python3 scripts/run_acceptance.py``.
"""

import random
import time
from contextlib import contextmanager

import pytest

from catalog import _odd_flip, probe_library, separated_not_sheaf, trivial_examples
from oracles import sheaf_by_sections, subordinate_by_sets, violated_axioms_by_sets
from strategies import FREE, QUOTIENT, coarsening, random_homogeneous, random_presheaf, random_topology, small_open_site
from supersite import fixtures as fx
from supersite.errors import CocycleViolation
from supersite.finitetop import show_open
from supersite.gluing import glue, validate_gluing
from supersite.presheaf import (FunctorOfPoints, brute_force_sheaf_oracle, check_functoriality, check_sheaf_witness,
                                compatible_families, is_separated, is_sheaf)
from supersite.representability import represent, trivial_presentation
from supersite.site import (Covering, chart_witnesses, check_subcanonical_witness, check_topology,
                            global_super_topology, is_subordinate, open_site, union_topology, violated_axioms)
from supersite.superalgebra import SuperAlgebra
from supersite.superspace import (SpaceMorphism, SuperSpace, find_isomorphism, fibered_product_open, global_sections,
                                  is_open_embedding, morphism_difference, restrict)

BUDGET = 60.0


@contextmanager
def criterion(log, number, title):
    """Time the block and log ``PASS`` or ``FAIL`` with the collected summary."""
    info = {}
    start = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - start
        assert elapsed < BUDGET, f"took {elapsed:.1f}s"
    except BaseException as exc:
        line = f"FAIL criterion {number} ({title}): {exc!s:.200}"
        log.append(line)
        print(line)
        raise
    summary = ", ".join(f"{k} {v}" for k, v in info.items())
    line = f"PASS criterion {number} ({title}): {summary}; {time.perf_counter() - start:.2f}s"
    log.append(line)
    print(line)


def fixture_spaces():
    return [fx.affine_11(), *fx.chart_patches(), fx.p1_model("p11"), fx.p1_model("twisted"),
            fx.p1_model("trivial"), fx.glued_p1("p11").space, fx.glued_p1("twisted").space,
            glue(fx.three_chart_datum()).space]


# --- 1 ---------------------------------------------------------------------------------

def _mutants(space):
    """Four single-covering deletions with the axiom each is designed to break.

    Coverings are named from opens directly: ``V`` is the first proper
    nonempty open, ``top`` the whole space.
    """
    X = space()
    opens = X.sorted_opens()
    top = max(opens, key=len)
    V = next(U for U in opens if U and U != top)
    lab = show_open

    def inc(A, B):
        return f"id:{lab(B)}" if A == B else f"{lab(A)}->{lab(B)}"

    empty = frozenset()
    return X, [
        ("iso covering of the whole space", Covering.of(lab(top), [inc(top, top)]), 1),
        (f"iso covering of {lab(V)}", Covering.of(lab(V), [inc(V, V)]), 1),
        (f"pullback to {lab(V)} of the covering by id and the empty open",
         Covering.of(lab(V), [inc(V, V), inc(empty, V)]), 2),
        (f"composite of the covering by id and {lab(V)} with the covering of {lab(V)} by id and the empty open",
         Covering.of(lab(top), [inc(top, top), inc(V, top), inc(empty, top)]), 3),
    ]


def test_criterion_1_topology_axioms(acceptance_log):
    with criterion(acceptance_log, 1, "topology axioms") as info:
        mutants = 0
        for space in (fx.sierpinski, fx.p1_base, fx.square):
            T = union_topology(open_site(space()))
            assert check_topology(T).ok, space.__name__
            assert violated_axioms_by_sets(T) == []
            X, cases = _mutants(space)
            for what, c, axiom in cases:
                assert c in T, (space.__name__, what)
                M = T.without(c)
                got = violated_axioms(check_topology(M))
                assert got == violated_axioms_by_sets(M), (space.__name__, what, got)
                assert got and got[0] == axiom, (space.__name__, what, got)
                mutants += 1
        assert mutants == 12
        info.update(sites=3, mutants=mutants)


# --- 2 ---------------------------------------------------------------------------------

def test_criterion_2_sheaf_checker_vs_oracle(acceptance_log):
    with criterion(acceptance_log, 2, "sheaf checker vs oracle") as info:
        n, agree, sheaves = 0, 0, 0
        for seed in range(240):
            rng = random.Random(seed)
            R = small_open_site(rng, max_objects=4)
            F = random_presheaf(rng, R, max_values=4)
            assert len(R.objects) <= 4 and all(len(v) <= 4 for v in F.values.values())
            assert check_functoriality(F).ok
            T = union_topology(R)
            got = bool(is_sheaf(F, T))
            oracle = bool(brute_force_sheaf_oracle(F, T))
            assert oracle == sheaf_by_sections(F, T), seed
            n += 1
            agree += got == oracle
            sheaves += oracle
        assert n >= 200 and agree == n, f"{agree}/{n} agree"
        assert 0 < sheaves < n
        F = separated_not_sheaf()
        T = union_topology(F.registry)
        c = Covering.of("{a, b}", ["{a}->{a, b}", "{b}->{a, b}"])
        assert len(compatible_families(F, c)) == 4 and len(F.values["{a, b}"]) == 2
        assert is_separated(F, T)
        assert not is_sheaf(F, T) and not brute_force_sheaf_oracle(F, T)
        info.update(presheaves=n, agreement=f"{agree}/{n}", sheaves=sheaves, separated_fixture="classified")


# --- 3 ---------------------------------------------------------------------------------

def test_criterion_3_subordination_transfer(acceptance_log):
    with criterion(acceptance_log, 3, "subordination transfer") as info:
        triples, strict, seed = 0, 0, 0
        while triples < 50:
            rng = random.Random(1000 + seed)
            seed += 1
            R = small_open_site(rng)
            T2 = random_topology(rng, R, seeds=rng.randint(1, 3))
            T = coarsening(rng, T2)
            F = next((F for F in (random_presheaf(rng, R) for _ in range(30)) if is_sheaf(F, T2)), None)
            if F is None:
                continue
            assert is_subordinate(T, T2) and subordinate_by_sets(T, T2)
            assert brute_force_sheaf_oracle(F, T2)
            assert is_sheaf(F, T), f"seed {1000 + seed - 1}"
            triples += 1
            strict += not is_subordinate(T2, T)
        assert seed < 500
        info.update(triples=triples, strictly_coarser=strict)


# --- 4 ---------------------------------------------------------------------------------

def test_criterion_4_gluing(acceptance_log):
    with criterion(acceptance_log, 4, "gluing") as info:
        dims = {}
        for twist, expected in (("p11", "1|0"), ("twisted", "1|2")):
            D = fx.chart_datum(twist)
            assert validate_gluing(D).ok
            G = glue(D)
            gs = global_sections(G.space, [e.image() for e in G.embeddings.values()], degree_cap=8)
            assert gs.superdimension == expected, (twist, gs.superdimension)
            assert gs.stabilized and gs.stable_from is not None and gs.stable_from < 8
            dims[twist] = f"{gs.superdimension} from degree {gs.stable_from}"
        assert validate_gluing(fx.three_chart_datum()).ok
        perturbed = 0
        for pair in fx.THREE_CHART_TRANSITIONS:
            D = fx.three_chart_datum(perturb=pair)
            assert "CocycleViolation" in validate_gluing(D).codes(), pair
            with pytest.raises(CocycleViolation):
                glue(D)
            perturbed += 1
        info.update(P11=dims["p11"], XPi=dims["twisted"], perturbations_caught=f"{perturbed}/{perturbed}")


# --- 5 ---------------------------------------------------------------------------------

def test_criterion_5_fibered_products(acceptance_log):
    with criterion(acceptance_log, 5, "fibered products") as info:
        pairs = 0
        for X in fixture_spaces():
            incl = [restrict(X, U)[1] for U in X.base.sorted_opens()]
            maps = incl + [SpaceMorphism.identity(X)]
            for i in incl:
                for f in maps:
                    fp = fibered_product_open(i, f)
                    assert is_open_embedding(fp.pr2), (X.name, i, f)
                    assert morphism_difference(fp.pr1.then(i), fp.pr2.then(f)) is None
                    pairs += 1
            # identity closed forms: X x_X T = T and U x_X X = U
            for f in incl:
                fp = fibered_product_open(SpaceMorphism.identity(X), f)
                assert fp.space is f.source
                assert morphism_difference(fp.pr2, SpaceMorphism.identity(f.source)) is None
                assert morphism_difference(fp.pr1, f) is None
                fp = fibered_product_open(f, SpaceMorphism.identity(X))
                assert fp.space.points == f.image()
                assert morphism_difference(fp.pr2, restrict(X, f.image())[1]) is None
        Y, f0, finf = fx.chart_maps()
        for g in probe_library(fx.two_chart_functor("p11", Y)):
            for i in (f0, finf):
                assert is_open_embedding(fibered_product_open(i, g).pr2)
                pairs += 1
        # disjoint images: the empty space
        for X in fixture_spaces():
            for U in X.base.sorted_opens():
                for V in X.base.sorted_opens():
                    if U and V and not (U & V):
                        fp = fibered_product_open(restrict(X, U)[1], restrict(X, V)[1])
                        assert not fp.space.points and fp.space.sections[frozenset()].is_zero_algebra()
                        pairs += 1
        L = SuperAlgebra(["x"], [], name="L")
        two = SuperSpace(fx.two_point_discrete(), {frozenset("a"): L, frozenset("b"): L}, name="two lines")
        fp = fibered_product_open(restrict(two, ["a"])[1], restrict(two, ["b"])[1])
        assert not fp.space.points and fp.space.sections[frozenset()].is_zero_algebra()
        info.update(spaces=len(fixture_spaces()), products=pairs + 1)


# --- 6 ---------------------------------------------------------------------------------

def test_criterion_6_representability(acceptance_log):
    with criterion(acceptance_log, 6, "representability") as info:
        CF = fx.two_chart_functor("p11")
        Y = CF.functor.target
        probes = probe_library(CF)
        R = represent(CF, global_super_topology(Y), [chart_witnesses(Y)], probes, elements=probes)
        assert R.report.ok, R.report.codes()
        assert find_isomorphism(R.space, fx.glued_p1("p11").space) is not None
        morphisms = [R.eta(g) for g in probes] + list(R.glued.embeddings.values()) + [SpaceMorphism.identity(R.space)]
        for g in probes:
            assert CF.functor.equal(R.delta(R.eta(g)), g), g.name
        for t in morphisms:
            assert morphism_difference(R.eta(R.delta(t)), t) is None
        non_chart = [g for g in probes if g is not CF.chart("U0").map and g is not CF.chart("Uinf").map]
        assert len(probes) >= 10 and len(morphisms) >= 10 and len(non_chart) >= 8
        spaces = fixture_spaces()
        for X in spaces:
            T = represent(trivial_presentation(X), elements=[SpaceMorphism.identity(X)])
            assert T.report.ok and find_isomorphism(T.space, X) is not None, X.name
        info.update(delta_eta=len(probes), eta_delta=len(morphisms), non_chart_probes=len(non_chart),
                    trivial_presentations=len(spaces))


# --- 7 ---------------------------------------------------------------------------------

def test_criterion_7_subcanonicity(acceptance_log):
    with criterion(acceptance_log, 7, "subcanonicity") as info:
        spaces = fixture_spaces()
        for X in spaces:
            w = chart_witnesses(X)
            assert check_subcanonical_witness([w]).ok, X.name
            assert check_sheaf_witness(FunctorOfPoints(X), w.cover, w.parts).ok, X.name
        Y = fx.p1_model()
        auto = _odd_flip(restrict(Y, ["inf", "eta"])[0])
        planted = chart_witnesses(Y, [["0", "eta"], ["inf", "eta"]], twist=(1, auto))
        assert check_subcanonical_witness([planted]).codes() == ["IncompatibleOnOverlap"]
        info.update(fixtures=len(spaces), planted="IncompatibleOnOverlap")


# --- 8 ---------------------------------------------------------------------------------

def _sign(a, b):
    return -1 if a.parity() and b.parity() else 1


def test_criterion_8_algebra(acceptance_log):
    with criterion(acceptance_log, 8, "algebra") as info:
        rng = random.Random(8)
        checked = 0
        for A in (FREE, QUOTIENT):
            N = A.normal_form
            for _ in range(500):
                a, b, c = (random_homogeneous(rng, A) for _ in range(3))
                assert N(a * b) == N((b * a).scale(_sign(a, b)))
                assert N(N(a * b) * c) == N(a * N(b * c))
                for p in (a, b, c, a * b * c):
                    n = N(p)
                    assert N(n) == n
                checked += 1
        assert checked == 1000
        examples = trivial_examples()
        for ex in examples:
            ex.check()
        info.update(triples=checked, trivial_examples=len(examples))


# --- 9 ---------------------------------------------------------------------------------

def test_criterion_9_cli(acceptance_log):
    import json

    from test_cli import DOCS, FIXTURES, REGEN
    from supersite.cli.parser import parse
    from supersite.cli.printer import format_document

    with criterion(acceptance_log, 9, "CLI") as info:
        for doc in DOCS:
            d = parse((FIXTURES / f"{doc}.ss").read_text())
            assert d.ok, doc
            once = format_document(d)
            again = parse(once)
            assert again.ok and again.declarations == d.declarations and format_document(again) == once
        codes = set()
        for doc, command, extra, expected in REGEN.CASES:
            golden = json.loads((FIXTURES / "golden" / REGEN.golden_name(doc, command, extra)).read_text())
            first = REGEN.run_case(doc, command, extra)
            second = REGEN.run_case(doc, command, extra)
            assert first == second == (expected, golden), (doc, command)
            codes.add(first[0])
        assert codes == {0, 1, 2}
        info.update(documents=len(DOCS), goldens=len(REGEN.CASES), exit_codes=sorted(codes))
