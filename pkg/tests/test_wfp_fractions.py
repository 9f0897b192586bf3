from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from fraclocal.bicat import (
    BICAT_FIXTURES, WfpSquare, diamond_ghost, fixture_w_variants, is_weak_fiber_product,
    trivial_2category, with_z2_cells, wfp_failure,
)
from fraclocal.bf_fractions import POLICIES, build_choice_table, check_bf_axioms, localize_bicategory
from fraclocal.cf_fractions import check_condition_d, check_condition_e, is_strong_fraction_pullback
from fraclocal.fincat import MorClass, SizeError, arrow_ext, diamond, double_diamond
from fraclocal.wfp_fractions import (
    SUITE_FIXTURES, SUITE_PROPERTIES, AbcInput, ProvenanceError, b_completions, b_instances,
    build_general_wfp, build_unit_diagram, candidates, check_abc, check_condition_a,
    check_condition_b, check_condition_c, condition_a_completion, cospans, general_wfp_data,
    verify_theorem_suite,
)

import oracles


def admissible_corpus():
    """Every (fixture, W-variant) pair satisfying the axioms and fitting the size caps."""
    out = []
    for key, mk in BICAT_FIXTURES.items():
        B = mk()
        for wn, W in fixture_w_variants(key, B).items():
            if check_bf_axioms(B, W).ok:
                out.append((key, wn))
    return out


CORPUS = admissible_corpus()
_locs = {}


def setup(key, wn, policy="c3"):
    k = (key, wn, policy)
    if k not in _locs:
        B = BICAT_FIXTURES[key]()
        W = fixture_w_variants(key, B)[wn]
        try:
            L = localize_bicategory(B, W, build_choice_table(B, W, policy))
        except SizeError:
            L = None
        _locs[k] = (B, W, L)
    return _locs[k]


def ids(B):
    return MorClass.identities(B, "ids")


def diamond_input(B=None, W=None):
    B = B or trivial_2category(diamond())
    W = W or ids(B)
    return AbcInput.named(B, W, "f1", "f2", "c", "p1", "p2", "i_d")


# -- condition (a) -------------------------------------------------------------------

def test_a_passes_on_diamond_meet():
    assert check_condition_a(diamond_input()).ok


def test_a_fails_on_double_diamond_at_the_other_minimum():
    B = trivial_2category(double_diamond())
    inp = AbcInput.named(B, ids(B), "f1", "f2", "c1", "p11", "p12", "i_d1")
    r = check_condition_a(inp)
    assert not r.ok
    assert r.instance == (B.obj("c2"), B.mor("p21"), B.mor("p22"), B.cell("i_d2"))


@pytest.mark.parametrize("key,wn", CORPUS[:40])
def test_the_cone_itself_is_completed_by_identities(key, wn):
    B, W, _ = setup(key, wn)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            comp = condition_a_completion(inp, inp.apex, inp.p1, inp.p2, inp.omega)
            assert comp is not None
            ic = B.id(inp.apex)
            # the identity factorisation is itself a completion
            assert B.i(ic) in B.isos(ic, ic)
            E = comp[0]
            assert B.source(comp[1]) == E and comp[1] in W


def test_a_cone_witness_on_diamond_is_the_identity():
    inp = diamond_input()
    B = inp.ambient
    c = B.obj("c")
    assert condition_a_completion(inp, c, inp.p1, inp.p2, inp.omega) == \
        (c, B.id(c), B.id(c), B.i(inp.p1), B.i(inp.p2))


def test_a_is_vacuous_without_cones():
    B = trivial_2category(double_diamond())
    # no object maps to both c1 and c2
    inp = AbcInput.named(B, ids(B), "id_c1", "id_c1", "c1", "id_c1", "id_c1", "i_id_c1")
    assert check_condition_a(inp).ok


# -- condition (b) -------------------------------------------------------------------

def test_b_on_thin_ambient_uses_identity_lifts():
    inp = diamond_input()
    B = inp.ambient
    insts = list(b_instances(inp))
    assert insts
    for D, t, t2, g1, g2 in insts:
        assert t == t2 and g1 == B.i(B.c1(inp.p1, t)) and g2 == B.i(B.c1(inp.p2, t))
        assert next(b_completions(inp, D, t, t2, g1, g2)) == (D, B.id(D), B.i(t))
    assert check_condition_b(inp).ok


@pytest.mark.parametrize("key", ["parallel-cone-iso", "diamond-z2", "arrow-z2", "diamond-ghost",
                                 "parallel-cone-trivial", "z2grp-z2"])
def test_b_with_identities_only_means_lifting_on_the_nose(key):
    B = BICAT_FIXTURES[key]()
    W = ids(B)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            for D, t, t2, g1, g2 in b_instances(inp):
                direct = [g for g in B.isos(t, t2)
                          if B.h(B.i(inp.p1), g) == g1 and B.h(B.i(inp.p2), g) == g2]
                comps = list(b_completions(inp, D, t, t2, g1, g2))
                assert [c[2] for c in comps] == direct
                assert all(c[1] == B.id(D) for c in comps)


def test_b_fails_with_two_unconnected_mediators():
    B = BICAT_FIXTURES["parallel-cone-trivial"]()
    inp = AbcInput.named(B, ids(B), "id_B", "id_B", "C", "p", "p", "i_p")
    r = check_condition_b(inp)
    assert not r.ok
    assert r.instance == (B.obj("D"), B.mor("t"), B.mor("t2"), B.cell("i_pt"), B.cell("i_pt"))
    # with an invertible 2-cell between t and t2 the same instance lifts
    B2 = BICAT_FIXTURES["parallel-cone-iso"]()
    inp2 = AbcInput.named(B2, ids(B2), "id_B", "id_B", "C", "p", "p", "i_p")
    assert check_condition_b(inp2).ok


# -- condition (c) -------------------------------------------------------------------

@pytest.mark.parametrize("key,wn", [kw for kw in CORPUS if kw[1] == "ids"])
def test_c_with_identities(key, wn):
    B, W, _ = setup(key, wn)
    if key == "diamond-ghost":
        pytest.skip("the ghost 2-cell is built to break (c)")
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            assert check_condition_c(inp).ok


def test_c_on_diamond_w():
    B = trivial_2category(diamond())
    W = MorClass.of(B, ["p1"])
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            assert check_condition_c(inp).ok


@pytest.mark.parametrize("key,wn", [kw for kw in CORPUS if kw[0].endswith("-trivial")])
def test_c_is_automatic_on_1_categories(key, wn):
    B, W, _ = setup(key, wn)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            assert check_condition_c(inp).ok


def test_c_fails_when_the_legs_kill_a_2_cell():
    B = diamond_ghost()
    inp = AbcInput.named(B, ids(B), "f1", "f2", "c", "p1", "p2", "i_d")
    r = check_abc(inp)
    assert r.a.ok and r.b.ok and not r.c.ok
    c = B.obj("c")
    assert r.c.instance[:5] == (c, B.id(c), B.id(c), B.cell("i_p1"), B.cell("i_p2"))
    assert r.c.instance[5:] == (c, B.id(c), B.cell("i_id_c"), c, B.id(c), B.cell("a"))
    L = localize_bicategory(B, ids(B))
    bad = wfp_failure(build_unit_diagram(inp, L))
    assert bad.condition == "A2" and bad.witness[2] == 2


# -- independent oracle ------------------------------------------------------------------

@pytest.mark.parametrize("key,wn", CORPUS)
def test_checkers_agree_with_name_level_oracle(key, wn):
    B, W, _ = setup(key, wn)
    P = oracles.Plain2(B)
    Wn = set(W.names())
    m, cl, ob = B.morphisms, B.cells, B.objects
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            r = check_abc(inp)
            expect = oracles.naive_abc(P, Wn, m[f1], m[f2], ob[inp.apex], m[inp.p1], m[inp.p2],
                                       cl[inp.omega])
            assert (r.a.ok, r.b.ok, r.c.ok) == expect, inp.describe()


# -- squares in the localization --------------------------------------------------------

def test_unit_diagram_with_identity_omega_is_identity_shaped():
    inp = diamond_input()
    L = localize_bicategory(inp.ambient, inp.W)
    sq = build_unit_diagram(inp, L)
    LB = L.bicat
    assert sq.omega == LB.i(LB.c1(sq.g1, sq.r1)) or LB.c1(sq.g1, sq.r1) != LB.c1(sq.g2, sq.r2)
    assert L.classes[sq.omega].rep.beta == inp.omega
    assert is_weak_fiber_product(sq)


def test_unit_diagram_identity_omega_on_z2_ambient():
    B = with_z2_cells(diamond())
    W = ids(B)
    L = localize_bicategory(B, W)
    inp = AbcInput.named(B, W, "p1", "p1", "c", "id_c", "id_c", "i_p1")
    sq = build_unit_diagram(inp, L)
    assert sq.omega == L.bicat.i(L.bicat.c1(sq.g1, sq.r1))
    twisted = build_unit_diagram(AbcInput.named(B, W, "p1", "p1", "c", "id_c", "id_c", "z_p1"), L)
    assert twisted.omega != sq.omega


def test_unit_diagram_omega_is_the_printed_class():
    B = with_z2_cells(diamond())
    W = ids(B)
    L = localize_bicategory(B, W)
    for inp in candidates(B, W, B.mor("f1"), B.mor("f2")):
        sq = build_unit_diagram(inp, L)
        c = inp.apex
        s = (c, B.id(c), B.c1(inp.f1, inp.p1))
        t = (c, B.id(c), B.c1(inp.f2, inp.p2))
        assert sq.omega == L.class_of(s, t, c, B.id(c), B.id(c), B.i(B.id(c)), inp.omega)


def test_unit_diagram_needs_matching_localization():
    inp = diamond_input()
    other = localize_bicategory(inp.ambient, MorClass.everything(inp.ambient))
    with pytest.raises(ProvenanceError):
        build_unit_diagram(inp, other)


def test_double_diamond_has_no_unit_wfp_over_the_cospan():
    B = trivial_2category(double_diamond())
    W = ids(B)
    L = localize_bicategory(B, W)
    inps = list(candidates(B, W, B.mor("f1"), B.mor("f2")))
    assert inps
    for inp in inps:
        assert not check_abc(inp).ok
        assert not is_weak_fiber_product(build_unit_diagram(inp, L))


# -- headline equivalence ----------------------------------------------------------------

@pytest.mark.parametrize("key,wn", CORPUS)
def test_abc_iff_unit_diagram_is_wfp(key, wn):
    B, W, L = setup(key, wn)
    if L is None:
        pytest.skip("localization exceeds the size caps")
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            assert check_abc(inp).ok == is_weak_fiber_product(build_unit_diagram(inp, L)), \
                inp.describe()


@pytest.mark.parametrize("policy", POLICIES)
@pytest.mark.parametrize("key,wn", [("diamond-z2", "all"), ("diamond-trivial", "p1"),
                                    ("arrow-ext-idem", "all"), ("diamond-ghost", "ids")])
def test_unit_verdict_is_choice_independent(key, wn, policy):
    B, W, L = setup(key, wn, policy)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            assert check_abc(inp).ok == is_weak_fiber_product(build_unit_diagram(inp, L))


def test_both_truth_values_occur():
    seen = set()
    for key, wn in CORPUS:
        B, W, L = setup(key, wn)
        if L is None:
            continue
        for f1, f2 in cospans(B):
            for inp in candidates(B, W, f1, f2):
                seen.add(check_abc(inp).ok)
    assert seen == {True, False}


# -- general weak fiber products ----------------------------------------------------------

def test_general_square_with_identity_w_collapses_to_unit_diagram():
    for key, wn in [("diamond-trivial", "ids"), ("diamond-z2", "all"), ("arrow-z2", "all")]:
        B, W, L = setup(key, wn)
        for f1, f2 in cospans(B):
            for inp in candidates(B, W, f1, f2):
                w1, w2 = B.id(B.source(f1)), B.id(B.source(f2))
                assert build_general_wfp(inp, w1, w2, L) == build_unit_diagram(inp, L)


def test_general_data_with_identity_legs_are_identities():
    B = with_z2_cells(diamond())
    W = ids(B)
    L = localize_bicategory(B, W)
    inp = AbcInput.named(B, W, "f1", "f2", "c", "p1", "p2", "i_d")
    data = general_wfp_data(inp, B.mor("id_b1"), B.mor("id_b2"), L)
    c = B.obj("c")
    assert data.u == (B.id(c), B.id(c)) and data.z == (B.id(c), B.id(c))
    assert data.tau == (B.i(B.mor("p1")), B.i(B.mor("p2")))
    assert data.mu == B.i(B.id(c))
    assert data.representative.beta == B.i(B.mor("d"))


def test_general_square_on_arrow_ext_is_wfp():
    B = trivial_2category(arrow_ext())
    W = MorClass.of(B, ["u"])
    L = localize_bicategory(B, W)
    u = B.mor("u")
    checked = 0
    for f1, f2 in cospans(B):
        if B.source(f1) != B.obj("Y"):
            continue
        for inp in candidates(B, W, f1, f2):
            if not is_weak_fiber_product(build_unit_diagram(inp, L)):
                continue
            for w2 in W:
                if B.source(w2) == B.source(f2):
                    checked += 1
                    assert is_weak_fiber_product(build_general_wfp(inp, u, w2, L))
    assert checked


@pytest.mark.parametrize("key,wn", [kw for kw in CORPUS if kw[1] != "ids"][:30])
def test_general_square_is_wfp_whenever_unit_is(key, wn):
    B, W, L = setup(key, wn)
    if L is None:
        pytest.skip("localization exceeds the size caps")
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            if not check_abc(inp).ok:
                continue
            for w1, w2 in product(W, W):
                if B.source(w1) == B.source(f1) and B.source(w2) == B.source(f2):
                    assert is_weak_fiber_product(build_general_wfp(inp, w1, w2, L))


def test_general_square_rejects_legs_outside_w():
    B = trivial_2category(diamond())
    W = ids(B)
    L = localize_bicategory(B, W)
    inp = diamond_input(B, W)
    with pytest.raises(ValueError):
        build_general_wfp(inp, B.mor("f1"), B.mor("id_b2"), L)


# -- ambient and 1-categorical corollaries ---------------------------------------------------

@pytest.mark.parametrize("key,wn", CORPUS)
def test_ambient_wfp_implies_abc(key, wn):
    B, W, _ = setup(key, wn)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            if is_weak_fiber_product(WfpSquare(B, f1, f2, inp.apex, inp.p1, inp.p2, inp.omega)):
                assert check_abc(inp).ok


@pytest.mark.parametrize("key,wn", [kw for kw in CORPUS if kw[0].endswith("-trivial")])
def test_trivial_ambient_reduces_to_d_and_e(key, wn):
    B, W, _ = setup(key, wn)
    C = B.underlying_category()
    Wc = MorClass(C, W.members, wn)
    for f1, f2 in cospans(B):
        for inp in candidates(B, W, f1, f2):
            cand = (inp.apex, inp.p1, inp.p2)
            r = check_abc(inp)
            assert r.a.ok == check_condition_d(C, Wc, f1, f2, cand)
            assert r.c.ok
            assert (r.a.ok and r.b.ok) == (check_condition_d(C, Wc, f1, f2, cand)
                                          and check_condition_e(C, Wc, f1, f2, cand))
            assert r.ok == is_strong_fraction_pullback(C, Wc, f1, f2, cand)


# -- harness ---------------------------------------------------------------------------

@pytest.mark.parametrize("fixture_id", sorted(SUITE_FIXTURES))
def test_theorem_suite(fixture_id):
    rep = verify_theorem_suite(fixture_id)
    assert rep["ok"], rep
    assert set(rep["properties"]) == set(SUITE_PROPERTIES)
    assert rep["properties"]["abc-vs-unit-wfp"]["checked"] > 0


def test_suite_double_diamond_reports_both_sides_false():
    rep = verify_theorem_suite("double-diamond")
    assert rep["properties"]["abc-vs-unit-wfp"]["status"] == "pass"
    assert rep["properties"]["abc-vs-unit-wfp"]["detail"]["both_false"] > 0


def test_suite_property_subset_and_policy():
    rep = verify_theorem_suite("arrow", policy="lex", properties=("cf-bf-agreement", "localization"))
    assert set(rep["properties"]) == {"cf-bf-agreement", "localization"} and rep["ok"]


def test_suite_unknown_fixture():
    with pytest.raises(KeyError):
        verify_theorem_suite("nonesuch")


# -- properties ----------------------------------------------------------------------------

SMALL = [kw for kw in CORPUS if kw[0].split("-")[0] in ("arrow", "diamond", "z2grp", "parallel")]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_reported_failures_have_no_completion(kw, data):
    B, W, _ = setup(*kw)
    pairs = cospans(B)
    f1, f2 = data.draw(st.sampled_from(pairs))
    inps = list(candidates(B, W, f1, f2))
    if not inps:
        return
    inp = data.draw(st.sampled_from(inps))
    r = check_abc(inp)
    if not r.a.ok:
        assert condition_a_completion(inp, *r.a.instance) is None
    if not r.b.ok:
        assert next(b_completions(inp, *r.b.instance), None) is None
    # pass <=> no failing instance recorded
    for x in (r.a, r.b, r.c):
        assert x.ok == (x.instance is None)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_every_b_completion_satisfies_the_lifting_equation(kw, data):
    B, W, _ = setup(*kw)
    f1, f2 = data.draw(st.sampled_from(cospans(B)))
    for inp in candidates(B, W, f1, f2):
        for D, t, t2, g1, g2 in b_instances(inp):
            for F, u, gam in b_completions(inp, D, t, t2, g1, g2):
                assert u in W and B.source(u) == F
                assert B.h(B.i(inp.p1), gam) == B.h(g1, B.i(u))
                assert B.h(B.i(inp.p2), gam) == B.h(g2, B.i(u))


def test_abc_input_validation():
    B = trivial_2category(diamond())
    W = ids(B)
    with pytest.raises(ValueError):
        AbcInput.named(B, W, "f1", "p1", "c", "p1", "p2", "i_d")
    with pytest.raises(ValueError):
        AbcInput.named(B, W, "f1", "f2", "c", "p1", "p1", "i_d")
    with pytest.raises(ValueError):
        AbcInput.named(B, MorClass.identities(trivial_2category(diamond())), "f1", "f2", "c",
                       "p1", "p2", "i_d")
