from itertools import product

import pytest

from fraclocal import fincat
from fraclocal.bicat import (
    BICAT_FIXTURES, AdjointEquivalenceData, ApexEquiv, BicatError, FinBicategory, FunctorError,
    PostEquiv, PreEquiv, SizeCaps, Strict2Functor, Twist, WfpSquare, admissible_transforms,
    candidate_squares, check_A1, check_A2, check_B1, check_B2, check_strict_2functor_transport,
    find_internal_equivalence, find_weak_fiber_product, identity_functor, internal_equivalences,
    is_adjoint_equivalence, is_weak_fiber_product, parallel_lax, quasi_inverse, replace_tables,
    transform_wfp_diagram, trivial_2category, validate_bicategory, wfp_failure, with_z2_cells,
)
from fraclocal.fincat import SizeError, StructureError, is_pullback_cone

import oracles

SMALL = ["arrow-z2", "diamond-trivial", "diamond-z2", "diamond-idem", "double-diamond-trivial",
         "double-diamond-z2", "diamond-ext-trivial", "z2grp-z2", "z2grp-idem", "parallel-lax",
         "parallel-cone-iso", "parallel-cone-trivial", "arrow-ext-z2"]


def all_squares(B):
    for g1, g2 in product(range(B.n_morphisms), repeat=2):
        if B.target(g1) == B.target(g2):
            yield from candidate_squares(B, g1, g2)


@pytest.mark.parametrize("key", sorted(BICAT_FIXTURES))
def test_fixtures_validate(key):
    B = BICAT_FIXTURES[key]()
    rep = validate_bicategory(B)
    assert rep.ok, rep.tags()


def test_corrupted_interchange_is_reported():
    B = with_z2_cells(fincat.z2grp())
    H = B.hcomp.copy()
    zs = B.cell("z_s")
    H[zs, zs] = B.cell("z_id_pt")
    rep = validate_bicategory(replace_tables(B, hcomp=H))
    assert not rep.ok and "interchange" in rep.tags()


def test_idempotent_vertical_law_only_breaks_interchange():
    B = with_z2_cells(fincat.arrow())
    V = B.vcomp.copy()
    z = B.cell("z_w")
    V[z, z] = z  # still an associative unital law on the hom of w
    rep = validate_bicategory(replace_tables(B, vcomp=V))
    assert rep.tags() == {"interchange"}


def test_central_associator_is_coherent_but_not_strict():
    B = with_z2_cells(fincat.z2grp())
    A = B.assoc.copy()
    s = B.mor("s")
    A[s, s, s] = B.cell("z_s")
    rep = validate_bicategory(replace_tables(B, assoc=A))
    assert rep.tags() == {"strict-assoc-cell"}
    rep = validate_bicategory(replace_tables(B, assoc=A, strict=False))
    assert rep.ok


def test_twisted_unit_associator_breaks_triangle():
    B = with_z2_cells(fincat.z2grp())
    A = B.assoc.copy()
    s, e = B.mor("s"), B.mor("id_pt")
    A[s, e, s] = B.cell("z_id_pt")
    rep = validate_bicategory(replace_tables(B, assoc=A, strict=False))
    assert "triangle" in rep.tags()


def test_structural_errors():
    B = BICAT_FIXTURES["arrow-z2"]()
    V = B.vcomp.copy()
    V[0, 0] = -1
    with pytest.raises(StructureError):
        replace_tables(B, vcomp=V)
    H = B.hcomp.copy()
    H[B.cell("z_w"), B.cell("i_id_X")] = B.cell("z_id_Y")
    with pytest.raises(StructureError):
        replace_tables(B, hcomp=H)
    with pytest.raises(SizeError):
        with_z2_cells(fincat.diamond(), caps=SizeCaps(two_cells=10))
    with pytest.raises(StructureError, match="missing vertical composite"):
        FinBicategory.build_strict("BAD", fincat.parallel(), [("a", "u", "v"), ("b", "v", "u")])


def test_build_strict_derives_missing_horizontal_composites():
    B = parallel_lax()
    assert B.n_cells == 5
    a = B.cell("a")
    assert B.h(B.i(B.mor("id_Y")), a) == a and B.h(a, B.i(B.mor("id_X"))) == a
    assert not B.is_invertible(a)


def test_internal_equivalence_examples():
    Z = with_z2_cells(fincat.z2grp())
    s = Z.mor("s")
    data = find_internal_equivalence(Z, "s")
    assert data is not None and data.e == s and data.d == s
    assert is_adjoint_equivalence(Z, data)
    D = trivial_2category(fincat.diamond())
    assert find_internal_equivalence(D, "d") is None
    E = trivial_2category(fincat.diamond_ext())
    data = find_internal_equivalence(E, "e")
    assert E.morphisms[data.d] == "k"
    assert quasi_inverse(E, E.mor("d")) is None
    for a in range(E.n_objects):
        assert find_internal_equivalence(E, E.id(a)).d == E.id(a)


def test_adjoint_zigzag_is_checked():
    Z = with_z2_cells(fincat.z2grp())
    s, e = Z.mor("s"), Z.mor("id_pt")
    good = find_internal_equivalence(Z, s)
    # flipping one unit twists exactly one zig-zag
    bad = AdjointEquivalenceData(s, s, Z.cell("z_id_pt"), good.xi)
    assert is_adjoint_equivalence(Z, good) and not is_adjoint_equivalence(Z, bad)
    both = AdjointEquivalenceData(s, s, Z.cell("z_id_pt"), Z.cell("z_id_pt"))
    assert is_adjoint_equivalence(Z, both)
    assert Z.cell_source(good.delta) == e


def test_wfp_examples():
    D = trivial_2category(fincat.diamond())
    sq = find_weak_fiber_product(D, D.mor("f1"), D.mor("f2"))
    assert (D.objects[sq.apex], D.morphisms[sq.r1], D.morphisms[sq.r2]) == ("c", "p1", "p2")
    DD = trivial_2category(fincat.double_diamond())
    f1, f2 = DD.mor("f1"), DD.mor("f2")
    assert find_weak_fiber_product(DD, f1, f2) is None
    sq1 = WfpSquare(DD, f1, f2, DD.obj("c1"), DD.mor("p11"), DD.mor("p12"), DD.i(DD.mor("d1")))
    fail = wfp_failure(sq1)
    assert fail.condition == "A1" and fail.D == DD.obj("c2")
    assert not check_A1(sq1, DD.obj("c2")) and check_A1(sq1, DD.obj("c1"))
    assert all(check_A2(sq1, d) for d in range(DD.n_objects))


def test_wfp_square_validation():
    D = trivial_2category(fincat.diamond())
    with pytest.raises(BicatError):
        WfpSquare(D, D.mor("f1"), D.mor("f2"), D.obj("c"), D.mor("p2"), D.mor("p1"), 0)
    P = parallel_lax()
    u, v = P.mor("u"), P.mor("v")
    with pytest.raises(BicatError):
        WfpSquare(P, u, v, P.obj("X"), P.mor("id_X"), P.mor("id_X"), P.cell("a"))


def test_b2_counts_missing_lift():
    # two mediating 1-cells with no 2-cell between them break uniqueness
    B = BICAT_FIXTURES["parallel-cone-trivial"]()
    idB = B.mor("id_B")
    p = B.mor("p")
    sq = WfpSquare(B, idB, idB, B.obj("C"), p, p, B.i(p))
    t, t2 = B.mor("t"), B.mor("t2")
    assert not check_B2(sq, B.obj("D"), t, t2)
    assert check_B2(sq, B.obj("D"), t, t)
    assert wfp_failure(sq).condition == "A2"
    iso = BICAT_FIXTURES["parallel-cone-iso"]()
    sq2 = WfpSquare(iso, iso.mor("id_B"), iso.mor("id_B"), iso.obj("C"), iso.mor("p"),
                    iso.mor("p"), iso.i(iso.mor("p")))
    # an invertible t => t2 supplies the missing unique lift
    assert check_B2(sq2, iso.obj("D"), iso.mor("t"), iso.mor("t2"))
    assert all(check_A2(sq2, d) for d in range(iso.n_objects))
    # still not a WFP: nothing maps B into C
    assert wfp_failure(sq2).condition == "A1" and wfp_failure(sq2).D == iso.obj("B")


def test_b_conditions_make_up_a_conditions():
    for key in ("diamond-z2", "double-diamond-trivial", "parallel-cone-iso", "z2grp-idem"):
        B = BICAT_FIXTURES[key]()
        for sq in all_squares(B):
            for d in range(B.n_objects):
                b1 = all(check_B1(sq, d, s1, s2) for s1 in B.hom(d, B.source(sq.g1))
                         for s2 in B.hom(d, B.source(sq.g2)))
                b2 = all(check_B2(sq, d, t, t2) for t in B.hom(d, sq.apex)
                         for t2 in B.hom(d, sq.apex))
                assert b1 == check_A1(sq, d) and b2 == check_A2(sq, d)


@pytest.mark.parametrize("key", SMALL)
def test_wfp_agrees_with_groupoid_oracle(key):
    B = BICAT_FIXTURES[key]()
    P = oracles.Plain2(B)
    m, c = B.morphisms, B.cells
    seen = set()
    for sq in all_squares(B):
        got = is_weak_fiber_product(sq)
        want = oracles.naive_is_wfp(P, m[sq.g1], m[sq.g2], B.objects[sq.apex], m[sq.r1],
                                    m[sq.r2], c[sq.omega])
        assert got == want, sq.describe()
        seen.add(got)
    if not key.startswith("z2grp"):
        assert seen == {True, False}


@pytest.mark.parametrize("key", sorted(fincat.CATEGORY_FIXTURES))
def test_trivial_wfp_is_pullback(key):
    C = fincat.CATEGORY_FIXTURES[key]()
    B = trivial_2category(C)
    for sq in all_squares(B):
        assert is_weak_fiber_product(sq) == is_pullback_cone(C, sq.g1, sq.g2, sq.apex, sq.r1, sq.r2)


def test_identity_twist_is_noop():
    B = BICAT_FIXTURES["diamond-z2"]()
    for sq in all_squares(B):
        out = transform_wfp_diagram(sq, Twist(B.i(sq.g1), B.i(sq.g2)))
        assert out == sq


def test_post_equivalence_on_diamond_ext():
    B = BICAT_FIXTURES["diamond-ext-trivial"]()
    sq = find_weak_fiber_product(B, B.mor("f1"), B.mor("f2"))
    out = transform_wfp_diagram(sq, PostEquiv(B.mor("e")))
    assert (B.morphisms[out.g1], B.morphisms[out.g2]) == ("f1x", "f2x")
    assert is_weak_fiber_product(out)
    with pytest.raises(BicatError):
        transform_wfp_diagram(sq, PostEquiv(B.mor("d")))


def test_apex_and_pre_equivalence_examples():
    Z = BICAT_FIXTURES["z2grp-z2"]()
    s = Z.mor("s")
    sq = next(iter(all_squares(Z)))
    out = transform_wfp_diagram(sq, ApexEquiv(s))
    assert out.r1 == Z.c1(sq.r1, s)
    data = find_internal_equivalence(Z, s)
    out = transform_wfp_diagram(sq, PreEquiv(data, data))
    assert out.g1 == Z.c1(sq.g1, s)
    assert is_weak_fiber_product(out) == is_weak_fiber_product(sq)


TRANSPORT = ["diamond-ext-trivial", "diamond-ext-z2", "z2grp-z2", "z2grp-idem", "diamond-z2",
             "double-diamond-z2", "parallel-cone-iso"]


@pytest.mark.parametrize("key", TRANSPORT)
def test_transport_invariance(key):
    B = BICAT_FIXTURES[key]()
    for sq in all_squares(B):
        verdict = is_weak_fiber_product(sq)
        for t in admissible_transforms(sq):
            assert is_weak_fiber_product(transform_wfp_diagram(sq, t)) == verdict, (sq.describe(), t)


@pytest.mark.parametrize("key", ["diamond-ext-trivial", "z2grp-z2", "diamond-ext-idem"])
def test_wfp_existence_respects_equivalences(key):
    B = BICAT_FIXTURES[key]()
    eqs = [d.e for d in internal_equivalences(B)]
    for g1, g2 in product(range(B.n_morphisms), repeat=2):
        if B.target(g1) != B.target(g2):
            continue
        has = find_weak_fiber_product(B, g1, g2) is not None
        for e1, e2 in product(eqs, repeat=2):
            if B.target(e1) != B.source(g1) or B.target(e2) != B.source(g2):
                continue
            moved = find_weak_fiber_product(B, B.c1(g1, e1), B.c1(g2, e2)) is not None
            assert moved == has
            for e in eqs:
                if B.source(e) == B.target(g1):
                    a, b = B.c1(e, B.c1(g1, e1)), B.c1(e, B.c1(g2, e2))
                    assert (find_weak_fiber_product(B, a, b) is not None) == has


@pytest.mark.parametrize("key", TRANSPORT)
def test_b_conditions_respect_isomorphic_data(key):
    B = BICAT_FIXTURES[key]()
    eqs = [d.e for d in internal_equivalences(B)]
    for sq in all_squares(B):
        b1, b2 = B.source(sq.g1), B.source(sq.g2)
        for d in range(B.n_objects):
            for s1, s2 in product(B.hom(d, b1), B.hom(d, b2)):
                verdict = check_B1(sq, d, s1, s2)
                for x1, x2 in product(B.hom(d, b1), B.hom(d, b2)):
                    if B.isos(s1, x1) and B.isos(s2, x2):
                        assert check_B1(sq, d, x1, x2) == verdict
                for e in eqs:
                    if B.target(e) == d:
                        assert check_B1(sq, B.source(e), B.c1(s1, e), B.c1(s2, e)) == verdict
            for t, t2 in product(B.hom(d, sq.apex), repeat=2):
                verdict = check_B2(sq, d, t, t2)
                for x, x2 in product(B.hom(d, sq.apex), repeat=2):
                    if B.isos(t, x) and B.isos(t2, x2):
                        assert check_B2(sq, d, x, x2) == verdict
                for e in eqs:
                    if B.target(e) == d:
                        assert check_B2(sq, B.source(e), B.c1(t, e), B.c1(t2, e)) == verdict


def test_identity_functor_transport():
    B = BICAT_FIXTURES["diamond-z2"]()
    F = identity_functor(B)
    for sq in all_squares(B):
        assert check_strict_2functor_transport(F, sq) == is_weak_fiber_product(sq)


def test_renaming_functor_transport():
    B = BICAT_FIXTURES["double-diamond-z2"]()
    R = replace_tables(B, name="RENAMED", objects=tuple(o + "'" for o in B.objects),
                       morphisms=tuple(m + "'" for m in B.morphisms),
                       cells=tuple(c + "'" for c in B.cells))
    F = Strict2Functor(B, R, tuple(range(B.n_objects)), tuple(range(B.n_morphisms)),
                       tuple(range(B.n_cells)))
    for sq in all_squares(B):
        assert check_strict_2functor_transport(F, sq) == is_weak_fiber_product(sq)


def test_collapsing_functor_is_rejected():
    S = BICAT_FIXTURES["double-diamond-trivial"]()
    T = BICAT_FIXTURES["diamond-trivial"]()
    omap = {"c1": "c", "c2": "c", "b1": "b1", "b2": "b2", "a": "a"}
    mmap = {"p11": "p1", "p21": "p1", "p12": "p2", "p22": "p2", "d1": "d", "d2": "d"}
    objs = tuple(T.obj(omap[o]) for o in S.objects)
    ones = []
    for m in S.morphisms:
        if m.startswith("id_"):
            ones.append(T.mor("id_" + omap[m[3:]]))
        else:
            ones.append(T.mor(mmap.get(m, m)))
    F = Strict2Functor(S, T, objs, tuple(ones), tuple(ones))
    sq = next(iter(all_squares(S)))
    with pytest.raises(FunctorError, match="not a weak equivalence"):
        check_strict_2functor_transport(F, sq)
    bad = Strict2Functor(S, T, objs, tuple(ones[:-1]) + (T.mor("id_a"),), tuple(ones))
    with pytest.raises(FunctorError, match="not a strict 2-functor"):
        check_strict_2functor_transport(bad, sq)
