import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclocal import fincat
from fraclocal.fincat import (
    CATEGORY_FIXTURES, CompositionError, FinCategory, MorClass, SizeError, StructureError,
    are_isomorphic_categories, compose, is_pullback_cone, pullback_oracle, validate_category,
)

import oracles


def broken_assoc():
    # e idempotent on Y; rebinding g.f2 breaks g.(e.f2) = (g.e).f2
    return FinCategory.build(
        "BROKEN", ["X", "Y", "Z"],
        [("f", "X", "Y"), ("f2", "X", "Y"), ("e", "Y", "Y"), ("g", "Y", "Z"),
         ("h", "X", "Z"), ("h2", "X", "Z")],
        {("e", "e"): "e", ("e", "f"): "f", ("e", "f2"): "f", ("g", "e"): "g",
         ("g", "f"): "h", ("g", "f2"): "h2"},
    )


@pytest.mark.parametrize("key", sorted(CATEGORY_FIXTURES))
def test_fixtures_are_categories(key):
    C = CATEGORY_FIXTURES[key]()
    assert validate_category(C).ok
    assert oracles.assoc_violations(C) == []


def test_missing_composite_is_structural():
    D = fincat.diamond()
    comp = D.comp.copy()
    comp[D.mor("f1"), D.mor("p1")] = -1
    with pytest.raises(StructureError, match="missing composite f1 . p1"):
        FinCategory(D.name, D.objects, D.morphisms, D.src, D.tgt, D.identity, comp)


def test_dangling_and_duplicate_are_structural():
    with pytest.raises(StructureError, match="duplicate"):
        FinCategory.build("X", ["A", "A"], [])
    with pytest.raises(StructureError, match="unknown object"):
        FinCategory.build("X", ["A"], [("f", "A", "B")])
    D = fincat.arrow()
    src = D.src.copy()
    src[2] = 7
    with pytest.raises(StructureError, match="dangling"):
        FinCategory(D.name, D.objects, D.morphisms, src, D.tgt, D.identity, D.comp)


def test_assoc_violation_reported():
    C = broken_assoc()
    rep = validate_category(C)
    assert not rep.ok
    g, e, f2 = C.mor("g"), C.mor("e"), C.mor("f2")
    assert ("assoc", (g, e, f2)) in rep.violations
    # frozen against the naive oracle
    assert sorted(w for t, w in rep.violations if t == "assoc") == sorted(
        tuple(C.mor(x) for x in t) for t in oracles.assoc_violations(C))
    assert oracles.assoc_violations(C) == [("g", "e", "f2")]


def test_violation_order_is_lexicographic():
    rep = validate_category(broken_assoc())
    wits = [w for _, w in rep.violations]
    assert wits == sorted(wits)


def test_size_cap():
    with pytest.raises(SizeError):
        FinCategory.build("BIG", [f"o{i}" for i in range(33)], [])
    FinCategory.build("OK", [f"o{i}" for i in range(33)], [], max_objects=40)


def test_compose():
    D = fincat.diamond()
    assert D.morphisms[compose(D, "f1", "p1")] == "d"
    for f in range(D.n_morphisms):
        assert compose(D, f, D.id(D.source(f))) == f
    with pytest.raises(CompositionError):
        compose(D, "p1", "f2")


def test_pullback_examples():
    D = fincat.diamond()
    assert pullback_oracle(D, "f1", "f2") == (D.obj("c"), D.mor("p1"), D.mor("p2"))
    assert pullback_oracle(D, "id_a", "f2") == (D.obj("b2"), D.mor("f2"), D.mor("id_b2"))
    assert pullback_oracle(fincat.double_diamond(), "f1", "f2") is None
    with pytest.raises(CompositionError):
        pullback_oracle(D, "p1", "f2")


@pytest.mark.parametrize("key", sorted(CATEGORY_FIXTURES))
def test_pullback_oracle_agrees_with_naive(key):
    C = CATEGORY_FIXTURES[key]()
    for f1 in range(C.n_morphisms):
        for f2 in range(C.n_morphisms):
            if C.target(f1) != C.target(f2):
                continue
            got = pullback_oracle(C, f1, f2)
            naive = oracles.pullbacks(C, C.morphisms[f1], C.morphisms[f2])
            if got is None:
                assert naive == []
            else:
                names = (C.objects[got.apex], C.morphisms[got.p1], C.morphisms[got.p2])
                assert names in naive
                # least by ordinal among all answers
                assert min((C.obj(a), C.mor(p), C.mor(q)) for a, p, q in naive) == tuple(got)
                assert is_pullback_cone(C, f1, f2, *got)


def test_isomorphism_examples():
    D = fincat.diamond()
    iso = are_isomorphic_categories(D, D)
    assert iso.objects == tuple(range(4)) and iso.morphisms == tuple(range(9))
    assert are_isomorphic_categories(fincat.arrow(), D) is None
    assert are_isomorphic_categories(fincat.arrow(), fincat.parallel()) is None


def _relabel(C, perm_obj, seed):
    rng = np.random.default_rng(seed)
    objs = [C.objects[i] for i in perm_obj]
    inv = {o: i for i, o in enumerate(perm_obj)}
    non_id = [m for m in range(C.n_morphisms) if not C.is_identity(m)]
    rng.shuffle(non_id)
    mors = [(C.morphisms[m], C.objects[C.source(m)], C.objects[C.target(m)]) for m in non_id]
    comps = {}
    for g in non_id:
        for f in non_id:
            h = C.c(g, f)
            if h >= 0:
                comps[(C.morphisms[g], C.morphisms[f])] = C.morphisms[h]
    # identity names follow the objects
    return FinCategory.build(C.name + "'", objs, mors, comps), inv


@settings(max_examples=30, deadline=None)
@given(key=st.sampled_from(["diamond", "double-diamond", "diamond-ext", "arrow-ext", "parallel-cone"]),
       data=st.data())
def test_isomorphism_found_after_relabelling(key, data):
    C = CATEGORY_FIXTURES[key]()
    perm = data.draw(st.permutations(range(C.n_objects)))
    D, _ = _relabel(C, list(perm), data.draw(st.integers(0, 10 ** 6)))
    iso = are_isomorphic_categories(C, D)
    assert iso is not None and are_isomorphic_categories(D, C) is not None
    for g in range(C.n_morphisms):
        for f in range(C.n_morphisms):
            h = C.c(g, f)
            if h >= 0:
                assert D.c(iso.morphisms[g], iso.morphisms[f]) == iso.morphisms[h]


@pytest.mark.parametrize("a", sorted(CATEGORY_FIXTURES))
@pytest.mark.parametrize("b", sorted(CATEGORY_FIXTURES))
def test_isomorphism_symmetric(a, b):
    C, D = CATEGORY_FIXTURES[a](), CATEGORY_FIXTURES[b]()
    assert (are_isomorphic_categories(C, D) is None) == (are_isomorphic_categories(D, C) is None)
    assert (are_isomorphic_categories(C, D) is not None) == (a == b)


def test_morclass_rejects_dangling():
    with pytest.raises(StructureError):
        MorClass(fincat.arrow(), frozenset({5}))
