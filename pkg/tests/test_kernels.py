import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclocal import _kernels as K
from fraclocal.bicat import BICAT_FIXTURES
from fraclocal.fincat import CATEGORY_FIXTURES

needs_numba = pytest.mark.skipif(not K.HAS_NUMBA, reason="numba path not active")


def chain(n: int):
    """The total order on n objects as a category; morphisms are pairs i <= j."""
    mors = [(i, j) for i in range(n) for j in range(i, n)]
    idx = {m: k for k, m in enumerate(mors)}
    src = np.array([i for i, _ in mors], dtype=np.int64)
    tgt = np.array([j for _, j in mors], dtype=np.int64)
    comp = np.full((len(mors), len(mors)), -1, dtype=np.int64)
    for g, (b, c) in enumerate(mors):
        for f, (a, b2) in enumerate(mors):
            if b == b2:
                comp[g, f] = idx[(a, c)]
    ident = np.array([idx[(i, i)] for i in range(n)], dtype=np.int64)
    return comp, src, tgt, ident


@st.composite
def tables(draw, k=3):
    n = draw(st.integers(1, 6))
    no = draw(st.integers(1, 3))
    src = np.array(draw(st.lists(st.integers(0, no - 1), min_size=n, max_size=n)), dtype=np.int64)
    tgt = np.array(draw(st.lists(st.integers(0, no - 1), min_size=n, max_size=n)), dtype=np.int64)
    flat = draw(st.lists(st.integers(-1, n - 1), min_size=n * n, max_size=n * n))
    comp = np.array(flat, dtype=np.int64).reshape(n, n)
    return comp, src, tgt


def test_chain_category_is_lawful():
    comp, src, tgt, ident = chain(6)
    assert K.category_assoc_violations(comp, src, tgt).shape == (0, 3)
    assert K.category_unit_violations(comp, src, tgt, ident).shape == (0, 2)


def test_broken_entry_is_reported():
    comp, src, tgt, ident = chain(3)
    bad = comp.copy()
    bad[ident[1], 1] = 2  # id_1 . (0 <= 1) now claims to be (0 <= 2)
    rows = K.category_unit_violations(bad, src, tgt, ident)
    assert rows.tolist() == [[1, 0]]


@given(tables())
@settings(max_examples=150, deadline=None)
def test_assoc_paths_agree(t):
    comp, src, tgt = t
    a = K._sorted_rows(K._cat_assoc_numpy(comp, src, tgt))
    b = K._sorted_rows(K._cat_assoc_numba(comp, src, tgt))
    assert a.tolist() == b.tolist()


@given(tables())
@settings(max_examples=150, deadline=None)
def test_interchange_paths_agree(t):
    comp, src, tgt = t
    # reuse the table as both compositions, with 1-cell endpoints drawn from the same arrays
    n = comp.shape[0]
    one_src = np.arange(n, dtype=np.int64) % 2
    one_tgt = (np.arange(n, dtype=np.int64) + 1) % 2
    two_src, two_tgt = src % n, tgt % n
    a = K._sorted_rows(K._interchange_numpy(comp, comp.T.copy(), one_src, one_tgt, two_src, two_tgt))
    b = K._sorted_rows(K._interchange_numba(comp, comp.T.copy(), one_src, one_tgt, two_src, two_tgt))
    assert a.tolist() == b.tolist()


@pytest.mark.parametrize("key", ["diamond-z2", "parallel-cone-iso", "diamond-ghost", "arrow-ext-idem"])
def test_bicategory_kernels_agree_on_fixtures(key):
    B = BICAT_FIXTURES[key]()
    one_src = np.array([B.source(m) for m in range(B.n_morphisms)], dtype=np.int64)
    one_tgt = np.array([B.target(m) for m in range(B.n_morphisms)], dtype=np.int64)
    two_src = np.array([B.cell_source(x) for x in range(B.n_cells)], dtype=np.int64)
    two_tgt = np.array([B.cell_target(x) for x in range(B.n_cells)], dtype=np.int64)
    v, h = np.asarray(B.vcomp), np.asarray(B.hcomp)
    for numpy_fn, numba_fn, args in [
        (K._vcomp_assoc_numpy, K._vcomp_assoc_numba, (v, two_src, two_tgt)),
        (K._interchange_numpy, K._interchange_numba, (v, h, one_src, one_tgt, two_src, two_tgt)),
    ]:
        a = K._sorted_rows(numpy_fn(*args))
        b = K._sorted_rows(numba_fn(*args))
        assert a.tolist() == b.tolist() == []


@pytest.mark.parametrize("key", sorted(CATEGORY_FIXTURES))
def test_mediator_paths_agree(key):
    C = CATEGORY_FIXTURES[key]()
    comp, src, tgt = np.asarray(C.comp), np.asarray(C.src), np.asarray(C.tgt)
    for apex in range(C.n_objects):
        for p in range(C.n_morphisms):
            if src[p] != apex:
                continue
            q = np.arange(C.n_morphisms, dtype=np.int64)
            a = K._mediator_counts_numpy(comp, src, tgt, apex, p, p, q, q)
            b = K._mediator_counts_numba(comp, src, tgt, apex, p, p, q, q)
            assert a.tolist() == b.tolist()


def test_env_flag_selects_numpy():
    env = dict(os.environ, FRACLOCAL_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from fraclocal import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_numba_is_default():
    assert K.BACKEND == "numba"
