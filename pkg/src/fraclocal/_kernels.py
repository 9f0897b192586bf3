"""Law-sweep kernels over integer composition tables.

Every table uses ``-1`` for an undefined entry.  Each sweep exists twice: an
``@njit`` loop nest and a vectorised numpy version.  The numba path is used
when numba imports and ``FRACLOCAL_DISABLE_NUMBA`` is unset (or ``0``); the
choice is made once, at import time.  Both paths return the complete set of
violating tuples as an ``(n, k)`` int64 array in lexicographic row order.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("FRACLOCAL_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("numba disabled by FRACLOCAL_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


JIT_OPTIONS = {"nogil": True, "cache": True}

BACKEND = "numba" if HAS_NUMBA else "numpy"


def _sorted_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _pad(table: np.ndarray) -> np.ndarray:
    # an extra trailing row/column of -1 lets index -1 propagate "undefined"
    if table.ndim == 1:
        return np.concatenate([table, np.array([-1], dtype=table.dtype)])
    out = np.full(tuple(s + 1 for s in table.shape), -1, dtype=table.dtype)
    out[tuple(slice(0, s) for s in table.shape)] = table
    return out


# ---------------------------------------------------------------------------
# categories


@njit(**JIT_OPTIONS)
def _cat_assoc_numba(comp, src, tgt):
    n = comp.shape[0]
    count = 0
    out = np.empty((0, 3), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 3), dtype=np.int64)
            count = 0
        for h in range(n):
            for g in range(n):
                if src[h] != tgt[g]:
                    continue
                hg = comp[h, g]
                for f in range(n):
                    if src[g] != tgt[f]:
                        continue
                    gf = comp[g, f]
                    left = -1
                    if gf >= 0:
                        left = comp[h, gf]
                    right = -1
                    if hg >= 0:
                        right = comp[hg, f]
                    if left != right or left < 0:
                        if phase == 1:
                            out[count, 0] = h
                            out[count, 1] = g
                            out[count, 2] = f
                        count += 1
    return out


def _cat_assoc_numpy(comp, src, tgt):
    n = comp.shape[0]
    padded = _pad(comp)
    rows = []
    for h in range(n):
        gs = np.nonzero(src[h] == tgt)[0]
        if gs.size == 0:
            continue
        g_idx, f_idx = np.nonzero(src[gs][:, None] == tgt[None, :])
        g_idx = gs[g_idx]
        left = padded[h, padded[g_idx, f_idx]]
        right = padded[padded[h, g_idx], f_idx]
        bad = (left != right) | (left < 0)
        if bad.any():
            k = int(bad.sum())
            rows.append(np.column_stack([np.full(k, h), g_idx[bad], f_idx[bad]]))
    if not rows:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(rows).astype(np.int64)


@njit(**JIT_OPTIONS)
def _cat_unit_numba(comp, src, tgt, identity):
    n = comp.shape[0]
    count = 0
    out = np.empty((0, 2), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 2), dtype=np.int64)
            count = 0
        for f in range(n):
            # side 0: id_tgt . f, side 1: f . id_src
            if comp[identity[tgt[f]], f] != f:
                if phase == 1:
                    out[count, 0] = f
                    out[count, 1] = 0
                count += 1
            if comp[f, identity[src[f]]] != f:
                if phase == 1:
                    out[count, 0] = f
                    out[count, 1] = 1
                count += 1
    return out


def _cat_unit_numpy(comp, src, tgt, identity):
    n = comp.shape[0]
    f = np.arange(n)
    left_bad = comp[identity[tgt], f] != f
    right_bad = comp[f, identity[src]] != f
    rows = [np.column_stack([f[left_bad], np.zeros(int(left_bad.sum()), dtype=np.int64)]),
            np.column_stack([f[right_bad], np.ones(int(right_bad.sum()), dtype=np.int64)])]
    return np.concatenate(rows).astype(np.int64)


def category_assoc_violations(comp, src, tgt) -> np.ndarray:
    """All composable ``(h, g, f)`` with ``h(gf) != (hg)f``."""
    fn = _cat_assoc_numba if HAS_NUMBA else _cat_assoc_numpy
    return _sorted_rows(fn(comp, src, tgt))


def category_unit_violations(comp, src, tgt, identity) -> np.ndarray:
    """Rows ``(f, side)``; side 0 is the left unit law, 1 the right."""
    fn = _cat_unit_numba if HAS_NUMBA else _cat_unit_numpy
    return _sorted_rows(fn(comp, src, tgt, identity))


# ---------------------------------------------------------------------------
# cone mediators


@njit(**JIT_OPTIONS)
def _mediator_counts_numba(comp, src, tgt, apex, p1, p2, cone_q1, cone_q2):
    n = comp.shape[0]
    k = cone_q1.shape[0]
    out = np.zeros(k, dtype=np.int64)
    for i in range(k):
        d = src[cone_q1[i]]
        c = 0
        for m in range(n):
            if src[m] == d and tgt[m] == apex:
                if comp[p1, m] == cone_q1[i] and comp[p2, m] == cone_q2[i]:
                    c += 1
        out[i] = c
    return out


def _mediator_counts_numpy(comp, src, tgt, apex, p1, p2, cone_q1, cone_q2):
    into_apex = np.nonzero(tgt == apex)[0]
    d = src[cone_q1]
    same_src = src[into_apex][None, :] == d[:, None]
    hit1 = comp[p1, into_apex][None, :] == cone_q1[:, None]
    hit2 = comp[p2, into_apex][None, :] == cone_q2[:, None]
    return (same_src & hit1 & hit2).sum(axis=1).astype(np.int64)


def mediator_counts(comp, src, tgt, apex, p1, p2, cone_q1, cone_q2) -> np.ndarray:
    """For each cone ``(q1[i], q2[i])`` count ``m`` with ``p1 m = q1`` and ``p2 m = q2``."""
    fn = _mediator_counts_numba if HAS_NUMBA else _mediator_counts_numpy
    return fn(comp, src, tgt, int(apex), int(p1), int(p2),
              np.ascontiguousarray(cone_q1, dtype=np.int64),
              np.ascontiguousarray(cone_q2, dtype=np.int64))


# ---------------------------------------------------------------------------
# bicategories
#
# one_src/one_tgt: objects of each 1-cell; comp1[g, f] = g.f
# two_src/two_tgt: 1-cells of each 2-cell
# vcomp[b, a] = b (.) a (a first); hcomp[b, a] = b * a (a on the right)


@njit(**JIT_OPTIONS)
def _vcomp_assoc_numba(vcomp, two_src, two_tgt):
    n = vcomp.shape[0]
    count = 0
    out = np.empty((0, 3), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 3), dtype=np.int64)
            count = 0
        for c in range(n):
            for b in range(n):
                if two_src[c] != two_tgt[b]:
                    continue
                cb = vcomp[c, b]
                for a in range(n):
                    if two_src[b] != two_tgt[a]:
                        continue
                    ba = vcomp[b, a]
                    left = -1
                    if ba >= 0:
                        left = vcomp[c, ba]
                    right = -1
                    if cb >= 0:
                        right = vcomp[cb, a]
                    if left != right or left < 0:
                        if phase == 1:
                            out[count, 0] = c
                            out[count, 1] = b
                            out[count, 2] = a
                        count += 1
    return out


def _vcomp_assoc_numpy(vcomp, two_src, two_tgt):
    return _cat_assoc_numpy(vcomp, two_src, two_tgt)


@njit(**JIT_OPTIONS)
def _interchange_numba(vcomp, hcomp, one_src, one_tgt, two_src, two_tgt):
    n = vcomp.shape[0]
    count = 0
    out = np.empty((0, 4), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 4), dtype=np.int64)
            count = 0
        for a in range(n):
            for c in range(n):
                if two_src[c] != two_tgt[a]:
                    continue
                ca = vcomp[c, a]
                for b in range(n):
                    if one_src[two_src[b]] != one_tgt[two_src[a]]:
                        continue
                    ba = hcomp[b, a]
                    for d in range(n):
                        if two_src[d] != two_tgt[b]:
                            continue
                        db = vcomp[d, b]
                        dc = hcomp[d, c]
                        left = -1
                        if db >= 0 and ca >= 0:
                            left = hcomp[db, ca]
                        right = -1
                        if dc >= 0 and ba >= 0:
                            right = vcomp[dc, ba]
                        if left != right or left < 0:
                            if phase == 1:
                                out[count, 0] = a
                                out[count, 1] = c
                                out[count, 2] = b
                                out[count, 3] = d
                            count += 1
    return out


def _interchange_numpy(vcomp, hcomp, one_src, one_tgt, two_src, two_tgt):
    n = vcomp.shape[0]
    vp = _pad(vcomp)
    hp = _pad(hcomp)
    rows = []
    for a in range(n):
        cs = np.nonzero(two_src == two_tgt[a])[0]
        bs = np.nonzero(one_src[two_src] == one_tgt[two_src[a]])[0]
        if cs.size == 0 or bs.size == 0:
            continue
        b_idx, d_idx = np.nonzero(two_src[None, :] == two_tgt[bs][:, None])
        b_idx = bs[b_idx]
        if b_idx.size == 0:
            continue
        cc = np.repeat(cs, b_idx.size)
        bb = np.tile(b_idx, cs.size)
        dd = np.tile(d_idx, cs.size)
        ca = vp[cc, a]
        left = hp[vp[dd, bb], ca]
        right = vp[hp[dd, cc], hp[bb, a]]
        bad = (left != right) | (left < 0)
        if bad.any():
            k = int(bad.sum())
            rows.append(np.column_stack([np.full(k, a), cc[bad], bb[bad], dd[bad]]))
    if not rows:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(rows).astype(np.int64)


@njit(**JIT_OPTIONS)
def _assoc_natural_numba(vcomp, hcomp, assoc, one_src, one_tgt, two_src, two_tgt):
    n = vcomp.shape[0]
    count = 0
    out = np.empty((0, 3), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 3), dtype=np.int64)
            count = 0
        for a in range(n):
            f = two_src[a]
            f2 = two_tgt[a]
            for b in range(n):
                g = two_src[b]
                if one_src[g] != one_tgt[f]:
                    continue
                g2 = two_tgt[b]
                ba = hcomp[b, a]
                for c in range(n):
                    h = two_src[c]
                    if one_src[h] != one_tgt[g]:
                        continue
                    h2 = two_tgt[c]
                    cb = hcomp[c, b]
                    left = -1
                    if ba >= 0:
                        x = hcomp[c, ba]
                        t = assoc[h2, g2, f2]
                        if x >= 0 and t >= 0:
                            left = vcomp[t, x]
                    right = -1
                    if cb >= 0:
                        y = hcomp[cb, a]
                        t = assoc[h, g, f]
                        if y >= 0 and t >= 0:
                            right = vcomp[y, t]
                    if left != right or left < 0:
                        if phase == 1:
                            out[count, 0] = c
                            out[count, 1] = b
                            out[count, 2] = a
                        count += 1
    return out


def _assoc_natural_numpy(vcomp, hcomp, assoc, one_src, one_tgt, two_src, two_tgt):
    n = vcomp.shape[0]
    vp = _pad(vcomp)
    hp = _pad(hcomp)
    ap = _pad(assoc)
    rows = []
    for c in range(n):
        h, h2 = two_src[c], two_tgt[c]
        bs = np.nonzero(one_src[h] == one_tgt[two_src])[0]
        if bs.size == 0:
            continue
        b_idx, a_idx = np.nonzero(one_src[two_src[bs]][:, None] == one_tgt[two_src][None, :])
        b_idx = bs[b_idx]
        if b_idx.size == 0:
            continue
        f, f2 = two_src[a_idx], two_tgt[a_idx]
        g, g2 = two_src[b_idx], two_tgt[b_idx]
        left = vp[ap[h2, g2, f2], hp[c, hp[b_idx, a_idx]]]
        right = vp[hp[hp[c, b_idx], a_idx], ap[h, g, f]]
        bad = (left != right) | (left < 0)
        if bad.any():
            k = int(bad.sum())
            rows.append(np.column_stack([np.full(k, c), b_idx[bad], a_idx[bad]]))
    if not rows:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(rows).astype(np.int64)


@njit(**JIT_OPTIONS)
def _pentagon_numba(comp1, vcomp, hcomp, assoc, id2, one_src, one_tgt):
    n = comp1.shape[0]
    count = 0
    out = np.empty((0, 4), dtype=np.int64)
    for phase in range(2):
        if phase == 1:
            out = np.empty((count, 4), dtype=np.int64)
            count = 0
        for k in range(n):
            for h in range(n):
                if one_src[k] != one_tgt[h]:
                    continue
                kh = comp1[k, h]
                for g in range(n):
                    if one_src[h] != one_tgt[g]:
                        continue
                    hg = comp1[h, g]
                    for f in range(n):
                        if one_src[g] != one_tgt[f]:
                            continue
                        gf = comp1[g, f]
                        left = -1
                        if gf >= 0 and kh >= 0:
                            t1 = assoc[k, h, gf]
                            t2 = assoc[kh, g, f]
                            if t1 >= 0 and t2 >= 0:
                                left = vcomp[t2, t1]
                        right = -1
                        a_hgf = assoc[h, g, f]
                        a_khg = assoc[k, h, g]
                        if a_hgf >= 0 and a_khg >= 0 and hg >= 0:
                            x = hcomp[id2[k], a_hgf]
                            y = assoc[k, hg, f]
                            z = hcomp[a_khg, id2[f]]
                            if x >= 0 and y >= 0 and z >= 0:
                                yx = vcomp[y, x]
                                if yx >= 0:
                                    right = vcomp[z, yx]
                        if left != right or left < 0:
                            if phase == 1:
                                out[count, 0] = k
                                out[count, 1] = h
                                out[count, 2] = g
                                out[count, 3] = f
                            count += 1
    return out


def _pentagon_numpy(comp1, vcomp, hcomp, assoc, id2, one_src, one_tgt):
    n = comp1.shape[0]
    cp = _pad(comp1)
    vp = _pad(vcomp)
    hp = _pad(hcomp)
    ap = _pad(assoc)
    i2 = _pad(id2)
    rows = []
    for k in range(n):
        hs = np.nonzero(one_src[k] == one_tgt)[0]
        for h in hs:
            gs = np.nonzero(one_src[h] == one_tgt)[0]
            if gs.size == 0:
                continue
            g_idx, f_idx = np.nonzero(one_src[gs][:, None] == one_tgt[None, :])
            g_idx = gs[g_idx]
            if g_idx.size == 0:
                continue
            left = vp[ap[cp[k, h], g_idx, f_idx], ap[k, h, cp[g_idx, f_idx]]]
            x = hp[i2[k], ap[h, g_idx, f_idx]]
            y = ap[k, cp[h, g_idx], f_idx]
            z = hp[ap[k, h, g_idx], i2[f_idx]]
            right = vp[z, vp[y, x]]
            bad = (left != right) | (left < 0)
            if bad.any():
                m = int(bad.sum())
                rows.append(np.column_stack([np.full(m, k), np.full(m, h), g_idx[bad], f_idx[bad]]))
    if not rows:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(rows).astype(np.int64)


def vcomp_assoc_violations(vcomp, two_src, two_tgt) -> np.ndarray:
    fn = _vcomp_assoc_numba if HAS_NUMBA else _vcomp_assoc_numpy
    return _sorted_rows(fn(vcomp, two_src, two_tgt))


def interchange_violations(vcomp, hcomp, one_src, one_tgt, two_src, two_tgt) -> np.ndarray:
    """Rows ``(a, c, b, d)`` where ``(d.b)*(c.a) != (d*c).(b*a)``."""
    fn = _interchange_numba if HAS_NUMBA else _interchange_numpy
    return _sorted_rows(fn(vcomp, hcomp, one_src, one_tgt, two_src, two_tgt))


def assoc_naturality_violations(vcomp, hcomp, assoc, one_src, one_tgt, two_src, two_tgt) -> np.ndarray:
    """Rows ``(c, b, a)`` where the associator fails to be natural."""
    fn = _assoc_natural_numba if HAS_NUMBA else _assoc_natural_numpy
    return _sorted_rows(fn(vcomp, hcomp, assoc, one_src, one_tgt, two_src, two_tgt))


def pentagon_violations(comp1, vcomp, hcomp, assoc, id2, one_src, one_tgt) -> np.ndarray:
    """Rows ``(k, h, g, f)`` of composable 1-cells where the pentagon fails."""
    fn = _pentagon_numba if HAS_NUMBA else _pentagon_numpy
    return _sorted_rows(fn(comp1, vcomp, hcomp, assoc, id2, one_src, one_tgt))


def warmup() -> None:
    """Trigger compilation (or cache load) of every kernel on tiny inputs."""
    z1 = np.zeros(1, dtype=np.int64)
    t = np.zeros((1, 1), dtype=np.int64)
    category_assoc_violations(t, z1, z1)
    category_unit_violations(t, z1, z1, z1)
    mediator_counts(t, z1, z1, 0, 0, 0, z1, z1)
    vcomp_assoc_violations(t, z1, z1)
    interchange_violations(t, t, z1, z1, z1, z1)
    assoc_naturality_violations(t, t, np.zeros((1, 1, 1), dtype=np.int64), z1, z1, z1, z1)
    pentagon_violations(t, t, t, np.zeros((1, 1, 1), dtype=np.int64), z1, z1, z1)
