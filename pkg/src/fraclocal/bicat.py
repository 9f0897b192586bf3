"""Finite bicategories, internal equivalences and weak fiber products.

Conventions: ``vcomp[b, a]`` is ``b . a`` (``a`` first), ``hcomp[b, a]`` is
``b * a`` (``a`` on the right), ``assoc[h, g, f]`` is the associator
``h(gf) => (hg)f``, ``runitor[f]: f id => f`` and ``lunitor[f]: id f => f``.
Undefined entries hold ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .fincat import (
    CATEGORY_FIXTURES, FinCategory, MorClass, SizeError, StructureError, ValidationReport,
    _check_names, _frozen, diamond, parallel, parallel_cone, w_variants,
)


class BicatError(ValueError):
    """An operation was handed data that does not live in the bicategory."""


@dataclass(frozen=True)
class SizeCaps:
    objects: int = 8
    one_cells: int = 64
    two_cells: int = 256


DEFAULT_CAPS = SizeCaps()


@dataclass(frozen=True, eq=False)
class FinBicategory:
    name: str
    objects: tuple[str, ...]
    morphisms: tuple[str, ...]
    src: np.ndarray
    tgt: np.ndarray
    identity: np.ndarray
    comp1: np.ndarray
    cells: tuple[str, ...]
    cell_src: np.ndarray
    cell_tgt: np.ndarray
    id2: np.ndarray
    vcomp: np.ndarray
    hcomp: np.ndarray
    assoc: np.ndarray
    runitor: np.ndarray
    lunitor: np.ndarray
    strict: bool = True
    caps: SizeCaps = field(default=DEFAULT_CAPS, repr=False)

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        for attr in ("objects", "morphisms", "cells"):
            set_(self, attr, tuple(getattr(self, attr)))
        for attr in ("src", "tgt", "identity", "comp1", "cell_src", "cell_tgt", "id2",
                     "vcomp", "hcomp", "assoc", "runitor", "lunitor"):
            set_(self, attr, _frozen(getattr(self, attr)))
        no, n1, n2 = len(self.objects), len(self.morphisms), len(self.cells)
        caps = self.caps
        if no > caps.objects or n1 > caps.one_cells or n2 > caps.two_cells:
            raise SizeError(f"bicategory {self.name!r} has {no}/{n1}/{n2} objects/1-cells/2-cells; "
                            f"limit is {caps.objects}/{caps.one_cells}/{caps.two_cells}")
        _check_names(self.objects, "object")
        _check_names(self.morphisms, "1-cell")
        _check_names(self.cells, "2-cell")
        shapes = {"src": (n1,), "tgt": (n1,), "identity": (no,), "comp1": (n1, n1),
                  "cell_src": (n2,), "cell_tgt": (n2,), "id2": (n1,), "vcomp": (n2, n2),
                  "hcomp": (n2, n2), "assoc": (n1, n1, n1), "runitor": (n1,), "lunitor": (n1,)}
        for attr, shape in shapes.items():
            if getattr(self, attr).shape != shape:
                raise StructureError(f"{attr} has shape {getattr(self, attr).shape}, expected {shape}")
        _range(self.src, no, "src")
        _range(self.tgt, no, "tgt")
        _range(self.identity, n1, "identity")
        _range(self.cell_src, n1, "cell_src")
        _range(self.cell_tgt, n1, "cell_tgt")
        _range(self.id2, n2, "id2")
        for t in ("comp1", "vcomp", "hcomp", "assoc", "runitor", "lunitor"):
            arr = getattr(self, t)
            bound = n1 if t == "comp1" else n2
            if arr.size and (arr.min() < -1 or arr.max() >= bound):
                raise StructureError(f"dangling index in {t}")
        src, tgt = self.src, self.tgt
        for a in range(no):
            i = int(self.identity[a])
            if src[i] != a or tgt[i] != a:
                raise StructureError(f"identity 1-cell of {self.objects[a]} has wrong endpoints")
        # 1-cell composition
        composable = src[:, None] == tgt[None, :]
        _defined_exactly(self.comp1, composable, self.morphisms, self.morphisms, "composite")
        g_idx, f_idx = np.nonzero(composable)
        h_idx = self.comp1[g_idx, f_idx]
        if np.any(src[h_idx] != src[f_idx]) or np.any(tgt[h_idx] != tgt[g_idx]):
            raise StructureError("a 1-cell composite has the wrong endpoints")
        cs, ct = self.cell_src, self.cell_tgt
        if np.any(src[cs] != src[ct]) or np.any(tgt[cs] != tgt[ct]):
            raise StructureError("a 2-cell joins non-parallel 1-cells")
        if np.any(cs[self.id2] != np.arange(n1)) or np.any(ct[self.id2] != np.arange(n1)):
            raise StructureError("identity 2-cell with wrong endpoints")
        # vertical composition
        vc_ok = ct[:, None] == cs[None, :]  # [a, b]: tgt(a) == src(b)
        _defined_exactly(self.vcomp, vc_ok.T, self.cells, self.cells, "vertical composite")
        b_idx, a_idx = np.nonzero(vc_ok.T)
        c_idx = self.vcomp[b_idx, a_idx]
        if np.any(cs[c_idx] != cs[a_idx]) or np.any(ct[c_idx] != ct[b_idx]):
            raise StructureError("a vertical composite has the wrong endpoints")
        # horizontal composition
        hc_ok = src[cs][:, None] == tgt[cs][None, :]
        _defined_exactly(self.hcomp, hc_ok, self.cells, self.cells, "horizontal composite")
        b_idx, a_idx = np.nonzero(hc_ok)
        c_idx = self.hcomp[b_idx, a_idx]
        if np.any(cs[c_idx] != self.comp1[cs[b_idx], cs[a_idx]]) or \
                np.any(ct[c_idx] != self.comp1[ct[b_idx], ct[a_idx]]):
            raise StructureError("a horizontal composite has the wrong endpoints")
        # associators and unitors
        for h, g, f in product(range(n1), repeat=3):
            ok = src[h] == tgt[g] and src[g] == tgt[f]
            x = int(self.assoc[h, g, f])
            if not ok:
                if x != -1:
                    raise StructureError("associator given for a non-composable triple")
                continue
            if x < 0:
                raise StructureError(f"missing associator for ({self.morphisms[h]}, "
                                     f"{self.morphisms[g]}, {self.morphisms[f]})")
            c = self.comp1
            if cs[x] != c[h, c[g, f]] or ct[x] != c[c[h, g], f]:
                raise StructureError("associator with wrong endpoints")
        for f in range(n1):
            r, l = int(self.runitor[f]), int(self.lunitor[f])
            if r < 0 or l < 0:
                raise StructureError("missing unitor")
            if cs[r] != self.comp1[f, self.identity[src[f]]] or ct[r] != f:
                raise StructureError("right unitor with wrong endpoints")
            if cs[l] != self.comp1[self.identity[tgt[f]], f] or ct[l] != f:
                raise StructureError("left unitor with wrong endpoints")
        # python caches
        set_(self, "_src", src.tolist())
        set_(self, "_tgt", tgt.tolist())
        set_(self, "_id", self.identity.tolist())
        set_(self, "_c1", self.comp1.tolist())
        set_(self, "_cs", cs.tolist())
        set_(self, "_ct", ct.tolist())
        set_(self, "_id2", self.id2.tolist())
        set_(self, "_vc", self.vcomp.tolist())
        set_(self, "_hc", self.hcomp.tolist())
        set_(self, "_th", self.assoc.tolist())
        set_(self, "_pi", self.runitor.tolist())
        set_(self, "_up", self.lunitor.tolist())
        set_(self, "_obj_index", {n: i for i, n in enumerate(self.objects)})
        set_(self, "_mor_index", {n: i for i, n in enumerate(self.morphisms)})
        set_(self, "_cell_index", {n: i for i, n in enumerate(self.cells)})
        hom: dict[tuple[int, int], list[int]] = {(a, b): [] for a in range(no) for b in range(no)}
        for m in range(n1):
            hom[(self._src[m], self._tgt[m])].append(m)
        set_(self, "_hom", {k: tuple(v) for k, v in hom.items()})
        between: dict[tuple[int, int], list[int]] = {}
        for x in range(n2):
            between.setdefault((self._cs[x], self._ct[x]), []).append(x)
        set_(self, "_between", {k: tuple(v) for k, v in between.items()})
        inv = [-1] * n2
        for x in range(n2):
            idx, idy = self._id2[self._cs[x]], self._id2[self._ct[x]]
            for y in between.get((self._ct[x], self._cs[x]), ()):
                if self._vc[y][x] == idx and self._vc[x][y] == idy:
                    inv[x] = y
                    break
        set_(self, "_inv", inv)
        iso: dict[tuple[int, int], tuple[int, ...]] = {}
        for k, v in between.items():
            iso[k] = tuple(x for x in v if inv[x] >= 0)
        set_(self, "_iso", iso)

    # -- lookups ---------------------------------------------------------
    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def obj(self, x: int | str) -> int:
        return _lookup(self._obj_index, x, len(self.objects), "object", self.name)

    def mor(self, x: int | str) -> int:
        return _lookup(self._mor_index, x, len(self.morphisms), "1-cell", self.name)

    def cell(self, x: int | str) -> int:
        return _lookup(self._cell_index, x, len(self.cells), "2-cell", self.name)

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        return self._hom[(a, b)]

    def source(self, f: int) -> int:
        return self._src[f]

    def target(self, f: int) -> int:
        return self._tgt[f]

    def id(self, a: int) -> int:
        return self._id[a]

    def is_identity_1cell(self, f: int) -> bool:
        return self._id[self._src[f]] == f

    def c1(self, g: int, f: int) -> int:
        h = self._c1[g][f]
        if h < 0:
            raise BicatError(f"1-cells {self.morphisms[g]} and {self.morphisms[f]} are not composable")
        return h

    def cell_source(self, x: int) -> int:
        return self._cs[x]

    def cell_target(self, x: int) -> int:
        return self._ct[x]

    def between(self, f: int, g: int) -> tuple[int, ...]:
        return self._between.get((f, g), ())

    def isos(self, f: int, g: int) -> tuple[int, ...]:
        return self._iso.get((f, g), ())

    def inv(self, x: int) -> int:
        y = self._inv[x]
        if y < 0:
            raise BicatError(f"2-cell {self.cells[x]} is not invertible")
        return y

    def is_invertible(self, x: int) -> bool:
        return self._inv[x] >= 0

    def i(self, f: int) -> int:
        return self._id2[f]

    def v(self, b: int, a: int) -> int:
        c = self._vc[b][a]
        if c < 0:
            raise BicatError(f"2-cells {self.cells[b]} . {self.cells[a]} are not composable")
        return c

    def chain(self, *xs: int) -> int:
        """``xs[0] . xs[1] . ... . xs[-1]``; the last cell acts first."""
        acc = xs[-1]
        for x in reversed(xs[:-1]):
            acc = self.v(x, acc)
        return acc

    def h(self, b: int, a: int) -> int:
        c = self._hc[b][a]
        if c < 0:
            raise BicatError(f"2-cells {self.cells[b]} * {self.cells[a]} are not composable")
        return c

    def th(self, h: int, g: int, f: int) -> int:
        x = self._th[h][g][f]
        if x < 0:
            raise BicatError("associator requested for a non-composable triple")
        return x

    def thi(self, h: int, g: int, f: int) -> int:
        return self.inv(self.th(h, g, f))

    def pi(self, f: int) -> int:
        return self._pi[f]

    def ups(self, f: int) -> int:
        return self._up[f]

    def describe_cell(self, x: int) -> str:
        return f"{self.cells[x]}: {self.morphisms[self._cs[x]]} => {self.morphisms[self._ct[x]]}"

    def underlying_category(self) -> FinCategory:
        """1-cells as a plain category; only meaningful for strict bicategories."""
        if not self.strict:
            raise BicatError("underlying category requested for a non-strict bicategory")
        return FinCategory(self.name, self.objects, self.morphisms, self.src, self.tgt,
                           self.identity, self.comp1, max_objects=max(32, self.n_objects))

    # -- construction ----------------------------------------------------
    @classmethod
    def strict_from_tables(cls, name: str, C: FinCategory, cells: Sequence[str],
                           cell_src: Sequence[int], cell_tgt: Sequence[int], id2: Sequence[int],
                           vcomp: np.ndarray, hcomp: np.ndarray,
                           caps: SizeCaps = DEFAULT_CAPS) -> "FinBicategory":
        id2 = np.asarray(id2, dtype=np.int64)
        n1 = C.n_morphisms
        assoc = np.full((n1, n1, n1), -1, dtype=np.int64)
        comp = C.comp
        for h, g, f in product(range(n1), repeat=3):
            if comp[h, g] >= 0 and comp[g, f] >= 0:
                assoc[h, g, f] = id2[comp[comp[h, g], f]]
        return cls(name, C.objects, C.morphisms, C.src, C.tgt, C.identity, C.comp, tuple(cells),
                   np.asarray(cell_src), np.asarray(cell_tgt), id2, vcomp, hcomp, assoc,
                   id2.copy(), id2.copy(), strict=True, caps=caps)

    @classmethod
    def build_strict(cls, name: str, C: FinCategory, cells: Sequence[tuple[str, str, str]] = (),
                     vcomp: Mapping[tuple[str, str], str] = None,
                     hcomp: Mapping[tuple[str, str], str] = None,
                     caps: SizeCaps = DEFAULT_CAPS) -> "FinBicategory":
        """Strict 2-category over the 1-category ``C`` from generator lists.

        Identity 2-cells ``i_f`` come first.  Identity laws, ``i_g * i_f`` and
        whiskering by identity 2-cells of identity 1-cells are implicit;
        other horizontal composites missing from ``hcomp`` are derived by
        interchange from whiskerings when possible.
        """
        vcomp = dict(vcomp or {})
        hcomp = dict(hcomp or {})
        names = [f"i_{m}" for m in C.morphisms]
        cs = list(range(C.n_morphisms))
        ct = list(range(C.n_morphisms))
        for cname, s, t in cells:
            try:
                cs.append(C.mor(s))
                ct.append(C.mor(t))
            except KeyError as exc:
                raise StructureError(f"2-cell {cname}: {exc.args[0]}") from None
            names.append(cname)
        _check_names(names, "2-cell")
        n2 = len(names)
        if n2 > caps.two_cells:
            raise SizeError(f"{n2} 2-cells exceed the cap of {caps.two_cells}")
        ci = {n: i for i, n in enumerate(names)}

        def idx(x: str) -> int:
            if x not in ci:
                raise StructureError(f"unknown 2-cell {x}")
            return ci[x]

        V = np.full((n2, n2), -1, dtype=np.int64)
        H = np.full((n2, n2), -1, dtype=np.int64)
        for a in range(n2):
            V[a, cs[a]] = a
            V[ct[a], a] = a
        for (b, a), c in vcomp.items():
            V[idx(b), idx(a)] = idx(c)
        for (b, a), c in hcomp.items():
            H[idx(b), idx(a)] = idx(c)
        src, tgt, comp = C.src, C.tgt, C.comp
        ids1 = set(C.identity.tolist())
        for g, f in product(range(C.n_morphisms), repeat=2):
            if comp[g, f] >= 0:
                H[g, f] = comp[g, f]  # i_g * i_f = i_gf
        for a in range(n2):
            for e in ids1:
                if src[cs[a]] == tgt[e]:
                    H[a, e] = a
                if tgt[cs[a]] == src[e]:
                    H[e, a] = a
        # interchange: b * a = (b * i_{f'}) . (i_g * a)
        changed = True
        while changed:
            changed = False
            for b, a in product(range(n2), repeat=2):
                if H[b, a] >= 0 or src[cs[b]] != tgt[cs[a]]:
                    continue
                left, right = H[b, ct[a]], H[cs[b], a]
                if left >= 0 and right >= 0 and V[left, right] >= 0:
                    H[b, a] = V[left, right]
                    changed = True
        for b, a in product(range(n2), repeat=2):
            if src[cs[b]] == tgt[cs[a]] and H[b, a] < 0:
                raise StructureError(f"missing horizontal composite {names[b]} * {names[a]}")
        for b, a in product(range(n2), repeat=2):
            if cs[b] == ct[a] and V[b, a] < 0:
                raise StructureError(f"missing vertical composite {names[b]} . {names[a]}")
        return cls.strict_from_tables(name, C, names, cs, ct, np.arange(C.n_morphisms), V, H, caps)


def _lookup(index: dict, x, n: int, kind: str, where: str) -> int:
    if isinstance(x, str):
        try:
            return index[x]
        except KeyError:
            raise KeyError(f"unknown {kind} {x!r} in {where}") from None
    if not 0 <= int(x) < n:
        raise KeyError(f"{kind} ordinal {x} out of range in {where}")
    return int(x)


def _range(arr: np.ndarray, n: int, what: str) -> None:
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise StructureError(f"dangling index in {what}")


def _defined_exactly(table, mask, left_names, right_names, what) -> None:
    bad = (table >= 0) & ~mask
    if bad.any():
        b, a = map(int, np.argwhere(bad)[0])
        raise StructureError(f"{what} given for non-composable pair {left_names[b]}, {right_names[a]}")
    missing = mask & (table < 0)
    if missing.any():
        b, a = map(int, np.argwhere(missing)[0])
        raise StructureError(f"missing {what} {left_names[b]}, {right_names[a]}")


# -- standard constructions -------------------------------------------------

def trivial_2category(C: FinCategory, caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``C`` with only identity 2-cells."""
    n1 = C.n_morphisms
    V = np.full((n1, n1), -1, dtype=np.int64)
    V[np.arange(n1), np.arange(n1)] = np.arange(n1)
    H = C.comp.copy()
    cells = [f"i_{m}" for m in C.morphisms]
    return FinBicategory.strict_from_tables(C.name, C, cells, range(n1), range(n1),
                                            np.arange(n1), V, H, caps)


def with_z2_cells(C: FinCategory, caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``C`` with a ``Z/2`` of automorphisms on every 1-cell; ``*`` adds the parities."""
    n1 = C.n_morphisms
    n2 = 2 * n1
    cells = [f"i_{m}" for m in C.morphisms] + [f"z_{m}" for m in C.morphisms]
    base = np.concatenate([np.arange(n1), np.arange(n1)])
    parity = np.concatenate([np.zeros(n1, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    V = np.full((n2, n2), -1, dtype=np.int64)
    H = np.full((n2, n2), -1, dtype=np.int64)
    for b, a in product(range(n2), repeat=2):
        if base[b] == base[a]:
            V[b, a] = base[a] + n1 * ((parity[a] + parity[b]) % 2)
        gf = C.comp[base[b], base[a]]
        if gf >= 0:
            H[b, a] = gf + n1 * ((parity[a] + parity[b]) % 2)
    return FinBicategory.strict_from_tables(f"{C.name}xZ2", C, cells, base, base,
                                            np.arange(n1), V, H, caps)


def with_idempotent_cells(C: FinCategory, caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``C`` with one idempotent non-invertible endo-2-cell ``e_f`` on every 1-cell.

    Both compositions take the "or" of the flags, so interchange holds.
    """
    n1 = C.n_morphisms
    n2 = 2 * n1
    cells = [f"i_{m}" for m in C.morphisms] + [f"e_{m}" for m in C.morphisms]
    base = np.concatenate([np.arange(n1), np.arange(n1)])
    flag = np.concatenate([np.zeros(n1, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    V = np.full((n2, n2), -1, dtype=np.int64)
    H = np.full((n2, n2), -1, dtype=np.int64)
    for b, a in product(range(n2), repeat=2):
        if base[b] == base[a]:
            V[b, a] = base[a] + n1 * (flag[a] | flag[b])
        gf = C.comp[base[b], base[a]]
        if gf >= 0:
            H[b, a] = gf + n1 * (flag[a] | flag[b])
    return FinBicategory.strict_from_tables(f"{C.name}xE", C, cells, base, base,
                                            np.arange(n1), V, H, caps)


def parallel_lax(caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``PARALLEL`` with one non-invertible 2-cell ``a: u => v``."""
    return FinBicategory.build_strict("PARALLEL-LAX", parallel(), [("a", "u", "v")], caps=caps)


def parallel_cone_iso(caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``PARALLEL-CONE`` with inverse 2-cells ``a: t => t2`` and ``b: t2 => t``
    that ``p`` whiskers to the identity of ``pt``."""
    return FinBicategory.build_strict(
        "PARALLEL-CONE-ISO", parallel_cone(), [("a", "t", "t2"), ("b", "t2", "t")],
        vcomp={("b", "a"): "i_t", ("a", "b"): "i_t2"},
        hcomp={("i_p", "a"): "i_pt", ("i_p", "b"): "i_pt"}, caps=caps)


def diamond_ghost(caps: SizeCaps = DEFAULT_CAPS) -> FinBicategory:
    """``DIAMOND`` with a ``Z/2`` 2-cell ``a`` on ``id_c`` that every 1-cell out of ``c`` kills."""
    return FinBicategory.build_strict(
        "DIAMOND-GHOST", diamond(), [("a", "id_c", "id_c")], vcomp={("a", "a"): "i_id_c"},
        hcomp={("i_p1", "a"): "i_p1", ("i_p2", "a"): "i_p2", ("i_d", "a"): "i_d"}, caps=caps)


BICAT_FIXTURES = {f"{k}-trivial": (lambda mk=mk: trivial_2category(mk()))
                  for k, mk in CATEGORY_FIXTURES.items()}
BICAT_FIXTURES.update({f"{k}-z2": (lambda mk=mk: with_z2_cells(mk()))
                       for k, mk in CATEGORY_FIXTURES.items()})
BICAT_FIXTURES.update({f"{k}-idem": (lambda mk=mk: with_idempotent_cells(mk()))
                       for k, mk in CATEGORY_FIXTURES.items()})
BICAT_FIXTURES["parallel-lax"] = parallel_lax
BICAT_FIXTURES["parallel-cone-iso"] = parallel_cone_iso
BICAT_FIXTURES["diamond-ghost"] = diamond_ghost


def fixture_w_variants(key: str, B: FinBicategory | None = None) -> dict[str, MorClass]:
    """The named classes of the category fixture that ``BICAT_FIXTURES[key]`` is built on."""
    base = max((c for c in CATEGORY_FIXTURES if key.startswith(c + "-")), key=len)
    B = BICAT_FIXTURES[key]() if B is None else B
    family = CATEGORY_FIXTURES[base]().name
    return {wn: MorClass(B, W.members, wn)
            for wn, W in w_variants(B.underlying_category(), family).items()}


def replace_tables(B: FinBicategory, **changes) -> FinBicategory:
    fields_ = {k: getattr(B, k) for k in (
        "name", "objects", "morphisms", "src", "tgt", "identity", "comp1", "cells", "cell_src",
        "cell_tgt", "id2", "vcomp", "hcomp", "assoc", "runitor", "lunitor", "strict", "caps")}
    fields_.update(changes)
    return FinBicategory(**fields_)


# -- validation ----------------------------------------------------------------

def validate_bicategory(B: FinBicategory) -> ValidationReport:
    """Exhaustive check of the bicategory laws; witnesses are ordinal tuples."""
    out: list[tuple[str, tuple[int, ...]]] = []
    n1, n2 = B.n_morphisms, B.n_cells
    for a in range(n2):
        if B._vc[B._id2[B._ct[a]]][a] != a or B._vc[a][B._id2[B._cs[a]]] != a:
            out.append(("vunit", (a,)))
    for b, a, c in _kernels.vcomp_assoc_violations(B.vcomp, B.cell_src, B.cell_tgt).tolist():
        out.append(("vassoc", (b, a, c)))
    for g, f in product(range(n1), repeat=2):
        gf = B._c1[g][f]
        if gf >= 0 and B._hc[B._id2[g]][B._id2[f]] != B._id2[gf]:
            out.append(("hunit", (g, f)))
    for w in _kernels.interchange_violations(B.vcomp, B.hcomp, B.src, B.tgt,
                                             B.cell_src, B.cell_tgt).tolist():
        out.append(("interchange", tuple(w)))
    for h, g, f in product(range(n1), repeat=3):
        x = B._th[h][g][f]
        if x >= 0 and B._inv[x] < 0:
            out.append(("assoc-invertible", (h, g, f)))
    for f in range(n1):
        if B._inv[B._pi[f]] < 0:
            out.append(("runitor-invertible", (f,)))
        if B._inv[B._up[f]] < 0:
            out.append(("lunitor-invertible", (f,)))
    for w in _kernels.assoc_naturality_violations(B.vcomp, B.hcomp, B.assoc, B.src, B.tgt,
                                                  B.cell_src, B.cell_tgt).tolist():
        out.append(("assoc-natural", tuple(w)))
    for a in range(n2):
        f, f2 = B._cs[a], B._ct[a]
        e_src, e_tgt = B._id[B._src[f]], B._id[B._tgt[f]]
        # pi_{f2} . (a * i_id) = a . pi_f   and   ups_{f2} . (i_id * a) = a . ups_f
        if B._vc[B._pi[f2]][B._hc[a][B._id2[e_src]]] != B._vc[a][B._pi[f]]:
            out.append(("runitor-natural", (a,)))
        if B._vc[B._up[f2]][B._hc[B._id2[e_tgt]][a]] != B._vc[a][B._up[f]]:
            out.append(("lunitor-natural", (a,)))
    for w in _kernels.pentagon_violations(B.comp1, B.vcomp, B.hcomp, B.assoc, B.id2,
                                          B.src, B.tgt).tolist():
        out.append(("pentagon", tuple(w)))
    for g, f in product(range(n1), repeat=2):
        if B._src[g] != B._tgt[f]:
            continue
        e = B._id[B._tgt[f]]
        # (pi_g * i_f) . theta_{g,id,f} = i_g * ups_f
        lhs = B._vc[B._hc[B._pi[g]][B._id2[f]]][B._th[g][e][f]]
        rhs = B._hc[B._id2[g]][B._up[f]]
        if lhs != rhs:
            out.append(("triangle", (g, f)))
    if B.strict:
        for w in _kernels.category_assoc_violations(B.comp1, B.src, B.tgt).tolist():
            out.append(("strict-assoc", tuple(w)))
        for f, side in _kernels.category_unit_violations(B.comp1, B.src, B.tgt, B.identity).tolist():
            out.append(("strict-unit", (f, side)))
        for h, g, f in product(range(n1), repeat=3):
            x = B._th[h][g][f]
            if x >= 0 and x != B._id2[B._cs[x]]:
                out.append(("strict-assoc-cell", (h, g, f)))
        for f in range(n1):
            if B._pi[f] != B._id2[f] or B._up[f] != B._id2[f]:
                out.append(("strict-unitor-cell", (f,)))
    return ValidationReport(tuple(out))


# -- internal equivalences --------------------------------------------------------

class AdjointEquivalenceData(NamedTuple):
    e: int
    d: int
    delta: int  # id => d e
    xi: int     # e d => id


def is_adjoint_equivalence(B: FinBicategory, data: AdjointEquivalenceData) -> bool:
    e, d, delta, xi = data
    a, b = B.source(e), B.target(e)
    if B.source(d) != b or B.target(d) != a:
        return False
    if B.cell_source(delta) != B.id(a) or B.cell_target(delta) != B.c1(d, e):
        return False
    if B.cell_source(xi) != B.c1(e, d) or B.cell_target(xi) != B.id(b):
        return False
    if not (B.is_invertible(delta) and B.is_invertible(xi)):
        return False
    zig = B.chain(B.ups(e), B.h(xi, B.i(e)), B.th(e, d, e), B.h(B.i(e), delta), B.inv(B.pi(e)))
    zag = B.chain(B.pi(d), B.h(B.i(d), xi), B.thi(d, e, d), B.h(delta, B.i(d)), B.inv(B.ups(d)))
    return zig == B.i(e) and zag == B.i(d)


def find_internal_equivalence(B: FinBicategory, e: int | str) -> AdjointEquivalenceData | None:
    """Least ``(d, delta, xi)`` making ``e`` an adjoint equivalence."""
    e = B.mor(e)
    a, b = B.source(e), B.target(e)
    for d in B.hom(b, a):
        de, ed = B.c1(d, e), B.c1(e, d)
        for delta in B.isos(B.id(a), de):
            for xi in B.isos(ed, B.id(b)):
                cand = AdjointEquivalenceData(e, d, delta, xi)
                if is_adjoint_equivalence(B, cand):
                    return cand
    return None


def quasi_inverse(B: FinBicategory, e: int) -> tuple[int, int, int] | None:
    """Any ``(d, delta, xi)`` with invertible unit and counit, ignoring zig-zags."""
    a, b = B.source(e), B.target(e)
    for d in B.hom(b, a):
        de, ed = B.c1(d, e), B.c1(e, d)
        units = B.isos(B.id(a), de)
        counits = B.isos(ed, B.id(b))
        if units and counits:
            return d, units[0], counits[0]
    return None


def internal_equivalences(B: FinBicategory) -> list[AdjointEquivalenceData]:
    out = []
    for e in range(B.n_morphisms):
        data = find_internal_equivalence(B, e)
        if data is not None:
            out.append(data)
    return out


# -- weak fiber products ---------------------------------------------------------

@dataclass(frozen=True)
class WfpSquare:
    ambient: FinBicategory
    g1: int
    g2: int
    apex: int
    r1: int
    r2: int
    omega: int

    def __post_init__(self) -> None:
        B = self.ambient
        g1, g2, r1, r2 = self.g1, self.g2, self.r1, self.r2
        if B.target(g1) != B.target(g2):
            raise BicatError("cospan targets differ")
        if B.source(r1) != self.apex or B.source(r2) != self.apex:
            raise BicatError("legs do not start at the apex")
        if B.target(r1) != B.source(g1) or B.target(r2) != B.source(g2):
            raise BicatError("legs do not meet the cospan")
        if B.cell_source(self.omega) != B.c1(g1, r1) or B.cell_target(self.omega) != B.c1(g2, r2):
            raise BicatError("omega has the wrong endpoints")
        if not B.is_invertible(self.omega):
            raise BicatError("omega is not invertible")

    def describe(self) -> str:
        B = self.ambient
        m = B.morphisms
        return (f"({B.objects[self.apex]}, {m[self.r1]}, {m[self.r2]}, {B.cells[self.omega]}) "
                f"over ({m[self.g1]}, {m[self.g2]})")


def comparison(sq: WfpSquare, s: int) -> int:
    """Third component of ``F_D(s)``: ``g1 (r1 s) => g2 (r2 s)``."""
    B = sq.ambient
    return B.chain(B.thi(sq.g2, sq.r2, s), B.h(sq.omega, B.i(s)), B.th(sq.g1, sq.r1, s))


def b1_failure(sq: WfpSquare, D: int, s1: int, s2: int) -> int | None:
    """First invertible ``Lambda: g1 s1 => g2 s2`` with no completion, or ``None``."""
    B = sq.ambient
    if B.source(s1) != D or B.source(s2) != D or B.target(s1) != B.source(sq.g1) \
            or B.target(s2) != B.source(sq.g2):
        raise BicatError("B1 data do not match the square")
    g1s1, g2s2 = B.c1(sq.g1, s1), B.c1(sq.g2, s2)
    # left side of the completion equation for every (s, Lambda1)
    completions: list[tuple[int, set[int], list[tuple[int, int]]]] = []
    for s in B.hom(D, sq.apex):
        r1s, r2s = B.c1(sq.r1, s), B.c1(sq.r2, s)
        l1s = B.isos(s1, r1s)
        l2s = B.isos(s2, r2s)
        if not l1s or not l2s:
            continue
        base = B.v(B.h(sq.omega, B.i(s)), B.th(sq.g1, sq.r1, s))
        lhs = {B.v(base, B.h(B.i(sq.g1), l1)) for l1 in l1s}
        th2 = B.th(sq.g2, sq.r2, s)
        rhs_parts = [B.v(th2, B.h(B.i(sq.g2), l2)) for l2 in l2s]
        completions.append((s, lhs, rhs_parts))
    for lam in B.isos(g1s1, g2s2):
        found = False
        for _, lhs, rhs_parts in completions:
            if any(B.v(part, lam) in lhs for part in rhs_parts):
                found = True
                break
        if not found:
            return lam
    return None


def check_B1(sq: WfpSquare, D: int, s1: int, s2: int) -> bool:
    return b1_failure(sq, D, s1, s2) is None


def b2_failure(sq: WfpSquare, D: int, t: int, t2: int) -> tuple[int, int, int] | None:
    """First ``(Gamma1, Gamma2, count)`` with ``count != 1`` lifts, or ``None``."""
    B = sq.ambient
    if B.source(t) != D or B.source(t2) != D or B.target(t) != sq.apex or B.target(t2) != sq.apex:
        raise BicatError("B2 data do not match the square")
    r1t, r1t2 = B.c1(sq.r1, t), B.c1(sq.r1, t2)
    r2t, r2t2 = B.c1(sq.r2, t), B.c1(sq.r2, t2)
    f_t, f_t2 = comparison(sq, t), comparison(sq, t2)
    ir1, ir2, ig1, ig2 = B.i(sq.r1), B.i(sq.r2), B.i(sq.g1), B.i(sq.g2)
    lifts = [(B.h(ir1, gam), B.h(ir2, gam)) for gam in B.isos(t, t2)]
    for G1 in B.isos(r1t, r1t2):
        left = B.v(f_t2, B.h(ig1, G1))
        for G2 in B.isos(r2t, r2t2):
            if left != B.v(B.h(ig2, G2), f_t):
                continue
            count = sum(1 for x in lifts if x == (G1, G2))
            if count != 1:
                return G1, G2, count
    return None


def check_B2(sq: WfpSquare, D: int, t: int, t2: int) -> bool:
    return b2_failure(sq, D, t, t2) is None


def check_A1(sq: WfpSquare, D: int) -> bool:
    B = sq.ambient
    b1, b2 = B.source(sq.g1), B.source(sq.g2)
    return all(check_B1(sq, D, s1, s2) for s1 in B.hom(D, b1) for s2 in B.hom(D, b2))


def check_A2(sq: WfpSquare, D: int) -> bool:
    B = sq.ambient
    hom = B.hom(D, sq.apex)
    return all(check_B2(sq, D, t, t2) for t in hom for t2 in hom)


class WfpFailure(NamedTuple):
    condition: str
    D: int
    cells: tuple[int, ...]
    witness: tuple[int, ...]


def wfp_failure(sq: WfpSquare) -> WfpFailure | None:
    B = sq.ambient
    b1, b2 = B.source(sq.g1), B.source(sq.g2)
    for D in range(B.n_objects):
        for s1 in B.hom(D, b1):
            for s2 in B.hom(D, b2):
                lam = b1_failure(sq, D, s1, s2)
                if lam is not None:
                    return WfpFailure("A1", D, (s1, s2), (lam,))
        hom = B.hom(D, sq.apex)
        for t in hom:
            for t2 in hom:
                bad = b2_failure(sq, D, t, t2)
                if bad is not None:
                    return WfpFailure("A2", D, (t, t2), bad)
    return None


def is_weak_fiber_product(sq: WfpSquare) -> bool:
    return wfp_failure(sq) is None


def candidate_squares(B: FinBicategory, g1: int, g2: int) -> Iterable[WfpSquare]:
    """Every ``(C, r1, r2, Omega)`` with ``Omega`` invertible, in ordinal order."""
    b1, b2 = B.source(g1), B.source(g2)
    for c in range(B.n_objects):
        for r1 in B.hom(c, b1):
            x = B.c1(g1, r1)
            for r2 in B.hom(c, b2):
                for om in B.isos(x, B.c1(g2, r2)):
                    yield WfpSquare(B, g1, g2, c, r1, r2, om)


def find_weak_fiber_product(B: FinBicategory, g1: int, g2: int) -> WfpSquare | None:
    for sq in candidate_squares(B, g1, g2):
        if is_weak_fiber_product(sq):
            return sq
    return None


# -- transforms --------------------------------------------------------------------

@dataclass(frozen=True)
class PreEquiv:
    eq1: AdjointEquivalenceData
    eq2: AdjointEquivalenceData


@dataclass(frozen=True)
class PostEquiv:
    e: int


@dataclass(frozen=True)
class Twist:
    omega1: int  # g1 => g1bar
    omega2: int  # g2 => g2bar


@dataclass(frozen=True)
class ApexEquiv:
    e: int


Transform = Union[PreEquiv, PostEquiv, Twist, ApexEquiv]


def transform_wfp_diagram(sq: WfpSquare, t: Transform) -> WfpSquare:
    B = sq.ambient
    g1, g2, r1, r2, om = sq.g1, sq.g2, sq.r1, sq.r2, sq.omega
    if isinstance(t, Twist):
        o1, o2 = t.omega1, t.omega2
        if B.cell_source(o1) != g1 or B.cell_source(o2) != g2:
            raise BicatError("twist cells must start at the cospan")
        if not (B.is_invertible(o1) and B.is_invertible(o2)):
            raise BicatError("twist cells must be invertible")
        n1, n2 = B.cell_target(o1), B.cell_target(o2)
        new = B.chain(B.h(o2, B.i(r2)), om, B.h(B.inv(o1), B.i(r1)))
        return WfpSquare(B, n1, n2, sq.apex, r1, r2, new)
    if isinstance(t, PostEquiv):
        e = t.e
        if B.source(e) != B.target(g1):
            raise BicatError("post-composed 1-cell must start at the cospan target")
        if quasi_inverse(B, e) is None:
            raise BicatError(f"{B.morphisms[e]} is not an internal equivalence")
        new = B.chain(B.th(e, g2, r2), B.h(B.i(e), om), B.thi(e, g1, r1))
        return WfpSquare(B, B.c1(e, g1), B.c1(e, g2), sq.apex, r1, r2, new)
    if isinstance(t, ApexEquiv):
        e = t.e
        if B.target(e) != sq.apex:
            raise BicatError("apex 1-cell must end at the apex")
        if quasi_inverse(B, e) is None:
            raise BicatError(f"{B.morphisms[e]} is not an internal equivalence")
        new = B.chain(B.thi(g2, r2, e), B.h(om, B.i(e)), B.th(g1, r1, e))
        return WfpSquare(B, g1, g2, B.source(e), B.c1(r1, e), B.c1(r2, e), new)
    if isinstance(t, PreEquiv):
        (e1, d1, _, x1), (e2, d2, _, x2) = t.eq1, t.eq2
        for data in (t.eq1, t.eq2):
            if not is_adjoint_equivalence(B, data):
                raise BicatError("pre-composition data is not an adjoint equivalence")
        if B.target(e1) != B.source(g1) or B.target(e2) != B.source(g2):
            raise BicatError("equivalences must end at the cospan sources")
        g1e1, g2e2 = B.c1(g1, e1), B.c1(g2, e2)
        new = B.chain(
            B.thi(g2e2, d2, r2),
            B.h(B.th(g2, e2, d2), B.i(r2)),
            B.h(B.h(B.i(g2), B.inv(x2)), B.i(r2)),
            B.h(B.inv(B.pi(g2)), B.i(r2)),
            om,
            B.h(B.pi(g1), B.i(r1)),
            B.h(B.h(B.i(g1), x1), B.i(r1)),
            B.h(B.thi(g1, e1, d1), B.i(r1)),
            B.th(g1e1, d1, r1),
        )
        return WfpSquare(B, g1e1, g2e2, sq.apex, B.c1(d1, r1), B.c1(d2, r2), new)
    raise TypeError(f"unknown transform {t!r}")


def admissible_transforms(sq: WfpSquare) -> list[Transform]:
    """Every transform applicable to ``sq`` in its ambient bicategory."""
    B = sq.ambient
    g1, g2 = sq.g1, sq.g2
    eqs = internal_equivalences(B)
    out: list[Transform] = []
    into1 = [d for d in eqs if B.target(d.e) == B.source(g1)]
    into2 = [d for d in eqs if B.target(d.e) == B.source(g2)]
    out += [PreEquiv(a, b) for a in into1 for b in into2]
    out += [PostEquiv(d.e) for d in eqs if B.source(d.e) == B.target(g1)]
    out += [ApexEquiv(d.e) for d in eqs if B.target(d.e) == sq.apex]
    tw1 = [x for x in range(B.n_cells) if B.cell_source(x) == g1 and B.is_invertible(x)]
    tw2 = [x for x in range(B.n_cells) if B.cell_source(x) == g2 and B.is_invertible(x)]
    out += [Twist(a, b) for a in tw1 for b in tw2]
    return out


# -- strict 2-functors ---------------------------------------------------------------

@dataclass(frozen=True)
class Strict2Functor:
    source: FinBicategory
    target: FinBicategory
    objects: tuple[int, ...]
    one_cells: tuple[int, ...]
    two_cells: tuple[int, ...]


class FunctorError(ValueError):
    pass


def functor_violations(F: Strict2Functor) -> list[str]:
    S, T = F.source, F.target
    o, m, c = F.objects, F.one_cells, F.two_cells
    bad = []
    if len(o) != S.n_objects or len(m) != S.n_morphisms or len(c) != S.n_cells:
        return ["maps have the wrong length"]
    for f in range(S.n_morphisms):
        if T.source(m[f]) != o[S.source(f)] or T.target(m[f]) != o[S.target(f)]:
            bad.append(f"1-cell {S.morphisms[f]} endpoints")
    for a in range(S.n_objects):
        if m[S.id(a)] != T.id(o[a]):
            bad.append(f"identity of {S.objects[a]}")
    for g, f in product(range(S.n_morphisms), repeat=2):
        gf = S._c1[g][f]
        if gf >= 0 and T._c1[m[g]][m[f]] != m[gf]:
            bad.append(f"composite {S.morphisms[g]} {S.morphisms[f]}")
    for x in range(S.n_cells):
        if T.cell_source(c[x]) != m[S.cell_source(x)] or T.cell_target(c[x]) != m[S.cell_target(x)]:
            bad.append(f"2-cell {S.cells[x]} endpoints")
    for f in range(S.n_morphisms):
        if c[S.i(f)] != T.i(m[f]):
            bad.append(f"identity 2-cell of {S.morphisms[f]}")
    for b, a in product(range(S.n_cells), repeat=2):
        x = S._vc[b][a]
        if x >= 0 and T._vc[c[b]][c[a]] != c[x]:
            bad.append(f"vertical composite {S.cells[b]} {S.cells[a]}")
        y = S._hc[b][a]
        if y >= 0 and T._hc[c[b]][c[a]] != c[y]:
            bad.append(f"horizontal composite {S.cells[b]} {S.cells[a]}")
    return bad


def weak_equivalence_failures(F: Strict2Functor) -> list[str]:
    """Failures of essential surjectivity on objects and of the hom-functor equivalences."""
    S, T = F.source, F.target
    o, m, c = F.objects, F.one_cells, F.two_cells
    bad = []
    for b in range(T.n_objects):
        if not any(quasi_inverse(T, e) is not None
                   for a in range(S.n_objects) for e in T.hom(o[a], b)):
            bad.append(f"X1: {T.objects[b]} is not equivalent to an image object")
    for a1, a2 in product(range(S.n_objects), repeat=2):
        hom = S.hom(a1, a2)
        for k in T.hom(o[a1], o[a2]):
            if not any(T.isos(m[f], k) for f in hom):
                bad.append(f"X2: {T.morphisms[k]} is not isomorphic to an image 1-cell")
        for f, g in product(hom, repeat=2):
            images = sorted(c[x] for x in S.between(f, g))
            if images != sorted(T.between(m[f], m[g])):
                bad.append(f"X2: 2-cells {S.morphisms[f]} => {S.morphisms[g]} not mapped bijectively")
    return bad


def map_square(F: Strict2Functor, sq: WfpSquare) -> WfpSquare:
    m, c = F.one_cells, F.two_cells
    return WfpSquare(F.target, m[sq.g1], m[sq.g2], F.objects[sq.apex], m[sq.r1], m[sq.r2], c[sq.omega])


def check_strict_2functor_transport(F: Strict2Functor, sq: WfpSquare) -> bool:
    """Whether the image of ``sq`` under a weak equivalence ``F`` is a weak fiber product."""
    if not (F.source.strict and F.target.strict):
        raise FunctorError("only strict 2-functors between strict 2-categories are supported")
    bad = functor_violations(F)
    if bad:
        raise FunctorError("not a strict 2-functor: " + "; ".join(bad[:3]))
    bad = weak_equivalence_failures(F)
    if bad:
        raise FunctorError("not a weak equivalence: " + "; ".join(bad[:3]))
    return is_weak_fiber_product(map_square(F, sq))


def identity_functor(B: FinBicategory) -> Strict2Functor:
    return Strict2Functor(B, B, tuple(range(B.n_objects)), tuple(range(B.n_morphisms)),
                          tuple(range(B.n_cells)))
