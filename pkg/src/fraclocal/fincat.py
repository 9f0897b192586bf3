"""Finite categories stored as fully materialised composition tables.

Objects and morphisms are identified by their ordinal (an ``int``) and carry
a unique display name.  ``comp[g, f]`` holds the ordinal of ``g . f`` when
``src(g) == tgt(f)`` and ``-1`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels

ObjId = int
MorId = int

MAX_OBJECTS = 32
MAX_MORPHISMS = 512


class StructureError(ValueError):
    """Malformed tables: dangling index, duplicate name, missing composite."""


class SizeError(StructureError):
    pass


class CompositionError(ValueError):
    pass


def _frozen(a, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FinCategory:
    name: str
    objects: tuple[str, ...]
    morphisms: tuple[str, ...]
    src: np.ndarray
    tgt: np.ndarray
    identity: np.ndarray
    comp: np.ndarray
    max_objects: int = field(default=MAX_OBJECTS, repr=False)

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "objects", tuple(self.objects))
        set_(self, "morphisms", tuple(self.morphisms))
        for attr in ("src", "tgt", "identity", "comp"):
            set_(self, attr, _frozen(getattr(self, attr)))
        no, nm = len(self.objects), len(self.morphisms)
        if no > self.max_objects or nm > MAX_MORPHISMS:
            raise SizeError(f"category {self.name!r} has {no} objects and {nm} morphisms; "
                            f"limit is {self.max_objects} objects / {MAX_MORPHISMS} morphisms")
        _check_names(self.objects, "object")
        _check_names(self.morphisms, "morphism")
        if self.src.shape != (nm,) or self.tgt.shape != (nm,):
            raise StructureError("src/tgt must have one entry per morphism")
        if self.identity.shape != (no,):
            raise StructureError("identity must have one entry per object")
        if self.comp.shape != (nm, nm):
            raise StructureError("comp must be a square table over morphisms")
        if nm and (self.src.min() < 0 or self.src.max() >= no or self.tgt.min() < 0 or self.tgt.max() >= no):
            raise StructureError("dangling object index in src/tgt")
        if no and (self.identity.min() < 0 or self.identity.max() >= nm):
            raise StructureError("dangling morphism index in identity")
        for a in range(no):
            i = int(self.identity[a])
            if self.src[i] != a or self.tgt[i] != a:
                raise StructureError(f"identity of {self.objects[a]} is not an endomorphism of it")
        if len(set(self.identity.tolist())) != no:
            raise StructureError("two objects share an identity morphism")
        composable = self.src[:, None] == self.tgt[None, :]
        if np.any(self.comp[~composable] != -1):
            g, f = map(int, np.argwhere((self.comp != -1) & ~composable)[0])
            raise StructureError(f"composite given for non-composable pair "
                                 f"{self.morphisms[g]} . {self.morphisms[f]}")
        missing = composable & (self.comp < 0)
        if missing.any():
            g, f = map(int, np.argwhere(missing)[0])
            raise StructureError(f"missing composite {self.morphisms[g]} . {self.morphisms[f]}")
        if np.any(self.comp >= nm):
            raise StructureError("dangling morphism index in comp")
        g_idx, f_idx = np.nonzero(composable)
        h_idx = self.comp[g_idx, f_idx]
        bad = (self.src[h_idx] != self.src[f_idx]) | (self.tgt[h_idx] != self.tgt[g_idx])
        if bad.any():
            k = int(np.argmax(bad))
            raise StructureError(f"composite {self.morphisms[g_idx[k]]} . {self.morphisms[f_idx[k]]} "
                                 f"= {self.morphisms[h_idx[k]]} has the wrong endpoints")
        # python-side caches for the search loops
        set_(self, "_obj_index", {n: i for i, n in enumerate(self.objects)})
        set_(self, "_mor_index", {n: i for i, n in enumerate(self.morphisms)})
        set_(self, "_src", self.src.tolist())
        set_(self, "_tgt", self.tgt.tolist())
        set_(self, "_id", self.identity.tolist())
        set_(self, "_comp", self.comp.tolist())
        hom: dict[tuple[int, int], list[int]] = {(a, b): [] for a in range(no) for b in range(no)}
        for m in range(nm):
            hom[(self._src[m], self._tgt[m])].append(m)
        set_(self, "_hom", {k: tuple(v) for k, v in hom.items()})

    # -- lookups ---------------------------------------------------------
    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def obj(self, x: ObjId | str) -> ObjId:
        if isinstance(x, str):
            try:
                return self._obj_index[x]
            except KeyError:
                raise KeyError(f"unknown object {x!r} in {self.name}") from None
        if not 0 <= int(x) < self.n_objects:
            raise KeyError(f"object ordinal {x} out of range in {self.name}")
        return int(x)

    def mor(self, x: MorId | str) -> MorId:
        if isinstance(x, str):
            try:
                return self._mor_index[x]
            except KeyError:
                raise KeyError(f"unknown morphism {x!r} in {self.name}") from None
        if not 0 <= int(x) < self.n_morphisms:
            raise KeyError(f"morphism ordinal {x} out of range in {self.name}")
        return int(x)

    def hom(self, a: ObjId, b: ObjId) -> tuple[MorId, ...]:
        return self._hom[(a, b)]

    def source(self, f: MorId) -> ObjId:
        return self._src[f]

    def target(self, f: MorId) -> ObjId:
        return self._tgt[f]

    def id(self, a: ObjId) -> MorId:
        return self._id[a]

    def is_identity(self, f: MorId) -> bool:
        return self._id[self._src[f]] == f

    def compose(self, g: MorId, f: MorId) -> MorId:
        h = self._comp[g][f]
        if h < 0:
            raise CompositionError(f"{self.morphisms[g]} . {self.morphisms[f]} is not composable")
        return h

    def c(self, g: MorId, f: MorId) -> MorId:
        """Unchecked composite (``-1`` when not composable)."""
        return self._comp[g][f]

    def describe(self, f: MorId) -> str:
        return f"{self.morphisms[f]}: {self.objects[self._src[f]]} -> {self.objects[self._tgt[f]]}"

    def same_tables(self, other: "FinCategory") -> bool:
        return (self.objects == other.objects and self.morphisms == other.morphisms
                and np.array_equal(self.src, other.src) and np.array_equal(self.tgt, other.tgt)
                and np.array_equal(self.identity, other.identity)
                and np.array_equal(self.comp, other.comp))

    # -- construction ----------------------------------------------------
    @classmethod
    def build(
        cls,
        name: str,
        objects: Sequence[str],
        morphisms: Sequence[tuple[str, str, str]],
        composites: Mapping[tuple[str, str], str] | Iterable[tuple[str, str, str]] = (),
        max_objects: int = MAX_OBJECTS,
    ) -> "FinCategory":
        """Build from generator lists.

        Identities ``id_X`` are added first (one per object, in object order)
        and their composites are implicit; every other composable pair must
        appear in ``composites`` as ``(g, f) -> h`` or a ``(g, f, h)`` triple.
        """
        objects = list(objects)
        oi = {n: i for i, n in enumerate(objects)}
        if len(oi) != len(objects):
            raise StructureError("duplicate object name")
        names = [f"id_{o}" for o in objects]
        src = list(range(len(objects)))
        tgt = list(range(len(objects)))
        for mname, s, t in morphisms:
            if s not in oi or t not in oi:
                bad = s if s not in oi else t
                raise StructureError(f"morphism {mname} refers to unknown object {bad}")
            names.append(mname)
            src.append(oi[s])
            tgt.append(oi[t])
        mi = {n: i for i, n in enumerate(names)}
        if len(mi) != len(names):
            raise StructureError("duplicate morphism name")
        nm = len(names)
        comp = np.full((nm, nm), -1, dtype=np.int64)
        for f in range(nm):
            comp[tgt[f], f] = f  # id_tgt . f
            comp[f, src[f]] = f  # f . id_src
        items = composites.items() if isinstance(composites, Mapping) else ((k[:2], k[2]) for k in composites)
        for (g, f), h in items:
            for x in (g, f, h):
                if x not in mi:
                    raise StructureError(f"composite {g} . {f} = {h} refers to unknown morphism {x}")
            comp[mi[g], mi[f]] = mi[h]
        return cls(name, tuple(objects), tuple(names), np.array(src), np.array(tgt),
                   np.arange(len(objects)), comp, max_objects=max_objects)

    @classmethod
    def poset(cls, name: str, elements: Sequence[str], relations: Mapping[str, tuple[str, str]]) -> "FinCategory":
        """Thin category on ``elements``; ``relations`` names every strict ``x < y`` arrow."""
        by_ends = {ends: n for n, ends in relations.items()}
        if len(by_ends) != len(relations):
            raise StructureError("two arrows with the same endpoints in a poset")
        composites = {}
        for g, (b, c) in relations.items():
            for f, (a, b2) in relations.items():
                if b2 == b:
                    if (a, c) not in by_ends:
                        raise StructureError(f"relation set is not transitive at {f}, {g}")
                    composites[(g, f)] = by_ends[(a, c)]
        mors = [(n, a, b) for n, (a, b) in relations.items()]
        return cls.build(name, elements, mors, composites)


def _check_names(names: Sequence[str], kind: str) -> None:
    seen = set()
    for n in names:
        if not isinstance(n, str) or not n:
            raise StructureError(f"{kind} names must be non-empty strings")
        if n in seen:
            raise StructureError(f"duplicate {kind} name {n!r}")
        seen.add(n)


@dataclass(frozen=True, eq=False)
class MorClass:
    """A class of morphisms (or 1-cells) of ``parent``, stored by ordinal."""

    parent: object
    members: frozenset[int]
    name: str = "W"

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        n = len(self.parent.morphisms)
        for m in self.members:
            if not 0 <= m < n:
                raise StructureError(f"class {self.name} contains dangling morphism index {m}")

    def __contains__(self, m: int) -> bool:
        return m in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def names(self) -> list[str]:
        return [self.parent.morphisms[m] for m in sorted(self.members)]

    @classmethod
    def identities(cls, parent, name: str = "W") -> "MorClass":
        return cls(parent, frozenset(parent.identity.tolist()), name)

    @classmethod
    def everything(cls, parent, name: str = "W") -> "MorClass":
        return cls(parent, frozenset(range(len(parent.morphisms))), name)

    @classmethod
    def of(cls, parent, names: Iterable[str], ids: bool = True, name: str = "W") -> "MorClass":
        members = set(parent.identity.tolist()) if ids else set()
        members |= {parent.mor(n) for n in names}
        return cls(parent, frozenset(members), name)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[tuple[str, tuple[int, ...]], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def tags(self) -> set[str]:
        return {t for t, _ in self.violations}


def validate_category(C: FinCategory) -> ValidationReport:
    """Unit and associativity laws, exhaustively.

    Structural problems already raise ``StructureError`` on construction.
    Violations come unit laws first, then associativity, each in
    lexicographic order of the witness ordinals.
    """
    out: list[tuple[str, tuple[int, ...]]] = []
    for f, side in _kernels.category_unit_violations(C.comp, C.src, C.tgt, C.identity).tolist():
        out.append(("left-unit" if side == 0 else "right-unit", (f,)))
    for h, g, f in _kernels.category_assoc_violations(C.comp, C.src, C.tgt).tolist():
        out.append(("assoc", (h, g, f)))
    return ValidationReport(tuple(out))


def compose(C: FinCategory, g: MorId | str, f: MorId | str) -> MorId:
    return C.compose(C.mor(g), C.mor(f))


class Cone(NamedTuple):
    apex: ObjId
    p1: MorId
    p2: MorId


def cones(C: FinCategory, f1: MorId, f2: MorId) -> list[Cone]:
    """All ``(D, q1, q2)`` with ``f1 q1 = f2 q2``, in lexicographic order."""
    b1, b2 = C.source(f1), C.source(f2)
    out = []
    for d in range(C.n_objects):
        for q1 in C.hom(d, b1):
            x = C.c(f1, q1)
            for q2 in C.hom(d, b2):
                if C.c(f2, q2) == x:
                    out.append(Cone(d, q1, q2))
    return out


def _check_cospan(C: FinCategory, f1: MorId, f2: MorId) -> None:
    if C.target(f1) != C.target(f2):
        raise CompositionError(f"cospan targets differ: {C.describe(f1)} vs {C.describe(f2)}")


def is_pullback_cone(C: FinCategory, f1: MorId | str, f2: MorId | str,
                     apex: ObjId | str, p1: MorId | str, p2: MorId | str,
                     _all_cones: list[Cone] | None = None) -> bool:
    """Whether ``(apex, p1, p2)`` is a pullback of ``(f1, f2)``."""
    f1, f2, p1, p2 = C.mor(f1), C.mor(f2), C.mor(p1), C.mor(p2)
    apex = C.obj(apex)
    _check_cospan(C, f1, f2)
    if C.source(p1) != apex or C.source(p2) != apex or C.target(p1) != C.source(f1) \
            or C.target(p2) != C.source(f2):
        raise CompositionError("candidate legs do not match the cospan")
    if C.c(f1, p1) != C.c(f2, p2):
        return False
    all_cones = cones(C, f1, f2) if _all_cones is None else _all_cones
    if not all_cones:
        return False
    q1 = np.array([c.p1 for c in all_cones])
    q2 = np.array([c.p2 for c in all_cones])
    counts = _kernels.mediator_counts(C.comp, C.src, C.tgt, apex, p1, p2, q1, q2)
    return bool(np.all(counts == 1))


def pullback_oracle(C: FinCategory, f1: MorId | str, f2: MorId | str) -> Cone | None:
    """Least cone with the universal property of a pullback, or ``None``."""
    f1, f2 = C.mor(f1), C.mor(f2)
    _check_cospan(C, f1, f2)
    all_cones = cones(C, f1, f2)
    for cand in all_cones:
        if is_pullback_cone(C, f1, f2, cand.apex, cand.p1, cand.p2, _all_cones=all_cones):
            return cand
    return None


class Isomorphism(NamedTuple):
    objects: tuple[int, ...]
    morphisms: tuple[int, ...]


def are_isomorphic_categories(C: FinCategory, D: FinCategory) -> Isomorphism | None:
    """Backtracking search for a structure-preserving bijection ``C -> D``.

    Object images are tried in ordinal order, so the first mapping found is
    the lexicographically least one.
    """
    if C.n_objects != D.n_objects or C.n_morphisms != D.n_morphisms:
        return None
    n = C.n_objects

    def profile(X: FinCategory, a: int) -> tuple:
        return (len(X.hom(a, a)),
                sorted(len(X.hom(a, b)) for b in range(X.n_objects)),
                sorted(len(X.hom(b, a)) for b in range(X.n_objects)))

    pc = [profile(C, a) for a in range(n)]
    pd = [profile(D, a) for a in range(n)]
    if sorted(pc) != sorted(pd):
        return None

    obj_map = [-1] * n
    used = [False] * n

    def assign_objects(i: int) -> Isomorphism | None:
        if i == n:
            return _match_morphisms(C, D, obj_map)
        for b in range(n):
            if used[b] or pc[i] != pd[b]:
                continue
            if any(len(C.hom(i, j)) != len(D.hom(b, obj_map[j])) or
                   len(C.hom(j, i)) != len(D.hom(obj_map[j], b)) for j in range(i)):
                continue
            obj_map[i] = b
            used[b] = True
            found = assign_objects(i + 1)
            if found is not None:
                return found
            used[b] = False
            obj_map[i] = -1
        return None

    return assign_objects(0)


def _match_morphisms(C: FinCategory, D: FinCategory, obj_map: list[int]) -> Isomorphism | None:
    order = [m for m in range(C.n_morphisms) if not C.is_identity(m)]
    mor_map = [-1] * C.n_morphisms
    taken = [False] * D.n_morphisms
    for a in range(C.n_objects):
        mor_map[C.id(a)] = D.id(obj_map[a])
        taken[D.id(obj_map[a])] = True

    def consistent(m: int) -> bool:
        # every composite among already-mapped morphisms must be preserved
        for x in range(C.n_morphisms):
            if mor_map[x] < 0:
                continue
            for g, f in ((m, x), (x, m)):
                h = C.c(g, f)
                if h >= 0 and mor_map[h] >= 0 and D.c(mor_map[g], mor_map[f]) != mor_map[h]:
                    return False
            # m may itself be a composite of mapped morphisms
            for y in range(C.n_morphisms):
                if mor_map[y] >= 0 and C.c(x, y) == m and D.c(mor_map[x], mor_map[y]) != mor_map[m]:
                    return False
        return True

    def go(i: int) -> bool:
        if i == len(order):
            return True
        m = order[i]
        a, b = obj_map[C.source(m)], obj_map[C.target(m)]
        for cand in D.hom(a, b):
            if taken[cand]:
                continue
            mor_map[m] = cand
            taken[cand] = True
            if consistent(m) and go(i + 1):
                return True
            taken[cand] = False
            mor_map[m] = -1
        return False

    if not go(0):
        return None
    # final exhaustive confirmation of functoriality
    for g, f in product(range(C.n_morphisms), repeat=2):
        h = C.c(g, f)
        if h >= 0 and D.c(mor_map[g], mor_map[f]) != mor_map[h]:
            return None
    return Isomorphism(tuple(obj_map), tuple(mor_map))


# -- fixture corpus --------------------------------------------------------

def arrow() -> FinCategory:
    """Two objects ``X``, ``Y`` and one arrow ``w: X -> Y``."""
    return FinCategory.build("ARROW", ["X", "Y"], [("w", "X", "Y")])


def arrow_ext() -> FinCategory:
    """``ARROW`` with a fresh object ``Yb`` reached from ``Y`` by ``u``."""
    return FinCategory.poset("ARROW-EXT", ["X", "Y", "Yb"],
                             {"w": ("X", "Y"), "u": ("Y", "Yb"), "uw": ("X", "Yb")})


def diamond() -> FinCategory:
    """Poset ``c <= b1, b2 <= a`` with ``c <= a``."""
    return FinCategory.poset("DIAMOND", ["c", "b1", "b2", "a"], {
        "p1": ("c", "b1"), "p2": ("c", "b2"),
        "f1": ("b1", "a"), "f2": ("b2", "a"),
        "d": ("c", "a"),
    })


def diamond_ext() -> FinCategory:
    """``DIAMOND`` plus ``a2`` isomorphic to ``a`` via ``e: a -> a2``, ``k: a2 -> a``."""
    objects = ["c", "b1", "b2", "a", "a2"]
    mors = [("p1", "c", "b1"), ("p2", "c", "b2"), ("f1", "b1", "a"), ("f2", "b2", "a"),
            ("d", "c", "a"), ("e", "a", "a2"), ("k", "a2", "a"),
            ("f1x", "b1", "a2"), ("f2x", "b2", "a2"), ("dx", "c", "a2")]
    # thin except that a and a2 are isomorphic, so the composite is forced by endpoints
    ends = {n: (s, t) for n, s, t in mors}
    for o in objects:
        ends[f"id_{o}"] = (o, o)
    by_ends = {v: k for k, v in ends.items()}
    composites = {}
    for g, (b, c) in ends.items():
        for f, (a, b2) in ends.items():
            if b == b2 and not g.startswith("id_") and not f.startswith("id_"):
                composites[(g, f)] = by_ends[(a, c)]
    return FinCategory.build("DIAMOND-EXT", objects, mors, composites)


def double_diamond() -> FinCategory:
    """Two incomparable lower bounds ``c1``, ``c2`` of ``b1``, ``b2``."""
    return FinCategory.poset("DOUBLE-DIAMOND", ["c1", "c2", "b1", "b2", "a"], {
        "p11": ("c1", "b1"), "p12": ("c1", "b2"),
        "p21": ("c2", "b1"), "p22": ("c2", "b2"),
        "f1": ("b1", "a"), "f2": ("b2", "a"),
        "d1": ("c1", "a"), "d2": ("c2", "a"),
    })


def parallel() -> FinCategory:
    """Two objects with two parallel arrows ``u, v: X -> Y``."""
    return FinCategory.build("PARALLEL", ["X", "Y"], [("u", "X", "Y"), ("v", "X", "Y")])


def parallel_cone() -> FinCategory:
    """``t, t2: D -> C`` equalised by ``p: C -> B``; the composite is ``pt``."""
    return FinCategory.build(
        "PARALLEL-CONE", ["D", "C", "B"],
        [("t", "D", "C"), ("t2", "D", "C"), ("p", "C", "B"), ("pt", "D", "B")],
        {("p", "t"): "pt", ("p", "t2"): "pt"},
    )


def z2grp() -> FinCategory:
    """One object ``pt``; morphisms ``id_pt`` and ``s`` with ``s . s = id_pt``."""
    return FinCategory.build("Z2GRP", ["pt"], [("s", "pt", "pt")], {("s", "s"): "id_pt"})


def terminal() -> FinCategory:
    return FinCategory.build("ONE", ["pt"], [])


CATEGORY_FIXTURES = {
    "arrow": arrow,
    "arrow-ext": arrow_ext,
    "diamond": diamond,
    "diamond-ext": diamond_ext,
    "double-diamond": double_diamond,
    "parallel": parallel,
    "parallel-cone": parallel_cone,
    "z2grp": z2grp,
    "one": terminal,
}


def w_variants(C: FinCategory, family: str | None = None) -> dict[str, MorClass]:
    """Named candidate classes used throughout the tests.

    Always includes ``ids`` and ``all``; fixtures add their own classes,
    some of which deliberately fail the calculus axioms.  ``family`` picks the
    extra classes by fixture name when ``C`` is a relabelled copy, e.g. the
    1-cells of a 2-category built on that fixture.
    """
    out = {"ids": MorClass.identities(C), "all": MorClass.everything(C)}
    # a leading "-" drops the identities from the class
    extra: dict[str, dict[str, list[str]]] = {
        "ARROW": {"w-only": ["-", "w"]},
        "ARROW-EXT": {"u": ["u"], "w": ["w"]},
        "DIAMOND": {"p1": ["p1"], "f1": ["f1"], "p1p2": ["p1", "p2"], "lower": ["p1", "p2", "d"]},
        "DIAMOND-EXT": {"e": ["e", "k"], "p1": ["p1"]},
        "DOUBLE-DIAMOND": {"p11": ["p11"], "f1": ["f1"]},
        "PARALLEL": {"u": ["u"]},
        "PARALLEL-CONE": {"p": ["p"]},
        "Z2GRP": {"s-only": ["-", "s"]},
    }.get(C.name if family is None else family, {})
    for key, names in extra.items():
        if names[:1] == ["-"]:
            out[key] = MorClass.of(C, names[1:], ids=False)
        else:
            out[key] = MorClass.of(C, names)
    return out
