"""Right calculus of fractions on a finite category.

A morphism ``A -> B`` of ``C[W^-1]`` is the class of a span ``(A', w, f)``
with ``w: A' -> A`` in ``W`` and ``f: A' -> B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fincat import (
    FinCategory, MorClass, MorId, ObjId, StructureError, cones, is_pullback_cone,
)


class CfViolation(ValueError):
    """Raised by operations that need the calculus axioms when they fail."""


class Span(NamedTuple):
    apex: ObjId
    w: MorId
    f: MorId


class AxiomResult(NamedTuple):
    ok: bool
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class CfReport:
    cf1: AxiomResult
    cf2: AxiomResult
    cf3: AxiomResult
    cf4: AxiomResult

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.as_dict().values())

    def as_dict(self) -> dict[str, AxiomResult]:
        return {"cf1": self.cf1, "cf2": self.cf2, "cf3": self.cf3, "cf4": self.cf4}

    def first_failure(self) -> tuple[str, AxiomResult] | None:
        for k, r in self.as_dict().items():
            if not r.ok:
                return k, r
        return None


def _check_parent(C: FinCategory, W: MorClass) -> None:
    if W.parent is not C:
        raise ValueError(f"class {W.name} does not belong to {C.name}")


def ore_completions(C: FinCategory, W: MorClass, w: MorId, f: MorId):
    """All ``(D, w2, f2)`` with ``w2`` in ``W`` and ``f . w2 = w . f2``, least first."""
    a, c = C.source(w), C.source(f)
    out = []
    for d in range(C.n_objects):
        for w2 in C.hom(d, c):
            if w2 not in W:
                continue
            target = C.c(f, w2)
            for f2 in C.hom(d, a):
                if C.c(w, f2) == target:
                    out.append((d, w2, f2))
    return out


def ore_witness(C: FinCategory, W: MorClass, w: MorId, f: MorId):
    a, c = C.source(w), C.source(f)
    for d in range(C.n_objects):
        for w2 in C.hom(d, c):
            if w2 not in W:
                continue
            target = C.c(f, w2)
            for f2 in C.hom(d, a):
                if C.c(w, f2) == target:
                    return d, w2, f2
    return None


def _cf4_witness(C: FinCategory, W: MorClass, f1: MorId, f2: MorId):
    a = C.source(f1)
    for d in range(C.n_objects):
        for v in C.hom(d, a):
            if v in W and C.c(f1, v) == C.c(f2, v):
                return v
    return None


def check_cf_axioms(C: FinCategory, W: MorClass) -> CfReport:
    _check_parent(C, W)
    cf1 = AxiomResult(True)
    for a in range(C.n_objects):
        if C.id(a) not in W:
            cf1 = AxiomResult(False, (C.id(a),))
            break
    cf2 = AxiomResult(True)
    for v in W:
        for w in W:
            h = C.c(v, w)
            if h >= 0 and h not in W:
                cf2 = AxiomResult(False, (v, w))
                break
        if not cf2.ok:
            break
    cf3 = AxiomResult(True)
    for w in W:
        for f in _into(C, C.target(w)):
            if ore_witness(C, W, w, f) is None:
                cf3 = AxiomResult(False, (w, f))
                break
        if not cf3.ok:
            break
    cf4 = AxiomResult(True)
    for w in W:
        a = C.source(w)
        for x in range(C.n_objects):
            hom = C.hom(x, a)
            for f1 in hom:
                for f2 in hom:
                    if C.c(w, f1) == C.c(w, f2) and _cf4_witness(C, W, f1, f2) is None:
                        cf4 = AxiomResult(False, (w, f1, f2))
                        break
                if not cf4.ok:
                    break
            if not cf4.ok:
                break
        if not cf4.ok:
            break
    return CfReport(cf1, cf2, cf3, cf4)


def _into(C: FinCategory, b: ObjId) -> list[MorId]:
    return [m for m in range(C.n_morphisms) if C.target(m) == b]


def _require_cf(C: FinCategory, W: MorClass) -> None:
    rep = check_cf_axioms(C, W)
    bad = rep.first_failure()
    if bad is not None:
        name, res = bad
        wit = ", ".join(C.morphisms[m] for m in res.witness)
        raise CfViolation(f"{name} fails for {W.name} in {C.name} at ({wit})")


def enumerate_spans(C: FinCategory, W: MorClass, A: ObjId | str, B: ObjId | str,
                    _checked: bool = False) -> list[Span]:
    _check_parent(C, W)
    if not _checked:
        _require_cf(C, W)
    A, B = C.obj(A), C.obj(B)
    out = []
    for x in range(C.n_objects):
        for w in C.hom(x, A):
            if w in W:
                for f in C.hom(x, B):
                    out.append(Span(x, w, f))
    return out


def span_witness(C: FinCategory, W: MorClass, s1: Span, s2: Span):
    """Least ``(A3, v1, v2)`` identifying the two spans, or ``None``."""
    a1, w1, f1 = s1
    a2, w2, f2 = s2
    for x in range(C.n_objects):
        for v1 in C.hom(x, a1):
            wv = C.c(w1, v1)
            if wv not in W:
                continue
            fv = C.c(f1, v1)
            for v2 in C.hom(x, a2):
                if C.c(w2, v2) == wv and C.c(f2, v2) == fv:
                    return x, v1, v2
    return None


def spans_equivalent(C: FinCategory, W: MorClass, s1: Span, s2: Span) -> bool:
    s1, s2 = Span(*s1), Span(*s2)
    if C.target(s1.w) != C.target(s2.w) or C.target(s1.f) != C.target(s2.f):
        raise ValueError("spans have different endpoints")
    return span_witness(C, W, s1, s2) is not None


def compose_spans(C: FinCategory, W: MorClass, t: Span, s: Span) -> Span:
    """``t . s`` for spans ``s: A -> B`` and ``t: B -> C`` via the least Ore square."""
    a1, w, f = s
    b1, v, g = t
    if C.target(f) != C.target(v):
        raise ValueError("spans are not composable")
    wit = ore_witness(C, W, v, f)
    if wit is None:
        raise CfViolation(f"no Ore completion for ({C.morphisms[v]}, {C.morphisms[f]})")
    d, w2, f2 = wit
    return Span(d, C.c(w, w2), C.c(g, f2))


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def span_classes(C: FinCategory, W: MorClass, A: ObjId, B: ObjId,
                 _checked: bool = False) -> tuple[list[list[Span]], int]:
    """Classes of spans ``A -> B`` and the number of pairs added by transitive closure."""
    spans = enumerate_spans(C, W, A, B, _checked=_checked)
    n = len(spans)
    rel = [[False] * n for _ in range(n)]
    uf = _UnionFind(n)
    for i in range(n):
        rel[i][i] = True
        for j in range(n):
            if i != j and span_witness(C, W, spans[i], spans[j]) is not None:
                rel[i][j] = True
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    closure_extra = 0
    for members in groups.values():
        for i in members:
            for j in members:
                if not rel[i][j]:
                    closure_extra += 1
    classes = sorted(([spans[i] for i in m] for m in groups.values()), key=lambda c: c[0])
    return classes, closure_extra


@dataclass(frozen=True, eq=False)
class FractionCategory:
    source: FinCategory
    W: MorClass
    base: FinCategory
    class_of: dict[MorId, frozenset[Span]]
    rep: dict[MorId, Span]
    span_class: dict[Span, MorId]
    closure_extra: int = 0

    def obj_embed(self, a: ObjId) -> ObjId:
        return a

    def embed(self, f: MorId) -> MorId:
        """Class of ``(src f, id, f)``."""
        C = self.source
        return self.span_class[Span(C.source(f), C.id(C.source(f)), f)]

    def inverse(self, w: MorId) -> MorId:
        """Class of ``(src w, w, id)``, the inverse of ``embed(w)``."""
        C = self.source
        return self.span_class[Span(C.source(w), w, C.id(C.source(w)))]

    def classify(self, s: Span) -> MorId:
        return self.span_class[Span(*s)]

    def fraction(self, apex, w, f) -> MorId:
        C = self.source
        return self.classify(Span(C.obj(apex), C.mor(w), C.mor(f)))


def _span_name(C: FinCategory, s: Span) -> str:
    return f"[{C.objects[s.apex]},{C.morphisms[s.w]},{C.morphisms[s.f]}]"


def localize(C: FinCategory, W: MorClass, max_objects: int | None = None) -> FractionCategory:
    _check_parent(C, W)
    _require_cf(C, W)
    n = C.n_objects
    per_hom: dict[tuple[int, int], list[list[Span]]] = {}
    extra = 0
    for a in range(n):
        for b in range(n):
            per_hom[(a, b)], e = span_classes(C, W, a, b, _checked=True)
            extra += e
    # identities first, then classes ordered by (source, target, least span)
    id_cls = {}
    order: list[tuple[int, int, list[Span]]] = []
    for a in range(n):
        ident = Span(a, C.id(a), C.id(a))
        for cls in per_hom[(a, a)]:
            if ident in cls:
                id_cls[a] = cls
        order.append((a, a, id_cls[a]))
    for (a, b), classes in sorted(per_hom.items()):
        for cls in classes:
            if a == b and cls is id_cls[a]:
                continue
            order.append((a, b, cls))
    span_class: dict[Span, int] = {}
    class_of: dict[int, frozenset[Span]] = {}
    rep: dict[int, Span] = {}
    src, tgt, names = [], [], []
    for m, (a, b, cls) in enumerate(order):
        for s in cls:
            span_class[s] = m
        class_of[m] = frozenset(cls)
        rep[m] = cls[0]
        src.append(a)
        tgt.append(b)
        names.append(f"id_{C.objects[a]}" if m < n else _span_name(C, cls[0]))
    nm = len(order)
    comp = np.full((nm, nm), -1, dtype=np.int64)
    for g in range(nm):
        for f in range(nm):
            if src[g] == tgt[f]:
                comp[g, f] = span_class[compose_spans(C, W, rep[g], rep[f])]
    kwargs = {} if max_objects is None else {"max_objects": max_objects}
    base = FinCategory(f"{C.name}[{W.name}^-1]", C.objects, tuple(names), np.array(src),
                       np.array(tgt), np.arange(n), comp, **kwargs)
    return FractionCategory(C, W, base, class_of, rep, span_class, extra)


# -- fiber products in C[W^-1] ------------------------------------------------

def _check_cand(C: FinCategory, f1: MorId, f2: MorId, cand) -> tuple[int, int, int]:
    cc, p1, p2 = C.obj(cand[0]), C.mor(cand[1]), C.mor(cand[2])
    if C.target(f1) != C.target(f2):
        raise ValueError("cospan targets differ")
    if C.source(p1) != cc or C.source(p2) != cc or C.target(p1) != C.source(f1) \
            or C.target(p2) != C.source(f2):
        raise ValueError("candidate legs do not match the cospan")
    if C.c(f1, p1) != C.c(f2, p2):
        raise ValueError("candidate square does not commute")
    return cc, p1, p2


def factorizations(C: FinCategory, W: MorClass, cand, q1: MorId, q2: MorId):
    """All ``(E, v, q)`` with ``v`` in ``W`` and ``q^m v = p^m q``."""
    cc, p1, p2 = cand
    d = C.source(q1)
    out = []
    for e in range(C.n_objects):
        for v in C.hom(e, d):
            if v not in W:
                continue
            a1, a2 = C.c(q1, v), C.c(q2, v)
            for q in C.hom(e, cc):
                if C.c(p1, q) == a1 and C.c(p2, q) == a2:
                    out.append((e, v, q))
    return out


def condition_d_failure(C, W, f1, f2, cand):
    """First cone with no factorization through ``cand``, or ``None``."""
    f1, f2 = C.mor(f1), C.mor(f2)
    cand = _check_cand(C, f1, f2, cand)
    for cone in cones(C, f1, f2):
        if not factorizations(C, W, cand, cone.p1, cone.p2):
            return cone
    return None


def check_condition_d(C: FinCategory, W: MorClass, f1, f2, cand) -> bool:
    return condition_d_failure(C, W, f1, f2, cand) is None


def _joinable(C, W, x, y) -> bool:
    e, v, q = x
    et, vt, qt = y
    for f in range(C.n_objects):
        for u in C.hom(f, e):
            if u not in W:
                continue
            vu, qu = C.c(v, u), C.c(q, u)
            for ut in C.hom(f, et):
                if C.c(vt, ut) == vu and C.c(qt, ut) == qu:
                    return True
    return False


def condition_e_failure(C, W, f1, f2, cand):
    f1, f2 = C.mor(f1), C.mor(f2)
    cand = _check_cand(C, f1, f2, cand)
    for cone in cones(C, f1, f2):
        facts = factorizations(C, W, cand, cone.p1, cone.p2)
        for x in facts:
            for y in facts:
                if not _joinable(C, W, x, y):
                    return cone, x, y
    return None


def check_condition_e(C: FinCategory, W: MorClass, f1, f2, cand) -> bool:
    return condition_e_failure(C, W, f1, f2, cand) is None


def is_strong_fraction_pullback(C: FinCategory, W: MorClass, f1, f2, cand) -> bool:
    return check_condition_d(C, W, f1, f2, cand) and check_condition_e(C, W, f1, f2, cand)


def localized_cone_is_pullback(L: FractionCategory, f1: MorId, f2: MorId, cand) -> bool:
    """Direct test in ``L.base`` that the embedded square is a pullback."""
    cc, p1, p2 = cand
    return is_pullback_cone(L.base, L.embed(f1), L.embed(f2), cc, L.embed(p1), L.embed(p2))


__all__ = [
    "AxiomResult", "CfReport", "CfViolation", "FractionCategory", "Span",
    "check_cf_axioms", "check_condition_d", "check_condition_e", "compose_spans",
    "enumerate_spans", "factorizations", "is_strong_fraction_pullback", "localize",
    "localized_cone_is_pullback", "ore_witness", "span_classes", "span_witness",
    "spans_equivalent", "StructureError",
]
