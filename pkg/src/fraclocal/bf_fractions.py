"""Right bicalculus of fractions on a finite strict 2-category.

1-cells of ``C[W^-1]`` are triples ``(A', w, f)``; 2-cells are classes of
quintuples ``(A3, v1, v2, alpha, beta)``.  Composition of triples uses a
fixed :class:`ChoiceTable`.  All searches are exhaustive and return the
lexicographically least witness in ordinal order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping, NamedTuple

import numpy as np

from .bicat import DEFAULT_CAPS, BicatError, FinBicategory, SizeCaps
from .cf_fractions import AxiomResult, _UnionFind
from .fincat import MorClass, SizeError, StructureError

POLICIES = ("c3", "lex", "rev")
MAX_QUINTUPLES = 200_000


class BfViolation(ValueError):
    """Raised by operations that need the bicalculus axioms when they fail."""


class EngineDefect(RuntimeError):
    """A search that the axioms guarantee to succeed came back empty."""


@dataclass(frozen=True)
class BfReport:
    bf1: AxiomResult
    bf2: AxiomResult
    bf3: AxiomResult
    bf4a: AxiomResult
    bf4b: AxiomResult
    bf4c: AxiomResult
    bf5: AxiomResult

    @property
    def bf4(self) -> AxiomResult:
        for r in (self.bf4a, self.bf4b, self.bf4c):
            if not r.ok:
                return r
        return AxiomResult(True)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.as_dict().values())

    def as_dict(self) -> dict[str, AxiomResult]:
        return {"bf1": self.bf1, "bf2": self.bf2, "bf3": self.bf3, "bf4a": self.bf4a,
                "bf4b": self.bf4b, "bf4c": self.bf4c, "bf5": self.bf5}

    def first_failure(self) -> tuple[str, AxiomResult] | None:
        for k, r in self.as_dict().items():
            if not r.ok:
                return k, r
        return None


def _check_w(C2: FinBicategory, W: MorClass) -> None:
    if W.parent is not C2:
        raise StructureError(f"class {W.name} does not belong to {C2.name}")


def _require_strict(C2: FinBicategory) -> None:
    if not C2.strict:
        raise BicatError("only strict 2-categories are supported as input")


# -- axioms ------------------------------------------------------------------------

def bf3_witnesses(C2: FinBicategory, W: MorClass, w: int, f: int) -> Iterator[tuple[int, int, int, int]]:
    """``(D, w', f', alpha)`` with ``w'`` in ``W`` and ``alpha: f w' => w f'`` invertible."""
    a, c = C2.source(w), C2.source(f)
    for d in range(C2.n_objects):
        for w2 in C2.hom(d, c):
            if w2 not in W:
                continue
            fw = C2.c1(f, w2)
            for f2 in C2.hom(d, a):
                for al in C2.isos(fw, C2.c1(w, f2)):
                    yield d, w2, f2, al


def bf4a_triples(C2: FinBicategory, W: MorClass, w: int, f1: int, f2: int,
                 alpha: int) -> list[tuple[int, int, int]]:
    """Every ``(D, v, beta)`` with ``v`` in ``W`` solving the cancellation equation for ``alpha``."""
    out = []
    c = C2.source(f1)
    for d in range(C2.n_objects):
        for v in C2.hom(d, c):
            if v not in W:
                continue
            lhs = C2.h(alpha, C2.i(v))
            f1v, f2v = C2.c1(f1, v), C2.c1(f2, v)
            th2, th1i = C2.th(w, f2, v), C2.thi(w, f1, v)
            iw = C2.i(w)
            for beta in C2.between(f1v, f2v):
                if C2.chain(th2, C2.h(iw, beta), th1i) == lhs:
                    out.append((d, v, beta))
    return out


def _bf4c_witness(C2: FinBicategory, W: MorClass, f1: int, f2: int,
                  t: tuple[int, int, int], t2: tuple[int, int, int]):
    (d, v, beta), (d2, v2, beta2) = t, t2
    if1, if2 = C2.i(f1), C2.i(f2)
    for e in range(C2.n_objects):
        for u in C2.hom(e, d):
            vu = C2.c1(v, u)
            if vu not in W:
                continue
            right_tail = C2.chain(C2.thi(f2, v, u), C2.h(beta, C2.i(u)), C2.th(f1, v, u))
            for u2 in C2.hom(e, d2):
                vu2 = C2.c1(v2, u2)
                left_head = C2.chain(C2.thi(f2, v2, u2), C2.h(beta2, C2.i(u2)), C2.th(f1, v2, u2))
                for zeta in C2.isos(vu, vu2):
                    if C2.v(left_head, C2.h(if1, zeta)) == C2.v(C2.h(if2, zeta), right_tail):
                        return e, u, u2, zeta
    return None


def check_bf_axioms(C2: FinBicategory, W: MorClass) -> BfReport:
    _check_w(C2, W)
    _require_strict(C2)
    n0 = C2.n_objects
    bf1 = AxiomResult(True)
    for a in range(n0):
        if C2.id(a) not in W:
            bf1 = AxiomResult(False, (C2.id(a),))
            break
    bf2 = AxiomResult(True)
    for v, w in product(W, W):
        h = C2._c1[v][w]
        if h >= 0 and h not in W:
            bf2 = AxiomResult(False, (v, w))
            break
    bf3 = AxiomResult(True)
    for w in W:
        for f in range(C2.n_morphisms):
            if C2.target(f) == C2.target(w) and next(bf3_witnesses(C2, W, w, f), None) is None:
                bf3 = AxiomResult(False, (w, f))
                break
        if not bf3.ok:
            break
    bf4a = bf4b = bf4c = AxiomResult(True)
    for w in W:
        b = C2.source(w)
        for c in range(n0):
            hom = C2.hom(c, b)
            for f1, f2 in product(hom, repeat=2):
                for alpha in C2.between(C2.c1(w, f1), C2.c1(w, f2)):
                    triples = bf4a_triples(C2, W, w, f1, f2, alpha)
                    if not triples:
                        if bf4a.ok:
                            bf4a = AxiomResult(False, (w, f1, f2, alpha))
                        continue
                    if bf4b.ok and C2.is_invertible(alpha):
                        for t in triples:
                            if not C2.is_invertible(t[2]):
                                bf4b = AxiomResult(False, (w, f1, f2, alpha) + t)
                                break
                    if bf4c.ok:
                        for t, t2 in product(triples, repeat=2):
                            if _bf4c_witness(C2, W, f1, f2, t, t2) is None:
                                bf4c = AxiomResult(False, (w, f1, f2, alpha) + t + t2)
                                break
    bf5 = AxiomResult(True)
    for w in W:
        for v in C2.hom(C2.source(w), C2.target(w)):
            if v not in W and C2.isos(v, w):
                bf5 = AxiomResult(False, (v, w))
                break
        if not bf5.ok:
            break
    return BfReport(bf1, bf2, bf3, bf4a, bf4b, bf4c, bf5)


def _require_bf(C2: FinBicategory, W: MorClass) -> None:
    rep = check_bf_axioms(C2, W)
    bad = rep.first_failure()
    if bad is not None:
        raise BfViolation(f"({C2.name}, {W.name}) fails {bad[0]} at {bad[1].witness}")


def right_saturation_witness(C2: FinBicategory, W: MorClass, w: int, v: int) -> tuple[int, int]:
    """Least ``(D, z)`` with ``v z`` in ``W``, given ``w`` and ``w v`` in ``W``."""
    _check_w(C2, W)
    if w not in W:
        raise BfViolation(f"{C2.morphisms[w]} is not in {W.name}")
    wv = C2.c1(w, v)
    if wv not in W:
        raise BfViolation(f"{C2.morphisms[wv]} is not in {W.name}")
    for d in range(C2.n_objects):
        for z in C2.hom(d, C2.source(v)):
            if C2.c1(v, z) in W:
                return d, z
    raise EngineDefect(f"no saturation witness for ({C2.morphisms[w]}, {C2.morphisms[v]})")


# -- choices ------------------------------------------------------------------------

class Choice(NamedTuple):
    apex: int
    v: int    # apex -> source(f), in W
    f: int    # apex -> source(v)
    rho: int  # f . v' => v . f', invertible


@dataclass(frozen=True)
class ChoiceTable:
    ambient: FinBicategory
    W: MorClass
    policy: str
    entries: Mapping[tuple[int, int], Choice]

    def __getitem__(self, key: tuple[int, int]) -> Choice:
        return self.entries[key]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries))


def eligible_pairs(C2: FinBicategory, W: MorClass) -> list[tuple[int, int]]:
    return [(f, v) for v in W for f in range(C2.n_morphisms) if C2.target(f) == C2.target(v)]


def _forced_choice(C2: FinBicategory, f: int, v: int, c3: bool) -> Choice | None:
    if C2.is_identity_1cell(f):
        b2 = C2.source(v)
        # rho = pi_v^-1 . ups_v : id v => v id
        return Choice(b2, v, C2.id(b2), C2.v(C2.inv(C2.pi(v)), C2.ups(v)))
    if C2.is_identity_1cell(v):
        a2 = C2.source(f)
        # rho = ups_f^-1 . pi_f : f id => id f
        return Choice(a2, C2.id(a2), f, C2.v(C2.inv(C2.ups(f)), C2.pi(f)))
    if c3 and f == v:
        a2 = C2.source(f)
        return Choice(a2, C2.id(a2), C2.id(a2), C2.i(C2.c1(f, C2.id(a2))))
    return None


def build_choice_table(C2: FinBicategory, W: MorClass, policy: str = "c3") -> ChoiceTable:
    """``policy``: ``c3`` enforces the diagonal rule, ``lex`` does not, ``rev`` takes
    the greatest free completion instead of the least."""
    if policy not in POLICIES:
        raise ValueError(f"unknown choice policy {policy!r}; expected one of {POLICIES}")
    _check_w(C2, W)
    _require_bf(C2, W)
    entries: dict[tuple[int, int], Choice] = {}
    for f, v in eligible_pairs(C2, W):
        ch = _forced_choice(C2, f, v, policy == "c3")
        if ch is None:
            wits = bf3_witnesses(C2, W, v, f)
            if policy == "rev":
                wit = None
                for wit in wits:
                    pass
            else:
                wit = next(wits, None)
            if wit is None:
                raise EngineDefect("a validated class lost its Ore completion")
            ch = Choice(*wit)
        entries[(f, v)] = ch
    return ChoiceTable(C2, W, policy, entries)


def choice_table_violations(table: ChoiceTable, c3: bool | None = None) -> list[tuple[str, tuple[int, int]]]:
    C2, W = table.ambient, table.W
    if c3 is None:
        c3 = table.policy == "c3"
    bad = []
    for key in eligible_pairs(C2, W):
        if key not in table.entries:
            bad.append(("missing", key))
            continue
        f, v = key
        ch = table.entries[key]
        if ch.v not in W or C2.source(ch.v) != ch.apex or C2.source(ch.f) != ch.apex:
            bad.append(("shape", key))
            continue
        if C2.target(ch.v) != C2.source(f) or C2.target(ch.f) != C2.source(v):
            bad.append(("shape", key))
            continue
        if C2.cell_source(ch.rho) != C2.c1(f, ch.v) or C2.cell_target(ch.rho) != C2.c1(v, ch.f) \
                or not C2.is_invertible(ch.rho):
            bad.append(("rho", key))
            continue
        forced = _forced_choice(C2, f, v, c3)
        if forced is not None and forced != ch:
            tag = "C1" if C2.is_identity_1cell(f) else "C2" if C2.is_identity_1cell(v) else "C3"
            bad.append((tag, key))
    return bad


# -- 1-cells and 2-cell representatives -----------------------------------------------

class TripleMor(NamedTuple):
    apex: int
    w: int
    f: int


class QuintupleRep(NamedTuple):
    source: TripleMor
    target: TripleMor
    A3: int
    v1: int
    v2: int
    alpha: int
    beta: int

    def key(self) -> tuple[int, int, int, int, int]:
        return self.A3, self.v1, self.v2, self.alpha, self.beta


@dataclass(frozen=True)
class TwoCellClass:
    source: int
    target: int
    rep: QuintupleRep
    members: tuple[QuintupleRep, ...]


def enumerate_triples(C2: FinBicategory, W: MorClass) -> list[TripleMor]:
    out = []
    for a2 in range(C2.n_objects):
        out.extend(TripleMor(a2, w, f) for w in range(C2.n_morphisms)
                   if C2.source(w) == a2 and w in W
                   for f in range(C2.n_morphisms) if C2.source(f) == a2)
    out.sort(key=lambda t: (C2.target(t.w), C2.target(t.f), t.apex, t.w, t.f))
    return out


def _triple_ends(C2: FinBicategory, t: TripleMor) -> tuple[int, int]:
    return C2.target(t.w), C2.target(t.f)


def enumerate_quintuples(C2: FinBicategory, W: MorClass, s: TripleMor,
                         t: TripleMor) -> list[QuintupleRep]:
    if _triple_ends(C2, s) != _triple_ends(C2, t):
        raise BicatError("quintuples requested between non-parallel triples")
    out = []
    for a3 in range(C2.n_objects):
        for v1 in C2.hom(a3, s.apex):
            w1v1 = C2.c1(s.w, v1)
            if w1v1 not in W:
                continue
            f1v1 = C2.c1(s.f, v1)
            for v2 in C2.hom(a3, t.apex):
                alphas = C2.isos(w1v1, C2.c1(t.w, v2))
                if not alphas:
                    continue
                betas = C2.between(f1v1, C2.c1(t.f, v2))
                for al in alphas:
                    for be in betas:
                        out.append(QuintupleRep(s, t, a3, v1, v2, al, be))
    return out


class _Ambient:
    """Cached strict-ambient lookups shared by the localization searches."""

    def __init__(self, C2: FinBicategory, W: MorClass) -> None:
        self.C = C2
        self.W = W
        self.c1 = C2._c1
        self.h = C2._hc
        self.v = C2._vc
        self.i = C2._id2
        self.inv = C2._inv
        n1 = C2.n_morphisms
        self.iso_from: list[list[tuple[int, int]]] = [[] for _ in range(n1)]
        self.iso_into: list[list[tuple[int, int]]] = [[] for _ in range(n1)]
        for (f, g), xs in C2._iso.items():
            for x in xs:
                self.iso_from[f].append((g, x))
                self.iso_into[g].append((f, x))
        self.into: list[list[int]] = [[] for _ in range(C2.n_objects)]
        for m in range(n1):
            self.into[C2.target(m)].append(m)

    def ch(self, *xs: int) -> int:
        acc = xs[-1]
        v = self.v
        for x in reversed(xs[:-1]):
            acc = v[x][acc]
        return acc

    def wl(self, f: int, x: int) -> int:
        """``i_f * x``."""
        return self.h[self.i[f]][x]

    def wr(self, x: int, f: int) -> int:
        """``x * i_f``."""
        return self.h[x][self.i[f]]


def _restrictions(amb: _Ambient, q: QuintupleRep) -> set[tuple]:
    """Keys ``(A4, x1, x2, alpha', beta')`` reachable by an equivalence witness from ``q``."""
    s, t = q.source, q.target
    c1, W = amb.c1, amb.W
    out = set()
    for z in amb.into[q.A3]:
        v1z, v2z = c1[q.v1][z], c1[q.v2][z]
        if c1[s.w][v1z] not in W:
            continue
        a4 = amb.C.source(z)
        az, bz = amb.wr(q.alpha, z), amb.wr(q.beta, z)
        for x1, s1 in amb.iso_into[v1z]:
            a_tail = amb.v[az][amb.wl(s.w, s1)]
            b_tail = amb.v[bz][amb.wl(s.f, s1)]
            for x2, s2 in amb.iso_from[v2z]:
                out.add((a4, x1, x2, amb.v[amb.wl(t.w, s2)][a_tail], amb.v[amb.wl(t.f, s2)][b_tail]))
    return out


def _plain_restrictions(amb: _Ambient, q: QuintupleRep) -> set[tuple]:
    c1 = amb.c1
    return {(amb.C.source(z), c1[q.v1][z], c1[q.v2][z], amb.wr(q.alpha, z), amb.wr(q.beta, z))
            for z in amb.into[q.A3]}


def two_cells_equivalent(C2: FinBicategory, W: MorClass, r1: QuintupleRep, r2: QuintupleRep) -> bool:
    """Whether some ``(A4, z, z', sigma1, sigma2)`` relates ``r1`` to ``r2``."""
    _check_w(C2, W)
    _require_strict(C2)
    if (r1.source, r1.target) != (r2.source, r2.target):
        raise BicatError("representatives join different pairs of triples")
    amb = _Ambient(C2, W)
    return not _restrictions(amb, r1).isdisjoint(_plain_restrictions(amb, r2))


def equivalence_witness(C2: FinBicategory, W: MorClass, r1: QuintupleRep, r2: QuintupleRep):
    """Least ``(A4, z, z', sigma1, sigma2)`` relating ``r1`` to ``r2``, or ``None``."""
    _require_strict(C2)
    if (r1.source, r1.target) != (r2.source, r2.target):
        raise BicatError("representatives join different pairs of triples")
    s, t = r1.source, r1.target
    amb = _Ambient(C2, W)
    c1 = amb.c1
    for a4 in range(C2.n_objects):
        for z in C2.hom(a4, r1.A3):
            v1z, v2z = c1[r1.v1][z], c1[r1.v2][z]
            if c1[s.w][v1z] not in W:
                continue
            az, bz = amb.wr(r1.alpha, z), amb.wr(r1.beta, z)
            for z2 in C2.hom(a4, r2.A3):
                a2z, b2z = amb.wr(r2.alpha, z2), amb.wr(r2.beta, z2)
                for s1 in C2.isos(c1[r2.v1][z2], v1z):
                    for s2 in C2.isos(v2z, c1[r2.v2][z2]):
                        if amb.ch(amb.wl(t.w, s2), az, amb.wl(s.w, s1)) == a2z and \
                                amb.ch(amb.wl(t.f, s2), bz, amb.wl(s.f, s1)) == b2z:
                            return a4, z, z2, s1, s2
    return None


# -- the localized bicategory ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalizedBicategory:
    ambient: FinBicategory
    W: MorClass
    choices: ChoiceTable
    bicat: FinBicategory
    triples: tuple[TripleMor, ...]
    classes: tuple[TwoCellClass, ...]
    triple_index: Mapping[TripleMor, int] = field(repr=False)
    quintuple_class: Mapping[QuintupleRep, int] = field(repr=False)
    engine: "_Localizer" = field(repr=False)

    def one_cell(self, t: TripleMor | tuple[int, int, int]) -> int:
        return self.triple_index[TripleMor(*t)]

    def classify(self, q: QuintupleRep) -> int:
        try:
            return self.quintuple_class[q]
        except KeyError:
            raise BicatError(f"{q} is not a valid quintuple of the localization") from None

    def quintuple(self, s, t, A3: int, v1: int, v2: int, alpha: int, beta: int) -> QuintupleRep:
        return QuintupleRep(TripleMor(*s), TripleMor(*t), A3, v1, v2, alpha, beta)

    def class_of(self, s, t, A3: int, v1: int, v2: int, alpha: int, beta: int) -> int:
        return self.classify(self.quintuple(s, t, A3, v1, v2, alpha, beta))

    def describe_triple(self, t: TripleMor) -> str:
        C = self.ambient
        return f"({C.objects[t.apex]},{C.morphisms[t.w]},{C.morphisms[t.f]})"

    def describe_class(self, k: int) -> str:
        C = self.ambient
        r = self.classes[k].rep
        return (f"[{C.objects[r.A3]},{C.morphisms[r.v1]},{C.morphisms[r.v2]},"
                f"{C.cells[r.alpha]},{C.cells[r.beta]}]: "
                f"{self.describe_triple(r.source)} => {self.describe_triple(r.target)}")


class _Localizer:
    def __init__(self, C2: FinBicategory, W: MorClass, choices: ChoiceTable) -> None:
        self.amb = _Ambient(C2, W)
        self.C = C2
        self.W = W
        self.choices = choices

    # 1-cells
    def compose(self, g: TripleMor, f: TripleMor) -> TripleMor:
        ch = self.choices[(f.f, g.w)]
        c1 = self.amb.c1
        return TripleMor(ch.apex, c1[f.w][ch.v], c1[g.f][ch.f])

    # 2-cells on representatives
    def iter_vertical(self, q2: QuintupleRep, q1: QuintupleRep) -> Iterator[QuintupleRep]:
        """``q2 . q1``; ``q1`` acts first."""
        C, a = self.C, self.amb
        c1 = a.c1
        s, m, t = q1.source, q1.target, q2.target
        for e in range(C.n_objects):
            for z in C.hom(e, q1.A3):
                v1z = c1[q1.v1][z]
                if c1[s.w][v1z] not in self.W:
                    continue
                v2z = c1[q1.v2][z]
                for z2 in C.hom(e, q2.A3):
                    for sg in C.isos(v2z, c1[q2.v1][z2]):
                        al = a.ch(a.wr(q2.alpha, z2), a.wl(m.w, sg), a.wr(q1.alpha, z))
                        be = a.ch(a.wr(q2.beta, z2), a.wl(m.f, sg), a.wr(q1.beta, z))
                        yield QuintupleRep(s, t, e, v1z, c1[q2.v2][z2], al, be)

    def iter_post_whisker(self, h: TripleMor, q: QuintupleRep) -> Iterator[QuintupleRep]:
        """``i_h * q``."""
        C, a = self.C, self.amb
        c1 = a.c1
        s, t = q.source, q.target
        ch1, ch2 = self.choices[(s.f, h.w)], self.choices[(t.f, h.w)]
        s2, t2 = self.compose(h, s), self.compose(h, t)
        for e in range(C.n_objects):
            for y in C.hom(e, q.A3):
                v1y, v2y = c1[q.v1][y], c1[q.v2][y]
                by = a.wr(q.beta, y)
                ay = a.wr(q.alpha, y)
                for z1 in C.hom(e, ch1.apex):
                    vz1 = c1[ch1.v][z1]
                    if c1[s.w][vz1] not in self.W:
                        continue
                    taus1 = C.isos(vz1, v1y)
                    if not taus1:
                        continue
                    fz1 = c1[ch1.f][z1]
                    for z2 in C.hom(e, ch2.apex):
                        vz2 = c1[ch2.v][z2]
                        taus2 = C.isos(vz2, v2y)
                        if not taus2:
                            continue
                        fz2 = c1[ch2.f][z2]
                        eps_cands = C.between(fz1, fz2)
                        if not eps_cands:
                            continue
                        for ta1, ta2 in product(taus1, taus2):
                            x = a.ch(a.wr(ch2.rho, z2), a.wl(t.f, a.inv[ta2]), by,
                                     a.wl(s.f, ta1), a.wr(a.inv[ch1.rho], z1))
                            for eps in eps_cands:
                                if a.wl(h.w, eps) == x:
                                    al = a.ch(a.wl(t.w, a.inv[ta2]), ay, a.wl(s.w, ta1))
                                    yield QuintupleRep(s2, t2, e, z1, z2, al, a.wl(h.f, eps))

    def iter_pre_whisker(self, q: QuintupleRep, k: TripleMor) -> Iterator[QuintupleRep]:
        """``q * i_k``."""
        C, a = self.C, self.amb
        c1 = a.c1
        s, t = q.source, q.target
        ch1, ch2 = self.choices[(k.f, s.w)], self.choices[(k.f, t.w)]
        s2, t2 = self.compose(s, k), self.compose(t, k)
        for e in range(C.n_objects):
            for y in C.hom(e, q.A3):
                v1y, v2y = c1[q.v1][y], c1[q.v2][y]
                ay, by = a.wr(q.alpha, y), a.wr(q.beta, y)
                for z1 in C.hom(e, ch1.apex):
                    if c1[k.w][c1[ch1.v][z1]] not in self.W:
                        continue
                    taus1 = C.isos(c1[ch1.f][z1], v1y)
                    if not taus1:
                        continue
                    wz1 = c1[ch1.v][z1]
                    for z2 in C.hom(e, ch2.apex):
                        taus2 = C.isos(c1[ch2.f][z2], v2y)
                        if not taus2:
                            continue
                        sig_cands = C.isos(wz1, c1[ch2.v][z2])
                        if not sig_cands:
                            continue
                        for ta1, ta2 in product(taus1, taus2):
                            x = a.ch(a.wr(a.inv[ch2.rho], z2), a.wl(t.w, a.inv[ta2]), ay,
                                     a.wl(s.w, ta1), a.wr(ch1.rho, z1))
                            for sg in sig_cands:
                                if a.wl(k.f, sg) == x:
                                    be = a.ch(a.wl(t.f, a.inv[ta2]), by, a.wl(s.f, ta1))
                                    yield QuintupleRep(s2, t2, e, z1, z2, a.wl(k.w, sg), be)

    def iter_associator(self, h: TripleMor, g: TripleMor, f: TripleMor) -> Iterator[QuintupleRep]:
        """Representative of ``h(gf) => (hg)f``."""
        C, a = self.C, self.amb
        c1 = a.c1
        ch = self.choices
        r1 = ch[(f.f, g.w)]                       # f v' => v f'
        gf = self.compose(g, f)
        r2 = ch[(gf.f, h.w)]                      # (g f') u' => u f''
        r3 = ch[(g.f, h.w)]                       # g u'' => u g'
        hg = self.compose(h, g)
        r4 = ch[(f.f, hg.w)]                      # f t => (v u'') f'''
        left, right = self.compose(h, gf), self.compose(hg, f)
        vu = c1[r1.v][r2.v]                       # v' u'
        fu = c1[r1.f][r2.v]                       # f' u'
        for e in range(C.n_objects):
            for z in C.hom(e, r2.apex):
                if c1[left.w][z] not in self.W:
                    continue
                vuz, fuz, f2z = c1[vu][z], c1[fu][z], c1[r2.f][z]
                e1 = a.wr(r1.rho, c1[r2.v][z])
                e2 = a.wr(r2.rho, z)
                for z2 in C.hom(e, r4.apex):
                    sAs = C.isos(vuz, c1[r4.v][z2])
                    if not sAs:
                        continue
                    ffz2 = c1[r4.f][z2]
                    sBs = C.isos(fuz, c1[r3.v][ffz2])
                    if not sBs:
                        continue
                    sCs = C.isos(f2z, c1[r3.f][ffz2])
                    if not sCs:
                        continue
                    rho4 = a.wr(r4.rho, z2)
                    rho3 = a.wr(r3.rho, ffz2)
                    for sA in sAs:
                        lhs1 = a.v[rho4][a.wl(f.f, sA)]
                        for sB in sBs:
                            if lhs1 != a.v[a.wl(g.w, sB)][e1]:
                                continue
                            lhs2 = a.v[rho3][a.wl(g.f, sB)]
                            for sC in sCs:
                                if lhs2 == a.v[a.wl(h.w, sC)][e2]:
                                    yield QuintupleRep(left, right, e, z, z2,
                                                        a.wl(f.w, sA), a.wl(h.f, sC))


    def vertical(self, q2: QuintupleRep, q1: QuintupleRep) -> QuintupleRep:
        return _first(self.iter_vertical(q2, q1), "vertical composition")

    def post_whisker(self, h: TripleMor, q: QuintupleRep) -> QuintupleRep:
        return _first(self.iter_post_whisker(h, q), "post-whiskering")

    def pre_whisker(self, q: QuintupleRep, k: TripleMor) -> QuintupleRep:
        return _first(self.iter_pre_whisker(q, k), "pre-whiskering")

    def associator(self, h: TripleMor, g: TripleMor, f: TripleMor) -> QuintupleRep:
        return _first(self.iter_associator(h, g, f), "associator")


def _first(it: Iterator[QuintupleRep], what: str) -> QuintupleRep:
    q = next(it, None)
    if q is None:
        raise EngineDefect(f"no {what} witness")
    return q


def _name_triple(C2: FinBicategory, t: TripleMor) -> str:
    return f"({C2.objects[t.apex]},{C2.morphisms[t.w]},{C2.morphisms[t.f]})"


def localize_bicategory(C2: FinBicategory, W: MorClass, choices: ChoiceTable | None = None,
                        caps: SizeCaps = DEFAULT_CAPS,
                        max_quintuples: int = MAX_QUINTUPLES) -> LocalizedBicategory:
    """The bicategory of fractions ``C2[W^-1]`` with provenance maps."""
    _check_w(C2, W)
    _require_strict(C2)
    if choices is None:
        choices = build_choice_table(C2, W)
    else:
        if choices.ambient is not C2 or choices.W.members != W.members:
            raise ValueError("choice table was built for a different pair")
        bad = choice_table_violations(choices)
        if bad:
            raise ValueError(f"invalid choice table: {bad[0]}")
    triples = enumerate_triples(C2, W)
    n1 = len(triples)
    if n1 > caps.one_cells:
        raise SizeError(f"{n1} triples exceed the 1-cell cap of {caps.one_cells}")
    if C2.n_objects > caps.objects:
        raise SizeError(f"{C2.n_objects} objects exceed the cap of {caps.objects}")
    tindex = {t: i for i, t in enumerate(triples)}
    amb = _Ambient(C2, W)
    L = _Localizer(C2, W, choices)

    # 2-cell classes per hom pair
    classes: list[TwoCellClass] = []
    qclass: dict[QuintupleRep, int] = {}
    total = 0
    pairs = [(i, j) for i in range(n1) for j in range(n1)
             if _triple_ends(C2, triples[i]) == _triple_ends(C2, triples[j])]
    for i, j in pairs:
        quins = enumerate_quintuples(C2, W, triples[i], triples[j])
        total += len(quins)
        if total > max_quintuples:
            raise SizeError(f"more than {max_quintuples} quintuples")
        if not quins:
            continue
        uf = _UnionFind(len(quins))
        index: dict[tuple, list[int]] = {}
        for k, q in enumerate(quins):
            for key in _plain_restrictions(amb, q):
                index.setdefault(key, []).append(k)
        for k, q in enumerate(quins):
            for key in _restrictions(amb, q):
                for k2 in index.get(key, ()):
                    uf.union(k, k2)
        groups: dict[int, list[QuintupleRep]] = {}
        for k, q in enumerate(quins):
            groups.setdefault(uf.find(k), []).append(q)
        for members in sorted(groups.values(), key=lambda ms: min(m.key() for m in ms)):
            members.sort(key=QuintupleRep.key)
            cid = len(classes)
            classes.append(TwoCellClass(i, j, members[0], tuple(members)))
            for q in members:
                qclass[q] = cid
    n2 = len(classes)
    if n2 > caps.two_cells:
        raise SizeError(f"{n2} 2-cell classes exceed the cap of {caps.two_cells}")

    def cls(q: QuintupleRep) -> int:
        try:
            return qclass[q]
        except KeyError:
            raise EngineDefect(f"constructed quintuple {q} is not enumerated") from None

    c1i = [[-1] * n1 for _ in range(n1)]
    for gi, fi in product(range(n1), repeat=2):
        g, f = triples[gi], triples[fi]
        if C2.target(f.f) == C2.target(g.w):
            c1i[gi][fi] = tindex[L.compose(g, f)]
    id1 = [tindex[TripleMor(a, C2.id(a), C2.id(a))] for a in range(C2.n_objects)]
    id2 = [cls(QuintupleRep(t, t, t.apex, C2.id(t.apex), C2.id(t.apex), C2.i(t.w), C2.i(t.f)))
           for t in triples]
    cs = [c.source for c in classes]
    ct = [c.target for c in classes]
    V = np.full((n2, n2), -1, dtype=np.int64)
    for b in range(n2):
        for a_ in range(n2):
            if cs[b] == ct[a_]:
                V[b, a_] = cls(L.vertical(classes[b].rep, classes[a_].rep))
    post: dict[tuple[int, int], int] = {}
    pre: dict[tuple[int, int], int] = {}
    src1 = [C2.target(t.w) for t in triples]
    tgt1 = [C2.target(t.f) for t in triples]
    for x in range(n2):
        rep = classes[x].rep
        a_, b_ = src1[cs[x]], tgt1[cs[x]]
        for hi in range(n1):
            if src1[hi] == b_:
                post[(hi, x)] = cls(L.post_whisker(triples[hi], rep))
            if tgt1[hi] == a_:
                pre[(x, hi)] = cls(L.pre_whisker(rep, triples[hi]))
    H = np.full((n2, n2), -1, dtype=np.int64)
    for b in range(n2):
        for a_ in range(n2):
            if src1[cs[b]] == tgt1[cs[a_]]:
                # b * a = (b * i_{f'}) . (i_g * a)
                H[b, a_] = V[pre[(b, ct[a_])], post[(cs[b], a_)]]
    assoc = np.full((n1, n1, n1), -1, dtype=np.int64)
    for hi, gi, fi in product(range(n1), repeat=3):
        if src1[hi] == tgt1[gi] and src1[gi] == tgt1[fi]:
            assoc[hi, gi, fi] = cls(L.associator(triples[hi], triples[gi], triples[fi]))
    id2a = np.asarray(id2, dtype=np.int64)
    big = SizeCaps(max(caps.objects, C2.n_objects), max(caps.one_cells, n1), max(caps.two_cells, n2))
    B = FinBicategory(
        f"{C2.name}[{W.name}^-1]", C2.objects, tuple(_name_triple(C2, t) for t in triples),
        np.asarray(src1), np.asarray(tgt1), np.asarray(id1), np.asarray(c1i),
        tuple(f"G{k}" for k in range(n2)), np.asarray(cs), np.asarray(ct), id2a, V, H, assoc,
        id2a.copy(), id2a.copy(), strict=False, caps=big)
    return LocalizedBicategory(C2, W, choices, B, tuple(triples), tuple(classes), tindex, qclass, L)
