"""Turn a parsed :class:`Document` into categories, 2-categories and classes."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bicat import FinBicategory, trivial_2category, validate_bicategory
from ..fincat import MAX_OBJECTS, FinCategory, MorClass, StructureError, validate_category
from .syntax import (
    BicategoryDecl, CategoryDecl, CellDecl, ClassDecl, Document, Equation, MorDecl, Name, ParseError,
    QueryDecl, Span,
)


class ResolveError(ParseError):
    """A well-formed document that does not describe valid structures."""


def _err(msg: str, at: Name | Span) -> ResolveError:
    sp = at.span if isinstance(at, Name) else at
    return ResolveError(msg, sp.line, sp.column)


@dataclass
class Environment:
    categories: dict[str, FinCategory] = field(default_factory=dict)
    bicategories: dict[str, FinBicategory] = field(default_factory=dict)
    classes: dict[str, MorClass] = field(default_factory=dict)
    class_owner: dict[str, str] = field(default_factory=dict)
    queries: list[QueryDecl] = field(default_factory=list)

    def category(self, name: str) -> FinCategory:
        if name in self.categories:
            return self.categories[name]
        if name in self.bicategories:
            B = self.bicategories[name]
            if B.n_cells == B.n_morphisms:
                return B.underlying_category()
            raise KeyError(f"{name} is a 2-category with non-identity 2-cells, not a category")
        raise KeyError(f"no category named {name!r}")

    def bicategory(self, name: str) -> FinBicategory:
        """A declared 2-category, or a declared category viewed as a trivial one."""
        if name in self.bicategories:
            return self.bicategories[name]
        if name in self.categories:
            return trivial_2category(self.categories[name])
        raise KeyError(f"no 2-category named {name!r}")

    def klass(self, name: str, owner: str, ambient) -> MorClass:
        """Class ``name`` declared over ``owner``, re-homed on ``ambient``."""
        if name not in self.classes:
            raise KeyError(f"no class named {name!r}")
        if self.class_owner[name] != owner:
            raise KeyError(f"class {name} is declared over {self.class_owner[name]}, not {owner}")
        return MorClass(ambient, self.classes[name].members, name)


def _one_category(d, max_objects: int) -> FinCategory:
    objects = [o.value for o in d.objects]
    seen: dict[str, Name] = {}
    for o in d.objects:
        if o.value in seen:
            raise _err(f"duplicate object {o.value}", o)
        seen[o.value] = o
    ends: dict[str, tuple[str, str]] = {f"id_{o}": (o, o) for o in objects}
    for m in d.mors:
        for x in (m.source, m.target):
            if x.value not in seen:
                raise _err(f"unknown object {x.value}", x)
        if m.name.value in ends:
            raise _err(f"duplicate morphism {m.name.value}", m.name)
        ends[m.name.value] = (m.source.value, m.target.value)
    lets: dict[tuple[str, str], str] = {}
    for e in d.lets:
        for x in (e.left, e.right, e.result):
            if x.value not in ends:
                raise _err(f"unknown morphism {x.value}", x)
        (fs, ft), (gs, gt), (hs, ht) = ends[e.right.value], ends[e.left.value], ends[e.result.value]
        if ft != gs:
            raise _err(f"{e.left.value} . {e.right.value} is not composable", e.left)
        if (hs, ht) != (fs, gt):
            raise _err(f"{e.result.value} does not run {fs} -> {gt}", e.result)
        key = (e.left.value, e.right.value)
        if key in lets:
            raise _err(f"composite {key[0]} . {key[1]} given twice", e.left)
        lets[key] = e.result.value
    if len(objects) > max_objects:
        raise _err(f"{len(objects)} objects exceed the limit of {max_objects}", d.span)
    try:
        C = FinCategory.build(d.name.value, objects, [(m.name.value, m.source.value, m.target.value)
                                                      for m in d.mors], lets, max_objects=max_objects)
    except StructureError as exc:
        raise _err(str(exc), d.name) from None
    rep = validate_category(C)
    if not rep.ok:
        tag, wit = rep.violations[0]
        raise _err(f"{tag} law fails at {', '.join(C.morphisms[x] for x in wit)}", d.name)
    return C


def _one_bicategory(d: BicategoryDecl, max_objects: int) -> FinBicategory:
    C = _one_category(d, max_objects)
    known = {f"i_{m}" for m in C.morphisms}
    for c in d.cells:
        for x in (c.source, c.target):
            if x.value not in C.morphisms:
                raise _err(f"unknown 1-cell {x.value}", x)
        if c.name.value in known:
            raise _err(f"duplicate 2-cell {c.name.value}", c.name)
        known.add(c.name.value)
    for eqs in (d.vcomps, d.hcomps):
        for e in eqs:
            for x in (e.left, e.right, e.result):
                if x.value not in known:
                    raise _err(f"unknown 2-cell {x.value}", x)
    try:
        B = FinBicategory.build_strict(
            d.name.value, C, [(c.name.value, c.source.value, c.target.value) for c in d.cells],
            {(e.left.value, e.right.value): e.result.value for e in d.vcomps},
            {(e.left.value, e.right.value): e.result.value for e in d.hcomps})
    except (StructureError, ValueError) as exc:
        raise _err(str(exc), d.name) from None
    rep = validate_bicategory(B)
    if not rep.ok:
        raise _err(f"not a 2-category: {', '.join(sorted(rep.tags()))} fails", d.name)
    return B


def resolve(doc: Document, max_objects: int | None = None) -> Environment:
    """Build every declaration; the first problem raises :class:`ResolveError`."""
    limit = MAX_OBJECTS if max_objects is None else max_objects
    env = Environment()
    # categories and 2-categories share one namespace, classes have their own
    seen: dict[str, set[str]] = {"cat": set(), "class": set()}
    for item in doc.items:
        if isinstance(item, (CategoryDecl, BicategoryDecl, ClassDecl)):
            kind = "class" if isinstance(item, ClassDecl) else "cat"
            n = item.name
            if n.value in seen[kind]:
                raise _err(f"{n.value} is already declared", n)
            seen[kind].add(n.value)
        if isinstance(item, BicategoryDecl):
            env.bicategories[item.name.value] = _one_bicategory(item, limit)
        elif isinstance(item, CategoryDecl):
            env.categories[item.name.value] = _one_category(item, limit)
    for item in doc.of_type(ClassDecl):
        owner = item.of.value
        parent = env.categories.get(owner) or env.bicategories.get(owner)
        if parent is None:
            raise _err(f"unknown category {owner}", item.of)
        for m in item.members:
            if m.value not in parent.morphisms:
                raise _err(f"{m.value} is not a morphism of {owner}", m)
        env.classes[item.name.value] = MorClass.of(parent, [m.value for m in item.members],
                                                   ids=item.ids, name=item.name.value)
        env.class_owner[item.name.value] = owner
    env.queries = list(doc.of_type(QueryDecl))
    return env


# -- export ------------------------------------------------------------------------

def _names(xs) -> tuple[Name, ...]:
    return tuple(Name(x) for x in xs)


def _body(C) -> tuple[tuple[Name, ...], tuple, tuple]:

    ids = set(C.identity.tolist())
    mors = tuple(MorDecl(Name(C.morphisms[m]), Name(C.objects[C.source(m)]),
                         Name(C.objects[C.target(m)]))
                 for m in range(C.n_morphisms) if m not in ids)
    comp = C.comp1 if isinstance(C, FinBicategory) else C.comp
    lets = tuple(Equation(Name(C.morphisms[g]), Name(C.morphisms[f]), Name(C.morphisms[comp[g, f]]))
                 for g in range(C.n_morphisms) for f in range(C.n_morphisms)
                 if g not in ids and f not in ids and comp[g, f] >= 0)
    return _names(C.objects), mors, lets


def declare_category(C: FinCategory) -> CategoryDecl:
    """The declaration that resolves back to ``C``; identity names must be ``id_X``."""
    if any(C.morphisms[C.id(a)] != f"id_{o}" for a, o in enumerate(C.objects)):
        raise ValueError("identities must be named id_<object> to be declared")
    objects, mors, lets = _body(C)
    return CategoryDecl(Name(C.name), objects, mors, lets)


def declare_bicategory(B: FinBicategory) -> BicategoryDecl:

    if not B.strict:
        raise ValueError("only strict 2-categories can be declared")
    if any(B.cells[B.i(m)] != f"i_{B.morphisms[m]}" for m in range(B.n_morphisms)) or \
            any(B.i(m) != m for m in range(B.n_morphisms)):
        raise ValueError("identity 2-cells must come first and be named i_<1-cell>")
    objects, mors, lets = _body(B)
    n1 = B.n_morphisms
    cells = tuple(CellDecl(Name(B.cells[x]), Name(B.morphisms[B.cell_source(x)]),
                           Name(B.morphisms[B.cell_target(x)])) for x in range(n1, B.n_cells))
    ids1 = {B.i(B.id(a)) for a in range(B.n_objects)}
    vcomps = tuple(Equation(Name(B.cells[b]), Name(B.cells[a]), Name(B.cells[B.vcomp[b, a]]))
                   for b in range(n1, B.n_cells) for a in range(n1, B.n_cells) if B.vcomp[b, a] >= 0)
    hcomps = tuple(Equation(Name(B.cells[b]), Name(B.cells[a]), Name(B.cells[B.hcomp[b, a]]))
                   for b in range(B.n_cells) for a in range(B.n_cells)
                   if B.hcomp[b, a] >= 0 and (b >= n1 or a >= n1)
                   and b not in ids1 and a not in ids1)
    return BicategoryDecl(Name(B.name), objects, mors, lets, cells, vcomps, hcomps)
