"""Lexer, recursive-descent parser and printer for ``.cat`` documents.

::

    file       := item*
    item       := category | bicategory | class | query
    category   := "category" NAME "{" body "}"
    bicategory := "bicategory" NAME "{" body cells "}"
    body       := "objects" ":" names ("mor" NAME ":" NAME "->" NAME)*
                  ("let" NAME "." NAME "=" NAME)*
    cells      := ("cell" NAME ":" NAME "=>" NAME)* ("vcomp" NAME "." NAME "=" NAME)*
                  ("hcomp" NAME "*" NAME "=" NAME)*
    class      := "class" NAME "of" NAME "=" "{" ("ids" ("," NAME)* | names) "}"
    query      := "check" KIND (NAME "=" NAME)*
    names      := NAME ("," NAME)*

``#`` starts a comment running to the end of the line.  Keywords are
contextual, except that a query parameter may not be called ``category``,
``bicategory``, ``class`` or ``check``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union

QUERY_KINDS = ("cf", "bf", "pullback", "wfp", "abc", "suite")
ITEM_KEYWORDS = ("category", "bicategory", "class", "check")

_PUNCT2 = {"->": "->", "=>": "=>"}
_PUNCT1 = set("{}:,.=*")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        super().__init__(self.render())

    def render(self) -> str:
        out = f"{self.line}:{self.column}: {self.message}"
        if self.expected:
            out += f" (expected {', '.join(sorted(self.expected))})"
        return out


@dataclass(frozen=True)
class Span:
    line: int
    column: int


@dataclass(frozen=True)
class Name:
    value: str
    span: Span = field(default=Span(0, 0), compare=False, repr=False)

    def __str__(self) -> str:
        return self.value


# -- lexer ---------------------------------------------------------------------------

class Token(NamedTuple):
    kind: str  # "name", a punctuation string, or "eof"
    text: str
    line: int
    column: int


def _name_char(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c in "_'")


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    i, line, col, n = 0, 1, 1, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i:i + 2]
        if two in _PUNCT2:
            out.append(Token(two, two, line, col))
            i, col = i + 2, col + 2
            continue
        if c in _PUNCT1:
            out.append(Token(c, c, line, col))
            i, col = i + 1, col + 1
            continue
        if _name_char(c):
            j = i + 1
            # '-' may join name parts, but never starts an arrow
            while j < n and (_name_char(text[j]) or (text[j] == "-" and j + 1 < n
                                                      and _name_char(text[j + 1]))):
                j += 1
            out.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    out.append(Token("eof", "", line, col))
    return out


# -- syntax tree ------------------------------------------------------------------------

@dataclass(frozen=True)
class MorDecl:
    name: Name
    source: Name
    target: Name


@dataclass(frozen=True)
class Equation:
    """``left . right = result`` (or ``*`` for horizontal composites)."""
    left: Name
    right: Name
    result: Name


@dataclass(frozen=True)
class CellDecl:
    name: Name
    source: Name
    target: Name


@dataclass(frozen=True)
class CategoryDecl:
    name: Name
    objects: tuple[Name, ...]
    mors: tuple[MorDecl, ...] = ()
    lets: tuple[Equation, ...] = ()
    span: Span = field(default=Span(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BicategoryDecl:
    name: Name
    objects: tuple[Name, ...]
    mors: tuple[MorDecl, ...] = ()
    lets: tuple[Equation, ...] = ()
    cells: tuple[CellDecl, ...] = ()
    vcomps: tuple[Equation, ...] = ()
    hcomps: tuple[Equation, ...] = ()
    span: Span = field(default=Span(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ClassDecl:
    name: Name
    of: Name
    ids: bool
    members: tuple[Name, ...]
    span: Span = field(default=Span(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class QueryDecl:
    kind: Name
    params: tuple[tuple[Name, Name], ...]
    span: Span = field(default=Span(0, 0), compare=False, repr=False)

    def param(self, key: str) -> Name | None:
        for k, v in self.params:
            if k.value == key:
                return v
        return None


Item = Union[CategoryDecl, BicategoryDecl, ClassDecl, QueryDecl]


@dataclass(frozen=True)
class Document:
    items: tuple[Item, ...] = ()

    def of_type(self, cls) -> Iterator:
        return (x for x in self.items if isinstance(x, cls))


# -- parser ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, expected) -> ParseError:
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"unexpected {got}", t.line, t.column, frozenset(expected))

    def at_word(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.text == word

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise self.error({f"'{kind}'"})
        return self.advance()

    def word(self, w: str) -> Token:
        if not self.at_word(w):
            raise self.error({repr(w)})
        return self.advance()

    def name(self, what: str = "NAME") -> Name:
        if self.tok.kind != "name":
            raise self.error({what})
        t = self.advance()
        return Name(t.text, Span(t.line, t.column))

    def names(self) -> tuple[Name, ...]:
        out = [self.name()]
        while self.tok.kind == ",":
            self.advance()
            out.append(self.name())
        return tuple(out)

    def document(self) -> Document:
        items = []
        while self.tok.kind != "eof":
            if not self.tok.kind == "name" or self.tok.text not in ITEM_KEYWORDS:
                raise self.error({repr(k) for k in ITEM_KEYWORDS} | {"end of input"})
            items.append(getattr(self, "item_" + self.tok.text)())
        return Document(tuple(items))

    def _equation(self, op: str) -> Equation:
        left = self.name()
        self.expect(op)
        right = self.name()
        self.expect("=")
        return Equation(left, right, self.name())

    def _arrow_decl(self, cls, arrow: str):
        n = self.name()
        self.expect(":")
        s = self.name()
        self.expect(arrow)
        return cls(n, s, self.name())

    def _section(self, word: str, parse_one) -> tuple:
        out = []
        while self.at_word(word):
            self.advance()
            out.append(parse_one())
        return tuple(out)

    def _body(self, two: bool):
        self.expect("{")
        if not self.at_word("objects"):
            raise self.error({"'objects'"})
        self.advance()
        self.expect(":")
        objects = self.names()
        words = ["mor", "let"] + (["cell", "vcomp", "hcomp"] if two else [])
        parsers = {
            "mor": lambda: self._arrow_decl(MorDecl, "->"),
            "let": lambda: self._equation("."),
            "cell": lambda: self._arrow_decl(CellDecl, "=>"),
            "vcomp": lambda: self._equation("."),
            "hcomp": lambda: self._equation("*"),
        }
        parts = [self._section(w, parsers[w]) for w in words]
        if self.tok.kind != "}":
            # sections come in a fixed order; only the current one or later ones may follow
            last = max((i for i, part in enumerate(parts) if part), default=0)
            allowed = {repr(w) for w in words[last:]} | {"'}'"}
            if not any(parts):
                allowed.add("','")
            raise self.error(allowed)
        self.advance()
        parts += [()] * (5 - len(parts))
        return (objects, *parts)

    def item_category(self) -> CategoryDecl:
        t = self.advance()
        name = self.name()
        objects, mors, lets, *_ = self._body(two=False)
        return CategoryDecl(name, objects, mors, lets, Span(t.line, t.column))

    def item_bicategory(self) -> BicategoryDecl:
        t = self.advance()
        name = self.name()
        objects, mors, lets, cells, vcomps, hcomps = self._body(two=True)
        return BicategoryDecl(name, objects, mors, lets, cells, vcomps, hcomps, Span(t.line, t.column))

    def item_class(self) -> ClassDecl:
        t = self.advance()
        name = self.name()
        self.word("of")
        of = self.name()
        self.expect("=")
        self.expect("{")
        ids = False
        members: tuple[Name, ...] = ()
        if self.at_word("ids"):
            self.advance()
            ids = True
            rest = []
            while self.tok.kind == ",":
                self.advance()
                rest.append(self.name())
            members = tuple(rest)
        elif self.tok.kind == "name":
            members = self.names()
        else:
            raise self.error({"'ids'", "NAME"})
        if self.tok.kind != "}":
            raise self.error({"','", "'}'"})
        self.advance()
        return ClassDecl(name, of, ids, members, Span(t.line, t.column))

    def item_check(self) -> QueryDecl:
        t = self.advance()
        if self.tok.kind != "name" or self.tok.text not in QUERY_KINDS:
            raise self.error({repr(k) for k in QUERY_KINDS})
        kind = self.name()
        params = []
        while self.tok.kind == "name" and self.tok.text not in ITEM_KEYWORDS:
            key = self.name()
            self.expect("=")
            params.append((key, self.name("value")))
        return QueryDecl(kind, tuple(params), Span(t.line, t.column))


def parse(text: str) -> Document:
    """Parse a whole document; the first error raises :class:`ParseError`."""
    if not isinstance(text, str):
        raise TypeError("parse expects text")
    return _Parser(text).document()


# -- printer -------------------------------------------------------------------------

def _body_lines(d) -> list[str]:
    lines = ["  objects: " + ", ".join(o.value for o in d.objects)]
    lines += [f"  mor {m.name}: {m.source} -> {m.target}" for m in d.mors]
    lines += [f"  let {e.left} . {e.right} = {e.result}" for e in d.lets]
    return lines


def print_item(item: Item) -> str:
    if isinstance(item, CategoryDecl):
        return "\n".join([f"category {item.name} {{"] + _body_lines(item) + ["}"])
    if isinstance(item, BicategoryDecl):
        lines = [f"bicategory {item.name} {{"] + _body_lines(item)
        lines += [f"  cell {c.name}: {c.source} => {c.target}" for c in item.cells]
        lines += [f"  vcomp {e.left} . {e.right} = {e.result}" for e in item.vcomps]
        lines += [f"  hcomp {e.left} * {e.right} = {e.result}" for e in item.hcomps]
        return "\n".join(lines + ["}"])
    if isinstance(item, ClassDecl):
        parts = (["ids"] if item.ids else []) + [m.value for m in item.members]
        return f"class {item.name} of {item.of} = {{ {', '.join(parts)} }}"
    if isinstance(item, QueryDecl):
        return " ".join([f"check {item.kind}"] + [f"{k}={v}" for k, v in item.params])
    raise TypeError(f"not a document item: {item!r}")


def print_document(doc: Document) -> str:
    return "".join(print_item(x) + "\n\n" for x in doc.items).rstrip("\n") + "\n" if doc.items else ""
