"""Text format, resolver and command line."""

from .resolve import Environment, ResolveError, declare_bicategory, declare_category, resolve
from .syntax import Document, ParseError, parse, print_document, print_item, tokenize

__all__ = [
    "Document", "Environment", "ParseError", "ResolveError", "declare_bicategory",
    "declare_category", "parse", "print_document", "print_item", "resolve", "tokenize",
]
