"""Localizations of finite categories and finite strict 2-categories."""

__version__ = "0.1.0"
