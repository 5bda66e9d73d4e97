"""Python bindings for the sessionlr checker, interpreter and equivalence tools."""

from sessionlr._core import check, equiv, join, ni, run

__all__ = ["check", "equiv", "join", "ni", "run"]
