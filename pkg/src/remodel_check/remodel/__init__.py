"""Reading REModel files: lexer, parser, printer and identifier environment."""

from .parser import ModelSyntaxError, parse_model
from .printer import format_expr, format_model
from .symbols import SymbolError, TypeEnv, collect_symbols

__all__ = ["ModelSyntaxError", "SymbolError", "TypeEnv", "collect_symbols", "format_expr",
           "format_model", "parse_model"]
