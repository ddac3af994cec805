"""Jimple frontend: lexer, parser, AST, class table."""

from . import ast  # noqa: F401
from .classtable import ClassTable, ClassTableError, build_class_table  # noqa: F401
from .lexer import JimpleLexError, Token, lex  # noqa: F401
from .parser import (  # noqa: F401
    JimpleParseError,
    UnsupportedConstructError,
    parse_class,
)
from .printer import print_class  # noqa: F401
