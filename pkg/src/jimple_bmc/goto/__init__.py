"""GOTO intermediate representation."""

from .ir import (  # noqa: F401
    ArrayType,
    Assign,
    AssertI,
    AssumeI,
    Binary,
    BOOL_T,
    BoolType,
    Call,
    Cast,
    CmpExpr,
    Constant,
    Dead,
    Decl,
    EndFunction,
    Expr,
    GotoFunction,
    GotoI,
    GotoProgram,
    GotoType,
    GotoTypeError,
    IfI,
    Index,
    Instr,
    INT8,
    INT16,
    INT32,
    INT64,
    IntType,
    LabelI,
    Length,
    Member,
    NewArray,
    NewObject,
    Nondet,
    OverflowGuard,
    PropertyClass,
    RecordType,
    RefType,
    ReturnI,
    Skip,
    Symbol,
    ThrowI,
    Unary,
    VOID,
    VoidType,
    expr_type,
    successors,
    validate,
)
from .printer import pretty_print, read_program, GotoReadError  # noqa: F401
