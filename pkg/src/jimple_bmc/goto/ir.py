"""GOTO intermediate program: types, expressions, instructions, validation.

The instruction set is deliberately small: assignments, declarations,
labels and jumps, function calls, return/throw, plus assert/assume which
the analysis uses internally.  Structured control flow does not exist at
this level; loops are just backward jumps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from ..source import Diagnostic, SourcePos, UNKNOWN_POS

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class IntType:
    """Signed two's-complement bit-vector."""

    width: int  # 8, 16, 32, 64


@dataclass(frozen=True)
class BoolType:
    pass


@dataclass(frozen=True)
class VoidType:
    pass


@dataclass(frozen=True)
class RefType:
    class_name: str


@dataclass(frozen=True)
class ArrayType:
    elem: "GotoType"


@dataclass(frozen=True)
class RecordType:
    """Class layout: inherited fields first, then own fields, in order."""

    name: str
    fields: tuple[tuple[str, "GotoType"], ...]

    def field_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.fields)


GotoType = Union[IntType, BoolType, VoidType, RefType, ArrayType, RecordType]

INT8 = IntType(8)
INT16 = IntType(16)
INT32 = IntType(32)
INT64 = IntType(64)
BOOL_T = BoolType()
VOID = VoidType()


class GotoTypeError(Exception):
    pass


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Constant(Expr):
    value: Optional[int]  # None encodes the null reference; bools are 0/1
    type: GotoType


@dataclass(frozen=True)
class Symbol(Expr):
    name: str
    type: GotoType


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # neg | not
    a: Expr


@dataclass(frozen=True)
class Binary(Expr):
    # + - * / % < <= > >= == != and or shl shr ushr bitand bitor bitxor
    op: str
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Member(Expr):
    """Field access through a reference; names the declaring class."""

    base: Expr
    class_name: str
    field_name: str
    field_type: GotoType


@dataclass(frozen=True)
class Index(Expr):
    base: Expr
    index: Expr


@dataclass(frozen=True)
class NewObject(Expr):
    class_name: str


@dataclass(frozen=True)
class NewArray(Expr):
    elem: GotoType
    length: Expr


@dataclass(frozen=True)
class Length(Expr):
    base: Expr


@dataclass(frozen=True)
class Cast(Expr):
    value: Expr
    to: GotoType


@dataclass(frozen=True)
class Nondet(Expr):
    type: GotoType


@dataclass(frozen=True)
class CmpExpr(Expr):
    """Java cmp/cmpl/cmpg yielding -1, 0 or +1 as a 32-bit int.

    cmpl/cmpg differ from cmp only in their NaN bias, which is
    float-specific; over integers all three coincide.
    """

    kind: str  # cmp | cmpl | cmpg
    a: Expr
    b: Expr


@dataclass(frozen=True)
class OverflowGuard(Expr):
    """Boolean predicate: does ``a op b`` overflow its signed width?"""

    op: str  # + - *
    a: Expr
    b: Expr


ARITH_OPS = {"+", "-", "*", "/", "%"}
REL_OPS = {"<", "<=", ">", ">="}
EQ_OPS = {"==", "!="}
BOOL_OPS = {"and", "or"}
SHIFT_OPS = {"shl", "shr", "ushr"}
BIT_OPS = {"bitand", "bitor", "bitxor"}


def expr_type(e: Expr, env: dict[str, GotoType]) -> GotoType:
    """Type of an expression; raises GotoTypeError on inconsistent use."""
    if isinstance(e, Constant):
        return e.type
    if isinstance(e, Symbol):
        declared = env.get(e.name)
        if declared is not None and declared != e.type:
            raise GotoTypeError(f"symbol {e.name}: annotated {e.type}, declared {declared}")
        return e.type
    if isinstance(e, Unary):
        t = expr_type(e.a, env)
        if e.op == "neg":
            if not isinstance(t, IntType):
                raise GotoTypeError(f"neg over {t}")
            return t
        if e.op == "not":
            if not isinstance(t, BoolType):
                raise GotoTypeError(f"not over {t}")
            return t
        raise GotoTypeError(f"unknown unary {e.op}")
    if isinstance(e, Binary):
        ta, tb = expr_type(e.a, env), expr_type(e.b, env)
        if e.op in ARITH_OPS or e.op in BIT_OPS:
            if not (isinstance(ta, IntType) and ta == tb):
                raise GotoTypeError(f"{e.op} over {ta}, {tb}")
            return ta
        if e.op in SHIFT_OPS:
            if not (isinstance(ta, IntType) and isinstance(tb, IntType)):
                raise GotoTypeError(f"{e.op} over {ta}, {tb}")
            return ta
        if e.op in REL_OPS:
            if not (isinstance(ta, IntType) and ta == tb):
                raise GotoTypeError(f"{e.op} over {ta}, {tb}")
            return BOOL_T
        if e.op in EQ_OPS:
            if ta != tb and not (isinstance(ta, RefType) and isinstance(tb, RefType)):
                # Any reference compares against any reference (null included).
                if not (
                    isinstance(ta, (RefType, ArrayType)) and isinstance(tb, (RefType, ArrayType))
                ):
                    raise GotoTypeError(f"{e.op} over {ta}, {tb}")
            return BOOL_T
        if e.op in BOOL_OPS:
            if not (isinstance(ta, BoolType) and isinstance(tb, BoolType)):
                raise GotoTypeError(f"{e.op} over {ta}, {tb}")
            return BOOL_T
        raise GotoTypeError(f"unknown binary {e.op}")
    if isinstance(e, Member):
        tb = expr_type(e.base, env)
        if not isinstance(tb, RefType):
            raise GotoTypeError(f"member access through non-reference {tb}")
        return e.field_type
    if isinstance(e, Index):
        tb = expr_type(e.base, env)
        if not isinstance(tb, ArrayType):
            raise GotoTypeError(f"indexing non-array {tb}")
        ti = expr_type(e.index, env)
        if not isinstance(ti, IntType):
            raise GotoTypeError(f"array index of type {ti}")
        return tb.elem
    if isinstance(e, NewObject):
        return RefType(e.class_name)
    if isinstance(e, NewArray):
        tl = expr_type(e.length, env)
        if not isinstance(tl, IntType):
            raise GotoTypeError(f"array length of type {tl}")
        return ArrayType(e.elem)
    if isinstance(e, Length):
        tb = expr_type(e.base, env)
        if not isinstance(tb, ArrayType):
            raise GotoTypeError(f"lengthof non-array {tb}")
        return INT32
    if isinstance(e, Cast):
        expr_type(e.value, env)
        return e.to
    if isinstance(e, Nondet):
        return e.type
    if isinstance(e, CmpExpr):
        ta, tb = expr_type(e.a, env), expr_type(e.b, env)
        if not (isinstance(ta, IntType) and ta == tb):
            raise GotoTypeError(f"{e.kind} over {ta}, {tb}")
        return INT32
    if isinstance(e, OverflowGuard):
        ta, tb = expr_type(e.a, env), expr_type(e.b, env)
        if not (isinstance(ta, IntType) and ta == tb):
            raise GotoTypeError(f"overflow({e.op}) over {ta}, {tb}")
        return BOOL_T
    raise GotoTypeError(f"unknown expression {type(e).__name__}")


# ---------------------------------------------------------------------------
# Property classes carried on ASSERT


class PropertyClass(str, enum.Enum):
    OVERFLOW = "overflow"
    UNDERFLOW = "underflow"
    DIV_BY_ZERO = "div-by-zero"
    BOUNDS = "bounds"
    NULL_DEREF = "null-deref"
    USER_ASSERT = "user-assert"
    UNCAUGHT_EXCEPTION = "uncaught-exception"
    UNWINDING = "unwinding"


# ---------------------------------------------------------------------------
# Instructions


@dataclass
class Instr:
    pos: SourcePos = field(default=UNKNOWN_POS, kw_only=True, compare=False)
    atomic: bool = field(default=False, kw_only=True)


@dataclass
class Assign(Instr):
    target: Expr  # Symbol | Member | Index
    value: Expr


@dataclass
class Decl(Instr):
    name: str
    type: GotoType


@dataclass
class Dead(Instr):
    name: str


@dataclass
class Call(Instr):
    lhs: Optional[Expr]  # Symbol or None
    func: str
    args: tuple[Expr, ...]


@dataclass
class LabelI(Instr):
    label: str


@dataclass
class GotoI(Instr):
    label: str


@dataclass
class IfI(Instr):
    cond: Expr
    label: str


@dataclass
class Skip(Instr):
    pass


@dataclass
class ReturnI(Instr):
    value: Optional[Expr]


@dataclass
class ThrowI(Instr):
    value: Expr


@dataclass
class AssertI(Instr):
    cond: Expr
    property_class: PropertyClass
    message: str


@dataclass
class AssumeI(Instr):
    cond: Expr


@dataclass
class EndFunction(Instr):
    pass


GotoInstruction = Instr


@dataclass
class GotoFunction:
    """A function body terminated by an EndFunction marker.

    Parameter passing uses globals: callers write ``param_globals`` in
    order (receiver first for virtual methods) before the call; the body's
    atomic prologue copies them into locals.
    """

    name: str
    body: list[Instr]
    param_globals: tuple[str, ...] = ()
    is_virtual: bool = False
    return_type: GotoType = VOID
    source: str = ""

    def label_index(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i, ins in enumerate(self.body):
            if isinstance(ins, LabelI):
                out.setdefault(ins.label, i)
        return out

    def local_types(self) -> dict[str, GotoType]:
        return {ins.name: ins.type for ins in self.body if isinstance(ins, Decl)}


@dataclass
class GotoProgram:
    functions: dict[str, GotoFunction] = field(default_factory=dict)
    globals: dict[str, GotoType] = field(default_factory=dict)
    records: dict[str, RecordType] = field(default_factory=dict)
    externals: set[str] = field(default_factory=set)
    # Calls that resolved to nothing; their results were havocked.
    unknown_calls: list[tuple[str, SourcePos]] = field(default_factory=list)
    # class -> [(declaring class, field name, type)]; the heap model keys
    # field storage by declaring class, which record layouts do not carry.
    field_origins: dict[str, list[tuple[str, str, GotoType]]] = field(default_factory=dict)

    def symbol_env(self, fn: GotoFunction) -> dict[str, GotoType]:
        env = dict(self.globals)
        env.update(fn.local_types())
        return env


# ---------------------------------------------------------------------------
# Control flow


def successors(fn: GotoFunction, index: int) -> set[int]:
    """Indices of the instructions control may reach next."""
    ins = fn.body[index]
    labels = fn.label_index()
    if isinstance(ins, GotoI):
        return {labels[ins.label]}
    if isinstance(ins, IfI):
        return {labels[ins.label], index + 1}
    if isinstance(ins, (ReturnI, ThrowI, EndFunction)):
        return set()
    return {index + 1}


# ---------------------------------------------------------------------------
# Validation


def _check_cond(program: GotoProgram, fn: GotoFunction, i: int, cond: Expr, what: str, out: list):
    env = program.symbol_env(fn)
    try:
        t = expr_type(cond, env)
    except GotoTypeError as exc:
        out.append(Diagnostic(str(exc), fn.body[i].pos, f"{fn.name}@{i}"))
        return
    if not isinstance(t, BoolType):
        out.append(
            Diagnostic(f"{what} condition must be boolean, got {t}", fn.body[i].pos, f"{fn.name}@{i}")
        )


def validate(program: GotoProgram) -> list[Diagnostic]:
    """Structural and type diagnostics; an empty list means valid."""
    out: list[Diagnostic] = []
    for name, fn in program.functions.items():
        if not fn.body or not isinstance(fn.body[-1], EndFunction):
            out.append(Diagnostic("function must end with END_FUNCTION", context=name))
            continue
        if sum(1 for i in fn.body if isinstance(i, EndFunction)) != 1:
            out.append(Diagnostic("exactly one END_FUNCTION marker allowed", context=name))
            continue
        labels: dict[str, int] = {}
        for i, ins in enumerate(fn.body):
            if isinstance(ins, LabelI):
                if ins.label in labels:
                    out.append(Diagnostic(f"duplicate label {ins.label}", ins.pos, name))
                labels[ins.label] = i
        env = program.symbol_env(fn)
        decls: dict[str, int] = {}
        labels_ok = True
        for i, ins in enumerate(fn.body):
            ctx = f"{name}@{i}"
            if isinstance(ins, Decl):
                if ins.name in decls:
                    out.append(Diagnostic(f"duplicate DECL {ins.name}", ins.pos, ctx))
                decls[ins.name] = i
            elif isinstance(ins, (GotoI, IfI)):
                if ins.label not in labels:
                    out.append(Diagnostic(f"jump to missing label {ins.label}", ins.pos, ctx))
                    labels_ok = False
                if isinstance(ins, IfI):
                    _check_cond(program, fn, i, ins.cond, "IF", out)
            elif isinstance(ins, AssertI):
                _check_cond(program, fn, i, ins.cond, "ASSERT", out)
            elif isinstance(ins, AssumeI):
                _check_cond(program, fn, i, ins.cond, "ASSUME", out)
            elif isinstance(ins, Assign):
                if not isinstance(ins.target, (Symbol, Member, Index)):
                    out.append(Diagnostic("assignment target must be a place", ins.pos, ctx))
                    continue
                try:
                    tt = expr_type(ins.target, env)
                    tv = expr_type(ins.value, env)
                    if tt != tv and not _assignable(tt, tv):
                        out.append(Diagnostic(f"assigning {tv} into {tt}", ins.pos, ctx))
                except GotoTypeError as exc:
                    out.append(Diagnostic(str(exc), ins.pos, ctx))
            elif isinstance(ins, Call):
                if ins.func not in program.functions and ins.func not in program.externals:
                    out.append(Diagnostic(f"call to unknown function {ins.func}", ins.pos, ctx))
                for a in ins.args:
                    try:
                        expr_type(a, env)
                    except GotoTypeError as exc:
                        out.append(Diagnostic(str(exc), ins.pos, ctx))
            elif isinstance(ins, (ReturnI, ThrowI)):
                v = ins.value
                if v is not None:
                    try:
                        expr_type(v, env)
                    except GotoTypeError as exc:
                        out.append(Diagnostic(str(exc), ins.pos, ctx))
        if labels_ok:  # the DEAD dataflow needs a resolvable jump graph
            out.extend(_check_dead_after_decl(fn))
    return out


def _assignable(target: GotoType, value: GotoType) -> bool:
    # References are interchangeable across the class hierarchy; null has
    # whatever reference type the lowering gave it.
    if isinstance(target, (RefType, ArrayType)) and isinstance(value, (RefType, ArrayType)):
        return True
    return False


def _check_dead_after_decl(fn: GotoFunction) -> list[Diagnostic]:
    """DEAD(x) must be preceded by DECL(x) on every path from entry."""
    n = len(fn.body)
    if n == 0:
        return []
    all_names = {ins.name for ins in fn.body if isinstance(ins, Decl)}
    # Forward must-analysis: declared-on-all-paths sets.
    before: list[set[str] | None] = [None] * n  # None = unreachable so far
    before[0] = set()
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if before[i] is None:
                continue
            after = set(before[i])
            ins = fn.body[i]
            if isinstance(ins, Decl):
                after.add(ins.name)
            for s in successors(fn, i):
                if s >= n:
                    continue
                merged = after if before[s] is None else (before[s] & after)
                if before[s] is None or merged != before[s]:
                    before[s] = set(merged)
                    changed = True
    out = []
    for i, ins in enumerate(fn.body):
        if isinstance(ins, Dead):
            if ins.name not in all_names:
                out.append(Diagnostic(f"DEAD {ins.name} without any DECL", ins.pos, fn.name))
            elif before[i] is not None and ins.name not in before[i]:
                out.append(
                    Diagnostic(f"DEAD {ins.name} not preceded by DECL on every path", ins.pos, fn.name)
                )
    return out
