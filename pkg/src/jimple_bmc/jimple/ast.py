"""Typed AST for textual Jimple (Soot output format)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..source import SourcePos, UNKNOWN_POS

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class PrimType:
    name: str  # int boolean byte short long char void


@dataclass(frozen=True)
class RefJType:
    class_name: str


@dataclass(frozen=True)
class ArrJType:
    elem: "JimpleType"


JimpleType = Union[PrimType, RefJType, ArrJType]

J_INT = PrimType("int")
J_BOOLEAN = PrimType("boolean")
J_BYTE = PrimType("byte")
J_SHORT = PrimType("short")
J_LONG = PrimType("long")
J_CHAR = PrimType("char")
J_VOID = PrimType("void")

PRIMITIVES = {t.name: t for t in (J_INT, J_BOOLEAN, J_BYTE, J_SHORT, J_LONG, J_CHAR, J_VOID)}

# float/double are recognized by the lexer so we can reject them with a
# useful message instead of a syntax error.
UNSUPPORTED_PRIMITIVES = {"float", "double"}


def type_name(t: JimpleType) -> str:
    if isinstance(t, PrimType):
        return t.name
    if isinstance(t, RefJType):
        return t.class_name
    return type_name(t.elem) + "[]"


def simple_name(class_name: str) -> str:
    return class_name.rsplit(".", 1)[-1]


# ---------------------------------------------------------------------------
# Values (three-address immediates and rhs expressions)


@dataclass(frozen=True)
class Local:
    name: str


@dataclass(frozen=True)
class IntConst:
    value: int
    long: bool = False  # had an L suffix


@dataclass(frozen=True)
class NullConst:
    pass


@dataclass(frozen=True)
class StringConst:
    value: str


@dataclass(frozen=True)
class MethodSig:
    class_name: str
    return_type: JimpleType
    name: str
    params: tuple[JimpleType, ...]

    def __str__(self) -> str:
        ps = ",".join(type_name(p) for p in self.params)
        return f"<{self.class_name}: {type_name(self.return_type)} {self.name}({ps})>"


@dataclass(frozen=True)
class FieldRef:
    base: Optional[Local]  # None for static fields
    class_name: str
    field_type: JimpleType
    field_name: str


@dataclass(frozen=True)
class ArrayRef:
    base: Local
    index: "Value"


@dataclass(frozen=True)
class BinopExpr:
    op: str  # + - * / % == != < <= > >= << >> >>> & | ^ cmp cmpl cmpg
    a: "Value"
    b: "Value"


@dataclass(frozen=True)
class UnopExpr:
    op: str  # neg | lengthof
    a: "Value"


@dataclass(frozen=True)
class CastExpr:
    to: JimpleType
    value: "Value"


@dataclass(frozen=True)
class NewExpr:
    class_name: str


@dataclass(frozen=True)
class NewArrayExpr:
    elem: JimpleType
    size: "Value"


@dataclass(frozen=True)
class InvokeExpr:
    kind: str  # virtualinvoke | specialinvoke | staticinvoke
    base: Optional[Local]  # receiver; None for staticinvoke
    sig: MethodSig
    args: tuple["Value", ...]


Value = Union[
    Local,
    IntConst,
    NullConst,
    StringConst,
    FieldRef,
    ArrayRef,
    BinopExpr,
    UnopExpr,
    CastExpr,
    NewExpr,
    NewArrayExpr,
    InvokeExpr,
]

Place = Union[Local, FieldRef, ArrayRef]


# ---------------------------------------------------------------------------
# Statements


@dataclass
class JimpleStmt:
    pos: SourcePos = field(default=UNKNOWN_POS, kw_only=True, compare=False)


@dataclass
class DeclStmt(JimpleStmt):
    name: str
    type: JimpleType


@dataclass
class IdentityStmt(JimpleStmt):
    local: str
    source: str  # @this | @parameterN
    type: JimpleType


@dataclass
class AssignStmt(JimpleStmt):
    lhs: Place
    rhs: Value


@dataclass
class LabelStmt(JimpleStmt):
    name: str


@dataclass
class GotoStmt(JimpleStmt):
    label: str


@dataclass
class IfStmt(JimpleStmt):
    cond: BinopExpr
    label: str


@dataclass
class InvokeStmt(JimpleStmt):
    invoke: InvokeExpr


@dataclass
class ReturnStmt(JimpleStmt):
    value: Optional[Value]


@dataclass
class ThrowStmt(JimpleStmt):
    value: Value


@dataclass
class BreakpointStmt(JimpleStmt):
    pass


# ---------------------------------------------------------------------------
# Declarations


@dataclass
class JimpleField:
    name: str
    type: JimpleType
    static: bool
    pos: SourcePos = field(default=UNKNOWN_POS, compare=False)


@dataclass
class JimpleMethod:
    name: str
    return_type: JimpleType
    params: tuple[JimpleType, ...]
    static: bool
    locals: list[tuple[str, JimpleType]] = field(default_factory=list)
    body: list[JimpleStmt] = field(default_factory=list)
    has_body: bool = True  # abstract/native methods carry none
    pos: SourcePos = field(default=UNKNOWN_POS, compare=False)

    @property
    def kind(self) -> str:
        return "static" if self.static else "virtual"

    def signature_key(self) -> tuple:
        return (self.name, self.params)


@dataclass
class JimpleClass:
    name: str
    superclass: Optional[str]
    fields: list[JimpleField] = field(default_factory=list)
    methods: list[JimpleMethod] = field(default_factory=list)
    interfaces: tuple[str, ...] = ()
    pos: SourcePos = field(default=UNKNOWN_POS, compare=False)

    def find_methods(self, name: str) -> list[JimpleMethod]:
        return [m for m in self.methods if m.name == name]
