"""Pretty-printer producing parseable Jimple text from an AST."""

from __future__ import annotations

from .ast import (
    ArrayRef,
    AssignStmt,
    BinopExpr,
    BreakpointStmt,
    CastExpr,
    DeclStmt,
    FieldRef,
    GotoStmt,
    IdentityStmt,
    IfStmt,
    IntConst,
    InvokeExpr,
    InvokeStmt,
    JimpleClass,
    JimpleStmt,
    LabelStmt,
    Local,
    NewArrayExpr,
    NewExpr,
    NullConst,
    ReturnStmt,
    StringConst,
    ThrowStmt,
    UnopExpr,
    Value,
    type_name,
)


def value_text(v: Value) -> str:
    if isinstance(v, Local):
        return v.name
    if isinstance(v, IntConst):
        return f"{v.value}L" if v.long else str(v.value)
    if isinstance(v, NullConst):
        return "null"
    if isinstance(v, StringConst):
        return f'"{v.value}"'
    if isinstance(v, FieldRef):
        sig = f"<{v.class_name}: {type_name(v.field_type)} {v.field_name}>"
        return f"{v.base.name}.{sig}" if v.base is not None else sig
    if isinstance(v, ArrayRef):
        return f"{v.base.name}[{value_text(v.index)}]"
    if isinstance(v, BinopExpr):
        return f"{value_text(v.a)} {v.op} {value_text(v.b)}"
    if isinstance(v, UnopExpr):
        return f"{v.op} {value_text(v.a)}"
    if isinstance(v, CastExpr):
        return f"({type_name(v.to)}) {value_text(v.value)}"
    if isinstance(v, NewExpr):
        return f"new {v.class_name}"
    if isinstance(v, NewArrayExpr):
        return f"newarray ({type_name(v.elem)})[{value_text(v.size)}]"
    if isinstance(v, InvokeExpr):
        args = ", ".join(value_text(a) for a in v.args)
        if v.base is not None:
            return f"{v.kind} {v.base.name}.{v.sig}({args})"
        return f"{v.kind} {v.sig}({args})"
    raise ValueError(f"unprintable value {v!r}")


def stmt_text(stmt: JimpleStmt) -> str:
    if isinstance(stmt, DeclStmt):
        return f"{type_name(stmt.type)} {stmt.name};"
    if isinstance(stmt, IdentityStmt):
        return f"{stmt.local} := {stmt.source}: {type_name(stmt.type)};"
    if isinstance(stmt, AssignStmt):
        return f"{value_text(stmt.lhs)} = {value_text(stmt.rhs)};"
    if isinstance(stmt, LabelStmt):
        return f"{stmt.name}:"
    if isinstance(stmt, GotoStmt):
        return f"goto {stmt.label};"
    if isinstance(stmt, IfStmt):
        return f"if {value_text(stmt.cond)} goto {stmt.label};"
    if isinstance(stmt, InvokeStmt):
        return f"{value_text(stmt.invoke)};"
    if isinstance(stmt, ReturnStmt):
        return f"return {value_text(stmt.value)};" if stmt.value is not None else "return;"
    if isinstance(stmt, ThrowStmt):
        return f"throw {value_text(stmt.value)};"
    if isinstance(stmt, BreakpointStmt):
        return "breakpoint;"
    raise ValueError(f"unprintable statement {stmt!r}")


def print_class(cls: JimpleClass) -> str:
    lines = []
    header = f"public class {cls.name}"
    if cls.superclass:
        header += f" extends {cls.superclass}"
    if cls.interfaces:
        header += " implements " + ", ".join(cls.interfaces)
    lines.append(header)
    lines.append("{")
    for f in cls.fields:
        mods = "public static" if f.static else "public"
        lines.append(f"    {mods} {type_name(f.type)} {f.name};")
    for m in cls.methods:
        lines.append("")
        mods = "public static" if m.static else "public"
        params = ", ".join(type_name(p) for p in m.params)
        decl = f"    {mods} {type_name(m.return_type)} {m.name}({params})"
        if not m.has_body:
            lines.append(decl + ";")
            continue
        lines.append(decl)
        lines.append("    {")
        for stmt in m.body:
            if isinstance(stmt, LabelStmt):
                lines.append(f"     {stmt_text(stmt)}")
            else:
                lines.append(f"        {stmt_text(stmt)}")
        lines.append("    }")
    lines.append("}")
    return "\n".join(lines) + "\n"
