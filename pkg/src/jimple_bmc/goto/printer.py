"""Textual form of GOTO programs: deterministic printer plus a reader.

The format is line-oriented and exists for golden tests and the
``--goto-functions-only`` debugging dump.  ``read_program(pretty_print(p))``
reproduces ``p`` up to source positions.
"""

from __future__ import annotations

import re

from .ir import (
    ArrayType,
    Assign,
    AssertI,
    AssumeI,
    Binary,
    BoolType,
    BOOL_T,
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
    IfI,
    Index,
    Instr,
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
    VoidType,
    VOID,
)


# ---------------------------------------------------------------------------
# Printing


def type_text(t: GotoType) -> str:
    if isinstance(t, IntType):
        return f"sbv{t.width}"
    if isinstance(t, BoolType):
        return "bool"
    if isinstance(t, VoidType):
        return "void"
    if isinstance(t, RefType):
        return f"ref({t.class_name})"
    if isinstance(t, ArrayType):
        return f"arr({type_text(t.elem)})"
    if isinstance(t, RecordType):
        return t.name
    raise ValueError(f"unprintable type {t}")


def expr_text(e: Expr) -> str:
    if isinstance(e, Constant):
        if isinstance(e.type, BoolType):
            return "true" if e.value else "false"
        if e.value is None:
            return f"null({_ref_name(e.type)})"
        return f"{e.value}i{e.type.width}"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Unary):
        return ("-" if e.op == "neg" else "!") + expr_text(e.a)
    if isinstance(e, Binary):
        return f"({expr_text(e.a)} {e.op} {expr_text(e.b)})"
    if isinstance(e, Member):
        return (
            f"member({expr_text(e.base)}, {e.class_name}::{e.field_name}"
            f" : {type_text(e.field_type)})"
        )
    if isinstance(e, Index):
        return f"{expr_text(e.base)}[{expr_text(e.index)}]"
    if isinstance(e, NewObject):
        return f"new({e.class_name})"
    if isinstance(e, NewArray):
        return f"newarray({type_text(e.elem)}, {expr_text(e.length)})"
    if isinstance(e, Length):
        return f"lengthof({expr_text(e.base)})"
    if isinstance(e, Cast):
        return f"cast({expr_text(e.value)}, {type_text(e.to)})"
    if isinstance(e, Nondet):
        return f"nondet({type_text(e.type)})"
    if isinstance(e, CmpExpr):
        return f"{e.kind}({expr_text(e.a)}, {expr_text(e.b)})"
    if isinstance(e, OverflowGuard):
        return f'overflow("{e.op}", {expr_text(e.a)}, {expr_text(e.b)})'
    raise ValueError(f"unprintable expression {e}")


def _ref_name(t: GotoType) -> str:
    return t.class_name if isinstance(t, RefType) else type_text(t)


def instr_text(ins: Instr) -> str:
    if isinstance(ins, Decl):
        core = f"DECL {ins.name} : {type_text(ins.type)}"
    elif isinstance(ins, Dead):
        core = f"DEAD {ins.name}"
    elif isinstance(ins, Assign):
        core = f"ASSIGN {expr_text(ins.target)} := {expr_text(ins.value)}"
    elif isinstance(ins, Call):
        args = ", ".join(expr_text(a) for a in ins.args)
        lhs = f"{expr_text(ins.lhs)} := " if ins.lhs is not None else ""
        core = f"FUNCTION_CALL {lhs}{ins.func}({args})"
    elif isinstance(ins, LabelI):
        core = f"LABEL {ins.label}"
    elif isinstance(ins, GotoI):
        core = f"GOTO {ins.label}"
    elif isinstance(ins, IfI):
        core = f"IF {expr_text(ins.cond)} GOTO {ins.label}"
    elif isinstance(ins, Skip):
        core = "SKIP"
    elif isinstance(ins, ReturnI):
        core = "RETURN" + (f" {expr_text(ins.value)}" if ins.value is not None else "")
    elif isinstance(ins, ThrowI):
        core = f"THROW {expr_text(ins.value)}"
    elif isinstance(ins, AssertI):
        core = f"ASSERT {expr_text(ins.cond)} CLASS {ins.property_class.value}"
        if ins.message:
            core += f' MSG "{ins.message}"'
    elif isinstance(ins, AssumeI):
        core = f"ASSUME {expr_text(ins.cond)}"
    elif isinstance(ins, EndFunction):
        core = "END_FUNCTION"
    else:
        raise ValueError(f"unprintable instruction {ins}")
    if ins.atomic:
        core += " [atomic]"
    return core


def pretty_print(program: GotoProgram) -> str:
    lines: list[str] = []
    for rec in program.records.values():
        fields = ", ".join(f"{n} : {type_text(t)}" for n, t in rec.fields)
        lines.append(f"RECORD {rec.name} {{ {fields} }}")
    for name, t in program.globals.items():
        lines.append(f"GLOBAL {name} : {type_text(t)}")
    for name in program.externals:
        lines.append(f"EXTERNAL {name}")
    for fn in program.functions.values():
        header = f"FUNCTION {fn.name} RETURNS {type_text(fn.return_type)}"
        if fn.is_virtual:
            header += " VIRTUAL"
        lines.append(header)
        if fn.param_globals:
            lines.append("  PARAMS " + " ".join(fn.param_globals))
        if fn.source:
            lines.append(f'  SOURCE "{fn.source}"')
        for ins in fn.body[:-1]:
            lines.append("  " + instr_text(ins))
        lines.append("END_FUNCTION")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Reading

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<str>"[^"]*")
  | (?P<num>-?\d+i(?:8|16|32|64))
  | (?P<name>[A-Za-z_$@#.][A-Za-z0-9_$@#.:]*)
  | (?P<op><=|>=|==|!=|:=|[-+*/%<>!,()\[\]{}:])
    """,
    re.VERBOSE,
)

_WORD_OPS = {"and", "or", "shl", "shr", "ushr", "bitand", "bitor", "bitxor"}
_SYM_OPS = {"+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!="}


class GotoReadError(Exception):
    pass


class _Lexer:
    def __init__(self, text: str):
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise GotoReadError(f"bad character {text[pos]!r} at offset {pos}")
            pos = m.end()
            if m.lastgroup != "ws":
                self.tokens.append(m.group())
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise GotoReadError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise GotoReadError(f"expected {tok!r}, got {got!r}")

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)


def _parse_type(lx: _Lexer) -> GotoType:
    tok = lx.next()
    if tok.startswith("sbv"):
        return IntType(int(tok[3:]))
    if tok == "bool":
        return BOOL_T
    if tok == "void":
        return VOID
    if tok == "ref":
        lx.expect("(")
        name = lx.next()
        lx.expect(")")
        return RefType(name)
    if tok == "arr":
        lx.expect("(")
        elem = _parse_type(lx)
        lx.expect(")")
        return ArrayType(elem)
    raise GotoReadError(f"unknown type {tok!r}")


def _parse_expr(lx: _Lexer) -> Expr:
    return _parse_postfix(lx)


def _parse_postfix(lx: _Lexer) -> Expr:
    e = _parse_primary(lx)
    while lx.peek() == "[":
        lx.next()
        idx = _parse_expr(lx)
        lx.expect("]")
        e = Index(e, idx)
    return e


def _parse_primary(lx: _Lexer) -> Expr:
    tok = lx.next()
    if tok == "(":
        a = _parse_expr(lx)
        op = lx.next()
        if op in _SYM_OPS or op in _WORD_OPS:
            b = _parse_expr(lx)
            lx.expect(")")
            return Binary(op, a, b)
        raise GotoReadError(f"expected binary operator, got {op!r}")
    if tok == "-":
        return Unary("neg", _parse_postfix(lx))
    if tok == "!":
        return Unary("not", _parse_postfix(lx))
    if re.fullmatch(r"-?\d+i(?:8|16|32|64)", tok):
        value_s, width_s = tok.rsplit("i", 1)
        return Constant(int(value_s), IntType(int(width_s)))
    if tok == "true":
        return Constant(1, BOOL_T)
    if tok == "false":
        return Constant(0, BOOL_T)
    if tok == "null":
        lx.expect("(")
        name = lx.next()
        lx.expect(")")
        return Constant(None, RefType(name))
    if tok == "member":
        lx.expect("(")
        base = _parse_expr(lx)
        lx.expect(",")
        qualified = lx.next()
        if "::" not in qualified:
            raise GotoReadError(f"member needs Class::field, got {qualified!r}")
        class_name, field_name = qualified.rsplit("::", 1)
        lx.expect(":")
        ftype = _parse_type(lx)
        lx.expect(")")
        return Member(base, class_name, field_name, ftype)
    if tok == "new":
        lx.expect("(")
        name = lx.next()
        lx.expect(")")
        return NewObject(name)
    if tok == "newarray":
        lx.expect("(")
        elem = _parse_type(lx)
        lx.expect(",")
        length = _parse_expr(lx)
        lx.expect(")")
        return NewArray(elem, length)
    if tok == "lengthof":
        lx.expect("(")
        base = _parse_expr(lx)
        lx.expect(")")
        return Length(base)
    if tok == "cast":
        lx.expect("(")
        value = _parse_expr(lx)
        lx.expect(",")
        to = _parse_type(lx)
        lx.expect(")")
        return Cast(value, to)
    if tok == "nondet":
        lx.expect("(")
        t = _parse_type(lx)
        lx.expect(")")
        return Nondet(t)
    if tok in ("cmp", "cmpl", "cmpg"):
        lx.expect("(")
        a = _parse_expr(lx)
        lx.expect(",")
        b = _parse_expr(lx)
        lx.expect(")")
        return CmpExpr(tok, a, b)
    if tok == "overflow":
        lx.expect("(")
        op = lx.next().strip('"')
        lx.expect(",")
        a = _parse_expr(lx)
        lx.expect(",")
        b = _parse_expr(lx)
        lx.expect(")")
        return OverflowGuard(op, a, b)
    # Bare symbol; its type is resolved against the declaration environment
    # in a second pass.
    return Symbol(tok, VOID)


def _parse_line_expr(text: str) -> Expr:
    lx = _Lexer(text)
    e = _parse_expr(lx)
    if not lx.at_end():
        raise GotoReadError(f"trailing tokens in expression: {lx.peek()!r}")
    return e


def read_program(text: str) -> GotoProgram:
    program = GotoProgram()
    fn: GotoFunction | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        atomic = False
        if line.endswith("[atomic]"):
            atomic = True
            line = line[: -len("[atomic]")].strip()
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "RECORD":
            name, _, body = rest.partition("{")
            fields = []
            body = body.rsplit("}", 1)[0].strip()
            if body:
                for part in body.split(","):
                    fname, _, ftext = part.rpartition(" : ")
                    fields.append((fname.strip(), _parse_type(_Lexer(ftext.strip()))))
            rec = RecordType(name.strip(), tuple(fields))
            program.records[rec.name] = rec
            continue
        if head == "GLOBAL":
            name, _, ttext = rest.rpartition(" : ")
            program.globals[name.strip()] = _parse_type(_Lexer(ttext.strip()))
            continue
        if head == "EXTERNAL":
            program.externals.add(rest)
            continue
        if head == "FUNCTION":
            parts = rest.split()
            name = parts[0]
            ret: GotoType = VOID
            virtual = False
            if "RETURNS" in parts:
                ret = _parse_type(_Lexer(parts[parts.index("RETURNS") + 1]))
            if "VIRTUAL" in parts:
                virtual = True
            fn = GotoFunction(name, [], return_type=ret, is_virtual=virtual)
            program.functions[name] = fn
            continue
        if fn is None:
            raise GotoReadError(f"instruction outside function: {line}")
        if head == "PARAMS":
            fn.param_globals = tuple(rest.split())
            continue
        if head == "SOURCE":
            fn.source = rest.strip('"')
            continue
        ins = _read_instr(head, rest)
        ins.atomic = atomic
        fn.body.append(ins)
        if isinstance(ins, EndFunction):
            fn = None
    _resolve_symbol_types(program)
    return program


def _read_instr(head: str, rest: str) -> Instr:
    if head == "DECL":
        name, _, ttext = rest.rpartition(" : ")
        return Decl(name.strip(), _parse_type(_Lexer(ttext.strip())))
    if head == "DEAD":
        return Dead(rest)
    if head == "ASSIGN":
        lhs_text, _, rhs_text = rest.partition(":=")
        return Assign(_parse_line_expr(lhs_text.strip()), _parse_line_expr(rhs_text.strip()))
    if head == "FUNCTION_CALL":
        lhs = None
        if ":=" in rest:
            lhs_text, _, rest = rest.partition(":=")
            lhs = _parse_line_expr(lhs_text.strip())
            rest = rest.strip()
        func, _, argtext = rest.partition("(")
        argtext = argtext.rsplit(")", 1)[0].strip()
        args: list[Expr] = []
        if argtext:
            lx = _Lexer(argtext)
            args.append(_parse_expr(lx))
            while lx.peek() == ",":
                lx.next()
                args.append(_parse_expr(lx))
        return Call(lhs, func.strip(), tuple(args))
    if head == "LABEL":
        return LabelI(rest)
    if head == "GOTO":
        return GotoI(rest)
    if head == "IF":
        cond_text, _, label = rest.rpartition(" GOTO ")
        return IfI(_parse_line_expr(cond_text.strip()), label.strip())
    if head == "SKIP":
        return Skip()
    if head == "RETURN":
        return ReturnI(_parse_line_expr(rest) if rest else None)
    if head == "THROW":
        return ThrowI(_parse_line_expr(rest))
    if head == "ASSERT":
        body, _, tail = rest.rpartition(" CLASS ")
        msg = ""
        cls_text = tail
        if ' MSG "' in tail:
            cls_text, _, msg = tail.partition(' MSG "')
            msg = msg.rstrip('"')
        return AssertI(_parse_line_expr(body.strip()), PropertyClass(cls_text.strip()), msg)
    if head == "ASSUME":
        return AssumeI(_parse_line_expr(rest))
    if head == "END_FUNCTION":
        return EndFunction()
    raise GotoReadError(f"unknown instruction {head!r}")


def _resolve_symbol_types(program: GotoProgram) -> None:
    """Second pass: give parsed bare symbols their declared types."""
    for fn in program.functions.values():
        env = program.symbol_env(fn)

        def fix(e: Expr) -> Expr:
            if isinstance(e, Symbol):
                t = env.get(e.name)
                if t is None:
                    raise GotoReadError(f"undeclared symbol {e.name} in {fn.name}")
                return Symbol(e.name, t)
            if isinstance(e, Unary):
                return Unary(e.op, fix(e.a))
            if isinstance(e, Binary):
                return Binary(e.op, fix(e.a), fix(e.b))
            if isinstance(e, Member):
                return Member(fix(e.base), e.class_name, e.field_name, e.field_type)
            if isinstance(e, Index):
                return Index(fix(e.base), fix(e.index))
            if isinstance(e, NewArray):
                return NewArray(e.elem, fix(e.length))
            if isinstance(e, Length):
                return Length(fix(e.base))
            if isinstance(e, Cast):
                return Cast(fix(e.value), e.to)
            if isinstance(e, CmpExpr):
                return CmpExpr(e.kind, fix(e.a), fix(e.b))
            if isinstance(e, OverflowGuard):
                return OverflowGuard(e.op, fix(e.a), fix(e.b))
            return e

        for ins in fn.body:
            if isinstance(ins, Assign):
                ins.target = fix(ins.target)
                ins.value = fix(ins.value)
            elif isinstance(ins, Call):
                if ins.lhs is not None:
                    ins.lhs = fix(ins.lhs)
                ins.args = tuple(fix(a) for a in ins.args)
            elif isinstance(ins, IfI):
                ins.cond = fix(ins.cond)
            elif isinstance(ins, (AssertI, AssumeI)):
                ins.cond = fix(ins.cond)
            elif isinstance(ins, (ReturnI, ThrowI)) and ins.value is not None:
                ins.value = fix(ins.value)
