"""Recursive-descent parser for textual Jimple (Soot 4.x output form).

The accepted statement subset is: declarations, identity statements,
assignments, labels, goto, if-goto, invokes (virtual/special/static),
return, throw, breakpoint/nop.  Switches, monitors, exception ranges and
``@caughtexception`` are rejected with an "unsupported construct"
diagnostic rather than silently skipped.
"""

from __future__ import annotations

from ..source import SourcePos
from .ast import (
    ArrJType,
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
    JimpleField,
    JimpleMethod,
    JimpleStmt,
    JimpleType,
    LabelStmt,
    Local,
    MethodSig,
    NewArrayExpr,
    NewExpr,
    NullConst,
    PRIMITIVES,
    RefJType,
    ReturnStmt,
    StringConst,
    ThrowStmt,
    UnopExpr,
    UNSUPPORTED_PRIMITIVES,
    Value,
)
from .lexer import Token, lex

MODIFIERS = {
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "enum",
    "annotation",
}

_REL_OPS = {"==", "!=", "<", "<=", ">", ">="}
_BIN_PUNCT = {"+", "-", "*", "/", "%", "<<", ">>", ">>>", "&", "|", "^"} | _REL_OPS
_UNSUPPORTED_STMT_KEYWORDS = {
    "tableswitch",
    "lookupswitch",
    "entermonitor",
    "exitmonitor",
    "interfaceinvoke",
    "dynamicinvoke",
    "catch",
}


class JimpleParseError(Exception):
    def __init__(self, message: str, pos: SourcePos, expected: tuple[str, ...] = ()):
        detail = f"{pos}: {message}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)
        self.pos = pos
        self.expected = expected


class UnsupportedConstructError(JimpleParseError):
    def __init__(self, construct: str, pos: SourcePos):
        super().__init__(f"unsupported construct: {construct}", pos)
        self.construct = construct


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, off: int = 0) -> Token:
        j = min(self.i + off, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind in ("PUNCT", "KEYWORD"):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise JimpleParseError(f"got {tok.text!r}", tok.pos, (text,))
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise JimpleParseError(f"got {tok.text!r}", tok.pos, (what,))
        return tok

    # -- types --------------------------------------------------------------

    def parse_type(self) -> JimpleType:
        tok = self.next()
        if tok.kind == "KEYWORD" and tok.text in PRIMITIVES:
            base: JimpleType = PRIMITIVES[tok.text]
        elif tok.kind == "KEYWORD" and tok.text in UNSUPPORTED_PRIMITIVES:
            raise UnsupportedConstructError(f"{tok.text} type", tok.pos)
        elif tok.kind == "IDENT":
            base = RefJType(tok.text)
        else:
            raise JimpleParseError(f"got {tok.text!r}", tok.pos, ("type",))
        while self.peek().text == "[" and self.peek(1).text == "]":
            self.next()
            self.next()
            base = ArrJType(base)
        return base

    def _looks_like_type(self, off: int = 0) -> bool:
        tok = self.peek(off)
        if tok.kind == "KEYWORD" and (tok.text in PRIMITIVES or tok.text in UNSUPPORTED_PRIMITIVES):
            return True
        if tok.kind == "IDENT":
            nxt = self.peek(off + 1)
            if nxt.kind == "IDENT":
                return True
            if nxt.text == "[" and self.peek(off + 2).text == "]":
                return True
        return False

    # -- class level ---------------------------------------------------------

    def parse_class(self) -> JimpleClass:
        self._skip_modifiers()
        kw = self.next()
        if not kw.is_keyword("class", "interface"):
            raise JimpleParseError(f"got {kw.text!r}", kw.pos, ("class", "interface"))
        if kw.text == "interface":
            raise UnsupportedConstructError("interface declaration", kw.pos)
        name = self.expect_kind("IDENT", "class name")
        superclass = None
        interfaces: list[str] = []
        if self.accept("extends"):
            superclass = self.expect_kind("IDENT", "superclass name").text
        if self.accept("implements"):
            interfaces.append(self.expect_kind("IDENT", "interface name").text)
            while self.accept(","):
                interfaces.append(self.expect_kind("IDENT", "interface name").text)
        self.expect("{")
        cls = JimpleClass(name.text, superclass, interfaces=tuple(interfaces), pos=name.pos)
        while not self.accept("}"):
            self._parse_member(cls)
        tail = self.peek()
        if tail.kind != "EOF":
            raise JimpleParseError(f"trailing input after class: {tail.text!r}", tail.pos)
        _check_class_invariants(cls)
        return cls

    def _skip_modifiers(self) -> set[str]:
        mods: set[str] = set()
        while self.peek().kind == "KEYWORD" and self.peek().text in MODIFIERS:
            mods.add(self.next().text)
        return mods

    def _parse_member(self, cls: JimpleClass) -> None:
        mods = self._skip_modifiers()
        t = self.parse_type()
        name = self.next()
        if name.kind != "IDENT":
            raise JimpleParseError(f"got {name.text!r}", name.pos, ("member name",))
        if self.accept("("):
            params: list[JimpleType] = []
            if not self.accept(")"):
                params.append(self.parse_type())
                while self.accept(","):
                    params.append(self.parse_type())
                self.expect(")")
            if self.accept("throws"):
                self.expect_kind("IDENT", "exception class")
                while self.accept(","):
                    self.expect_kind("IDENT", "exception class")
            method = JimpleMethod(
                name.text, t, tuple(params), static="static" in mods, pos=name.pos
            )
            if self.accept(";"):
                method.has_body = False
            else:
                self.expect("{")
                self._parse_body(method)
            cls.methods.append(method)
        else:
            self.expect(";")
            cls.fields.append(JimpleField(name.text, t, static="static" in mods, pos=name.pos))

    # -- method bodies -------------------------------------------------------

    def _parse_body(self, method: JimpleMethod) -> None:
        while not self.accept("}"):
            tok = self.peek()
            if tok.kind == "EOF":
                raise JimpleParseError("unterminated method body", tok.pos, ("}",))
            if self._looks_like_type() and not self._at_label():
                t = self.parse_type()
                names = [self.expect_kind("IDENT", "local name")]
                while self.accept(","):
                    names.append(self.expect_kind("IDENT", "local name"))
                self.expect(";")
                for n in names:
                    method.locals.append((n.text, t))
                    method.body.append(DeclStmt(n.text, t, pos=n.pos))
            else:
                method.body.append(self._parse_stmt())
        _check_method_invariants(method)

    def _at_label(self) -> bool:
        return self.peek().kind == "IDENT" and self.peek(1).text == ":"

    def _parse_stmt(self) -> JimpleStmt:
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.text in _UNSUPPORTED_STMT_KEYWORDS:
            raise UnsupportedConstructError(tok.text, tok.pos)
        if tok.is_keyword("if"):
            self.next()
            a = self._parse_imm()
            op = self.next()
            if op.text not in _REL_OPS:
                raise JimpleParseError(f"got {op.text!r}", op.pos, tuple(sorted(_REL_OPS)))
            b = self._parse_imm()
            self.expect("goto")
            label = self.expect_kind("IDENT", "label")
            self.expect(";")
            return IfStmt(BinopExpr(op.text, a, b), label.text, pos=tok.pos)
        if tok.is_keyword("goto"):
            self.next()
            label = self.expect_kind("IDENT", "label")
            self.expect(";")
            return GotoStmt(label.text, pos=tok.pos)
        if tok.is_keyword("return"):
            self.next()
            if self.accept(";"):
                return ReturnStmt(None, pos=tok.pos)
            v = self._parse_imm()
            self.expect(";")
            return ReturnStmt(v, pos=tok.pos)
        if tok.is_keyword("throw"):
            self.next()
            v = self._parse_imm()
            self.expect(";")
            return ThrowStmt(v, pos=tok.pos)
        if tok.is_keyword("breakpoint", "nop"):
            self.next()
            self.expect(";")
            return BreakpointStmt(pos=tok.pos)
        if tok.is_keyword("virtualinvoke", "specialinvoke", "staticinvoke"):
            inv = self._parse_invoke()
            self.expect(";")
            return InvokeStmt(inv, pos=tok.pos)
        if self._at_label():
            name = self.next()
            self.expect(":")
            return LabelStmt(name.text, pos=name.pos)
        if tok.kind == "IDENT" and self.peek(1).text == ":=":
            name = self.next()
            self.next()  # :=
            src = self.next()
            if src.kind != "AT_IDENT":
                raise JimpleParseError(f"got {src.text!r}", src.pos, ("@this", "@parameterN"))
            if src.text == "@caughtexception":
                raise UnsupportedConstructError("@caughtexception", src.pos)
            self.expect(":")
            t = self.parse_type()
            self.expect(";")
            return IdentityStmt(name.text, src.text, t, pos=name.pos)
        # Assignment: local / array element / field / static field target.
        lhs = self._parse_place()
        eq = self.expect("=")
        rhs = self._parse_rhs()
        self.expect(";")
        return AssignStmt(lhs, rhs, pos=eq.pos)

    def _parse_place(self):
        tok = self.peek()
        if tok.text == "<":
            return self._parse_field_sig(None)
        name = self.expect_kind("IDENT", "local name")
        if self.accept("["):
            idx = self._parse_imm()
            self.expect("]")
            return ArrayRef(Local(name.text), idx)
        if self.peek().text == "." and self.peek(1).text == "<":
            self.next()
            return self._parse_field_sig(Local(name.text))
        return Local(name.text)

    def _parse_field_sig(self, base):
        self.expect("<")
        cls = self.expect_kind("IDENT", "class name")
        self.expect(":")
        t = self.parse_type()
        fname = self.expect_kind("IDENT", "field name")
        self.expect(">")
        return FieldRef(base, cls.text, t, fname.text)

    def _parse_method_sig(self) -> MethodSig:
        self.expect("<")
        cls = self.expect_kind("IDENT", "class name")
        self.expect(":")
        ret = self.parse_type()
        mname = self.next()
        if mname.kind not in ("IDENT", "KEYWORD"):
            raise JimpleParseError(f"got {mname.text!r}", mname.pos, ("method name",))
        self.expect("(")
        params: list[JimpleType] = []
        if not self.accept(")"):
            params.append(self.parse_type())
            while self.accept(","):
                params.append(self.parse_type())
            self.expect(")")
        self.expect(">")
        return MethodSig(cls.text, ret, mname.text, tuple(params))

    def _parse_invoke(self) -> InvokeExpr:
        kind = self.next().text
        base = None
        if kind in ("virtualinvoke", "specialinvoke"):
            base = Local(self.expect_kind("IDENT", "receiver local").text)
            self.expect(".")
        sig = self._parse_method_sig()
        self.expect("(")
        args: list[Value] = []
        if not self.accept(")"):
            args.append(self._parse_imm())
            while self.accept(","):
                args.append(self._parse_imm())
            self.expect(")")
        return InvokeExpr(kind, base, sig, tuple(args))

    def _parse_imm(self) -> Value:
        tok = self.peek()
        if tok.kind == "NUM":
            self.next()
            text = tok.text
            long = text[-1] in "Ll"
            return IntConst(int(text.rstrip("Ll")), long=long)
        if tok.text == "-" and self.peek(1).kind == "NUM":
            self.next()
            num = self.next()
            return IntConst(-int(num.text.rstrip("Ll")), long=num.text[-1] in "Ll")
        if tok.is_keyword("null"):
            self.next()
            return NullConst()
        if tok.kind == "STRING":
            self.next()
            return StringConst(tok.text)
        if tok.kind == "IDENT":
            self.next()
            return Local(tok.text)
        raise JimpleParseError(f"got {tok.text!r}", tok.pos, ("immediate value",))

    def _parse_rhs(self) -> Value:
        tok = self.peek()
        if tok.is_keyword("new"):
            self.next()
            name = self.expect_kind("IDENT", "class name")
            return NewExpr(name.text)
        if tok.is_keyword("newarray"):
            self.next()
            self.expect("(")
            t = self.parse_type()
            self.expect(")")
            self.expect("[")
            size = self._parse_imm()
            self.expect("]")
            return NewArrayExpr(t, size)
        if tok.is_keyword("lengthof"):
            self.next()
            return UnopExpr("lengthof", self._parse_imm())
        if tok.is_keyword("neg"):
            self.next()
            return UnopExpr("neg", self._parse_imm())
        if tok.is_keyword("instanceof"):
            raise UnsupportedConstructError("instanceof", tok.pos)
        if tok.is_keyword("virtualinvoke", "specialinvoke", "staticinvoke"):
            return self._parse_invoke()
        if tok.text == "(":
            self.next()
            t = self.parse_type()
            self.expect(")")
            return CastExpr(t, self._parse_imm())
        if tok.text == "<":
            return self._parse_field_sig(None)
        if tok.kind == "IDENT" and self.peek(1).text == "." and self.peek(2).text == "<":
            name = self.next()
            self.next()
            return self._parse_field_sig(Local(name.text))
        if tok.kind == "IDENT" and self.peek(1).text == "[":
            name = self.next()
            self.next()
            idx = self._parse_imm()
            self.expect("]")
            return ArrayRef(Local(name.text), idx)
        a = self._parse_imm()
        nxt = self.peek()
        if nxt.text in _BIN_PUNCT or nxt.is_keyword("cmp", "cmpl", "cmpg"):
            op = self.next().text
            b = self._parse_imm()
            return BinopExpr(op, a, b)
        return a


# ---------------------------------------------------------------------------
# Post-parse invariant checks


def _check_class_invariants(cls: JimpleClass) -> None:
    seen_fields: set[str] = set()
    for f in cls.fields:
        if f.name in seen_fields:
            raise JimpleParseError(f"duplicate field {f.name} in {cls.name}", f.pos)
        seen_fields.add(f.name)
    seen_sigs: set[tuple] = set()
    for m in cls.methods:
        key = m.signature_key()
        if key in seen_sigs:
            raise JimpleParseError(
                f"duplicate method {m.name}({len(m.params)} params) in {cls.name}", m.pos
            )
        seen_sigs.add(key)


def _collect_locals_used(v, out: set[str]) -> None:
    if isinstance(v, Local):
        out.add(v.name)
    elif isinstance(v, BinopExpr):
        _collect_locals_used(v.a, out)
        _collect_locals_used(v.b, out)
    elif isinstance(v, UnopExpr):
        _collect_locals_used(v.a, out)
    elif isinstance(v, CastExpr):
        _collect_locals_used(v.value, out)
    elif isinstance(v, ArrayRef):
        out.add(v.base.name)
        _collect_locals_used(v.index, out)
    elif isinstance(v, FieldRef):
        if v.base is not None:
            out.add(v.base.name)
    elif isinstance(v, NewArrayExpr):
        _collect_locals_used(v.size, out)
    elif isinstance(v, InvokeExpr):
        if v.base is not None:
            out.add(v.base.name)
        for a in v.args:
            _collect_locals_used(a, out)


def _check_method_invariants(method: JimpleMethod) -> None:
    if not method.has_body:
        return
    declared = {name for name, _ in method.locals}
    labels: dict[str, SourcePos] = {}
    used_labels: list[tuple[str, SourcePos]] = []
    used_locals: set[str] = set()
    identity_done = False
    for stmt in method.body:
        if isinstance(stmt, LabelStmt):
            if stmt.name in labels:
                raise JimpleParseError(f"duplicate label {stmt.name}", stmt.pos)
            labels[stmt.name] = stmt.pos
        elif isinstance(stmt, (GotoStmt, IfStmt)):
            used_labels.append((stmt.label, stmt.pos))
        if isinstance(stmt, IdentityStmt):
            if identity_done:
                raise JimpleParseError(
                    "identity statements must form a contiguous prefix", stmt.pos
                )
            if stmt.local not in declared:
                raise JimpleParseError(f"identity target {stmt.local} not declared", stmt.pos)
            n = stmt.source
            if n.startswith("@parameter"):
                idx = int(n[len("@parameter") :])
                if idx >= len(method.params):
                    raise JimpleParseError(f"{n} out of range", stmt.pos)
        elif not isinstance(stmt, (DeclStmt, LabelStmt)):
            identity_done = True
        if isinstance(stmt, AssignStmt):
            _collect_locals_used(stmt.lhs, used_locals)
            _collect_locals_used(stmt.rhs, used_locals)
        elif isinstance(stmt, IfStmt):
            _collect_locals_used(stmt.cond, used_locals)
        elif isinstance(stmt, (ReturnStmt, ThrowStmt)):
            if getattr(stmt, "value", None) is not None:
                _collect_locals_used(stmt.value, used_locals)
        elif isinstance(stmt, InvokeStmt):
            _collect_locals_used(stmt.invoke, used_locals)
    for label, pos in used_labels:
        if label not in labels:
            raise JimpleParseError(f"undefined label {label}", pos)
    undeclared = used_locals - declared
    if undeclared:
        raise JimpleParseError(
            f"undeclared identifiers in {method.name}: {', '.join(sorted(undeclared))}",
            method.pos,
        )


# ---------------------------------------------------------------------------
# Entry points


def parse_class(text: str, filename: str = "<input>") -> JimpleClass:
    return Parser(lex(text, filename)).parse_class()
