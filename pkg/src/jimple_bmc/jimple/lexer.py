"""Lexer for textual Jimple.

Quirks handled here rather than in the parser:

- dotted qualified names (``java.lang.Object``) lex as one identifier, but
  the dot in ``r0.<Foo: int member>`` stays a separate token because the
  character after it cannot start an identifier;
- constructor and class-initializer names ``<init>``/``<clinit>`` lex as
  identifiers even though they start with ``<``;
- Soot quotes exotic identifiers with single ticks (``'label'``).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..source import SourcePos


class JimpleLexError(Exception):
    def __init__(self, message: str, pos: SourcePos):
        super().__init__(f"{pos}: {message}")
        self.pos = pos


KEYWORDS = {
    "class",
    "interface",
    "enum",
    "annotation",
    "extends",
    "implements",
    "throws",
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
    "void",
    "int",
    "boolean",
    "byte",
    "short",
    "long",
    "char",
    "float",
    "double",
    "if",
    "goto",
    "return",
    "throw",
    "breakpoint",
    "nop",
    "new",
    "newarray",
    "lengthof",
    "neg",
    "cmp",
    "cmpl",
    "cmpg",
    "instanceof",
    "virtualinvoke",
    "specialinvoke",
    "staticinvoke",
    "interfaceinvoke",
    "dynamicinvoke",
    "tableswitch",
    "lookupswitch",
    "entermonitor",
    "exitmonitor",
    "catch",
    "case",
    "default",
    "from",
    "to",
    "with",
    "null",
}

# kinds: KEYWORD IDENT AT_IDENT NUM STRING PUNCT EOF


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: SourcePos

    def is_keyword(self, *names: str) -> bool:
        return self.kind == "KEYWORD" and self.text in names


_PUNCT2 = {":=", "==", "!=", "<=", ">=", "<<", ">>"}
_PUNCT3 = {">>>"}
_PUNCT1 = set("{}()[];:,.=<>+-*/%&|^!@'\"")


def _ident_start(c: str) -> bool:
    return c.isalpha() or c in "_$"


def _ident_char(c: str) -> bool:
    return c.isalnum() or c in "_$"


class Lexer:
    def __init__(self, text: str, filename: str = "<input>"):
        self.text = text
        self.filename = filename
        self.i = 0
        self.line = 1
        self.col = 1

    def _pos(self) -> SourcePos:
        return SourcePos(self.filename, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.i < len(self.text) and self.text[self.i] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def _peek(self, off: int = 0) -> str:
        j = self.i + off
        return self.text[j] if j < len(self.text) else ""

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "EOF":
                return out

    def _skip_trivia(self) -> None:
        while self.i < len(self.text):
            c = self._peek()
            if c in " \t\r\n":
                self._advance()
            elif c == "/" and self._peek(1) == "/":
                while self.i < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif c == "/" and self._peek(1) == "*":
                self._advance(2)
                while self.i < len(self.text) and not (
                    self._peek() == "*" and self._peek(1) == "/"
                ):
                    self._advance()
                self._advance(2)
            else:
                return

    def _next(self) -> Token:
        self._skip_trivia()
        pos = self._pos()
        if self.i >= len(self.text):
            return Token("EOF", "", pos)
        c = self._peek()

        if _ident_start(c):
            start = self.i
            while self.i < len(self.text) and _ident_char(self._peek()):
                self._advance()
            # Greedy qualified name: consume `.ident` runs.
            while (
                self._peek() == "."
                and self.i + 1 < len(self.text)
                and _ident_start(self._peek(1))
            ):
                self._advance()
                while self.i < len(self.text) and _ident_char(self._peek()):
                    self._advance()
            text = self.text[start : self.i]
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            return Token(kind, text, pos)

        if c == "@":
            start = self.i
            self._advance()
            while self.i < len(self.text) and _ident_char(self._peek()):
                self._advance()
            return Token("AT_IDENT", self.text[start : self.i], pos)

        if c.isdigit():
            start = self.i
            while self.i < len(self.text) and self._peek().isdigit():
                self._advance()
            if self._peek() in "Ll":
                self._advance()
            if self._peek() == "." or self._peek() in "eEfFdD":
                raise JimpleLexError("floating-point literals are unsupported", pos)
            return Token("NUM", self.text[start : self.i], pos)

        if c == '"':
            self._advance()
            start = self.i
            while self.i < len(self.text) and self._peek() != '"':
                if self._peek() == "\\":
                    self._advance()
                self._advance()
            if self.i >= len(self.text):
                raise JimpleLexError("unterminated string literal", pos)
            text = self.text[start : self.i]
            self._advance()
            return Token("STRING", text, pos)

        if c == "'":
            self._advance()
            start = self.i
            while self.i < len(self.text) and self._peek() != "'":
                self._advance()
            if self.i >= len(self.text):
                raise JimpleLexError("unterminated quoted identifier", pos)
            text = self.text[start : self.i]
            self._advance()
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            return Token(kind, text, pos)

        if c == "<":
            # <init>/<clinit> are method names, not punctuation.
            for special in ("<init>", "<clinit>"):
                if self.text.startswith(special, self.i):
                    self._advance(len(special))
                    return Token("IDENT", special, pos)

        three = self.text[self.i : self.i + 3]
        if three in _PUNCT3:
            self._advance(3)
            return Token("PUNCT", three, pos)
        two = self.text[self.i : self.i + 2]
        if two in _PUNCT2:
            self._advance(2)
            return Token("PUNCT", two, pos)
        if c in _PUNCT1:
            self._advance()
            return Token("PUNCT", c, pos)
        raise JimpleLexError(f"illegal character {c!r}", pos)


def lex(text: str, filename: str = "<input>") -> list[Token]:
    return Lexer(text, filename).tokens()
