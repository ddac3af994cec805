"""Source positions and diagnostics shared by the frontend and the IRs."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourcePos:
    file: str
    line: int  # 1-based
    col: int  # 1-based

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


UNKNOWN_POS = SourcePos("<unknown>", 0, 0)


@dataclass
class Diagnostic:
    message: str
    pos: SourcePos = UNKNOWN_POS
    context: str = ""  # e.g. function name or instruction index

    def __str__(self) -> str:
        where = f"{self.pos} " if self.pos != UNKNOWN_POS else ""
        ctx = f"[{self.context}] " if self.context else ""
        return f"{where}{ctx}{self.message}"
