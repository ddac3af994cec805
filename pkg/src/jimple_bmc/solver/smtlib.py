"""Deterministic SMT-LIB2 emission for formulas over QF_ABV."""

from __future__ import annotations

import re

from .formula import Formula
from .terms import (
    ArraySort,
    BoolOp,
    BoolSort,
    BvNeg,
    BvOp,
    BvSort,
    Cmp,
    Concat,
    Const,
    Eq,
    Extract,
    Ite,
    Not,
    OverflowPred,
    Select,
    SignExt,
    Sort,
    SortError,
    Store,
    Sym,
    Term,
    ZeroExt,
    bv_const,
    bvop,
    cmp,
    or_,
    sign_ext,
)

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/-][A-Za-z0-9~!@$%^&*_+=<>.?/-]*\Z")

_BVOP_NAMES = {
    "add": "bvadd",
    "sub": "bvsub",
    "mul": "bvmul",
    "sdiv": "bvsdiv",
    "srem": "bvsrem",
    "and": "bvand",
    "or": "bvor",
    "xor": "bvxor",
    "shl": "bvshl",
    "lshr": "bvlshr",
    "ashr": "bvashr",
}

_CMP_NAMES = {"slt": "bvslt", "sle": "bvsle", "sgt": "bvsgt", "sge": "bvsge"}


def quote_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name):
        return name
    if "|" in name or "\\" in name:
        raise SortError(f"symbol not representable in SMT-LIB: {name!r}")
    return f"|{name}|"


def sort_sexpr(sort: Sort) -> str:
    if isinstance(sort, BvSort):
        return f"(_ BitVec {sort.width})"
    if isinstance(sort, BoolSort):
        return "Bool"
    if isinstance(sort, ArraySort):
        return f"(Array {sort_sexpr(sort.index)} {sort_sexpr(sort.elem)})"
    raise SortError(f"unknown sort {sort}")


def _expand_overflow(t: OverflowPred) -> Term:
    """Rewrite an overflow predicate into extended-width recomputation.

    add/sub need one extra bit; mul needs a full doubling to hold the exact
    product of two w-bit operands.
    """
    w = t.a.sort.width
    extra = w if t.op == "mul" else 1
    wide = w + extra
    result = bvop(t.op, sign_ext(extra, t.a), sign_ext(extra, t.b))
    hi = bv_const((1 << (w - 1)) - 1, wide)
    lo = bv_const(-(1 << (w - 1)), wide)
    return or_(cmp("sgt", result, hi), cmp("slt", result, lo))


def term_sexpr(t: Term) -> str:
    if isinstance(t, Const):
        if isinstance(t.sort, BoolSort):
            return "true" if t.value else "false"
        return f"(_ bv{t.value} {t.sort.width})"
    if isinstance(t, Sym):
        return quote_symbol(t.name)
    if isinstance(t, BvOp):
        return f"({_BVOP_NAMES[t.op]} {term_sexpr(t.a)} {term_sexpr(t.b)})"
    if isinstance(t, BvNeg):
        return f"(bvneg {term_sexpr(t.a)})"
    if isinstance(t, Cmp):
        return f"({_CMP_NAMES[t.op]} {term_sexpr(t.a)} {term_sexpr(t.b)})"
    if isinstance(t, Eq):
        return f"(= {term_sexpr(t.a)} {term_sexpr(t.b)})"
    if isinstance(t, Not):
        return f"(not {term_sexpr(t.a)})"
    if isinstance(t, BoolOp):
        return f"({t.op} {term_sexpr(t.a)} {term_sexpr(t.b)})"
    if isinstance(t, Ite):
        return f"(ite {term_sexpr(t.cond)} {term_sexpr(t.then)} {term_sexpr(t.orelse)})"
    if isinstance(t, SignExt):
        return f"((_ sign_extend {t.extra}) {term_sexpr(t.a)})"
    if isinstance(t, ZeroExt):
        return f"((_ zero_extend {t.extra}) {term_sexpr(t.a)})"
    if isinstance(t, Extract):
        return f"((_ extract {t.hi} {t.lo}) {term_sexpr(t.a)})"
    if isinstance(t, Concat):
        return f"(concat {term_sexpr(t.a)} {term_sexpr(t.b)})"
    if isinstance(t, Select):
        return f"(select {term_sexpr(t.array)} {term_sexpr(t.index)})"
    if isinstance(t, Store):
        return f"(store {term_sexpr(t.array)} {term_sexpr(t.index)} {term_sexpr(t.value)})"
    if isinstance(t, OverflowPred):
        return term_sexpr(_expand_overflow(t))
    raise SortError(f"cannot emit {type(t).__name__}")


def emit_smtlib2(formula: Formula, timeout_ms: int | None = None, get_model: bool = True) -> str:
    lines = ["(set-option :produce-models true)"]
    if timeout_ms is not None:
        lines.append(f"(set-option :timeout {timeout_ms})")
    lines.append("(set-logic QF_ABV)")
    for name, sort in formula.declarations:
        lines.append(f"(declare-const {quote_symbol(name)} {sort_sexpr(sort)})")
    lines.append(f"(assert {term_sexpr(formula.assertion)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"
