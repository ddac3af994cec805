"""Solver-facing term language: fixed-width bit-vectors, booleans, arrays.

Verification conditions are built from these terms and either emitted as
SMT-LIB2 text or evaluated directly (brute-force oracle, model checking).
Evaluation follows SMT-LIB semantics exactly; in particular division and
remainder by zero are total functions, and shift counts are unsigned and
unmasked.  Callers that want JVM shift masking must mask explicitly.

Bit-vector values are canonically unsigned ints in [0, 2^w).  Helpers
``to_signed``/``to_unsigned`` convert at the edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


# ---------------------------------------------------------------------------
# Sorts


@dataclass(frozen=True)
class BvSort:
    width: int

    def __repr__(self) -> str:
        return f"bv{self.width}"


@dataclass(frozen=True)
class BoolSort:
    def __repr__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class ArraySort:
    """Functional array from bit-vectors to bit-vectors (QF_ABV)."""

    index: BvSort
    elem: BvSort

    def __repr__(self) -> str:
        return f"array({self.index}->{self.elem})"


Sort = Union[BvSort, BoolSort, ArraySort]

BOOL = BoolSort()
BV8 = BvSort(8)
BV16 = BvSort(16)
BV32 = BvSort(32)
BV64 = BvSort(64)


class SortError(Exception):
    """Operator applied to operands of inconsistent sorts."""


def to_signed(value: int, width: int) -> int:
    value &= (1 << width) - 1
    if value >= 1 << (width - 1):
        value -= 1 << width
    return value


def to_unsigned(value: int, width: int) -> int:
    return value & ((1 << width) - 1)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    sort: Sort


@dataclass(frozen=True)
class Const(Term):
    value: int  # unsigned canonical for bv; 0/1 for bool


@dataclass(frozen=True)
class Sym(Term):
    name: str


@dataclass(frozen=True)
class BvOp(Term):
    """Binary bit-vector operation; both operands share the result sort."""

    op: str  # add sub mul sdiv srem and or xor shl lshr ashr
    a: Term
    b: Term


@dataclass(frozen=True)
class BvNeg(Term):
    a: Term


@dataclass(frozen=True)
class Cmp(Term):
    """Signed bit-vector comparison producing bool."""

    op: str  # slt sle sgt sge
    a: Term
    b: Term


@dataclass(frozen=True)
class Eq(Term):
    a: Term
    b: Term


@dataclass(frozen=True)
class Not(Term):
    a: Term


@dataclass(frozen=True)
class BoolOp(Term):
    op: str  # and or
    a: Term
    b: Term


@dataclass(frozen=True)
class Ite(Term):
    cond: Term
    then: Term
    orelse: Term


@dataclass(frozen=True)
class SignExt(Term):
    extra: int
    a: Term


@dataclass(frozen=True)
class ZeroExt(Term):
    extra: int
    a: Term


@dataclass(frozen=True)
class Extract(Term):
    hi: int
    lo: int
    a: Term


@dataclass(frozen=True)
class Concat(Term):
    a: Term  # high bits
    b: Term  # low bits


@dataclass(frozen=True)
class Select(Term):
    array: Term
    index: Term


@dataclass(frozen=True)
class Store(Term):
    array: Term
    index: Term
    value: Term


@dataclass(frozen=True)
class OverflowPred(Term):
    """True iff ``a op b`` over signed w-bit operands leaves [-2^(w-1), 2^(w-1)-1].

    Truth is defined by exact wide recomputation; the SMT-LIB emitter expands
    it into extended-width arithmetic, the evaluator recomputes in unbounded
    integers.  Covers both overflow and underflow directions.
    """

    op: str  # add sub mul
    a: Term
    b: Term


# ---------------------------------------------------------------------------
# Smart constructors (fold constants, enforce sorts)

TRUE = Const(BOOL, 1)
FALSE = Const(BOOL, 0)


def bv_const(value: int, width: int) -> Const:
    return Const(BvSort(width), to_unsigned(value, width))


def bool_const(value: bool) -> Const:
    return TRUE if value else FALSE


def _require_bv(t: Term, what: str) -> BvSort:
    if not isinstance(t.sort, BvSort):
        raise SortError(f"{what}: expected bit-vector, got {t.sort}")
    return t.sort


def _require_same_bv(a: Term, b: Term, what: str) -> BvSort:
    sa = _require_bv(a, what)
    sb = _require_bv(b, what)
    if sa != sb:
        raise SortError(f"{what}: width mismatch {sa} vs {sb}")
    return sa


def _require_bool(t: Term, what: str) -> None:
    if not isinstance(t.sort, BoolSort):
        raise SortError(f"{what}: expected bool, got {t.sort}")


def bvop(op: str, a: Term, b: Term) -> Term:
    sort = _require_same_bv(a, b, f"bv{op}")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(sort, _eval_bvop(op, a.value, b.value, sort.width))
    return BvOp(sort, op, a, b)


def bvneg(a: Term) -> Term:
    sort = _require_bv(a, "bvneg")
    if isinstance(a, Const):
        return Const(sort, to_unsigned(-a.value, sort.width))
    return BvNeg(sort, a)


def cmp(op: str, a: Term, b: Term) -> Term:
    sort = _require_same_bv(a, b, f"bv{op}")
    if isinstance(a, Const) and isinstance(b, Const):
        return bool_const(_eval_cmp(op, a.value, b.value, sort.width))
    return Cmp(BOOL, op, a, b)


def eq(a: Term, b: Term) -> Term:
    if a.sort != b.sort:
        raise SortError(f"=: sort mismatch {a.sort} vs {b.sort}")
    if isinstance(a, Const) and isinstance(b, Const):
        return bool_const(a.value == b.value)
    if a == b:
        return TRUE
    return Eq(BOOL, a, b)


def ne(a: Term, b: Term) -> Term:
    return not_(eq(a, b))


def not_(a: Term) -> Term:
    _require_bool(a, "not")
    if isinstance(a, Const):
        return bool_const(not a.value)
    if isinstance(a, Not):
        return a.a
    return Not(BOOL, a)


def and_(a: Term, b: Term) -> Term:
    _require_bool(a, "and")
    _require_bool(b, "and")
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if a == FALSE or b == FALSE:
        return FALSE
    return BoolOp(BOOL, "and", a, b)


def or_(a: Term, b: Term) -> Term:
    _require_bool(a, "or")
    _require_bool(b, "or")
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    if a == TRUE or b == TRUE:
        return TRUE
    return BoolOp(BOOL, "or", a, b)


def conj(terms: list[Term]) -> Term:
    out: Term = TRUE
    for t in terms:
        out = and_(out, t)
    return out


def disj(terms: list[Term]) -> Term:
    out: Term = FALSE
    for t in terms:
        out = or_(out, t)
    return out


def ite(cond: Term, then: Term, orelse: Term) -> Term:
    _require_bool(cond, "ite")
    if then.sort != orelse.sort:
        raise SortError(f"ite: branch sorts differ {then.sort} vs {orelse.sort}")
    if cond == TRUE:
        return then
    if cond == FALSE:
        return orelse
    if then == orelse:
        return then
    return Ite(then.sort, cond, then, orelse)


def sign_ext(extra: int, a: Term) -> Term:
    sort = _require_bv(a, "sign_extend")
    if extra == 0:
        return a
    new = BvSort(sort.width + extra)
    if isinstance(a, Const):
        return Const(new, to_unsigned(to_signed(a.value, sort.width), new.width))
    return SignExt(new, extra, a)


def zero_ext(extra: int, a: Term) -> Term:
    sort = _require_bv(a, "zero_extend")
    if extra == 0:
        return a
    new = BvSort(sort.width + extra)
    if isinstance(a, Const):
        return Const(new, a.value)
    return ZeroExt(new, extra, a)


def extract(hi: int, lo: int, a: Term) -> Term:
    sort = _require_bv(a, "extract")
    if not (0 <= lo <= hi < sort.width):
        raise SortError(f"extract [{hi}:{lo}] out of range for {sort}")
    new = BvSort(hi - lo + 1)
    if hi == sort.width - 1 and lo == 0:
        return a
    if isinstance(a, Const):
        return Const(new, (a.value >> lo) & ((1 << new.width) - 1))
    return Extract(new, hi, lo, a)


def concat(a: Term, b: Term) -> Term:
    sa = _require_bv(a, "concat")
    sb = _require_bv(b, "concat")
    new = BvSort(sa.width + sb.width)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(new, (a.value << sb.width) | b.value)
    return Concat(new, a, b)


def select(array: Term, index: Term) -> Term:
    if not isinstance(array.sort, ArraySort):
        raise SortError(f"select: not an array: {array.sort}")
    if array.sort.index != index.sort:
        raise SortError(f"select: index sort {index.sort} != {array.sort.index}")
    # Read-over-write with constant keys resolves without the solver.
    cur = array
    while isinstance(cur, Store) and isinstance(index, Const):
        if isinstance(cur.index, Const):
            if cur.index.value == index.value:
                return cur.value
            cur = cur.array
        else:
            break
    return Select(array.sort.elem, array if cur is array else cur, index)


def store(array: Term, index: Term, value: Term) -> Term:
    if not isinstance(array.sort, ArraySort):
        raise SortError(f"store: not an array: {array.sort}")
    if array.sort.index != index.sort or array.sort.elem != value.sort:
        raise SortError("store: index/element sort mismatch")
    return Store(array.sort, array, index, value)


def overflow(op: str, a: Term, b: Term) -> Term:
    if op not in ("add", "sub", "mul"):
        raise SortError(f"overflow: unsupported op {op}")
    sort = _require_same_bv(a, b, "overflow")
    if isinstance(a, Const) and isinstance(b, Const):
        return bool_const(
            _overflows(op, to_signed(a.value, sort.width), to_signed(b.value, sort.width), sort.width)
        )
    return OverflowPred(BOOL, op, a, b)


# ---------------------------------------------------------------------------
# Concrete semantics


def _overflows(op: str, sa: int, sb: int, width: int) -> bool:
    wide = {"add": sa + sb, "sub": sa - sb, "mul": sa * sb}[op]
    return not (-(1 << (width - 1)) <= wide <= (1 << (width - 1)) - 1)


def _eval_bvop(op: str, ua: int, ub: int, w: int) -> int:
    mask = (1 << w) - 1
    if op == "add":
        return (ua + ub) & mask
    if op == "sub":
        return (ua - ub) & mask
    if op == "mul":
        return (ua * ub) & mask
    if op == "and":
        return ua & ub
    if op == "or":
        return ua | ub
    if op == "xor":
        return ua ^ ub
    if op == "shl":
        return (ua << ub) & mask if ub < w else 0
    if op == "lshr":
        return ua >> ub if ub < w else 0
    if op == "ashr":
        sa = to_signed(ua, w)
        return to_unsigned(sa >> min(ub, w - 1), w)
    if op == "sdiv":
        # SMT-LIB bvsdiv, total: x/0 is -1 for x >= 0 else +1; MIN/-1 wraps.
        sa, sb = to_signed(ua, w), to_signed(ub, w)
        if sb == 0:
            return to_unsigned(-1 if sa >= 0 else 1, w)
        q = abs(sa) // abs(sb)
        if (sa < 0) != (sb < 0):
            q = -q
        return to_unsigned(q, w)
    if op == "srem":
        # Sign follows the dividend; x % 0 is x.
        sa, sb = to_signed(ua, w), to_signed(ub, w)
        if sb == 0:
            return to_unsigned(sa, w)
        r = abs(sa) % abs(sb)
        if sa < 0:
            r = -r
        return to_unsigned(r, w)
    raise SortError(f"unknown bv op {op}")


def _eval_cmp(op: str, ua: int, ub: int, w: int) -> bool:
    sa, sb = to_signed(ua, w), to_signed(ub, w)
    if op == "slt":
        return sa < sb
    if op == "sle":
        return sa <= sb
    if op == "sgt":
        return sa > sb
    if op == "sge":
        return sa >= sb
    raise SortError(f"unknown comparison {op}")


@dataclass(frozen=True)
class ArrayVal:
    """Concrete array value: a default plus finitely many overrides."""

    default: int
    entries: tuple[tuple[int, int], ...] = ()

    def get(self, index: int) -> int:
        for k, v in reversed(self.entries):
            if k == index:
                return v
        return self.default

    def set(self, index: int, value: int) -> "ArrayVal":
        return ArrayVal(self.default, self.entries + ((index, value),))


Value = Union[int, ArrayVal]


def eval_term(t: Term, env: dict[str, Value]) -> Value:
    """Evaluate a term under a total valuation of its free symbols."""
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Sym):
        if t.name not in env:
            raise KeyError(f"unbound symbol {t.name}")
        return env[t.name]
    if isinstance(t, BvOp):
        return _eval_bvop(t.op, eval_term(t.a, env), eval_term(t.b, env), t.sort.width)
    if isinstance(t, BvNeg):
        return to_unsigned(-eval_term(t.a, env), t.sort.width)
    if isinstance(t, Cmp):
        w = t.a.sort.width
        return int(_eval_cmp(t.op, eval_term(t.a, env), eval_term(t.b, env), w))
    if isinstance(t, Eq):
        va, vb = eval_term(t.a, env), eval_term(t.b, env)
        if isinstance(va, ArrayVal) or isinstance(vb, ArrayVal):
            raise SortError("array equality not supported")
        return int(va == vb)
    if isinstance(t, Not):
        return 1 - eval_term(t.a, env)
    if isinstance(t, BoolOp):
        va = eval_term(t.a, env)
        if t.op == "and":
            return eval_term(t.b, env) if va else 0
        return 1 if va else eval_term(t.b, env)
    if isinstance(t, Ite):
        return eval_term(t.then if eval_term(t.cond, env) else t.orelse, env)
    if isinstance(t, SignExt):
        inner = t.a.sort.width
        return to_unsigned(to_signed(eval_term(t.a, env), inner), t.sort.width)
    if isinstance(t, ZeroExt):
        return eval_term(t.a, env)
    if isinstance(t, Extract):
        return (eval_term(t.a, env) >> t.lo) & ((1 << t.sort.width) - 1)
    if isinstance(t, Concat):
        return (eval_term(t.a, env) << t.b.sort.width) | eval_term(t.b, env)
    if isinstance(t, Select):
        arr = eval_term(t.array, env)
        if not isinstance(arr, ArrayVal):
            raise SortError("select on non-array value")
        return arr.get(eval_term(t.index, env))
    if isinstance(t, Store):
        arr = eval_term(t.array, env)
        if not isinstance(arr, ArrayVal):
            raise SortError("store on non-array value")
        return arr.set(eval_term(t.index, env), eval_term(t.value, env))
    if isinstance(t, OverflowPred):
        w = t.a.sort.width
        sa = to_signed(eval_term(t.a, env), w)
        sb = to_signed(eval_term(t.b, env), w)
        return int(_overflows(t.op, sa, sb, w))
    raise SortError(f"cannot evaluate {type(t).__name__}")


def free_symbols(t: Term, acc: dict[str, Sort] | None = None) -> dict[str, Sort]:
    """All symbols occurring in ``t`` with their sorts, in first-seen order."""
    if acc is None:
        acc = {}
    if isinstance(t, Sym):
        if t.name in acc and acc[t.name] != t.sort:
            raise SortError(f"symbol {t.name} used at two sorts")
        acc.setdefault(t.name, t.sort)
        return acc
    for f in t.__dataclass_fields__:
        v = getattr(t, f)
        if isinstance(v, Term):
            free_symbols(v, acc)
    return acc
