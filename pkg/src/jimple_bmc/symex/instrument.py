"""Safety-property instrumentation over GOTO programs.

Inserts an ASSERT in front of every operation that can fault:

- signed overflow of + - * (covers both overflow and underflow; the
  reported class is refined by the concrete direction later);
- division and remainder by zero;
- array index out of bounds, and non-negative allocation sizes;
- null dereference on member access, array access and lengthof.

User assertions pass through untouched.  Which classes are emitted is
controlled by the enabled-checks set; constant conditions that fold to
true are still emitted and discharged for free during symbolic execution.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..goto import ir as g


@dataclass(frozen=True)
class Checks:
    overflow: bool = False
    bounds: bool = True
    div_by_zero: bool = True
    null_deref: bool = True

    @staticmethod
    def none() -> "Checks":
        return Checks(overflow=False, bounds=False, div_by_zero=False, null_deref=False)


_ARITH = {"+", "-", "*"}


def _null_const() -> g.Constant:
    return g.Constant(None, g.RefType("java.lang.Object"))


def _collect_checks(e: g.Expr, checks: Checks, pos, out: list[g.Instr]) -> None:
    """Post-order walk: guards for inner expressions come first."""
    if isinstance(e, g.Unary):
        _collect_checks(e.a, checks, pos, out)
    elif isinstance(e, g.Binary):
        _collect_checks(e.a, checks, pos, out)
        _collect_checks(e.b, checks, pos, out)
        if e.op in _ARITH and checks.overflow:
            out.append(
                g.AssertI(
                    g.Unary("not", g.OverflowGuard(e.op, e.a, e.b)),
                    g.PropertyClass.OVERFLOW,
                    f"arithmetic overflow on {e.op}",
                    pos=pos,
                )
            )
        elif e.op in ("/", "%") and checks.div_by_zero:
            zero = g.Constant(0, _int_type_of(e.b) or g.INT32)
            out.append(
                g.AssertI(
                    g.Binary("!=", e.b, zero),
                    g.PropertyClass.DIV_BY_ZERO,
                    "division by zero",
                    pos=pos,
                )
            )
    elif isinstance(e, g.CmpExpr):
        _collect_checks(e.a, checks, pos, out)
        _collect_checks(e.b, checks, pos, out)
    elif isinstance(e, g.Cast):
        _collect_checks(e.value, checks, pos, out)
    elif isinstance(e, g.Member):
        _collect_checks(e.base, checks, pos, out)
        if checks.null_deref:
            out.append(
                g.AssertI(
                    g.Binary("!=", e.base, _null_const()),
                    g.PropertyClass.NULL_DEREF,
                    f"null dereference reading {e.class_name}.{e.field_name}",
                    pos=pos,
                )
            )
    elif isinstance(e, g.Length):
        _collect_checks(e.base, checks, pos, out)
        if checks.null_deref:
            out.append(
                g.AssertI(
                    g.Binary("!=", e.base, _null_const()),
                    g.PropertyClass.NULL_DEREF,
                    "null dereference taking array length",
                    pos=pos,
                )
            )
    elif isinstance(e, g.Index):
        _collect_checks(e.base, checks, pos, out)
        _collect_checks(e.index, checks, pos, out)
        if checks.null_deref:
            out.append(
                g.AssertI(
                    g.Binary("!=", e.base, _null_const()),
                    g.PropertyClass.NULL_DEREF,
                    "null dereference indexing array",
                    pos=pos,
                )
            )
        if checks.bounds:
            idx32 = _as_int32(e.index)
            in_range = g.Binary(
                "and",
                g.Binary("<=", _zero_like(e.index), e.index),
                g.Binary("<", idx32, g.Length(e.base)),
            )
            out.append(
                g.AssertI(in_range, g.PropertyClass.BOUNDS, "array index out of bounds", pos=pos)
            )
    elif isinstance(e, g.NewArray):
        _collect_checks(e.length, checks, pos, out)
        if checks.bounds:
            out.append(
                g.AssertI(
                    g.Binary("<=", _zero_like(e.length), e.length),
                    g.PropertyClass.BOUNDS,
                    "negative array size",
                    pos=pos,
                )
            )


def _int_type_of(e: g.Expr) -> g.IntType | None:
    if isinstance(e, (g.Symbol, g.Constant)) and isinstance(
        t := e.type, g.IntType
    ):
        return t
    return None


def _zero_like(e: g.Expr) -> g.Constant:
    t = _int_type_of(e) or g.INT32
    return g.Constant(0, t)


def _as_int32(e: g.Expr) -> g.Expr:
    t = _int_type_of(e)
    if t is not None and t.width != 32:
        return g.Cast(e, g.INT32)
    return e


def instrument_function(fn: g.GotoFunction, checks: Checks) -> g.GotoFunction:
    body: list[g.Instr] = []
    for ins in fn.body:
        guards: list[g.Instr] = []
        if isinstance(ins, g.Assign):
            _collect_checks(ins.value, checks, ins.pos, guards)
            if isinstance(ins.target, (g.Member, g.Index)):
                _collect_checks(ins.target, checks, ins.pos, guards)
        elif isinstance(ins, g.Call):
            for a in ins.args:
                _collect_checks(a, checks, ins.pos, guards)
        elif isinstance(ins, (g.IfI, g.AssumeI)):
            _collect_checks(ins.cond, checks, ins.pos, guards)
        elif isinstance(ins, g.ReturnI) and ins.value is not None:
            _collect_checks(ins.value, checks, ins.pos, guards)
        body.extend(guards)
        body.append(ins)
    return g.GotoFunction(
        name=fn.name,
        body=body,
        param_globals=fn.param_globals,
        is_virtual=fn.is_virtual,
        return_type=fn.return_type,
        source=fn.source,
    )


def instrument(program: g.GotoProgram, checks: Checks) -> g.GotoProgram:
    """A new program with property assertions inserted per enabled checks."""
    out = g.GotoProgram(
        functions={},
        globals=dict(program.globals),
        records=dict(program.records),
        externals=set(program.externals),
        unknown_calls=list(program.unknown_calls),
        field_origins=dict(program.field_origins),
    )
    for name, fn in program.functions.items():
        out.functions[name] = instrument_function(fn, checks)
    return out
