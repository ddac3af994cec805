"""Concrete interpreter over instrumented GOTO programs.

Purposes: replaying counterexample input valuations (every reported
failure must reproduce), and exhaustive enumeration as a verdict oracle
in tests.  The implementation is deliberately independent of the solver
path: it walks the original (not unrolled) program with concrete signed
integers.

Division/remainder by zero and out-of-model heap reads follow the same
total-function conventions the bit-vector encoding uses, so both sides
of the comparison see identical semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..goto import ir as g
from ..goto.ir import PropertyClass
from ..source import SourcePos
from .ssa import InputValue


class InputExhausted(Exception):
    """The interpreter requested more nondet values than provided."""

    def __init__(self, gtype: g.GotoType, display: str):
        super().__init__(f"no input left for {display}")
        self.gtype = gtype
        self.display = display


class ListInputProvider:
    """Serves InputValue records in order; replay mode."""

    def __init__(self, values: list[InputValue]):
        self.values = values
        self.pos = 0

    def next_value(self, gtype: g.GotoType, display: str) -> InputValue:
        if self.pos >= len(self.values):
            raise InputExhausted(gtype, display)
        v = self.values[self.pos]
        self.pos += 1
        return v


@dataclass
class ReplayViolation:
    property_class: PropertyClass
    pos: SourcePos
    message: str


@dataclass
class ReplayOutcome:
    kind: str  # violation | normal | bound-exhausted
    violated: Optional[ReplayViolation] = None
    steps: int = 0


def _wrap(v: int, w: int) -> int:
    v &= (1 << w) - 1
    return v - (1 << w) if v >= 1 << (w - 1) else v


def _width(gt: g.GotoType) -> int:
    return gt.width if isinstance(gt, g.IntType) else 32


@dataclass
class _Frame:
    fn: g.GotoFunction
    pc: int
    locals: dict[str, int] = field(default_factory=dict)
    lhs: Optional[str] = None  # caller-frame local to bind the return value


class Interpreter:
    def __init__(self, program: g.GotoProgram, provider, max_steps: int = 500_000):
        self.program = program
        self.provider = provider
        self.max_steps = max_steps
        self.globals: dict[str, int] = {}
        self.objects: dict[int, dict[tuple[str, str], int]] = {}
        self.arrays: dict[int, dict] = {}
        self.next_id = 0
        self.steps = 0
        self._labels: dict[str, dict[str, int]] = {}

    # -- memory -------------------------------------------------------------

    def _alloc(self) -> int:
        self.next_id += 1
        return self.next_id

    def _new_object(self, class_name: str) -> int:
        obj = self._alloc()
        fields = {}
        for decl_cls, fname, ftype in self.program.field_origins.get(class_name, []):
            fields[(decl_cls, fname)] = 0
        self.objects[obj] = fields
        return obj

    def _new_array(self, length: int) -> int:
        obj = self._alloc()
        self.arrays[obj] = {"len": length, "cells": {}, "default": 0}
        return obj

    def _consume_input(self, gt: g.GotoType, display: str) -> int:
        iv = self.provider.next_value(gt, display)
        if isinstance(gt, g.RefType):
            if iv.is_null:
                return 0
            obj = self._new_object(gt.class_name)
            for decl_cls, fname, ftype in self.program.field_origins.get(gt.class_name, []):
                key = f"{decl_cls}.{fname}"
                if key in iv.fields:
                    self.objects[obj][(decl_cls, fname)] = iv.fields[key]
            return obj
        if isinstance(gt, g.ArrayType):
            if iv.is_null:
                return 0
            obj = self._alloc()
            self.arrays[obj] = {
                "len": iv.length,
                "cells": dict(iv.elements),
                "default": iv.elem_default,
            }
            return obj
        if isinstance(gt, g.BoolType):
            return 1 if iv.value else 0
        return _wrap(iv.value, _width(gt))

    # -- expression evaluation ------------------------------------------------

    def eval(self, e: g.Expr, frame: _Frame) -> int:
        if isinstance(e, g.Constant):
            if e.value is None:
                return 0
            return int(e.value)
        if isinstance(e, g.Symbol):
            if e.name in frame.locals:
                return frame.locals[e.name]
            return self.globals.get(e.name, 0)
        if isinstance(e, g.Unary):
            v = self.eval(e.a, frame)
            if e.op == "neg":
                return _wrap(-v, _width(g.expr_type(e.a, {})))
            return 1 - v
        if isinstance(e, g.Binary):
            return self._eval_binary(e, frame)
        if isinstance(e, g.Member):
            obj = self.eval(e.base, frame)
            return self.objects.get(obj, {}).get((e.class_name, e.field_name), 0)
        if isinstance(e, g.Index):
            obj = self.eval(e.base, frame)
            idx = self.eval(e.index, frame)
            arr = self.arrays.get(obj)
            if arr is None:
                return 0
            return arr["cells"].get(idx, arr["default"])
        if isinstance(e, g.Length):
            obj = self.eval(e.base, frame)
            arr = self.arrays.get(obj)
            return arr["len"] if arr is not None else 0
        if isinstance(e, g.Cast):
            v = self.eval(e.value, frame)
            inner_t = g.expr_type(e.value, {})
            if isinstance(e.to, g.BoolType):
                return 1 if v != 0 else 0
            if isinstance(e.to, g.IntType):
                if isinstance(inner_t, g.BoolType):
                    return v
                return _wrap(v, e.to.width)
            return v  # reference casts are identity
        if isinstance(e, g.CmpExpr):
            a, b = self.eval(e.a, frame), self.eval(e.b, frame)
            return (a > b) - (a < b)
        if isinstance(e, g.OverflowGuard):
            a, b = self.eval(e.a, frame), self.eval(e.b, frame)
            w = _width(g.expr_type(e.a, {}))
            wide = {"+": a + b, "-": a - b, "*": a * b}[e.op]
            return int(not (-(1 << (w - 1)) <= wide <= (1 << (w - 1)) - 1))
        raise ValueError(f"cannot evaluate {type(e).__name__}")

    def _eval_binary(self, e: g.Binary, frame: _Frame) -> int:
        op = e.op
        if op == "and":
            return 1 if self.eval(e.a, frame) and self.eval(e.b, frame) else 0
        if op == "or":
            return 1 if self.eval(e.a, frame) or self.eval(e.b, frame) else 0
        a = self.eval(e.a, frame)
        b = self.eval(e.b, frame)
        if op in ("==", "!="):
            return int((a == b) == (op == "=="))
        if op == "<":
            return int(a < b)
        if op == "<=":
            return int(a <= b)
        if op == ">":
            return int(a > b)
        if op == ">=":
            return int(a >= b)
        w = _width(g.expr_type(e.a, {}))
        mask = (1 << w) - 1
        if op == "+":
            return _wrap(a + b, w)
        if op == "-":
            return _wrap(a - b, w)
        if op == "*":
            return _wrap(a * b, w)
        if op == "/":
            # Total like the bit-vector theory: x/0 = -1 for x >= 0 else 1.
            if b == 0:
                return -1 if a >= 0 else 1
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return _wrap(q, w)
        if op == "%":
            if b == 0:
                return a
            r = abs(a) % abs(b)
            return _wrap(-r if a < 0 else r, w)
        if op == "bitand":
            return _wrap((a & mask) & (b & mask), w)
        if op == "bitor":
            return _wrap((a & mask) | (b & mask), w)
        if op == "bitxor":
            return _wrap((a & mask) ^ (b & mask), w)
        if op == "shl":
            c = b & mask
            return _wrap(a << c, w) if c < w else 0
        if op == "shr":
            c = b & mask
            return a >> min(c, w - 1)
        if op == "ushr":
            c = b & mask
            return _wrap((a & mask) >> c, w) if c < w else 0
        raise ValueError(f"unknown operator {op}")

    # -- statement execution -----------------------------------------------------

    def _assign(self, ins: g.Assign, frame: _Frame) -> None:
        tgt = ins.target
        rhs = ins.value
        if isinstance(rhs, g.Nondet):
            value = self._consume_input(rhs.type, _display_target(tgt))
        elif isinstance(rhs, g.NewObject):
            value = self._new_object(rhs.class_name)
        elif isinstance(rhs, g.NewArray):
            value = self._new_array(self.eval(rhs.length, frame))
        else:
            value = self.eval(rhs, frame)
        if isinstance(tgt, g.Symbol):
            if tgt.name in self.program.globals:
                self.globals[tgt.name] = value
            else:
                frame.locals[tgt.name] = value
            return
        if isinstance(tgt, g.Member):
            obj = self.eval(tgt.base, frame)
            self.objects.setdefault(obj, {})[(tgt.class_name, tgt.field_name)] = value
            return
        if isinstance(tgt, g.Index):
            obj = self.eval(tgt.base, frame)
            idx = self.eval(tgt.index, frame)
            arr = self.arrays.get(obj)
            if arr is not None:
                arr["cells"][idx] = value
            return
        raise ValueError("bad assignment target")

    def run(self, entry: str) -> ReplayOutcome:
        fn = self.program.functions[entry]
        # Entry parameters are nondeterministic, consumed in prologue-read
        # order exactly like the symbolic side havocs them.
        consumed: set[str] = set()
        stack = [_Frame(fn, 0)]
        entry_params = set(fn.param_globals)

        def ensure_entry_param(name: str) -> None:
            if name in entry_params and name not in consumed:
                consumed.add(name)
                gt = self.program.globals[name]
                self.globals[name] = self._consume_input(gt, name.rsplit("::", 1)[-1])

        while stack:
            frame = stack[-1]
            self.steps += 1
            if self.steps > self.max_steps:
                return ReplayOutcome("bound-exhausted", steps=self.steps)
            if frame.pc >= len(frame.fn.body):
                stack.pop()
                continue
            ins = frame.fn.body[frame.pc]
            labels = self._labels.get(frame.fn.name)
            if labels is None:
                labels = frame.fn.label_index()
                self._labels[frame.fn.name] = labels

            if len(stack) == 1:
                for name in _symbols_read(ins):
                    ensure_entry_param(name)

            if isinstance(ins, g.Decl):
                frame.locals[ins.name] = 0
                frame.pc += 1
            elif isinstance(ins, (g.Dead, g.Skip, g.LabelI)):
                frame.pc += 1
            elif isinstance(ins, g.Assign):
                self._assign(ins, frame)
                frame.pc += 1
            elif isinstance(ins, g.AssertI):
                if not self.eval(ins.cond, frame):
                    cls = ins.property_class
                    refined = self._refine(ins, frame)
                    if refined is not None:
                        cls = refined
                    return ReplayOutcome(
                        "violation",
                        ReplayViolation(cls, ins.pos, ins.message),
                        steps=self.steps,
                    )
                frame.pc += 1
            elif isinstance(ins, g.AssumeI):
                if not self.eval(ins.cond, frame):
                    return ReplayOutcome("normal", steps=self.steps)
                frame.pc += 1
            elif isinstance(ins, g.GotoI):
                frame.pc = labels[ins.label]
            elif isinstance(ins, g.IfI):
                if self.eval(ins.cond, frame):
                    frame.pc = labels[ins.label]
                else:
                    frame.pc += 1
            elif isinstance(ins, g.ReturnI):
                value = self.eval(ins.value, frame) if ins.value is not None else 0
                stack.pop()
                if stack and frame.lhs is not None:
                    caller = stack[-1]
                    if frame.lhs in self.program.globals:
                        self.globals[frame.lhs] = value
                    else:
                        caller.locals[frame.lhs] = value
                continue
            elif isinstance(ins, g.ThrowI):
                return ReplayOutcome(
                    "violation",
                    ReplayViolation(PropertyClass.UNCAUGHT_EXCEPTION, ins.pos, "uncaught exception"),
                    steps=self.steps,
                )
            elif isinstance(ins, g.Call):
                callee = self.program.functions.get(ins.func)
                frame.pc += 1
                if callee is None:
                    if ins.lhs is not None and isinstance(ins.lhs, g.Symbol):
                        frame.locals[ins.lhs.name] = self._consume_input(
                            ins.lhs.type, ins.lhs.name
                        )
                    continue
                if len(stack) > 128:
                    return ReplayOutcome("bound-exhausted", steps=self.steps)
                lhs_name = ins.lhs.name if isinstance(ins.lhs, g.Symbol) else None
                stack.append(_Frame(callee, 0, lhs=lhs_name))
            elif isinstance(ins, g.EndFunction):
                stack.pop()
            else:
                raise ValueError(f"unhandled instruction {type(ins).__name__}")
        return ReplayOutcome("normal", steps=self.steps)

    def _refine(self, ins: g.AssertI, frame: _Frame) -> Optional[PropertyClass]:
        cond = ins.cond
        if (
            ins.property_class in (PropertyClass.OVERFLOW, PropertyClass.UNDERFLOW)
            and isinstance(cond, g.Unary)
            and cond.op == "not"
            and isinstance(cond.a, g.OverflowGuard)
        ):
            p = cond.a
            a, b = self.eval(p.a, frame), self.eval(p.b, frame)
            w = _width(g.expr_type(p.a, {}))
            wide = {"+": a + b, "-": a - b, "*": a * b}[p.op]
            if wide < -(1 << (w - 1)):
                return PropertyClass.UNDERFLOW
            if wide > (1 << (w - 1)) - 1:
                return PropertyClass.OVERFLOW
        return None


def _display_target(tgt: g.Expr) -> str:
    if isinstance(tgt, g.Symbol):
        return tgt.name.rsplit("::", 1)[-1]
    return "nondet"


def _symbols_read(ins: g.Instr) -> list[str]:
    """Global symbols an instruction reads, for entry-parameter havoc order."""
    out: list[str] = []

    def walk(e: g.Expr) -> None:
        if isinstance(e, g.Symbol):
            out.append(e.name)
        for f in e.__dataclass_fields__:
            v = getattr(e, f)
            if isinstance(v, g.Expr):
                walk(v)

    if isinstance(ins, g.Assign):
        walk(ins.value)
        if isinstance(ins.target, (g.Member, g.Index)):
            walk(ins.target)
    elif isinstance(ins, (g.IfI, g.AssertI, g.AssumeI)):
        walk(ins.cond)
    elif isinstance(ins, g.ReturnI):
        if ins.value is not None:
            walk(ins.value)
    elif isinstance(ins, g.Call):
        for a in ins.args:
            walk(a)
    return out


def replay(
    program: g.GotoProgram, entry: str, inputs: list[InputValue], max_steps: int = 500_000
) -> ReplayOutcome:
    """Run the concrete interpreter on a counterexample's input valuation."""
    interp = Interpreter(program, ListInputProvider(inputs), max_steps=max_steps)
    return interp.run(entry)
