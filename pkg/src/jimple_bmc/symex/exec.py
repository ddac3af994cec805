"""Symbolic execution of instrumented GOTO programs into SSA equations.

A single forward pass over each (acyclically) unrolled function body:
states carry a path guard and a map from variable to its current value
term; joins phi-merge differing values; calls are inlined with recursion
bounded by the unwind bound.

Heap encoding: references are 32-bit object ids (null is 0), each
(declaring class, field) pair owns one id-indexed array, array contents
live in one array per element sort keyed by id++index, and array lengths
in one id-indexed array.  Fresh allocations store their initial values;
nondeterministic references range over {null, fresh-object} and leave the
fresh object's scalar fields unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..goto import ir as g
from ..solver import terms as t
from ..source import SourcePos, UNKNOWN_POS
from .cfg import UnrolledBody, unroll_function
from .ssa import Equation, InputRecord, Obligation, SsaEquationSet


class SymexError(Exception):
    pass


# ---------------------------------------------------------------------------
# Sorts


def sort_of(gt: g.GotoType) -> t.Sort:
    if isinstance(gt, g.IntType):
        return t.BvSort(gt.width)
    if isinstance(gt, g.BoolType):
        return t.BOOL
    if isinstance(gt, (g.RefType, g.ArrayType)):
        return t.BvSort(32)
    raise SymexError(f"no solver sort for {gt}")


def elem_sort_of(gt: g.GotoType) -> t.BvSort:
    """Element sort used in heap array storage (bools stored as bv8)."""
    if isinstance(gt, g.IntType):
        return t.BvSort(gt.width)
    if isinstance(gt, g.BoolType):
        return t.BvSort(8)
    if isinstance(gt, (g.RefType, g.ArrayType)):
        return t.BvSort(32)
    raise SymexError(f"no element sort for {gt}")


def field_array_base(class_name: str, field_name: str) -> str:
    return f"#field::{class_name}::{field_name}"


def elems_array_base(elem: t.BvSort) -> str:
    return f"#elems::bv{elem.width}"


ARRLEN_BASE = "#arrlen"


@dataclass
class _State:
    guard: t.Term
    varmap: dict[str, t.Term]

    def fork(self) -> "_State":
        return _State(self.guard, dict(self.varmap))


class Executor:
    def __init__(self, program: g.GotoProgram, bound: int, step_mode: bool = False):
        self.program = program
        self.bound = bound
        self.step_mode = step_mode
        self.versions: dict[str, int] = {}
        self.equations: list[Equation] = []
        self.obligations: list[Obligation] = []
        self.inputs: list[InputRecord] = []
        self.initial_arrays: dict[str, t.Sort] = {}
        self.incomplete: list[str] = []
        self.alloc_counter = 0
        self.frame_counter = 0
        self.seq_counter = 0
        # Array lengths are immutable after allocation, so a per-id map can
        # fold lengthof() on references that folded to constants.
        self.array_lengths: dict[int, t.Term] = {}
        self.entry_params: set[str] = set()
        self.havocked_params: set[str] = set()
        self.cur_pos: SourcePos = UNKNOWN_POS
        self._unroll_cache: dict[str, UnrolledBody] = {}

    # -- naming ---------------------------------------------------------------

    def _base(self, name: str, frame: int) -> str:
        if name in self.program.globals or name.startswith("#"):
            return name
        return name if frame == 0 else f"f{frame}::{name}"

    @staticmethod
    def display_of(base: str) -> str:
        name = base.rsplit("::", 1)[-1]
        return name

    def _new_def(
        self,
        base: str,
        sort: t.Sort,
        rhs: t.Term,
        state: _State,
        pos: SourcePos,
        kind: str = "assign",
        display: str | None = None,
    ) -> t.Sym:
        ver = self.versions.get(base, 0) + 1
        self.versions[base] = ver
        sym = t.Sym(sort, f"{base}#{ver}")
        self.seq_counter += 1
        self.equations.append(
            Equation(
                lhs=sym.name,
                sort=sort,
                rhs=rhs,
                guard=state.guard,
                pos=pos,
                kind=kind,
                display=display if display is not None else self.display_of(base),
                seq=self.seq_counter,
            )
        )
        # Constant propagation: downstream conditions and claims fold, which
        # lets constant-trip loops terminate their unrolled guards and lets
        # trivially-true obligations discharge without a solver call.  The
        # defining equation stays, so traces and equation counts are intact.
        state.varmap[base] = rhs if isinstance(rhs, t.Const) else sym
        return sym

    # -- value lookup -----------------------------------------------------------

    def _heap_sort(self, base: str) -> t.Sort:
        if base == ARRLEN_BASE:
            return t.ArraySort(t.BvSort(32), t.BvSort(32))
        if base.startswith("#elems::bv"):
            return t.ArraySort(t.BvSort(64), t.BvSort(int(base[len("#elems::bv") :])))
        raise SymexError(f"unknown heap array {base}")

    def _current(self, base: str, sort: t.Sort, state: _State) -> t.Term:
        cur = state.varmap.get(base)
        if cur is not None:
            return cur
        if base.startswith("#"):
            # Unconstrained initial heap array.
            sym = t.Sym(sort, f"{base}#0")
            self.initial_arrays[sym.name] = sort
            state.varmap[base] = sym
            return sym
        # Globals (statics) are zero-initialized; locals read before their
        # DECL are zero as well, which keeps replay deterministic.
        zero = t.Const(sort, 0)
        state.varmap[base] = zero
        return zero

    def _field_array(self, class_name: str, field_name: str, ftype: g.GotoType, state: _State) -> tuple[str, t.Term, t.BvSort]:
        base = field_array_base(class_name, field_name)
        es = elem_sort_of(ftype)
        sort = t.ArraySort(t.BvSort(32), es)
        cur = state.varmap.get(base)
        if cur is None:
            sym = t.Sym(sort, f"{base}#0")
            self.initial_arrays[sym.name] = sort
            state.varmap[base] = sym
            cur = sym
        return base, cur, es

    def _elems_array(self, elem: g.GotoType, state: _State) -> tuple[str, t.Term, t.BvSort]:
        es = elem_sort_of(elem)
        base = elems_array_base(es)
        return base, self._current(base, self._heap_sort(base), state), es

    def _arrlen(self, state: _State) -> t.Term:
        return self._current(ARRLEN_BASE, self._heap_sort(ARRLEN_BASE), state)

    # -- translation -------------------------------------------------------------

    def translate(self, e: g.Expr, state: _State, frame: int) -> t.Term:
        if isinstance(e, g.Constant):
            if isinstance(e.type, g.BoolType):
                return t.bool_const(bool(e.value))
            if e.value is None:
                return t.bv_const(0, 32)
            if isinstance(e.type, g.IntType):
                return t.bv_const(e.value, e.type.width)
            raise SymexError(f"constant of type {e.type}")
        if isinstance(e, g.Symbol):
            base = self._base(e.name, frame)
            if (
                frame == 0
                and base in self.entry_params
                and base not in self.havocked_params
            ):
                self._havoc_entry_param(base, state)
            return self._current(base, sort_of(e.type), state)
        if isinstance(e, g.Unary):
            a = self.translate(e.a, state, frame)
            return t.bvneg(a) if e.op == "neg" else t.not_(a)
        if isinstance(e, g.Binary):
            return self._translate_binary(e, state, frame)
        if isinstance(e, g.Member):
            base_term = self.translate(e.base, state, frame)
            _, arr, es = self._field_array(e.class_name, e.field_name, e.field_type, state)
            value = t.select(arr, base_term)
            if isinstance(e.field_type, g.BoolType):
                return t.ne(value, t.bv_const(0, es.width))
            return value
        if isinstance(e, g.Index):
            base_term = self.translate(e.base, state, frame)
            idx = self._coerce_bv(self.translate(e.index, state, frame), 32)
            elem = self._elem_type(e.base)
            _, arr, es = self._elems_array(elem, state)
            value = t.select(arr, t.concat(base_term, idx))
            if isinstance(elem, g.BoolType):
                return t.ne(value, t.bv_const(0, es.width))
            return value
        if isinstance(e, g.Length):
            base_term = self.translate(e.base, state, frame)
            if isinstance(base_term, t.Const) and base_term.value in self.array_lengths:
                return self.array_lengths[base_term.value]
            return t.select(self._arrlen(state), base_term)
        if isinstance(e, g.Cast):
            inner = self.translate(e.value, state, frame)
            return self._cast(inner, e.to)
        if isinstance(e, g.CmpExpr):
            a = self.translate(e.a, state, frame)
            b = self.translate(e.b, state, frame)
            return t.ite(
                t.cmp("slt", a, b),
                t.bv_const(-1, 32),
                t.ite(t.eq(a, b), t.bv_const(0, 32), t.bv_const(1, 32)),
            )
        if isinstance(e, g.OverflowGuard):
            a = self.translate(e.a, state, frame)
            b = self.translate(e.b, state, frame)
            op = {"+": "add", "-": "sub", "*": "mul"}[e.op]
            return t.overflow(op, a, b)
        if isinstance(e, (g.Nondet, g.NewObject, g.NewArray)):
            raise SymexError(f"{type(e).__name__} only allowed as a full assignment rhs")
        raise SymexError(f"cannot translate {type(e).__name__}")

    @staticmethod
    def _coerce_bv(term: t.Term, width: int) -> t.Term:
        # Indices and lengths are stored at 32 bits; narrow synthetic
        # programs may use smaller widths, so resize preserving the value.
        assert isinstance(term.sort, t.BvSort)
        if term.sort.width == width:
            return term
        if term.sort.width < width:
            return t.sign_ext(width - term.sort.width, term)
        return t.extract(width - 1, 0, term)

    def _elem_type(self, base: g.Expr) -> g.GotoType:
        bt = g.expr_type(base, {})
        if not isinstance(bt, g.ArrayType):
            raise SymexError(f"indexing non-array of type {bt}")
        return bt.elem

    def _cast(self, inner: t.Term, to: g.GotoType) -> t.Term:
        target = sort_of(to)
        if isinstance(inner.sort, t.BoolSort) and isinstance(target, t.BvSort):
            return t.ite(inner, t.bv_const(1, target.width), t.bv_const(0, target.width))
        if isinstance(inner.sort, t.BvSort) and isinstance(to, g.BoolType):
            return t.ne(inner, t.bv_const(0, inner.sort.width))
        if isinstance(inner.sort, t.BvSort) and isinstance(target, t.BvSort):
            if target.width == inner.sort.width:
                return inner
            if target.width < inner.sort.width:
                return t.extract(target.width - 1, 0, inner)
            return t.sign_ext(target.width - inner.sort.width, inner)
        raise SymexError(f"unsupported cast to {to}")

    _BINOPS = {
        "+": "add",
        "-": "sub",
        "*": "mul",
        "/": "sdiv",
        "%": "srem",
        "shl": "shl",
        "shr": "ashr",
        "ushr": "lshr",
        "bitand": "and",
        "bitor": "or",
        "bitxor": "xor",
    }
    _RELOPS = {"<": "slt", "<=": "sle", ">": "sgt", ">=": "sge"}

    def _translate_binary(self, e: g.Binary, state: _State, frame: int) -> t.Term:
        a = self.translate(e.a, state, frame)
        b = self.translate(e.b, state, frame)
        if e.op in self._BINOPS:
            return t.bvop(self._BINOPS[e.op], a, b)
        if e.op in self._RELOPS:
            return t.cmp(self._RELOPS[e.op], a, b)
        if e.op == "==":
            return t.eq(a, b)
        if e.op == "!=":
            return t.ne(a, b)
        if e.op == "and":
            return t.and_(a, b)
        if e.op == "or":
            return t.or_(a, b)
        raise SymexError(f"unknown operator {e.op}")

    # -- nondet and allocation -----------------------------------------------------

    def _alloc_id(self) -> int:
        self.alloc_counter += 1
        return self.alloc_counter

    def _store_field(
        self,
        class_name: str,
        field_name: str,
        ftype: g.GotoType,
        obj: t.Term,
        value: t.Term,
        state: _State,
        pos: SourcePos,
        kind: str = "assign",
        display: str | None = None,
    ) -> None:
        base, arr, es = self._field_array(class_name, field_name, ftype, state)
        if isinstance(ftype, g.BoolType):
            value = t.ite(value, t.bv_const(1, es.width), t.bv_const(0, es.width))
        rhs = t.store(arr, obj, value)
        disp = display or f"{class_name.rsplit('.', 1)[-1]}.{field_name}"
        self._new_def(base, rhs.sort, rhs, state, pos, kind=kind, display=disp)

    def fresh_nondet(
        self, gt: g.GotoType, display: str, state: _State, pos: SourcePos
    ) -> t.Term:
        name = f"#in{len(self.inputs)}"
        sort = sort_of(gt)
        sym = t.Sym(sort, name)
        if isinstance(gt, g.RefType):
            obj = self._alloc_id()
            rec = InputRecord(
                name=name, sort=sort, display=display, kind="ref", pos=pos,
                class_name=gt.class_name, object_id=obj, guard=state.guard,
            )
            self.inputs.append(rec)
            state.guard = t.and_(
                state.guard,
                t.or_(t.eq(sym, t.bv_const(0, 32)), t.eq(sym, t.bv_const(obj, 32))),
            )
            # Depth-1 havoc: reference-typed fields of the fresh object are
            # null; scalar fields stay unconstrained (extracted from the
            # model as inputs).
            for decl_cls, fname, ftype in self.program.field_origins.get(gt.class_name, []):
                if isinstance(ftype, (g.RefType, g.ArrayType)):
                    self._store_field(
                        decl_cls, fname, ftype, t.bv_const(obj, 32),
                        t.bv_const(0, 32), state, pos, kind="assign",
                        display=f"{fname} (havoc init)",
                    )
            return sym
        if isinstance(gt, g.ArrayType):
            obj = self._alloc_id()
            len_name = f"#in{len(self.inputs)}_len"
            len_sym = t.Sym(t.BvSort(32), len_name)
            rec = InputRecord(
                name=name, sort=sort, display=display, kind="array", pos=pos,
                object_id=obj, length_input=len_name,
                elem_text=str(elem_sort_of(gt.elem)), guard=state.guard,
            )
            self.inputs.append(rec)
            state.guard = t.and_(
                state.guard,
                t.or_(t.eq(sym, t.bv_const(0, 32)), t.eq(sym, t.bv_const(obj, 32))),
            )
            state.guard = t.and_(state.guard, t.cmp("sge", len_sym, t.bv_const(0, 32)))
            self.array_lengths[obj] = len_sym
            rhs = t.store(self._arrlen(state), t.bv_const(obj, 32), len_sym)
            self._new_def(
                ARRLEN_BASE, rhs.sort, rhs, state, pos, kind="assign",
                display=f"{display}.length",
            )
            return sym
        rec = InputRecord(
            name=name, sort=sort, display=display, kind="scalar", pos=pos,
            guard=state.guard,
        )
        self.inputs.append(rec)
        return sym

    def _havoc_entry_param(self, base: str, state: _State) -> None:
        self.havocked_params.add(base)
        gt = self.program.globals[base]
        display = self.display_of(base)
        value = self.fresh_nondet(gt, display, state, self.cur_pos)
        self._new_def(base, sort_of(gt), value, state, self.cur_pos, kind="havoc", display=display)

    # -- instruction dispatch ----------------------------------------------------

    def _exec_assign(self, ins: g.Assign, state: _State, frame: int) -> None:
        rhs = ins.value
        if isinstance(ins.target, g.Symbol):
            base = self._base(ins.target.name, frame)
            sort = sort_of(ins.target.type)
            display = self.display_of(base)
            if isinstance(rhs, g.Nondet):
                value = self.fresh_nondet(rhs.type, display, state, ins.pos)
                self._new_def(base, sort, value, state, ins.pos, kind="havoc", display=display)
                return
            if isinstance(rhs, g.NewObject):
                value = self._exec_new_object(rhs, state, ins.pos)
            elif isinstance(rhs, g.NewArray):
                value = self._exec_new_array(rhs, state, ins.pos, frame)
            else:
                value = self.translate(rhs, state, frame)
            self._new_def(base, sort, value, state, ins.pos, display=display)
            return
        if isinstance(ins.target, g.Member):
            value = self.translate(rhs, state, frame)
            obj = self.translate(ins.target.base, state, frame)
            disp = f"{ins.target.class_name.rsplit('.', 1)[-1]}.{ins.target.field_name}"
            self._store_field(
                ins.target.class_name, ins.target.field_name, ins.target.field_type,
                obj, value, state, ins.pos, display=disp,
            )
            return
        if isinstance(ins.target, g.Index):
            value = self.translate(rhs, state, frame)
            obj = self.translate(ins.target.base, state, frame)
            idx = self._coerce_bv(self.translate(ins.target.index, state, frame), 32)
            elem = self._elem_type(ins.target.base)
            base, arr, es = self._elems_array(elem, state)
            if isinstance(elem, g.BoolType):
                value = t.ite(value, t.bv_const(1, es.width), t.bv_const(0, es.width))
            rhs_term = t.store(arr, t.concat(obj, idx), value)
            if isinstance(ins.target.base, g.Symbol):
                disp = f"{self.display_of(ins.target.base.name)}[]"
            else:
                disp = "array[]"
            self._new_def(base, rhs_term.sort, rhs_term, state, ins.pos, display=disp)
            return
        raise SymexError("assignment target must be a place")

    def _exec_new_object(self, rhs: g.NewObject, state: _State, pos: SourcePos) -> t.Term:
        obj = self._alloc_id()
        ref = t.bv_const(obj, 32)
        for decl_cls, fname, ftype in self.program.field_origins.get(rhs.class_name, []):
            if isinstance(ftype, g.BoolType):
                zero: t.Term = t.FALSE
            elif isinstance(ftype, g.IntType):
                zero = t.bv_const(0, ftype.width)
            else:
                zero = t.bv_const(0, 32)
            self._store_field(
                decl_cls, fname, ftype, ref, zero, state, pos,
                display=f"{fname} (zero init)",
            )
        return ref

    def _exec_new_array(
        self, rhs: g.NewArray, state: _State, pos: SourcePos, frame: int
    ) -> t.Term:
        obj = self._alloc_id()
        ref = t.bv_const(obj, 32)
        length = self._coerce_bv(self.translate(rhs.length, state, frame), 32)
        self.array_lengths[obj] = length
        stored = t.store(self._arrlen(state), ref, length)
        self._new_def(ARRLEN_BASE, stored.sort, stored, state, pos, display="array length")
        return ref

    # -- function execution ---------------------------------------------------------

    def _unrolled(self, fn: g.GotoFunction) -> UnrolledBody:
        cached = self._unroll_cache.get(fn.name)
        if cached is None:
            env = self.program.symbol_env(fn)
            cached = unroll_function(fn, self.bound, self.step_mode, env)
            self._unroll_cache[fn.name] = cached
        return cached

    def exec_function(
        self,
        fn: g.GotoFunction,
        state: _State,
        frame: int,
        depth: dict[str, int],
    ) -> tuple[_State | None, t.Term | None]:
        body = self._unrolled(fn)
        pending: dict[str, list[_State]] = {}
        exits: list[tuple[t.Term, t.Term | None]] = []  # (guard, return value)
        exit_states: list[_State] = []
        current: _State | None = state

        for ui in body.instrs:
            ins = ui.instr
            if isinstance(ins, g.LabelI):
                incoming = pending.pop(ins.label, [])
                if current is not None:
                    incoming.append(current)
                current = self._merge(incoming)
                continue
            if current is None:
                continue
            if current.guard == t.FALSE:
                current = None
                continue
            self.cur_pos = ins.pos

            if isinstance(ins, (g.Decl,)):
                base = self._base(ins.name, frame)
                sort = sort_of(ins.type)
                current.varmap[base] = t.Const(sort, 0) if not isinstance(sort, t.BoolSort) else t.FALSE
            elif isinstance(ins, (g.Dead, g.Skip)):
                pass
            elif isinstance(ins, g.Assign):
                self._exec_assign(ins, current, frame)
            elif isinstance(ins, g.AssertI):
                claim = self.translate(ins.cond, current, frame)
                self.seq_counter += 1
                self.obligations.append(
                    Obligation(
                        guard=current.guard,
                        claim=claim,
                        property_class=self._obligation_class(ins, claim, current, frame),
                        pos=ins.pos,
                        message=ins.message,
                        index=len(self.obligations),
                        discharged=(claim == t.TRUE),
                        seq=self.seq_counter,
                    )
                )
            elif isinstance(ins, g.AssumeI):
                cond = self.translate(ins.cond, current, frame)
                current.guard = t.and_(current.guard, cond)
                if current.guard == t.FALSE:
                    current = None
            elif isinstance(ins, g.GotoI):
                pending.setdefault(ins.label, []).append(current)
                current = None
            elif isinstance(ins, g.IfI):
                cond = self.translate(ins.cond, current, frame)
                taken_guard = self._compress(t.and_(current.guard, cond))
                fall_guard = self._compress(t.and_(current.guard, t.not_(cond)))
                if taken_guard != t.FALSE:
                    branch = current.fork()
                    branch.guard = taken_guard
                    pending.setdefault(ins.label, []).append(branch)
                current.guard = fall_guard
                if fall_guard == t.FALSE:
                    current = None
            elif isinstance(ins, g.ReturnI):
                value = (
                    self.translate(ins.value, current, frame)
                    if ins.value is not None
                    else None
                )
                exits.append((current.guard, value))
                exit_states.append(current)
                current = None
            elif isinstance(ins, g.ThrowI):
                self.seq_counter += 1
                self.obligations.append(
                    Obligation(
                        guard=current.guard,
                        claim=t.FALSE,
                        property_class=g.PropertyClass.UNCAUGHT_EXCEPTION,
                        pos=ins.pos,
                        message="uncaught exception",
                        index=len(self.obligations),
                        seq=self.seq_counter,
                    )
                )
                current = None
            elif isinstance(ins, g.Call):
                current = self._exec_call(ins, current, frame, depth)
                if current is not None and current.guard == t.FALSE:
                    current = None
            elif isinstance(ins, g.EndFunction):
                if current is not None:
                    exits.append((current.guard, None))
                    exit_states.append(current)
                    current = None
            else:
                raise SymexError(f"unhandled instruction {type(ins).__name__}")

        if pending:
            raise SymexError(f"unresolved merge labels in {fn.name}: {sorted(pending)}")
        merged = self._merge(exit_states)
        if merged is None:
            return None, None
        ret: t.Term | None = None
        with_values = [(guard, v) for guard, v in exits if v is not None]
        if with_values:
            ret = with_values[-1][1]
            for guard, v in reversed(with_values[:-1]):
                ret = t.ite(guard, v, ret)
        return merged, ret

    def _obligation_class(
        self, ins: g.AssertI, claim: t.Term, state: _State, frame: int
    ) -> g.PropertyClass:
        """Refine overflow direction when the claim folded on constants.

        A folded claim carries no OverflowPred for the trace builder to
        inspect, so the direction must be fixed here; the symbolic case is
        refined later from the model, and replay applies the same rule.
        """
        cls = ins.property_class
        cond = ins.cond
        if (
            cls in (g.PropertyClass.OVERFLOW, g.PropertyClass.UNDERFLOW)
            and isinstance(claim, t.Const)
            and isinstance(cond, g.Unary)
            and cond.op == "not"
            and isinstance(cond.a, g.OverflowGuard)
        ):
            a = self.translate(cond.a.a, state, frame)
            b = self.translate(cond.a.b, state, frame)
            if isinstance(a, t.Const) and isinstance(b, t.Const):
                w = a.sort.width
                sa, sb = t.to_signed(a.value, w), t.to_signed(b.value, w)
                wide = {"+": sa + sb, "-": sa - sb, "*": sa * sb}[cond.a.op]
                if wide < -(1 << (w - 1)):
                    return g.PropertyClass.UNDERFLOW
                if wide > (1 << (w - 1)) - 1:
                    return g.PropertyClass.OVERFLOW
        return cls

    def _exec_call(
        self, ins: g.Call, state: _State, frame: int, depth: dict[str, int]
    ) -> _State | None:
        fn = self.program.functions.get(ins.func)
        if fn is None:
            # External with no body: havoc any result.
            if ins.lhs is not None and isinstance(ins.lhs, g.Symbol):
                base = self._base(ins.lhs.name, frame)
                value = self.fresh_nondet(ins.lhs.type, self.display_of(base), state, ins.pos)
                self._new_def(base, sort_of(ins.lhs.type), value, state, ins.pos, kind="havoc")
            return state
        d = depth.get(ins.func, 0)
        if d >= self.bound:
            self.incomplete.append(f"recursion bound {self.bound} reached at {ins.func}")
            self.seq_counter += 1
            self.obligations.append(
                Obligation(
                    guard=state.guard,
                    claim=t.FALSE,
                    property_class=g.PropertyClass.UNWINDING,
                    pos=ins.pos,
                    message=f"recursion deeper than {self.bound}",
                    index=len(self.obligations),
                    seq=self.seq_counter,
                )
            )
            state.guard = t.FALSE
            return state
        self.frame_counter += 1
        sub = self.frame_counter
        exit_state, ret = self.exec_function(fn, state, sub, {**depth, ins.func: d + 1})
        if exit_state is None:
            return None
        if ins.lhs is not None and isinstance(ins.lhs, g.Symbol):
            base = self._base(ins.lhs.name, frame)
            sort = sort_of(ins.lhs.type)
            if ret is None:
                ret = t.Const(sort, 0)
            self._new_def(
                base, sort, ret, exit_state, ins.pos, kind="call",
                display=self.display_of(base),
            )
        return exit_state

    # -- merging -----------------------------------------------------------------

    def _compress(self, guard: t.Term) -> t.Term:
        """Name complex guards so downstream conjunctions stay small."""
        if isinstance(guard, (t.Const, t.Sym)):
            return guard
        name = f"#g{len(self.equations)}"
        sym = t.Sym(t.BOOL, name)
        self.seq_counter += 1
        self.equations.append(
            Equation(
                lhs=name, sort=t.BOOL, rhs=guard, guard=t.TRUE,
                pos=UNKNOWN_POS, kind="guard", display=name,
                seq=self.seq_counter,
            )
        )
        return sym

    def _merge(self, states: list[_State]) -> _State | None:
        live = [s for s in states if s.guard != t.FALSE]
        if not live:
            return None
        if len(live) == 1:
            return live[0]
        merged_guard = self._compress(t.disj([s.guard for s in live]))
        keys: list[str] = []
        seen = set()
        for s in live:
            for kname in s.varmap:
                if kname not in seen:
                    seen.add(kname)
                    keys.append(kname)
        out = _State(merged_guard, {})
        for kname in keys:
            values = []
            for s in live:
                values.append(s.varmap.get(kname))
            present = [v for v in values if v is not None]
            first = present[0]
            if all(v == first for v in present) and len(present) == len(values):
                out.varmap[kname] = first
                continue
            sort = first.sort
            default = self._default_value(kname, sort)
            value = values[-1] if values[-1] is not None else default
            for s, v in reversed(list(zip(live[:-1], values[:-1]))):
                value = t.ite(s.guard, v if v is not None else default, value)
            self._new_def(
                kname, sort, value, out, UNKNOWN_POS, kind="phi",
                display=self.display_of(kname),
            )
        return out

    def _default_value(self, base: str, sort: t.Sort) -> t.Term:
        """Value of a variable on a path that never touched it."""
        if base.startswith("#"):
            sym = t.Sym(sort, f"{base}#0")
            self.initial_arrays[sym.name] = sort
            return sym
        return t.Const(sort, 0)

    # -- top level ----------------------------------------------------------------

    def run(self, entry: str) -> SsaEquationSet:
        fn = self.program.functions.get(entry)
        if fn is None:
            raise SymexError(f"entry function {entry} not found")
        self.entry_params = set(fn.param_globals)
        state = _State(t.TRUE, {})
        self.exec_function(fn, state, 0, {entry: 1})
        return SsaEquationSet(
            entry=entry,
            bound=self.bound,
            equations=self.equations,
            obligations=self.obligations,
            inputs=self.inputs,
            initial_arrays=self.initial_arrays,
            incomplete=self.incomplete,
        )


def unroll(program: g.GotoProgram, entry: str, k: int, step_mode: bool = False) -> SsaEquationSet:
    """Instrumented program -> SSA constraint system at bound ``k``."""
    return Executor(program, k, step_mode).run(entry)
