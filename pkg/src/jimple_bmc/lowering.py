"""Jimple to GOTO conversion.

The object model follows the C++-style encoding: virtual fields become
record layouts (inherited fields first, so a subclass layout extends its
superclass layout as a prefix), static fields become namespaced globals,
and polymorphic dispatch disappears because Jimple already names the
statically resolved target class.

Calling convention: every function parameter is passed through a
dedicated global.  Callers assign the globals, then emit FUNCTION_CALL;
the callee's prologue copies each global into the corresponding identity
local inside an atomic region.  Virtual methods get a receiver global
prepended, so ``bar()`` inside class A behaves like ``bar(A*)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import opmodels
from .goto import ir as g
from .jimple import ast as j
from .jimple.classtable import ClassTable
from .source import SourcePos, UNKNOWN_POS


class LoweringError(Exception):
    def __init__(self, message: str, pos: SourcePos = UNKNOWN_POS):
        super().__init__(f"{pos}: {message}" if pos != UNKNOWN_POS else message)
        self.pos = pos


# ---------------------------------------------------------------------------
# Types and names


def lower_type(t: j.JimpleType) -> g.GotoType:
    if isinstance(t, j.PrimType):
        return {
            "int": g.INT32,
            "boolean": g.BOOL_T,
            "byte": g.INT8,
            "short": g.INT16,
            "long": g.INT64,
            "char": g.INT16,  # zero-extended at widening casts
            "void": g.VOID,
        }[t.name]
    if isinstance(t, j.RefJType):
        return g.RefType(t.class_name)
    if isinstance(t, j.ArrJType):
        return g.ArrayType(lower_type(t.elem))
    raise LoweringError(f"unsupported type {t}")


def _mangle_type(t: j.JimpleType) -> str:
    if isinstance(t, j.PrimType):
        return t.name
    if isinstance(t, j.RefJType):
        return j.simple_name(t.class_name)
    return _mangle_type(t.elem) + "Arr"


def _mangle_method_name(name: str) -> str:
    # Constructor/initializer names carry <> which we keep out of symbols.
    return {"<init>": "$init", "<clinit>": "$clinit"}.get(name, name)


def mangle_name(
    class_name: str,
    method_name: str,
    return_type: j.JimpleType,
    params: tuple[j.JimpleType, ...],
) -> str:
    """Identifier of the form name_return_param1_..._paramN.

    The class provides the namespace; see qualified_name.
    """
    parts = [_mangle_method_name(method_name), _mangle_type(return_type)]
    parts += [_mangle_type(p) for p in params]
    return "_".join(parts)


def qualified_name(class_name: str, mangled: str) -> str:
    return f"{class_name}::{mangled}"


def receiver_global(fn_name: str) -> str:
    return f"{fn_name}::@this"


def parameter_global(fn_name: str, index: int) -> str:
    return f"{fn_name}::@parameter{index}"


# ---------------------------------------------------------------------------
# Context


@dataclass
class LoweringContext:
    table: ClassTable
    program: g.GotoProgram = field(default_factory=g.GotoProgram)
    # (class, method, return, params) -> qualified GOTO name
    mangled: dict[tuple, str] = field(default_factory=dict)
    # qualified name -> ordered parameter globals (receiver first if any)
    param_globals: dict[str, tuple[str, ...]] = field(default_factory=dict)
    fresh: int = 0

    def fresh_name(self, hint: str) -> str:
        self.fresh += 1
        return f"#{hint}{self.fresh}"

    def function_named(self, selector: str) -> list[str]:
        """Functions matching a CLI selector: qualified, mangled or plain name."""
        hits = []
        for qual in self.program.functions:
            cls, _, mangled = qual.rpartition("::")
            plain = mangled.split("_", 1)[0]
            if selector in (qual, mangled, plain, f"{cls}.{plain}"):
                hits.append(qual)
        return hits


def signature_key(cls: str, m: j.JimpleMethod) -> tuple:
    return (cls, m.name, m.return_type, m.params)


# ---------------------------------------------------------------------------
# Class-level lowering


def lower_class(cls: j.JimpleClass, ctx: LoweringContext) -> tuple[g.RecordType, list[tuple[str, g.GotoType]]]:
    """Record layout plus the class's static-field globals.

    Requires the superclass record (if any user superclass exists) to be
    present already; lower_program orders classes accordingly.
    """
    fields: list[tuple[str, g.GotoType]] = []
    seen: set[str] = set()
    if cls.superclass and cls.superclass in ctx.program.records:
        for fname, ftype in ctx.program.records[cls.superclass].fields:
            fields.append((fname, ftype))
            seen.add(fname)
    globals_out: list[tuple[str, g.GotoType]] = []
    for f in cls.fields:
        try:
            ftype = lower_type(f.type)
        except (KeyError, LoweringError):
            raise LoweringError(f"field {cls.name}.{f.name} has unsupported type", f.pos)
        if f.static:
            globals_out.append((f"{cls.name}::{f.name}", ftype))
        else:
            name = f.name if f.name not in seen else f"{j.simple_name(cls.name)}.{f.name}"
            fields.append((name, ftype))
            seen.add(name)
    record = g.RecordType(cls.name, tuple(fields))
    ctx.program.records[cls.name] = record
    origins: list[tuple[str, str, g.GotoType]] = []
    if cls.superclass and cls.superclass in ctx.program.field_origins:
        origins.extend(ctx.program.field_origins[cls.superclass])
    for f in cls.fields:
        if not f.static:
            origins.append((cls.name, f.name, lower_type(f.type)))
    ctx.program.field_origins[cls.name] = origins
    for name, t in globals_out:
        ctx.program.globals[name] = t
    return record, globals_out


def lower_program(table: ClassTable) -> LoweringContext:
    ctx = LoweringContext(table=table)
    ordered = _topo_classes(table)
    for cls in ordered:
        lower_class(cls, ctx)
    # Register all signatures first so call sites can reference functions
    # lowered later (or mutually recursive ones).
    for cls in ordered:
        for m in cls.methods:
            fn_name = qualified_name(cls.name, mangle_name(cls.name, m.name, m.return_type, m.params))
            ctx.mangled[signature_key(cls.name, m)] = fn_name
            pgs: list[str] = []
            if not m.static:
                rg = receiver_global(fn_name)
                ctx.program.globals[rg] = g.RefType(cls.name)
                pgs.append(rg)
            for i, p in enumerate(m.params):
                pg = parameter_global(fn_name, i)
                ctx.program.globals[pg] = lower_type(p)
                pgs.append(pg)
            ctx.param_globals[fn_name] = tuple(pgs)
    for cls in ordered:
        for m in cls.methods:
            if m.has_body:
                fn = lower_method(cls, m, ctx)
                ctx.program.functions[fn.name] = fn
    return ctx


def _topo_classes(table: ClassTable) -> list[j.JimpleClass]:
    out: list[j.JimpleClass] = []
    done: set[str] = set()

    def visit(name: str) -> None:
        if name in done or name not in table.classes:
            return
        cls = table.classes[name]
        done.add(name)
        if cls.superclass:
            visit(cls.superclass)
        out.append(cls)

    for name in table.classes:
        visit(name)
    # visit() appends a class after its superclass, but the initial add to
    # `done` must not hide it from its own subclasses' walks; order is
    # superclass-first by construction.
    return out


# ---------------------------------------------------------------------------
# Method-level lowering


class _MethodLowering:
    def __init__(self, cls: j.JimpleClass, method: j.JimpleMethod, ctx: LoweringContext):
        self.cls = cls
        self.method = method
        self.ctx = ctx
        self.fn_name = ctx.mangled[signature_key(cls.name, method)]
        self.instrs: list[g.Instr] = []
        self.jenv: dict[str, j.JimpleType] = dict(method.locals)
        self.env: dict[str, g.GotoType] = {n: lower_type(t) for n, t in method.locals}
        self.decl_order: list[str] = [n for n, _ in method.locals]

    # -- small helpers ------------------------------------------------------

    def sym(self, name: str, pos: SourcePos) -> g.Symbol:
        if name not in self.env:
            raise LoweringError(f"undeclared local {name}", pos)
        return g.Symbol(name, self.env[name])

    def emit(self, ins: g.Instr) -> None:
        self.instrs.append(ins)

    # -- expressions ---------------------------------------------------------

    def lower_const(self, v: j.IntConst, expected: j.JimpleType | None, pos: SourcePos) -> g.Constant:
        jt = expected
        if jt is None or isinstance(jt, (j.RefJType, j.ArrJType)):
            jt = j.J_LONG if v.long else j.J_INT
        gt = lower_type(jt)
        if isinstance(gt, g.BoolType):
            if v.value not in (0, 1):
                raise LoweringError(f"constant {v.value} is not a boolean", pos)
            return g.Constant(v.value, g.BOOL_T)
        assert isinstance(gt, g.IntType)
        value = v.value
        if jt == j.J_CHAR and 0 <= value <= 0xFFFF:
            value = value - 0x10000 if value >= 0x8000 else value
        lo, hi = -(1 << (gt.width - 1)), (1 << (gt.width - 1)) - 1
        if not (lo <= value <= hi):
            raise LoweringError(
                f"constant {v.value} out of range for {j.type_name(jt)}", pos
            )
        return g.Constant(value, gt)

    def jtype_of(self, v: j.Value, pos: SourcePos) -> j.JimpleType | None:
        if isinstance(v, j.Local):
            if v.name not in self.jenv:
                raise LoweringError(f"undeclared local {v.name}", pos)
            return self.jenv[v.name]
        if isinstance(v, j.IntConst):
            return None  # adopts context
        if isinstance(v, j.NullConst):
            return None
        if isinstance(v, j.FieldRef):
            return self.resolve_field(v, pos)[1].type
        if isinstance(v, j.ArrayRef):
            base_t = self.jenv.get(v.base.name)
            if not isinstance(base_t, j.ArrJType):
                raise LoweringError(f"{v.base.name} is not an array", pos)
            return base_t.elem
        return None

    def lower_value(self, v: j.Value, expected: j.JimpleType | None, pos: SourcePos) -> g.Expr:
        if isinstance(v, j.Local):
            return self.sym(v.name, pos)
        if isinstance(v, j.IntConst):
            return self.lower_const(v, expected, pos)
        if isinstance(v, j.NullConst):
            cname = expected.class_name if isinstance(expected, j.RefJType) else "java.lang.Object"
            return g.Constant(None, g.RefType(cname))
        if isinstance(v, j.StringConst):
            raise LoweringError("string values are unsupported", pos)
        if isinstance(v, j.FieldRef):
            return self.lower_field_read(v, pos)
        if isinstance(v, j.ArrayRef):
            return g.Index(self.sym(v.base.name, pos), self.lower_value(v.index, j.J_INT, pos))
        if isinstance(v, j.UnopExpr):
            if v.op == "lengthof":
                return g.Length(self.lower_value(v.a, None, pos))
            return g.Unary("neg", self.lower_value(v.a, expected, pos))
        if isinstance(v, j.CastExpr):
            return self.lower_cast(v, pos)
        if isinstance(v, j.BinopExpr):
            return self.lower_binop(v, pos)
        if isinstance(v, j.NewExpr):
            return g.NewObject(v.class_name)
        raise LoweringError(f"expression form {type(v).__name__} not allowed here", pos)

    def lower_cast(self, v: j.CastExpr, pos: SourcePos) -> g.Expr:
        inner_jt = self.jtype_of(v.value, pos)
        inner = self.lower_value(v.value, inner_jt, pos)
        target = lower_type(v.to)
        out: g.Expr = g.Cast(inner, target)
        # char widens unsigned: mask the sign-extended value down to 16 bits.
        if (
            inner_jt == j.J_CHAR
            and isinstance(target, g.IntType)
            and target.width > 16
        ):
            out = g.Binary("bitand", out, g.Constant(0xFFFF, target))
        return out

    def lower_binop(self, v: j.BinopExpr, pos: SourcePos) -> g.Expr:
        ta = self.jtype_of(v.a, pos)
        tb = self.jtype_of(v.b, pos)
        if v.op in ("<<", ">>", ">>>"):
            if ta is None:
                ta = j.J_INT
            a = self.lower_value(v.a, ta, pos)
            b = self.lower_value(v.b, j.J_INT, pos)
            width = lower_type(ta).width
            count: g.Expr = b
            if width != 32:
                count = g.Cast(b, g.IntType(width))
            count = g.Binary("bitand", count, g.Constant(width - 1, g.IntType(width)))
            op = {"<<": "shl", ">>": "shr", ">>>": "ushr"}[v.op]
            return g.Binary(op, a, count)
        common = ta if ta is not None else tb
        if common is None:
            common = j.J_LONG if (
                isinstance(v.a, j.IntConst) and v.a.long or isinstance(v.b, j.IntConst) and v.b.long
            ) else j.J_INT
        a = self.lower_value(v.a, common, pos)
        b = self.lower_value(v.b, common, pos)
        if v.op in ("cmp", "cmpl", "cmpg"):
            return g.CmpExpr(v.op, a, b)
        if v.op in ("&", "|", "^"):
            if lower_type(common) == g.BOOL_T:
                return {
                    "&": g.Binary("and", a, b),
                    "|": g.Binary("or", a, b),
                    "^": g.Binary("!=", a, b),
                }[v.op]
            return g.Binary({"&": "bitand", "|": "bitor", "^": "bitxor"}[v.op], a, b)
        if v.op in ("+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!="):
            return g.Binary(v.op, a, b)
        raise LoweringError(f"unsupported operator {v.op}", pos)

    # -- fields ---------------------------------------------------------------

    def resolve_field(self, ref: j.FieldRef, pos: SourcePos) -> tuple[str, j.JimpleField]:
        found = self.ctx.table.lookup_field(ref.class_name, ref.field_name)
        if found is not None:
            return found[0].name, found[1]
        if opmodels.is_modeled_class(ref.class_name):
            return ref.class_name, j.JimpleField(ref.field_name, ref.field_type, static=ref.base is None)
        raise LoweringError(f"unknown field {ref.class_name}.{ref.field_name}", pos)

    def lower_field_read(self, ref: j.FieldRef, pos: SourcePos) -> g.Expr:
        decl_class, fld = self.resolve_field(ref, pos)
        ftype = lower_type(fld.type)
        if ref.base is None:
            const = opmodels.EXTERNAL_STATIC_CONSTANTS.get((decl_class, ref.field_name))
            if const is not None:
                return g.Constant(const, ftype)
            gname = f"{decl_class}::{ref.field_name}"
            self.ctx.program.globals.setdefault(gname, ftype)
            return g.Symbol(gname, ftype)
        return g.Member(self.sym(ref.base.name, pos), decl_class, ref.field_name, ftype)

    def lower_place(self, place: j.Place, pos: SourcePos) -> tuple[g.Expr, j.JimpleType]:
        if isinstance(place, j.Local):
            return self.sym(place.name, pos), self.jenv[place.name]
        if isinstance(place, j.FieldRef):
            decl_class, fld = self.resolve_field(place, pos)
            if place.base is None:
                if (decl_class, place.field_name) in opmodels.EXTERNAL_STATIC_CONSTANTS:
                    raise LoweringError(
                        f"cannot assign modeled constant {decl_class}.{place.field_name}", pos
                    )
                gname = f"{decl_class}::{place.field_name}"
                self.ctx.program.globals.setdefault(gname, lower_type(fld.type))
                return g.Symbol(gname, lower_type(fld.type)), fld.type
            member = g.Member(
                self.sym(place.base.name, pos), decl_class, place.field_name, lower_type(fld.type)
            )
            return member, fld.type
        if isinstance(place, j.ArrayRef):
            base_t = self.jenv.get(place.base.name)
            if not isinstance(base_t, j.ArrJType):
                raise LoweringError(f"{place.base.name} is not an array", pos)
            idx = self.lower_value(place.index, j.J_INT, pos)
            return g.Index(self.sym(place.base.name, pos), idx), base_t.elem
        raise LoweringError("bad assignment target", pos)

    # -- statements ------------------------------------------------------------

    def lower_statement(self, stmt: j.JimpleStmt) -> None:
        pos = stmt.pos
        if isinstance(stmt, j.DeclStmt):
            self.emit(g.Decl(stmt.name, lower_type(stmt.type), pos=pos))
            return
        if isinstance(stmt, j.IdentityStmt):
            self.lower_identity(stmt)
            return
        if isinstance(stmt, j.LabelStmt):
            self.emit(g.LabelI(stmt.name, pos=pos))
            return
        if isinstance(stmt, j.GotoStmt):
            self.emit(g.GotoI(stmt.label, pos=pos))
            return
        if isinstance(stmt, j.IfStmt):
            self.emit(g.IfI(self.lower_binop(stmt.cond, pos), stmt.label, pos=pos))
            return
        if isinstance(stmt, j.BreakpointStmt):
            self.emit(g.Skip(pos=pos))
            return
        if isinstance(stmt, j.ReturnStmt):
            value = None
            if stmt.value is not None:
                value = self.lower_value(stmt.value, self.method.return_type, pos)
            self.emit(g.ReturnI(value, pos=pos))
            return
        if isinstance(stmt, j.ThrowStmt):
            self.emit(g.ThrowI(self.lower_value(stmt.value, None, pos), pos=pos))
            return
        if isinstance(stmt, j.InvokeStmt):
            self.lower_invoke(None, None, stmt.invoke, pos)
            return
        if isinstance(stmt, j.AssignStmt):
            if isinstance(stmt.rhs, j.InvokeExpr):
                target, jt = self.lower_place(stmt.lhs, pos)
                if not isinstance(target, g.Symbol):
                    raise LoweringError("invoke results must bind to a local", pos)
                self.lower_invoke(target, jt, stmt.rhs, pos)
                return
            if isinstance(stmt.rhs, j.NewArrayExpr):
                target, jt = self.lower_place(stmt.lhs, pos)
                self.lower_newarray(target, stmt.rhs, pos)
                return
            target, jt = self.lower_place(stmt.lhs, pos)
            rhs = self.lower_value(stmt.rhs, jt, pos)
            self.emit(g.Assign(target, rhs, pos=pos))
            return
        raise LoweringError(f"unsupported statement {type(stmt).__name__}", pos)

    def lower_identity(self, stmt: j.IdentityStmt) -> None:
        pos = stmt.pos
        target = self.sym(stmt.local, pos)
        if stmt.source == "@this":
            if self.method.static:
                raise LoweringError("@this in a static method", pos)
            global_name = receiver_global(self.fn_name)
            rhs: g.Expr = g.Cast(
                g.Symbol(global_name, self.ctx.program.globals[global_name]),
                lower_type(stmt.type),
            )
        else:
            idx = int(stmt.source[len("@parameter") :])
            global_name = parameter_global(self.fn_name, idx)
            rhs = g.Symbol(global_name, self.ctx.program.globals[global_name])
        self.emit(g.Assign(target, rhs, pos=pos, atomic=True))

    def lower_newarray(self, target: g.Expr, rhs: j.NewArrayExpr, pos: SourcePos) -> None:
        elem = lower_type(rhs.elem)
        length = self.lower_value(rhs.size, j.J_INT, pos)
        self.emit(g.Assign(target, g.NewArray(elem, length), pos=pos))
        if not isinstance(target, g.Symbol):
            raise LoweringError("newarray result must bind to a local", pos)
        default: g.Expr
        if isinstance(elem, g.BoolType):
            default = g.Constant(0, g.BOOL_T)
        elif isinstance(elem, g.IntType):
            default = g.Constant(0, elem)
        else:
            default = g.Constant(None, elem if isinstance(elem, g.RefType) else g.RefType("java.lang.Object"))
        self.instrs.extend(
            array_init_model(target, g.Length(target), default, self.ctx, self, pos)
        )

    # -- calls -----------------------------------------------------------------

    def lower_invoke(
        self,
        lhs: g.Symbol | None,
        lhs_jt: j.JimpleType | None,
        inv: j.InvokeExpr,
        pos: SourcePos,
    ) -> None:
        sig = inv.sig
        res = opmodels.resolve_call(sig, self.ctx.table)
        if res.user is not None:
            decl_cls, method = res.user
            fn_name = self.ctx.mangled[signature_key(decl_cls.name, method)]
            pgs = self.ctx.param_globals[fn_name]
            call_args: list[g.Expr] = []
            writes: list[g.Instr] = []
            gi = 0
            if not method.static:
                if inv.base is None:
                    raise LoweringError(f"instance call to {sig} without receiver", pos)
                recv = self.sym(inv.base.name, pos)
                writes.append(
                    g.Assign(g.Symbol(pgs[gi], self.ctx.program.globals[pgs[gi]]), recv, pos=pos)
                )
                call_args.append(recv)
                gi += 1
            if len(inv.args) != len(method.params):
                raise LoweringError(f"arity mismatch calling {sig}", pos)
            for arg, pt in zip(inv.args, method.params):
                lowered = self.lower_value(arg, pt, pos)
                writes.append(
                    g.Assign(
                        g.Symbol(pgs[gi], self.ctx.program.globals[pgs[gi]]), lowered, pos=pos
                    )
                )
                call_args.append(lowered)
                gi += 1
            self.instrs.extend(writes)
            self.emit(g.Call(lhs, fn_name, tuple(call_args), pos=pos))
            return
        if res.model is not None:
            self.lower_model_call(lhs, lhs_jt, inv, res.model, pos)
            return
        # Unknown call: havoc the result and flag the run.
        self.ctx.program.unknown_calls.append((str(sig), pos))
        if lhs is not None:
            self.emit(g.Assign(lhs, g.Nondet(lower_type(sig.return_type)), pos=pos))
        else:
            self.emit(g.Skip(pos=pos))

    def lower_model_call(
        self,
        lhs: g.Symbol | None,
        lhs_jt: j.JimpleType | None,
        inv: j.InvokeExpr,
        model: opmodels.OperationalModel,
        pos: SourcePos,
    ) -> None:
        kind = model.kind
        if kind == opmodels.ModelKind.NONDET:
            if lhs is not None:
                self.emit(g.Assign(lhs, g.Nondet(lower_type(model.result_type)), pos=pos))
            else:
                self.emit(g.Skip(pos=pos))
            return
        if kind == opmodels.ModelKind.NONDET_BOUNDED:
            if lhs is None:
                self.emit(g.Skip(pos=pos))
                return
            bound = self.lower_value(inv.args[0], j.J_INT, pos)
            self.emit(g.Assign(lhs, g.Nondet(lower_type(model.result_type)), pos=pos))
            zero = g.Constant(0, g.INT32)
            in_range = g.Binary(
                "and", g.Binary("<=", zero, lhs), g.Binary("<", lhs, bound)
            )
            self.emit(g.AssumeI(in_range, pos=pos))
            return
        if kind == opmodels.ModelKind.ASSUME:
            cond = self.lower_value(inv.args[0], j.J_BOOLEAN, pos)
            self.emit(g.AssumeI(cond, pos=pos))
            return
        if kind == opmodels.ModelKind.ASSERT:
            cond = self.lower_value(inv.args[0], j.J_BOOLEAN, pos)
            self.emit(
                g.AssertI(cond, g.PropertyClass.USER_ASSERT, "user assertion", pos=pos)
            )
            return
        if kind == opmodels.ModelKind.ASSERT_NOT_NULL:
            arg = self.lower_value(inv.args[0], None, pos)
            null = g.Constant(None, g.RefType("java.lang.Object"))
            self.emit(
                g.AssertI(
                    g.Binary("!=", arg, null),
                    g.PropertyClass.NULL_DEREF,
                    "null check intrinsic",
                    pos=pos,
                )
            )
            if lhs is not None:
                self.emit(g.Assign(lhs, arg, pos=pos))
            return
        if kind == opmodels.ModelKind.NOOP:
            self.emit(g.Skip(pos=pos))
            if lhs is not None:
                self.emit(g.Assign(lhs, g.Nondet(lower_type(inv.sig.return_type)), pos=pos))
            return
        if kind == opmodels.ModelKind.SYNTHETIC_BODY:
            fn_name = _ensure_synthetic(model, self.ctx)
            pgs = self.ctx.param_globals[fn_name]
            call_args = []
            for i, (arg, pt) in enumerate(zip(inv.args, inv.sig.params)):
                lowered = self.lower_value(arg, pt, pos)
                self.emit(
                    g.Assign(g.Symbol(pgs[i], self.ctx.program.globals[pgs[i]]), lowered, pos=pos)
                )
                call_args.append(lowered)
            self.emit(g.Call(lhs, fn_name, tuple(call_args), pos=pos))
            return
        raise LoweringError(f"unhandled model kind {kind}", pos)

    # -- whole method ------------------------------------------------------------

    def run(self) -> g.GotoFunction:
        for stmt in self.method.body:
            self.lower_statement(stmt)
        for ins in self.instrs:
            if isinstance(ins, g.Decl) and ins.name not in self.decl_order:
                self.decl_order.append(ins.name)
        for name in reversed(self.decl_order):
            self.emit(g.Dead(name))
        self.emit(g.EndFunction())
        return g.GotoFunction(
            name=self.fn_name,
            body=self.instrs,
            param_globals=self.ctx.param_globals[self.fn_name],
            is_virtual=not self.method.static,
            return_type=lower_type(self.method.return_type),
            source=f"{self.cls.name}.{self.method.name}"
            + "(" + ",".join(j.type_name(p) for p in self.method.params) + ")",
        )


def lower_method(cls: j.JimpleClass, method: j.JimpleMethod, ctx: LoweringContext) -> g.GotoFunction:
    return _MethodLowering(cls, method, ctx).run()


# ---------------------------------------------------------------------------
# Array initialization model


def array_init_model(
    array_sym: g.Symbol,
    length: g.Expr,
    init_value: g.Expr,
    ctx: LoweringContext,
    method: _MethodLowering | None,
    pos: SourcePos,
) -> list[g.Instr]:
    """Element-initialization loop for a fresh array.

    An ordinary GOTO loop, so it participates in unrolling like source
    loops do.  Negative lengths are caught by the bounds obligation the
    instrumentation attaches to the allocation itself.
    """
    i_name = ctx.fresh_name("ai")
    head = ctx.fresh_name("ai_head")
    done = ctx.fresh_name("ai_done")
    i_sym = g.Symbol(i_name, g.INT32)
    if method is not None:
        method.env[i_name] = g.INT32
        method.jenv[i_name] = j.J_INT
    return [
        g.Decl(i_name, g.INT32, pos=pos),
        g.Assign(i_sym, g.Constant(0, g.INT32), pos=pos),
        g.LabelI(head, pos=pos),
        g.IfI(g.Binary(">=", i_sym, length), done, pos=pos),
        g.Assign(g.Index(array_sym, i_sym), init_value, pos=pos),
        g.Assign(i_sym, g.Binary("+", i_sym, g.Constant(1, g.INT32)), pos=pos),
        g.GotoI(head, pos=pos),
        g.LabelI(done, pos=pos),
    ]


def _ensure_synthetic(model: opmodels.OperationalModel, ctx: LoweringContext) -> str:
    name = model.synthetic_name
    if name in ctx.program.functions:
        return name
    if name == "#om::Arrays::fill_intArr_int":
        p0 = parameter_global(name, 0)
        p1 = parameter_global(name, 1)
        ctx.program.globals[p0] = g.ArrayType(g.INT32)
        ctx.program.globals[p1] = g.INT32
        ctx.param_globals[name] = (p0, p1)
        arr = g.Symbol("a", g.ArrayType(g.INT32))
        val = g.Symbol("v", g.INT32)
        i = g.Symbol("i", g.INT32)
        body: list[g.Instr] = [
            g.Decl("a", g.ArrayType(g.INT32)),
            g.Decl("v", g.INT32),
            g.Decl("i", g.INT32),
            g.Assign(arr, g.Symbol(p0, g.ArrayType(g.INT32)), atomic=True),
            g.Assign(val, g.Symbol(p1, g.INT32), atomic=True),
            g.Assign(i, g.Constant(0, g.INT32)),
            g.LabelI("head"),
            g.IfI(g.Binary(">=", i, g.Length(arr)), "done"),
            g.Assign(g.Index(arr, i), val),
            g.Assign(i, g.Binary("+", i, g.Constant(1, g.INT32))),
            g.GotoI("head"),
            g.LabelI("done"),
            g.ReturnI(None),
            g.Dead("a"),
            g.Dead("v"),
            g.Dead("i"),
            g.EndFunction(),
        ]
        fn = g.GotoFunction(
            name=name,
            body=body,
            param_globals=(p0, p1),
            return_type=g.VOID,
            source="java.util.Arrays.fill(int[],int)",
        )
        ctx.program.functions[name] = fn
        return name
    raise LoweringError(f"no synthetic body registered for {name}")
