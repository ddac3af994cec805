"""Verification-condition encoding (C and not-P) and trace building."""

from __future__ import annotations

from ..goto.ir import PropertyClass
from ..solver import terms as t
from ..solver.formula import Formula, Model
from .ssa import (
    Counterexample,
    Equation,
    InputValue,
    Obligation,
    SsaEquationSet,
    TraceStep,
    ViolatedProperty,
)


def encode_vc(ssa: SsaEquationSet, obligations: list[Obligation] | None = None) -> Formula:
    """Conjunction of all equations with the disjunction of selected
    obligation violations; satisfiable iff one of them can fail in bound.

    With no obligations the assertion is plain ``false``: nothing can be
    violated, so the caller may skip the solver outright.
    """
    if obligations is None:
        obligations = ssa.property_obligations()
    conjuncts = [t.eq(t.Sym(e.sort, e.lhs), e.rhs) for e in ssa.equations]
    violation = t.disj([t.and_(o.guard, t.not_(o.claim)) for o in obligations])
    assertion = t.and_(t.conj(conjuncts), violation)
    decls = [(name, sort) for name, sort in t.free_symbols(assertion).items()]
    return Formula(decls, assertion)


def _ev(term: t.Term, env: dict) -> t.Value:
    return t.eval_term(term, env)


def _signed(value: int, sort: t.Sort):
    if isinstance(sort, t.BoolSort):
        return bool(value)
    if isinstance(sort, t.BvSort):
        return t.to_signed(value, sort.width)
    return value


def refine_direction(claim: t.Term, env: dict) -> PropertyClass | None:
    """Split the generic overflow class into overflow/underflow by the
    concrete wide result's direction; both sides of replay use this rule.
    """
    if isinstance(claim, t.Not) and isinstance(claim.a, t.OverflowPred):
        p = claim.a
        w = p.a.sort.width
        sa = t.to_signed(int(_ev(p.a, env)), w)
        sb = t.to_signed(int(_ev(p.b, env)), w)
        wide = {"add": sa + sb, "sub": sa - sb, "mul": sa * sb}[p.op]
        if wide < -(1 << (w - 1)):
            return PropertyClass.UNDERFLOW
        if wide > (1 << (w - 1)) - 1:
            return PropertyClass.OVERFLOW
    return None


def first_violated(
    model: Model, obligations: list[Obligation], env: dict | None = None
) -> Obligation | None:
    """The first (in emission order) selected obligation the model violates.

    Emission order equals execution order along the satisfying path, so
    this is the obligation a concrete replay hits first.
    """
    if env is None:
        env = dict(model.values)
    for o in sorted(obligations, key=lambda o: o.index):
        if o.discharged:
            continue
        if _ev(o.guard, env) and not _ev(o.claim, env):
            return o
    return None


def build_trace(
    model: Model, ssa: SsaEquationSet, obligations: list[Obligation] | None = None
) -> Counterexample:
    env = dict(model.values)
    selected = obligations if obligations is not None else ssa.property_obligations()
    violated = first_violated(model, selected, env)
    if violated is None:
        raise ValueError("model does not violate any selected obligation")
    cls = violated.property_class
    refined = refine_direction(violated.claim, env)
    if cls in (PropertyClass.OVERFLOW, PropertyClass.UNDERFLOW) and refined is not None:
        cls = refined

    steps: list[TraceStep] = []
    for e in ssa.equations:
        if e.seq > violated.seq:
            break
        if e.kind in ("phi", "guard"):
            continue
        if not _ev(e.guard, env):
            continue
        value = env.get(e.lhs)
        if isinstance(e.rhs, t.Store):
            value = _ev(e.rhs.value, env)
            sort = e.rhs.value.sort
        else:
            sort = e.sort
        if isinstance(value, t.ArrayVal):
            continue
        steps.append(TraceStep(e.pos, e.display, _signed(int(value), sort), e.lhs))

    inputs: list[InputValue] = []
    for rec in ssa.inputs:
        if rec.guard is not None and not _ev(rec.guard, env):
            continue
        raw = env.get(rec.name, 0)
        if rec.kind == "scalar":
            inputs.append(
                InputValue(display=rec.display, kind="scalar", value=_signed(int(raw), rec.sort))
            )
        elif rec.kind == "ref":
            iv = InputValue(display=rec.display, kind="ref", is_null=(int(raw) == 0))
            if not iv.is_null:
                iv.fields = _object_fields(model, ssa, rec.class_name, rec.object_id)
            inputs.append(iv)
        else:
            iv = InputValue(display=rec.display, kind="array", is_null=(int(raw) == 0))
            if not iv.is_null:
                length = env.get(rec.length_input, 0)
                iv.length = t.to_signed(int(length), 32)
                iv.elements, iv.elem_default = _array_contents(model, ssa, rec)
            inputs.append(iv)

    return Counterexample(
        entry=ssa.entry,
        bound=ssa.bound,
        inputs=inputs,
        steps=steps,
        violated=ViolatedProperty(cls, violated.pos, violated.message),
    )


def _object_fields(model: Model, ssa: SsaEquationSet, class_name: str, obj: int) -> dict[str, int]:
    """Scalar field values of a nondet object, read from the initial heap."""
    out: dict[str, int] = {}
    for arr_name, sort in ssa.initial_arrays.items():
        if not arr_name.startswith("#field::"):
            continue
        stem = arr_name[len("#field::") : -2]  # strip trailing #0
        cls, _, fname = stem.rpartition("::")
        val = model.values.get(arr_name)
        if isinstance(val, t.ArrayVal):
            assert isinstance(sort, t.ArraySort)
            out[f"{cls}.{fname}"] = t.to_signed(val.get(obj), sort.elem.width)
    return out


def _array_contents(model: Model, ssa: SsaEquationSet, rec) -> tuple[dict[int, int], int]:
    arr_name = f"#elems::{rec.elem_text}#0"
    val = model.values.get(arr_name)
    width = int(rec.elem_text[2:])
    if not isinstance(val, t.ArrayVal):
        return {}, 0
    out: dict[int, int] = {}
    for key, stored in val.entries:
        if key >> 32 == rec.object_id:
            out[key & 0xFFFFFFFF] = t.to_signed(stored, width)
    return out, t.to_signed(val.default, width)
