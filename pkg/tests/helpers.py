"""Shared test machinery: pipeline shortcuts, an exhaustive concrete
oracle, and a random generator of small GOTO programs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from jimple_bmc import opmodels
from jimple_bmc.driver import RunConfig, Verdict, verify
from jimple_bmc.goto import ir as g
from jimple_bmc.jimple import build_class_table, parse_class
from jimple_bmc.lowering import LoweringContext, lower_program
from jimple_bmc.symex import Checks, instrument
from jimple_bmc.symex.replay import InputExhausted, Interpreter
from jimple_bmc.symex.ssa import InputValue

FIXTURES = Path(__file__).parent / "fixtures"


def lower_text(text: str, filename: str = "<test>") -> LoweringContext:
    cls = parse_class(text, filename)
    table = build_class_table([cls], is_modeled_external=opmodels.is_modeled_class)
    return lower_program(table)


def lower_files(*names: str) -> LoweringContext:
    classes = [parse_class((FIXTURES / n).read_text(), n) for n in names]
    table = build_class_table(classes, is_modeled_external=opmodels.is_modeled_class)
    return lower_program(table)


def instrumented(ctx: LoweringContext, **kw) -> g.GotoProgram:
    return instrument(ctx.program, Checks(**kw))


def verify_files(
    tmp_path, texts: dict[str, str] | None = None, files: list[str] | None = None, **cfg
) -> Verdict:
    paths: list[str] = []
    if texts:
        for name, text in texts.items():
            p = tmp_path / name
            p.write_text(text)
            paths.append(str(p))
    if files:
        paths.extend(str(FIXTURES / f) for f in files)
    defaults = dict(paths=paths)
    defaults.update(cfg)
    return verify(RunConfig(**defaults))


# ---------------------------------------------------------------------------
# Exhaustive concrete oracle


@dataclass
class OracleVerdict:
    violated: bool
    classes: set  # property classes seen across violating inputs
    runs: int = 0


class _RecordingProvider:
    def __init__(self, prefix: list[InputValue]):
        self.prefix = prefix
        self.pos = 0
        self.requested: g.GotoType | None = None

    def next_value(self, gtype: g.GotoType, display: str) -> InputValue:
        if self.pos >= len(self.prefix):
            self.requested = gtype
            raise InputExhausted(gtype, display)
        v = self.prefix[self.pos]
        self.pos += 1
        return v


def _domain(gtype: g.GotoType) -> list[InputValue]:
    if isinstance(gtype, g.BoolType):
        return [InputValue("b", "scalar", value=0), InputValue("b", "scalar", value=1)]
    if isinstance(gtype, g.IntType):
        lo, hi = -(1 << (gtype.width - 1)), (1 << (gtype.width - 1)) - 1
        return [InputValue("x", "scalar", value=v) for v in range(lo, hi + 1)]
    raise ValueError(f"oracle cannot enumerate {gtype}")


def exhaustive_oracle(
    program: g.GotoProgram, entry: str, max_steps: int = 20_000
) -> OracleVerdict:
    """Run the concrete interpreter over every input valuation (DFS over
    the tree of nondet requests).  Programs must only draw small scalar
    inputs.  Completely independent of the solver pipeline.
    """
    verdict = OracleVerdict(False, set())

    def explore(prefix: list[InputValue]) -> None:
        provider = _RecordingProvider(prefix)
        interp = Interpreter(program, provider, max_steps=max_steps)
        try:
            out = interp.run(entry)
        except InputExhausted:
            for v in _domain(provider.requested):
                explore(prefix + [v])
            return
        verdict.runs += 1
        if out.kind == "violation":
            verdict.violated = True
            verdict.classes.add(out.violated.property_class)
        elif out.kind == "bound-exhausted":
            raise AssertionError("oracle program exceeded the step budget")

    explore([])
    return verdict


# ---------------------------------------------------------------------------
# Random small-width GOTO programs

I4 = g.IntType(4)


def _c4(v: int) -> g.Constant:
    return g.Constant(((v + 8) & 15) - 8, I4)


class ProgramGen:
    """Random straight-line/branch/loop programs over <=3 width-4 vars.

    Shape guarantees: at most one loop, constant trip count <= 4, every
    nondet input is a 4-bit scalar, optional single array of length <= 4
    written before it is read.
    """

    def __init__(self, rng: random.Random):
        self.rng = rng
        self._label_n = 0

    def _fresh_label(self, stem: str) -> str:
        self._label_n += 1
        return f"{stem}{self._label_n}" 

    def generate(self) -> g.GotoProgram:
        rng = self.rng
        names = ["a", "b", "c"][: rng.randint(2, 3)]
        body: list[g.Instr] = [g.Decl(n, I4) for n in names]
        nondet_count = rng.randint(1, 2)
        for n in names[:nondet_count]:
            body.append(g.Assign(self._sym(n), g.Nondet(I4)))
        for n in names[nondet_count:]:
            body.append(g.Assign(self._sym(n), _c4(rng.randint(-8, 7))))

        use_array = rng.random() < 0.35
        if use_array:
            body.append(g.Decl("arr", g.ArrayType(I4)))
            length = rng.choice([1, 2, 3, 4])
            body.append(
                g.Assign(g.Symbol("arr", g.ArrayType(I4)), g.NewArray(I4, _c4(length)))
            )
            # Keep allocation semantics simple: fill it immediately.
            for i in range(length):
                body.append(
                    g.Assign(
                        g.Index(g.Symbol("arr", g.ArrayType(I4)), _c4(i)),
                        self._rand_operand(names),
                    )
                )

        stmts = rng.randint(2, 5)
        for _ in range(stmts):
            body.extend(self._rand_stmt(names, use_array))

        if rng.random() < 0.5:
            body.extend(self._rand_loop(names))

        body.append(g.ReturnI(None))
        for n in names:
            body.append(g.Dead(n))
        body.append(g.EndFunction())
        fn = g.GotoFunction("main_void", body, return_type=g.VOID, source="gen.main()")
        return g.GotoProgram(functions={fn.name: fn})

    def _sym(self, n: str) -> g.Symbol:
        return g.Symbol(n, I4)

    def _rand_operand(self, names: list[str]) -> g.Expr:
        if self.rng.random() < 0.3:
            return _c4(self.rng.randint(-8, 7))
        return self._sym(self.rng.choice(names))

    def _rand_expr(self, names: list[str]) -> g.Expr:
        op = self.rng.choice(["+", "-", "*", "/", "%", "bitand", "bitor", "bitxor", "shl", "ushr"])
        return g.Binary(op, self._rand_operand(names), self._rand_operand(names))

    def _rand_cond(self, names: list[str]) -> g.Expr:
        op = self.rng.choice(["<", "<=", ">", ">=", "==", "!="])
        return g.Binary(op, self._rand_operand(names), self._rand_operand(names))

    def _rand_stmt(self, names: list[str], use_array: bool) -> list[g.Instr]:
        rng = self.rng
        kind = rng.random()
        target = self._sym(rng.choice(names))
        if use_array and kind < 0.25:
            arr = g.Symbol("arr", g.ArrayType(I4))
            if rng.random() < 0.5:
                return [g.Assign(target, g.Index(arr, self._rand_operand(names)))]
            return [g.Assign(g.Index(arr, self._rand_operand(names)), self._rand_operand(names))]
        if kind < 0.7:
            return [g.Assign(target, self._rand_expr(names))]
        # Forward branch over one assignment.
        label = self._fresh_label("S")
        return [
            g.IfI(self._rand_cond(names), label),
            g.Assign(target, self._rand_expr(names)),
            g.LabelI(label),
        ]

    def _rand_loop(self, names: list[str]) -> list[g.Instr]:
        rng = self.rng
        trip = rng.randint(1, 4)
        i_sym = g.Symbol("i", I4)
        head = self._fresh_label("H")
        done = self._fresh_label("D")
        body_assign = g.Assign(self._sym(rng.choice(names)), self._rand_expr(names + ["i"]))
        return [
            g.Decl("i", I4),
            g.Assign(i_sym, _c4(0)),
            g.LabelI(head),
            g.IfI(g.Binary(">=", i_sym, _c4(trip)), done),
            body_assign,
            g.Assign(i_sym, g.Binary("+", i_sym, _c4(1))),
            g.GotoI(head),
            g.LabelI(done),
            g.Dead("i"),
        ]
