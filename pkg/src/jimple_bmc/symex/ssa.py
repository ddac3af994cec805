"""Single-assignment constraint system produced by symbolic execution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..goto.ir import PropertyClass
from ..solver.terms import Sort, Term
from ..source import SourcePos, UNKNOWN_POS


@dataclass
class Equation:
    """One conjunct of C: ``lhs = rhs`` with the path guard it was emitted under.

    The guard is bookkeeping for counterexample traces (an equation "ran"
    when its guard holds in the model); the constraint itself is
    unconditional, which is sound because each SSA symbol has exactly one
    defining equation and is only consumed by same-path terms and phis.
    """

    lhs: str
    sort: Sort
    rhs: Term
    guard: Term
    pos: SourcePos = UNKNOWN_POS
    kind: str = "assign"  # assign | havoc | phi | call | guard
    display: str = ""
    seq: int = 0  # emission order shared with obligations


@dataclass
class Obligation:
    """A property claim: violated iff guard holds and claim fails."""

    guard: Term
    claim: Term
    property_class: PropertyClass
    pos: SourcePos
    message: str
    index: int
    discharged: bool = False  # claim folded to a constant during execution
    seq: int = 0  # emission order shared with equations


@dataclass
class InputRecord:
    """A nondeterministic input introduced during execution, in emission order.

    The guard records the path condition at the introduction site, so a
    trace can keep exactly the inputs the concrete replay will consume.
    """

    name: str  # solver symbol
    sort: Sort
    display: str
    kind: str  # scalar | ref | array
    pos: SourcePos = UNKNOWN_POS
    class_name: str = ""  # ref inputs: class of the fresh object
    object_id: int = 0  # ref/array inputs: allocated id of the fresh object
    length_input: str = ""  # array inputs: symbol holding the fresh length
    elem_text: str = ""  # array inputs: element type, printable
    guard: Optional[Term] = None  # path condition at introduction


@dataclass
class SsaEquationSet:
    entry: str
    bound: int
    equations: list[Equation] = field(default_factory=list)
    obligations: list[Obligation] = field(default_factory=list)
    inputs: list[InputRecord] = field(default_factory=list)
    # Unconstrained heap arrays (version-0 symbols) with their sorts;
    # nondet object fields and nondet array contents live here.
    initial_arrays: dict[str, Sort] = field(default_factory=dict)
    incomplete: list[str] = field(default_factory=list)  # recursion cuts etc.

    def property_obligations(self) -> list[Obligation]:
        return [
            o
            for o in self.obligations
            if o.property_class is not PropertyClass.UNWINDING and not o.discharged
        ]

    def unwinding_obligations(self) -> list[Obligation]:
        return [
            o
            for o in self.obligations
            if o.property_class is PropertyClass.UNWINDING and not o.discharged
        ]


# ---------------------------------------------------------------------------
# Counterexamples


@dataclass
class TraceStep:
    pos: SourcePos
    symbol: str  # source-level display name
    value: object  # signed int / bool / reference tag
    ssa_name: str = ""


@dataclass
class ViolatedProperty:
    property_class: PropertyClass
    pos: SourcePos
    message: str


@dataclass
class InputValue:
    """Replayable value of one nondet input, in consumption order."""

    display: str
    kind: str  # scalar | ref | array
    value: int = 0  # scalar value (signed)
    is_null: bool = False
    fields: dict[str, int] = field(default_factory=dict)  # ref: field values
    length: int = 0  # array
    elements: dict[int, int] = field(default_factory=dict)
    elem_default: int = 0


@dataclass
class Counterexample:
    entry: str
    bound: int
    inputs: list[InputValue]
    steps: list[TraceStep]
    violated: ViolatedProperty

    def input_summary(self) -> str:
        parts = []
        for iv in self.inputs:
            if iv.kind == "scalar":
                parts.append(f"{iv.display}={iv.value}")
            elif iv.kind == "ref":
                parts.append(f"{iv.display}={'null' if iv.is_null else 'object' + str(iv.fields)}")
            else:
                parts.append(
                    f"{iv.display}={'null' if iv.is_null else f'array(len={iv.length})'}"
                )
        return ", ".join(parts)
