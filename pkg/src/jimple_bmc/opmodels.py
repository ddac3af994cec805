"""Operational models for the library subset the benchmarks exercise.

Three model kinds exist:

- intrinsic models lower directly into instructions or expressions at
  conversion time (nondet sources, assume/assert, null-check helpers,
  no-op I/O);
- synthetic bodies are small generated GOTO functions called through the
  normal parameter-global convention (array fill);
- everything else is unknown: the call's result is havocked and the run
  is flagged, downgrading a clean verdict to "safe modulo unknown calls".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .jimple.ast import (
    ArrJType,
    J_BOOLEAN,
    J_BYTE,
    J_CHAR,
    J_INT,
    J_LONG,
    J_SHORT,
    JimpleType,
    MethodSig,
    RefJType,
)


class ModelKind(enum.Enum):
    NONDET = "nondet"
    NONDET_BOUNDED = "nondet-bounded"  # nextInt(bound): result in [0, bound)
    ASSUME = "assume"
    ASSERT = "assert"
    ASSERT_NOT_NULL = "assert-not-null"
    NOOP = "noop"
    SYNTHETIC_BODY = "synthetic-body"


@dataclass(frozen=True)
class OperationalModel:
    class_name: str
    method_name: str
    params: Optional[tuple[JimpleType, ...]]  # None matches any signature
    kind: ModelKind
    result_type: Optional[JimpleType] = None  # for havoc/nondet kinds
    synthetic_name: str = ""

    def matches(self, sig: MethodSig) -> bool:
        if sig.class_name != self.class_name or sig.name != self.method_name:
            return False
        return self.params is None or sig.params == self.params


_VERIFIER_CLASSES = ("Verifier", "org.sosy_lab.sv_benchmarks.Verifier")
_INTRINSICS = "kotlin.jvm.internal.Intrinsics"

# Classes we understand well enough to allow as superclasses, receivers of
# modeled calls, or throwable values.  Anything in java.lang.* is also
# accepted as an opaque external.
EXTERNAL_CLASSES = {
    "java.lang.Object",
    "java.lang.String",
    "java.lang.System",
    "java.lang.Throwable",
    "java.lang.Exception",
    "java.lang.RuntimeException",
    "java.lang.Error",
    "java.lang.AssertionError",
    "java.lang.IllegalArgumentException",
    "java.lang.IllegalStateException",
    "java.lang.ArithmeticException",
    "java.lang.IndexOutOfBoundsException",
    "java.lang.ArrayIndexOutOfBoundsException",
    "java.lang.NullPointerException",
    "java.lang.NegativeArraySizeException",
    "java.io.PrintStream",
    "java.util.Random",
    "java.util.Arrays",
    _INTRINSICS,
    "kotlin._Assertions",
    *_VERIFIER_CLASSES,
}

# Static fields of external classes that read as compile-time constants.
# kotlinc guards `assert` bodies with _Assertions.ENABLED; modeling it as
# true keeps those assertions live.
EXTERNAL_STATIC_CONSTANTS: dict[tuple[str, str], int] = {
    ("kotlin._Assertions", "ENABLED"): 1,
}

_OBJ = RefJType("java.lang.Object")


def _verifier_models() -> list[OperationalModel]:
    out = []
    for cls in _VERIFIER_CLASSES:
        out += [
            OperationalModel(cls, "assume", (J_BOOLEAN,), ModelKind.ASSUME),
            OperationalModel(cls, "assert", (J_BOOLEAN,), ModelKind.ASSERT),
            OperationalModel(cls, "assertTrue", (J_BOOLEAN,), ModelKind.ASSERT),
            OperationalModel(cls, "nondetInt", (), ModelKind.NONDET, J_INT),
            OperationalModel(cls, "nondetLong", (), ModelKind.NONDET, J_LONG),
            OperationalModel(cls, "nondetShort", (), ModelKind.NONDET, J_SHORT),
            OperationalModel(cls, "nondetByte", (), ModelKind.NONDET, J_BYTE),
            OperationalModel(cls, "nondetChar", (), ModelKind.NONDET, J_CHAR),
            OperationalModel(cls, "nondetBoolean", (), ModelKind.NONDET, J_BOOLEAN),
        ]
    return out


def builtin_verifier_intrinsics() -> list[OperationalModel]:
    """Assume/assert entry points plus the kotlinc-emitted runtime helpers."""
    out = _verifier_models()
    for helper in (
        "checkNotNull",
        "checkNotNullParameter",
        "checkParameterIsNotNull",
        "checkNotNullExpressionValue",
        "checkExpressionValueIsNotNull",
    ):
        out.append(OperationalModel(_INTRINSICS, helper, None, ModelKind.ASSERT_NOT_NULL))
    return out


def _catalog() -> list[OperationalModel]:
    rng = "java.util.Random"
    ps = "java.io.PrintStream"
    out = builtin_verifier_intrinsics()
    out += [
        OperationalModel(rng, "<init>", None, ModelKind.NOOP),
        OperationalModel(rng, "nextInt", (), ModelKind.NONDET, J_INT),
        OperationalModel(rng, "nextInt", (J_INT,), ModelKind.NONDET_BOUNDED, J_INT),
        OperationalModel(rng, "nextBoolean", (), ModelKind.NONDET, J_BOOLEAN),
        OperationalModel(rng, "nextLong", (), ModelKind.NONDET, J_LONG),
        OperationalModel(
            "java.util.Arrays",
            "fill",
            (ArrJType(J_INT), J_INT),
            ModelKind.SYNTHETIC_BODY,
            synthetic_name="#om::Arrays::fill_intArr_int",
        ),
    ]
    for printer in ("println", "print"):
        out.append(OperationalModel(ps, printer, None, ModelKind.NOOP))
    return out


CATALOG: list[OperationalModel] = _catalog()


def is_modeled_class(name: str) -> bool:
    return name in EXTERNAL_CLASSES or name.startswith("java.lang.")


def find_model(sig: MethodSig) -> Optional[OperationalModel]:
    """Catalog lookup; at most one entry matches a signature by construction."""
    for m in CATALOG:
        if m.matches(sig):
            return m
    # Constructors of any modeled external class are no-ops.
    if sig.name == "<init>" and is_modeled_class(sig.class_name):
        return OperationalModel(sig.class_name, "<init>", None, ModelKind.NOOP)
    return None


@dataclass(frozen=True)
class Resolution:
    """Outcome of resolve_call: exactly one of the fields is set."""

    user: Optional[tuple] = None  # (JimpleClass, JimpleMethod)
    model: Optional[OperationalModel] = None

    @property
    def unknown(self) -> bool:
        return self.user is None and self.model is None


def resolve_call(sig: MethodSig, table) -> Resolution:
    """User functions shadow the catalog; the catalog shadows unknown."""
    found = table.lookup_method(sig.class_name, sig.name, sig.params)
    if found is not None and found[1].has_body:
        return Resolution(user=found)
    model = find_model(sig)
    if model is not None:
        return Resolution(model=model)
    return Resolution()


def describe_catalog() -> list[str]:
    """Human-readable catalog dump for --list-models."""
    out = []
    for m in CATALOG:
        params = "..." if m.params is None else ", ".join(p and _tn(p) for p in m.params)
        out.append(f"{m.class_name}.{m.method_name}({params}) -> {m.kind.value}")
    for (cls, fld), val in EXTERNAL_STATIC_CONSTANTS.items():
        out.append(f"{cls}.{fld} == {val}")
    return out


def _tn(t: JimpleType) -> str:
    from .jimple.ast import type_name

    return type_name(t)
