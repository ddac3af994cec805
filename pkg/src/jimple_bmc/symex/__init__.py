"""Bounded symbolic execution: instrumentation, unrolling, VCs, replay."""

from .cfg import IrreducibleError, StepUnsupportedError, find_loops, unroll_function  # noqa: F401
from .exec import Executor, SymexError, unroll  # noqa: F401
from .instrument import Checks, instrument  # noqa: F401
from .replay import (  # noqa: F401
    InputExhausted,
    Interpreter,
    ListInputProvider,
    ReplayOutcome,
    ReplayViolation,
    replay,
)
from .ssa import (  # noqa: F401
    Counterexample,
    Equation,
    InputRecord,
    InputValue,
    Obligation,
    SsaEquationSet,
    TraceStep,
    ViolatedProperty,
)
from .vc import build_trace, encode_vc, first_violated  # noqa: F401
