"""jimple-bmc: a bounded model checker for Jimple programs.

Pipeline: textual Jimple (Soot output) -> typed AST -> GOTO program ->
property instrumentation -> bounded symbolic execution into SSA ->
bit-vector VC (C and not-P) -> SMT solver -> replay-validated
counterexample or safety verdict.
"""

__version__ = "0.1.0"
