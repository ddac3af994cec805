"""Exhaustive enumeration oracle for small formulas.

Deliberately independent of the SMT path: it never emits text and shares
only the term evaluator.  Used in tests to cross-check ``solve`` and to
freeze expected values.
"""

from __future__ import annotations

import itertools

from .formula import Formula, Model
from .terms import ArraySort, ArrayVal, BoolSort, BvSort, eval_term


class BruteForceLimitError(Exception):
    """Formula exceeds the enumeration limits; the oracle refuses."""


# Refuse enumerations larger than this many valuations.
_MAX_VALUATIONS = 1 << 22


def _domain(sort) -> list:
    if isinstance(sort, BoolSort):
        return [0, 1]
    if isinstance(sort, BvSort):
        return list(range(1 << sort.width))
    if isinstance(sort, ArraySort):
        cells = 1 << sort.index.width
        values = 1 << sort.elem.width
        tables = []
        for combo in itertools.product(range(values), repeat=cells):
            tables.append(ArrayVal(0, tuple(enumerate(combo))))
        return tables
    raise BruteForceLimitError(f"no enumerable domain for {sort}")


def brute_force(formula: Formula, width_limit: int = 8, symbol_limit: int = 4):
    """Enumerate every valuation; return ``Model`` for the first satisfying
    one or ``None`` when the formula is unsatisfiable.
    """
    names = []
    domains = []
    total = 1
    if len(formula.declarations) > symbol_limit:
        raise BruteForceLimitError(
            f"{len(formula.declarations)} symbols exceeds limit {symbol_limit}"
        )
    for name, sort in formula.declarations:
        if isinstance(sort, BvSort) and sort.width > width_limit:
            raise BruteForceLimitError(f"{name}: width {sort.width} exceeds limit {width_limit}")
        if isinstance(sort, ArraySort) and (
            sort.index.width > 3 or sort.elem.width > width_limit
        ):
            raise BruteForceLimitError(f"{name}: array sort {sort} too large to enumerate")
        dom = _domain(sort)
        total *= len(dom)
        if total > _MAX_VALUATIONS:
            raise BruteForceLimitError(f"valuation space exceeds {_MAX_VALUATIONS}")
        names.append(name)
        domains.append(dom)

    for combo in itertools.product(*domains):
        env = dict(zip(names, combo))
        if eval_term(formula.assertion, env):
            return Model(env)
    return None
