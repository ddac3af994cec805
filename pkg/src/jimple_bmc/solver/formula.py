"""Formula and model containers for the solver interface."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    ArraySort,
    ArrayVal,
    BoolSort,
    BvSort,
    Sort,
    SortError,
    Term,
    Value,
    eval_term,
    free_symbols,
)


@dataclass
class Formula:
    """A closed boolean assertion over declared symbols."""

    declarations: list[tuple[str, Sort]]
    assertion: Term

    def __post_init__(self) -> None:
        if not isinstance(self.assertion.sort, BoolSort):
            raise SortError("formula assertion must be boolean")
        declared = dict(self.declarations)
        for name, sort in free_symbols(self.assertion).items():
            if name not in declared:
                raise SortError(f"free symbol {name} not declared")
            if declared[name] != sort:
                raise SortError(f"symbol {name} declared {declared[name]}, used {sort}")


@dataclass
class Model:
    """Total assignment of declared symbols to concrete values."""

    values: dict[str, Value] = field(default_factory=dict)

    def get(self, name: str) -> Value:
        return self.values[name]

    def satisfies(self, formula: Formula) -> bool:
        env = dict(self.values)
        return bool(eval_term(formula.assertion, env))


def default_value(sort: Sort) -> Value:
    if isinstance(sort, (BvSort, BoolSort)):
        return 0
    if isinstance(sort, ArraySort):
        return ArrayVal(0)
    raise SortError(f"no default for {sort}")


def complete_model(model: Model, formula: Formula) -> Model:
    """Fill any symbols the solver left unconstrained with zero values."""
    for name, sort in formula.declarations:
        if name not in model.values:
            model.values[name] = default_value(sort)
    return model
