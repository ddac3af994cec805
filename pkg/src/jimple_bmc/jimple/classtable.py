"""Class table: resolved hierarchy with method and field lookup."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .ast import JimpleClass, JimpleField, JimpleType


class ClassTableError(Exception):
    pass


@dataclass
class ClassTable:
    classes: dict[str, JimpleClass] = field(default_factory=dict)
    # Names the operational-model catalog claims to understand.
    is_modeled_external: Callable[[str], bool] = lambda name: False

    def superclass_chain(self, name: str) -> list[JimpleClass]:
        """The class itself followed by its in-table ancestors."""
        chain: list[JimpleClass] = []
        cur: Optional[str] = name
        while cur is not None and cur in self.classes:
            cls = self.classes[cur]
            chain.append(cls)
            cur = cls.superclass
        return chain

    def lookup_method(self, class_name: str, method: str, params: tuple[JimpleType, ...]):
        """Resolve (class, method, params) by walking the superclass chain.

        Returns (declaring class, method) or None when no user class
        declares it.
        """
        for cls in self.superclass_chain(class_name):
            for m in cls.methods:
                if m.name == method and m.params == params:
                    return cls, m
        return None

    def lookup_field(self, class_name: str, field_name: str):
        for cls in self.superclass_chain(class_name):
            for f in cls.fields:
                if f.name == field_name:
                    return cls, f
        return None

    def all_fields(self, class_name: str) -> list[tuple[JimpleClass, JimpleField]]:
        """Virtual fields, inherited first, in declaration order."""
        chain = self.superclass_chain(class_name)
        out: list[tuple[JimpleClass, JimpleField]] = []
        for cls in reversed(chain):
            for f in cls.fields:
                if not f.static:
                    out.append((cls, f))
        return out


def build_class_table(
    classes: list[JimpleClass],
    is_modeled_external: Callable[[str], bool] = lambda name: False,
) -> ClassTable:
    table = ClassTable(is_modeled_external=is_modeled_external)
    for cls in classes:
        if cls.name in table.classes:
            raise ClassTableError(f"duplicate class {cls.name}")
        table.classes[cls.name] = cls
    for cls in classes:
        sup = cls.superclass
        if sup is not None and sup not in table.classes and not is_modeled_external(sup):
            raise ClassTableError(
                f"unresolved superclass {sup} of {cls.name} (no operational model)"
            )
    _check_acyclic(table)
    return table


def _check_acyclic(table: ClassTable) -> None:
    for name in table.classes:
        seen = set()
        cur: Optional[str] = name
        while cur is not None and cur in table.classes:
            if cur in seen:
                raise ClassTableError(f"cyclic inheritance involving {cur}")
            seen.add(cur)
            cur = table.classes[cur].superclass
