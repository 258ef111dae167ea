"""In-memory star schema mirroring the Schema/Dimensions/Facts documents."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .errors import UnknownDimensionError


@dataclass(frozen=True)
class DimensionDef:
    name: str
    attribute_names: tuple[str, ...]


@dataclass(frozen=True)
class SchemaMeta:
    fact_name: str
    measures: tuple[str, ...]
    dimensions: tuple[DimensionDef, ...]

    @property
    def dimension_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    def dimension(self, name: str) -> DimensionDef:
        for d in self.dimensions:
            if d.name == name:
                return d
        raise UnknownDimensionError(name)


@dataclass(frozen=True)
class DimensionMember:
    member_id: str
    attributes: tuple[tuple[str, str], ...]

    def attribute(self, name: str) -> str | None:
        for n, v in self.attributes:
            if n == name:
                return v
        return None


@dataclass(frozen=True)
class FactCell:
    measures: tuple[tuple[str, float], ...]
    dim_refs: tuple[tuple[str, str], ...]

    def measure(self, name: str) -> float | None:
        for n, v in self.measures:
            if n == name:
                return v
        return None


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    cell: int | None = None
    dimension: str | None = None
    member_id: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]


@dataclass(frozen=True)
class Warehouse:
    """Schema metadata, dimension members and fact cells.

    ``dimensions`` maps each dimension name to its members in document
    order.  Instances are treated as immutable; the member lookup table is
    built on first use and cached.
    """

    schema: SchemaMeta
    dimensions: Mapping[str, tuple[DimensionMember, ...]] = field(default_factory=dict)
    facts: tuple[FactCell, ...] = ()

    @cached_property
    def _member_tables(self) -> dict[str, dict[str, DimensionMember]]:
        tables = {}
        for d in self.schema.dimensions:
            table = {}
            for m in self.dimensions.get(d.name, ()):
                table.setdefault(m.member_id, m)  # first occurrence wins on duplicates
            tables[d.name] = table
        return tables

    def member_table(self, dimension: str) -> dict[str, DimensionMember]:
        try:
            return self._member_tables[dimension]
        except KeyError:
            raise UnknownDimensionError(dimension) from None

    def __eq__(self, other):
        if not isinstance(other, Warehouse):
            return NotImplemented
        return (
            self.schema == other.schema
            and dict(self.dimensions) == dict(other.dimensions)
            and self.facts == other.facts
        )

    __hash__ = None


def empty_warehouse(fact_name: str = "facts") -> Warehouse:
    return Warehouse(SchemaMeta(fact_name, (), ()), {}, ())


def lookup_member(warehouse: Warehouse, dimension: str, member_id: str) -> DimensionMember | None:
    """Return the member ``member_id`` of ``dimension``, or None when absent.

    Raises:
        UnknownDimensionError: if the schema does not declare ``dimension``.
    """
    return warehouse.member_table(dimension).get(member_id)


def validate(warehouse: Warehouse) -> ValidationReport:
    """Check schema, member and fact invariants; violations are returned, never raised."""
    out: list[Violation] = []
    schema = warehouse.schema

    for name, count in Counter(schema.measures).items():
        if not name:
            out.append(Violation("schema", "empty measure name"))
        elif count > 1:
            out.append(Violation("schema", f"duplicate measure {name!r}"))
    for name, count in Counter(schema.dimension_names).items():
        if not name:
            out.append(Violation("schema", "empty dimension name"))
        elif count > 1:
            out.append(Violation("schema", f"duplicate dimension {name!r}", dimension=name))
    for d in schema.dimensions:
        for attr, count in Counter(d.attribute_names).items():
            if count > 1:
                out.append(
                    Violation("schema", f"dimension {d.name!r}: duplicate attribute {attr!r}", dimension=d.name)
                )

    declared = set(schema.dimension_names)
    for name in warehouse.dimensions:
        if name not in declared:
            out.append(Violation("unknown_dimension", f"members given for undeclared dimension {name!r}", dimension=name))

    for d in schema.dimensions:
        expected = set(d.attribute_names)
        members = warehouse.dimensions.get(d.name, ())
        for member_id, count in Counter(m.member_id for m in members).items():
            if count > 1:
                out.append(
                    Violation(
                        "duplicate_member",
                        f"dimension {d.name!r}: member id {member_id!r} appears {count} times",
                        dimension=d.name,
                        member_id=member_id,
                    )
                )
        for m in members:
            names = [n for n, _ in m.attributes]
            if set(names) != expected or len(names) != len(expected):
                out.append(
                    Violation(
                        "attribute_mismatch",
                        f"dimension {d.name!r}: member {m.member_id!r} has attributes {names}, "
                        f"expected {list(d.attribute_names)}",
                        dimension=d.name,
                        member_id=m.member_id,
                    )
                )

    measures = set(schema.measures)
    tables = {d.name: warehouse.member_table(d.name) for d in schema.dimensions}
    for ordinal, cell in enumerate(warehouse.facts, start=1):
        if not cell.measures:
            out.append(Violation("measure_mismatch", f"cell {ordinal}: no measures", cell=ordinal))
        for mid, _ in cell.measures:
            if mid not in measures:
                out.append(Violation("measure_mismatch", f"cell {ordinal}: undeclared measure {mid!r}", cell=ordinal))
        seen = Counter(dim for dim, _ in cell.dim_refs)
        for d in schema.dimensions:
            if seen[d.name] != 1:
                out.append(
                    Violation(
                        "dimension_ref_count",
                        f"cell {ordinal}: {seen[d.name]} references to dimension {d.name!r}, expected 1",
                        cell=ordinal,
                        dimension=d.name,
                    )
                )
        for dim, member_id in cell.dim_refs:
            table = tables.get(dim)
            if table is None:
                out.append(
                    Violation("dimension_ref_count", f"cell {ordinal}: undeclared dimension {dim!r}", cell=ordinal, dimension=dim)
                )
            elif member_id not in table:
                out.append(
                    Violation(
                        "dangling_reference",
                        f"cell {ordinal}: dimension {dim!r} references missing member {member_id!r}",
                        cell=ordinal,
                        dimension=dim,
                        member_id=member_id,
                    )
                )
    return ValidationReport(tuple(out))
