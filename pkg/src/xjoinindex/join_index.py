"""Join index construction: dimension attributes migrated into fact cells.

Each indexed cell keeps its measures and, for every dimension reference,
the member id together with a verbatim copy of that member's attributes.
Queries over the index therefore never touch the dimension members.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DanglingReferenceError
from .model import SchemaMeta, Warehouse


@dataclass(frozen=True)
class IndexedDimension:
    dimension: str
    member_id: str
    attributes: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class IndexedCell:
    measures: tuple[tuple[str, float], ...]
    dims: tuple[IndexedDimension, ...]


@dataclass(frozen=True)
class JoinIndex:
    schema: SchemaMeta
    cells: tuple[IndexedCell, ...] = ()


@dataclass
class BuildCounter:
    """Work done by :func:`build_index`: one step per dimension reference
    resolved plus one per attribute copied."""

    steps: int = 0


@dataclass(frozen=True)
class IndexStats:
    cell_count: int
    dims_per_cell: int
    attrs_per_dimension: dict[str, int] = field(default_factory=dict)
    estimated_serialized_size: int = 0


def build_index(warehouse: Warehouse, counter: BuildCounter | None = None) -> JoinIndex:
    """Expand every fact cell with the attributes of the members it references.

    Cell order and measure values are kept as-is.  The source warehouse is
    not modified.

    Raises:
        DanglingReferenceError: a cell references a member (or dimension)
            that does not exist.  Cells are numbered from 1.
    """
    tables = {d.name: warehouse.member_table(d.name) for d in warehouse.schema.dimensions}
    # Identical (dimension, member) pairs share one IndexedDimension object.
    expanded: dict[tuple[str, str], IndexedDimension] = {}
    cells = []
    steps = 0
    for ordinal, fact in enumerate(warehouse.facts, start=1):
        dims = []
        for dim, member_id in fact.dim_refs:
            key = (dim, member_id)
            entry = expanded.get(key)
            if entry is None:
                table = tables.get(dim)
                member = table.get(member_id) if table is not None else None
                if member is None:
                    raise DanglingReferenceError(dim, member_id, ordinal)
                entry = expanded[key] = IndexedDimension(dim, member_id, member.attributes)
            steps += 1 + len(entry.attributes)
            dims.append(entry)
        cells.append(IndexedCell(fact.measures, tuple(dims)))
    if counter is not None:
        counter.steps += steps
    return JoinIndex(warehouse.schema, tuple(cells))


def index_stats(index: JoinIndex) -> IndexStats:
    from .xcube_io import render_index_cell, INDEX_PROLOGUE, INDEX_EPILOGUE

    dims_per_cell = 0
    attrs: dict[str, int] = {}
    size = len(INDEX_PROLOGUE) + len(INDEX_EPILOGUE)
    for cell in index.cells:
        dims_per_cell = max(dims_per_cell, len(cell.dims))
        for d in cell.dims:
            if len(d.attributes) > attrs.get(d.dimension, -1):
                attrs[d.dimension] = len(d.attributes)
        size += len(render_index_cell(cell).encode("utf-8"))
    if not index.cells:
        size = 0
    return IndexStats(len(index.cells), dims_per_cell, attrs, size)
