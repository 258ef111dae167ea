"""Reading and writing the warehouse documents.

Four documents make up a warehouse on disk::

    Schema.xml      Schema[@fact]/measures/measure[@name]
                    Schema/dimensions/dimension[@name]/attribute[@name]
    Dimensions.xml  dimensionData/classification/Level[@node]/node[@id]/attribute[@name,@value]
    Facts.xml       CubeFact/cube/Cell/{fact[@id,@value], dimension[@id,@value]}
    Index.xml       CubeFact/cube/Cell/{fact[@id,@value], dimension[@id,@node]/attribute[@name,@value]}

Parsers are event driven (``iterparse``) and discard each ``Cell`` once it
has been converted, so memory per cell stays bounded.  Serializers emit
UTF-8 with a declaration and two-space indentation; equal inputs give
byte-identical output.
"""

from __future__ import annotations

import enum
import io
import os
import re
from pathlib import Path
from typing import BinaryIO, Union
from xml.etree import ElementTree as ET

from ._format import format_number
from .errors import MalformedXmlError, NumericParseError, XmlStructureError
from .join_index import IndexedCell, IndexedDimension, JoinIndex
from .model import DimensionDef, DimensionMember, FactCell, SchemaMeta, Warehouse

Source = Union[bytes, str, os.PathLike, BinaryIO]

SCHEMA_FILE = "Schema.xml"
DIMENSIONS_FILE = "Dimensions.xml"
FACTS_FILE = "Facts.xml"
INDEX_FILE = "Index.xml"

XML_DECL = '<?xml version="1.0" encoding="UTF-8"?>\n'
INDEX_PROLOGUE = XML_DECL + "<CubeFact>\n  <cube>\n"
INDEX_EPILOGUE = "  </cube>\n</CubeFact>\n"


class DocumentKind(enum.Enum):
    SCHEMA = "schema"
    DIMENSIONS = "dimensions"
    FACTS = "facts"
    INDEX = "index"

    @property
    def filename(self) -> str:
        return {
            DocumentKind.SCHEMA: SCHEMA_FILE,
            DocumentKind.DIMENSIONS: DIMENSIONS_FILE,
            DocumentKind.FACTS: FACTS_FILE,
            DocumentKind.INDEX: INDEX_FILE,
        }[self]


_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")

_ATTR_ESCAPES = {
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    '"': "&quot;",
    "\n": "&#10;",
    "\r": "&#13;",
    "\t": "&#9;",
}
_NEEDS_ESCAPE = re.compile(r'[&<>"\n\r\t]')


def escape_attr(value: str) -> str:
    if _NEEDS_ESCAPE.search(value) is None:
        return value
    return _NEEDS_ESCAPE.sub(lambda m: _ATTR_ESCAPES[m.group()], value)


def parse_number(raw: str) -> float:
    """Parse a decimal measure value; raises ValueError on anything else."""
    text = raw.strip()
    if not _NUMBER.match(text):
        raise ValueError(raw)
    return float(text)


# ---------------------------------------------------------------------------
# event plumbing
# ---------------------------------------------------------------------------


def _open(source: Source):
    if isinstance(source, (bytes, bytearray, memoryview)):
        return io.BytesIO(bytes(source)), False
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb"), True
    return source, False


def _events(source: Source):
    """Yield ``(event, element, depth)`` for start and end events.

    Non-whitespace text anywhere is a structural error.
    """
    stream, owned = _open(source)
    depth = 0
    try:
        for event, elem in ET.iterparse(stream, events=("start", "end")):
            if event == "start":
                depth += 1
                yield event, elem, depth
            else:
                if (elem.text and elem.text.strip()) or (elem.tail and elem.tail.strip()):
                    raise XmlStructureError(f"unexpected text content in <{elem.tag}>")
                yield event, elem, depth
                depth -= 1
    except ET.ParseError as exc:
        line, column = getattr(exc, "position", (None, None))
        raise MalformedXmlError(str(exc), line, column) from None
    finally:
        if owned:
            stream.close()


def _expect(elem, tag: str, parent: str | None = None):
    if elem.tag != tag:
        where = f" inside <{parent}>" if parent else ""
        raise XmlStructureError(f"expected {tag}{where}, found <{elem.tag}>")


def _attrs(elem, required: tuple[str, ...]) -> list[str]:
    attrib = elem.attrib
    for name in required:
        if name not in attrib:
            raise XmlStructureError(f"<{elem.tag}> missing @{name}")
    if len(attrib) != len(required):
        extra = next(a for a in attrib if a not in required)
        raise XmlStructureError(f"<{elem.tag}> has unexpected attribute @{extra}")
    return [attrib[name] for name in required]


# ---------------------------------------------------------------------------
# Schema.xml
# ---------------------------------------------------------------------------


def serialize_schema(schema: SchemaMeta) -> bytes:
    out = [XML_DECL, f'<Schema fact="{escape_attr(schema.fact_name)}">\n']
    if schema.measures:
        out.append("  <measures>\n")
        out.extend(f'    <measure name="{escape_attr(m)}"/>\n' for m in schema.measures)
        out.append("  </measures>\n")
    else:
        out.append("  <measures/>\n")
    if schema.dimensions:
        out.append("  <dimensions>\n")
        for d in schema.dimensions:
            if d.attribute_names:
                out.append(f'    <dimension name="{escape_attr(d.name)}">\n')
                out.extend(f'      <attribute name="{escape_attr(a)}"/>\n' for a in d.attribute_names)
                out.append("    </dimension>\n")
            else:
                out.append(f'    <dimension name="{escape_attr(d.name)}"/>\n')
        out.append("  </dimensions>\n")
    else:
        out.append("  <dimensions/>\n")
    out.append("</Schema>\n")
    return "".join(out).encode("utf-8")


def parse_schema(source: Source) -> SchemaMeta:
    """Parse Schema.xml.  At least one measure is required."""
    fact_name = None
    measures: list[str] = []
    dims: list[tuple[str, list[str]]] = []
    section = None
    seen_sections: set[str] = set()
    for event, elem, depth in _events(source):
        if event != "start":
            continue
        if depth == 1:
            _expect(elem, "Schema")
            (fact_name,) = _attrs(elem, ("fact",))
        elif depth == 2:
            if elem.tag not in ("measures", "dimensions"):
                raise XmlStructureError(f"expected measures or dimensions inside <Schema>, found <{elem.tag}>")
            if elem.tag in seen_sections:
                raise XmlStructureError(f"duplicate <{elem.tag}> section")
            _attrs(elem, ())
            section = elem.tag
            seen_sections.add(section)
        elif depth == 3:
            if section == "measures":
                _expect(elem, "measure", "measures")
                measures.append(_attrs(elem, ("name",))[0])
            else:
                _expect(elem, "dimension", "dimensions")
                dims.append((_attrs(elem, ("name",))[0], []))
        elif depth == 4 and section == "dimensions":
            _expect(elem, "attribute", "dimension")
            dims[-1][1].append(_attrs(elem, ("name",))[0])
        else:
            raise XmlStructureError(f"unexpected element <{elem.tag}>")
    if fact_name is None:
        raise XmlStructureError("empty schema document")
    if not measures:
        raise XmlStructureError("schema declares no measures (at least one is required)")
    return SchemaMeta(fact_name, tuple(measures), tuple(DimensionDef(n, tuple(a)) for n, a in dims))


# ---------------------------------------------------------------------------
# Dimensions.xml
# ---------------------------------------------------------------------------


def serialize_dimensions(warehouse: Warehouse) -> bytes:
    levels = [d.name for d in warehouse.schema.dimensions]
    levels += [n for n in warehouse.dimensions if n not in set(levels)]
    out = [XML_DECL, "<dimensionData>\n"]
    if not levels:
        out.append("  <classification/>\n")
    else:
        out.append("  <classification>\n")
        for name in levels:
            members = warehouse.dimensions.get(name, ())
            if not members:
                out.append(f'    <Level node="{escape_attr(name)}"/>\n')
                continue
            out.append(f'    <Level node="{escape_attr(name)}">\n')
            for m in members:
                if not m.attributes:
                    out.append(f'      <node id="{escape_attr(m.member_id)}"/>\n')
                    continue
                out.append(f'      <node id="{escape_attr(m.member_id)}">\n')
                for n, v in m.attributes:
                    out.append(f'        <attribute name="{escape_attr(n)}" value="{escape_attr(v)}"/>\n')
                out.append("      </node>\n")
            out.append("    </Level>\n")
        out.append("  </classification>\n")
    out.append("</dimensionData>\n")
    return "".join(out).encode("utf-8")


def parse_dimensions(source: Source) -> tuple[tuple[DimensionDef, ...], dict[str, tuple[DimensionMember, ...]]]:
    """Parse Dimensions.xml into dimension definitions and members.

    Attribute names of a dimension are taken from its first member.
    Repeated ``Level`` elements with the same name are merged.
    """
    members: dict[str, list[DimensionMember]] = {}
    level = None
    member_id = None
    attrs: list[tuple[str, str]] = []
    saw_classification = False
    for event, elem, depth in _events(source):
        if event == "start":
            if depth == 1:
                _expect(elem, "dimensionData")
                _attrs(elem, ())
            elif depth == 2:
                _expect(elem, "classification", "dimensionData")
                if saw_classification:
                    raise XmlStructureError("duplicate <classification>")
                _attrs(elem, ())
                saw_classification = True
            elif depth == 3:
                _expect(elem, "Level", "classification")
                (level,) = _attrs(elem, ("node",))
                members.setdefault(level, [])
            elif depth == 4:
                _expect(elem, "node", "Level")
                (member_id,) = _attrs(elem, ("id",))
                attrs = []
            elif depth == 5:
                _expect(elem, "attribute", "node")
                name, value = _attrs(elem, ("name", "value"))
                attrs.append((name, value))
            else:
                raise XmlStructureError(f"unexpected element <{elem.tag}>")
        elif depth == 4:
            members[level].append(DimensionMember(member_id, tuple(attrs)))
            elem.clear()
    if not saw_classification:
        raise XmlStructureError("expected classification inside <dimensionData>")
    defs = tuple(
        DimensionDef(name, tuple(n for n, _ in ms[0].attributes) if ms else ()) for name, ms in members.items()
    )
    return defs, {name: tuple(ms) for name, ms in members.items()}


# ---------------------------------------------------------------------------
# Facts.xml
# ---------------------------------------------------------------------------


def render_fact_cell(cell: FactCell) -> str:
    out = ["    <Cell>\n"]
    for mid, value in cell.measures:
        out.append(f'      <fact id="{escape_attr(mid)}" value="{format_number(value)}"/>\n')
    for dim, ref in cell.dim_refs:
        out.append(f'      <dimension id="{escape_attr(dim)}" value="{escape_attr(ref)}"/>\n')
    out.append("    </Cell>\n")
    return "".join(out)


def _serialize_cells(rendered) -> bytes:
    body = "".join(rendered)
    if not body:
        return (XML_DECL + "<CubeFact>\n  <cube/>\n</CubeFact>\n").encode("utf-8")
    return (INDEX_PROLOGUE + body + INDEX_EPILOGUE).encode("utf-8")


def serialize_facts(warehouse: Warehouse) -> bytes:
    return _serialize_cells(render_fact_cell(c) for c in warehouse.facts)


def _cells(source: Source, on_cell_child, on_dimension_child=None):
    """Drive the shared CubeFact/cube/Cell walk; yields once per finished Cell."""
    saw_cube = False
    cube = None
    ordinal = 0
    for event, elem, depth in _events(source):
        if event == "start":
            if depth == 1:
                _expect(elem, "CubeFact")
                _attrs(elem, ())
            elif depth == 2:
                _expect(elem, "cube", "CubeFact")
                if saw_cube:
                    raise XmlStructureError("duplicate <cube>")
                _attrs(elem, ())
                saw_cube = True
                cube = elem
            elif depth == 3:
                _expect(elem, "Cell", "cube")
                _attrs(elem, ())
                ordinal += 1
            elif depth == 4:
                on_cell_child(elem, ordinal)
            elif depth == 5 and on_dimension_child is not None:
                on_dimension_child(elem, ordinal)
            else:
                raise XmlStructureError(f"cell {ordinal}: unexpected element <{elem.tag}>")
        elif depth == 3:
            yield ordinal
            cube.clear()
    if not saw_cube:
        raise XmlStructureError("expected cube inside <CubeFact>")


def _measure(elem, ordinal):
    mid, raw = _attrs(elem, ("id", "value"))
    try:
        return mid, parse_number(raw)
    except ValueError:
        raise NumericParseError(ordinal, mid, raw) from None


def iter_facts(source: Source):
    """Stream FactCell objects in document order."""
    measures: list[tuple[str, float]] = []
    refs: list[tuple[str, str]] = []

    def child(elem, ordinal):
        if elem.tag == "fact":
            measures.append(_measure(elem, ordinal))
        elif elem.tag == "dimension":
            refs.append(tuple(_attrs(elem, ("id", "value"))))
        else:
            raise XmlStructureError(f"cell {ordinal}: expected fact or dimension, found <{elem.tag}>")

    for _ in _cells(source, child):
        yield FactCell(tuple(measures), tuple(refs))
        measures.clear()
        refs.clear()


def parse_facts(source: Source) -> tuple[FactCell, ...]:
    return tuple(iter_facts(source))


# ---------------------------------------------------------------------------
# Index.xml
# ---------------------------------------------------------------------------


def render_index_cell(cell: IndexedCell) -> str:
    out = ["    <Cell>\n"]
    for mid, value in cell.measures:
        out.append(f'      <fact id="{escape_attr(mid)}" value="{format_number(value)}"/>\n')
    for d in cell.dims:
        head = f'      <dimension id="{escape_attr(d.dimension)}" node="{escape_attr(d.member_id)}"'
        if not d.attributes:
            out.append(head + "/>\n")
            continue
        out.append(head + ">\n")
        for n, v in d.attributes:
            out.append(f'        <attribute name="{escape_attr(n)}" value="{escape_attr(v)}"/>\n')
        out.append("      </dimension>\n")
    out.append("    </Cell>\n")
    return "".join(out)


def serialize_index(index: JoinIndex) -> bytes:
    return _serialize_cells(render_index_cell(c) for c in index.cells)


def iter_index_cells(source: Source):
    measures: list[tuple[str, float]] = []
    dims: list[tuple[str, str, list]] = []
    # identical expansions share one IndexedDimension object
    shared: dict[tuple, IndexedDimension] = {}

    def child(elem, ordinal):
        if elem.tag == "fact":
            measures.append(_measure(elem, ordinal))
        elif elem.tag == "dimension":
            dim, node = _attrs(elem, ("id", "node"))
            dims.append((dim, node, []))
        else:
            raise XmlStructureError(f"cell {ordinal}: expected fact or dimension, found <{elem.tag}>")

    def grandchild(elem, ordinal):
        if elem.tag != "attribute" or not dims:
            raise XmlStructureError(f"cell {ordinal}: unexpected element <{elem.tag}>")
        dims[-1][2].append(tuple(_attrs(elem, ("name", "value"))))

    for _ in _cells(source, child, grandchild):
        entries = []
        for dim, node, attrs in dims:
            key = (dim, node, tuple(attrs))
            entry = shared.get(key)
            if entry is None:
                entry = shared[key] = IndexedDimension(dim, node, key[2])
            entries.append(entry)
        yield IndexedCell(tuple(measures), tuple(entries))
        measures.clear()
        dims.clear()


def infer_schema(cells, fact_name: str = "facts") -> SchemaMeta:
    """Reconstruct schema metadata from indexed cells (first-seen order)."""
    measures: dict[str, None] = {}
    dims: dict[str, tuple[str, ...]] = {}
    for cell in cells:
        for mid, _ in cell.measures:
            measures.setdefault(mid)
        for d in cell.dims:
            if d.dimension not in dims:
                dims[d.dimension] = tuple(n for n, _ in d.attributes)
    return SchemaMeta(fact_name, tuple(measures), tuple(DimensionDef(n, a) for n, a in dims.items()))


def parse_index(source: Source, schema: SchemaMeta | None = None) -> JoinIndex:
    """Parse Index.xml.

    Index.xml carries no schema of its own; pass the warehouse schema when
    it is known, otherwise it is inferred from the cells.
    """
    cells = tuple(iter_index_cells(source))
    if schema is None:
        schema = infer_schema(cells)
    return JoinIndex(schema, cells)


# ---------------------------------------------------------------------------
# warehouse directories
# ---------------------------------------------------------------------------


def assemble_warehouse(schema: SchemaMeta, dimensions_source: Source, facts_source: Source) -> Warehouse:
    _, members = parse_dimensions(dimensions_source)
    return Warehouse(schema, members, parse_facts(facts_source))


def load_warehouse(directory: str | os.PathLike) -> Warehouse:
    d = Path(directory)
    schema = parse_schema(d / SCHEMA_FILE)
    return assemble_warehouse(schema, d / DIMENSIONS_FILE, d / FACTS_FILE)


def save_warehouse(warehouse: Warehouse, directory: str | os.PathLike) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in (
        (SCHEMA_FILE, serialize_schema(warehouse.schema)),
        (DIMENSIONS_FILE, serialize_dimensions(warehouse)),
        (FACTS_FILE, serialize_facts(warehouse)),
    ):
        (d / name).write_bytes(data)
        written.append(d / name)
    return written
