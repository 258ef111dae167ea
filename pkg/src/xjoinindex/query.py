"""Decision-support query language: parsing, binding and index rewriting.

Grammar (keywords are case-insensitive, identifiers are not)::

    query   := "select" agg ("," agg)* "from" "facts" where? groupby?
    agg     := ("sum"|"avg"|"min"|"max"|"count") "(" IDENT ")"
    where   := "where" pred ("and" pred)*
    pred    := IDENT "." IDENT "=" STRING
    groupby := "group" "by" IDENT "." IDENT ("," IDENT "." IDENT)*

Strings are double-quoted; ``\\"``, ``\\\\``, ``\\n``, ``\\t`` and ``\\r`` are
the recognised escapes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    QuerySyntaxError,
    UnknownAttributeError,
    UnknownMeasureError,
    UnknownQueryDimensionError,
)
from .model import SchemaMeta

AGGREGATES = ("sum", "avg", "min", "max", "count")

JOIN_PLAN = "join_plan"
INDEX_PLAN = "index_plan"


@dataclass(frozen=True)
class Aggregation:
    op: str
    measure: str

    @property
    def label(self) -> str:
        return f"{self.op}({self.measure})"


@dataclass(frozen=True)
class Predicate:
    dimension: str
    attribute: str
    value: str


@dataclass(frozen=True)
class GroupKey:
    dimension: str
    attribute: str

    @property
    def label(self) -> str:
        return f"{self.dimension}.{self.attribute}"


@dataclass(frozen=True)
class Query:
    aggregations: tuple[Aggregation, ...]
    predicates: tuple[Predicate, ...] = ()
    group_by: tuple[GroupKey, ...] = ()


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------


class Token(NamedTuple):
    kind: str  # "word", "string", "punct", "eof"
    text: str
    value: str
    line: int
    column: int


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.=])
  | (?P<string>")
    """,
    re.VERBOSE,
)
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}
_UNESCAPES = {v: "\\" + k for k, v in _ESCAPES.items()}


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _read_string(text: str, start: int) -> tuple[str, int]:
    chars = []
    i = start + 1
    while i < len(text):
        c = text[i]
        if c == '"':
            return "".join(chars), i + 1
        if c == "\\":
            if i + 1 >= len(text):
                break
            esc = text[i + 1]
            if esc not in _ESCAPES:
                line, col = _position(text, i)
                raise QuerySyntaxError(f"invalid escape sequence '\\{esc}'", line, col)
            chars.append(_ESCAPES[esc])
            i += 2
            continue
        chars.append(c)
        i += 1
    line, col = _position(text, start)
    raise QuerySyntaxError("unterminated string literal", line, col)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line, col = _position(text, pos)
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        line, col = _position(text, pos)
        if kind == "ws":
            pos = m.end()
        elif kind == "string":
            value, end = _read_string(text, pos)
            tokens.append(Token("string", text[pos:end], value, line, col))
            pos = end
        else:
            tokens.append(Token(kind, m.group(), m.group(), line, col))
            pos = m.end()
    line, col = _position(text, len(text))
    tokens.append(Token("eof", "", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, expected):
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise QuerySyntaxError(f"unexpected {found}", tok.line, tok.column, expected)

    def at_keyword(self, *words) -> bool:
        return self.tok.kind == "word" and self.tok.text.lower() in words

    def keyword(self, *words) -> str:
        if not self.at_keyword(*words):
            self.fail([f'"{w}"' for w in words])
        word = self.tok.text.lower()
        self.pos += 1
        return word

    def punct(self, char: str, also=()):
        if self.tok.kind != "punct" or self.tok.text != char:
            self.fail([f'"{char}"', *also])
        self.pos += 1

    def ident(self) -> str:
        if self.tok.kind != "word":
            self.fail(["identifier"])
        name = self.tok.text
        self.pos += 1
        return name

    def path(self) -> tuple[str, str]:
        dim = self.ident()
        self.punct(".")
        return dim, self.ident()

    def parse(self) -> Query:
        self.keyword("select")
        aggs = [self.aggregation()]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.pos += 1
            aggs.append(self.aggregation())
        if not self.at_keyword("from"):
            self.fail(['","', '"from"'])
        self.pos += 1
        self.keyword("facts")

        preds = []
        if self.at_keyword("where"):
            self.pos += 1
            preds.append(self.predicate())
            while self.at_keyword("and"):
                self.pos += 1
                preds.append(self.predicate())

        groups = []
        if self.at_keyword("group"):
            self.pos += 1
            self.keyword("by")
            groups.append(GroupKey(*self.path()))
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.pos += 1
                groups.append(GroupKey(*self.path()))

        if self.tok.kind != "eof":
            expected = []
            if preds and not groups:
                expected.append('"and"')
            if not groups:
                if not preds:
                    expected.append('"where"')
                expected.append('"group"')
            else:
                expected.append('","')
            self.fail([*expected, "end of input"])
        return Query(tuple(aggs), tuple(preds), tuple(groups))

    def aggregation(self) -> Aggregation:
        op = self.keyword(*AGGREGATES)
        self.punct("(")
        measure = self.ident()
        self.punct(")")
        return Aggregation(op, measure)

    def predicate(self) -> Predicate:
        dim, attr = self.path()
        self.punct("=")
        if self.tok.kind != "string":
            self.fail(["string"])
        value = self.tok.value
        self.pos += 1
        return Predicate(dim, attr, value)


def parse_query(text: str) -> Query:
    """Parse query text.

    Raises:
        QuerySyntaxError: with 1-based line/column and the expected tokens.
    """
    return _Parser(text).parse()


def quote(value: str) -> str:
    return '"' + "".join(_UNESCAPES.get(c, c) for c in value) + '"'


def format_query(query: Query) -> str:
    """Canonical one-line text; ``parse_query(format_query(q)) == q``."""
    parts = ["select " + ", ".join(a.label for a in query.aggregations), "from facts"]
    if query.predicates:
        parts.append(
            "where " + " and ".join(f"{p.dimension}.{p.attribute} = {quote(p.value)}" for p in query.predicates)
        )
    if query.group_by:
        parts.append("group by " + ", ".join(g.label for g in query.group_by))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# binding and plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundQuery:
    """A query whose names were resolved against ``schema``.

    Position tuples hold schema indices: measure index per aggregation and
    (dimension index, attribute index) per predicate and group key.
    """

    query: Query
    schema: SchemaMeta
    measure_positions: tuple[int, ...]
    predicate_positions: tuple[tuple[int, int], ...]
    group_positions: tuple[tuple[int, int], ...]

    @property
    def dimensions_used(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for p in self.query.predicates:
            seen.setdefault(p.dimension)
        for g in self.query.group_by:
            seen.setdefault(g.dimension)
        return tuple(seen)


def bind(query: Query, schema: SchemaMeta) -> BoundQuery:
    """Resolve measure, dimension and attribute names.

    Raises:
        UnknownMeasureError, UnknownQueryDimensionError, UnknownAttributeError
    """
    measure_pos = {m: i for i, m in enumerate(schema.measures)}
    dim_pos = {d.name: i for i, d in enumerate(schema.dimensions)}

    def resolve(dim: str, attr: str) -> tuple[int, int]:
        if dim not in dim_pos:
            raise UnknownQueryDimensionError(dim)
        i = dim_pos[dim]
        names = schema.dimensions[i].attribute_names
        if attr not in names:
            raise UnknownAttributeError(f"{dim}.{attr}")
        return i, names.index(attr)

    measures = []
    for agg in query.aggregations:
        if agg.measure not in measure_pos:
            raise UnknownMeasureError(agg.measure)
        measures.append(measure_pos[agg.measure])
    preds = tuple(resolve(p.dimension, p.attribute) for p in query.predicates)
    groups = tuple(resolve(g.dimension, g.attribute) for g in query.group_by)
    return BoundQuery(query, schema, tuple(measures), preds, groups)


@dataclass(frozen=True)
class Plan:
    kind: str
    bound: BoundQuery
    predicate_paths: tuple[str, ...]
    group_paths: tuple[str, ...]

    @property
    def query(self) -> Query:
        return self.bound.query

    def explain(self) -> str:
        lines = [f"{self.kind}: {format_query(self.query)}"]
        lines += [f"  select  {p}" for p in self.predicate_paths]
        lines += [f"  group   {p}" for p in self.group_paths]
        lines += [f"  aggregate {a.label}" for a in self.query.aggregations]
        return "\n".join(lines)


def _dimension_path(dim: str, attr: str) -> str:
    return f"//dimensionData/classification/Level[@node='{dim}']/node/attribute[@name='{attr}']/@value"


def _index_path(dim: str, attr: str) -> str:
    return f"//CubeFact/cube/Cell/dimension[@id='{dim}']/attribute[@name='{attr}']/@value"


def plan_join(bound: BoundQuery) -> Plan:
    """Baseline plan: attribute tests go to the Dimensions document."""
    q = bound.query
    return Plan(
        JOIN_PLAN,
        bound,
        tuple(_dimension_path(p.dimension, p.attribute) for p in q.predicates),
        tuple(_dimension_path(g.dimension, g.attribute) for g in q.group_by),
    )


def rewrite_for_index(bound: BoundQuery) -> Plan:
    """Retarget selections and group keys at the attributes embedded in each
    index cell.  Aggregations, predicates and group keys are carried over
    unchanged and in order."""
    q = bound.query
    return Plan(
        INDEX_PLAN,
        bound,
        tuple(_index_path(p.dimension, p.attribute) for p in q.predicates),
        tuple(_index_path(g.dimension, g.attribute) for g in q.group_by),
    )


def logical_query(plan: Plan) -> Query:
    return plan.bound.query
