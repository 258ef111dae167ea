"""Exception hierarchy shared by every module.

``DataError`` subclasses describe bad documents, bad queries or bad
warehouse contents; the CLI maps them to exit code 1.  ``UsageError``
covers caller mistakes (wrong plan kind, bad arguments) and maps to 2.
"""


class XJoinIndexError(Exception):
    """Root of all package errors."""


class DataError(XJoinIndexError):
    pass


class UsageError(XJoinIndexError):
    pass


class MalformedXmlError(DataError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"malformed XML{where}: {message}")


class XmlStructureError(DataError):
    """Well-formed XML whose element layout does not match the document kind."""


class NumericParseError(DataError):
    def __init__(self, cell, measure, raw):
        self.cell = cell
        self.measure = measure
        self.raw = raw
        super().__init__(f"cell {cell}: measure {measure!r} has non-numeric value {raw!r}")


class UnknownDimensionError(DataError, KeyError):
    def __init__(self, dimension):
        self.dimension = dimension
        super().__init__(f"unknown dimension {dimension!r}")

    def __str__(self):
        return self.args[0]


class DanglingReferenceError(DataError):
    def __init__(self, dimension, member_id, cell):
        self.dimension = dimension
        self.member_id = member_id
        self.cell = cell
        super().__init__(
            f"cell {cell}: dimension {dimension!r} references missing member {member_id!r}"
        )


class QuerySyntaxError(DataError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.message = message
        detail = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")


class BindError(DataError):
    kind = "name"

    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown {self.kind} {name!r}")


class UnknownMeasureError(BindError):
    kind = "measure"


class UnknownQueryDimensionError(BindError):
    kind = "dimension"


class UnknownAttributeError(BindError):
    kind = "attribute"


class InvalidProfileError(DataError):
    pass


class ResultMismatchError(DataError):
    def __init__(self, query_id):
        self.query_id = query_id
        super().__init__(f"query {query_id!r}: index path and join path disagree")
