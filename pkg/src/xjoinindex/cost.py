"""Closed-form traversal costs with and without the join index.

    E_noindex = (cells * dims) * (dims + members * attrs)
    E_index   = cells * (dims + attrs)

``members`` and ``attrs`` are the per-dimension member and attribute
counts (uniform model).  :func:`e_noindex_vector` accepts per-dimension
counts instead and substitutes ``sum(d_i * a_i)`` for ``dims * d * a``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._format import format_number

# Results must fit a signed 64-bit integer so the CSV stays usable by
# fixed-width consumers.
INT64_MAX = 2**63 - 1

CSV_HEADER = ("cells", "e_noindex", "e_index", "gain")


@dataclass(frozen=True)
class CostParams:
    cells: int
    dimensions: int
    members_per_dim: int = 1
    attrs_per_dim: int = 0

    def __post_init__(self):
        for name in ("cells", "dimensions", "members_per_dim", "attrs_per_dim"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an int, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")


def _checked(value: int) -> int:
    if value > INT64_MAX:
        raise OverflowError(f"cost {value} exceeds the signed 64-bit range")
    return value


def e_noindex(p: CostParams) -> int:
    return _checked((p.cells * p.dimensions) * (p.dimensions + p.members_per_dim * p.attrs_per_dim))


def e_index(p: CostParams) -> int:
    return _checked(p.cells * (p.dimensions + p.attrs_per_dim))


def e_noindex_vector(cells: int, members: Sequence[int], attrs: Sequence[int]) -> int:
    """Join-path cost with per-dimension member and attribute counts."""
    if len(members) != len(attrs):
        raise ValueError("members and attrs must have one entry per dimension")
    dims = len(members)
    return _checked(cells * (dims * dims + sum(d * a for d, a in zip(members, attrs))))


def e_index_vector(cells: int, dims: int, query_attrs: int) -> int:
    """Index-path cost when the queried dimension has ``query_attrs`` attributes."""
    return _checked(cells * (dims + query_attrs))


def gain(p: CostParams) -> float:
    """E_noindex / E_index.

    Raises:
        ZeroDivisionError: when E_index is 0 (no cells, or dims + attrs == 0).
    """
    denom = e_index(p)
    if denom == 0:
        raise ZeroDivisionError("E_index is zero; gain undefined")
    return float(Fraction(e_noindex(p), denom))


@dataclass(frozen=True)
class SweepRow:
    cells: int
    e_noindex: int
    e_index: int
    gain: float | None  # None when E_index is 0


def sweep(cell_counts: Sequence[int], dimensions: int, members_per_dim: int, attrs_per_dim: int) -> list[SweepRow]:
    if not cell_counts:
        raise ValueError("cell count list is empty")
    rows = []
    for cells in cell_counts:
        p = CostParams(int(cells), dimensions, members_per_dim, attrs_per_dim)
        ni, ix = e_noindex(p), e_index(p)
        rows.append(SweepRow(p.cells, ni, ix, float(Fraction(ni, ix)) if ix else None))
    return rows


def log_spaced(start: int, stop: int, num: int) -> list[int]:
    """``num`` integers from start to stop (inclusive), evenly spaced in log."""
    if num < 1 or start < 1 or stop < start:
        raise ValueError("need 1 <= start <= stop and num >= 1")
    if num == 1:
        return [start]
    ratio = math.log(stop / start) / (num - 1)
    out = [round(start * math.exp(ratio * i)) for i in range(num)]
    out[-1] = stop
    return sorted(set(out))


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.cells, r.e_noindex, r.e_index, "" if r.gain is None else format_number(r.gain)])
    return buf.getvalue()


def table1_mean_members() -> int:
    """Mean member count over the five reference dimensions, rounded down."""
    from .generator import TABLE1_DIMENSIONS

    counts = [n for _, n, _ in TABLE1_DIMENSIONS]
    return sum(counts) // len(counts)
