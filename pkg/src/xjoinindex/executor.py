"""Query evaluation with and without the join index.

Counting convention
-------------------
Every element touched increments its counter: ``cell_visits`` per Cell,
``dimension_child_visits`` per ``dimension`` child of a Cell,
``level_visits`` per Level considered, ``member_visits`` per member node
and ``attribute_visits`` per attribute node.  Neither path terminates a
scan early, so counts depend only on the shapes of the data and query,
never on the values.

``StepCounter.total_visits`` sums the comparison visits that the closed-form
costs charge:

* join path: ``level_visits + attribute_visits``.  Cells, dimension children
  and members are the loops that multiply these, not additive terms.
* index path: ``dimension_child_visits + attribute_visits``.  The dimension
  child takes the role of the Level (its ``@id`` is compared with the query
  dimension name).

On a warehouse with D dimensions of d members and a attributes each, a query
touching one dimension gives ``cells*D*(D + d*a)`` on the join path and
``cells*(D + a)`` on the index path.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from ._format import format_number
from .errors import UsageError
from .join_index import JoinIndex
from .model import Warehouse
from .query import INDEX_PLAN, JOIN_PLAN, BoundQuery, Plan

_STEP_FIELDS = ("level_visits", "member_visits", "attribute_visits", "cell_visits", "dimension_child_visits")


@dataclass
class StepCounter:
    path: str = JOIN_PLAN
    level_visits: int = 0
    member_visits: int = 0
    attribute_visits: int = 0
    cell_visits: int = 0
    dimension_child_visits: int = 0

    @property
    def total_visits(self) -> int:
        if self.path == INDEX_PLAN:
            return self.dimension_child_visits + self.attribute_visits
        return self.level_visits + self.attribute_visits

    def as_dict(self) -> dict[str, int]:
        d = {f: getattr(self, f) for f in _STEP_FIELDS}
        d["total_visits"] = self.total_visits
        return d


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[tuple[str, ...], tuple], ...] = field(default=())

    def flat_rows(self) -> list[tuple]:
        return [keys + values for keys, values in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for keys, values in self.rows:
            writer.writerow([*keys, *("" if v is None else format_number(v) for v in values)])
        return buf.getvalue()


def aggregate(op: str, values, count: int | None = None):
    """Aggregate one group's measure values.

    ``count`` counts cells, so callers pass the group size; missing measure
    values (None) are skipped by the other operators.  Sums use math.fsum,
    which makes the result independent of cell order.
    """
    if op == "count":
        return len(values) if count is None else count
    present = [v for v in values if v is not None]
    if not present:
        return None
    if op == "sum":
        return math.fsum(present)
    if op == "avg":
        return math.fsum(present) / len(present)
    if op == "min":
        return min(present)
    if op == "max":
        return max(present)
    raise ValueError(f"unknown aggregation {op!r}")


def _measure_reader(measure_names):
    """Return f(cell_measures) -> tuple of values (None when missing)."""
    names = tuple(measure_names)

    def read(measures):
        out = []
        for name in names:
            for n, v in measures:
                if n == name:
                    out.append(v)
                    break
            else:
                out.append(None)
        return tuple(out)

    return read


def _finish(bound: BoundQuery, groups: dict) -> ResultTable:
    q = bound.query
    columns = tuple(g.label for g in q.group_by) + tuple(a.label for a in q.aggregations)
    rows = []
    for key in sorted(groups):
        measure_rows = groups[key]
        values = tuple(
            aggregate(a.op, [r[i] for r in measure_rows], len(measure_rows)) for i, a in enumerate(q.aggregations)
        )
        rows.append((key, values))
    return ResultTable(columns, tuple(rows))


def _conditions(bound: BoundQuery) -> dict[str, list[tuple[str, str]]]:
    conds: dict[str, list[tuple[str, str]]] = {}
    for p in bound.query.predicates:
        conds.setdefault(p.dimension, []).append((p.attribute, p.value))
    return conds


def _group_slots(bound: BoundQuery) -> dict[str, list[tuple[str, int]]]:
    """dimension -> [(attribute, position in the group key)]."""
    slots: dict[str, list[tuple[str, int]]] = {}
    for i, g in enumerate(bound.query.group_by):
        slots.setdefault(g.dimension, []).append((g.attribute, i))
    return slots


def _unwrap(plan_or_bound, kind: str) -> BoundQuery:
    if isinstance(plan_or_bound, Plan):
        if plan_or_bound.kind != kind:
            raise UsageError(f"expected a {kind}, got a {plan_or_bound.kind}")
        return plan_or_bound.bound
    if isinstance(plan_or_bound, BoundQuery):
        return plan_or_bound
    raise UsageError(f"expected a bound query or plan, got {type(plan_or_bound).__name__}")


def eval_no_index(bound, warehouse: Warehouse) -> tuple[ResultTable, StepCounter]:
    """Evaluate over Facts + Dimensions with the naive multi-document join.

    For every cell and every one of its dimension references, all Level
    nodes are scanned to find the referenced dimension, then every member of
    that Level and every attribute of each member is examined: members
    satisfying the selection on that dimension are identified, and the one
    whose id equals the reference supplies the group-key values.  Nothing is
    cached between cells.
    """
    bound = _unwrap(bound, JOIN_PLAN)
    q = bound.query
    levels = [(d.name, warehouse.dimensions.get(d.name, ())) for d in bound.schema.dimensions]
    conds = _conditions(bound)
    slots = _group_slots(bound)
    read = _measure_reader(a.measure for a in q.aggregations)
    n_keys = len(q.group_by)

    lv = mv = av = cv = dcv = 0
    groups: dict[tuple, list] = {}
    for ordinal, cell in enumerate(warehouse.facts, start=1):
        cv += 1
        qualifies = True
        key = [""] * n_keys
        for dim, ref in cell.dim_refs:
            dcv += 1
            members = None
            for name, level_members in levels:
                lv += 1
                if name == dim:
                    members = level_members
            if members is None:
                raise UsageError(f"cell {ordinal}: dimension {dim!r} is not declared (warehouse does not validate)")
            dim_conds = conds.get(dim)
            hit = None
            hit_ok = False
            for m in members:
                mv += 1
                ok = True
                for n, v in m.attributes:
                    av += 1
                    if dim_conds:
                        for cn, cval in dim_conds:
                            if n == cn and v != cval:
                                ok = False
                if m.member_id == ref and hit is None:
                    hit = m
                    hit_ok = ok
            if hit is None:
                raise UsageError(f"cell {ordinal}: dangling reference {dim}={ref!r} (warehouse does not validate)")
            if not hit_ok:
                qualifies = False
            for attr, pos in slots.get(dim, ()):
                key[pos] = hit.attribute(attr) or ""
        if qualifies:
            groups.setdefault(tuple(key), []).append(read(cell.measures))

    counter = StepCounter(JOIN_PLAN, lv, mv, av, cv, dcv)
    return _finish(bound, groups), counter


def eval_with_index(plan: Plan, index: JoinIndex) -> tuple[ResultTable, StepCounter]:
    """Evaluate an index plan with one pass over the index cells.

    Per cell, every dimension child is examined; the embedded attributes of
    the children named in the query are scanned to test selections and
    read group keys.  Dimension members are never consulted.
    """
    if not isinstance(plan, Plan):
        raise UsageError("eval_with_index needs a Plan produced by rewrite_for_index")
    bound = _unwrap(plan, INDEX_PLAN)
    q = bound.query
    conds = _conditions(bound)
    slots = _group_slots(bound)
    used = frozenset(conds) | frozenset(slots)
    read = _measure_reader(a.measure for a in q.aggregations)
    n_keys = len(q.group_by)

    av = cv = dcv = 0
    groups: dict[tuple, list] = {}
    for cell in index.cells:
        cv += 1
        qualifies = True
        key = [""] * n_keys
        for d in cell.dims:
            dcv += 1
            if d.dimension not in used:
                continue
            dim_conds = conds.get(d.dimension)
            dim_slots = slots.get(d.dimension)
            for n, v in d.attributes:
                av += 1
                if dim_conds:
                    for cn, cval in dim_conds:
                        if n == cn and v != cval:
                            qualifies = False
                if dim_slots:
                    for sn, pos in dim_slots:
                        if n == sn:
                            key[pos] = v
        if qualifies:
            groups.setdefault(tuple(key), []).append(read(cell.measures))

    counter = StepCounter(INDEX_PLAN, 0, 0, av, cv, dcv)
    return _finish(bound, groups), counter


def eval_memo_join(bound, warehouse: Warehouse) -> tuple[ResultTable, StepCounter]:
    """Join evaluation with each dimension resolved once into a hash table.

    Not the traversal whose cost the closed-form model describes; it exists
    so benchmarks can also compare the index against a sensible join.
    """
    bound = _unwrap(bound, JOIN_PLAN)
    q = bound.query
    conds = _conditions(bound)
    slots = _group_slots(bound)
    read = _measure_reader(a.measure for a in q.aggregations)
    n_keys = len(q.group_by)
    counter = StepCounter(JOIN_PLAN)

    # dimension -> member id -> (passes selection, ((key position, value), ...))
    resolved: dict[str, dict[str, tuple[bool, tuple]]] = {}
    for dim in set(conds) | set(slots):
        table = {}
        counter.level_visits += len(bound.schema.dimensions)
        for m in warehouse.dimensions.get(dim, ()):
            counter.member_visits += 1
            counter.attribute_visits += len(m.attributes)
            attrs = dict(m.attributes)
            ok = all(attrs.get(cn) == cval for cn, cval in conds.get(dim, ()))
            table.setdefault(m.member_id, (ok, tuple((pos, attrs.get(a, "")) for a, pos in slots.get(dim, ()))))
        resolved[dim] = table

    groups: dict[tuple, list] = {}
    for cell in warehouse.facts:
        counter.cell_visits += 1
        qualifies = True
        key = [""] * n_keys
        for dim, ref in cell.dim_refs:
            counter.dimension_child_visits += 1
            table = resolved.get(dim)
            if table is None:
                continue
            entry = table.get(ref)
            if entry is None:
                raise UsageError(f"dangling reference {dim}={ref!r} (warehouse does not validate)")
            ok, vals = entry
            if not ok:
                qualifies = False
            for pos, v in vals:
                key[pos] = v
        if qualifies:
            groups.setdefault(tuple(key), []).append(read(cell.measures))
    return _finish(bound, groups), counter


def run_plan(plan: Plan, warehouse: Warehouse | None = None, index: JoinIndex | None = None):
    if plan.kind == INDEX_PLAN:
        if index is None:
            raise UsageError("index plan needs a join index")
        return eval_with_index(plan, index)
    if warehouse is None:
        raise UsageError("join plan needs the warehouse documents")
    return eval_no_index(plan, warehouse)
