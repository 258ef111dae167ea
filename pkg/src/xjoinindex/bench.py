"""With/without-index benchmark harness."""

from __future__ import annotations

import csv
import io
import os
import platform
import statistics
import sys
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ResultMismatchError, UsageError
from .executor import StepCounter, eval_memo_join, eval_no_index, eval_with_index
from .generator import GenProfile, generate
from .join_index import JoinIndex, build_index
from .model import Warehouse
from .query import Query, bind, parse_query, rewrite_for_index

CSV_HEADER = ("cells", "query_id", "t_noindex_ms", "t_index_ms", "speedup", "visits_noindex", "visits_index")


@dataclass
class BenchEntry:
    query_id: str
    query: Query
    cells: int
    t_noindex_ms: float
    t_index_ms: float
    counters_noindex: StepCounter
    counters_index: StepCounter
    t_memo_ms: float | None = None

    @property
    def speedup(self) -> float:
        if self.t_index_ms <= 0:
            return float("inf")
        return self.t_noindex_ms / self.t_index_ms


@dataclass
class BenchReport:
    cells: int
    entries: list[BenchEntry] = field(default_factory=list)
    runs: int = 5
    environment: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def environment() -> dict[str, str]:
    clock = time.get_clock_info("perf_counter")
    return {
        "python": sys.version.split()[0],
        "implementation": platform.python_implementation(),
        "platform": platform.platform(),
        "machine": platform.machine(),
        "cpus": str(os.cpu_count()),
        "clock": f"perf_counter (resolution {clock.resolution:g}s, monotonic={clock.monotonic})",
    }


def normalize_workload(workload) -> list[tuple[str, Query]]:
    out = []
    for i, item in enumerate(workload, start=1):
        if isinstance(item, tuple):
            qid, q = item
        else:
            qid, q = f"q{i}", item
        if isinstance(q, str):
            q = parse_query(q)
        out.append((qid, q))
    return out


def median_time_ms(fn: Callable[[], object], runs: int) -> float:
    samples = []
    for _ in range(runs):
        start = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - start)
    return statistics.median(samples) / 1e6


def run_bench(
    warehouse: Warehouse,
    index: JoinIndex,
    workload: Iterable,
    runs: int = 5,
    include_memo: bool = False,
) -> BenchReport:
    """Time every query on both paths.

    The first evaluation of each path is a warm-up: it is not timed and its
    result tables are compared.  Timing is the median of ``runs`` further
    evaluations on the monotonic clock.

    Raises:
        ResultMismatchError: the two paths returned different tables.
        UsageError: ``runs`` < 3.
    """
    if runs < 3:
        raise UsageError("runs must be at least 3")
    report = BenchReport(len(warehouse.facts), runs=runs, environment=environment())
    if len(index.cells) != len(warehouse.facts):
        raise UsageError("index was not built from this warehouse (cell counts differ)")
    for qid, query in normalize_workload(workload):
        bound = bind(query, warehouse.schema)
        plan = rewrite_for_index(bound)
        table_join, counters_join = eval_no_index(bound, warehouse)
        table_index, counters_index = eval_with_index(plan, index)
        if table_join != table_index:
            raise ResultMismatchError(qid)
        t_join = median_time_ms(lambda: eval_no_index(bound, warehouse), runs)
        t_index = median_time_ms(lambda: eval_with_index(plan, index), runs)
        t_memo = None
        if include_memo:
            table_memo, _ = eval_memo_join(bound, warehouse)
            if table_memo != table_join:
                raise ResultMismatchError(qid)
            t_memo = median_time_ms(lambda: eval_memo_join(bound, warehouse), runs)
        entry = BenchEntry(qid, query, report.cells, t_join, t_index, counters_join, counters_index, t_memo)
        resolution_ms = time.get_clock_info("perf_counter").resolution * 1e3
        if t_index < 100 * resolution_ms:
            msg = f"{qid}: index time {t_index:.4f} ms is close to the clock resolution"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            report.warnings.append(msg)
        report.entries.append(entry)
    return report


def size_sweep(
    profile: GenProfile,
    cell_counts: Sequence[int],
    workload,
    runs: int = 5,
    include_memo: bool = False,
    progress: Callable[[str], None] | None = None,
) -> list[BenchReport]:
    """generate -> build_index -> run_bench for each warehouse size.

    Each size rescales the whole profile (dimension sizes included).
    """
    if not cell_counts:
        raise UsageError("cell count list is empty")
    if any(b < a for a, b in zip(cell_counts, cell_counts[1:])):
        raise UsageError("cell counts must be ascending")
    workload = normalize_workload(workload)
    reports = []
    for cells in cell_counts:
        warehouse = generate(profile.with_size(cells))
        index = build_index(warehouse)
        if progress:
            progress(f"benchmarking {cells} cells")
        reports.append(run_bench(warehouse, index, workload, runs, include_memo))
    return reports


def reports_to_csv(reports: Sequence[BenchReport], include_memo: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER + (("t_memo_ms",) if include_memo else ()))
    for report in reports:
        for e in report.entries:
            row = [
                e.cells,
                e.query_id,
                f"{e.t_noindex_ms:.3f}",
                f"{e.t_index_ms:.3f}",
                f"{e.speedup:.2f}",
                e.counters_noindex.total_visits,
                e.counters_index.total_visits,
            ]
            if include_memo:
                row.append("" if e.t_memo_ms is None else f"{e.t_memo_ms:.3f}")
            writer.writerow(row)
    return buf.getvalue()


def load_workload(text: str) -> list[tuple[str, Query]]:
    """One query per line; ``id: query`` names it, ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        qid, sep, rest = line.partition(":")
        if sep and qid.strip() and " " not in qid.strip():
            qid, line = qid.strip(), rest.strip()
        else:
            qid = f"q{len(out) + 1}"
        out.append((qid, parse_query(line)))
    return out
