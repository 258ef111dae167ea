import pytest

from xjoinindex.bench import CSV_HEADER, load_workload, reports_to_csv, run_bench, size_sweep
from xjoinindex.errors import QuerySyntaxError, ResultMismatchError, UsageError
from xjoinindex.generator import table1_profile
from xjoinindex.join_index import IndexedCell, build_index
from xjoinindex.query import parse_query

from tests.conftest import Q1


def test_w3_bench(w3):
    report = run_bench(w3, build_index(w3), [Q1], runs=3)
    (entry,) = report.entries
    assert entry.speedup > 0
    assert entry.counters_index.total_visits == 12
    assert report.environment["python"]


def test_empty_workload(w3):
    assert run_bench(w3, build_index(w3), [], runs=3).entries == []


def test_runs_must_be_three(w3):
    with pytest.raises(UsageError):
        run_bench(w3, build_index(w3), [Q1], runs=2)


def test_mismatch_aborts(w3):
    from dataclasses import replace

    ix = build_index(w3)
    cells = list(ix.cells)
    cells[0] = IndexedCell((("quantity", 300.0),), cells[0].dims)
    with pytest.raises(ResultMismatchError, match="q1"):
        run_bench(w3, replace(ix, cells=tuple(cells)), [Q1], runs=3)


def test_size_sweep_and_csv():
    reports = size_sweep(table1_profile(), [100, 1_000, 10_000], [("fig2", parse_query(Q1))], runs=3, include_memo=True)
    assert [r.cells for r in reports] == [100, 1_000, 10_000]
    times = [r.entries[0].t_noindex_ms for r in reports]
    assert times == sorted(times)
    csv_text = reports_to_csv(reports)
    lines = csv_text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 4 and lines[1].startswith("100,fig2,")
    assert reports_to_csv(reports, include_memo=True).splitlines()[0].endswith(",t_memo_ms")


def test_size_sweep_arguments():
    with pytest.raises(UsageError):
        size_sweep(table1_profile(), [], [Q1])
    with pytest.raises(UsageError):
        size_sweep(table1_profile(), [1000, 100], [Q1])
    (single,) = size_sweep(table1_profile(), [50], [Q1], runs=3)
    assert single.cells == 50


def test_load_workload():
    wl = load_workload("# comment\n\nfig2: " + Q1 + "\nselect count(quantity) from facts\n")
    assert [qid for qid, _ in wl] == ["fig2", "q2"]
    with pytest.raises(QuerySyntaxError):
        load_workload("select from facts")
