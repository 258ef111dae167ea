from dataclasses import replace

import pytest

from xjoinindex.errors import DanglingReferenceError
from xjoinindex.generator import generate, table1_profile, uniform_profile
from xjoinindex.join_index import BuildCounter, IndexedDimension, build_index, index_stats
from xjoinindex.model import FactCell, empty_warehouse
from xjoinindex import xcube_io


def test_first_cell_expansion(w3):
    cell = build_index(w3).cells[0]
    assert cell.measures == (("quantity", 3.0),)
    assert cell.dims == (
        IndexedDimension("customers", "c1", (("cust_name", "Ada"), ("cust_city", "Lyon"))),
        IndexedDimension("products", "p1", (("prod_name", "Tea"),)),
    )


def test_empty_warehouse():
    assert build_index(empty_warehouse()).cells == ()


def test_dangling_reference(w3):
    facts = list(w3.facts)
    facts[0] = FactCell((("quantity", 3.0),), (("customers", "c9"), ("products", "p1")))
    with pytest.raises(DanglingReferenceError) as info:
        build_index(replace(w3, facts=tuple(facts)))
    assert (info.value.dimension, info.value.member_id, info.value.cell) == ("customers", "c9", 1)


def test_preserves_cells_and_source(w3):
    before = replace(w3)
    ix = build_index(w3)
    assert len(ix.cells) == len(w3.facts)
    assert [c.measures for c in ix.cells] == [f.measures for f in w3.facts]
    assert [tuple((d.dimension, d.member_id) for d in c.dims) for c in ix.cells] == [f.dim_refs for f in w3.facts]
    assert w3 == before
    assert build_index(w3) == ix


def test_stats(w3):
    ix = build_index(w3)
    s = index_stats(ix)
    assert (s.cell_count, s.dims_per_cell, s.attrs_per_dimension) == (3, 2, {"customers": 2, "products": 1})
    assert s.estimated_serialized_size == len(xcube_io.serialize_index(ix))
    empty = index_stats(build_index(empty_warehouse()))
    assert (empty.cell_count, empty.dims_per_cell, empty.attrs_per_dimension, empty.estimated_serialized_size) == (
        0, 0, {}, 0,
    )


def test_stats_table1_thousandth():
    w = generate(table1_profile().scaled(1 / 1000))
    assert index_stats(build_index(w)).cell_count == 16_260


def test_build_work_is_linear_in_cells():
    steps = []
    for cells in (1_000, 2_000, 4_000):
        counter = BuildCounter()
        build_index(generate(uniform_profile(3, 20, 4, cells, seed=1)), counter)
        steps.append(counter.steps)
    # 3 dimensions x (1 + 4 attributes) per cell
    assert steps == [15_000, 30_000, 60_000]
