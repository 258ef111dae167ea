import pytest
from hypothesis import given, strategies as st

from xjoinindex.errors import (
    QuerySyntaxError,
    UnknownAttributeError,
    UnknownMeasureError,
    UnknownQueryDimensionError,
)
from xjoinindex.query import (
    AGGREGATES,
    INDEX_PLAN,
    Aggregation,
    GroupKey,
    Predicate,
    Query,
    bind,
    format_query,
    logical_query,
    parse_query,
    plan_join,
    rewrite_for_index,
)

from tests.conftest import Q1


def test_parse_q1():
    assert parse_query(Q1) == Query(
        (Aggregation("sum", "quantity"),),
        (Predicate("customers", "cust_city", "Lyon"),),
        (GroupKey("customers", "cust_name"),),
    )


def test_parse_global_group():
    q = parse_query("select count(quantity) from facts")
    assert q == Query((Aggregation("count", "quantity"),))


def test_empty_aggregate_argument():
    with pytest.raises(QuerySyntaxError) as info:
        parse_query("select sum() from facts")
    err = info.value
    assert (err.line, err.column) == (1, 12)
    assert err.expected == ("identifier",)


def test_keywords_case_insensitive_identifiers_not():
    q = parse_query('SELECT Sum(Qty), MAX(qty) FROM Facts WHERE Cust.City = "x" AND Cust.city = "y" GROUP BY Cust.City')
    assert q.aggregations == (Aggregation("sum", "Qty"), Aggregation("max", "qty"))
    assert [p.attribute for p in q.predicates] == ["City", "city"]


def test_multiline_error_position():
    with pytest.raises(QuerySyntaxError) as info:
        parse_query('select sum(q)\nfrom facts\nwhere a.b = c')
    assert (info.value.line, info.value.column) == (3, 13)
    assert info.value.expected == ("string",)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("", ('"select"',)),
        ("select", tuple(f'"{a}"' for a in AGGREGATES)),
        ("select sum(q)", ('","', '"from"')),
        ("select sum(q) from cube", ('"facts"',)),
        ("select sum(q) from facts limit", ('"where"', '"group"', "end of input")),
        ('select sum(q) from facts where a.b = "1" or', ('"and"', '"group"', "end of input")),
        ("select sum(q) from facts group a.b", ('"by"',)),
        ("select sum(q) from facts group by a.b c", ('","', "end of input")),
    ],
)
def test_expected_sets(text, expected):
    with pytest.raises(QuerySyntaxError) as info:
        parse_query(text)
    assert info.value.expected == expected


@pytest.mark.parametrize("text", ['select sum(q) from facts where a.b = "x', 'select sum(q) from facts where a.b = "\\q"', "select sum(q) ; "])
def test_lexical_errors(text):
    with pytest.raises(QuerySyntaxError):
        parse_query(text)


def test_string_escapes():
    q = parse_query(r'select sum(q) from facts where a.b = "say \"hi\"\\\n"')
    assert q.predicates[0].value == 'say "hi"\\\n'


def test_bind(w3):
    b = bind(parse_query(Q1), w3.schema)
    assert b.measure_positions == (0,)
    assert b.predicate_positions == ((0, 1),)
    assert b.group_positions == ((0, 0),)
    with pytest.raises(UnknownMeasureError, match="weight"):
        bind(parse_query("select sum(weight) from facts"), w3.schema)
    with pytest.raises(UnknownQueryDimensionError, match="times"):
        bind(parse_query('select sum(quantity) from facts where times.cust_city = "x"'), w3.schema)
    with pytest.raises(UnknownAttributeError, match="customers.zip"):
        bind(parse_query("select sum(quantity) from facts group by customers.zip"), w3.schema)


def test_rewrite_preserves_query(w3):
    bound = bind(parse_query(Q1), w3.schema)
    plan = rewrite_for_index(bound)
    assert plan.kind == INDEX_PLAN
    assert plan.query.predicates == (Predicate("customers", "cust_city", "Lyon"),)
    assert plan.predicate_paths == ("//CubeFact/cube/Cell/dimension[@id='customers']/attribute[@name='cust_city']/@value",)
    assert logical_query(plan) == parse_query(Q1)
    assert "Level[@node='customers']" in plan_join(bound).predicate_paths[0]

    free = rewrite_for_index(bind(parse_query("select count(quantity) from facts"), w3.schema))
    assert free.predicate_paths == () and free.query.predicates == ()


# -- properties -------------------------------------------------------------

idents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
values = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=12)
queries = st.builds(
    Query,
    st.lists(st.builds(Aggregation, st.sampled_from(AGGREGATES), idents), min_size=1, max_size=4).map(tuple),
    st.lists(st.builds(Predicate, idents, idents, values), max_size=4).map(tuple),
    st.lists(st.builds(GroupKey, idents, idents), max_size=4).map(tuple),
)


@given(queries)
def test_format_parse_round_trip(q):
    assert parse_query(format_query(q)) == q


@given(st.text(max_size=60))
def test_parse_is_total(text):
    try:
        q = parse_query(text)
    except QuerySyntaxError as err:
        assert err.line >= 1 and err.column >= 1
    else:
        assert q.aggregations


@given(queries)
def test_rewrite_never_changes_lists(q):
    from xjoinindex.model import DimensionDef, SchemaMeta

    dims = {}
    for p in q.predicates:
        dims.setdefault(p.dimension, set()).add(p.attribute)
    for g in q.group_by:
        dims.setdefault(g.dimension, set()).add(g.attribute)
    schema = SchemaMeta(
        "f",
        tuple(dict.fromkeys(a.measure for a in q.aggregations)),
        tuple(DimensionDef(d, tuple(sorted(a))) for d, a in dims.items()),
    )
    plan = rewrite_for_index(bind(q, schema))
    assert plan.query.aggregations == q.aggregations
    assert plan.query.predicates == q.predicates
    assert plan.query.group_by == q.group_by
