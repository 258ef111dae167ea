import pytest

from xjoinindex.model import DimensionDef, DimensionMember, FactCell, SchemaMeta, Warehouse

# (criterion, passed, detail) rows recorded by test_acceptance.py
ACCEPTANCE_RESULTS = []


def make_w3() -> Warehouse:
    schema = SchemaMeta(
        "Sales",
        ("quantity",),
        (
            DimensionDef("customers", ("cust_name", "cust_city")),
            DimensionDef("products", ("prod_name",)),
        ),
    )
    dims = {
        "customers": (
            DimensionMember("c1", (("cust_name", "Ada"), ("cust_city", "Lyon"))),
            DimensionMember("c2", (("cust_name", "Bob"), ("cust_city", "Paris"))),
        ),
        "products": (DimensionMember("p1", (("prod_name", "Tea"),)),),
    }
    facts = (
        FactCell((("quantity", 3.0),), (("customers", "c1"), ("products", "p1"))),
        FactCell((("quantity", 5.0),), (("customers", "c2"), ("products", "p1"))),
        FactCell((("quantity", 7.0),), (("customers", "c1"), ("products", "p1"))),
    )
    return Warehouse(schema, dims, facts)


Q1 = 'select sum(quantity) from facts where customers.cust_city = "Lyon" group by customers.cust_name'


@pytest.fixture
def w3():
    return make_w3()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
