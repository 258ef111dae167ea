import pytest

from xjoinindex import xcube_io
from xjoinindex.errors import InvalidProfileError
from xjoinindex.generator import (
    GenProfile,
    format_profile,
    generate,
    parse_profile,
    table1_profile,
    uniform_profile,
)
from xjoinindex.model import validate


def test_table1_counts():
    p = table1_profile()
    assert p.cells == 16_260_336
    assert {d.name: d.members for d in p.dimensions} == {
        "customers": 50_000, "products": 10_000, "times": 1_461, "promotions": 501, "channels": 5,
    }
    assert {m.name for m in p.measures} == {"amount", "quantity"}


def test_thousandth_scaling():
    p = table1_profile().scaled(1 / 1000)
    assert {d.name: d.members for d in p.dimensions} == {
        "customers": 50, "products": 10, "times": 2, "promotions": 1, "channels": 1,
    }
    assert p.cells == 16_260


def test_zero_cells():
    w = generate(_zero_cells())
    assert w.facts == ()
    assert [len(w.dimensions[d]) for d in w.schema.dimension_names] == [1, 1, 50, 10, 2]


def _zero_cells():
    from dataclasses import replace

    return replace(table1_profile().scaled(1 / 1000), cells=0)


def test_determinism_and_validity():
    p = table1_profile(seed=7).with_size(2_000)
    a, b = generate(p), generate(p)
    assert a == b
    assert xcube_io.serialize_facts(a) == xcube_io.serialize_facts(b)
    assert xcube_io.serialize_dimensions(a) == xcube_io.serialize_dimensions(b)
    assert len(validate(a)) == 0
    assert generate(p.with_seed(8)) != a


def test_uniform_profile_shape():
    w = generate(uniform_profile(3, 12, 2, 50))
    assert all(len(w.dimensions[d]) == 12 for d in w.schema.dimension_names)
    assert all(len(m.attributes) == 2 for ms in w.dimensions.values() for m in ms)


def test_invalid_profiles():
    with pytest.raises(InvalidProfileError):
        generate(GenProfile((), table1_profile().measures, 10))
    with pytest.raises(InvalidProfileError):
        generate(GenProfile(table1_profile().dimensions, (), 10))


def test_profile_text_round_trip():
    p = table1_profile(seed=99).scaled(0.01)
    assert parse_profile(format_profile(p)) == p
    assert parse_profile(format_profile(p), seed=5).seed == 5


@pytest.mark.parametrize(
    "text",
    [
        "[dimension x]\nmembers = 1\n",
        "[warehouse]\ncells = many\n[measure q]\n[dimension d]\n",
        "[warehouse]\ncells = 1\n[dimension d]\nmembers = 2\n",
        "[warehouse]\n[measure q]\n[bogus z]\n",
        "not an ini file",
    ],
)
def test_bad_profile_text(text):
    with pytest.raises(InvalidProfileError):
        parse_profile(text)


def test_city_pool_contains_lyon():
    w = generate(table1_profile().with_size(1_000))
    cities = {m.attribute("cust_city") for m in w.dimensions["customers"]}
    assert "Lyon" in cities
