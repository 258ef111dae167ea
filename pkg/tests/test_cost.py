import math

import pytest
from hypothesis import given, strategies as st

from xjoinindex.cost import (
    CostParams,
    e_index,
    e_index_vector,
    e_noindex,
    e_noindex_vector,
    gain,
    log_spaced,
    sweep,
    sweep_to_csv,
    table1_mean_members,
)


def test_formula_values():
    assert e_noindex(CostParams(1, 1, 1, 1)) == 2
    # (10*5) * (5 + 100*4) = 50 * 405
    assert e_noindex(CostParams(10, 5, 100, 4)) == 20_250
    assert e_noindex(CostParams(0, 5, 100, 4)) == 0
    assert e_index(CostParams(1, 1, 1, 1)) == 2
    assert e_index(CostParams(10, 5, 100, 4)) == 90
    assert e_index(CostParams(16_260_336, 5, 1, 4)) == 146_343_024


def test_gain():
    assert gain(CostParams(10, 5, 100, 4)) == 225
    for a in range(0, 6):
        assert gain(CostParams(7, 1, 1, a)) == 1
    with pytest.raises(ZeroDivisionError):
        gain(CostParams(0, 5, 100, 4))
    with pytest.raises(ZeroDivisionError):
        gain(CostParams(3, 0, 100, 0))


def test_table1_scale_fits_and_overflow_detected():
    p = CostParams(16_260_336, 5, 50_000, 4)
    assert e_noindex(p) == 16_260_336 * 5 * (5 + 200_000)
    with pytest.raises(OverflowError):
        e_noindex(CostParams(10**12, 10**3, 10**6, 10))


def test_params_reject_negative():
    with pytest.raises(ValueError):
        CostParams(-1, 5)
    with pytest.raises(TypeError):
        CostParams(1.5, 5)


def test_vector_form_reduces_to_scalar():
    assert e_noindex_vector(10, [100] * 5, [4] * 5) == e_noindex(CostParams(10, 5, 100, 4))
    assert e_index_vector(10, 5, 4) == 90
    with pytest.raises(ValueError):
        e_noindex_vector(10, [1, 2], [1])


def test_sweep():
    (row,) = sweep([0], 5, 100, 4)
    assert (row.cells, row.e_noindex, row.e_index, row.gain) == (0, 0, 0, None)
    assert [r.gain for r in sweep([10, 100], 5, 100, 4)] == [225, 225]
    assert sweep_to_csv(sweep([10], 5, 100, 4)) == "cells,e_noindex,e_index,gain\n10,20250,90,225\n"
    with pytest.raises(ValueError):
        sweep([], 5, 100, 4)


def test_log_spaced():
    xs = log_spaced(1_000, 16_000_000, 15)
    assert xs[0] == 1_000 and xs[-1] == 16_000_000
    assert xs == sorted(xs)


def test_table1_mean():
    assert table1_mean_members() == (50_000 + 10_000 + 1_461 + 501 + 5) // 5 == 12_393


params = st.builds(
    CostParams,
    st.integers(0, 10**7),
    st.integers(1, 20),
    st.integers(1, 10**5),
    st.integers(0, 50),
)


@given(params)
def test_dominance(p):
    assert e_index(p) <= e_noindex(p)


@given(params, st.integers(0, 1000))
def test_linear_in_cells(p, k):
    scaled = CostParams(p.cells * k, p.dimensions, p.members_per_dim, p.attrs_per_dim)
    assert e_noindex(scaled) == k * e_noindex(p)
    assert e_index(scaled) == k * e_index(p)


@given(params)
def test_equality_cases(p):
    equal = e_index(p) == e_noindex(p)
    if p.cells == 0 or (p.dimensions == 1 and p.members_per_dim == 1):
        assert equal
    elif equal:
        # remaining equality: dims*(dims + d*a) == dims + a forces dims == 1 and d*a == a
        assert p.dimensions == 1 and p.attrs_per_dim == 0
