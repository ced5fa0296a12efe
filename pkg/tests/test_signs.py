import numpy as np
import pytest

from rsp_sim.errors import UnsupportedOrderError, ValidationError
from rsp_sim.signs import SignPattern, cayley_dickson_signs, find_violation, sign_pattern


def test_m1_rows():
    s = sign_pattern(1)
    assert s.table.tolist() == [[1, 1], [1, -1]]


def test_m2_row2():
    assert sign_pattern(2).table[2].tolist() == [1, -1, -1, 1]


def test_m3_row6():
    assert sign_pattern(3).table[6].tolist() == [1, -1, -1, 1, 1, -1, -1, 1]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fixed_tables_valid(m):
    assert find_violation(sign_pattern(m).table) is None


@pytest.mark.parametrize("m", [1, 2, 3])
def test_doubling_strategy_valid_up_to_three(m):
    assert find_violation(cayley_dickson_signs(m)) is None
    SignPattern(m, cayley_dickson_signs(m))


def test_doubling_reproduces_two_qubit_table():
    np.testing.assert_array_equal(cayley_dickson_signs(2), sign_pattern(2).table)


@pytest.mark.parametrize("m", [4, 5])
def test_higher_orders_unsupported_with_witness(m):
    with pytest.raises(UnsupportedOrderError) as info:
        sign_pattern(m)
    r, rp, c = info.value.witness
    s = cayley_dickson_signs(m).astype(int)
    d = r ^ rp
    assert s[r, c] * s[rp, c] != -s[r, c ^ d] * s[rp, c ^ d]


def test_custom_strategy_is_validated():
    with pytest.raises(UnsupportedOrderError):
        sign_pattern(4, strategy=lambda m: np.ones((1 << m, 1 << m), dtype=np.int8))


def test_invalid_table_rejected():
    bad = np.array([[1, 1], [1, 1]])
    assert find_violation(bad) == (0, 1, 0)
    with pytest.raises(ValidationError):
        SignPattern(1, bad)


def test_first_row_must_be_positive():
    assert find_violation(np.array([[1, -1], [1, 1]])) == (0, 0, 1)


def test_bad_m():
    with pytest.raises(ValidationError):
        sign_pattern(0)
