import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from visarith.numerals import (
    ROMAN_MAX,
    digits_of,
    from_roman,
    one_hot_decode,
    one_hot_encode,
    roman_length_bound,
    roman_one_hot_decode,
    roman_one_hot_encode,
    to_roman,
)


@pytest.mark.parametrize(
    "value, M, digits",
    [(42, 3, [2, 4, 0]), (0, 7, [0] * 7), (9_999_999, 7, [9] * 7)],
)
def test_digits_of(value, M, digits):
    assert digits_of(value, M) == digits


def test_digits_of_overflow():
    with pytest.raises(ValueError):
        digits_of(1000, 3)
    with pytest.raises(ValueError):
        digits_of(-1, 3)


def test_one_hot_42():
    vec = one_hot_encode(42, 3)
    assert np.flatnonzero(vec).tolist() == [2, 14, 20]


def test_one_hot_zero_single_digit():
    assert np.flatnonzero(one_hot_encode(0, 1)).tolist() == [0]


def test_one_hot_exhaustive_round_trip():
    for v in range(10**4):
        vec = one_hot_encode(v, 4)
        assert vec.sum() == 4
        assert one_hot_decode(vec) == v


def test_one_hot_decode_rejects_malformed():
    with pytest.raises(ValueError):
        one_hot_decode(np.zeros(20))
    with pytest.raises(ValueError):
        one_hot_decode(np.ones(7))


@pytest.mark.parametrize("value, text", [(4, "IIII"), (6, "VI"), (0, ""), (9, "VIIII"), (1994, "MDCCCCLXXXXIIII")])
def test_to_roman_additive(value, text):
    assert to_roman(value) == text
    assert from_roman(text) == value


def test_max_length_is_35():
    assert len(to_roman(9_999_999)) == 35
    assert roman_length_bound(7) == 35
    assert len(to_roman(4999)) <= roman_length_bound(4)


@pytest.mark.parametrize("bad", ["IV", "VV", "IIIII", "XIIIIIV", "Q", "IM"])
def test_from_roman_rejects_non_additive(bad):
    with pytest.raises(ValueError):
        from_roman(bad)


def test_to_roman_range():
    with pytest.raises(ValueError):
        to_roman(ROMAN_MAX + 1)
    with pytest.raises(ValueError):
        to_roman(-1)


def test_roman_exhaustive_round_trip():
    for v in range(10**5 + 1):
        assert from_roman(to_roman(v)) == v


def test_roman_random_round_trip():
    rng = np.random.default_rng(2024)
    for v in rng.integers(0, ROMAN_MAX + 1, size=10**4):
        assert from_roman(to_roman(int(v))) == v


def test_roman_one_hot_blank_and_one():
    zero = roman_one_hot_encode(0).reshape(35, 15)
    assert (zero.argmax(axis=1) == 0).all()
    one = roman_one_hot_encode(1).reshape(35, 15)
    assert (one[:34].argmax(axis=1) == 0).all()
    assert one[34].argmax() == 1


def test_roman_one_hot_random_round_trip():
    rng = np.random.default_rng(9)
    for v in rng.integers(0, ROMAN_MAX + 1, size=10**4):
        vec = roman_one_hot_encode(int(v))
        assert vec.shape == (15 * 35,)
        assert roman_one_hot_decode(vec) == v


def test_roman_one_hot_too_short():
    with pytest.raises(ValueError):
        roman_one_hot_encode(4999, L=10)


@given(st.integers(0, ROMAN_MAX))
def test_roman_structure(value):
    s = to_roman(value)
    assert len(s) <= 35
    assert from_roman(s) == value


@given(st.integers(0, 10**7 - 1))
def test_one_hot_property(value):
    vec = one_hot_encode(value, 7)
    assert vec.sum() == 7
    assert one_hot_decode(vec) == value
