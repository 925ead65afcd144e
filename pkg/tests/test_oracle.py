from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.abstract import Fp8Error
from core.constants import FP8_BIAS
from fp8 import (
    ExactReal,
    Fp8Code,
    RoundFlags,
    classify,
    code_table,
    decode,
    effective_exponent,
    encode_float,
    encode_rne,
    float_reference_add,
    float_reference_mul,
    oracle_add,
    oracle_mul,
    oracle_table,
    ordinal,
    to_float,
    ulp_distance,
)
from fp8.code import split_rne
from fp8.reference import nearest_code

codes = st.integers(min_value=0, max_value=255)
finite_codes = codes.filter(lambda b: b & 0x7F != 0x7F)


class TestCodes:
    @pytest.mark.parametrize(
        "byte, value",
        [
            (0x38, 1.0),
            (0x7E, 448.0),
            (0x01, 2.0**-9),
            (0x08, 2.0**-6),
            (0x07, 7 * 2.0**-9),
            (0xB8, -1.0),
            (0x3C, 1.5),
        ],
    )
    def test_values(self, byte, value):
        assert to_float(byte) == value

    def test_negative_zero_keeps_its_sign(self):
        assert np.signbit(to_float(0x80))

    def test_decode_nan(self):
        with pytest.raises(Fp8Error):
            decode(0x7F)
        with pytest.raises(Fp8Error):
            decode(Fp8Code.from_byte(0xFF))

    def test_malformed(self):
        with pytest.raises(Fp8Error):
            Fp8Code.from_byte(256)
        with pytest.raises(Fp8Error):
            Fp8Code(0, 16, 0)

    def test_classes(self):
        table = code_table()
        assert len(table) == 256
        assert table["class"].value_counts().to_dict() == {
            "normal": 238,
            "subnormal": 14,
            "zero": 2,
            "nan": 2,
        }
        assert classify(0xFF) == "nan"
        assert Fp8Code.from_byte(0x81).cls == "subnormal"

    @given(codes)
    def test_byte_layout(self, byte):
        assert Fp8Code.from_byte(byte).byte == byte

    @pytest.mark.parametrize("byte", [b for b in range(256) if b & 0x7F != 0x7F])
    def test_decode_then_encode_is_the_identity(self, byte):
        assert encode_rne(decode(byte)).byte == byte
        assert encode_rne(decode(byte), saturate=False).byte == byte

    def test_negative_zero_survives_the_round_trip(self):
        assert decode(0x80).sign == 1
        assert encode_rne(decode(0x80)) == Fp8Code(1, 0, 0)

    @pytest.mark.parametrize(
        "code, expected",
        [
            (Fp8Code(0, 0, 3), 1),
            (Fp8Code(1, 0, 0), 1),
            (Fp8Code(0, 1, 0), 1),
            (Fp8Code(0, 7, 0), 7),
            (Fp8Code(0, 15, 6), 15),
        ],
    )
    def test_effective_exponent(self, code, expected):
        assert effective_exponent(code) == expected
        assert effective_exponent(code.byte) == expected

    @given(finite_codes)
    def test_effective_exponent_sets_the_scale(self, byte):
        # subnormals sit at 2^(1 - bias), like E=1
        code = Fp8Code.from_byte(byte)
        if code.is_zero:
            return
        value = abs(decode(code).to_fraction())
        unbiased = effective_exponent(code) - FP8_BIAS
        low, high = Fraction(2) ** unbiased, Fraction(2) ** (unbiased + 1)
        if code.exponent == 0:
            assert unbiased == 1 - FP8_BIAS
            assert value < low
        else:
            assert low <= value < high


class TestRounding:
    def test_flags(self):
        assert not RoundFlags(lsb=0, round_bit=1, sticky=0).round_up
        assert RoundFlags(lsb=1, round_bit=1, sticky=0).round_up
        assert RoundFlags(lsb=0, round_bit=1, sticky=1).round_up
        assert not RoundFlags(lsb=1, round_bit=0, sticky=1).round_up

    def test_split(self):
        kept, flags = split_rne(0b10110, 2)
        assert kept == 0b101
        assert (flags.lsb, flags.round_bit, flags.sticky) == (1, 1, 0)

    def test_ties_go_to_even(self):
        # 1 + 1/16 sits halfway between 1 and 1.125
        assert encode_float(1 + 1 / 16).byte == 0x38
        assert encode_float(1.125 + 1 / 16).byte == 0x3A
        assert encode_float(2.0**-10).byte == 0x00
        assert encode_float(3 * 2.0**-10).byte == 0x02

    def test_underflow_keeps_the_sign(self):
        assert encode_float(-(2.0**-12)).byte == 0x80

    def test_overflow(self):
        assert encode_float(1000.0).byte == 0x7E
        assert encode_float(-1000.0).byte == 0xFE
        assert encode_float(1000.0, saturate=False).byte == 0x7F
        # halfway between 448 and the first value past it rounds to 448
        assert encode_float(464.0, saturate=False).byte == 0x7E
        assert encode_float(465.0, saturate=False).byte == 0x7F

    def test_carry_into_the_exponent(self):
        assert encode_rne(ExactReal(0, 31, -4)).byte == 0x40

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_encode_matches_the_nearest_code_search(self, value):
        assert encode_float(value) == nearest_code(value)
        assert encode_float(value, saturate=False) == nearest_code(value, saturate=False)


class TestOracle:
    def test_one_times_one(self):
        assert oracle_mul(0x38, 0x38).byte == 0x38

    def test_sign_of_zero_products(self):
        assert oracle_mul(0x00, 0xB8).byte == 0x80
        assert oracle_mul(0x80, 0x80).byte == 0x00

    def test_exact_cancellation_is_positive_zero(self):
        assert oracle_add(0x38, 0xB8).byte == 0x00
        assert oracle_add(0x80, 0x00).byte == 0x00
        assert oracle_add(0x80, 0x80).byte == 0x80

    def test_subnormal_times_large_normal(self):
        # 2^-9 * 416 = 0.8125 is exact
        result = oracle_mul(0x01, 0x7D)
        assert result.byte == 0x35
        assert to_float(result) == 0.8125

    def test_overflowing_sum(self):
        assert oracle_add(0x7E, 0x7E).byte == 0x7E
        assert oracle_add(0x7E, 0x7E, saturate=False).byte == 0x7F

    @pytest.mark.parametrize("op", ["mul", "add"])
    def test_nan_propagates(self, op):
        table = oracle_table(op)
        assert (table[0x7F, :] == 0x7F).all()
        assert (table[:, 0xFF] == 0x7F).all()

    @pytest.mark.parametrize("op", ["mul", "add"])
    def test_commutative(self, op):
        table = oracle_table(op)
        np.testing.assert_array_equal(table, table.T)

    @pytest.mark.parametrize("saturate", [True, False])
    @pytest.mark.parametrize(
        "op, reference", [("mul", float_reference_mul), ("add", float_reference_add)]
    )
    def test_agrees_with_the_double_precision_reference(self, op, reference, saturate):
        table = oracle_table(op, saturate)
        expected = np.array(
            [[reference(a, b, saturate).byte for b in range(256)] for a in range(256)],
            dtype=np.uint8,
        )
        np.testing.assert_array_equal(table, expected)

    def test_table_is_read_only(self):
        with pytest.raises(ValueError):
            oracle_table("mul")[0, 0] = 1

    @given(finite_codes, finite_codes)
    def test_sum_is_the_nearest_code(self, a, b):
        exact = decode(a).to_fraction() + decode(b).to_fraction()
        got = oracle_add(a, b)
        if got.byte & 0x7F == 0x7E:
            return
        error = abs(decode(got).to_fraction() - exact)
        for neighbour in (got.byte - 1, got.byte + 1):
            if 0 <= neighbour <= 255 and not Fp8Code.from_byte(neighbour).is_nan:
                assert error <= abs(decode(neighbour).to_fraction() - exact)


class TestOrdinal:
    def test_distances(self):
        assert ulp_distance(0x38, 0x39) == 1
        assert ulp_distance(0x00, 0x80) == 0
        assert ulp_distance(0x01, 0x81) == 2

    def test_nan_has_no_position(self):
        with pytest.raises(Fp8Error):
            ordinal(0x7F)

    @given(finite_codes, finite_codes)
    def test_ordinal_follows_the_value(self, a, b):
        if to_float(a) < to_float(b):
            assert ordinal(a) < ordinal(b)
        elif to_float(a) == to_float(b):
            assert ordinal(a) == ordinal(b)
