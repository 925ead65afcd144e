from .code import (
    ExactReal,
    Fp8Code,
    RoundFlags,
    classify,
    decode,
    effective_exponent,
    encode_float,
    encode_rne,
    to_float,
)
from .oracle import (
    code_table,
    dump_code_table,
    oracle_add,
    oracle_mul,
    oracle_table,
    ordinal,
    ulp_distance,
)
from .reference import float_reference_add, float_reference_mul

__all__ = [
    "ExactReal",
    "Fp8Code",
    "RoundFlags",
    "classify",
    "code_table",
    "decode",
    "dump_code_table",
    "effective_exponent",
    "encode_float",
    "encode_rne",
    "float_reference_add",
    "float_reference_mul",
    "oracle_add",
    "oracle_mul",
    "oracle_table",
    "ordinal",
    "to_float",
    "ulp_distance",
]
