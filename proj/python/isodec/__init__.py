"""Erasure decoding of convolutional codes via their linear-systems representation."""

from ._core import (
    IsodecError,
    decode,
    encode,
    erase,
    gen_example_spec,
    inspect,
    simulate,
    verify_example,
)

__all__ = [
    "IsodecError",
    "decode",
    "encode",
    "erase",
    "gen_example_spec",
    "inspect",
    "simulate",
    "verify_example",
]
