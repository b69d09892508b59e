import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from palette_forge.exceptions import TruncatedPayload
from palette_forge.prefix_code import canonical_codes, code_lengths, decode_symbols, encode_symbols


def test_single_symbol_gets_one_bit():
    assert code_lengths([0, 0, 15]) == [0, 0, 1]


def test_empty():
    assert code_lengths([0, 0]) == [0, 0]


def test_known_lengths():
    # classic example: frequencies 45, 13, 12, 16, 9, 5
    assert code_lengths([45, 13, 12, 16, 9, 5]) == [1, 3, 3, 3, 4, 4]


def test_canonical_assignment():
    codes = canonical_codes([2, 1, 3, 3])
    assert codes == {1: (0b0, 1), 0: (0b10, 2), 2: (0b110, 3), 3: (0b111, 3)}


def test_encode_bits():
    data, n_bits = encode_symbols([1, 0, 3], [2, 1, 3, 3])
    assert n_bits == 6
    assert data == bytes([0b01011100])


def test_truncated():
    data, _ = encode_symbols([2, 3, 2, 3], [2, 1, 3, 3])
    with pytest.raises(TruncatedPayload):
        decode_symbols(data[:1], [2, 1, 3, 3], 4)


def test_invalid_code_word():
    # lengths [2, 2] leave codes 10 and 11 unused
    with pytest.raises(ValueError):
        decode_symbols(bytes([0b11000000]), [2, 2], 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=300))
def test_round_trip_and_redundancy_bound(symbols):
    freqs = np.bincount(symbols)
    lengths = code_lengths(freqs)
    data, n_bits = encode_symbols(symbols, lengths)
    decoded, used = decode_symbols(data, lengths, len(symbols))
    assert decoded.tolist() == symbols and used == n_bits
    # Kraft equality for a complete code, and entropy <= average length < entropy + 1
    used_lengths = [l for l in lengths if l]
    if len(used_lengths) > 1:
        assert sum(2.0 ** -l for l in used_lengths) == pytest.approx(1.0)
    p = freqs[freqs > 0] / len(symbols)
    entropy = float(-(p * np.log2(p)).sum())
    assert entropy * len(symbols) - 1e-9 <= n_bits <= (entropy + 1) * len(symbols) + 1e-9
