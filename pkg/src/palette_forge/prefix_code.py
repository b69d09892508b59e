"""Canonical prefix (Huffman) codes and MSB-first bit packing."""

from __future__ import annotations

import heapq

import numpy as np

from .exceptions import TruncatedPayload


def code_lengths(freqs) -> list[int]:
    """Huffman code length per symbol; zero-frequency symbols get length 0.

    A lone used symbol gets a 1-bit code.
    """
    freqs = [int(f) for f in freqs]
    heap = [(f, sym, ()) for sym, f in enumerate(freqs) if f > 0]
    lengths = [0] * len(freqs)
    if not heap:
        return lengths
    if len(heap) == 1:
        lengths[heap[0][1]] = 1
        return lengths
    heapq.heapify(heap)
    # each heap entry carries the symbols below it; ties break on lowest symbol
    while len(heap) > 1:
        f1, s1, leaves1 = heapq.heappop(heap)
        f2, s2, leaves2 = heapq.heappop(heap)
        merged = (leaves1 or (s1,)) + (leaves2 or (s2,))
        for sym in merged:
            lengths[sym] += 1
        heapq.heappush(heap, (f1 + f2, min(s1, s2), merged))
    return lengths


def canonical_codes(lengths) -> dict[int, tuple[int, int]]:
    """Map symbol -> (code, length) for canonical code assignment."""
    items = sorted((length, sym) for sym, length in enumerate(lengths) if length > 0)
    codes = {}
    code = 0
    prev = 0
    for length, sym in items:
        code <<= length - prev
        codes[sym] = (code, length)
        code += 1
        prev = length
    return codes


def encode_symbols(symbols, lengths) -> tuple[bytes, int]:
    """Pack the code words of ``symbols``, zero-padded to a byte boundary.

    Returns the packed bytes and the number of meaningful bits.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.size == 0:
        return b"", 0
    table = canonical_codes(lengths)
    size = max(table) + 1
    code_of = np.zeros(size, dtype=np.int64)
    len_of = np.zeros(size, dtype=np.int64)
    for sym, (code, length) in table.items():
        code_of[sym] = code
        len_of[sym] = length
    codes = code_of[symbols]
    lens = len_of[symbols]
    if lens.min() == 0:
        raise ValueError("symbol without a code word")
    ends = np.cumsum(lens)
    starts = ends - lens
    n_bits = int(ends[-1])
    bits = np.zeros(n_bits, dtype=np.uint8)
    for k in range(int(lens.max())):
        live = lens > k
        shift = lens[live] - 1 - k
        bits[starts[live] + k] = (codes[live] >> shift) & 1
    return np.packbits(bits).tobytes(), n_bits


def decode_symbols(data: bytes, lengths, count: int) -> tuple[np.ndarray, int]:
    """Decode ``count`` symbols; return them and the number of bits consumed.

    Raises :class:`TruncatedPayload` if ``data`` runs out first and
    ``ValueError`` on a bit pattern that is not a code word.
    """
    out = np.empty(count, dtype=np.int64)
    if count == 0:
        return out, 0
    max_len = max(lengths)
    # canonical decoding tables: per length, first code and offset into the symbol list
    n_per_len = [0] * (max_len + 1)
    for length in lengths:
        if length:
            n_per_len[length] += 1
    ordered = [sym for _, sym in sorted((l, s) for s, l in enumerate(lengths) if l > 0)]
    first_code = [0] * (max_len + 2)
    first_index = [0] * (max_len + 2)
    code = index = 0
    for length in range(1, max_len + 1):
        first_code[length] = code
        first_index[length] = index
        code = (code + n_per_len[length]) << 1
        index += n_per_len[length]

    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)).tolist()
    n_bits = len(bits)
    pos = 0
    for i in range(count):
        code = 0
        length = 0
        while True:
            if length == max_len:
                raise ValueError("invalid code word in payload")
            if pos >= n_bits:
                raise TruncatedPayload(
                    f"payload ended after {i} of {count} symbols", section="payload")
            code = (code << 1) | bits[pos]
            pos += 1
            length += 1
            offset = code - first_code[length]
            if 0 <= offset < n_per_len[length]:
                out[i] = ordered[first_index[length] + offset]
                break
    return out, pos
