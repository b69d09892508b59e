"""The ``.pfz`` container: scan, residuals and a canonical prefix code.

Layout, all integers little-endian::

    "PFZ1" | u8 version | u32 width | u32 height | u16 M | u8 scan mode
    | 3*M palette bytes | u16 alphabet size | u8 code length per symbol
    | u8 first index | u64 delta count | payload | u32 CRC-32

Deltas ``d`` become symbols through the interleaving ``0, -1, 1, -2, 2, ...``
(``2d`` for ``d >= 0``, ``-2d - 1`` otherwise). The CRC covers every byte
before it.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from . import prefix_code
from .core import (IndexedImage, apply_permutation, first_order_entropy, residuals,
                   scan as scan_image, unscan)
from .exceptions import CorruptChecksum, MalformedHeader, TruncatedPayload
from .validation import check_scan

MAGIC = b"PFZ1"
VERSION = 1
SCAN_CODES = {"serpentine": 0, "rowmajor": 1}
SCAN_NAMES = {v: k for k, v in SCAN_CODES.items()}

_HEADER = struct.Struct("<4sBIIHB")


def to_symbols(deltas) -> np.ndarray:
    d = np.asarray(deltas, dtype=np.int64)
    return np.where(d >= 0, 2 * d, -2 * d - 1)


def from_symbols(symbols) -> np.ndarray:
    s = np.asarray(symbols, dtype=np.int64)
    return np.where(s % 2 == 0, s // 2, -(s + 1) // 2)


@dataclass(frozen=True)
class SizeReport:
    raw_bits: int
    compressed_bits: int
    entropy_bound_bits: float
    payload_bits: int

    @property
    def compression_rate(self) -> float:
        return 1.0 - self.compressed_bits / self.raw_bits


def _symbol_stream(img: IndexedImage, scan: str):
    res = residuals(scan_image(img, scan))
    symbols = to_symbols(res.deltas)
    alphabet = int(symbols.max()) + 1 if symbols.size else 0
    lengths = prefix_code.code_lengths(np.bincount(symbols, minlength=alphabet))
    return res, symbols, lengths


def encode(img: IndexedImage, scan: str = "serpentine") -> bytes:
    """Serialize ``img`` losslessly; identical input gives identical bytes."""
    scan = check_scan(scan)
    res, symbols, lengths = _symbol_stream(img, scan)
    payload, _ = prefix_code.encode_symbols(symbols, lengths)
    parts = [
        _HEADER.pack(MAGIC, VERSION, img.width, img.height, img.n_colors, SCAN_CODES[scan]),
        img.palette.tobytes(),
        struct.pack("<H", len(lengths)),
        bytes(lengths),
        struct.pack("<BQ", res.first, len(res.deltas)),
        payload,
    ]
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


@dataclass
class _Sections:
    width: int
    height: int
    palette: np.ndarray
    scan: str
    lengths: list[int]
    first: int
    count: int
    payload_start: int


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, section: str) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedPayload(f"container ends inside the {section}", section=section)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk


def _parse_sections(blob: bytes) -> _Sections:
    cur = _Cursor(blob)
    magic, version, width, height, n_colors, scan_code = _HEADER.unpack(
        cur.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise MalformedHeader(f"bad magic {magic!r}", section="header")
    if version != VERSION:
        raise MalformedHeader(f"unsupported version {version}", section="header")
    if width == 0 or height == 0:
        raise MalformedHeader(f"bad dimensions {width}x{height}", section="header")
    if not 1 <= n_colors <= 256:
        raise MalformedHeader(f"bad palette size {n_colors}", section="header")
    if scan_code not in SCAN_NAMES:
        raise MalformedHeader(f"bad scan mode {scan_code}", section="header")
    palette = np.frombuffer(cur.take(3 * n_colors, "palette"), dtype=np.uint8).reshape(-1, 3)
    (alphabet,) = struct.unpack("<H", cur.take(2, "code table"))
    lengths = list(cur.take(alphabet, "code table"))
    first, count = struct.unpack("<BQ", cur.take(9, "payload header"))
    if count != width * height - 1:
        raise MalformedHeader(f"delta count {count} does not match {width}x{height}",
                              section="payload header")
    if first >= n_colors:
        raise MalformedHeader(f"first index {first} outside palette", section="payload header")
    if count and not any(lengths):
        raise MalformedHeader("empty code table for a nonempty payload", section="code table")
    return _Sections(width, height, palette, SCAN_NAMES[scan_code], lengths, first, count,
                     cur.pos)


_CRC_TABLE = []
for _byte in range(256):
    _reg = _byte
    for _ in range(8):
        _reg = (_reg >> 1) ^ (0xEDB88320 if _reg & 1 else 0)
    _CRC_TABLE.append(_reg)


def _is_single_bit_error(body: bytes, stored: int) -> bool:
    """True if ``body``/``stored`` differ from a consistent pair by one flipped bit."""
    syndrome = zlib.crc32(body) ^ stored
    if syndrome and syndrome & (syndrome - 1) == 0:
        return True
    # CRC-32 is affine, so a flip of bit j in the byte k places from the end
    # changes the checksum by T[1 << j] advanced through k zero bytes.
    regs = [_CRC_TABLE[1 << j] for j in range(8)]
    table = _CRC_TABLE
    for _ in range(len(body)):
        if syndrome in regs:
            return True
        regs = [table[r & 0xFF] ^ (r >> 8) for r in regs]
    return False


def _diagnose(blob: bytes) -> Exception:
    """Name the failure for a container whose checksum does not match."""
    if len(blob) >= 4 and _is_single_bit_error(blob[:-4], int.from_bytes(blob[-4:], "little")):
        return CorruptChecksum("checksum mismatch", section="checksum")
    try:
        sec = _parse_sections(blob)
        rest = blob[sec.payload_start:]
        _, used_bits = prefix_code.decode_symbols(rest, sec.lengths, sec.count)
    except (TruncatedPayload, MalformedHeader) as exc:
        return exc
    except ValueError:
        return CorruptChecksum("checksum mismatch", section="checksum")
    if len(rest) - (used_bits + 7) // 8 < 4:
        return TruncatedPayload("container ends inside the checksum", section="checksum")
    return CorruptChecksum("checksum mismatch", section="checksum")


def decode(blob: bytes) -> IndexedImage:
    """Inverse of :func:`encode`.

    Raises :class:`CorruptChecksum`, :class:`MalformedHeader` or
    :class:`TruncatedPayload`; a damaged container never decodes to an image.
    """
    blob = bytes(blob)
    if len(blob) < _HEADER.size + 4:
        raise TruncatedPayload("container shorter than its fixed header", section="header")
    if zlib.crc32(blob[:-4]) != int.from_bytes(blob[-4:], "little"):
        raise _diagnose(blob)
    sec = _parse_sections(blob[:-4])
    payload = blob[sec.payload_start:-4]
    try:
        symbols, used_bits = prefix_code.decode_symbols(payload, sec.lengths, sec.count)
    except ValueError as exc:
        raise MalformedHeader(str(exc), section="payload") from None
    if (used_bits + 7) // 8 != len(payload):
        raise MalformedHeader("payload length does not match its contents", section="payload")
    deltas = from_symbols(symbols)
    seq = np.empty(sec.count + 1, dtype=np.int64)
    seq[0] = sec.first
    seq[1:] = sec.first + np.cumsum(deltas)
    if seq.min() < 0 or seq.max() >= len(sec.palette):
        raise MalformedHeader("decoded index outside palette", section="payload")
    indices = unscan(seq, sec.height, sec.width, sec.scan)
    return IndexedImage(indices, sec.palette)


def read_scan_mode(blob: bytes) -> str:
    return _parse_sections(bytes(blob)).scan


def size_report(img: IndexedImage, perm, scan: str = "serpentine") -> SizeReport:
    """Sizes of ``img`` reindexed by ``perm``.

    ``raw_bits`` is one byte per pixel plus 24 bits per palette color.
    ``entropy_bound_bits`` is the first-order entropy bound of the delta
    stream plus 8 bits for the first index; ``payload_bits`` counts the same
    two parts as actually coded.
    """
    reindexed = apply_permutation(img, perm)
    res, symbols, lengths = _symbol_stream(reindexed, check_scan(scan))
    coded = int(np.asarray(lengths, dtype=np.int64)[symbols].sum()) if symbols.size else 0
    payload_bits = 8 + coded
    blob = encode(reindexed, scan)
    raw = 8 * img.height * img.width + 24 * img.n_colors
    bound = len(res.deltas) * first_order_entropy(res) + 8
    return SizeReport(raw, 8 * len(blob), bound, payload_bits)
