"""Indexed images, scan orders and the neighbor-difference objective.

An :class:`IndexedImage` stores an ``(m, n)`` matrix of palette indices and an
``(M, 3)`` uint8 palette. Indices are 0-based. A permutation is an integer
array ``perm`` of length ``M`` with ``perm[old_index] = new_index``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import EmptySequence, LengthMismatch, TooManyColors
from .validation import check_permutation, check_rgb_image, check_scan

MAX_COLORS = 256


@dataclass(frozen=True, eq=False)
class IndexedImage:
    """Palette-indexed image.

    Parameters
    ----------
    indices : ndarray of shape (m, n)
        Palette index of every pixel, each in ``[0, M)``.
    palette : ndarray of shape (M, 3), dtype uint8
        Distinct RGB colors, every one referenced by at least one pixel.
    """

    indices: np.ndarray
    palette: np.ndarray

    def __post_init__(self):
        indices = np.array(self.indices, dtype=np.int64)
        palette = np.array(self.palette, dtype=np.int64)
        if indices.ndim != 2 or indices.size == 0:
            raise ValueError(f"indices must be a nonempty 2-D array, got shape {indices.shape}")
        if palette.ndim != 2 or palette.shape[1] != 3:
            raise ValueError(f"palette must have shape (M, 3), got {palette.shape}")
        n_colors = palette.shape[0]
        if not 1 <= n_colors <= MAX_COLORS:
            raise TooManyColors(f"palette size must be in [1, {MAX_COLORS}], got {n_colors}")
        if palette.min() < 0 or palette.max() > 255:
            raise ValueError("palette channels must lie in [0, 255]")
        if indices.min() < 0 or indices.max() >= n_colors:
            raise ValueError(f"indices must lie in [0, {n_colors - 1}]")
        if len(np.unique(palette, axis=0)) != n_colors:
            raise ValueError("palette entries must be pairwise distinct")
        if np.bincount(indices.ravel(), minlength=n_colors).min() == 0:
            raise ValueError("every palette entry must be referenced by some pixel")
        indices.flags.writeable = False
        palette = palette.astype(np.uint8)
        palette.flags.writeable = False
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "palette", palette)

    @property
    def height(self) -> int:
        return self.indices.shape[0]

    @property
    def width(self) -> int:
        return self.indices.shape[1]

    @property
    def n_colors(self) -> int:
        return self.palette.shape[0]

    def __eq__(self, other):
        if not isinstance(other, IndexedImage):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.palette, other.palette
        )

    def __repr__(self):
        return f"IndexedImage(height={self.height}, width={self.width}, n_colors={self.n_colors})"


class ResidualSequence(NamedTuple):
    first: int
    deltas: np.ndarray


def extract_indexed(pixels) -> IndexedImage:
    """Build an indexed image from an ``(m, n, 3)`` RGB array.

    The palette lists colors in order of first appearance in a row-major scan.
    Raises :class:`TooManyColors` if there are more than 256 distinct colors.
    """
    rgb = check_rgb_image(pixels)
    flat = rgb.reshape(-1, 3).astype(np.int64)
    keys = (flat[:, 0] << 16) | (flat[:, 1] << 8) | flat[:, 2]
    uniq, first_pos, inverse = np.unique(keys, return_index=True, return_inverse=True)
    if len(uniq) > MAX_COLORS:
        raise TooManyColors(
            f"image has {len(uniq)} distinct colors, at most {MAX_COLORS} allowed; quantize first"
        )
    order = np.argsort(first_pos, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    indices = rank[inverse.ravel()].reshape(rgb.shape[:2])
    palette = flat[first_pos[order]]
    return IndexedImage(indices, palette)


def render(img: IndexedImage) -> np.ndarray:
    """Return the ``(m, n, 3)`` uint8 RGB pixels of ``img``."""
    return img.palette[img.indices]


def apply_permutation(img: IndexedImage, perm) -> IndexedImage:
    """Reindex ``img`` so that old index ``k`` becomes ``perm[k]``.

    The rendered image is unchanged.
    """
    perm = check_permutation(perm, img.n_colors)
    palette = np.empty_like(img.palette)
    palette[perm] = img.palette
    return IndexedImage(perm[img.indices], palette)


def inverse_permutation(perm) -> np.ndarray:
    perm = check_permutation(perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return inv


def serpentine_scan(img: IndexedImage) -> np.ndarray:
    """Flatten the index plane boustrophedon-style.

    Even rows run left to right and odd rows right to left, so consecutive
    elements are always 4-neighbors.
    """
    rows = img.indices.copy()
    rows[1::2] = rows[1::2, ::-1]
    return rows.ravel()


def row_major_scan(img: IndexedImage) -> np.ndarray:
    return img.indices.ravel().copy()


def scan(img: IndexedImage, mode: str = "serpentine") -> np.ndarray:
    mode = check_scan(mode)
    if mode == "serpentine":
        return serpentine_scan(img)
    return row_major_scan(img)


def unscan(seq, height: int, width: int, mode: str = "serpentine") -> np.ndarray:
    """Inverse of :func:`scan`: rebuild the ``(height, width)`` index matrix."""
    mode = check_scan(mode)
    seq = np.asarray(seq, dtype=np.int64)
    if seq.size != height * width:
        raise LengthMismatch(f"sequence of length {seq.size} cannot fill {height}x{width}")
    rows = seq.reshape(height, width).copy()
    if mode == "serpentine":
        rows[1::2] = rows[1::2, ::-1]
    return rows


def neighbor_cost(seq) -> int:
    """Sum of absolute differences between consecutive scan elements."""
    seq = np.asarray(seq, dtype=np.int64)
    if seq.size == 0:
        raise EmptySequence("scan sequence is empty")
    return int(np.abs(np.diff(seq)).sum())


def residuals(seq) -> ResidualSequence:
    seq = np.asarray(seq, dtype=np.int64)
    if seq.size == 0:
        raise EmptySequence("scan sequence is empty")
    return ResidualSequence(int(seq[0]), np.diff(seq))


def reconstruct(res: ResidualSequence) -> np.ndarray:
    """Undo :func:`residuals`."""
    out = np.empty(len(res.deltas) + 1, dtype=np.int64)
    out[0] = res.first
    np.cumsum(res.deltas, out=out[1:])
    out[1:] += res.first
    return out


def first_order_entropy(res: ResidualSequence) -> float:
    """Shannon entropy, in bits per symbol, of the delta histogram.

    A residual sequence without deltas (single-pixel image) has entropy 0.
    """
    deltas = np.asarray(res.deltas)
    if deltas.size == 0:
        return 0.0
    _, counts = np.unique(deltas, return_counts=True)
    return histogram_entropy(counts)


def histogram_entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    if counts.size <= 1:
        return 0.0
    q = counts / counts.sum()
    return float(-(q * np.log2(q)).sum())


def cooccurrence_matrix(img: IndexedImage, mode: str = "serpentine") -> np.ndarray:
    """Symmetric count matrix of adjacent index pairs along the scan.

    ``A[a, b] == A[b, a]`` counts scan positions where the unordered pair
    ``{s[i-1], s[i]}`` equals ``{a, b}``; diagonal entries count repeats.
    The upper triangle (diagonal included) sums to ``m*n - 1``.
    """
    seq = scan(img, mode)
    n_colors = img.n_colors
    lo = np.minimum(seq[:-1], seq[1:])
    hi = np.maximum(seq[:-1], seq[1:])
    upper = np.bincount(lo * n_colors + hi, minlength=n_colors * n_colors)
    upper = upper.reshape(n_colors, n_colors)
    return upper + np.triu(upper, 1).T


def cooccurrence_cost(A, perm) -> int:
    """Neighbor cost of the image reindexed by ``perm``, computed from ``A``."""
    A = np.asarray(A)
    perm = check_permutation(perm, A.shape[0])
    dist = np.abs(perm[:, None] - perm[None, :])
    return int((np.triu(A, 1) * dist).sum())


class PairCostEvaluator:
    """Fast neighbor-cost evaluation from the nonzero off-diagonal pairs of ``A``.

    ``evaluator(perm)`` returns one cost; ``evaluator.batch(perms)`` takes a
    ``(k, M)`` array and returns ``k`` costs.
    """

    def __init__(self, A):
        A = np.asarray(A, dtype=np.int64)
        self.n_colors = A.shape[0]
        a, b = np.nonzero(np.triu(A, 1))
        self.left = a
        self.right = b
        self.weights = A[a, b]

    @classmethod
    def from_image(cls, img: IndexedImage, mode: str = "serpentine") -> "PairCostEvaluator":
        return cls(cooccurrence_matrix(img, mode))

    def __call__(self, perm) -> int:
        perm = np.asarray(perm)
        return int(np.abs(perm[self.left] - perm[self.right]) @ self.weights)

    def batch(self, perms) -> np.ndarray:
        perms = np.asarray(perms, dtype=np.int64)
        if perms.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.abs(perms[:, self.left] - perms[:, self.right]) @ self.weights
