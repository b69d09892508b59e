"""Input validation helpers used at public entry points."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import LengthMismatch

SCAN_MODES = ("serpentine", "rowmajor")


def check_rgb_image(pixels) -> np.ndarray:
    """Return ``pixels`` as a nonempty ``(m, n, 3)`` uint8 array."""
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an RGB array of shape (m, n, 3), got {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("image must be nonempty")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"RGB channels must be integers, got dtype {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("RGB channels must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def check_permutation(perm, n_colors: int | None = None) -> np.ndarray:
    """Validate that ``perm`` is a bijection on ``{0, ..., M-1}``.

    Raises :class:`LengthMismatch` when ``n_colors`` is given and differs
    from ``len(perm)``, and ``ValueError`` when ``perm`` is not a bijection.
    """
    arr = np.asarray(perm)
    if arr.ndim != 1:
        raise ValueError(f"permutation must be 1-D, got shape {arr.shape}")
    if n_colors is not None and arr.shape[0] != n_colors:
        raise LengthMismatch(f"permutation has length {arr.shape[0]}, expected {n_colors}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("permutation entries must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= arr.size
                     or np.bincount(arr, minlength=arr.size).max() != 1):
        raise ValueError("permutation must contain each of 0..M-1 exactly once")
    return arr


def check_scan(mode: str) -> str:
    if mode == "row-major":
        mode = "rowmajor"
    if mode not in SCAN_MODES:
        raise ValueError(f"scan mode must be one of {SCAN_MODES}, got {mode!r}")
    return mode


def check_indexed_image(X):
    """Coerce ``X`` to an :class:`~palette_forge.core.IndexedImage`.

    Accepts an ``IndexedImage`` or an ``(m, n, 3)`` RGB array with at most
    256 distinct colors.
    """
    from .core import IndexedImage, extract_indexed

    if isinstance(X, IndexedImage):
        return X
    return extract_indexed(X)


def check_seed(seed) -> int:
    if seed is None:
        return 0
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, numbers.Integral):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return int(seed)
