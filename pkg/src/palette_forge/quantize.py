"""Deterministic median-cut color quantization."""

from __future__ import annotations

import numpy as np

from .core import MAX_COLORS, IndexedImage, extract_indexed
from .exceptions import BadParams
from .validation import check_rgb_image


def _split(colors: np.ndarray, weights: np.ndarray, channel: int):
    """Split a box at the weighted median of ``channel``; median ties go low."""
    order = np.argsort(colors[:, channel], kind="stable")
    values = colors[order, channel]
    cum = np.cumsum(weights[order])
    median = values[np.searchsorted(cum, (cum[-1] + 1) // 2)]
    lower = colors[:, channel] <= median
    if lower.all():
        lower = colors[:, channel] < median
    return lower


def median_cut_palette(pixels, n_colors: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(palette, labels)`` where ``labels`` maps every pixel to a box.

    Boxes are split until there are ``min(n_colors, distinct colors)`` of
    them. The box with the widest channel range is split next (ties by box
    creation order) along that channel. A box's color is its pixel-weighted
    channel mean, rounded half up.
    """
    rgb = check_rgb_image(pixels)
    flat = rgb.reshape(-1, 3).astype(np.int64)
    colors, inverse, weights = np.unique(flat, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    target = min(n_colors, len(colors))

    boxes = [np.arange(len(colors))]
    while len(boxes) < target:
        ranges = [np.ptp(colors[b], axis=0) for b in boxes]
        widest = [int(r.max()) for r in ranges]
        k = int(np.argmax(widest))
        box = boxes[k]
        channel = int(np.argmax(ranges[k]))
        lower = _split(colors[box], weights[box], channel)
        boxes[k] = box[lower]
        boxes.append(box[~lower])

    palette = np.empty((len(boxes), 3), dtype=np.int64)
    box_of_color = np.empty(len(colors), dtype=np.int64)
    for k, box in enumerate(boxes):
        w = weights[box]
        total = (colors[box] * w[:, None]).sum(axis=0)
        palette[k] = (2 * total + w.sum()) // (2 * w.sum())
        box_of_color[box] = k
    return palette.astype(np.uint8), box_of_color[inverse].reshape(rgb.shape[:2])


def quantize_median_cut(pixels, n_colors: int) -> IndexedImage:
    """Quantize an RGB image to at most ``n_colors`` colors.

    Images that already have at most ``n_colors`` colors are reproduced
    exactly. The palette is in first-appearance order; if two boxes round to
    the same color they share one palette entry.
    """
    if not 2 <= n_colors <= MAX_COLORS:
        raise BadParams(f"color count must be in [2, {MAX_COLORS}], got {n_colors}")
    palette, labels = median_cut_palette(pixels, n_colors)
    return extract_indexed(palette[labels])
