"""Reference palette orderings and the exhaustive optimum for small palettes."""

from __future__ import annotations

import itertools

import numpy as np

from .core import IndexedImage, PairCostEvaluator
from .exceptions import PaletteTooLarge

STRATEGIES = ("identity", "random", "luminance", "greedy_chain", "brute_force", "ica")
BRUTE_FORCE_MAX_COLORS = 8

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def _from_order(order) -> np.ndarray:
    """Turn a list of old indices (new position -> old index) into a map old -> new."""
    order = np.asarray(order, dtype=np.int64)
    perm = np.empty_like(order)
    perm[order] = np.arange(len(order))
    return perm


def identity_order(img: IndexedImage) -> np.ndarray:
    return np.arange(img.n_colors, dtype=np.int64)


def random_order(img: IndexedImage, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(img.n_colors).astype(np.int64)


def luminance_order(img: IndexedImage) -> np.ndarray:
    """Darkest color gets index 0; ties keep their original order."""
    luma = img.palette.astype(np.float64) @ LUMA_WEIGHTS
    return _from_order(np.argsort(luma, kind="stable"))


def greedy_chain_order(img: IndexedImage) -> np.ndarray:
    """Nearest-neighbor chain through RGB space.

    Starts at the most frequent color and repeatedly appends the closest
    unvisited color (Euclidean RGB distance, ties to the lowest index).
    """
    n = img.n_colors
    counts = np.bincount(img.indices.ravel(), minlength=n)
    rgb = img.palette.astype(np.int64)
    # squared distances are exact integers, so ties compare exactly
    dist = ((rgb[:, None, :] - rgb[None, :, :]) ** 2).sum(axis=2)
    visited = np.zeros(n, dtype=bool)
    current = int(np.argmax(counts))
    order = [current]
    visited[current] = True
    for _ in range(n - 1):
        d = np.where(visited, np.iinfo(np.int64).max, dist[current])
        current = int(np.argmin(d))
        visited[current] = True
        order.append(current)
    return _from_order(order)


def brute_force_optimal(img: IndexedImage, scan: str = "serpentine") -> tuple[np.ndarray, int]:
    """Exhaustive minimum-cost permutation for palettes of at most 8 colors.

    Ties resolve to the lexicographically smallest map.
    """
    n = img.n_colors
    if n > BRUTE_FORCE_MAX_COLORS:
        raise PaletteTooLarge(
            f"brute force is limited to {BRUTE_FORCE_MAX_COLORS} colors, got {n}")
    evaluator = PairCostEvaluator.from_image(img, scan)
    # itertools.permutations yields maps in lexicographic order
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    costs = evaluator.batch(perms)
    best = int(np.argmin(costs))
    return perms[best], int(costs[best])
