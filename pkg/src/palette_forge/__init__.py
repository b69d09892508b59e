"""Lossless palette-image compression by optimized palette reindexing."""

from .core import (
    IndexedImage,
    PairCostEvaluator,
    apply_permutation,
    cooccurrence_cost,
    cooccurrence_matrix,
    extract_indexed,
    first_order_entropy,
    neighbor_cost,
    render,
    residuals,
    scan,
    serpentine_scan,
)
from .estimators import ICAReorderer, PaletteReorderer, make_reorderer
from .ica import IcaParams, RunTrace

__version__ = "0.1.0"
