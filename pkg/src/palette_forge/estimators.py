"""scikit-learn compatible palette reorderers.

``fit`` learns a permutation for one image and ``transform`` reindexes an
image with it. Both accept an :class:`~palette_forge.core.IndexedImage` or an
``(m, n, 3)`` RGB array with at most 256 colors::

    >>> reorderer = ICAReorderer(random_state=0).fit(img)
    >>> reindexed = reorderer.transform(img)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import baselines, ica
from .core import IndexedImage, PairCostEvaluator, apply_permutation
from .validation import check_indexed_image, check_scan, check_seed


class _ReordererMixin(TransformerMixin):
    def _finish_fit(self, img: IndexedImage, perm, scan: str):
        evaluator = PairCostEvaluator.from_image(img, scan)
        self.permutation_ = np.asarray(perm, dtype=np.int64)
        self.n_colors_ = img.n_colors
        self.cost_ = evaluator(self.permutation_)
        self.identity_cost_ = evaluator(np.arange(img.n_colors))
        return self

    def transform(self, X) -> IndexedImage:
        check_is_fitted(self, "permutation_")
        return apply_permutation(check_indexed_image(X), self.permutation_)

    def score(self, X, y=None) -> float:
        """Negative neighbor cost of ``X`` under the fitted permutation."""
        check_is_fitted(self, "permutation_")
        img = check_indexed_image(X)
        return -float(PairCostEvaluator.from_image(img, check_scan(self.scan))(self.permutation_))


class PaletteReorderer(_ReordererMixin, BaseEstimator):
    """Baseline orderings: identity, random, luminance, greedy_chain, brute_force."""

    def __init__(self, strategy: str = "identity", scan: str = "serpentine", random_state=None):
        self.strategy = strategy
        self.scan = scan
        self.random_state = random_state

    def fit(self, X, y=None):
        img = check_indexed_image(X)
        scan = check_scan(self.scan)
        if self.strategy == "identity":
            perm = baselines.identity_order(img)
        elif self.strategy == "random":
            perm = baselines.random_order(img, np.random.default_rng(check_seed(self.random_state)))
        elif self.strategy == "luminance":
            perm = baselines.luminance_order(img)
        elif self.strategy == "greedy_chain":
            perm = baselines.greedy_chain_order(img)
        elif self.strategy == "brute_force":
            perm, _ = baselines.brute_force_optimal(img, scan)
        else:
            raise ValueError(f"unknown strategy {self.strategy!r}; "
                             f"choose from {baselines.STRATEGIES[:-1]}")
        return self._finish_fit(img, perm, scan)


class ICAReorderer(_ReordererMixin, BaseEstimator):
    """Palette reordering by the Imperialist Competitive Algorithm.

    Parameters mirror :class:`palette_forge.ica.IcaParams`; ``random_state``
    is the integer seed. After fitting, ``trace_`` holds the run history.
    """

    def __init__(self, n_country: int = 80, n_imp: int = 16, alpha: float = 0.1,
                 attraction_prob: float = 0.9, max_iters: int = 500, stall_window: int = 50,
                 warm_start: bool = False, scan: str = "serpentine", random_state=0):
        self.n_country = n_country
        self.n_imp = n_imp
        self.alpha = alpha
        self.attraction_prob = attraction_prob
        self.max_iters = max_iters
        self.stall_window = stall_window
        self.warm_start = warm_start
        self.scan = scan
        self.random_state = random_state

    def ica_params(self) -> ica.IcaParams:
        return ica.IcaParams(
            n_country=self.n_country, n_imp=self.n_imp, alpha=self.alpha,
            attraction_prob=self.attraction_prob, max_iters=self.max_iters,
            stall_window=self.stall_window, seed=check_seed(self.random_state),
            warm_start=self.warm_start,
        ).validate()

    def fit(self, X, y=None):
        img = check_indexed_image(X)
        scan = check_scan(self.scan)
        self.trace_ = ica.run(img, self.ica_params(), scan)
        self.n_iter_ = self.trace_.iterations
        return self._finish_fit(img, self.trace_.best.genome, scan)


def make_reorderer(strategy: str, seed: int = 0, scan: str = "serpentine",
                   ica_params: ica.IcaParams | None = None):
    """Build the estimator for a strategy name from the CLI vocabulary."""
    if strategy == "ica":
        p = ica_params or ica.IcaParams()
        return ICAReorderer(n_country=p.n_country, n_imp=p.n_imp, alpha=p.alpha,
                            attraction_prob=p.attraction_prob, max_iters=p.max_iters,
                            stall_window=p.stall_window, warm_start=p.warm_start,
                            scan=scan, random_state=seed)
    if strategy not in baselines.STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {baselines.STRATEGIES}")
    return PaletteReorderer(strategy=strategy, scan=scan, random_state=seed)
