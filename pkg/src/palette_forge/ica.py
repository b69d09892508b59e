"""Imperialist Competitive Algorithm over palette permutations.

Every country is a permutation of palette indices; its cost is the
neighbor-difference cost of the image reindexed by it. The best countries
become imperialists, the rest are split among them as colonies, colonies are
pulled toward their imperialist by a prefix-copy crossover, and empires
compete for the weakest colonies until the best cost stalls or the iteration
budget runs out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import IndexedImage, PairCostEvaluator
from .exceptions import BadParams, LengthMismatch
from .validation import check_scan, check_seed

logger = logging.getLogger(__name__)


@dataclass
class Country:
    genome: np.ndarray
    cost: int


@dataclass
class Empire:
    imperialist: Country
    colonies: list[Country] = field(default_factory=list)
    total_cost: float = 0.0

    def countries(self) -> list[Country]:
        return [self.imperialist, *self.colonies]


@dataclass(frozen=True)
class IcaParams:
    n_country: int = 80
    n_imp: int = 16
    alpha: float = 0.1
    attraction_prob: float = 0.9
    max_iters: int = 500
    stall_window: int = 50
    seed: int = 0
    # start one country at the image's current palette order
    warm_start: bool = False

    @property
    def n_col(self) -> int:
        return self.n_country - self.n_imp

    def validate(self) -> "IcaParams":
        if not 1 <= self.n_imp < self.n_country:
            raise BadParams(f"need 1 <= n_imp < n_country, got n_imp={self.n_imp}, "
                            f"n_country={self.n_country}")
        if self.n_col < self.n_imp:
            raise BadParams(f"need at least as many colonies as imperialists, got "
                            f"{self.n_col} colonies for {self.n_imp} imperialists")
        if not 0.0 < self.alpha < 1.0:
            raise BadParams(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 <= self.attraction_prob <= 1.0:
            raise BadParams(f"attraction_prob must lie in [0, 1], got {self.attraction_prob}")
        if self.max_iters < 1 or self.stall_window < 1:
            raise BadParams("max_iters and stall_window must be positive")
        try:
            check_seed(self.seed)
        except ValueError as exc:
            raise BadParams(str(exc)) from None
        return self


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    best_cost: int
    mean_cost: float
    n_empires: int


@dataclass
class RunTrace:
    records: list[IterationRecord] = field(default_factory=list)
    best: Country | None = None
    iterations: int = 0
    reason: str = ""

    @property
    def best_costs(self) -> list[int]:
        return [r.best_cost for r in self.records]


def init_population(n_colors: int, params: IcaParams, rng: np.random.Generator,
                    evaluator) -> list[Country]:
    """Draw ``n_country`` uniformly random permutations and cost them."""
    params.validate()
    if n_colors < 1:
        raise BadParams("palette size must be at least 1")
    genomes = np.stack([rng.permutation(n_colors) for _ in range(params.n_country)])
    costs = evaluator.batch(genomes)
    return [Country(g, int(c)) for g, c in zip(genomes, costs)]


def normalized_powers(costs) -> np.ndarray:
    """Relative power of each imperialist from its cost.

    Power is ``(max cost - cost)`` normalized to sum to one; when every cost
    is equal the powers are uniform.
    """
    costs = np.asarray(costs, dtype=np.float64)
    deficit = costs.max() - costs
    total = deficit.sum()
    if total <= 0:
        return np.full(len(costs), 1.0 / len(costs))
    return deficit / total


def colony_counts(powers, n_col: int) -> np.ndarray:
    """Floor of ``power * n_col``; leftovers go one each to the strongest empires."""
    powers = np.asarray(powers, dtype=np.float64)
    counts = np.floor(powers * n_col + 1e-9).astype(np.int64)
    leftover = n_col - int(counts.sum())
    by_power = np.argsort(-powers, kind="stable")
    for k in range(leftover):
        counts[by_power[k % len(counts)]] += 1
    return counts


def empire_total_cost(empire: Empire, alpha: float) -> float:
    """Imperialist cost plus ``alpha`` times the mean colony cost."""
    if not empire.colonies:
        return float(empire.imperialist.cost)
    mean = sum(c.cost for c in empire.colonies) / len(empire.colonies)
    return empire.imperialist.cost + alpha * mean


def form_empires(countries: list[Country], params: IcaParams) -> list[Empire]:
    """Split a population into empires.

    The ``n_imp`` cheapest countries (ties by population order) become
    imperialists, strongest first. The remaining countries keep their
    population order and are dealt out in contiguous runs sized by
    :func:`colony_counts`.
    """
    order = sorted(range(len(countries)), key=lambda i: countries[i].cost)
    imp_idx = order[:params.n_imp]
    imp_set = set(imp_idx)
    colonies = [countries[i] for i in range(len(countries)) if i not in imp_set]
    powers = normalized_powers([countries[i].cost for i in imp_idx])
    counts = colony_counts(powers, len(colonies))

    empires = []
    start = 0
    for i, k in zip(imp_idx, counts):
        empire = Empire(countries[i], colonies[start:start + k])
        empire.total_cost = empire_total_cost(empire, params.alpha)
        empires.append(empire)
        start += k
    return empires


def order_crossover(imperialist, colony, cut: int) -> np.ndarray:
    """Copy ``imperialist[:cut]`` and fill the rest with the missing symbols
    in the order they occur in ``colony``."""
    imperialist = np.asarray(imperialist)
    colony = np.asarray(colony)
    if imperialist.shape != colony.shape:
        raise LengthMismatch(
            f"genome lengths differ: {imperialist.shape[0]} vs {colony.shape[0]}")
    head = imperialist[:cut]
    missing = np.ones(len(colony), dtype=bool)
    missing[head] = False
    return np.concatenate([head, colony[missing[colony]]])


def _inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return inv


def _crossover_in_order_view(imperialist, colony, cut: int) -> np.ndarray:
    # Cross the palette orders (new slot -> old color), not the maps, so the
    # imperialist's first ``cut`` palette slots are what the colony inherits.
    child = order_crossover(_inverse(imperialist), _inverse(colony), cut)
    return _inverse(child)


def assimilate(colony: Country, imperialist: Country, rng: np.random.Generator,
               evaluator) -> Country:
    """Move ``colony`` toward ``imperialist`` with a random single-point cut.

    The crossover acts on palette orders: the child's first ``cut`` palette
    slots hold the imperialist's colors and the remaining slots hold the
    other colors in the order the colony places them.
    """
    n = len(imperialist.genome)
    if len(colony.genome) != n:
        raise LengthMismatch(f"genome lengths differ: {n} vs {len(colony.genome)}")
    if n == 1:
        return colony
    cut = int(rng.integers(1, n))
    genome = _crossover_in_order_view(imperialist.genome, colony.genome, cut)
    return Country(genome, evaluator(genome))


def assimilation_sweep(empires: list[Empire], params: IcaParams, rng: np.random.Generator,
                       evaluator) -> list[Empire]:
    """Assimilate each colony with probability ``attraction_prob``.

    RNG draws happen colony by colony in empire order (one uniform draw, then
    a cut draw if selected); the new genomes are costed in one batch.
    """
    pending = []
    for e, empire in enumerate(empires):
        n = len(empire.imperialist.genome)
        for c, colony in enumerate(empire.colonies):
            if rng.random() >= params.attraction_prob or n == 1:
                continue
            cut = int(rng.integers(1, n))
            genome = _crossover_in_order_view(empire.imperialist.genome, colony.genome, cut)
            pending.append((e, c, genome))
    if not pending:
        return empires
    genomes = np.stack([g for _, _, g in pending])
    costs = evaluator.batch(genomes)
    for (e, c, _), genome, cost in zip(pending, genomes, costs):
        empires[e].colonies[c] = Country(genome, int(cost))
    return empires


def promote_best_colony(empire: Empire) -> Empire:
    """Swap the imperialist with its cheapest colony if that colony is cheaper."""
    if not empire.colonies:
        return empire
    costs = [c.cost for c in empire.colonies]
    best = int(np.argmin(costs))
    if costs[best] < empire.imperialist.cost:
        empire.imperialist, empire.colonies[best] = empire.colonies[best], empire.imperialist
    return empire


def _roulette(probs: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, int(np.flatnonzero(probs)[-1]))


def imperialist_competition(empires: list[Empire], alpha: float,
                            rng: np.random.Generator) -> list[Empire]:
    """Hand the weakest empire's worst colony to a power-weighted winner.

    The winner is drawn by roulette over :func:`normalized_powers` of the
    total costs. An empire left without colonies is dissolved and its
    imperialist joins the winner as a colony; an empire that starts the step
    with no colonies is dissolved directly, its imperialist being contested
    among the other empires.
    """
    if len(empires) <= 1:
        return empires
    totals = np.array([e.total_cost for e in empires])
    weakest = int(np.argmax(totals))
    loser = empires[weakest]
    probs = normalized_powers(totals)

    if loser.colonies:
        worst = int(np.argmax([c.cost for c in loser.colonies]))
        contested = loser.colonies.pop(worst)
    else:
        contested = loser.imperialist
        probs[weakest] = 0.0
        if probs.sum() == 0.0:
            probs = np.ones(len(empires))
            probs[weakest] = 0.0
    winner = empires[_roulette(probs, rng)]
    winner.colonies.append(contested)

    if not loser.colonies:
        if contested is not loser.imperialist:
            winner.colonies.append(loser.imperialist)
        empires.pop(weakest)
    else:
        loser.total_cost = empire_total_cost(loser, alpha)
    winner.total_cost = empire_total_cost(winner, alpha)
    return empires


def should_terminate(trace: RunTrace, params: IcaParams) -> tuple[bool, str]:
    """Stop after ``stall_window`` iterations without improvement or at ``max_iters``."""
    best = trace.best_costs
    w = params.stall_window
    if len(best) >= w and best[-w] == best[-1]:
        return True, "stall"
    if trace.iterations >= params.max_iters:
        return True, "budget"
    return False, ""


def run(img: IndexedImage, params: IcaParams, scan: str = "serpentine") -> RunTrace:
    """Search for the palette permutation with the lowest neighbor cost.

    Identical image, parameters and seed give identical traces.
    """
    params.validate()
    scan = check_scan(scan)
    rng = np.random.default_rng(params.seed)
    evaluator = PairCostEvaluator.from_image(img, scan)

    countries = init_population(img.n_colors, params, rng, evaluator)
    if params.warm_start:
        identity = np.arange(img.n_colors)
        countries[0] = Country(identity, evaluator(identity))
    empires = form_empires(countries, params)
    best = min(countries, key=lambda c: c.cost)
    trace = RunTrace(best=Country(best.genome.copy(), best.cost))

    while True:
        assimilation_sweep(empires, params, rng, evaluator)
        for empire in empires:
            promote_best_colony(empire)
            empire.total_cost = empire_total_cost(empire, params.alpha)
        imperialist_competition(empires, params.alpha, rng)

        everyone = [c for e in empires for c in e.countries()]
        leader = min(everyone, key=lambda c: c.cost)
        if leader.cost < trace.best.cost:
            trace.best = Country(leader.genome.copy(), leader.cost)
        trace.iterations += 1
        trace.records.append(IterationRecord(
            trace.iterations, trace.best.cost,
            float(np.mean([c.cost for c in everyone])), len(empires)))

        done, reason = should_terminate(trace, params)
        if done:
            trace.reason = reason
            logger.debug("ICA stopped after %d iterations (%s), best cost %d",
                         trace.iterations, reason, trace.best.cost)
            return trace
