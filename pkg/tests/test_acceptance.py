"""Acceptance gate: one test and one summary line per criterion."""

import time

import numpy as np
import pytest

from palette_forge import bench, ica
from palette_forge.baselines import brute_force_optimal, random_order
from palette_forge.codec import decode, encode
from palette_forge.core import (PairCostEvaluator, apply_permutation, cooccurrence_cost,
                                cooccurrence_matrix, extract_indexed, first_order_entropy,
                                neighbor_cost, render, residuals, serpentine_scan)
from palette_forge.estimators import make_reorderer
from palette_forge.ica import (Country, Empire, IcaParams, colony_counts, empire_total_cost,
                               form_empires, imperialist_competition, init_population,
                               normalized_powers, order_crossover)
from palette_forge.quantize import quantize_median_cut
from palette_forge.ppm import load_ppm

from conftest import CORPUS, WORKED_INDICES, random_image

pytestmark = pytest.mark.acceptance

LOSSLESS_STRATEGIES = ("identity", "random", "luminance", "greedy_chain", "ica")
# A short search keeps 1000 ICA fits inside the time budget; losslessness does
# not depend on how good the permutation is.
FAST_ICA = IcaParams(n_country=20, n_imp=4, max_iters=10, stall_window=5)


def report(request, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {title}: {detail}"
    request.config._acceptance_lines.append(line)
    print(line)
    return ok


def corpus_images():
    return sorted(CORPUS.glob("*.ppm"))


@pytest.fixture(scope="module")
def corpus_ica_runs():
    """Default-parameter ICA on every corpus image at 16 and 64 colors, seeds 0..2."""
    runs = {}
    start = time.perf_counter()
    for path in corpus_images():
        rgb = load_ppm(path)
        for m in (16, 64):
            img = quantize_median_cut(rgb, m)
            for seed in range(3):
                runs[path.stem, m, seed] = (img, ica.run(img, IcaParams(seed=seed)))
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def corpus_bench(tmp_path_factory):
    config = bench.load_config(CORPUS / "bench.cfg")
    out = tmp_path_factory.mktemp("bench")
    return bench.run_bench(config, out / "run1", workers=1), out


def test_lossless_round_trip(request):
    rng = np.random.default_rng(20240101)
    start = time.perf_counter()
    total = passed = 0
    for k in range(1000):
        h, w = (int(v) for v in rng.integers(1, 33, 2))
        m = int(rng.integers(1, 257))
        img = random_image(rng, h, w, m)
        for strategy in LOSSLESS_STRATEGIES:
            est = make_reorderer(strategy, seed=k, ica_params=FAST_ICA).fit(img)
            decoded = decode(encode(apply_permutation(img, est.permutation_)))
            total += 1
            passed += np.array_equal(render(decoded), render(img))
    elapsed = time.perf_counter() - start
    ok = passed == total and elapsed < 60
    report(request, 1, "losslessness", ok,
           f"{passed}/{total} round trips pixel-identical in {elapsed:.1f} s (limit 60 s)")
    assert ok


def test_cost_oracle_equivalence(request):
    rng = np.random.default_rng(777)
    start = time.perf_counter()
    matches = 0
    for _ in range(500):
        h, w = (int(v) for v in rng.integers(1, 33, 2))
        img = random_image(rng, h, w, int(rng.integers(1, 257)))
        perm = rng.permutation(img.n_colors)
        direct = neighbor_cost(serpentine_scan(apply_permutation(img, perm)))
        matrix = cooccurrence_cost(cooccurrence_matrix(img), perm)
        matches += int(direct) == int(matrix) == int(PairCostEvaluator.from_image(img)(perm))
    elapsed = time.perf_counter() - start
    ok = matches == 500 and elapsed < 10
    report(request, 2, "cost-oracle equivalence", ok,
           f"{matches}/500 exact matches in {elapsed:.2f} s (limit 10 s)")
    assert ok


def test_worked_example(request, worked_image, worked_pixels):
    seq = serpentine_scan(worked_image)
    res = residuals(seq)
    checks = {
        "scan": seq.tolist() == [0, 1, 1, 2, 1, 3, 3, 1, 2, 0, 1, 0, 0, 2, 1, 0],
        "cost 16": neighbor_cost(seq) == 16,
        "deltas": res.deltas.tolist() == [1, 0, 1, -1, 2, 0, -2, 1, -2, 1, -1, 0, 2, -1, -1],
        "entropy": abs(first_order_entropy(res) - 2.256564762130954) < 1e-12,
        "matrix cost": cooccurrence_cost(cooccurrence_matrix(worked_image), np.arange(4)) == 16,
        "optimum": brute_force_optimal(worked_image)[1] == 16,
        "palette order": np.array_equal(extract_indexed(worked_pixels).palette,
                                        worked_image.palette),
    }
    failed = [name for name, good in checks.items() if not good]
    ok = not failed
    report(request, 3, "worked example", ok,
           f"{len(checks) - len(failed)}/{len(checks)} exact checks"
           + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok


def test_tiny_instance_optimality(request):
    start = time.perf_counter()
    hits = runs = 0
    for i in range(20):
        img = random_image(np.random.default_rng(i), 16, 16, (4, 5, 6)[i % 3])
        _, optimum = brute_force_optimal(img)
        for seed in range(3):
            runs += 1
            hits += ica.run(img, IcaParams(seed=seed)).best.cost == optimum
    elapsed = time.perf_counter() - start
    ok = hits >= 0.9 * runs and elapsed < 120
    report(request, 4, "tiny-instance optimality", ok,
           f"{hits}/{runs} runs optimal ({hits / runs:.1%}, need >= 90%) "
           f"in {elapsed:.1f} s (limit 120 s)")
    assert ok


def test_baseline_dominance(request, corpus_ica_runs):
    runs, ica_seconds = corpus_ica_runs
    start = time.perf_counter()
    beat_identity = beat_median = 0
    worst = []
    for (name, m, seed), (img, trace) in sorted(runs.items()):
        evaluator = PairCostEvaluator.from_image(img)
        identity = evaluator(np.arange(img.n_colors))
        rng = np.random.default_rng(1000 + m)
        median = float(np.median(evaluator.batch(
            np.stack([random_order(img, rng) for _ in range(100)]))))
        beat_identity += trace.best.cost <= identity
        beat_median += trace.best.cost <= median
        if trace.best.cost > identity:
            worst.append(f"{name}/{m}/s{seed}: {trace.best.cost} vs {identity}")
    elapsed = ica_seconds + time.perf_counter() - start
    n = len(runs)
    ok_identity = beat_identity == n
    ok_median = beat_median == n and elapsed < 900
    report(request, "5a", "ICA <= identity order on corpus", ok_identity,
           f"{beat_identity}/{n} runs" + (f"; e.g. {worst[0]}" if worst else ""))
    report(request, "5b", "ICA <= median of 100 random orders on corpus", ok_median,
           f"{beat_median}/{n} runs in {elapsed:.1f} s (limit 900 s)")
    assert ok_identity and ok_median


def test_rate_trends(request, corpus_bench):
    result, _ = corpus_bench
    ica64, ica16 = result.mean_rate("ica", 64), result.mean_rate("ica", 16)
    ica_all, identity_all = result.mean_rate("ica"), result.mean_rate("identity")
    for line in bench.published_comparison(result):
        request.config._acceptance_lines.append("    " + line)
    ok_colors = ica64 > ica16
    ok_identity = ica_all > identity_all
    report(request, "6a", "mean ICA rate at 64 colors > at 16 colors", ok_colors,
           f"{ica64:.4f} vs {ica16:.4f} (published 0.43 vs 0.37)")
    report(request, "6b", "mean ICA rate > mean identity rate", ok_identity,
           f"{ica_all:.4f} vs {identity_all:.4f}")
    assert ok_colors and ok_identity


def test_ica_mechanics(request, corpus_ica_runs):
    checks = {}
    checks["powers example"] = np.allclose(normalized_powers([10, 20, 40]), [0.6, 0.4, 0.0],
                                           rtol=0, atol=1e-12)
    checks["colony counts example"] = colony_counts([0.6, 0.4, 0.0], 10).tolist() == [6, 4, 0]
    empire = Empire(Country(np.arange(3), 10),
                    [Country(np.arange(3), c) for c in (20, 30, 40)])
    checks["total cost example"] = abs(empire_total_cost(empire, 0.1) - 13.0) < 1e-12
    checks["crossover example"] = order_crossover([2, 0, 1, 3], [3, 1, 0, 2], 2).tolist() \
        == [2, 0, 3, 1]
    rng = np.random.default_rng(5)
    checks["powers sum"] = all(
        abs(normalized_powers(rng.integers(0, 10**6, int(rng.integers(1, 50)))).sum() - 1)
        <= 1e-12 for _ in range(1000))

    img = random_image(np.random.default_rng(9), 16, 16, 10)
    evaluator = PairCostEvaluator.from_image(img)
    params = IcaParams()
    empires = form_empires(init_population(10, params, rng, evaluator), params)
    conserved = True
    for _ in range(1000):
        empires = imperialist_competition(empires, params.alpha, rng)
        conserved &= sum(len(e.countries()) for e in empires) == params.n_country
    checks["conservation over 1000 steps"] = conserved

    runs, _ = corpus_ica_runs
    checks["monotone best cost on corpus runs"] = all(
        all(a >= b for a, b in zip(t.best_costs, t.best_costs[1:])) for _, t in runs.values())
    failed = [name for name, good in checks.items() if not good]
    ok = not failed
    report(request, 7, "ICA mechanics", ok,
           f"{len(checks) - len(failed)}/{len(checks)} checks"
           + (f"; failed: {', '.join(failed)}" if failed else "")
           + f"; {len(runs)} corpus runs checked for monotonicity")
    assert ok


def test_determinism(request, corpus_bench):
    _, out = corpus_bench
    config = bench.load_config(CORPUS / "bench.cfg")
    bench.run_bench(config, out / "run2", workers=1)
    bench.run_bench(config, out / "run8", workers=8)
    first = (out / "run1" / "bench.csv").read_bytes()
    same_rerun = first == (out / "run2" / "bench.csv").read_bytes()
    same_workers = first == (out / "run8" / "bench.csv").read_bytes()
    ok = same_rerun and same_workers
    report(request, 8, "determinism", ok,
           f"rerun identical: {same_rerun}; 1 vs 8 workers identical: {same_workers} "
           f"({len(first)} bytes)")
    assert ok
