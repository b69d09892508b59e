"""Benchmark grid: images x color counts x strategies x seeds, written as CSV.

The config is a flat ``key = value`` text file; ``#`` starts a comment::

    images = astronaut.ppm, coffee.ppm     # relative to the config file
    colors = 16, 64
    strategies = identity, random, luminance, greedy_chain, ica
    repetitions = 3
    base_seed = 0
    scan = serpentine
    out = results
    n_country = 80                          # any IcaParams field

``bench.csv`` holds one row per cell and is byte-for-byte reproducible;
wall-clock times go to ``timings.csv`` instead.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ica
from .baselines import STRATEGIES
from .codec import size_report
from .core import apply_permutation, first_order_entropy, residuals, scan as scan_image
from .estimators import make_reorderer
from .exceptions import BadParams
from .ppm import load_ppm
from .quantize import quantize_median_cut
from .validation import check_scan

logger = logging.getLogger(__name__)

THREADS_ENV = "PALETTE_FORGE_THREADS"
PUBLISHED_RATES = {64: 0.43, 16: 0.37}

BENCH_COLUMNS = ("image", "colors", "M", "strategy", "seed", "cost", "entropy",
                 "compressed_bits", "compression_rate", "iterations", "error")
SUMMARY_COLUMNS = ("image", "colors", "strategy", "runs", "mean_cost", "best_cost",
                   "mean_entropy", "best_entropy", "mean_rate", "best_rate")
TIMING_COLUMNS = ("image", "colors", "strategy", "seed", "wall_ms")

_ICA_FIELDS = {f.name: f.type for f in dataclasses.fields(ica.IcaParams) if f.name != "seed"}


@dataclass
class ExperimentConfig:
    images: list[Path]
    colors: list[int] = field(default_factory=lambda: [16, 64])
    strategies: list[str] = field(
        default_factory=lambda: ["identity", "random", "luminance", "greedy_chain", "ica"])
    repetitions: int = 3
    base_seed: int = 0
    scan: str = "serpentine"
    out: Path = Path("bench-out")
    ica_overrides: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        if not self.images:
            raise BadParams("config lists no images")
        for m in self.colors:
            if not 2 <= m <= 256:
                raise BadParams(f"color counts must lie in [2, 256], got {m}")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise BadParams(f"unknown strategy {s!r}; choose from {STRATEGIES}")
        if self.repetitions < 1:
            raise BadParams("repetitions must be at least 1")
        try:
            self.scan = check_scan(self.scan)
        except ValueError as exc:
            raise BadParams(str(exc)) from None
        self.ica_params(0)
        return self

    def ica_params(self, seed: int) -> ica.IcaParams:
        return ica.IcaParams(**self.ica_overrides, seed=seed).validate()

    def seeds(self) -> list[int]:
        return [self.base_seed + k for k in range(self.repetitions)]


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_config(text: str, base_dir: Path | str = ".") -> ExperimentConfig:
    """Parse ``key = value`` lines; unknown keys raise :class:`BadParams`."""
    base_dir = Path(base_dir)
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadParams(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise BadParams(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    kwargs = {}
    overrides = {}
    try:
        for key, value in values.items():
            if key == "images":
                kwargs["images"] = [base_dir / p for p in _split_list(value)]
            elif key == "colors":
                kwargs["colors"] = [int(v) for v in _split_list(value)]
            elif key == "strategies":
                kwargs["strategies"] = _split_list(value)
            elif key in ("repetitions", "base_seed"):
                kwargs[key] = int(value)
            elif key == "scan":
                kwargs["scan"] = value
            elif key == "out":
                kwargs["out"] = base_dir / value
            elif key in _ICA_FIELDS:
                overrides[key] = _parse_ica_value(key, value)
            else:
                raise BadParams(f"unknown config key {key!r}")
    except ValueError as exc:
        if isinstance(exc, BadParams):
            raise
        raise BadParams(f"bad config value: {exc}") from None
    if "images" not in kwargs:
        raise BadParams("config must set 'images'")
    return ExperimentConfig(**kwargs, ica_overrides=overrides).validate()


def _parse_ica_value(key: str, value: str):
    kind = _ICA_FIELDS[key]
    if kind in (bool, "bool"):
        if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise BadParams(f"{key} must be a boolean, got {value!r}")
        return value.lower() in ("true", "1", "yes")
    if kind in (float, "float"):
        return float(value)
    return int(value)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


@functools.lru_cache(maxsize=32)
def _quantized(path: str, colors: int):
    return quantize_median_cut(load_ppm(path), colors)


def run_cell(config: ExperimentConfig, image: Path, colors: int, strategy: str,
             seed: int) -> tuple[dict, float]:
    """Run one grid cell; returns the CSV row and the wall time in ms."""
    row = {"image": image.stem, "colors": colors, "strategy": strategy, "seed": seed}
    start = time.perf_counter()
    try:
        img = _quantized(str(image), colors)
        reorderer = make_reorderer(strategy, seed, config.scan, config.ica_params(seed))
        reorderer.fit(img)
        perm = reorderer.permutation_
        report = size_report(img, perm, config.scan)
        res = residuals(scan_image(apply_permutation(img, perm), config.scan))
        row.update(
            M=img.n_colors, cost=int(reorderer.cost_),
            entropy=f"{first_order_entropy(res):.6f}",
            compressed_bits=report.compressed_bits,
            compression_rate=f"{report.compression_rate:.6f}",
            iterations=getattr(reorderer, "n_iter_", 0), error="",
        )
    except Exception as exc:  # a failed cell becomes an error row
        logger.warning("cell %s/%s/%s/%s failed: %s", image.stem, colors, strategy, seed, exc)
        row.update({c: "" for c in BENCH_COLUMNS if c not in row})
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row, (time.perf_counter() - start) * 1000.0


def _run_cell_args(args):
    return run_cell(*args)


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            requested = int(raw)
        except ValueError:
            raise BadParams(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if requested < 0:
        raise BadParams("worker count must be nonnegative")
    return requested or (os.cpu_count() or 1)


def _sort_key(row: dict):
    return (row["image"], int(row["colors"]), row["strategy"], int(row["seed"]))


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and best values per (image, colors, strategy), error rows excluded."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        if row["error"]:
            continue
        groups.setdefault((row["image"], int(row["colors"]), row["strategy"]), []).append(row)
    out = []
    for (image, colors, strategy), grp in sorted(groups.items()):
        costs = [int(r["cost"]) for r in grp]
        ents = [float(r["entropy"]) for r in grp]
        rates = [float(r["compression_rate"]) for r in grp]
        out.append({
            "image": image, "colors": colors, "strategy": strategy, "runs": len(grp),
            "mean_cost": f"{np.mean(costs):.3f}", "best_cost": min(costs),
            "mean_entropy": f"{np.mean(ents):.6f}", "best_entropy": f"{min(ents):.6f}",
            "mean_rate": f"{np.mean(rates):.6f}", "best_rate": f"{max(rates):.6f}",
        })
    return out


def _csv_text(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


@dataclass
class BenchResult:
    rows: list[dict]
    summary: list[dict]
    timings: list[dict]

    @property
    def failed(self) -> int:
        return sum(1 for r in self.rows if r["error"])

    def mean_rate(self, strategy: str, colors: int | None = None) -> float:
        rates = [float(r["compression_rate"]) for r in self.rows
                 if r["strategy"] == strategy and not r["error"]
                 and (colors is None or int(r["colors"]) == colors)]
        return float(np.mean(rates)) if rates else float("nan")


def run_bench(config: ExperimentConfig, out_dir: Path | None = None,
              workers: int | None = None) -> BenchResult:
    """Run every grid cell and write bench.csv, summary.csv and timings.csv."""
    config.validate()
    out_dir = Path(out_dir or config.out)
    cells = [(config, image, colors, strategy, seed)
             for image in config.images for colors in config.colors
             for strategy in config.strategies for seed in config.seeds()]
    n_workers = min(worker_count(workers), len(cells))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_run_cell_args, cells))
    else:
        results = [run_cell(*cell) for cell in cells]

    rows = sorted((r for r, _ in results), key=_sort_key)
    timings = sorted(({"image": r["image"], "colors": r["colors"], "strategy": r["strategy"],
                       "seed": r["seed"], "wall_ms": f"{ms:.1f}"} for r, ms in results),
                     key=_sort_key)
    result = BenchResult(rows, summarize(rows), timings)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bench.csv").write_text(_csv_text(rows, BENCH_COLUMNS), encoding="utf-8")
    (out_dir / "summary.csv").write_text(_csv_text(result.summary, SUMMARY_COLUMNS),
                                         encoding="utf-8")
    (out_dir / "timings.csv").write_text(_csv_text(timings, TIMING_COLUMNS), encoding="utf-8")
    return result


def published_comparison(result: BenchResult, colors=(64, 16)) -> list[str]:
    """Lines comparing measured mean rates with the published averages."""
    lines = []
    for m in colors:
        measured = result.mean_rate("ica", m)
        published = PUBLISHED_RATES.get(m)
        ref = f"{published:.0%}" if published is not None else "n/a"
        lines.append(f"M={m}: mean ICA compression rate {measured:.1%} (published: {ref}); "
                     f"identity {result.mean_rate('identity', m):.1%}")
    return lines
