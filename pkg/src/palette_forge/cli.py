"""Command-line entry point: ``palette-forge {compress,decompress,bench,oracle}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .baselines import STRATEGIES, brute_force_optimal
from .codec import decode, encode, size_report
from .core import apply_permutation, render
from .estimators import make_reorderer
from .exceptions import CorruptChecksum, MalformedHeader, PaletteForgeError, TruncatedPayload
from .ica import IcaParams
from .ppm import load_ppm, write_ppm
from .quantize import quantize_median_cut

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CORRUPT = 3
EXIT_TRUNCATED = 4
EXIT_MALFORMED = 5

def _scan_arg(value: str) -> str:
    return "rowmajor" if value == "row-major" else value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="palette-forge",
        description="Lossless palette-image compression with optimized palette order.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "compress", help="quantize, reorder and encode a P6 image",
        description="Prints one CSV line: input, M, strategy, seed, cost, raw_bits, "
                    "compressed_bits, entropy_bound_bits, compression_rate.")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--colors", type=int, default=64)
    p.add_argument("--strategy", choices=STRATEGIES, default="ica")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scan", type=_scan_arg, choices=("serpentine", "rowmajor"),
                   default="serpentine")
    p.add_argument("--warm-start", action="store_true",
                   help="ica only: include the current palette order in the population")

    p = sub.add_parser("decompress", help="decode a .pfz container to P6")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("bench", help="run a benchmark grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides the config)")

    p = sub.add_parser("oracle", help="exhaustive optimum for at most 8 colors")
    p.add_argument("input")
    p.add_argument("--colors", type=int, default=8)
    p.add_argument("--scan", type=_scan_arg, choices=("serpentine", "rowmajor"),
                   default="serpentine")
    return parser


def cmd_compress(args) -> int:
    img = quantize_median_cut(load_ppm(args.input), args.colors)
    reorderer = make_reorderer(args.strategy, args.seed, args.scan,
                               IcaParams(seed=args.seed, warm_start=args.warm_start))
    reorderer.fit(img)
    blob = encode(apply_permutation(img, reorderer.permutation_), args.scan)
    Path(args.output).write_bytes(blob)
    report = size_report(img, reorderer.permutation_, args.scan)
    values = (args.input, img.n_colors, args.strategy, args.seed, reorderer.cost_,
              report.raw_bits, report.compressed_bits, f"{report.entropy_bound_bits:.1f}",
              f"{report.compression_rate:.6f}")
    print(",".join(str(v) for v in values))
    return EXIT_OK


def cmd_decompress(args) -> int:
    img = decode(Path(args.input).read_bytes())
    write_ppm(args.output, render(img))
    return EXIT_OK


def cmd_bench(args) -> int:
    config = bench.load_config(args.config)
    result = bench.run_bench(config, args.out)
    out = Path(args.out or config.out)
    print(f"wrote {out / 'bench.csv'} ({len(result.rows)} rows) and {out / 'summary.csv'}")
    for line in bench.published_comparison(result):
        print(line)
    if result.failed:
        print(f"{result.failed} cell(s) failed; see the error column", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_oracle(args) -> int:
    img = quantize_median_cut(load_ppm(args.input), args.colors)
    perm, cost = brute_force_optimal(img, args.scan)
    print(f"M={img.n_colors} cost={cost} permutation={' '.join(map(str, perm))}")
    return EXIT_OK


COMMANDS = {"compress": cmd_compress, "decompress": cmd_decompress,
            "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CorruptChecksum as exc:
        code = EXIT_CORRUPT
        msg = f"CorruptChecksum: {exc}"
    except TruncatedPayload as exc:
        code = EXIT_TRUNCATED
        msg = f"TruncatedPayload ({exc.section}): {exc}"
    except MalformedHeader as exc:
        code = EXIT_MALFORMED
        msg = f"MalformedHeader ({exc.section}): {exc}"
    except (PaletteForgeError, OSError, ValueError) as exc:
        code = EXIT_FAILURE
        msg = f"{type(exc).__name__}: {exc}"
    print(f"palette-forge: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
