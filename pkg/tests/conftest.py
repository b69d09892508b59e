from pathlib import Path

import numpy as np
import pytest

from palette_forge.core import IndexedImage

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

# Worked example: a 4x4 RGB image with four colors.
WORKED_PIXELS = np.array([
    [(100, 20, 50), (60, 150, 200), (60, 150, 200), (140, 140, 120)],
    [(100, 20, 50), (30, 70, 80), (30, 70, 80), (60, 150, 200)],
    [(140, 140, 120), (100, 20, 50), (60, 150, 200), (100, 20, 50)],
    [(100, 20, 50), (60, 150, 200), (140, 140, 120), (100, 20, 50)],
], dtype=np.uint8)
WORKED_PALETTE = np.array([(100, 20, 50), (60, 150, 200), (140, 140, 120), (30, 70, 80)])
# Reference index matrix for the example; it differs from WORKED_PIXELS at pixel (1, 0).
WORKED_INDICES = np.array([[0, 1, 1, 2], [1, 3, 3, 1], [2, 0, 1, 0], [0, 1, 2, 0]])


@pytest.fixture
def worked_pixels():
    return WORKED_PIXELS.copy()


@pytest.fixture
def worked_image():
    return IndexedImage(WORKED_INDICES, WORKED_PALETTE)


def distinct_palette(rng, n_colors):
    codes = rng.choice(2**24, size=n_colors, replace=False)
    return np.stack([(codes >> 16) & 255, (codes >> 8) & 255, codes & 255], axis=1)


def random_image(rng, height, width, n_colors):
    """Random indexed image using every one of ``min(n_colors, height*width)`` colors."""
    n_colors = min(n_colors, height * width)
    flat = np.concatenate([np.arange(n_colors),
                           rng.integers(0, n_colors, height * width - n_colors)])
    rng.shuffle(flat)
    return IndexedImage(flat.reshape(height, width), distinct_palette(rng, n_colors))


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
