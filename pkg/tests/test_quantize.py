import numpy as np
import pytest

from palette_forge.core import extract_indexed, render
from palette_forge.exceptions import BadParams
from palette_forge.quantize import median_cut_palette, quantize_median_cut

from conftest import random_image


def test_two_clusters():
    pixels = np.zeros((4, 6, 3), np.uint8)
    pixels[:, :3] = (255, 0, 0)
    pixels[:, 3:] = (0, 0, 255)
    img = quantize_median_cut(pixels, 2)
    assert {tuple(c) for c in img.palette} == {(255, 0, 0), (0, 0, 255)}


def test_few_colors_are_exact():
    src = render(random_image(np.random.default_rng(0), 10, 10, 12))
    img = quantize_median_cut(src, 16)
    np.testing.assert_array_equal(render(img), src)
    assert img == extract_indexed(src)


def test_idempotent():
    rng = np.random.default_rng(1)
    pixels = rng.integers(0, 256, (20, 20, 3), dtype=np.uint8)
    once = quantize_median_cut(pixels, 16)
    twice = quantize_median_cut(render(once), 16)
    np.testing.assert_array_equal(render(twice), render(once))


def test_deterministic():
    pixels = np.random.default_rng(2).integers(0, 256, (30, 30, 3), dtype=np.uint8)
    assert quantize_median_cut(pixels, 64) == quantize_median_cut(pixels, 64)


def test_box_count_and_mean():
    pixels = np.random.default_rng(3).integers(0, 256, (25, 25, 3), dtype=np.uint8)
    palette, labels = median_cut_palette(pixels, 16)
    assert len(palette) == 16 and labels.max() == 15
    flat = pixels.reshape(-1, 3).astype(float)
    for k in range(16):
        members = flat[labels.ravel() == k]
        assert len(members) > 0
        np.testing.assert_array_equal(palette[k], np.floor(members.mean(axis=0) + 0.5))


def test_median_tie_goes_low():
    # red channel values 0, 10, 20, 30 with equal weight: the low half is {0, 10}
    pixels = np.array([[[0, 0, 0], [10, 0, 0], [20, 0, 0], [30, 0, 0]]], np.uint8)
    palette, labels = median_cut_palette(pixels, 2)
    assert labels.tolist() == [[0, 0, 1, 1]]
    assert palette.tolist() == [[5, 0, 0], [25, 0, 0]]


def test_corpus_sized_quantization_hits_target():
    pixels = np.random.default_rng(4).integers(0, 256, (64, 64, 3), dtype=np.uint8)
    assert quantize_median_cut(pixels, 64).n_colors == 64


@pytest.mark.parametrize("m", [1, 0, 257])
def test_bad_color_count(m):
    with pytest.raises(BadParams):
        quantize_median_cut(np.zeros((2, 2, 3), np.uint8), m)
