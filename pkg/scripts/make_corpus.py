"""Regenerate corpus/*.ppm from scikit-image's bundled sample photographs.

Each image is center-cropped to a square and resampled to 255x255 RGB.
Run from the repository root:  python scripts/make_corpus.py
"""

from pathlib import Path

import numpy as np
from skimage import data, transform

from palette_forge.ppm import write_ppm

SOURCES = ("astronaut", "chelsea", "coffee", "rocket", "immunohistochemistry", "hubble_deep_field")
SIZE = 255


def square_crop(img):
    h, w = img.shape[:2]
    side = min(h, w)
    top, left = (h - side) // 2, (w - side) // 2
    return img[top:top + side, left:left + side, :3]


def main(out_dir="corpus"):
    out = Path(out_dir)
    out.mkdir(exist_ok=True)
    for name in SOURCES:
        img = square_crop(getattr(data, name)())
        small = transform.resize(img, (SIZE, SIZE), anti_aliasing=True)
        write_ppm(out / f"{name}.ppm", np.clip(np.rint(small * 255), 0, 255).astype(np.uint8))
        print(f"wrote {out / name}.ppm")


if __name__ == "__main__":
    main()
