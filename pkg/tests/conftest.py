"""Shared synthetic-data builders for the test suite."""

import numpy as np
import pytest

from crackdet import image_io


def draw_crack_stroke(size, rng, thickness=3):
    """Random dark stroke mask crossing the image left to right.

    Returns a bool mask; the stroke is a column-wise random walk thickened
    vertically, so it is 8-connected and spans the full width.
    """
    mask = np.zeros((size, size), dtype=bool)
    row = int(rng.integers(size // 4, 3 * size // 4))
    for col in range(size):
        row = int(np.clip(row + rng.integers(-1, 2), thickness, size - thickness - 1))
        mask[row : row + thickness, col] = True
    return mask


def make_crack_image(size, rng, thickness=3, with_crack=True):
    """Synthetic road patch: (gray image in [0,1], ground-truth mask).

    Crack pixels sit at 0.15 +/- 0.05, background at 0.7 +/- 0.05, and the
    whole image carries Gaussian noise with sigma 0.03.
    """
    background = rng.uniform(0.65, 0.75)
    img = np.full((size, size), background)
    mask = np.zeros((size, size), dtype=bool)
    if with_crack:
        mask = draw_crack_stroke(size, rng, thickness)
        img[mask] = rng.uniform(0.10, 0.20)
    img += rng.normal(0.0, 0.03, img.shape)
    return np.clip(img, 0.0, 1.0), mask


def gray_to_rgb(gray):
    """Replicate a [0,1] gray image into a uint8 RGB array."""
    channel = np.clip(np.round(gray * 255), 0, 255).astype(np.uint8)
    return np.stack([channel] * 3, axis=-1)


def make_toy_arrays(rng, n_per_class=16, size=24):
    """Model-ready toy classification set: (x NCHW in [0,1], labels)."""
    xs, ys = [], []
    for with_crack in (False, True):
        for _ in range(n_per_class):
            gray, _ = make_crack_image(size, rng, with_crack=with_crack)
            xs.append(np.stack([gray] * 3))
            ys.append(int(with_crack))
    return np.stack(xs), np.array(ys, dtype=np.int64)


def write_toy_dataset(root, rng, n_per_class=8, size=24):
    """Write a positive/ + negative/ PNG tree for the train subcommand."""
    for name, with_crack in (("negative", False), ("positive", True)):
        sub = root / name
        sub.mkdir(parents=True, exist_ok=True)
        for i in range(n_per_class):
            gray, _ = make_crack_image(size, rng, with_crack=with_crack)
            image_io.save_mask(gray > 2.0, sub / f"{name}_{i}.png")  # placeholder
            rgb = gray_to_rgb(gray)
            from PIL import Image

            Image.fromarray(rgb, mode="RGB").save(sub / f"{name}_{i}.png")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
