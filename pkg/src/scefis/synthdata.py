"""Synthetic ultrasound-like dataset: dark elliptical lesions on a
speckled, low-contrast background with exact gold masks.

The background mixes a mid-gray texture with a bright band, which makes
its histogram bimodal: a single between-the-big-modes threshold (what
Otsu picks) cuts through the background instead of isolating the
lesion.  A learned per-image threshold near the lesion/background
boundary does far better, so the dataset preserves the qualitative
ordering MAA > learned threshold > Otsu.
"""

import numpy as np

from .imageio import write_gray, write_mask

DEFAULT_COUNT = 35

LESION_MEAN = 45.0
LESION_STD = 10.0
BACKGROUND_MEAN = 120.0
BACKGROUND_STD = 18.0
BRIGHT_MEAN = 215.0
BRIGHT_STD = 10.0


def make_image(seed, min_side=140, max_side=260):
    """One (image, gold mask) pair.  Fully determined by the seed."""
    rng = np.random.default_rng(seed)
    h = int(rng.integers(min_side, max_side + 1))
    w = int(rng.integers(min_side, max_side + 1))

    yy, xx = np.mgrid[0:h, 0:w]
    cy = h * rng.uniform(0.35, 0.65)
    cx = w * rng.uniform(0.35, 0.65)
    ry = h * rng.uniform(0.10, 0.18)
    rx = w * rng.uniform(0.10, 0.18)
    theta = rng.uniform(0, np.pi)
    yr = (yy - cy) * np.cos(theta) + (xx - cx) * np.sin(theta)
    xr = -(yy - cy) * np.sin(theta) + (xx - cx) * np.cos(theta)
    lesion = (yr / ry) ** 2 + (xr / rx) ** 2 <= 1.0

    img = rng.normal(BACKGROUND_MEAN, BACKGROUND_STD, size=(h, w))
    # bright band across part of the background (second background mode)
    band_top = int(h * rng.uniform(0.55, 0.7))
    band = np.zeros((h, w), dtype=bool)
    band[band_top:] = True
    band &= ~lesion
    img[band] = rng.normal(BRIGHT_MEAN, BRIGHT_STD, size=int(band.sum()))
    img[lesion] = rng.normal(LESION_MEAN, LESION_STD, size=int(lesion.sum()))

    # multiplicative speckle plus mild smoothing for ultrasound texture
    speckle = rng.normal(1.0, 0.12, size=(h, w))
    img = img * speckle
    from scipy.ndimage import gaussian_filter

    img = gaussian_filter(img, 1.0)
    img = np.clip(img, 0, 255).astype(np.uint8)
    return img, lesion.astype(np.uint8)


def generate_dataset(image_dir, gold_dir, count=DEFAULT_COUNT, seed=2024):
    """Write `count` image/gold PNG pairs; returns the image ids."""
    image_dir.mkdir(parents=True, exist_ok=True)
    gold_dir.mkdir(parents=True, exist_ok=True)
    ids = []
    for i in range(count):
        img, gold = make_image(seed * 1000 + i)
        name = f"img{i:03d}"
        write_gray(image_dir / f"{name}.png", img)
        write_mask(gold_dir / f"{name}.png", gold)
        ids.append(name)
    return ids
