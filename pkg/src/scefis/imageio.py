"""Grayscale PNG/PGM reading and mask writing."""

import numpy as np
from PIL import Image


def read_gray(path):
    """8-bit grayscale array from a PNG/PGM file."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def write_gray(path, img):
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="L").save(path)


def read_mask(path):
    """Binary mask from a PNG: nonzero -> 1."""
    return (read_gray(path) > 0).astype(np.uint8)


def write_mask(path, mask):
    """Write a {0,1} mask as a {0,255} grayscale PNG."""
    write_gray(path, np.asarray(mask, dtype=np.uint8) * 255)
