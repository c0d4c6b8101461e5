"""Interest-point detection and seed selection.

A from-scratch difference-of-Gaussians detector with 4x4x8
orientation-histogram descriptors.  Rotation invariance is deliberately
omitted: descriptors are consumed as raw feature sources, never matched
across images, and a fixed frame keeps the pipeline deterministic.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

log = logging.getLogger(__name__)

NUM_OCTAVES = 4
SCALES_PER_OCTAVE = 3
CONTRAST_THRESHOLD = 0.03
EDGE_RATIO = 10.0
BASE_SIGMA = 1.6
DESCRIPTOR_WIDTH = 4  # 4x4 cells
DESCRIPTOR_BINS = 8  # orientation bins -> 128 values


@dataclass
class SeedPoint:
    x: int
    y: int
    response: float
    descriptor: np.ndarray = field(repr=False)
    fallback: bool = False

    def salience(self):
        return float(np.sum(np.abs(self.descriptor)))


def rectangle_size(row_sizes, col_sizes):
    """Patch side from the dataset's size distribution.

    Z = round(0.1 * max(median rows, median cols)), forced odd,
    never below 3.
    """
    if len(row_sizes) == 0 or len(col_sizes) == 0:
        raise ValueError("empty size lists")
    z = round(0.1 * max(np.median(row_sizes), np.median(col_sizes)))
    z = int(z)
    if z % 2 == 0:
        z += 1
    return max(z, 3)


def _gaussian_octave(base, sigmas):
    return [ndimage.gaussian_filter(base, s, mode="nearest") for s in sigmas]


def _descriptor(gx, gy, x, y):
    """128-bin gradient-orientation histogram over the 16x16 window.

    Window is clipped at borders; bins are Gaussian-weighted by distance
    to the point, L2-normalized, clipped at 0.2 and renormalized.
    """
    h, w = gx.shape
    half = 2 * DESCRIPTOR_WIDTH  # 8 -> 16x16 window
    hist = np.zeros((DESCRIPTOR_WIDTH, DESCRIPTOR_WIDTH, DESCRIPTOR_BINS))
    for dy in range(-half, half):
        yy = y + dy
        if yy < 0 or yy >= h:
            continue
        for dx in range(-half, half):
            xx = x + dx
            if xx < 0 or xx >= w:
                continue
            mag = np.hypot(gx[yy, xx], gy[yy, xx])
            if mag == 0:
                continue
            ang = np.arctan2(gy[yy, xx], gx[yy, xx]) % (2 * np.pi)
            b = int(ang / (2 * np.pi) * DESCRIPTOR_BINS) % DESCRIPTOR_BINS
            cy = (dy + half) // (2 * half // DESCRIPTOR_WIDTH)
            cx = (dx + half) // (2 * half // DESCRIPTOR_WIDTH)
            weight = np.exp(-(dx * dx + dy * dy) / (2.0 * half * half))
            hist[cy, cx, b] += mag * weight
    vec = hist.ravel()
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec = np.minimum(vec / norm, 0.2)
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec = vec / norm
    return vec


def detect_interest_points(img):
    """Scale-space DoG extrema with per-point descriptors.

    Deterministic: no random state, fixed scan order, duplicates at the
    same base-image pixel resolved by strongest response.
    """
    img = np.asarray(img, dtype=np.float64) / 255.0
    if img.shape[0] < 16 or img.shape[1] < 16:
        raise ValueError("image must be at least 16x16")
    k = 2.0 ** (1.0 / SCALES_PER_OCTAVE)
    sigmas = [BASE_SIGMA * k**i for i in range(SCALES_PER_OCTAVE + 3)]
    points = {}
    base = img
    for octave in range(NUM_OCTAVES):
        if base.shape[0] < 16 or base.shape[1] < 16:
            break
        gauss = _gaussian_octave(base, sigmas)
        dog = np.stack([g1 - g0 for g0, g1 in zip(gauss, gauss[1:])])
        interior = dog[1:-1]
        neighborhood_max = ndimage.maximum_filter(dog, size=3)[1:-1]
        neighborhood_min = ndimage.minimum_filter(dog, size=3)[1:-1]
        is_max = (interior >= neighborhood_max) & (interior > CONTRAST_THRESHOLD)
        is_min = (interior <= neighborhood_min) & (interior < -CONTRAST_THRESHOLD)
        cand = np.argwhere(is_max | is_min)
        scale = 2**octave
        gradients = {}
        for s, yy, xx in cand:
            if yy == 0 or xx == 0 or yy == dog.shape[1] - 1 or xx == dog.shape[2] - 1:
                continue
            d = dog[s + 1]
            # Hessian edge-response rejection
            dxx = d[yy, xx + 1] + d[yy, xx - 1] - 2 * d[yy, xx]
            dyy = d[yy + 1, xx] + d[yy - 1, xx] - 2 * d[yy, xx]
            dxy = (
                d[yy + 1, xx + 1]
                - d[yy + 1, xx - 1]
                - d[yy - 1, xx + 1]
                + d[yy - 1, xx - 1]
            ) / 4.0
            tr = dxx + dyy
            det = dxx * dyy - dxy * dxy
            if det <= 0 or tr * tr / det >= (EDGE_RATIO + 1) ** 2 / EDGE_RATIO:
                continue
            x0 = min(int(xx) * scale, img.shape[1] - 1)
            y0 = min(int(yy) * scale, img.shape[0] - 1)
            response = float(abs(d[yy, xx]))
            prev = points.get((x0, y0))
            if prev is not None and prev[0] >= response:
                continue
            if s not in gradients:
                gradients[s] = np.gradient(gauss[s + 1])
            gy_l, gx_l = gradients[s]
            desc = _descriptor(gx_l, gy_l, int(xx), int(yy))
            points[(x0, y0)] = (response, desc)
        base = base[::2, ::2]
    out = [
        SeedPoint(x=x, y=y, response=resp, descriptor=desc)
        for (x, y), (resp, desc) in sorted(points.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    ]
    return out


def select_seeds(points, z, img):
    """Greedy salience-ranked selection with Chebyshev separation >= z.

    Empty detector output degrades to a single flagged seed at the image
    center so downstream feature extraction always has one row.
    """
    img = np.asarray(img)
    if z < 3:
        raise ValueError("z must be >= 3")
    if not points:
        log.warning("no interest points; falling back to center seed")
        cy, cx = img.shape[0] // 2, img.shape[1] // 2
        return [
            SeedPoint(
                x=cx, y=cy, response=0.0,
                descriptor=np.zeros(DESCRIPTOR_WIDTH**2 * DESCRIPTOR_BINS),
                fallback=True,
            )
        ]
    ranked = sorted(
        points, key=lambda p: (-p.salience(), -p.response, p.y, p.x)
    )
    accepted = []
    for p in ranked:
        if all(max(abs(p.x - q.x), abs(p.y - q.y)) >= z for q in accepted):
            accepted.append(p)
    return accepted


def extract_patch(img, point, z):
    """z x z window centered on the seed, clipped at image borders."""
    img = np.asarray(img)
    h, w = img.shape
    if not (0 <= point.x < w and 0 <= point.y < h):
        raise ValueError("seed outside image")
    half = z // 2
    y0 = max(point.y - half, 0)
    y1 = min(point.y + half + 1, h)
    x0 = max(point.x - half, 0)
    x1 = min(point.x + half + 1, w)
    return img[y0:y1, x0:x1]
