"""Global and local thresholding of 8-bit grayscale images.

Global methods operate on the 256-bin histogram and return a single
threshold; Niblack is local and returns a full mask.  The default
orientation treats dark pixels as object (lesions are hypoechoic), with
intensity <= t labeled 1.
"""

import logging
from typing import NamedTuple

import numpy as np

log = logging.getLogger(__name__)

EPS_VAR = 1e-6  # variance floor for minimum-error criterion


class ThresholdResult(NamedTuple):
    threshold: int
    flag: str | None = None


def histogram(img):
    """256-bin intensity histogram of a uint8 image."""
    img = np.asarray(img)
    return np.bincount(img.ravel().astype(np.int64), minlength=256)[:256]


def apply_threshold(img, t, dark_object=True):
    """Binarize at threshold t. dark_object: intensity <= t -> object (1)."""
    img = np.asarray(img)
    if dark_object:
        return (img <= t).astype(np.uint8)
    return (img > t).astype(np.uint8)


def _class_moments(hist):
    """Cumulative count / mean / variance of the low class for every t."""
    hist = np.asarray(hist, dtype=np.float64)
    g = np.arange(256, dtype=np.float64)
    w = np.cumsum(hist)
    s = np.cumsum(hist * g)
    q = np.cumsum(hist * g * g)
    return w, s, q


def otsu(hist):
    """Threshold maximizing between-class variance; ties -> smallest t."""
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    if len(nz) == 0:
        raise ValueError("empty histogram")
    if len(nz) == 1:
        return ThresholdResult(int(nz[0]), "degenerate")
    w, s, _ = _class_moments(hist)
    total, mean_total = w[-1], s[-1]
    w0 = w[:-1]
    w1 = total - w0
    valid = (w0 > 0) & (w1 > 0)
    mu0 = np.where(w0 > 0, s[:-1] / np.maximum(w0, 1), 0.0)
    mu1 = np.where(w1 > 0, (mean_total - s[:-1]) / np.maximum(w1, 1), 0.0)
    sigma_b = np.where(valid, w0 * w1 * (mu0 - mu1) ** 2, -np.inf)
    return ThresholdResult(int(np.argmax(sigma_b)))


def kittler(hist):
    """Kittler-Illingworth minimum-error threshold.

    Thresholds where either class is empty are skipped; class variances
    are floored at EPS_VAR.  Falls back to Otsu when every t is
    degenerate.
    """
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    if len(nz) == 0:
        raise ValueError("empty histogram")
    if len(nz) == 1:
        return ThresholdResult(int(nz[0]), "otsu_fallback")
    w, s, q = _class_moments(hist)
    total = w[-1]
    w0 = w[:-1]
    w1 = total - w0
    valid = (w0 > 0) & (w1 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = s[:-1] / w0
        mu1 = (s[-1] - s[:-1]) / w1
        var0 = np.maximum(q[:-1] / w0 - mu0**2, EPS_VAR)
        var1 = np.maximum((q[-1] - q[:-1]) / w1 - mu1**2, EPS_VAR)
        p0 = w0 / total
        p1 = w1 / total
        crit = (
            p0 * np.log(np.sqrt(var0))
            + p1 * np.log(np.sqrt(var1))
            - p0 * np.log(p0)
            - p1 * np.log(p1)
        )
    crit = np.where(valid, crit, np.inf)
    if not np.any(np.isfinite(crit)):
        t, _ = otsu(hist)
        return ThresholdResult(t, "otsu_fallback")
    return ThresholdResult(int(np.argmin(crit)))


def _huang_criterion(hist):
    """Huang fuzziness curve over all t (inf where a class is empty)."""
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    g = np.arange(256, dtype=np.float64)
    c = float(nz[-1] - nz[0]) if nz[-1] > nz[0] else 1.0
    w, s, _ = _class_moments(hist)
    total = w[-1]
    crit = np.full(256, np.inf)
    for t in range(256):
        w0 = w[t]
        w1 = total - w0
        if w0 <= 0 or w1 <= 0:
            continue
        mu0 = s[t] / w0
        mu1 = (s[-1] - s[t]) / w1
        mu = np.where(g <= t, mu0, mu1)
        u = 1.0 / (1.0 + np.abs(g - mu) / c)
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -(u * np.log(u) + (1 - u) * np.log(1 - u))
        ent[~np.isfinite(ent)] = 0.0
        crit[t] = float(np.sum(hist * ent))
    return crit


def huang(hist):
    """Huang/Wang fuzzy threshold: minimize Shannon entropy of membership."""
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    if len(nz) == 0:
        raise ValueError("empty histogram")
    if len(nz) == 1:
        return ThresholdResult(int(nz[0]), "degenerate")
    crit = _huang_criterion(hist)
    return ThresholdResult(int(np.argmin(crit)))


def _ultrafuzziness(hist, alpha):
    """Interval-valued ultrafuzziness curve over all t."""
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    g = np.arange(256, dtype=np.float64)
    c = float(nz[-1] - nz[0]) if nz[-1] > nz[0] else 1.0
    w, s, _ = _class_moments(hist)
    total = w[-1]
    crit = np.full(256, -np.inf)
    for t in range(256):
        w0 = w[t]
        w1 = total - w0
        if w0 <= 0 or w1 <= 0:
            continue
        mu0 = s[t] / w0
        mu1 = (s[-1] - s[t]) / w1
        mu = np.where(g <= t, mu0, mu1)
        u = 1.0 / (1.0 + np.abs(g - mu) / c)
        crit[t] = float(np.sum(hist * (u ** (1.0 / alpha) - u**alpha))) / total
    return crit


def tizhoosh_interval(hist, alpha=2.0):
    """Interval-based fuzzy threshold: maximize ultrafuzziness.

    alpha=1 collapses the interval to zero width; the flat criterion is
    detected and the Otsu threshold is returned instead.
    """
    hist = np.asarray(hist, dtype=np.float64)
    nz = np.flatnonzero(hist)
    if len(nz) == 0:
        raise ValueError("empty histogram")
    if len(nz) == 1:
        return ThresholdResult(int(nz[0]), "degenerate")
    crit = _ultrafuzziness(hist, alpha)
    finite = crit[np.isfinite(crit)]
    if len(finite) == 0 or np.ptp(finite) < 1e-12:
        t, _ = otsu(hist)
        return ThresholdResult(t, "otsu_fallback")
    return ThresholdResult(int(np.argmax(crit)))


def _local_mean_std(img, window):
    """Mean and stddev over a clamped (border-clipped) square window."""
    img = np.asarray(img, dtype=np.float64)
    h, wd = img.shape
    half = window // 2
    ii = np.zeros((h + 1, wd + 1))
    ii2 = np.zeros((h + 1, wd + 1))
    np.cumsum(np.cumsum(img, axis=0), axis=1, out=ii[1:, 1:])
    np.cumsum(np.cumsum(img * img, axis=0), axis=1, out=ii2[1:, 1:])
    y = np.arange(h)[:, None]
    x = np.arange(wd)[None, :]
    y0 = np.maximum(y - half, 0)
    y1 = np.minimum(y + half + 1, h)
    x0 = np.maximum(x - half, 0)
    x1 = np.minimum(x + half + 1, wd)
    n = (y1 - y0) * (x1 - x0)
    sm = ii[y1, x1] - ii[y0, x1] - ii[y1, x0] + ii[y0, x0]
    sq = ii2[y1, x1] - ii2[y0, x1] - ii2[y1, x0] + ii2[y0, x0]
    mean = sm / n
    var = np.maximum(sq / n - mean**2, 0.0)
    return mean, np.sqrt(var)


def niblack(img, window=25, k=-0.2, dark_object=True):
    """Niblack local thresholding: t(x,y) = mean + k*std over the window."""
    img = np.asarray(img)
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    max_win = min(img.shape)
    if window > max_win:
        window = max_win if max_win % 2 == 1 else max_win - 1
        window = max(window, 3)
        log.warning("niblack window clamped to %d", window)
    mean, std = _local_mean_std(img, window)
    thresh = mean + k * std
    if dark_object:
        return (img.astype(np.float64) <= thresh).astype(np.uint8)
    return (img.astype(np.float64) > thresh).astype(np.uint8)
