"""Segmentation scoring: Jaccard overlap, exhaustive best-threshold
search, and the summary statistics used in trial reports."""

import logging
from typing import NamedTuple

import numpy as np
from scipy import stats as sps

from .thresholds import apply_threshold

log = logging.getLogger(__name__)


def jaccard(seg, gold):
    """Area overlap |S & G| / |S | G| over object (1) pixels.

    Both masks empty counts as perfect agreement (1.0).
    """
    seg = np.asarray(seg).astype(bool)
    gold = np.asarray(gold).astype(bool)
    if seg.shape != gold.shape:
        raise ValueError(f"mask shapes differ: {seg.shape} vs {gold.shape}")
    union = np.count_nonzero(seg | gold)
    if union == 0:
        log.debug("jaccard of two empty masks -> 1.0")
        return 1.0
    return np.count_nonzero(seg & gold) / union


class MAAResult(NamedTuple):
    threshold: int
    j_max: float
    dark_object: bool = True


def maa_search(img, gold, dark_object=True, both_orientations=False):
    """Best achievable Jaccard over all 256 global thresholds.

    Exhaustive: evaluates every t in [0, 255] (and the flipped
    orientation when requested); smallest t wins ties.
    """
    img = np.asarray(img)
    gold = np.asarray(gold).astype(bool)
    if img.shape != gold.shape:
        raise ValueError("image/gold shapes differ")
    counts = np.bincount(img.ravel().astype(np.int64), minlength=256)[:256]
    counts_g = np.bincount(
        img[gold].ravel().astype(np.int64), minlength=256
    )[:256]
    n_gold = int(np.count_nonzero(gold))
    n_total = img.size
    # |S_t| and |S_t & G| for S_t = {img <= t} via cumulative histograms
    size_le = np.cumsum(counts)
    inter_le = np.cumsum(counts_g)

    def curve(dark):
        if dark:
            size, inter = size_le, inter_le
        else:
            size = n_total - size_le
            inter = n_gold - inter_le
        union = size + n_gold - inter
        with np.errstate(invalid="ignore"):
            j = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
        return j

    best = None
    orientations = [dark_object, not dark_object] if both_orientations else [dark_object]
    for dark in orientations:
        j = curve(dark)
        t = int(np.argmax(j))
        cand = MAAResult(t, float(j[t]), dark)
        if best is None or cand.j_max > best.j_max:
            best = cand
    return best


class StatsSummary(NamedTuple):
    mean: float
    std: float
    ci_low: float
    ci_high: float
    p_value: float | None = None


def stats_summary(values, baseline=None):
    """Sample mean/std, 95% t-interval, and optional paired t-test.

    baseline, when given, must be per-item scores aligned with values.
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        raise ValueError("need at least 2 values")
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    sem = std / np.sqrt(len(values))
    if std == 0.0:
        lo = hi = mean
    else:
        lo, hi = sps.t.interval(0.95, len(values) - 1, loc=mean, scale=sem)
    p = None
    if baseline is not None:
        baseline = np.asarray(baseline, dtype=np.float64)
        if baseline.shape != values.shape:
            raise ValueError("baseline must align with values")
        diff = values - baseline
        if np.allclose(diff, 0):
            p = 1.0
        else:
            p = float(sps.ttest_rel(values, baseline).pvalue)
    return StatsSummary(mean, std, float(lo), float(hi), p)
