"""Per-seed feature extraction: the 108-column feature schema.

Each seed contributes one row built from the raw patch, its 2-D DCT,
level-1 Haar approximation, gradient magnitude, and the seed's
descriptor.  Conventions are pinned so every value has an exact
independent recomputation:

* scalar "co-variance" = mean of the upper triangle (excluding the
  diagonal) of the column-wise covariance matrix;
* mode of real values counts after quantization to a 1e-6 grid,
  ties resolved toward the smallest value;
* DCT-II is orthonormal; Haar approximation of a constant patch c is 2c;
* GLCMs use 8 min-max gray levels, distance 1, symmetric accumulation.
"""

import logging

import numpy as np
from scipy.fft import dctn

log = logging.getLogger(__name__)

GLCM_LEVELS = 8
GLCM_DIRECTIONS = (0, 45, 90, 135)
_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}
NUM_FEATURES = 108
F2_STATISTICS = (
    "mean", "median", "mode", "std", "covariance", "range", "min", "max",
)


def _mode(values):
    q = np.round(np.asarray(values, dtype=np.float64).ravel() / 1e-6)
    uniq, counts = np.unique(q, return_counts=True)
    best = uniq[counts == counts.max()].min()
    return float(best * 1e-6)


def _covariance_scalar(matrix):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] < 2:
        log.debug("covariance scalar of single-column matrix -> 0")
        return 0.0
    if matrix.shape[0] < 2:
        return 0.0
    c = np.cov(matrix, rowvar=False, ddof=1)
    iu = np.triu_indices(c.shape[0], k=1)
    return float(np.mean(c[iu]))


def _std(values):
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def stats8(matrix):
    """(mean, median, std, covariance, mode, range, min, max) of a matrix."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.size == 0:
        raise ValueError("empty matrix")
    flat = m.ravel()
    return np.array(
        [
            float(np.mean(flat)),
            float(np.median(flat)),
            _std(flat),
            _covariance_scalar(m if m.ndim == 2 else m.reshape(-1, 1)),
            _mode(flat),
            float(np.ptp(flat)),
            float(np.min(flat)),
            float(np.max(flat)),
        ]
    )


def descriptor_features(descriptor):
    """Descriptor statistics: mean, median, std, covariance (16x8
    reshape), range, min-after-zero, max, zero population."""
    d = np.asarray(descriptor, dtype=np.float64).ravel()
    if d.size != 128:
        raise ValueError("descriptor must have 128 entries")
    positive = d[d > 0]
    if positive.size == 0:
        log.debug("all-zero descriptor: min-after-zero -> 0")
        min_after_zero = 0.0
    else:
        min_after_zero = float(np.min(positive))
    return np.array(
        [
            float(np.mean(d)),
            float(np.median(d)),
            _std(d),
            _covariance_scalar(d.reshape(16, 8)),
            float(np.ptp(d)),
            min_after_zero,
            float(np.max(d)),
            float(np.count_nonzero(d == 0)),
        ]
    )


def quantize_levels(matrix, levels=GLCM_LEVELS):
    """Min-max quantization to integer levels 0..levels-1."""
    m = np.asarray(matrix, dtype=np.float64)
    lo, hi = float(np.min(m)), float(np.max(m))
    if hi <= lo:
        return np.zeros(m.shape, dtype=np.int64)
    q = np.floor((m - lo) / (hi - lo) * levels).astype(np.int64)
    return np.minimum(q, levels - 1)


def glcm(matrix, direction, levels=GLCM_LEVELS):
    """Symmetric, normalized co-occurrence matrix at distance 1."""
    q = quantize_levels(matrix, levels)
    dy, dx = _OFFSETS[direction]
    h, w = q.shape
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    a = q[y0:y1, x0:x1].ravel()
    b = q[y0 + dy : y1 + dy, x0 + dx : x1 + dx].ravel()
    p = np.zeros((levels, levels))
    np.add.at(p, (a, b), 1.0)
    p = p + p.T
    total = p.sum()
    if total > 0:
        p /= total
    return p


def glcm_properties(p):
    """Haralick contrast, correlation, energy, homogeneity of one GLCM.

    Correlation of a zero-variance (single-cell) matrix is defined as 0.
    """
    levels = p.shape[0]
    i = np.arange(levels)[:, None]
    j = np.arange(levels)[None, :]
    contrast = float(np.sum(p * (i - j) ** 2))
    energy = float(np.sum(p * p))
    homogeneity = float(np.sum(p / (1.0 + np.abs(i - j))))
    mu_i = float(np.sum(p * i))
    mu_j = float(np.sum(p * j))
    var_i = float(np.sum(p * (i - mu_i) ** 2))
    var_j = float(np.sum(p * (j - mu_j) ** 2))
    if var_i <= 0 or var_j <= 0:
        log.debug("degenerate GLCM: correlation -> 0")
        correlation = 0.0
    else:
        correlation = float(
            np.sum(p * (i - mu_i) * (j - mu_j)) / np.sqrt(var_i * var_j)
        )
    return np.array([contrast, correlation, energy, homogeneity])


def glcm_features(matrix, directions=GLCM_DIRECTIONS):
    """Contrast/correlation/energy/homogeneity per direction, flattened."""
    m = np.asarray(matrix, dtype=np.float64)
    if min(m.shape) < 2:
        raise ValueError("matrix side must be >= 2")
    return np.concatenate([glcm_properties(glcm(m, d)) for d in directions])


def haar_approximation(matrix):
    """Level-1 Haar approximation with sum-normalized scaling.

    2x2 block [a b; c d] -> (a+b+c+d)/2; odd dimensions are handled by
    edge replication.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape[0] % 2 == 1:
        m = np.vstack([m, m[-1:]])
    if m.shape[1] % 2 == 1:
        m = np.hstack([m, m[:, -1:]])
    return (m[0::2, 0::2] + m[0::2, 1::2] + m[1::2, 0::2] + m[1::2, 1::2]) / 2.0


def gradient_magnitude(matrix):
    """Per-pixel gradient magnitude via central differences."""
    gy, gx = np.gradient(np.asarray(matrix, dtype=np.float64))
    return np.hypot(gx, gy)


def transform_stack(patch):
    """(DCT-II, Haar approximation, gradient magnitude) of a patch."""
    p = np.asarray(patch, dtype=np.float64)
    if min(p.shape) < 2:
        raise ValueError("patch side must be >= 2")
    d_c = dctn(p, norm="ortho")
    a_c = haar_approximation(p)
    g_m = gradient_magnitude(p)
    return d_c, a_c, g_m


STAT_NAMES = ("mean", "median", "std", "covariance", "mode", "range", "min", "max")
DESC_STAT_NAMES = (
    "mean", "median", "std", "covariance", "range",
    "min_after_zero", "max", "zero_population",
)
GLCM_PROP_NAMES = ("contrast", "correlation", "energy", "homogeneity")
_MATRICES = ("patch", "dct", "haar", "gradmag")


def feature_schema():
    """Ordered names of the 108 feature columns."""
    names = []
    for m in _MATRICES:
        names += [f"{m}_{s}" for s in STAT_NAMES]
    names += [f"descriptor_{s}" for s in DESC_STAT_NAMES]
    for m in _MATRICES:
        for d in GLCM_DIRECTIONS:
            names += [f"{m}_glcm{d}_{p}" for p in GLCM_PROP_NAMES]
    names += [f"descriptor_glcm0_{p}" for p in GLCM_PROP_NAMES]
    assert len(names) == NUM_FEATURES
    return names


def seed_features(img, seed, z):
    """One 108-value feature row for a single seed point."""
    from .keypoints import extract_patch

    patch = extract_patch(img, seed, z).astype(np.float64)
    d_c, a_c, g_m = transform_stack(patch)
    desc16x8 = np.asarray(seed.descriptor, dtype=np.float64).reshape(16, 8)
    parts = [stats8(patch), stats8(d_c), stats8(a_c), stats8(g_m)]
    parts.append(descriptor_features(seed.descriptor))
    for m in (patch, d_c, a_c, g_m):
        parts.append(glcm_features(m))
    parts.append(glcm_features(desc16x8, directions=(0,)))
    row = np.concatenate(parts)
    bad = ~np.isfinite(row)
    if np.any(bad):
        log.warning("non-finite features at columns %s replaced by 0", np.flatnonzero(bad))
        row[bad] = 0.0
    return row


def build_F1(img, seeds, z):
    """Stack per-seed rows into the N_F x 108 per-image feature matrix."""
    if not seeds:
        raise ValueError("no seeds")
    return np.vstack([seed_features(img, s, z) for s in seeds])


def build_F2(f1):
    """8 x 108 per-image statistic block, one row per statistic.

    Row order: mean, median, mode, std, covariance, range, min, max.
    """
    f1 = np.asarray(f1, dtype=np.float64)
    if f1.ndim != 2 or f1.shape[0] == 0:
        raise ValueError("F1 must be a nonempty matrix")
    if f1.shape[0] == 1:
        log.debug("single-row F1: std/covariance statistics are 0")
    rows = {
        "mean": np.mean(f1, axis=0),
        "median": np.median(f1, axis=0),
        "mode": np.array([_mode(f1[:, c]) for c in range(f1.shape[1])]),
        "std": (
            np.std(f1, axis=0, ddof=1) if f1.shape[0] > 1 else np.zeros(f1.shape[1])
        ),
        # per-column self-covariance (variance); 0 for a single row
        "covariance": (
            np.var(f1, axis=0, ddof=1) if f1.shape[0] > 1 else np.zeros(f1.shape[1])
        ),
        "range": np.ptp(f1, axis=0),
        "min": np.min(f1, axis=0),
        "max": np.max(f1, axis=0),
    }
    return np.vstack([rows[s] for s in F2_STATISTICS])
