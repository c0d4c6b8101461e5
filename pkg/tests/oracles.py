"""Independent brute-force oracles used to pin expected values.

Everything here is written as plain loops over definitions, on purpose:
none of these share code with the implementations they check.
"""

import math

import numpy as np


def otsu_bruteforce(hist):
    """argmax over t of between-class variance, computed from scratch."""
    hist = [float(h) for h in hist]
    total = sum(hist)
    best_t, best_v = None, -1.0
    for t in range(255):
        w0 = sum(hist[: t + 1])
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            continue
        mu0 = sum(g * hist[g] for g in range(t + 1)) / w0
        mu1 = sum(g * hist[g] for g in range(t + 1, 256)) / w1
        v = w0 * w1 * (mu0 - mu1) ** 2
        if v > best_v + 1e-12:
            best_t, best_v = t, v
    return best_t, best_v


def kittler_bruteforce(hist, var_floor=1e-6):
    """argmin over t of the minimum-error criterion."""
    hist = [float(h) for h in hist]
    total = sum(hist)
    best_t, best_v = None, math.inf
    for t in range(255):
        w0 = sum(hist[: t + 1])
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            continue
        mu0 = sum(g * hist[g] for g in range(t + 1)) / w0
        mu1 = sum(g * hist[g] for g in range(t + 1, 256)) / w1
        var0 = max(sum(hist[g] * (g - mu0) ** 2 for g in range(t + 1)) / w0, var_floor)
        var1 = max(
            sum(hist[g] * (g - mu1) ** 2 for g in range(t + 1, 256)) / w1, var_floor
        )
        p0, p1 = w0 / total, w1 / total
        v = (
            p0 * math.log(math.sqrt(var0))
            + p1 * math.log(math.sqrt(var1))
            - p0 * math.log(p0)
            - p1 * math.log(p1)
        )
        if v < best_v - 1e-12:
            best_t, best_v = t, v
    return best_t, best_v


def _huang_class_means(hist, t):
    """(low-class mean, high-class mean, span constant) for a cut at t,
    or None when either class is empty."""
    total_lo = sum(hist[: t + 1])
    total_hi = sum(hist[t + 1 :])
    if total_lo == 0 or total_hi == 0:
        return None
    nz = [i for i in range(256) if hist[i] > 0]
    c = max(nz[-1] - nz[0], 1)
    mu_lo = sum(i * hist[i] for i in range(t + 1)) / total_lo
    mu_hi = sum(i * hist[i] for i in range(t + 1, 256)) / total_hi
    return mu_lo, mu_hi, c


def _huang_membership(g, t, hist):
    mu_lo, mu_hi, c = _huang_class_means(hist, t)
    mu = mu_lo if g <= t else mu_hi
    return 1.0 / (1.0 + abs(g - mu) / c)


def huang_bruteforce(hist):
    """argmin over t of Huang's fuzzy entropy."""
    hist = [float(h) for h in hist]
    best_t, best_v = None, math.inf
    for t in range(255):
        means = _huang_class_means(hist, t)
        if means is None:
            continue
        mu_lo, mu_hi, c = means
        s = 0.0
        for g in range(256):
            if hist[g] == 0:
                continue
            mu = mu_lo if g <= t else mu_hi
            u = 1.0 / (1.0 + abs(g - mu) / c)
            for q in (u, 1 - u):
                if 0 < q < 1:
                    s -= hist[g] * q * math.log(q)
        if s < best_v - 1e-12:
            best_t, best_v = t, s
    return best_t, best_v


def ultrafuzziness_bruteforce(hist, alpha=2.0):
    """argmax over t of interval-valued ultrafuzziness; None if flat."""
    hist = [float(h) for h in hist]
    total = sum(hist)
    values = {}
    for t in range(255):
        means = _huang_class_means(hist, t)
        if means is None:
            continue
        mu_lo, mu_hi, c = means
        s = 0.0
        for g in range(256):
            if hist[g] == 0:
                continue
            mu = mu_lo if g <= t else mu_hi
            u = 1.0 / (1.0 + abs(g - mu) / c)
            s += hist[g] * (u ** (1.0 / alpha) - u**alpha)
        values[t] = s / total
    if not values or max(values.values()) - min(values.values()) < 1e-12:
        return None, None
    best_t = min(values, key=lambda t: (-values[t], t))
    return best_t, values[best_t]


def jaccard_bruteforce(seg, gold):
    inter = union = 0
    for s, g in zip(np.asarray(seg).ravel(), np.asarray(gold).ravel()):
        if s or g:
            union += 1
            if s and g:
                inter += 1
    return 1.0 if union == 0 else inter / union


def maa_bruteforce(img, gold, dark_object=True):
    img = np.asarray(img)
    best_t, best_j = None, -1.0
    for t in range(256):
        seg = (img <= t) if dark_object else (img > t)
        j = jaccard_bruteforce(seg, gold)
        if j > best_j + 1e-12:
            best_t, best_j = t, j
    return best_t, best_j


def stats8_bruteforce(matrix):
    """(mean, median, std, cov, mode, range, min, max), each from its
    textbook definition."""
    m = np.asarray(matrix, dtype=float)
    flat = sorted(m.ravel().tolist())
    n = len(flat)
    mean = sum(flat) / n
    median = (
        flat[n // 2] if n % 2 == 1 else (flat[n // 2 - 1] + flat[n // 2]) / 2
    )
    std = math.sqrt(sum((v - mean) ** 2 for v in flat) / (n - 1)) if n > 1 else 0.0
    cov = 0.0
    if m.ndim == 2 and m.shape[1] >= 2 and m.shape[0] >= 2:
        cols = m.shape[1]
        pairs = []
        for a in range(cols):
            for b in range(a + 1, cols):
                ma = sum(m[:, a]) / m.shape[0]
                mb = sum(m[:, b]) / m.shape[0]
                pairs.append(
                    sum((m[i, a] - ma) * (m[i, b] - mb) for i in range(m.shape[0]))
                    / (m.shape[0] - 1)
                )
        cov = sum(pairs) / len(pairs)
    counts = {}
    for v in flat:
        q = round(v / 1e-6)
        counts[q] = counts.get(q, 0) + 1
    top = max(counts.values())
    mode = min(q for q, c in counts.items() if c == top) * 1e-6
    return (mean, median, std, cov, mode, flat[-1] - flat[0], flat[0], flat[-1])


def dct2_bruteforce(x):
    """Orthonormal 2-D DCT-II by direct cosine summation."""
    x = np.asarray(x, dtype=float)
    m, n = x.shape
    out = np.zeros((m, n))
    for p in range(m):
        for q in range(n):
            s = 0.0
            for i in range(m):
                for j in range(n):
                    s += (
                        x[i, j]
                        * math.cos(math.pi * (2 * i + 1) * p / (2 * m))
                        * math.cos(math.pi * (2 * j + 1) * q / (2 * n))
                    )
            ap = math.sqrt((1 if p == 0 else 2) / m)
            aq = math.sqrt((1 if q == 0 else 2) / n)
            out[p, q] = ap * aq * s
    return out


def glcm_bruteforce(matrix, direction, levels=8):
    """Symmetric normalized co-occurrence counts by direct scanning."""
    m = np.asarray(matrix, dtype=float)
    lo, hi = m.min(), m.max()
    if hi <= lo:
        q = np.zeros(m.shape, dtype=int)
    else:
        q = np.minimum((m - lo) / (hi - lo) * levels, levels - 1).astype(int)
    offs = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}[direction]
    p = np.zeros((levels, levels))
    h, w = q.shape
    for y in range(h):
        for x in range(w):
            yy, xx = y + offs[0], x + offs[1]
            if 0 <= yy < h and 0 <= xx < w:
                p[q[y, x], q[yy, xx]] += 1
                p[q[yy, xx], q[y, x]] += 1
    if p.sum() > 0:
        p = p / p.sum()
    return p


def greedy_seed_bruteforce(candidates, z):
    """Greedy Chebyshev-separated acceptance from a pre-ranked list.

    candidates: sequence of (x, y) in priority order.
    """
    kept = []
    for x, y in candidates:
        if all(max(abs(x - kx), abs(y - ky)) >= z for kx, ky in kept):
            kept.append((x, y))
    return kept


def correlation_prune_bruteforce(matrix, threshold):
    """Kept column indices via direct pairwise Pearson loops."""
    x = np.asarray(matrix, dtype=float)
    n, c = x.shape

    def pearson(a, b):
        ma, mb = sum(a) / n, sum(b) / n
        num = sum((a[i] - ma) * (b[i] - mb) for i in range(n))
        da = math.sqrt(sum((a[i] - ma) ** 2 for i in range(n)))
        db = math.sqrt(sum((b[i] - mb) ** 2 for i in range(n)))
        return num / (da * db)

    kept = []
    for i in range(c):
        if max(x[:, i]) == min(x[:, i]):
            continue
        if all(abs(pearson(x[:, i], x[:, j])) < threshold for j in kept):
            kept.append(i)
    return kept


def subtractive_potentials(points, radius):
    """Initial subtractive-clustering potentials by direct summation."""
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0] = 1.0
    x = (pts - lo) / span
    alpha = 4.0 / radius**2
    out = []
    for i in range(len(x)):
        out.append(
            sum(math.exp(-alpha * sum((x[i] - x[j]) ** 2)) for j in range(len(x)))
        )
    return out
