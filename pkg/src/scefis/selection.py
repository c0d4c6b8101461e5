"""Feature-selection cascade: correlation pruning, five unsupervised
selectors, quorum vote, and the final prune.

The cascade narrows the stacked statistic matrix in fixed stages:
99%-correlation prune, cardinality determination at 90%, five
independent selectors voting alongside the correlation result, then a
closing 90% prune.  All selectors are deterministic under fixed
defaults; a selector that fails numerically is excluded from the vote
and the quorum shrinks accordingly.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist, squareform

log = logging.getLogger(__name__)

KNN_NEIGHBORS = 5
MCFS_CLUSTERS = 5
PRUNE_STRONG = 0.99
PRUNE_FINAL = 0.90

METHOD_TAGS = ("C", "P", "M", "F", "G", "L")


@dataclass
class SelectionResult:
    method: str
    indices: list[int]


@dataclass
class SelectionReport:
    n_t: int
    n_t1: int
    n_t2: int
    n_t3: int
    n_l: int
    per_method: dict[str, list[int]] = field(default_factory=dict)
    failed_methods: list[str] = field(default_factory=list)
    vote_tally: dict[int, int] = field(default_factory=dict)
    dropped_constant: list[int] = field(default_factory=list)
    quorum: int = 0
    vote_fallback: bool = False

    def to_dict(self):
        return {
            "widths": {
                "n_t": self.n_t, "n_t1": self.n_t1, "n_t2": self.n_t2,
                "n_t3": self.n_t3, "n_l": self.n_l,
            },
            "per_method": self.per_method,
            "failed_methods": self.failed_methods,
            "vote_tally": {str(k): v for k, v in sorted(self.vote_tally.items())},
            "dropped_constant": self.dropped_constant,
            "quorum": self.quorum,
            "vote_fallback": self.vote_fallback,
        }


def correlation_prune(matrix, threshold, names=None):
    """Keep columns in schema order, dropping any whose |Pearson r| with
    an already-kept column reaches the threshold.

    Zero-variance columns are dropped up front.  Returns (pruned matrix,
    kept indices, dropped-constant indices).
    """
    x = np.asarray(matrix, dtype=np.float64)
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must be in (0, 1]")
    if x.size == 0:
        raise ValueError("empty matrix")
    stds = np.std(x, axis=0)
    constant = [int(i) for i in np.flatnonzero(stds == 0)]
    if len(constant) == x.shape[1]:
        raise ValueError("no informative features: all columns constant")
    if constant:
        log.debug("dropping %d constant columns", len(constant))
    kept = []
    for i in range(x.shape[1]):
        if stds[i] == 0:
            continue
        redundant = False
        for j in kept:
            r = np.corrcoef(x[:, i], x[:, j])[0, 1]
            if abs(r) >= threshold:
                redundant = True
                break
        if not redundant:
            kept.append(i)
    return x[:, kept], kept, constant


def determine_cardinality(f4):
    """Feature budget N_T2 from a 90% prune of F4; the pruned matrix is
    the correlation method's own selection (F_C)."""
    _, kept, _ = correlation_prune(f4, PRUNE_FINAL)
    return len(kept), SelectionResult("C", kept)


def _standardize(x):
    x = np.asarray(x, dtype=np.float64)
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd[sd == 0] = 1.0
    return (x - mu) / sd


def _heat_kernel_graph(x, k=KNN_NEIGHBORS):
    """Symmetric k-NN affinity with heat-kernel weights.

    Kernel width is the mean pairwise distance over the sample rows.
    """
    d = squareform(pdist(x))
    n = d.shape[0]
    k = min(k, n - 1)
    sigma = d[np.triu_indices(n, k=1)].mean()
    if sigma <= 0:
        sigma = 1.0
    w = np.exp(-(d**2) / (2.0 * sigma**2))
    order = np.argsort(d, axis=1, kind="stable")
    mask = np.zeros_like(w, dtype=bool)
    rows = np.repeat(np.arange(n), k)
    mask[rows, order[:, 1 : k + 1].ravel()] = True
    mask |= mask.T
    w = np.where(mask, w, 0.0)
    np.fill_diagonal(w, 0.0)
    return w


def fs_laplacian(f4, k):
    """Laplacian score: prefer features preserving the k-NN locality
    structure; k lowest scores win."""
    x = _standardize(f4)
    _check_k(x, k)
    w = _heat_kernel_graph(x)
    d = w.sum(axis=1)
    lap = np.diag(d) - w
    total = d.sum()
    scores = np.empty(x.shape[1])
    for i in range(x.shape[1]):
        f = x[:, i]
        f_t = f - (f @ d) / total
        denom = f_t @ (d * f_t)
        scores[i] = (f_t @ lap @ f_t) / denom if denom > 1e-12 else np.inf
    ranked = np.argsort(scores, kind="stable")
    return SelectionResult("L", sorted(int(i) for i in ranked[:k]))


def fs_spectral(f4, k):
    """Spectral relevance ranking on the normalized graph Laplacian;
    small scores indicate alignment with the graph structure."""
    x = _standardize(f4)
    _check_k(x, k)
    w = _heat_kernel_graph(x)
    d = w.sum(axis=1)
    d_isqrt = 1.0 / np.sqrt(np.maximum(d, 1e-12))
    l_norm = np.eye(len(d)) - d_isqrt[:, None] * w * d_isqrt[None, :]
    scores = np.empty(x.shape[1])
    for i in range(x.shape[1]):
        f = np.sqrt(np.maximum(d, 0.0)) * x[:, i]
        norm = np.linalg.norm(f)
        if norm <= 1e-12:
            scores[i] = np.inf
            continue
        f = f / norm
        scores[i] = f @ l_norm @ f
    ranked = np.argsort(scores, kind="stable")
    return SelectionResult("P", sorted(int(i) for i in ranked[:k]))


def _mici_distance(x):
    """Pairwise maximal-information-compression distance between
    features: the smaller eigenvalue of each 2x2 covariance."""
    c = np.cov(x, rowvar=False, ddof=1)
    v = np.diag(c)
    n = c.shape[0]
    vi = v[:, None]
    vj = v[None, :]
    tr = vi + vj
    det_term = np.sqrt(np.maximum(tr**2 - 4 * (vi * vj - c**2), 0.0))
    lam2 = (tr - det_term) / 2.0
    np.fill_diagonal(lam2, 0.0)
    return np.maximum(lam2, 0.0)


def fs_feature_similarity(f4, k):
    """Cluster features by compression similarity; keep one
    representative (medoid) per cluster."""
    x = _standardize(f4)
    _check_k(x, k)
    n = x.shape[1]
    if k == n:
        return SelectionResult("F", list(range(n)))
    dist = _mici_distance(x)
    condensed = dist[np.triu_indices(n, k=1)]
    labels = fcluster(linkage(condensed, method="complete"), k, criterion="maxclust")
    chosen = []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        totals = dist[np.ix_(members, members)].sum(axis=1)
        chosen.append(int(members[np.argmin(totals)]))
    # maxclust can merge ties; pad deterministically if short
    for i in range(n):
        if len(chosen) >= k:
            break
        if i not in chosen:
            chosen.append(i)
    return SelectionResult("F", sorted(chosen[:k]))


def fs_mcfs(f4, k, n_clusters=MCFS_CLUSTERS):
    """Multi-cluster selection: spectral embedding of the sample graph,
    one regression per embedding vector, rank by largest coefficient."""
    x = _standardize(f4)
    _check_k(x, k)
    w = _heat_kernel_graph(x)
    d = w.sum(axis=1)
    d_isqrt = 1.0 / np.sqrt(np.maximum(d, 1e-12))
    l_norm = np.eye(len(d)) - d_isqrt[:, None] * w * d_isqrt[None, :]
    vals, vecs = np.linalg.eigh(l_norm)
    m = min(n_clusters, len(vals) - 1)
    if m < 1:
        raise ValueError("too few rows for spectral embedding")
    embedding = vecs[:, 1 : m + 1]  # skip the trivial eigenvector
    coefs = np.linalg.lstsq(x, embedding, rcond=None)[0]
    scores = np.max(np.abs(coefs), axis=1)
    ranked = np.argsort(-scores, kind="stable")
    return SelectionResult("M", sorted(int(i) for i in ranked[:k]))


def fs_greedy(f4, k):
    """Greedy forward selection minimizing the Frobenius reconstruction
    residual of the matrix from the chosen columns."""
    x = _standardize(f4)
    _check_k(x, k)
    residual = x.copy()
    chosen = []
    for _ in range(k):
        norms = np.sum(residual**2, axis=0)
        gains = np.full(x.shape[1], -np.inf)
        proj = residual.T @ residual
        for i in range(x.shape[1]):
            if i in chosen or norms[i] <= 1e-12:
                continue
            gains[i] = np.sum(proj[i] ** 2) / norms[i]
        best = int(np.argmax(gains))
        if not np.isfinite(gains[best]):
            for i in range(x.shape[1]):  # residual exhausted; pad in order
                if i not in chosen:
                    chosen.append(i)
                    break
            continue
        chosen.append(best)
        u = residual[:, best] / np.linalg.norm(residual[:, best])
        residual = residual - np.outer(u, u @ residual)
    return SelectionResult("G", sorted(chosen))


def _check_k(x, k):
    if k > x.shape[1]:
        raise ValueError(f"k={k} exceeds column count {x.shape[1]}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows")


def ensemble_vote(results):
    """Features present in at least half of the active selections.

    Quorum = ceil(active / 2); failed methods are simply absent, which
    shrinks the quorum.  An empty outcome falls back to the correlation
    method's indices.
    """
    active = [r for r in results if r is not None]
    if not active:
        raise ValueError("no active selection results")
    quorum = -(-len(active) // 2)
    tally = {}
    for r in active:
        for i in r.indices:
            tally[i] = tally.get(i, 0) + 1
    selected = sorted(i for i, c in tally.items() if c >= quorum)
    fallback = False
    if not selected:
        log.warning("empty vote outcome; falling back to correlation indices")
        corr = next((r for r in active if r.method == "C"), active[0])
        selected = sorted(corr.indices)
        fallback = True
    return selected, tally, quorum, fallback


def finalize(f5):
    """Closing 90% correlation prune producing the final feature set."""
    return correlation_prune(f5, PRUNE_FINAL)


def run_cascade(f3, strong=PRUNE_STRONG, final=PRUNE_FINAL):
    """Full F3 -> F* cascade.  Returns (F*, indices into F3, report)."""
    f3 = np.asarray(f3, dtype=np.float64)
    f4, idx_f4, dropped = correlation_prune(f3, strong)
    n_t2, res_c = determine_cardinality(f4)

    selectors = [
        ("P", fs_spectral),
        ("M", fs_mcfs),
        ("F", fs_feature_similarity),
        ("G", fs_greedy),
        ("L", fs_laplacian),
    ]
    results = [res_c]
    failed = []
    for tag, fn in selectors:
        try:
            results.append(fn(f4, n_t2))
        except (ValueError, np.linalg.LinAlgError) as exc:
            log.warning("selector %s failed (%s); excluded from vote", tag, exc)
            failed.append(tag)
    voted, tally, quorum, fallback = ensemble_vote(results)
    if len(voted) > n_t2:
        # keep the documented width bound: most-voted first, schema
        # order on ties
        voted = sorted(sorted(voted), key=lambda i: -tally[i])[:n_t2]
        voted = sorted(voted)
    f5 = f4[:, voted]
    _, kept_final, _ = finalize(f5)
    final_in_f4 = [voted[i] for i in kept_final]
    final_in_f3 = [idx_f4[i] for i in final_in_f4]
    report = SelectionReport(
        n_t=f3.shape[1],
        n_t1=f4.shape[1],
        n_t2=n_t2,
        n_t3=len(voted),
        n_l=len(final_in_f3),
        per_method={r.method: [int(idx_f4[i]) for i in r.indices] for r in results},
        failed_methods=failed,
        vote_tally={int(idx_f4[i]): c for i, c in tally.items()},
        dropped_constant=dropped,
        quorum=quorum,
        vote_fallback=fallback,
    )
    return f3[:, final_in_f3], final_in_f3, report
