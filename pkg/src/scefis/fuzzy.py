"""Takagi-Sugeno rule engine: subtractive clustering, inference, output
fusion, row pruning, and rule-base evolution.

Rules have Gaussian antecedents (one center/width per input) and affine
consequents fitted by global least squares.  The rule base is always
regenerated from the full training store, so evolution is
order-insensitive given identical kept rows.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_RADIUS = 0.5
DEFAULT_D_MIN = 0.6
# Chiu subtractive clustering constants
SQUASH_FACTOR = 1.25
ACCEPT_RATIO = 0.5
REJECT_RATIO = 0.15


def zmf(x, a, b):
    """Z-shaped membership: 1 below a, 0 above b, quadratic spline between."""
    if a >= b:
        raise ValueError("zmf requires a < b")
    x = float(x)
    if x <= a:
        return 1.0
    if x >= b:
        return 0.0
    mid = (a + b) / 2.0
    if x <= mid:
        return 1.0 - 2.0 * ((x - a) / (b - a)) ** 2
    return 2.0 * ((x - b) / (b - a)) ** 2


def fuse_output(t_o):
    """Collapse an inference vector to one value.

    m = zmf(sigma, 0.10*mu, 0.20*mu); result = m*mu + (1-m)*median.
    With mu = 0 the breakpoints collapse and m is defined as 1.
    """
    t_o = np.asarray(t_o, dtype=np.float64)
    if t_o.size == 0:
        raise ValueError("empty inference vector")
    mu = float(np.mean(t_o))
    med = float(np.median(t_o))
    sigma = float(np.std(t_o, ddof=1)) if t_o.size > 1 else 0.0
    if mu == 0.0 or 0.10 * abs(mu) >= 0.20 * abs(mu):
        log.debug("fuse_output: zero mean, membership pinned to 1")
        m = 1.0
    else:
        lo, hi = sorted((0.10 * mu, 0.20 * mu))
        m = zmf(sigma, lo, hi)
    return m * mu + (1.0 - m) * med


@dataclass
class TSRule:
    centers: np.ndarray
    widths: np.ndarray
    coefficients: np.ndarray  # n_inputs weights followed by the bias

    def firing(self, x):
        z = (np.asarray(x, dtype=np.float64) - self.centers) / self.widths
        return float(np.exp(-0.5 * np.sum(z * z)))

    def consequent(self, x):
        return float(self.coefficients[:-1] @ np.asarray(x, dtype=np.float64)
                     + self.coefficients[-1])


@dataclass
class RuleBase:
    """Rules plus the z-score frame they live in.

    Antecedent centers/widths and consequent coefficients are expressed
    in normalized input coordinates (x - mu) / sd; `infer` applies the
    frame before evaluating rules.
    """

    rules: list[TSRule]
    n_inputs: int
    input_mean: np.ndarray = None
    input_scale: np.ndarray = None
    version: int = 1
    provenance_rows: int = 0

    def __post_init__(self):
        if self.input_mean is None:
            self.input_mean = np.zeros(self.n_inputs)
        if self.input_scale is None:
            self.input_scale = np.ones(self.n_inputs)

    def normalize(self, x):
        return (np.asarray(x, dtype=np.float64) - self.input_mean) / self.input_scale

    def to_dict(self):
        return {
            "version": self.version,
            "n_inputs": self.n_inputs,
            "provenance_rows": self.provenance_rows,
            "input_mean": self.input_mean.tolist(),
            "input_scale": self.input_scale.tolist(),
            "rules": [
                {
                    "centers": r.centers.tolist(),
                    "widths": r.widths.tolist(),
                    "coefficients": r.coefficients.tolist(),
                }
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, d):
        rules = [
            TSRule(
                centers=np.asarray(r["centers"], dtype=np.float64),
                widths=np.asarray(r["widths"], dtype=np.float64),
                coefficients=np.asarray(r["coefficients"], dtype=np.float64),
            )
            for r in d["rules"]
        ]
        return cls(
            rules=rules,
            n_inputs=d["n_inputs"],
            input_mean=np.asarray(d["input_mean"], dtype=np.float64),
            input_scale=np.asarray(d["input_scale"], dtype=np.float64),
            version=d["version"],
            provenance_rows=d.get("provenance_rows", 0),
        )

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class TrainingStore:
    inputs: np.ndarray  # n x d
    outputs: np.ndarray  # n

    @classmethod
    def empty(cls, n_inputs):
        return cls(np.empty((0, n_inputs)), np.empty(0))

    def __len__(self):
        return self.inputs.shape[0]

    def append(self, rows, values):
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        values = np.atleast_1d(np.asarray(values, dtype=np.float64))
        if rows.shape[0] != values.shape[0]:
            raise ValueError("row/value count mismatch")
        return TrainingStore(
            np.vstack([self.inputs, rows]),
            np.concatenate([self.outputs, values]),
        )


def subtractive_clustering(data, radius=DEFAULT_RADIUS):
    """Chiu's subtractive clustering on min-max normalized data.

    Returns row indices of the chosen cluster centers (original space).
    Deterministic: potential ties resolve to the smallest row index.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if not (0.0 < radius <= 1.0):
        raise ValueError("radius must be in (0, 1]")
    n = data.shape[0]
    if n == 1:
        return [0]
    lo = data.min(axis=0)
    span = data.max(axis=0) - lo
    span[span == 0] = 1.0
    x = (data - lo) / span
    alpha = 4.0 / radius**2
    beta = 4.0 / (SQUASH_FACTOR * radius) ** 2
    d2 = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=2)
    potential = np.exp(-alpha * d2).sum(axis=1)
    centers = []
    first_potential = None
    while True:
        best = int(np.argmax(potential))
        p_best = potential[best]
        if first_potential is None:
            first_potential = p_best
            accept = True
        elif p_best > ACCEPT_RATIO * first_potential:
            accept = True
        elif p_best < REJECT_RATIO * first_potential:
            break
        else:
            # gray zone: accept only if far enough from existing centers
            d_min_rel = np.sqrt(min(d2[best, c] for c in centers)) / radius
            if d_min_rel + p_best / first_potential >= 1.0:
                accept = True
            else:
                potential[best] = 0.0
                continue
        if accept:
            centers.append(best)
            potential = potential - p_best * np.exp(-beta * d2[best])
            potential[best] = -np.inf
            if len(centers) == n:
                break
    return sorted(centers)


def generate_rules(m, o, radius=DEFAULT_RADIUS, version=1):
    """Build a rule base from training matrices via subtractive
    clustering on the joint input/output space.

    Widths follow the genfis2 convention radius*(max-min)/sqrt(8);
    consequents come from one global least-squares fit over
    membership-weighted regressors (ridge fallback when singular).
    """
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    o = np.atleast_1d(np.asarray(o, dtype=np.float64))
    if m.shape[0] == 0:
        raise ValueError("empty training data")
    if m.shape[0] != o.shape[0]:
        raise ValueError("input/output row mismatch")
    joint = np.hstack([m, o[:, None]])
    center_idx = subtractive_clustering(joint, radius)
    mu = m.mean(axis=0)
    sd = m.std(axis=0)
    sd[sd == 0] = 1.0
    mn = (m - mu) / sd
    span = mn.max(axis=0) - mn.min(axis=0)
    span[span == 0] = 1.0
    widths = radius * span / np.sqrt(8.0)
    rules = [
        TSRule(centers=mn[i].copy(), widths=widths.copy(),
               coefficients=np.zeros(m.shape[1] + 1))
        for i in center_idx
    ]
    # global least squares for all consequents at once
    n, d = m.shape
    w = np.empty((n, len(rules)))
    for j, r in enumerate(rules):
        for i in range(n):
            w[i, j] = r.firing(mn[i])
    w_sum = w.sum(axis=1, keepdims=True)
    w_norm = np.where(w_sum > 1e-12, w / np.maximum(w_sum, 1e-300), 1.0 / len(rules))
    phi = np.hstack([mn, np.ones((n, 1))])
    design = np.hstack([w_norm[:, j : j + 1] * phi for j in range(len(rules))])
    if n <= d + 1:
        # tiny store: exact (minimum-norm) interpolation
        theta, _, rank, _ = np.linalg.lstsq(design, o, rcond=None)
        if rank < design.shape[1] and not np.allclose(design @ theta, o, atol=1e-9):
            log.debug("singular consequent system; ridge fallback")
            a = design.T @ design + 1e-8 * np.eye(design.shape[1])
            theta = np.linalg.solve(a, design.T @ o)
    else:
        # shrink slope coefficients so consequents stay near local
        # output levels instead of interpolating every stored row
        penalty = np.full(design.shape[1], float(n))
        penalty[d :: d + 1] = 1e-8  # rule biases essentially free
        a = design.T @ design + np.diag(penalty)
        theta = np.linalg.solve(a, design.T @ o)
    for j, r in enumerate(rules):
        r.coefficients = theta[j * (d + 1) : (j + 1) * (d + 1)]
    return RuleBase(
        rules=rules, n_inputs=d, input_mean=mu, input_scale=sd,
        version=version, provenance_rows=n,
    )


def infer(rb, x):
    """Weighted-average TS inference at a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (rb.n_inputs,):
        raise ValueError(f"expected {rb.n_inputs} inputs, got {x.shape}")
    xn = rb.normalize(x)
    firings = np.array([r.firing(xn) for r in rb.rules])
    total = firings.sum()
    outputs = np.array([r.consequent(xn) for r in rb.rules])
    if total < 1e-12:
        log.debug("vanishing firing strength; using nearest rule")
        dists = [np.linalg.norm(xn - r.centers) for r in rb.rules]
        return float(outputs[int(np.argmin(dists))])
    return float(firings @ outputs / total)


def infer_block(rb, f_s):
    """Row-wise inference over a per-image statistic block."""
    f_s = np.atleast_2d(np.asarray(f_s, dtype=np.float64))
    return np.array([infer(rb, row) for row in f_s])


def prune_rows(rows, values, store, d_min=DEFAULT_D_MIN):
    """Indices of candidate rows far enough from everything stored.

    Distance is Euclidean on the z-score-normalized joint
    (inputs, output) vector; normalization statistics come from the
    store.  Kept iff distance >= d_min to every stored row (inclusive).
    An empty store keeps everything.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    values = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if len(store) == 0:
        return list(range(rows.shape[0]))
    stored = np.hstack([store.inputs, store.outputs[:, None]])
    cand = np.hstack([rows, values[:, None]])
    mu = stored.mean(axis=0)
    sd = stored.std(axis=0)
    sd[sd == 0] = 1.0
    stored_n = (stored - mu) / sd
    cand_n = (cand - mu) / sd
    kept = []
    for i, c in enumerate(cand_n):
        d = np.sqrt(np.sum((stored_n - c) ** 2, axis=1))
        if np.all(d >= d_min):
            kept.append(i)
    return kept


def evolve(rb, store, f_s, t_b, d_min=DEFAULT_D_MIN, radius=DEFAULT_RADIUS):
    """One feedback step: prune, append, regenerate.

    t_b (the corrected-gold best threshold) pairs with every kept
    statistic row.  When pruning discards everything the rules are
    unchanged but the version still advances.
    """
    f_s = np.atleast_2d(np.asarray(f_s, dtype=np.float64))
    t_vals = np.full(f_s.shape[0], float(t_b))
    kept = prune_rows(f_s, t_vals, store, d_min)
    if not kept:
        log.debug("evolution step pruned entirely; no-op version bump")
        new_rb = RuleBase(
            rules=rb.rules, n_inputs=rb.n_inputs,
            input_mean=rb.input_mean, input_scale=rb.input_scale,
            version=rb.version + 1, provenance_rows=rb.provenance_rows,
        )
        return new_rb, store
    new_store = store.append(f_s[kept], t_vals[kept])
    new_rb = generate_rules(
        new_store.inputs, new_store.outputs, radius=radius, version=rb.version + 1
    )
    return new_rb, new_store
