"""Phase orchestration: self-configuration, offline threshold search,
training, the online evolving loop, and cross-validated evaluation."""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import features, fuzzy, keypoints, selection, thresholds
from .imageio import read_gray, read_mask
from .metrics import jaccard, maa_search, stats_summary

log = logging.getLogger(__name__)

STATISTIC_ROWS = 8


@dataclass
class ProjectConfig:
    image_dir: Path
    gold_dir: Path
    strong_corr: float = 0.99
    final_corr: float = 0.90
    radius: float = fuzzy.DEFAULT_RADIUS
    d_min: float = fuzzy.DEFAULT_D_MIN
    dark_object: bool = True
    tizhoosh_alpha: float = 2.0
    niblack_window: int = 25
    niblack_k: float = -0.2
    test_fraction: float = 0.2
    folds: int = 10
    seed: int = 7

    def __post_init__(self):
        self.image_dir = Path(self.image_dir)
        self.gold_dir = Path(self.gold_dir)
        for thr in (self.strong_corr, self.final_corr):
            if not (0.0 < thr <= 1.0):
                raise ValueError("correlation thresholds must be in (0, 1]")

    def to_dict(self):
        d = self.__dict__.copy()
        d["image_dir"] = str(self.image_dir)
        d["gold_dir"] = str(self.gold_dir)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class ImageSet:
    """Lazy id-keyed access to the image and gold-standard directories."""

    def __init__(self, config):
        self.config = config
        self.ids = sorted(p.stem for p in config.image_dir.glob("*.png"))
        if not self.ids:
            self.ids = sorted(p.stem for p in config.image_dir.glob("*.pgm"))
        self._images = {}
        self._golds = {}

    def image(self, image_id):
        if image_id not in self._images:
            matches = list(self.config.image_dir.glob(f"{image_id}.*"))
            self._images[image_id] = read_gray(matches[0])
        return self._images[image_id]

    def gold(self, image_id):
        if image_id not in self._golds:
            matches = list(self.config.gold_dir.glob(f"{image_id}.*"))
            if not matches:
                return None
            self._golds[image_id] = read_mask(matches[0])
        return self._golds[image_id]


@dataclass
class SelfConfigResult:
    z: int
    image_ids: list[str]
    f3: np.ndarray
    f_star: np.ndarray
    selected_indices: list[int]
    selected_names: list[str]
    report: selection.SelectionReport

    def rows_for(self, image_id):
        """The 8 selected-feature statistic rows of one image."""
        i = self.image_ids.index(image_id)
        return self.f_star[i * STATISTIC_ROWS : (i + 1) * STATISTIC_ROWS]


def self_configure(config, image_set=None):
    """Derive the patch size and final feature set from all images."""
    imgs = image_set or ImageSet(config)
    if len(imgs.ids) < 2:
        raise ValueError("self-configuration needs at least 2 images")
    sizes = [imgs.image(i).shape for i in imgs.ids]
    z = keypoints.rectangle_size([s[0] for s in sizes], [s[1] for s in sizes])
    blocks = []
    for image_id in imgs.ids:
        img = imgs.image(image_id)
        points = keypoints.detect_interest_points(img)
        seeds = keypoints.select_seeds(points, z, img)
        if seeds[0].fallback:
            log.info("image %s: center-fallback seed used", image_id)
        f1 = features.build_F1(img, seeds, z)
        blocks.append(features.build_F2(f1))
    f3 = np.vstack(blocks)
    f_star, kept, report = selection.run_cascade(
        f3, strong=config.strong_corr, final=config.final_corr
    )
    schema = features.feature_schema()
    return SelfConfigResult(
        z=z,
        image_ids=list(imgs.ids),
        f3=f3,
        f_star=f_star,
        selected_indices=kept,
        selected_names=[schema[i] for i in kept],
        report=report,
    )


def offline_optimal(config, image_set=None):
    """Exhaustive best threshold and achievable Jaccard per image."""
    imgs = image_set or ImageSet(config)
    table = {}
    for image_id in imgs.ids:
        gold = imgs.gold(image_id)
        if gold is None:
            log.warning("image %s has no gold standard; excluded", image_id)
            continue
        res = maa_search(imgs.image(image_id), gold, dark_object=config.dark_object)
        table[image_id] = (res.threshold, res.j_max)
    return table


def train(config, sc, table, train_ids):
    """Build the pruned training store and the initial rule base."""
    if not train_ids:
        raise ValueError("empty training set")
    n_inputs = sc.f_star.shape[1]
    store = fuzzy.TrainingStore.empty(n_inputs)
    for i, image_id in enumerate(train_ids):
        f_t = sc.rows_for(image_id)
        t_val = float(table[image_id][0])
        values = np.full(f_t.shape[0], t_val)
        if i == 0:
            store = store.append(f_t, values)
        else:
            kept = fuzzy.prune_rows(f_t, values, store, config.d_min)
            if kept:
                store = store.append(f_t[kept], values[kept])
    rb = fuzzy.generate_rules(store.inputs, store.outputs, radius=config.radius)
    return store, rb


def predict_threshold(rb, f_s):
    """Inference block -> fused, clamped integer threshold."""
    t_o = fuzzy.infer_block(rb, f_s)
    t_star = fuzzy.fuse_output(t_o)
    return int(np.clip(round(t_star), 0, 255)), t_o


class ReplayFeedback:
    """Feedback source that answers with the stored gold standards."""

    def __init__(self, image_set):
        self.image_set = image_set

    def __call__(self, image_id, segment):
        return self.image_set.gold(image_id)


@dataclass
class TrialReport:
    trial: int
    train_ids: list[str]
    test_ids: list[str]
    per_image: dict[str, dict[str, float]]
    summaries: dict[str, dict[str, float]]
    rule_trace: list[int]
    thresholds_used: dict[str, int] = field(default_factory=dict)

    def to_dict(self):
        return {
            "trial": self.trial,
            "train_ids": self.train_ids,
            "test_ids": self.test_ids,
            "per_image": self.per_image,
            "summaries": self.summaries,
            "rule_trace": self.rule_trace,
            "thresholds_used": self.thresholds_used,
        }


def run_online(config, sc, rb, store, test_ids, feedback, image_set=None):
    """Evolving loop over the test images.

    Per image: infer a threshold, segment, show the segment to the
    feedback source, score against the corrected gold, then evolve the
    rule base from the corrected best threshold.  Returns per-image
    Jaccard, used thresholds, the rule-count trace, and the final
    (rule base, store).
    """
    imgs = image_set or ImageSet(config)
    per_image_j = {}
    used = {}
    trace = []
    for image_id in test_ids:
        img = imgs.image(image_id)
        f_s = sc.rows_for(image_id)
        t_star, _ = predict_threshold(rb, f_s)
        segment = thresholds.apply_threshold(img, t_star, config.dark_object)
        gold = feedback(image_id, segment)
        if gold is None:
            log.warning("no feedback for %s; skipped without evolution", image_id)
            continue
        per_image_j[image_id] = jaccard(segment, gold)
        used[image_id] = t_star
        t_b = maa_search(img, gold, dark_object=config.dark_object).threshold
        rb, store = fuzzy.evolve(
            rb, store, f_s, t_b, d_min=config.d_min, radius=config.radius
        )
        trace.append(len(rb.rules))
    return per_image_j, used, trace, rb, store


BASELINE_METHODS = ("otsu", "kittler", "huang", "tizhoosh", "niblack")


def baseline_masks(config, img):
    """Masks from every baseline method for one image."""
    hist = thresholds.histogram(img)
    dark = config.dark_object
    out = {
        "otsu": thresholds.apply_threshold(img, thresholds.otsu(hist).threshold, dark),
        "kittler": thresholds.apply_threshold(
            img, thresholds.kittler(hist).threshold, dark
        ),
        "huang": thresholds.apply_threshold(img, thresholds.huang(hist).threshold, dark),
        "tizhoosh": thresholds.apply_threshold(
            img, thresholds.tizhoosh_interval(hist, config.tizhoosh_alpha).threshold, dark
        ),
        "niblack": thresholds.niblack(
            img, config.niblack_window, config.niblack_k, dark
        ),
    }
    return out


def compare_baselines(config, test_ids, scefis_j, image_set=None):
    """Per-method Jaccard table and summary statistics on one test set.

    scefis_j: per-image Jaccard of the evolving system (same ids).
    The paired t-test baseline is Otsu, the parent global method.
    """
    imgs = image_set or ImageSet(config)
    per_image = {i: {} for i in test_ids}
    for image_id in test_ids:
        img = imgs.image(image_id)
        gold = imgs.gold(image_id)
        for name, mask in baseline_masks(config, img).items():
            per_image[image_id][name] = jaccard(mask, gold)
        per_image[image_id]["maa"] = maa_search(
            img, gold, dark_object=config.dark_object
        ).j_max
        per_image[image_id]["sc_efis"] = scefis_j[image_id]
    summaries = {}
    otsu_j = [per_image[i]["otsu"] for i in test_ids]
    for method in ("maa", "sc_efis", *BASELINE_METHODS):
        vals = [per_image[i][method] for i in test_ids]
        s = stats_summary(vals, baseline=None if method == "otsu" else otsu_j)
        summaries[method] = {
            "mean": s.mean, "std": s.std,
            "ci_low": s.ci_low, "ci_high": s.ci_high,
            "p_vs_otsu": s.p_value,
        }
    return per_image, summaries


def fold_splits(ids, folds, test_fraction, seed):
    """Seeded circular-block splits: disjoint train/test per trial and
    full test coverage of the dataset across trials."""
    ids = list(ids)
    n = len(ids)
    if n < folds:
        raise ValueError("fewer images than folds")
    rng = np.random.default_rng(seed)
    shuffled = [ids[i] for i in rng.permutation(n)]
    test_size = max(1, round(test_fraction * n))
    stride = math.ceil(n / folds)
    splits = []
    for f in range(folds):
        start = (f * stride) % n
        test = [shuffled[(start + j) % n] for j in range(test_size)]
        train_set = [i for i in shuffled if i not in test]
        splits.append((train_set, test))
    return splits


def cross_validate(config, sc, table, image_set=None, folds=None, seed=None):
    """Seeded multi-trial evaluation with replay feedback."""
    imgs = image_set or ImageSet(config)
    folds = folds or config.folds
    seed = config.seed if seed is None else seed
    usable = [i for i in imgs.ids if i in table]
    reports = []
    for trial, (train_ids, test_ids) in enumerate(
        fold_splits(usable, folds, config.test_fraction, seed)
    ):
        store, rb = train(config, sc, table, train_ids)
        per_j, used, trace, _, _ = run_online(
            config, sc, rb, store, test_ids, ReplayFeedback(imgs), imgs
        )
        per_image, summaries = compare_baselines(config, test_ids, per_j, imgs)
        reports.append(
            TrialReport(
                trial=trial,
                train_ids=train_ids,
                test_ids=test_ids,
                per_image=per_image,
                summaries=summaries,
                rule_trace=trace,
                thresholds_used=used,
            )
        )
    return reports
