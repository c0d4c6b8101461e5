"""Self-configuring evolving fuzzy thresholding for grayscale
segmentation: baseline thresholders, seed-patch feature extraction, an
unsupervised feature-selection cascade, a Takagi-Sugeno rule engine that
evolves from expert-corrected masks, and the evaluation pipeline."""

from .fuzzy import RuleBase, TrainingStore, evolve, fuse_output, generate_rules, infer, zmf
from .metrics import jaccard, maa_search, stats_summary
from .pipeline import ProjectConfig, cross_validate, offline_optimal, self_configure, train
from .thresholds import apply_threshold, histogram, huang, kittler, niblack, otsu, tizhoosh_interval

__all__ = [
    "RuleBase", "TrainingStore", "evolve", "fuse_output", "generate_rules",
    "infer", "zmf", "jaccard", "maa_search", "stats_summary", "ProjectConfig",
    "cross_validate", "offline_optimal", "self_configure", "train",
    "apply_threshold", "histogram", "huang", "kittler", "niblack", "otsu",
    "tizhoosh_interval",
]

__version__ = "0.1.0"
