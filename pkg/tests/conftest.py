import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scefis import pipeline, synthdata


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """The committed synthetic acceptance dataset (35 pairs)."""
    base = tmp_path_factory.mktemp("synthds")
    synthdata.generate_dataset(base / "images", base / "gold")
    return base


@pytest.fixture(scope="session")
def config(dataset_dir):
    return pipeline.ProjectConfig(
        image_dir=dataset_dir / "images", gold_dir=dataset_dir / "gold"
    )


@pytest.fixture(scope="session")
def image_set(config):
    return pipeline.ImageSet(config)


@pytest.fixture(scope="session")
def selfconfig(config, image_set):
    return pipeline.self_configure(config, image_set)


@pytest.fixture(scope="session")
def threshold_table(config, image_set):
    return pipeline.offline_optimal(config, image_set)


def random_histogram(rng):
    """A plausibly bimodal random histogram (some are degenerate-ish)."""
    hist = np.zeros(256, dtype=np.int64)
    modes = rng.integers(1, 4)
    for _ in range(modes):
        center = rng.integers(5, 251)
        width = rng.integers(3, 40)
        count = rng.integers(50, 2000)
        samples = np.clip(rng.normal(center, width, count).round(), 0, 255)
        hist += np.bincount(samples.astype(np.int64), minlength=256)[:256]
    return hist
