import os

# keep BLAS single-threaded: deterministic timings, honest single-thread
# training-time measurements, and no oversubscription on tiny arrays
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")

import time

import numpy as np
import pytest

from jndattack.data import make_toy_dataset
from jndattack.harness import filter_dataset
from jndattack.oracle import TinyClassifier, train

DATASET_SEED = 42
DATASET_SIZE = 800
TRAIN_EPOCHS = 50
TRAIN_LR = 5e-3


@pytest.fixture(scope="session")
def toy_data():
    return make_toy_dataset(DATASET_SIZE, DATASET_SEED)


@pytest.fixture(scope="session")
def trained_setup(toy_data):
    """Substitute + two victims trained on the shared toy dataset.

    Returns a dict with the models, their train results, the wall time of
    the substitute's training run, and the victim-filtered test split.
    """
    specs = {
        "substitute": (8, 16, 7),
        "victim1": (8, 16, 101),
        "victim2": (12, 20, 202),
    }
    models, results, timings = {}, {}, {}
    for name, (w1, w2, seed) in specs.items():
        model = TinyClassifier(toy_data.input_shape, toy_data.num_classes, w1, w2, seed=seed)
        start = time.monotonic()
        results[name] = train(model, toy_data, TRAIN_EPOCHS, TRAIN_LR, seed=seed)
        timings[name] = time.monotonic() - start
        models[name] = model
    images, labels = toy_data.subset("test")
    victims = {"victim1": models["victim1"], "victim2": models["victim2"]}
    indices = filter_dataset(images, labels, victims)
    return {
        "models": models,
        "results": results,
        "timings": timings,
        "victims": victims,
        "images": images,
        "labels": labels,
        "indices": indices,
    }


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
