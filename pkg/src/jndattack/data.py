"""Procedural toy dataset: four classes of oriented texture.

Each image is a smooth background plus an oriented grating inside a
random Gaussian window (textured and smooth regions in one image, so
JND maps are non-trivial), a small class-dependent luminance offset,
slightly decorrelated color channels, and additive noise. Class is the
grating orientation: 0, 45, 90, 135 degrees.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_IMAGE_SIZE = 32
DEFAULT_NUM_CLASSES = 4


@dataclass
class Dataset:
    images: np.ndarray  # (N, H, W, C) float64 in [0, 255]
    labels: np.ndarray  # (N,) int64
    split: np.ndarray  # (N,) "train" / "test"
    num_classes: int

    def __post_init__(self):
        if len(self.images) != len(self.labels) or len(self.labels) != len(self.split):
            raise ValueError("images, labels, split must be equal length")
        if len(self.labels) and int(self.labels.max()) >= self.num_classes:
            raise ValueError("label out of range")

    def subset(self, tag):
        mask = self.split == tag
        return self.images[mask], self.labels[mask]

    @property
    def input_shape(self):
        return tuple(self.images.shape[1:])


def make_toy_dataset(
    n,
    seed,
    size=DEFAULT_IMAGE_SIZE,
    num_classes=DEFAULT_NUM_CLASSES,
    train_fraction=0.5,
    noise_sigma=3.0,
):
    rng = np.random.default_rng(seed)
    ii, jj = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    images = np.empty((n, size, size, 3))
    labels = np.empty(n, dtype=np.int64)
    gains = np.array([1.0, 0.92, 0.85])
    for i in range(n):
        k = i % num_classes
        theta = np.deg2rad(45.0 * k)
        freq = rng.uniform(0.16, 0.26)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(45.0, 75.0)
        base = rng.uniform(90.0, 150.0) + 6.0 * k
        cy, cx = rng.uniform(size / 4.0, 3.0 * size / 4.0, 2)
        win_sigma = rng.uniform(size / 5.5, size / 3.5)
        window = np.exp(-((ii - cy) ** 2 + (jj - cx) ** 2) / (2.0 * win_sigma**2))
        grating = amp * np.cos(2.0 * np.pi * freq * (jj * np.cos(theta) + ii * np.sin(theta)) + phase)
        luma = base + grating * window
        chan_gain = gains + rng.normal(0.0, 0.03, 3)
        img = luma[:, :, None] * chan_gain[None, None, :]
        img += rng.normal(0.0, noise_sigma, (size, size, 3))
        images[i] = np.clip(img, 0.0, 255.0)
        labels[i] = k
    n_train = int(round(n * train_fraction))
    perm = rng.permutation(n)
    split = np.full(n, "test", dtype="<U5")
    split[perm[:n_train]] = "train"
    return Dataset(images, labels, split, num_classes)
