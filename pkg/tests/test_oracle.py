import numpy as np
import pytest

from jndattack.data import Dataset, make_toy_dataset
from jndattack.oracle import (
    LinearClassifier,
    TinyClassifier,
    TrainingDiverged,
    finite_diff_gradient,
    load_checkpoint,
    save_checkpoint,
    softmax,
    train,
)


class MockLoss:
    """Oracle stub exposing only the loss surface finite differences need."""

    def __init__(self, fn):
        self.fn = fn

    def loss(self, x, y):
        return float(self.fn(np.asarray(x)))


def rel_errors(a, b, scale):
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6 * scale)
    return np.abs(a - b) / denom


def test_softmax_sums_to_one(rng):
    s = rng.normal(size=(5, 7)) * 30
    assert np.allclose(softmax(s).sum(axis=1), 1.0, atol=1e-9)


def test_zero_weight_linear_classifier(rng):
    m = LinearClassifier((4, 4, 1), 5)
    x = rng.uniform(0, 255, (4, 4, 1))
    scores = m.scores(x)
    assert np.allclose(scores, scores[0])
    assert np.allclose(m.probabilities(x), 1.0 / 5.0, atol=1e-12)


def test_linear_classifier_closed_form_gradient(rng):
    m = LinearClassifier((3, 3, 1), 4)
    m.weights = rng.normal(size=m.weights.shape)
    m.bias = rng.normal(size=4)
    x = rng.uniform(0, 255, (3, 3, 1))
    y = 2
    p = softmax((x.ravel() / 255.0) @ m.weights + m.bias)
    p[y] -= 1.0
    want = (m.weights @ p).reshape(3, 3, 1) / 255.0
    assert np.allclose(m.loss_gradient(x, y), want, atol=1e-12)


def test_scores_deterministic_and_shape_checked(rng):
    m = TinyClassifier((16, 16, 3), 4, seed=0)
    x = rng.uniform(0, 255, (16, 16, 3))
    assert np.array_equal(m.scores(x), m.scores(x))
    with pytest.raises(ValueError):
        m.scores(rng.uniform(0, 255, (8, 8, 3)))
    with pytest.raises(ValueError):
        m.loss_gradient(x, 4)


def test_same_seed_same_parameters():
    a = TinyClassifier((16, 16, 3), 4, seed=11)
    b = TinyClassifier((16, 16, 3), 4, seed=11)
    for k in a.params:
        assert np.array_equal(a.params[k], b.params[k])


def test_input_gradient_matches_finite_differences(rng):
    m = TinyClassifier((16, 16, 3), 4, seed=5)
    x = rng.uniform(0, 255, (16, 16, 3))
    y = 1
    g = m.loss_gradient(x, y)
    coords = rng.choice(x.size, size=100, replace=False)
    fd = finite_diff_gradient(m, x, y, h=1e-2, coords=coords)
    errs = rel_errors(g.ravel()[coords], fd.ravel()[coords], np.abs(g).max())
    assert errs.max() <= 1e-4


def test_parameter_gradients_match_finite_differences(rng):
    m = TinyClassifier((16, 16, 3), 4, seed=5)
    x = rng.uniform(0, 255, (1, 16, 16, 3))
    y = 3

    def loss_value():
        scores, _ = m.forward_batch(x)
        z = scores[0] - scores[0].max()
        return float(-(z[y] - np.log(np.exp(z).sum())))

    scores, cache = m.forward_batch(x)
    dscores = softmax(scores)
    dscores[0, y] -= 1.0
    grads, _ = m.backward_batch(dscores, cache)
    h = 1e-5
    for name in m.PARAM_ORDER:
        arr = m.params[name]
        n = min(100, arr.size)
        coords = rng.choice(arr.size, size=n, replace=False)
        an = grads[name].ravel()[coords]
        fd = np.empty(n)
        for i, c in enumerate(coords):
            orig = arr.flat[c]
            arr.flat[c] = orig + h
            lp = loss_value()
            arr.flat[c] = orig - h
            lm = loss_value()
            arr.flat[c] = orig
            fd[i] = (lp - lm) / (2 * h)
        errs = rel_errors(an, fd, np.abs(grads[name]).max() + 1e-12)
        assert errs.max() <= 1e-4, name


def test_finite_diff_on_mock_functions(rng):
    x = rng.uniform(0, 10, (3, 3, 1))
    ones = finite_diff_gradient(MockLoss(lambda v: v.sum()), x, 0, h=1e-3)
    assert np.allclose(ones, 1.0, atol=1e-8)
    zero = finite_diff_gradient(MockLoss(lambda v: 0.0), x, 0, h=1e-3)
    assert np.abs(zero).max() == 0.0
    quad = finite_diff_gradient(MockLoss(lambda v: (v**2).sum()), x, 0, h=1e-3)
    assert np.allclose(quad, 2 * x, atol=1e-6)


def test_saturated_input_has_small_gradient(rng):
    m = LinearClassifier((4, 4, 1), 3)
    m.weights = rng.normal(size=m.weights.shape) * 50.0
    x = rng.uniform(0, 255, (4, 4, 1))
    y = int(np.argmax(m.scores(x)))  # confident class: softmax ~ onehot
    confident = np.linalg.norm(m.loss_gradient(x, y))
    m2 = LinearClassifier((4, 4, 1), 3)
    m2.weights = m.weights / 5000.0  # near-uniform softmax
    uncertain = np.linalg.norm(m2.loss_gradient(x, y))
    assert confident < 1e-3 * uncertain


def _separable_dataset(n=40):
    rng = np.random.default_rng(0)
    images = np.empty((n, 16, 16, 3))
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        k = i % 2
        images[i] = (80.0 if k == 0 else 170.0) + rng.normal(0, 4, (16, 16, 3))
        labels[i] = k
    images = images.clip(0, 255)
    split = np.array(["train"] * n, dtype="<U5")
    return Dataset(images, labels, split, 2)


def test_zero_epochs_leaves_parameters_unchanged():
    data = _separable_dataset()
    m = TinyClassifier((16, 16, 3), 2, seed=1)
    before = {k: v.copy() for k, v in m.params.items()}
    train(m, data, epochs=0, learning_rate=1e-3, seed=0)
    for k in before:
        assert np.array_equal(m.params[k], before[k])


def test_separable_set_reaches_full_train_accuracy():
    data = _separable_dataset()
    m = TinyClassifier((16, 16, 3), 2, seed=1)
    result = train(m, data, epochs=50, learning_rate=5e-3, seed=1)
    assert result.train_accuracy == 1.0


def test_training_is_bit_deterministic():
    data = _separable_dataset()
    a = TinyClassifier((16, 16, 3), 2, seed=2)
    b = TinyClassifier((16, 16, 3), 2, seed=2)
    train(a, data, epochs=3, learning_rate=1e-3, seed=9)
    train(b, data, epochs=3, learning_rate=1e-3, seed=9)
    for k in a.params:
        assert np.array_equal(a.params[k], b.params[k])


def test_loss_decreases_over_first_epochs():
    data = make_toy_dataset(120, seed=3, size=16)
    m = TinyClassifier((16, 16, 3), 4, seed=4)
    result = train(m, data, epochs=5, learning_rate=5e-3, seed=4)
    assert result.epoch_losses[-1] < result.epoch_losses[0]


def test_divergence_raises():
    data = _separable_dataset()
    m = TinyClassifier((16, 16, 3), 2, seed=1)
    m.params["wf"][0, 0] = np.nan  # poisoned weights -> non-finite loss
    with pytest.raises(TrainingDiverged, match="non-finite"):
        train(m, data, epochs=1, learning_rate=1e-3, seed=1)


def test_checkpoint_round_trip(tmp_path):
    m = TinyClassifier((16, 16, 3), 4, width1=6, width2=10, seed=8)
    path = tmp_path / "m.ckpt"
    save_checkpoint(m, path)
    loaded = load_checkpoint(path)
    assert loaded.input_shape == m.input_shape
    assert loaded.num_classes == m.num_classes
    for k in m.params:
        assert np.array_equal(loaded.params[k], m.params[k])


def test_checkpoint_errors(tmp_path):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(ValueError):
        load_checkpoint(bad)
    m = TinyClassifier((16, 16, 3), 4, seed=8)
    path = tmp_path / "m.ckpt"
    save_checkpoint(m, path)
    blob = path.read_bytes()
    (tmp_path / "trunc.ckpt").write_bytes(blob[:-16])
    with pytest.raises(ValueError):
        load_checkpoint(tmp_path / "trunc.ckpt")
