"""Classifier oracles: the gradient-estimation seam for all attacks.

A GradientOracle exposes class scores and the cross-entropy loss
gradient with respect to the input image, in [0, 255] pixel units
(inputs are normalized by 255 internally so attack and JND units
coincide). TinyClassifier is a small conv net with hand-written
forward/backward passes; finite_diff_gradient is the independent
numerical check for any oracle.
"""

import abc
import struct
from dataclasses import dataclass, field

import numpy as np

CHECKPOINT_MAGIC = b"JAOR"
CHECKPOINT_VERSION = 1
PIXEL_SCALE = 255.0


class TrainingDiverged(RuntimeError):
    """Raised when the training loss becomes non-finite."""


def softmax(scores):
    z = scores - np.max(scores, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(scores):
    z = scores - np.max(scores, axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


class GradientOracle(abc.ABC):
    """Classifier with input-gradient access."""

    num_classes: int
    input_shape: tuple

    @abc.abstractmethod
    def scores(self, x):
        """Raw class scores for one (H, W, C) image."""

    @abc.abstractmethod
    def loss_gradient(self, x, y):
        """Gradient of the cross-entropy loss at (x, y) w.r.t. the input."""

    def probabilities(self, x):
        return softmax(self.scores(x))

    def predict(self, x):
        return int(np.argmax(self.scores(x)))

    def predict_batch(self, xb):
        return np.array([self.predict(x) for x in xb])

    def loss(self, x, y):
        return float(-log_softmax(self.scores(x))[y])


class LinearClassifier(GradientOracle):
    """Flatten -> affine scores. Closed-form gradients; mostly a test oracle."""

    def __init__(self, input_shape, num_classes, weights=None, bias=None):
        self.input_shape = tuple(input_shape)
        self.num_classes = num_classes
        dim = int(np.prod(input_shape))
        self.weights = np.zeros((dim, num_classes)) if weights is None else weights
        self.bias = np.zeros(num_classes) if bias is None else bias

    def scores(self, x):
        self._check(x)
        return (np.asarray(x, dtype=np.float64).ravel() / PIXEL_SCALE) @ self.weights + self.bias

    def loss_gradient(self, x, y):
        self._check(x)
        p = self.probabilities(x)
        p[y] -= 1.0
        return (self.weights @ p).reshape(self.input_shape) / PIXEL_SCALE

    def _check(self, x):
        if tuple(np.shape(x)) != self.input_shape:
            raise ValueError(f"expected input {self.input_shape}, got {np.shape(x)}")


def softplus(x):
    return np.logaddexp(0.0, x)


def sigmoid(x):
    # derivative of softplus; this form is overflow-safe
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _conv3_forward(x, w, b):
    """Same-padded 3x3 convolution, batch (N, H, W, Cin) -> (N, H, W, Cout)."""
    n, h, wd, _ = x.shape
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    out = np.broadcast_to(b, (n, h, wd, b.shape[0])).copy()
    for di in range(3):
        for dj in range(3):
            out += np.tensordot(padded[:, di : di + h, dj : dj + wd, :], w[di, dj], axes=([3], [0]))
    return out


def _conv3_backward(dout, x, w):
    """Gradients of _conv3_forward: returns (dx, dw, db)."""
    n, h, wd, _ = x.shape
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    dpadded = np.zeros_like(padded)
    dw = np.zeros_like(w)
    for di in range(3):
        for dj in range(3):
            patch = padded[:, di : di + h, dj : dj + wd, :]
            dw[di, dj] = np.tensordot(patch, dout, axes=([0, 1, 2], [0, 1, 2]))
            dpadded[:, di : di + h, dj : dj + wd, :] += np.tensordot(dout, w[di, dj], axes=([3], [1]))
    db = dout.sum(axis=(0, 1, 2))
    return dpadded[:, 1:-1, 1:-1, :], dw, db


def _meanpool2(x):
    n, h, w, c = x.shape
    return x.reshape(n, h // 2, 2, w // 2, 2, c).mean(axis=(2, 4))


def _meanpool2_backward(dout, in_shape):
    n, h, w, c = in_shape
    up = np.repeat(np.repeat(dout, 2, axis=1), 2, axis=2)
    return up / 4.0


class TinyClassifier(GradientOracle):
    """conv3x3 -> softplus -> meanpool2 -> conv3x3 -> softplus -> meanpool2 -> affine.

    Softplus and mean pooling keep every operation smooth, so finite
    differences check the backward pass cleanly; unlike an odd
    activation, softplus rectifies, so oriented texture energy survives
    the pooling stages.
    """

    def __init__(self, input_shape=(32, 32, 3), num_classes=4, width1=8, width2=16, seed=0):
        h, w, c = input_shape
        if h % 4 or w % 4:
            raise ValueError(f"input dimensions must be multiples of 4, got {input_shape}")
        self.input_shape = (h, w, c)
        self.num_classes = num_classes
        self.width1 = width1
        self.width2 = width2
        feat = (h // 4) * (w // 4) * width2
        rng = np.random.default_rng(seed)
        # small positive biases keep the rectifying units alive at init
        self.params = {
            "w1": rng.normal(0.0, 1.0 / np.sqrt(9 * c), (3, 3, c, width1)),
            "b1": np.full(width1, 0.1),
            "w2": rng.normal(0.0, 1.0 / np.sqrt(9 * width1), (3, 3, width1, width2)),
            "b2": np.full(width2, 0.1),
            "wf": rng.normal(0.0, 1.0 / np.sqrt(feat), (feat, num_classes)),
            "bf": np.zeros(num_classes),
        }

    PARAM_ORDER = ("w1", "b1", "w2", "b2", "wf", "bf")

    def forward_batch(self, xb):
        """Scores and the activation cache for a (N, H, W, C) batch."""
        p = self.params
        z0 = np.asarray(xb, dtype=np.float64) / PIXEL_SCALE - 0.5
        c1 = _conv3_forward(z0, p["w1"], p["b1"])
        a1 = softplus(c1)
        p1 = _meanpool2(a1)
        c2 = _conv3_forward(p1, p["w2"], p["b2"])
        a2 = softplus(c2)
        p2 = _meanpool2(a2)
        flat = p2.reshape(xb.shape[0], -1)
        scores = flat @ p["wf"] + p["bf"]
        return scores, (z0, c1, p1, c2, p2, flat)

    def backward_batch(self, dscores, cache):
        """Parameter gradients and the input gradient (in pixel units)."""
        p = self.params
        z0, c1, p1, c2, p2, flat = cache
        grads = {}
        grads["wf"] = flat.T @ dscores
        grads["bf"] = dscores.sum(axis=0)
        dflat = dscores @ p["wf"].T
        dp2 = dflat.reshape(p2.shape)
        dc2 = _meanpool2_backward(dp2, c2.shape) * sigmoid(c2)
        dp1, grads["w2"], grads["b2"] = _conv3_backward(dc2, p1, p["w2"])
        dc1 = _meanpool2_backward(dp1, c1.shape) * sigmoid(c1)
        dz0, grads["w1"], grads["b1"] = _conv3_backward(dc1, z0, p["w1"])
        return grads, dz0 / PIXEL_SCALE

    def scores(self, x):
        self._check(x)
        return self.forward_batch(np.asarray(x, dtype=np.float64)[None])[0][0]

    def scores_batch(self, xb):
        return self.forward_batch(xb)[0]

    def predict_batch(self, xb):
        return np.argmax(self.scores_batch(xb), axis=1)

    def loss_gradient(self, x, y):
        self._check(x)
        if not 0 <= y < self.num_classes:
            raise ValueError(f"label {y} out of range for {self.num_classes} classes")
        scores, cache = self.forward_batch(np.asarray(x, dtype=np.float64)[None])
        dscores = softmax(scores)
        dscores[0, y] -= 1.0
        _, dx = self.backward_batch(dscores, cache)
        return dx[0]

    def _check(self, x):
        if tuple(np.shape(x)) != self.input_shape:
            raise ValueError(f"expected input {self.input_shape}, got {np.shape(x)}")

    def clone(self):
        other = TinyClassifier(self.input_shape, self.num_classes, self.width1, self.width2)
        other.params = {k: v.copy() for k, v in self.params.items()}
        return other


@dataclass
class TrainResult:
    model: TinyClassifier
    epoch_losses: list = field(default_factory=list)
    train_accuracy: float = 0.0
    test_accuracy: float = 0.0


def accuracy(model, images, labels, batch_size=256):
    if len(images) == 0:
        return 0.0
    hits = 0
    for i in range(0, len(images), batch_size):
        pred = model.predict_batch(images[i : i + batch_size])
        hits += int(np.sum(pred == labels[i : i + batch_size]))
    return hits / len(images)


def train(model, data, epochs, learning_rate, seed, batch_size=32, beta1=0.9, beta2=0.999):
    """Minibatch Adam on softmax cross-entropy.

    Deterministic given the seed (initialization is the model's own; the
    seed here drives shuffling only). Raises TrainingDiverged on a
    non-finite loss.
    """
    xs, ys = data.subset("train")
    if len(xs) == 0:
        raise ValueError("empty training split")
    rng = np.random.default_rng(seed)
    eps = 1e-8
    m1 = {k: np.zeros_like(v) for k, v in model.params.items()}
    m2 = {k: np.zeros_like(v) for k, v in model.params.items()}
    step = 0
    result = TrainResult(model)
    for epoch in range(epochs):
        order = rng.permutation(len(xs))
        losses = []
        for i in range(0, len(order), batch_size):
            idx = order[i : i + batch_size]
            xb, yb = xs[idx], ys[idx]
            scores, cache = model.forward_batch(xb)
            logp = log_softmax(scores)
            loss = float(-logp[np.arange(len(idx)), yb].mean())
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss {loss} at epoch {epoch}, batch {i // batch_size}; "
                    f"reduce learning_rate={learning_rate}"
                )
            losses.append(loss)
            dscores = softmax(scores)
            dscores[np.arange(len(idx)), yb] -= 1.0
            dscores /= len(idx)
            grads, _ = model.backward_batch(dscores, cache)
            step += 1
            for k in model.params:
                m1[k] = beta1 * m1[k] + (1 - beta1) * grads[k]
                m2[k] = beta2 * m2[k] + (1 - beta2) * grads[k] ** 2
                mhat = m1[k] / (1 - beta1**step)
                vhat = m2[k] / (1 - beta2**step)
                model.params[k] -= learning_rate * mhat / (np.sqrt(vhat) + eps)
        result.epoch_losses.append(float(np.mean(losses)))
    result.train_accuracy = accuracy(model, xs, ys)
    tx, ty = data.subset("test")
    result.test_accuracy = accuracy(model, tx, ty) if len(tx) else float("nan")
    return result


def finite_diff_gradient(oracle, x, y, h=1e-3, coords=None):
    """Central-difference estimate of the loss gradient.

    `coords` restricts the estimate to the given flat indices (other
    entries are left at zero); None differences every coordinate.
    """
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    indices = range(flat.size) if coords is None else coords
    for i in indices:
        orig = flat[i]
        flat[i] = orig + h
        lp = oracle.loss(x, y)
        flat[i] = orig - h
        lm = oracle.loss(x, y)
        flat[i] = orig
        gflat[i] = (lp - lm) / (2.0 * h)
    return grad


def save_checkpoint(model, path):
    """Binary little-endian checkpoint: magic, version, architecture, arrays.

    Layout: 4-byte magic "JAOR", then <u32 fields (version, height,
    width, channels, width1, width2, num_classes), then the parameter
    arrays w1, b1, w2, b2, wf, bf as raw little-endian float64 in
    C order.
    """
    h, w, c = model.input_shape
    header = struct.pack(
        "<4s7I", CHECKPOINT_MAGIC, CHECKPOINT_VERSION, h, w, c,
        model.width1, model.width2, model.num_classes,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for name in TinyClassifier.PARAM_ORDER:
            fh.write(model.params[name].astype("<f8").tobytes(order="C"))


def load_checkpoint(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != CHECKPOINT_MAGIC:
        raise ValueError(f"bad checkpoint magic {blob[:4]!r}")
    version, h, w, c, w1, w2, k = struct.unpack("<7I", blob[4:32])
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    model = TinyClassifier((h, w, c), k, w1, w2)
    offset = 32
    for name in TinyClassifier.PARAM_ORDER:
        shape = model.params[name].shape
        count = int(np.prod(shape))
        end = offset + count * 8
        if end > len(blob):
            raise ValueError("checkpoint truncated")
        model.params[name] = np.frombuffer(blob[offset:end], dtype="<f8").reshape(shape).copy()
        offset = end
    if offset != len(blob):
        raise ValueError(f"checkpoint has {len(blob) - offset} trailing bytes")
    return model
