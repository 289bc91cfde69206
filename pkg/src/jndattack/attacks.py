"""Gradient attacks with uniform, spatial-JND, and frequency-JND budgets.

Three gradient estimators (fgsm: raw gradient; mim: momentum-accumulated
L1-normalized gradient; dim: gradient at a stochastically resized copy)
plug into three budget modes. The uniform and spatial modes step pixels
by sign(gradient) scaled per pixel; the frequency mode steps DCT
coefficients by the transported gradient, normalized to unit max so the
per-coefficient budget is an enforceable bound, and returns to pixel
space each iteration.

Iteration stops early once the substitute model misclassifies; every
step clamps pixels to [0, 255]. All randomness comes from the config
seed, so results are bit-reproducible.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dct import BlockSpectrum, block_dct, block_idct, dct_basis, grad_to_freq
from .jnd_frequency import frequency_jnd
from .jnd_spatial import spatial_jnd
from .tensor_io import to_grayscale

METHODS = ("fgsm", "mim", "dim")
MODES = ("uniform", "ssa", "fsa")

MIM_NORM_FLOOR = 1e-12
FREQ_NORM_FLOOR = 1e-12


@dataclass
class AttackConfig:
    method: str = "fgsm"
    mode: str = "uniform"
    epsilon: float = 14.0  # uniform budget, intensity units
    alpha0: float = 2.2  # spatial JND scale, >= 1
    beta0: float = 2.0  # frequency JND scale, > 0
    iterations: int = 10  # T
    mu: float = 1.0  # momentum decay (mim)
    p: float = 0.7  # transform probability (dim)
    seed: int = 0
    block_size: int = 8

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if self.mode == "uniform" and self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.mode == "ssa" and self.alpha0 < 1.0:
            raise ValueError(f"alpha0 must be >= 1, got {self.alpha0}")
        if self.mode == "fsa" and self.beta0 < 0.0:
            raise ValueError(f"beta0 must be >= 0, got {self.beta0}")

    @property
    def budget(self):
        """The active budget scalar for this mode."""
        return {"uniform": self.epsilon, "ssa": self.alpha0, "fsa": self.beta0}[self.mode]

    def with_seed(self, seed):
        return replace(self, seed=seed)


@dataclass
class AttackResult:
    adversarial: np.ndarray
    iterations_used: int
    substitute_fooled: bool
    perturbation: np.ndarray  # adversarial - clean, exactly
    spectrum: Optional[BlockSpectrum] = None  # fsa: final pre-clamp DCT state


def fgsm_gradient(oracle, x, y):
    """Raw loss gradient; sign and scaling are the loop's business."""
    return oracle.loss_gradient(x, y)


def mim_gradient(state, oracle, x, y, mu):
    """One momentum update: g' = mu * g + grad / ||grad||_1.

    `state` is the accumulated gradient from the previous step (None at
    t=0). A vanishing gradient contributes zero instead of dividing by
    a near-zero norm. Returns (gradient, new state).
    """
    raw = oracle.loss_gradient(x, y)
    norm = np.abs(raw).sum()
    term = raw / norm if norm >= MIM_NORM_FLOOR else np.zeros_like(raw)
    g = term if state is None else mu * state + term
    return g, g


def dim_transform(x, p, rng):
    """With probability p, randomly resize each dimension by a factor in
    [0.9, 1.1] and replicate-pad / crop back at a random offset;
    otherwise return the image unchanged. `rng` may be a seed."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    x = np.asarray(x, dtype=np.float64)
    if rng.random() >= p:
        return x.copy()
    from .imgproc import resize_bilinear

    h, w = x.shape[:2]
    nh = max(1, int(round(h * rng.uniform(0.9, 1.1))))
    nw = max(1, int(round(w * rng.uniform(0.9, 1.1))))
    out = resize_bilinear(x, nh, nw)
    # rows then columns: crop a random window or replicate-pad at a random offset
    if nh > h:
        oy = int(rng.integers(0, nh - h + 1))
        out = out[oy : oy + h]
    elif nh < h:
        ty = int(rng.integers(0, h - nh + 1))
        out = np.pad(out, ((ty, h - nh - ty), (0, 0), (0, 0)), mode="edge")
    if nw > w:
        ox = int(rng.integers(0, nw - w + 1))
        out = out[:, ox : ox + w]
    elif nw < w:
        tx = int(rng.integers(0, w - nw + 1))
        out = np.pad(out, ((0, 0), (tx, w - nw - tx), (0, 0)), mode="edge")
    return out


def _make_estimator(cfg, oracle):
    if cfg.method == "fgsm":
        return lambda x, y: fgsm_gradient(oracle, x, y)
    if cfg.method == "mim":
        state = [None]

        def mim_est(x, y):
            g, state[0] = mim_gradient(state[0], oracle, x, y, cfg.mu)
            return g

        return mim_est
    rng = np.random.default_rng(cfg.seed)
    return lambda x, y: oracle.loss_gradient(dim_transform(x, cfg.p, rng), y)


def _spatial_loop(oracle, x, y, cfg, budget):
    """Shared sign-step loop; `budget` is the per-pixel total bound."""
    step = budget / cfg.iterations
    estimate = _make_estimator(cfg, oracle)
    clean = np.asarray(x, dtype=np.float64)
    adv = clean.copy()
    t = 0
    fooled = oracle.predict(adv) != y
    while t < cfg.iterations and not fooled:
        g = estimate(adv, y)
        adv = np.clip(adv + step * np.sign(g), 0.0, 255.0)
        t += 1
        fooled = oracle.predict(adv) != y
    return AttackResult(adv, t, bool(fooled), adv - clean)


def uniform_attack(oracle, x, y, cfg):
    """Iterative sign attack under a uniform epsilon bound (one step = FGSM)."""
    budget = np.full(np.shape(x), cfg.epsilon, dtype=np.float64)
    return _spatial_loop(oracle, x, y, cfg, budget)


def ssa_attack(oracle, x, y, cfg, jnd_map=None):
    """Spatial structure-aware attack: per-pixel budgets alpha0 * JND.

    The spatial JND map comes from the grayscale clean image, once,
    and is replicated across channels. `jnd_map` injects a precomputed
    (or deliberately altered) map.
    """
    x = np.asarray(x, dtype=np.float64)
    if jnd_map is None:
        jnd_map = spatial_jnd(to_grayscale(x))
    budget = cfg.alpha0 * np.repeat(jnd_map[:, :, None], x.shape[2], axis=2)
    return _spatial_loop(oracle, x, y, cfg, budget)


def fsa_attack(oracle, x, y, cfg, jnd_map=None):
    """Frequency structure-aware attack in the blockwise DCT domain.

    Thresholds come from the clean grayscale spectrum, replicated per
    channel. Each iteration transports the spatial gradient to the DCT
    domain, normalizes it by its global max magnitude (so beta0 is a
    dimensionless budget multiplier and |X* - X| <= beta0 * JND_f is
    enforced pre-clamp), steps the running spectrum, and re-derives the
    clamped pixel image. A vanishing gradient skips the step but still
    counts the iteration.
    """
    x = np.asarray(x, dtype=np.float64)
    basis = dct_basis(cfg.block_size)
    if jnd_map is None:
        jnd_map = frequency_jnd(to_grayscale(x), basis)
    step = cfg.beta0 * np.repeat(jnd_map.thresholds[:, :, None], x.shape[2], axis=2)
    step /= cfg.iterations
    spec = block_dct(x, basis)
    estimate = _make_estimator(cfg, oracle)
    adv = x.copy()
    t = 0
    fooled = oracle.predict(adv) != y
    stepping = bool(np.any(step != 0.0))
    while t < cfg.iterations and not fooled:
        g = estimate(adv, y)
        gf = grad_to_freq(g, basis)
        peak = np.abs(gf.coeffs).max()
        # a vanished gradient (or beta0 = 0) leaves the image untouched
        # rather than round-tripping it through the transform
        if peak > FREQ_NORM_FLOOR and stepping:
            spec.coeffs += step * (gf.coeffs / peak)
            adv = np.clip(block_idct(spec, basis), 0.0, 255.0)
        t += 1
        fooled = oracle.predict(adv) != y
    return AttackResult(adv, t, bool(fooled), adv - x, spectrum=spec)


def run_attack(oracle, x, y, cfg, jnd_map=None):
    """Dispatch on cfg.mode; jnd_map is forwarded to the JND modes."""
    if cfg.mode == "uniform":
        return uniform_attack(oracle, x, y, cfg)
    if cfg.mode == "ssa":
        return ssa_attack(oracle, x, y, cfg, jnd_map=jnd_map)
    return fsa_attack(oracle, x, y, cfg, jnd_map=jnd_map)
