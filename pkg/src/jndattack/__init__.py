"""Perceptually-constrained adversarial image generation.

Perturbation budgets come from just-noticeable-difference models: a
spatial map built from texture masking and luminance adaptation, and a
per-coefficient DCT-domain map built from contrast sensitivity and
contrast masking. Budget-shaped variants of standard gradient attacks
(fgsm/mim/dim) trade imperceptibility against transfer success.
"""

from .attacks import (
    AttackConfig,
    AttackResult,
    dim_transform,
    fgsm_gradient,
    fsa_attack,
    mim_gradient,
    run_attack,
    ssa_attack,
    uniform_attack,
)
from .data import Dataset, make_toy_dataset
from .dct import BlockSpectrum, block_dct, block_idct, dct_basis, grad_to_freq, grad_to_freq_kron
from .iqa import IqaScore, ms_ssim3, psnr, score_pair, ssim
from .jnd_frequency import JndMapF, contrast_masking, csf_base_threshold, frequency_jnd
from .jnd_spatial import luminance_adaptation, spatial_jnd, texture_masking
from .kernels import BACKEND
from .oracle import (
    GradientOracle,
    LinearClassifier,
    TinyClassifier,
    finite_diff_gradient,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .tensor_io import clamp, load_pnm, save_pnm, to_grayscale

__version__ = "0.1.0"
