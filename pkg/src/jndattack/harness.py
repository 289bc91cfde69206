"""Transfer-attack evaluation: generate on a substitute, score on victims.

The protocol: keep only images every victim classifies correctly,
attack each one through the substitute oracle, then report per-victim
attack success rates (victim label != ground truth) together with mean
image quality against the clean originals. JND maps depend only on the
clean image, so they are cached across configs. Per-image seeds are
derived from (config seed, image index) so runs are byte-reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, run_attack
from .dct import dct_basis
from .iqa import score_pair
from .jnd_frequency import frequency_jnd
from .jnd_spatial import spatial_jnd
from .tensor_io import to_grayscale

CSV_HEADER = "method,mode,param,victim,asr,psnr,ssim,msssim3,n"


@dataclass
class AsrReport:
    method: str
    mode: str
    param: float  # the active budget (epsilon, alpha0, or beta0)
    victim_asr: dict  # victim name -> success fraction
    avg_asr: float
    mean_psnr: float
    mean_ssim: float
    mean_msssim3: float
    n: int
    config: AttackConfig = field(repr=False, default=None)


def filter_dataset(images, labels, victims):
    """Indices of samples every victim classifies correctly."""
    keep = np.ones(len(images), dtype=bool)
    for model in victims.values():
        pred = model.predict_batch(images)
        keep &= pred == labels
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        raise ValueError("no sample is correctly classified by all victims")
    return idx


def derive_seed(base_seed, index):
    """Stable per-image attack seed."""
    return int(np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)[0])


class JndCache:
    """Clean-image JND maps, keyed by image index (and block size for fsa)."""

    def __init__(self, images):
        self.images = images
        self.spatial = {}
        self.freq = {}

    def spatial_map(self, i):
        if i not in self.spatial:
            self.spatial[i] = spatial_jnd(to_grayscale(self.images[i]))
        return self.spatial[i]

    def freq_map(self, i, block_size):
        key = (i, block_size)
        if key not in self.freq:
            self.freq[key] = frequency_jnd(to_grayscale(self.images[i]), dct_basis(block_size))
        return self.freq[key]

    def map_for(self, cfg, i):
        if cfg.mode == "ssa":
            return self.spatial_map(i)
        if cfg.mode == "fsa":
            return self.freq_map(i, cfg.block_size)
        return None


def run_experiment(cfgs, substitute, victims, images, labels, indices=None, cache=None):
    """Attack every (filtered) image per config; one AsrReport per config.

    `victims` maps name -> oracle. `indices` selects the filtered subset
    (defaults to all rows). A shared JndCache avoids recomputing
    clean-image maps across configs.
    """
    if indices is None:
        indices = np.arange(len(images))
    if len(indices) == 0:
        raise ValueError("empty filtered dataset")
    cache = cache if cache is not None else JndCache(images)
    names = list(victims)
    reports = []
    for cfg in cfgs:
        hits = {name: 0 for name in names}
        psnrs, ssims, msssims = [], [], []
        for i in indices:
            x = images[i]
            y = int(labels[i])
            per_image = cfg.with_seed(derive_seed(cfg.seed, i))
            result = run_attack(substitute, x, y, per_image, jnd_map=cache.map_for(cfg, i))
            for name in names:
                if victims[name].predict(result.adversarial) != y:
                    hits[name] += 1
            score = score_pair(x, result.adversarial)
            psnrs.append(score.psnr)
            ssims.append(score.ssim)
            msssims.append(score.ms_ssim3)
        n = len(indices)
        victim_asr = {name: hits[name] / n for name in names}
        reports.append(
            AsrReport(
                method=cfg.method,
                mode=cfg.mode,
                param=cfg.budget,
                victim_asr=victim_asr,
                avg_asr=float(np.mean(list(victim_asr.values()))),
                mean_psnr=float(np.mean(psnrs)),
                mean_ssim=float(np.mean(ssims)),
                mean_msssim3=float(np.mean(msssims)),
                n=n,
                config=cfg,
            )
        )
    return reports


def sweep(mode_grids, base_cfg, substitute, victims, images, labels, indices=None):
    """run_experiment over budget grids, one config per (mode, budget) point.

    `mode_grids` is a list of (mode, [budget, ...]) pairs; grid order is
    preserved in the returned reports.
    """
    cfgs = []
    for mode, budgets in mode_grids:
        for value in budgets:
            kwargs = {"uniform": "epsilon", "ssa": "alpha0", "fsa": "beta0"}[mode]
            cfgs.append(
                AttackConfig(
                    method=base_cfg.method,
                    mode=mode,
                    iterations=base_cfg.iterations,
                    mu=base_cfg.mu,
                    p=base_cfg.p,
                    seed=base_cfg.seed,
                    block_size=base_cfg.block_size,
                    **{kwargs: value},
                )
            )
    return run_experiment(cfgs, substitute, victims, images, labels, indices=indices)


def _fmt(value):
    return repr(float(value))


def report_rows(report):
    """CSV rows for one report: one per victim plus the avg row."""
    rows = []
    prefix = f"{report.method},{report.mode},{_fmt(report.param)}"
    stats = f"{_fmt(report.mean_psnr)},{_fmt(report.mean_ssim)},{_fmt(report.mean_msssim3)},{report.n}"
    for name, asr in report.victim_asr.items():
        rows.append(f"{prefix},{name},{_fmt(asr)},{stats}")
    rows.append(f"{prefix},avg,{_fmt(report.avg_asr)},{stats}")
    return rows


def emit_report(reports, path):
    """Write the CSV summary; floats use shortest round-trip formatting."""
    lines = [CSV_HEADER]
    for report in reports:
        lines.extend(report_rows(report))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_tradeoff(reports, path):
    """Gnuplot-friendly budget/ASR/quality columns, one block per mode."""
    lines = ["# mode method budget avg_asr mean_ssim mean_psnr"]
    last_mode = None
    for report in reports:
        if last_mode is not None and report.mode != last_mode:
            lines.append("")  # blank line separates gnuplot datasets
        last_mode = report.mode
        lines.append(
            f"{report.mode} {report.method} {_fmt(report.param)} "
            f"{_fmt(report.avg_asr)} {_fmt(report.mean_ssim)} {_fmt(report.mean_psnr)}"
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_experiment_config(path):
    """Flat key-value experiment description.

    One `key = value` pair per line; `#` starts a comment. `victim` may
    repeat. Each `attack` line holds space-separated key=value tokens
    matching AttackConfig fields (T is an alias for iterations).
    Returns a plain dict with keys: dataset_seed, dataset_size,
    train_fraction, substitute, victims, report, tradeoff, attacks.
    """
    spec = {
        "dataset_seed": 0,
        "dataset_size": 200,
        "train_fraction": 0.5,
        "substitute": None,
        "victims": [],
        "report": "report.csv",
        "tradeoff": None,
        "attacks": [],
    }
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in ("dataset_seed", "dataset_size"):
                spec[key] = int(value)
            elif key == "train_fraction":
                spec[key] = float(value)
            elif key == "substitute":
                spec[key] = value
            elif key == "victim":
                spec["victims"].append(value)
            elif key in ("report", "tradeoff"):
                spec[key] = value
            elif key == "attack":
                spec["attacks"].append(parse_attack_line(value))
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    if spec["substitute"] is None:
        raise ValueError(f"{path}: missing substitute checkpoint")
    if not spec["victims"]:
        raise ValueError(f"{path}: at least one victim checkpoint required")
    if not spec["attacks"]:
        raise ValueError(f"{path}: no attack lines")
    return spec


def parse_attack_line(text):
    """`method=fgsm mode=ssa alpha0=2.2 T=10 seed=1` -> AttackConfig."""
    fields = {}
    for token in text.split():
        if "=" not in token:
            raise ValueError(f"bad attack token {token!r}")
        key, value = token.split("=", 1)
        if key == "T":
            key = "iterations"
        if key in ("method", "mode"):
            fields[key] = value
        elif key in ("iterations", "seed", "block_size"):
            fields[key] = int(value)
        elif key in ("epsilon", "alpha0", "beta0", "mu", "p"):
            fields[key] = float(value)
        else:
            raise ValueError(f"unknown attack field {key!r}")
    return AttackConfig(**fields)
