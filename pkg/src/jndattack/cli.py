"""Command-line front end.

Subcommands: jnd-map, train-oracle, attack, evaluate, experiment.
Images are PGM/PPM files with maxval 255; see the README for the
experiment config format.
"""

import argparse
import sys

import numpy as np

from . import harness
from .attacks import AttackConfig, run_attack
from .data import make_toy_dataset
from .dct import dct_basis
from .iqa import score_pair
from .jnd_frequency import frequency_jnd
from .jnd_spatial import spatial_jnd
from .oracle import TinyClassifier, load_checkpoint, save_checkpoint, train
from .tensor_io import clamp, load_pnm, save_pnm, to_grayscale


def _cmd_jnd_map(args):
    img = load_pnm(args.input)
    gray = to_grayscale(img)
    if args.mode == "spatial":
        jnd = spatial_jnd(gray)
        if args.out_pgm:
            save_pnm(clamp(jnd * args.scale)[:, :, None], args.out_pgm)
        if args.out_csv:
            with open(args.out_csv, "w", encoding="ascii") as fh:
                fh.write("row,col,jnd\n")
                for i in range(jnd.shape[0]):
                    for j in range(jnd.shape[1]):
                        fh.write(f"{i},{j},{float(jnd[i, j])!r}\n")
    else:
        jmap = frequency_jnd(gray, dct_basis(args.block_size))
        out = args.out_csv or args.out_pgm
        if not out:
            raise SystemExit("frequency mode requires --out-csv")
        b = jmap.block_size
        with open(out, "w", encoding="ascii") as fh:
            fh.write("block_row,block_col,u,v,threshold\n")
            for bi in range(jmap.blocks_y):
                for bj in range(jmap.blocks_x):
                    for u in range(b):
                        for v in range(b):
                            t = float(jmap.thresholds[bi * b + u, bj * b + v])
                            fh.write(f"{bi},{bj},{u},{v},{t!r}\n")
    return 0


def _cmd_train_oracle(args):
    data = make_toy_dataset(
        args.dataset_size, args.dataset_seed, size=args.image_size,
        num_classes=args.num_classes, train_fraction=args.train_fraction,
    )
    model = TinyClassifier(
        data.input_shape, args.num_classes, width1=args.width1,
        width2=args.width2, seed=args.seed,
    )
    result = train(model, data, args.epochs, args.lr, seed=args.seed)
    save_checkpoint(model, args.out)
    print(
        f"trained {args.epochs} epochs: train_acc={result.train_accuracy:.4f} "
        f"test_acc={result.test_accuracy:.4f} -> {args.out}"
    )
    return 0


def _cmd_attack(args):
    oracle = load_checkpoint(args.oracle)
    x = load_pnm(args.input)
    cfg = AttackConfig(
        method=args.method, mode=args.mode, epsilon=args.epsilon,
        alpha0=args.alpha0, beta0=args.beta0, iterations=args.T,
        mu=args.mu, p=args.p, seed=args.seed,
    )
    result = run_attack(oracle, x, int(args.label), cfg)
    save_pnm(result.adversarial, args.out)
    if args.residue:
        # signed residue shifted to mid-gray for viewing
        save_pnm(clamp(result.perturbation + 128.0), args.residue)
    print(
        f"fooled={result.substitute_fooled} iterations={result.iterations_used} "
        f"linf={np.abs(result.perturbation).max():.3f}"
    )
    return 0


def _cmd_evaluate(args):
    ref = load_pnm(args.ref)
    test = load_pnm(args.test)
    score = score_pair(ref, test)
    print(f"{score.psnr!r},{score.ssim!r},{score.ms_ssim3!r}")
    return 0


def _cmd_experiment(args):
    spec = harness.parse_experiment_config(args.config)
    substitute = load_checkpoint(spec["substitute"])
    victims = {f"victim{i + 1}": load_checkpoint(p) for i, p in enumerate(spec["victims"])}
    data = make_toy_dataset(
        spec["dataset_size"], spec["dataset_seed"], train_fraction=spec["train_fraction"]
    )
    images, labels = data.subset("test")
    indices = harness.filter_dataset(images, labels, victims)
    reports = harness.run_experiment(
        spec["attacks"], substitute, victims, images, labels, indices=indices
    )
    harness.emit_report(reports, spec["report"])
    if spec["tradeoff"]:
        harness.emit_tradeoff(reports, spec["tradeoff"])
    for report in reports:
        print(
            f"{report.method}/{report.mode} param={report.param:g}: "
            f"avg_asr={report.avg_asr:.4f} ssim={report.mean_ssim:.4f} n={report.n}"
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="jndattack")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jnd-map", help="compute a JND map from an image")
    p.add_argument("--mode", choices=["spatial", "frequency"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-pgm", default=None, help="visualization (spatial mode)")
    p.add_argument("--out-csv", default=None, help="exact values")
    p.add_argument("--scale", type=float, default=4.0, help="PGM display gain")
    p.add_argument("--block-size", type=int, default=8)
    p.set_defaults(func=_cmd_jnd_map)

    p = sub.add_parser("train-oracle", help="train a classifier on the toy dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--out", required=True)
    p.add_argument("--dataset-seed", type=int, default=0)
    p.add_argument("--dataset-size", type=int, default=400)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--image-size", type=int, default=32)
    p.add_argument("--num-classes", type=int, default=4)
    p.add_argument("--width1", type=int, default=8)
    p.add_argument("--width2", type=int, default=16)
    p.add_argument("--lr", type=float, default=0.05)
    p.set_defaults(func=_cmd_train_oracle)

    p = sub.add_parser("attack", help="attack one image")
    p.add_argument("--method", choices=["fgsm", "mim", "dim"], default="fgsm")
    p.add_argument("--mode", choices=["uniform", "ssa", "fsa"], default="uniform")
    p.add_argument("--epsilon", type=float, default=14.0)
    p.add_argument("--alpha0", type=float, default=2.2)
    p.add_argument("--beta0", type=float, default=2.0)
    p.add_argument("--T", type=int, default=10)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", required=True, help="substitute checkpoint")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--label", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--residue", default=None)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("evaluate", help="print psnr,ssim,msssim3 for an image pair")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("experiment", help="run a full transfer evaluation")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
