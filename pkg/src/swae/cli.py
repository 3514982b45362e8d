"""Command-line entry point.

Subcommands: train, generate, reconstruct, eval, latents, verify-ot.
All emitted files are deterministic functions of the config, inputs and
seed. Reals in CSV output carry 17 significant digits so they round-trip
to the exact float64 value.

Exit codes: 0 success, 2 config/usage error, 3 data error, 4 numeric
abort, 5 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig, read_run_config
from .data import Dataset, split
from .errors import ConfigError, DataError, NumericError, SwaeError
from .evaluate import (denoise_report, generation_quality, knn_accuracy,
                       local_structure_spearman, reconstruction_error)
from .model import SwaeModel, decode, encode, sample_prior
from .nn import make_rng
from .ot import verify_theorem1
from .trainer import train

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_VERIFY = 5

TILES_PER_ROW = 5
EVAL_METRICS = ("knn", "local", "recon", "denoise", "genquality")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _append_csv_rows(path, header: str, rows: list[str]) -> None:
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8", newline="") as f:
        if fresh:
            f.write(header + "\n")
        for row in rows:
            f.write(row + "\n")


def _image_side(dim_x: int) -> int:
    side = math.isqrt(dim_x)
    if side * side != dim_x:
        raise DataError(f"dim_x={dim_x} is not a square image size")
    return side


def _tile_grid(samples: np.ndarray, side: int) -> np.ndarray:
    """Pack flattened [0,1] samples into a grid raster, 5 tiles per row."""
    n = samples.shape[0]
    cols = min(n, TILES_PER_ROW)
    rows = (n + cols - 1) // cols
    raster = np.zeros((rows * side, cols * side))
    for k in range(n):
        r, c = divmod(k, cols)
        tile = samples[k].reshape(side, side)
        raster[r * side:(r + 1) * side, c * side:(c + 1) * side] = tile
    return raster


def _write_pgm(path, raster: np.ndarray) -> None:
    height, width = raster.shape
    pixels = np.rint(255.0 * np.clip(raster, 0.0, 1.0)).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(pixels.tobytes())


def _samples_csv(samples: np.ndarray) -> str:
    return "".join(",".join(_fmt(v) for v in row) + "\n" for row in samples)


def cmd_train(config_path) -> int:
    cfg = read_run_config(config_path)
    dataset = cfg.load_dataset()
    train_cfg = cfg.train_config(dim_x=dataset.dim)
    model, log = train(dataset, train_cfg)
    out_dir = cfg.resolved_output_dir()
    os.makedirs(out_dir, exist_ok=True)
    save_checkpoint(model, os.path.join(out_dir, "model.ckpt"))
    lines = ["epoch,x_loss,recon_loss,z_loss,total"]
    for epoch, bd in enumerate(log.epochs, start=1):
        lines.append(f"{epoch},{_fmt(bd.x_loss)},{_fmt(bd.recon_loss)},"
                     f"{_fmt(bd.z_loss)},{_fmt(bd.total)}")
    _write_text(os.path.join(out_dir, "metrics.csv"),
                "\n".join(lines) + "\n")
    print(f"trained {log.steps} steps; wrote {out_dir}/model.ckpt "
          f"and {out_dir}/metrics.csv")
    return EXIT_OK


def _is_image_model(model: SwaeModel) -> bool:
    return model.dec_spec.activations[-1] == "sigmoid"


def cmd_generate(ckpt, n: int, seed: int, out) -> int:
    model = load_checkpoint(ckpt)
    z = sample_prior(model, make_rng(seed), n=n)
    samples = decode(model, z)
    if _is_image_model(model):
        _write_pgm(out, _tile_grid(samples, _image_side(model.dim_x)))
    else:
        _write_text(out, _samples_csv(samples))
    print(f"wrote {n} generated samples to {out}")
    return EXIT_OK


def cmd_reconstruct(ckpt, config_path, n: int, out) -> int:
    model = load_checkpoint(ckpt)
    dataset = read_run_config(config_path).load_dataset()
    if dataset.dim != model.dim_x:
        raise DataError(f"dataset width {dataset.dim} does not match "
                        f"model dim_x {model.dim_x}")
    n = min(n, dataset.n_samples)
    originals = dataset.features[:n]
    recons = decode(model, encode(model, originals))
    if _is_image_model(model):
        side = _image_side(model.dim_x)
        # one sample per grid row: original tile, then its reconstruction
        paired = np.stack([originals, recons], axis=1).reshape(2 * n, -1)
        raster = np.zeros((n * side, 2 * side))
        for k in range(n):
            raster[k * side:(k + 1) * side, :side] = \
                paired[2 * k].reshape(side, side)
            raster[k * side:(k + 1) * side, side:] = \
                paired[2 * k + 1].reshape(side, side)
        _write_pgm(out, raster)
    else:
        _write_text(out, _samples_csv(
            np.concatenate([originals, recons], axis=1)))
    print(f"wrote {n} original/reconstruction pairs to {out}")
    return EXIT_OK


def _eval_rows(model: SwaeModel, dataset: Dataset, cfg: RunConfig,
               args) -> list[tuple[str, float, int, str]]:
    """Returns (metric, value, n, k_or_sigma) rows for the chosen metric."""
    if args.metric == "knn":
        if dataset.labels is None:
            raise DataError("knn evaluation needs labels")
        tr, te = split(dataset, (0.8, 0.2), cfg.seed)
        acc = knn_accuracy(encode(model, tr.features), tr.labels,
                           encode(model, te.features), te.labels, k=args.k)
        return [("knn", acc, te.n_samples, str(args.k))]
    if args.metric == "local":
        rho = local_structure_spearman(dataset.features,
                                       encode(model, dataset.features),
                                       target_index=args.target)
        return [("local", rho, dataset.n_samples, "")]
    if args.metric == "recon":
        return [("recon", reconstruction_error(model, dataset),
                 dataset.n_samples, "")]
    if args.metric == "denoise":
        rep = denoise_report(model, dataset, sigma=args.sigma, seed=cfg.seed)
        return [("denoise_noisy_mse", rep.mse_noisy_to_clean,
                 dataset.n_samples, _fmt(args.sigma)),
                ("denoise_recon_mse", rep.mse_recon_to_clean,
                 dataset.n_samples, _fmt(args.sigma))]
    # genquality: compare against a seeded held-out subset of equal size
    n_gen = args.n_gen if args.n_gen else min(500, dataset.n_samples)
    if n_gen > dataset.n_samples:
        raise ConfigError(f"n_gen={n_gen} exceeds dataset size")
    held_idx = make_rng(cfg.seed).choice(dataset.n_samples, size=n_gen,
                                         replace=False)
    value = generation_quality(model, Dataset(dataset.features[held_idx]),
                               n_gen=n_gen, seed=cfg.seed, p=2)
    return [("genquality", value, n_gen, "")]


def cmd_eval(ckpt, config_path, args) -> int:
    model = load_checkpoint(ckpt)
    cfg = read_run_config(config_path)
    dataset = cfg.load_dataset()
    if dataset.dim != model.dim_x:
        raise DataError(f"dataset width {dataset.dim} does not match "
                        f"model dim_x {model.dim_x}")
    rows = [f"{metric},{_fmt(value)},{n},{cfg.seed},{extra}"
            for metric, value, n, extra in _eval_rows(model, dataset,
                                                      cfg, args)]
    _append_csv_rows(args.out, "metric,value,n,seed,k_or_sigma", rows)
    for row in rows:
        print(row)
    return EXIT_OK


def cmd_latents(ckpt, config_path, out) -> int:
    model = load_checkpoint(ckpt)
    dataset = read_run_config(config_path).load_dataset()
    if dataset.dim != model.dim_x:
        raise DataError("dataset width does not match the model")
    z = encode(model, dataset.features)
    header = ",".join(f"z{i}" for i in range(model.dim_z)) + ",label"
    lines = [header]
    for i, row in enumerate(z):
        label = str(int(dataset.labels[i])) if dataset.labels is not None \
            else ""
        lines.append(",".join(_fmt(v) for v in row) + "," + label)
    _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote {z.shape[0]} latent rows to {out}")
    return EXIT_OK


def cmd_verify_ot(n: int, dim_x: int, dim_z: int, trials: int, seed: int,
                  perturb: float, tol: float = 1e-9) -> int:
    rng = make_rng(seed)
    max_gap = 0.0
    for _ in range(trials):
        n_i = int(rng.integers(1, n + 1))
        dx = int(rng.integers(1, dim_x + 1))
        dz = int(rng.integers(1, dim_z + 1))
        x_atoms = rng.standard_normal((n_i, dx))
        z_atoms = rng.standard_normal((n_i, dz))
        enc_mat = rng.standard_normal((dz, dx))
        dec_mat = rng.standard_normal((dx, dz))
        _, _, gap = verify_theorem1(
            x_atoms, z_atoms,
            encode_fn=lambda x, m=enc_mat: x @ m.T,
            decode_fn=lambda z, m=dec_mat: z @ m.T,
            p=2, joint_perturbation=perturb)
        max_gap = max(max_gap, gap)
    ok = max_gap < tol
    print(f"verify-ot: trials={trials} max_gap={max_gap:.3e} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swae", description="Train, sample and evaluate a symmetric "
        "Wasserstein autoencoder; verify its transport-cost decomposition.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a config file")
    p.add_argument("--config", required=True)

    p = sub.add_parser("generate", help="decode fresh prior samples")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("reconstruct",
                       help="emit original/reconstruction pairs")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="append one metric row to a CSV")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--metric", required=True, choices=EVAL_METRICS)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--n-gen", type=int, default=0)

    p = sub.add_parser("latents", help="export encoded latents as CSV")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify-ot", help="check the joint-vs-decomposed "
                       "transport cost equality on random instances")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--dim-x", type=int, default=4)
    p.add_argument("--dim-z", type=int, default=2)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb", type=float, default=0.0,
                   help="test hook: offset added to one joint-cost entry")

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "train":
            return cmd_train(args.config)
        if args.command == "generate":
            return cmd_generate(args.ckpt, args.n, args.seed, args.out)
        if args.command == "reconstruct":
            return cmd_reconstruct(args.ckpt, args.config, args.n, args.out)
        if args.command == "eval":
            return cmd_eval(args.ckpt, args.config, args)
        if args.command == "latents":
            return cmd_latents(args.ckpt, args.config, args.out)
        return cmd_verify_ot(args.n, args.dim_x, args.dim_z, args.trials,
                             args.seed, args.perturb)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SwaeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> int:
    return main()
