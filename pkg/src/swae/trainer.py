"""Minibatch training loop.

Each step: draw the next batch of the epoch's seeded permutation, match
every sample to its nearest pseudo-input (squared L2 in data space, or in
latent space as a cheaper approximation), sample the matched conditional
priors with fresh noise, then take one Adam step on the full parameter
set (encoder, decoder, prior net, pseudo-inputs).

Convergence is realized as a fixed epoch budget so runs are reproducible:
the same dataset, config and build give bitwise-identical models.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DimensionError, NumericError
from .model import SwaeModel, build_model, encode
from .nn import AdamState, adam_step, make_rng
from .objective import LossBreakdown, LossWeights, swae_grad

NEAREST_MODES = ("data", "latent")


@dataclass(frozen=True)
class TrainConfig:
    dim_x: int
    dim_z: int = 2
    beta: float = 1.0
    alpha: float = 1.0
    k_pseudo: int = 50
    hidden: tuple[int, ...] = (256, 256)
    batch_size: int = 100
    epochs: int = 150
    lr: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    nearest_mode: str = "data"
    decoder_activation: str = "identity"

    def __post_init__(self):
        if self.k_pseudo < 1:
            raise ValueError("k_pseudo must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.nearest_mode not in NEAREST_MODES:
            raise ValueError(f"nearest_mode must be one of {NEAREST_MODES}")
        self.weights()  # validates beta/alpha ranges

    def weights(self) -> LossWeights:
        return LossWeights(beta=self.beta, alpha=self.alpha)


@dataclass
class TrainLog:
    """Per-epoch averages of the loss terms plus run bookkeeping.

    Wall-clock duration is informational only and excluded from the
    determinism contract.
    """

    epochs: list[LossBreakdown] = field(default_factory=list)
    steps: int = 0
    duration_seconds: float = 0.0


def nearest_pseudo_inputs(x: np.ndarray, model: SwaeModel,
                          mode: str = "data") -> np.ndarray:
    """Index of the closest pseudo-input for each row of x (squared L2).

    ``mode="latent"`` compares encodings instead of raw vectors; the
    pseudo-input bank is encoded once per call. Ties go to the lowest
    index.
    """
    if mode not in NEAREST_MODES:
        raise ValueError(f"mode must be one of {NEAREST_MODES}")
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.dim_x:
        raise DimensionError(f"x must have width {model.dim_x}")
    if mode == "latent":
        a = encode(model, x)
        b = encode(model, model.pseudo_inputs)
    else:
        a = x
        b = model.pseudo_inputs
    sq = (np.sum(a * a, axis=1)[:, None] - 2.0 * (a @ b.T)
          + np.sum(b * b, axis=1)[None, :])
    return np.argmin(sq, axis=1)


def nearest_pseudo_input(x: np.ndarray, model: SwaeModel,
                         mode: str = "data") -> int:
    """Single-sample form of :func:`nearest_pseudo_inputs`."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("expected a single sample vector")
    return int(nearest_pseudo_inputs(x[None, :], model, mode)[0])


def init_model(dataset: Dataset, config: TrainConfig,
               rng: np.random.Generator | None = None) -> SwaeModel:
    """Fresh model for a dataset: pseudo-inputs are k_pseudo training rows
    drawn uniformly without replacement, then the three MLPs are
    initialized, all from the run seed."""
    if rng is None:
        rng = make_rng(config.seed)
    n = dataset.n_samples
    if dataset.dim != config.dim_x:
        raise DimensionError(
            f"dataset dim {dataset.dim} != config dim_x {config.dim_x}")
    if config.k_pseudo > n:
        raise ValueError("k_pseudo exceeds the number of training rows")
    rows = rng.choice(n, size=config.k_pseudo, replace=False)
    return build_model(config.dim_x, config.dim_z, config.hidden,
                       config.decoder_activation,
                       dataset.features[rows], rng)


def _epoch_batches(rng: np.random.Generator, n: int, batch_size: int):
    """Seeded permutation of range(n), yielded in batch-sized slices."""
    perm = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield perm[start:start + batch_size]


def train(dataset: Dataset, config: TrainConfig) -> tuple[SwaeModel, TrainLog]:
    """Run the full training loop; returns the model and per-epoch log."""
    if dataset.n_samples == 0:
        raise ValueError("dataset is empty")
    started = time.perf_counter()
    rng = make_rng(config.seed)
    model = init_model(dataset, config, rng)
    params = model.trainable_arrays()
    state = AdamState.for_params(params, lr=config.lr,
                                 beta1=config.adam_beta1,
                                 beta2=config.adam_beta2,
                                 eps=config.adam_eps)
    weights = config.weights()
    log = TrainLog()
    x_all = dataset.features
    for _ in range(config.epochs):
        sums = np.zeros(4)
        n_batches = 0
        for idx in _epoch_batches(rng, dataset.n_samples, config.batch_size):
            x_batch = x_all[idx]
            u_idx = nearest_pseudo_inputs(x_batch, model, config.nearest_mode)
            eps = rng.standard_normal((len(idx), config.dim_z))
            grads, bd = swae_grad(model, x_batch, u_idx, eps, weights)
            for name, value in (("x_loss", bd.x_loss),
                                ("recon_loss", bd.recon_loss),
                                ("z_loss", bd.z_loss)):
                if not np.isfinite(value):
                    raise NumericError(
                        f"{name} became non-finite at step {log.steps + 1}")
            adam_step(state, params, grads.arrays())
            sums += (bd.x_loss, bd.recon_loss, bd.z_loss, bd.total)
            n_batches += 1
            log.steps += 1
        avg = sums / n_batches
        log.epochs.append(LossBreakdown(x_loss=avg[0], recon_loss=avg[1],
                                        z_loss=avg[2], total=avg[3]))
    log.duration_seconds = time.perf_counter() - started
    return model, log
