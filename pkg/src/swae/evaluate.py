"""Evaluation protocols: k-NN latent classification, local-structure
preservation, reconstruction error, denoising, and generation quality
measured as an empirical Wasserstein distance between generated and
held-out samples.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np

from .data import Dataset, add_noise
from .errors import DimensionError
from .model import SwaeModel, decode, encode, sample_prior
from .nn import make_rng
from .ot import empirical_wasserstein

MAX_GENERATION_ATOMS = 512


class DegenerateDistanceWarning(UserWarning):
    """All distances tied; the rank correlation is defined as 0."""


class DenoiseReport(NamedTuple):
    mse_noisy_to_clean: float
    mse_recon_to_clean: float


def knn_accuracy(train_z: np.ndarray, train_y: np.ndarray,
                 test_z: np.ndarray, test_y: np.ndarray, k: int) -> float:
    """Fraction of test points whose k-NN majority label is correct.

    Distances are squared L2 in latent space. Distance ties resolve to
    the lower training index; vote ties to the smallest label value.
    """
    train_z = np.atleast_2d(np.asarray(train_z, dtype=np.float64))
    test_z = np.atleast_2d(np.asarray(test_z, dtype=np.float64))
    train_y = np.asarray(train_y, dtype=np.int64)
    test_y = np.asarray(test_y, dtype=np.int64)
    n_train = train_z.shape[0]
    if n_train == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= n_train:
        raise ValueError(f"k must lie in [1, {n_train}]")
    if train_z.shape[1] != test_z.shape[1]:
        raise DimensionError("latent widths differ between train and test")
    correct = 0
    for row, label in zip(test_z, test_y):
        diff = train_z - row
        d2 = np.sum(diff * diff, axis=1)
        neighbors = np.argsort(d2, kind="stable")[:k]
        votes = np.bincount(train_y[neighbors])
        if int(np.argmax(votes)) == label:
            correct += 1
    return correct / len(test_y)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..m with ties replaced by the mean rank of the tied group."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_from_distances(dist_a: np.ndarray, dist_b: np.ndarray) -> float:
    """Rank correlation 1 - 6*sum(d^2) / (m(m^2-1)) with average-rank ties."""
    dist_a = np.asarray(dist_a, dtype=np.float64)
    dist_b = np.asarray(dist_b, dtype=np.float64)
    if dist_a.shape != dist_b.shape or dist_a.ndim != 1:
        raise DimensionError("distance vectors must be 1-D and equal length")
    m = len(dist_a)
    if np.all(dist_a == dist_a[0]) or np.all(dist_b == dist_b[0]):
        warnings.warn("all distances equal; correlation defined as 0",
                      DegenerateDistanceWarning, stacklevel=2)
        return 0.0
    d = _average_ranks(dist_a) - _average_ranks(dist_b)
    return 1.0 - 6.0 * float(np.sum(d * d)) / (m * (m * m - 1.0))


def local_structure_spearman(data: np.ndarray, latents: np.ndarray,
                             target_index: int = 0) -> float:
    """Rank agreement between data-space and latent-space distances to a
    target sample, over the remaining samples."""
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    latents = np.atleast_2d(np.asarray(latents, dtype=np.float64))
    n = data.shape[0]
    if latents.shape[0] != n:
        raise DimensionError("data and latents must have equal counts")
    if n < 3:
        raise ValueError("need at least 3 samples")
    if not 0 <= target_index < n:
        raise ValueError("target_index out of range")
    keep = np.arange(n) != target_index
    d_data = np.sum((data[keep] - data[target_index]) ** 2, axis=1)
    d_lat = np.sum((latents[keep] - latents[target_index]) ** 2, axis=1)
    return spearman_from_distances(d_data, d_lat)


def reconstruction_error(model: SwaeModel, d: Dataset) -> float:
    """Mean over samples of the squared L2 error of D(E(x))."""
    if d.dim != model.dim_x:
        raise DimensionError("dataset width does not match the model")
    recon = decode(model, encode(model, d.features))
    diff = d.features - recon
    return float(np.mean(np.sum(diff * diff, axis=1)))


def denoise_report(model: SwaeModel, clean: Dataset, sigma: float,
                   seed: int) -> DenoiseReport:
    """Corrupt, reconstruct, and compare both against the clean samples."""
    noisy = add_noise(clean, sigma, seed)
    diff_noise = noisy.features - clean.features
    recon = decode(model, encode(model, noisy.features))
    diff_recon = recon - clean.features
    return DenoiseReport(
        mse_noisy_to_clean=float(np.mean(np.sum(diff_noise ** 2, axis=1))),
        mse_recon_to_clean=float(np.mean(np.sum(diff_recon ** 2, axis=1))))


def generation_quality(model: SwaeModel, held_out: Dataset, n_gen: int,
                       seed: int, p: int = 2) -> float:
    """Empirical p-Wasserstein distance between n_gen generated samples
    and an equal-size held-out set, in data space."""
    if n_gen > MAX_GENERATION_ATOMS:
        raise ValueError(f"n_gen must not exceed {MAX_GENERATION_ATOMS}")
    if held_out.n_samples != n_gen:
        raise DimensionError(
            f"held-out size {held_out.n_samples} != n_gen {n_gen}")
    z = sample_prior(model, make_rng(seed), n=n_gen)
    generated = decode(model, z)
    return empirical_wasserstein(generated, held_out.features, p=p)
