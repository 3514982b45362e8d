"""Training objective: data-space, latent-space and reconstruction terms.

The per-batch cost is

    total = beta * x_loss + (1 - beta) * recon_loss + alpha * z_loss

where every term is the batch mean of a squared Euclidean distance:

* x_loss:     observed x vs decoded prior draw D(z_d)
* recon_loss: observed x vs its own reconstruction D(E(x))
* z_loss:     encoding E(x) vs the prior draw z_d

Gradients are wired by hand through all four parameter groups (encoder,
decoder, prior net, pseudo-inputs). The prior draw is reparameterized as
mean + exp(log_var / 2) * eps, so the prior net and the pseudo-inputs
receive gradient through z_d; the nearest-pseudo-input selection itself
is piecewise constant and treated as fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model import SwaeModel
from .nn import MlpParams, mlp_backward, mlp_forward


@dataclass(frozen=True)
class LossWeights:
    beta: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class LossBreakdown:
    x_loss: float
    recon_loss: float
    z_loss: float
    total: float


@dataclass
class SwaeGrads:
    """Gradients for the four parameter groups, mirroring their shapes."""

    encoder: MlpParams
    decoder: MlpParams
    prior: MlpParams
    pseudo_inputs: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return (self.encoder.arrays() + self.decoder.arrays()
                + self.prior.arrays() + [self.pseudo_inputs])


def combine_terms(weights: LossWeights, x_loss: float, recon_loss: float,
                  z_loss: float) -> LossBreakdown:
    """Single code path for the weighted total; used by loss and grad."""
    total = (weights.beta * x_loss + (1.0 - weights.beta) * recon_loss
             + weights.alpha * z_loss)
    return LossBreakdown(x_loss=x_loss, recon_loss=recon_loss,
                         z_loss=z_loss, total=total)


def _mean_sq_dist(a: np.ndarray, b: np.ndarray) -> float:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.mean(np.sum(diff * diff, axis=1)))


def x_loss(x_e: np.ndarray, x_gen: np.ndarray) -> float:
    """Batch mean of ||x_e - x_gen||^2 per row."""
    return _mean_sq_dist(x_e, x_gen)


def z_loss(z_e: np.ndarray, z_d: np.ndarray) -> float:
    """Batch mean of ||z_e - z_d||^2 per row."""
    return _mean_sq_dist(z_e, z_d)


def recon_loss(x_e: np.ndarray, x_rec: np.ndarray) -> float:
    """Batch mean of ||x_e - x_rec||^2 per row."""
    return _mean_sq_dist(x_e, x_rec)


def swae_loss(model: SwaeModel, x_batch: np.ndarray, z_d_batch: np.ndarray,
              weights: LossWeights) -> LossBreakdown:
    """Evaluate all three terms for a batch and its prior draws."""
    x_batch = np.atleast_2d(np.asarray(x_batch, dtype=np.float64))
    z_d_batch = np.atleast_2d(np.asarray(z_d_batch, dtype=np.float64))
    z_e, _ = mlp_forward(model.enc_params, model.enc_spec, x_batch)
    x_rec, _ = mlp_forward(model.dec_params, model.dec_spec, z_e)
    x_gen, _ = mlp_forward(model.dec_params, model.dec_spec, z_d_batch)
    return combine_terms(weights,
                         x_loss=_mean_sq_dist(x_batch, x_gen),
                         recon_loss=_mean_sq_dist(x_batch, x_rec),
                         z_loss=_mean_sq_dist(z_e, z_d_batch))


def _add_params(acc: MlpParams, extra: MlpParams) -> None:
    for a, e in zip(acc.weights, extra.weights):
        a += e
    for a, e in zip(acc.biases, extra.biases):
        a += e


def compute_z_d(model: SwaeModel, u_indices: np.ndarray,
                eps_batch: np.ndarray) -> np.ndarray:
    """Prior draws for the selected pseudo-inputs under fixed noise."""
    g_out, _ = mlp_forward(model.prior_params, model.prior_spec,
                           model.pseudo_inputs[np.asarray(u_indices)])
    dz = model.dim_z
    mu = g_out[:, :dz]
    ell = np.clip(g_out[:, dz:], model.logvar_min, model.logvar_max)
    return mu + np.exp(0.5 * ell) * np.asarray(eps_batch, dtype=np.float64)


def _weighted_grad(model: SwaeModel, x_batch: np.ndarray,
                   u_indices: np.ndarray, eps_batch: np.ndarray,
                   wx: float, wr: float, wz: float
                   ) -> tuple[SwaeGrads, float, float, float]:
    """Gradients of wx*x_loss + wr*recon_loss + wz*z_loss.

    Kept separate from the (beta, alpha) parameterization so each term's
    contribution stays linear in its weight.
    """
    x_batch = np.atleast_2d(np.asarray(x_batch, dtype=np.float64))
    u_indices = np.asarray(u_indices)
    eps_batch = np.atleast_2d(np.asarray(eps_batch, dtype=np.float64))
    n = x_batch.shape[0]
    if u_indices.shape != (n,) or eps_batch.shape != (n, model.dim_z):
        raise DimensionError("u_indices/eps_batch do not match the batch")

    # forward passes, caches kept for backprop
    z_e, enc_cache = mlp_forward(model.enc_params, model.enc_spec, x_batch)
    x_rec, dec_cache_rec = mlp_forward(model.dec_params, model.dec_spec, z_e)
    u_sel = model.pseudo_inputs[u_indices]
    g_out, prior_cache = mlp_forward(model.prior_params, model.prior_spec,
                                     u_sel)
    dz = model.dim_z
    mu = g_out[:, :dz]
    raw_ell = g_out[:, dz:]
    ell = np.clip(raw_ell, model.logvar_min, model.logvar_max)
    sigma = np.exp(0.5 * ell)
    z_d = mu + sigma * eps_batch
    x_gen, dec_cache_gen = mlp_forward(model.dec_params, model.dec_spec, z_d)

    lx = _mean_sq_dist(x_batch, x_gen)
    lr = _mean_sq_dist(x_batch, x_rec)
    lz = _mean_sq_dist(z_e, z_d)

    # upstream gradients of the weighted sum
    d_x_gen = wx * (2.0 / n) * (x_gen - x_batch)
    d_x_rec = wr * (2.0 / n) * (x_rec - x_batch)
    d_z_e = wz * (2.0 / n) * (z_e - z_d)
    d_z_d = wz * (2.0 / n) * (z_d - z_e)

    # decoder sees two batches: prior draws and reconstructions
    d_z_d_gen, dec_grads = mlp_backward(model.dec_params, model.dec_spec,
                                        dec_cache_gen, d_x_gen)
    d_z_e_rec, dec_grads_rec = mlp_backward(model.dec_params, model.dec_spec,
                                            dec_cache_rec, d_x_rec)
    _add_params(dec_grads, dec_grads_rec)

    _, enc_grads = mlp_backward(model.enc_params, model.enc_spec, enc_cache,
                                d_z_e + d_z_e_rec)

    # reparameterization: z_d = mu + exp(ell/2) * eps, hard clamp on ell
    d_z_d_total = d_z_d + d_z_d_gen
    d_mu = d_z_d_total
    d_ell = d_z_d_total * eps_batch * 0.5 * sigma
    saturated = (raw_ell > model.logvar_max) | (raw_ell < model.logvar_min)
    d_ell = np.where(saturated, 0.0, d_ell)
    d_u_sel, prior_grads = mlp_backward(
        model.prior_params, model.prior_spec, prior_cache,
        np.concatenate([d_mu, d_ell], axis=1))

    # scatter-add per-row pseudo-input gradients back to the bank
    d_pseudo = np.zeros_like(model.pseudo_inputs)
    np.add.at(d_pseudo, u_indices, d_u_sel)

    grads = SwaeGrads(encoder=enc_grads, decoder=dec_grads,
                      prior=prior_grads, pseudo_inputs=d_pseudo)
    return grads, lx, lr, lz


def swae_grad(model: SwaeModel, x_batch: np.ndarray, u_indices: np.ndarray,
              eps_batch: np.ndarray, weights: LossWeights
              ) -> tuple[SwaeGrads, LossBreakdown]:
    """Exact gradient of the weighted objective for one batch.

    ``u_indices`` are the nearest-pseudo-input selections (held fixed
    during differentiation) and ``eps_batch`` the standard-normal noise
    used for the reparameterized prior draws.
    """
    grads, lx, lr, lz = _weighted_grad(model, x_batch, u_indices, eps_batch,
                                       weights.beta, 1.0 - weights.beta,
                                       weights.alpha)
    return grads, combine_terms(weights, lx, lr, lz)
