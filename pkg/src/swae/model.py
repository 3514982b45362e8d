"""Autoencoder with a learnable mixture prior over pseudo-inputs.

The model holds three deterministic MLPs plus a trainable bank of
pseudo-inputs:

* encoder  E: data -> latent
* decoder  D: latent -> data (sigmoid output for image data, identity
  for unbounded features)
* prior net: data -> (mean, log-variance) of a diagonal Gaussian; the
  marginal prior is the uniform mixture of the K conditionals evaluated
  at the pseudo-inputs.

New data is generated by picking a pseudo-input uniformly, sampling its
conditional Gaussian, and decoding the draw.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .nn import MlpParams, MlpSpec, init_mlp, mlp_forward

LOGVAR_MIN = -6.0
LOGVAR_MAX = 2.0


@dataclass
class GaussianParams:
    """Diagonal Gaussian: mean and clamped log-variance, possibly batched."""

    mean: np.ndarray
    log_var: np.ndarray


@dataclass
class SwaeModel:
    enc_spec: MlpSpec
    enc_params: MlpParams
    dec_spec: MlpSpec
    dec_params: MlpParams
    prior_spec: MlpSpec
    prior_params: MlpParams
    pseudo_inputs: np.ndarray  # (K, dim_x), trainable
    logvar_min: float = LOGVAR_MIN
    logvar_max: float = LOGVAR_MAX

    @property
    def dim_x(self) -> int:
        return self.enc_spec.in_width

    @property
    def dim_z(self) -> int:
        return self.enc_spec.out_width

    @property
    def n_pseudo(self) -> int:
        return self.pseudo_inputs.shape[0]

    def trainable_arrays(self) -> list[np.ndarray]:
        """Every trainable buffer, in the fixed update/checkpoint order."""
        return (self.enc_params.arrays() + self.dec_params.arrays()
                + self.prior_params.arrays() + [self.pseudo_inputs])


def build_model(dim_x: int, dim_z: int, hidden: tuple[int, ...],
                decoder_activation: str, pseudo_inputs: np.ndarray,
                rng: np.random.Generator) -> SwaeModel:
    """Construct and initialize the three networks around a pseudo-input bank.

    Hidden layers are tanh throughout; encoder and prior outputs are linear.
    The prior net emits 2*dim_z values per row: mean, then log-variance.
    """
    if dim_z >= dim_x:
        warnings.warn(f"dim_z={dim_z} is not smaller than dim_x={dim_x}",
                      stacklevel=2)
    pseudo_inputs = np.asarray(pseudo_inputs, dtype=np.float64)
    if pseudo_inputs.ndim != 2 or pseudo_inputs.shape[1] != dim_x:
        raise DimensionError("pseudo_inputs must be (K, dim_x)")
    if pseudo_inputs.shape[0] < 1:
        raise ValueError("need at least one pseudo-input")
    hid_acts = ("tanh",) * len(hidden)
    enc_spec = MlpSpec((dim_x, *hidden, dim_z), (*hid_acts, "identity"))
    dec_spec = MlpSpec((dim_z, *hidden, dim_x), (*hid_acts, decoder_activation))
    prior_spec = MlpSpec((dim_x, *hidden, 2 * dim_z), (*hid_acts, "identity"))
    return SwaeModel(
        enc_spec=enc_spec, enc_params=init_mlp(enc_spec, rng),
        dec_spec=dec_spec, dec_params=init_mlp(dec_spec, rng),
        prior_spec=prior_spec, prior_params=init_mlp(prior_spec, rng),
        pseudo_inputs=pseudo_inputs.copy(),
    )


def encode(model: SwaeModel, x: np.ndarray) -> np.ndarray:
    """Deterministic latent representation E(x), batched."""
    z, _ = mlp_forward(model.enc_params, model.enc_spec, np.atleast_2d(x))
    return z


def decode(model: SwaeModel, z: np.ndarray) -> np.ndarray:
    """Deterministic reconstruction/generation D(z), batched."""
    x, _ = mlp_forward(model.dec_params, model.dec_spec, np.atleast_2d(z))
    return x


def conditional_prior(model: SwaeModel, u: np.ndarray) -> GaussianParams:
    """Gaussian conditional prior parameters for each row of u.

    The raw log-variance is hard-clamped to [logvar_min, logvar_max] to
    keep exp(log_var / 2) well behaved.
    """
    out, _ = mlp_forward(model.prior_params, model.prior_spec, np.atleast_2d(u))
    dz = model.dim_z
    mean = out[:, :dz]
    log_var = np.clip(out[:, dz:], model.logvar_min, model.logvar_max)
    return GaussianParams(mean=mean, log_var=log_var)


def sample_conditional(g: GaussianParams, eps: np.ndarray) -> np.ndarray:
    """Reparameterized draw mean + exp(log_var / 2) * eps."""
    eps = np.asarray(eps, dtype=np.float64)
    if eps.shape != np.shape(g.mean):
        raise DimensionError("eps shape must match the Gaussian parameters")
    return g.mean + np.exp(0.5 * g.log_var) * eps


def sample_prior(model: SwaeModel, rng, n: int = 1) -> np.ndarray:
    """Draw n latents from the mixture prior: uniform component, then
    the component's conditional Gaussian. Returns (n, dim_z)."""
    ks = np.asarray(rng.integers(0, model.n_pseudo, size=n))
    g = conditional_prior(model, model.pseudo_inputs[ks])
    eps = np.asarray(rng.standard_normal((n, model.dim_z)))
    return sample_conditional(g, eps)


def prior_log_density(model: SwaeModel, z: np.ndarray) -> float | np.ndarray:
    """Log density of the K-component mixture prior at z.

    Uses log-sum-exp over components. Accepts a single (dim_z,) point or
    a (batch, dim_z) array; returns a scalar or a (batch,) array to match.
    """
    z = np.asarray(z, dtype=np.float64)
    single = z.ndim == 1
    zb = np.atleast_2d(z)
    if zb.shape[1] != model.dim_z:
        raise DimensionError(f"z must have width {model.dim_z}")
    g = conditional_prior(model, model.pseudo_inputs)  # (K, dz) each
    # component log densities, shape (batch, K)
    diff = zb[:, None, :] - g.mean[None, :, :]
    quad = np.sum(diff * diff * np.exp(-g.log_var)[None, :, :], axis=2)
    log_norm = np.sum(g.log_var, axis=1) + model.dim_z * np.log(2.0 * np.pi)
    comp = -0.5 * (quad + log_norm[None, :])
    peak = comp.max(axis=1, keepdims=True)
    log_mix = peak[:, 0] + np.log(
        np.mean(np.exp(comp - peak), axis=1))
    return float(log_mix[0]) if single else log_mix
