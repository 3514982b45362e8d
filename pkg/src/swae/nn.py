"""Dense multilayer perceptrons with hand-wired backprop, plus Adam.

All numeric state is float64 numpy arrays (row-major). A "tensor" in this
package is simply such an array; batches are stacked along axis 0.

Randomness comes from numpy's PCG64 generator (see :func:`make_rng`), so
streams are reproducible for a fixed seed within one build.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimensionError, NumericError

ACTIVATIONS = ("identity", "tanh", "sigmoid")


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator used everywhere randomness is needed."""
    return np.random.Generator(np.random.PCG64(seed))


def _apply_activation(tag: str, x: np.ndarray) -> np.ndarray:
    if tag == "identity":
        return x
    if tag == "tanh":
        return np.tanh(x)
    if tag == "sigmoid":
        return 1.0 / (1.0 + np.exp(-x))
    raise ValueError(f"unknown activation {tag!r}")


def _activation_grad(tag: str, y: np.ndarray) -> np.ndarray:
    """d(activation)/d(pre-activation), expressed via the output y."""
    if tag == "identity":
        return np.ones_like(y)
    if tag == "tanh":
        return 1.0 - y * y
    if tag == "sigmoid":
        return y * (1.0 - y)
    raise ValueError(f"unknown activation {tag!r}")


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths (input, hidden..., output) and per-layer activations."""

    widths: tuple[int, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        if len(self.widths) < 2:
            raise ValueError("need at least an input and an output width")
        if any(w <= 0 for w in self.widths):
            raise ValueError("layer widths must be positive")
        if len(self.activations) != len(self.widths) - 1:
            raise ValueError("one activation tag per layer required")
        for tag in self.activations:
            if tag not in ACTIVATIONS:
                raise ValueError(f"unknown activation {tag!r}")

    @property
    def n_layers(self) -> int:
        return len(self.widths) - 1

    @property
    def in_width(self) -> int:
        return self.widths[0]

    @property
    def out_width(self) -> int:
        return self.widths[-1]


@dataclass
class MlpParams:
    """Per-layer weight matrices (out x in) and bias vectors (out,).

    Also reused as the container for gradients, which mirror the
    parameter shapes exactly.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def arrays(self) -> list[np.ndarray]:
        """Flat [W0, b0, W1, b1, ...] view of the underlying buffers."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])


def init_mlp(spec: MlpSpec, rng: np.random.Generator) -> MlpParams:
    """Symmetric uniform init, +-sqrt(6 / (fan_in + fan_out)); zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.widths[:-1], spec.widths[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases)


def zeros_like_params(params: MlpParams) -> MlpParams:
    return MlpParams([np.zeros_like(w) for w in params.weights],
                     [np.zeros_like(b) for b in params.biases])


def mlp_forward(params: MlpParams, spec: MlpSpec,
                x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Batched forward pass.

    Args:
        x: (batch, in_width) array.

    Returns:
        (y, cache) where y is (batch, out_width) and cache holds the input
        plus every layer output, as needed by :func:`mlp_backward`.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.in_width:
        raise DimensionError(
            f"expected input of width {spec.in_width}, got shape {x.shape}")
    cache = [x]
    h = x
    for w, b, tag in zip(params.weights, params.biases, spec.activations):
        h = _apply_activation(tag, h @ w.T + b)
        cache.append(h)
    return h, cache


def mlp_backward(params: MlpParams, spec: MlpSpec, cache: list[np.ndarray],
                 dy: np.ndarray) -> tuple[np.ndarray, MlpParams]:
    """Backprop through a cached forward pass.

    Args:
        dy: gradient of the loss w.r.t. the forward output, same shape.

    Returns:
        (dx, grads) with dx the gradient w.r.t. the input batch and grads
        an MlpParams-shaped container of parameter gradients.
    """
    dy = np.asarray(dy, dtype=np.float64)
    if dy.shape != cache[-1].shape:
        raise DimensionError(
            f"dy shape {dy.shape} does not match output {cache[-1].shape}")
    grads = zeros_like_params(params)
    delta = dy
    for layer in range(spec.n_layers - 1, -1, -1):
        y = cache[layer + 1]
        h_in = cache[layer]
        delta = delta * _activation_grad(spec.activations[layer], y)
        grads.weights[layer] = delta.T @ h_in
        grads.biases[layer] = delta.sum(axis=0)
        delta = delta @ params.weights[layer]
    return delta, grads


def fd_gradient(loss_fn: Callable[[], float], arrays: Iterable[np.ndarray],
                h: float = 1e-5) -> list[np.ndarray]:
    """Central finite differences of a scalar loss over parameter buffers.

    ``loss_fn`` takes no arguments and must read the current contents of
    ``arrays``; each scalar entry is perturbed in place by +-h and restored.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    grads = []
    for arr in arrays:
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_fn()
            flat[i] = orig - h
            down = loss_fn()
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads


@dataclass
class AdamState:
    """First/second moment buffers and step counter for a parameter list."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], lr: float = 0.001,
                   beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params],
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state: AdamState, params: Sequence[np.ndarray],
              grads: Sequence[np.ndarray]) -> None:
    """One bias-corrected Adam update; mutates params and state in place."""
    if len(params) != len(state.m) or len(grads) != len(params):
        raise DimensionError("params/grads do not match the Adam state")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise NumericError("non-finite gradient entry in adam_step")
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
